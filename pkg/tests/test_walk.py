import math

import numpy as np
import pytest

from ctqw import decomposition as dc
from ctqw import graphs, walk

TIMES = (0.0, 0.3, 1.7, 10.0)


def _series_amplitude(g, x, y, t, terms=80):
    """Truncated power series of the evolution operator applied to a basis vector.

    The truncation error is bounded by sum_{k>K} (t*||L||)^k / k!, which the
    caller keeps far below the comparison tolerance by choosing K large.
    """
    lap = np.asarray(graphs.laplacian(g), dtype=complex)
    vec = np.zeros(g.n, dtype=complex)
    vec[x - 1] = 1.0
    acc = vec.copy()
    term = vec.copy()
    for k in range(1, terms):
        term = (1j * t / k) * (lap @ term)
        acc += term
    # explicit tail bound so the cross-check itself is trustworthy
    norm = np.linalg.norm(lap, 2).real
    tail = (t * norm) ** terms / math.factorial(terms)
    assert tail < 1e-12
    return complex(acc[y - 1])


def _partitions(g):
    parts = [dc.verify_fid(g, [list(g.vertices())]),
             dc.verify_fid(g, [[v] for v in g.vertices()]),
             dc.twin_coarsen(g)]
    dom = dc.dominating_split(g)
    if dom is not None:
        parts.append(dom)
    assert all(isinstance(p, dc.FidPartition) for p in parts)
    return parts


def _composite(rng):
    pieces = [graphs.erdos_renyi(int(rng.integers(2, 9)), float(rng.uniform(0.2, 0.8)),
                                 seed=int(rng.integers(1 << 32)))
              for _ in range(int(rng.integers(1, 4)))]
    g = pieces[0]
    for piece in pieces[1:]:
        g = graphs.join(g, piece) if rng.random() < 0.5 else graphs.disjoint_union(g, piece)
    return g


def test_time_zero_is_identity():
    g = graphs.erdos_renyi(8, 0.5, seed=14)
    for x in g.vertices():
        for y in g.vertices():
            amp = walk.amplitude_direct(g, x, y, 0.0)
            assert abs(amp - (1.0 if x == y else 0.0)) < 1e-14


def test_single_edge_amplitude_closed_form():
    g = graphs.complete(2)
    for t in (0.0, 0.4, 1.3, math.pi / 2):
        amp = walk.amplitude_direct(g, 1, 1, t)
        assert abs(amp - (1.0 + np.exp(2j * t)) / 2.0) < 1e-12
        prob = walk.probability_direct(g, 1, 1, t).probability
        assert abs(prob - math.cos(t) ** 2) < 1e-12
        # consistent with the dominating-vertex form at n = 2
        assert abs(prob - walk.dominating_return_probability(2, t)) < 1e-12


def test_series_cross_check():
    g = graphs.join(graphs.path(3), graphs.edgeless(2))
    for t in (0.2, 0.9):
        for x, y in ((1, 1), (1, 4), (2, 5)):
            direct = walk.amplitude_direct(g, x, y, t)
            series = _series_amplitude(g, x, y, t)
            assert abs(direct - series) < 1e-10


def test_edgeless_graph_stays_put():
    g = graphs.edgeless(4)
    for t in TIMES:
        for y in g.vertices():
            amp = walk.amplitude_direct(g, 2, y, t)
            assert abs(amp - (1.0 if y == 2 else 0.0)) < 1e-14


def test_unitarity_both_routes():
    rng = np.random.default_rng(41)
    g = _composite(rng)
    for t in TIMES:
        direct = walk.probability_matrix_direct(g, t)
        assert np.abs(direct.sum(axis=1) - 1.0).max() < 1e-9
        for part in _partitions(g):
            fid = walk.probability_matrix_fid(g, part, t)
            assert np.abs(fid.sum(axis=1) - 1.0).max() < 1e-9


def test_symmetry_of_probabilities():
    rng = np.random.default_rng(43)
    g = _composite(rng)
    for t in TIMES:
        prob = walk.probability_matrix_direct(g, t)
        assert np.abs(prob - prob.T).max() < 1e-9


def test_complete4_return_at_quarter_pi():
    prob = walk.probability_direct(graphs.complete(4), 1, 1, math.pi / 4).probability
    assert abs(prob - 0.25) < 1e-12


def test_disjoint_components_never_mix():
    g = graphs.disjoint_union(graphs.complete(2), graphs.complete(2))
    part = dc.verify_fid(g, [[1, 2], [3, 4]])
    for t in TIMES:
        assert walk.probability_direct(g, 1, 3, t).probability < 1e-24
        assert abs(walk.amplitude_fid(g, part, 1, 4, t)) < 1e-14


def test_fid_route_matches_direct_route():
    rng = np.random.default_rng(47)
    for _ in range(12):
        g = _composite(rng)
        for t in TIMES:
            direct = walk.probability_matrix_direct(g, t)
            for part in _partitions(g):
                fid = walk.probability_matrix_fid(g, part, t)
                assert np.abs(fid - direct).max() < 1e-9


def test_trivial_partition_reduces_to_direct():
    g = graphs.erdos_renyi(9, 0.4, seed=51)
    part = dc.verify_fid(g, [list(g.vertices())])
    for t in TIMES:
        for x, y in ((1, 1), (2, 7), (9, 3)):
            assert abs(walk.amplitude_fid(g, part, x, y, t)
                       - walk.amplitude_direct(g, x, y, t)) < 1e-12


def test_scalar_fid_matches_matrix_fid():
    rng = np.random.default_rng(53)
    g = _composite(rng)
    part = dc.twin_coarsen(g)
    for t in (0.3, 1.7):
        fid = walk.probability_matrix_fid(g, part, t)
        for x, y in ((1, 1), (1, g.n), (g.n // 2 + 1, 2)):
            rep = walk.probability_fid_terms(g, part, x, y, t)
            assert abs(rep.probability - fid[x - 1, y - 1]) < 1e-12


def test_term_breakdown_sums_to_probability():
    rng = np.random.default_rng(59)
    g = _composite(rng)
    for part in _partitions(g):
        for t in TIMES:
            for x in (1, g.n):
                for y in (1, 2, g.n):
                    rep = walk.probability_fid_terms(g, part, x, y, t)
                    assert abs(sum(rep.terms.values()) - rep.probability) < 1e-12
                    assert abs(abs(rep.amplitude) ** 2 - rep.probability) < 1e-12
                    if part.block_of(x) == part.block_of(y):
                        assert set(rep.terms) == {"subgraph", "tilde", "correction_const",
                                                  "correction_cos", "correction_cross"}
                    else:
                        assert set(rep.terms) == {"tilde_cross"}
                    direct = walk.probability_direct(g, x, y, t).probability
                    assert abs(rep.probability - direct) < 1e-9


def test_terms_at_time_zero():
    g = graphs.star(6)
    part = dc.twin_coarsen(g)
    rep = walk.probability_fid_terms(g, part, 2, 2, 0.0)
    assert abs(rep.probability - 1.0) < 1e-12
    assert abs(rep.terms["subgraph"] - 1.0) < 1e-12
    off = walk.probability_fid_terms(g, part, 2, 3, 0.0)
    assert abs(off.probability) < 1e-12


def test_dominating_closed_forms():
    assert abs(walk.dominating_return_probability(2, math.pi / 2)) < 1e-15
    assert abs(walk.dominating_cross_probability(2, math.pi / 2) - 1.0) < 1e-15
    assert walk.dominating_return_probability(7, 0.0) == 1.0
    assert walk.dominating_cross_probability(7, 0.0) == 0.0
    ts = np.linspace(0.0, 7.0, 200)
    for n in (2, 3, 10, 57):
        assert (n * (1.0 - walk.dominating_return_probability(n, ts)) <= 4.0 + 1e-12).all()


def test_dominating_forms_match_simulation():
    ts = walk.time_grid(steps=16)
    cases = [(graphs.complete(9), 1), (graphs.star(11), 1),
             (graphs.threshold_model(13, 0.7, seed=2), None)]
    for g, x in cases:
        if x is None:
            dom = np.flatnonzero(g.degrees() == g.n - 1)
            assert dom.size > 0
            x = int(dom[0]) + 1
        for t in ts:
            ret = walk.probability_direct(g, x, x, float(t)).probability
            assert abs(ret - walk.dominating_return_probability(g.n, float(t))) < 1e-10
            for y in g.vertices():
                if y == x:
                    continue
                cross = walk.probability_direct(g, x, y, float(t)).probability
                assert abs(cross - walk.dominating_cross_probability(g.n, float(t))) < 1e-10


def test_return_gap_trivial_partition_is_zero():
    g = graphs.erdos_renyi(8, 0.5, seed=61)
    part = dc.verify_fid(g, [list(g.vertices())])
    for t in TIMES:
        gap, bound = walk.return_probability_gap(g, part, 0, 3, t)
        assert gap < 1e-12
        assert bound == 0.5


def test_return_gap_star_leaves():
    g = graphs.star(9)
    part = dc.twin_coarsen(g)
    for t in TIMES:
        gap, bound = walk.return_probability_gap(g, part, 1, 5, t)
        assert bound == 0.5
        assert gap <= bound + 1e-9


def test_return_gap_complete_dominating():
    g = graphs.complete(10)
    part = dc.dominating_split(g)
    for t in TIMES:
        gap, bound = walk.return_probability_gap(g, part, 0, 1, t)
        assert gap <= 0.4 + 1e-9


def test_return_gap_bound_holds_randomized():
    rng = np.random.default_rng(67)
    for _ in range(6):
        g = _composite(rng)
        for part in _partitions(g):
            for i in range(part.k):
                x = part.blocks[i][0]
                for t in TIMES:
                    gap, bound = walk.return_probability_gap(g, part, i, x, t)
                    assert gap <= bound + 1e-9


def test_return_gap_rejects_foreign_vertex():
    g = graphs.star(5)
    part = dc.twin_coarsen(g)
    with pytest.raises(ValueError, match="not in block"):
        walk.return_probability_gap(g, part, 0, 2, 1.0)
    with pytest.raises(ValueError, match="block index"):
        walk.return_probability_gap(g, part, 5, 1, 1.0)


def test_scan_at_time_zero_returns_one():
    for family in ("dominating", "clique"):
        rows = walk.localization_scan(family, [10], [0.0])
        assert all(abs(r.return_probability - 1.0) < 1e-9 for r in rows)


def test_dominating_scan_respects_bound():
    rows = walk.localization_scan("dominating", [10, 100, 1000], walk.time_grid(steps=16))
    assert len(rows) == 48
    for r in rows:
        assert 1.0 - r.return_probability <= r.bound
        assert r.bound == 4.0 / r.size
    # rows arrive in (size, time) order
    assert [r.size for r in rows] == sorted(r.size for r in rows)


def test_clique_scan_respects_bound():
    rows = walk.localization_scan("clique", [12, 22], walk.time_grid(steps=8), gateways=2)
    for r in rows:
        assert r.size in (10, 20)
        assert 1.0 - r.return_probability <= r.bound + 1e-9
        assert r.bound == 8.0 / r.size


def test_scan_input_validation():
    with pytest.raises(ValueError, match="ascending"):
        walk.localization_scan("dominating", [10, 10], [0.0])
    with pytest.raises(ValueError, match="ascending"):
        walk.localization_scan("dominating", [100, 10], [0.0])
    with pytest.raises(ValueError, match="unknown scan family"):
        walk.localization_scan("mystery", [10], [0.0])


def test_clique_gateway_graph_structure():
    outer = graphs.path(4)
    g = walk.build_clique_gateway_graph(6, gateways=2, outer=outer)
    assert g.n == 10
    clique = list(range(1, 7))
    for u in clique:
        for v in clique:
            if u != v:
                assert g.has_edge(u, v)
    # non-gateway clique vertices have no outside edges
    for v in (1, 2, 3, 4):
        assert set(g.neighbors(v)) == set(clique) - {v}
    assert g.has_edge(5, 7)
    assert g.has_edge(6, 7) and g.has_edge(6, 8)
    part = dc.clique_gateway_split(g, clique)
    assert part.blocks[0] == (1, 2, 3, 4)
    with pytest.raises(ValueError, match="non-gateway"):
        walk.build_clique_gateway_graph(2, gateways=2, outer=outer)


def test_periodicity_on_integer_spectra():
    for g in (graphs.complete(5), graphs.star(6),
              graphs.join(graphs.edgeless(3), graphs.edgeless(2))):
        for t in (0.3, 1.1):
            a = walk.probability_matrix_direct(g, t)
            b = walk.probability_matrix_direct(g, t + walk.TWO_PI)
            assert np.abs(a - b).max() < 1e-9


def test_partition_independence():
    g = graphs.star(7)
    parts = _partitions(g)
    assert len(parts) == 4
    for t in TIMES:
        mats = [walk.probability_matrix_fid(g, p, t) for p in parts]
        for m in mats[1:]:
            assert np.abs(m - mats[0]).max() < 2e-9


def test_time_grid():
    grid = walk.time_grid()
    assert len(grid) == 64
    assert grid[0] == 0.0
    assert abs(grid[-1] - walk.TWO_PI) < 1e-15
    assert walk.time_grid(1.0, 1.0, 1).tolist() == [1.0]
    with pytest.raises(ValueError, match="steps"):
        walk.time_grid(0.0, 1.0, 0)
    with pytest.raises(ValueError, match="t_max"):
        walk.time_grid(2.0, 1.0, 4)
    with pytest.raises(ValueError, match="finite"):
        walk.amplitude_direct(graphs.complete(2), 1, 1, math.inf)


def test_invariant_report_all_pass():
    rng = np.random.default_rng(71)
    g = _composite(rng)
    for part in _partitions(g):
        results = walk.invariant_report(g, part, TIMES)
        assert all(c.passed for c in results), [c for c in results if not c.passed]
    names = [c.name for c in walk.invariant_report(g, dc.twin_coarsen(g), [0.5])]
    assert names == ["laplacian_split_identity", "basis_completeness", "block_completeness",
                     "coefficient_block_mass", "coefficient_uniform_bound", "unitarity",
                     "return_gap_bound"]
