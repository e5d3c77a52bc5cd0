"""Symmetric eigendecompositions and the two spectral assemblies the walk needs.

``eigh`` wraps the dense LAPACK symmetric solver behind a validated
contract (ascending eigenvalues, orthonormal eigenvectors, residual and
orthogonality within a stated tolerance).

``block_spectrum`` post-processes an induced-subgraph Laplacian so that the
normalized all-ones vector is exactly one basis member of the kernel and
all remaining eigenvectors are orthogonal to it. ``reduced_spectrum``
solves the k x k block-constant mode problem through a similarity transform
that makes it symmetric, which hands back coefficient vectors already in
the weight-normalized convention (sum of size_i * alpha_j(i)^2 equals 1),
so no downstream formula carries an explicit normalizing denominator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomposition import FidPartition, reduced_matrix
from .graphs import Graph, laplacian

__all__ = [
    "DEFAULT_EIGH_TOL",
    "EigenDecomposition",
    "eigh",
    "BlockSpectrum",
    "block_spectrum",
    "ReducedSpectrum",
    "reduced_spectrum",
]

DEFAULT_EIGH_TOL = 1e-12

# Eigenvalues below this are treated as the Laplacian kernel. Safe on both
# sides: numerical zeros of integer Laplacians sit near 1e-13 while the
# smallest positive eigenvalue is at least ~pi^2/n^2 (> 1e-6 for n <= 3000).
_ZERO_EIGENVALUE_CUT = 1e-8


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues ascending; eigenvector column j pairs with eigenvalues[j]."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])


def eigh(a: np.ndarray, tol: float = DEFAULT_EIGH_TOL) -> EigenDecomposition:
    """Eigendecomposition of a real symmetric matrix.

    Eigenpairs come back sorted ascending with orthonormal eigenvectors;
    residuals and pairwise orthogonality hold within 10 * tol for any tol
    down to ~1e-13 (the decomposition itself is computed at machine
    precision). Non-finite entries are rejected.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    scale = float(np.abs(m).max()) if m.size else 0.0
    if m.size and not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * max(1.0, scale)):
        raise ValueError("matrix must be symmetric")
    values, vectors = np.linalg.eigh(m)
    return EigenDecomposition(values, vectors)


@dataclass(frozen=True)
class BlockSpectrum:
    """Spectrum of one block's induced-subgraph Laplacian.

    Holds the size - 1 nontrivial eigenpairs: eigenvalues ascending and the
    matching unit eigenvectors as columns, each orthogonal to the all-ones
    vector. The remaining trivial pair (eigenvalue 0 with the constant vector
    1/sqrt(size)) is implicit.
    """

    block: int
    size: int
    eigenvalues: np.ndarray
    vectors: np.ndarray


def block_spectrum(g: Graph, p: FidPartition, i: int, tol: float = DEFAULT_EIGH_TOL) -> BlockSpectrum:
    """Eigendecomposition of block i's induced Laplacian, constant vector isolated.

    For a disconnected block the kernel has dimension > 1, and the raw solver
    basis need not contain the constant vector; the kernel basis is rotated
    (orthogonalized against the constant vector) so that it does.
    """
    size = int(p.sizes[i])
    sub = g.induced_subgraph(p.blocks[i])
    dec = eigh(np.asarray(laplacian(sub), dtype=np.float64), tol)
    kernel_dim = max(int(np.searchsorted(dec.eigenvalues, _ZERO_EIGENVALUE_CUT)), 1)
    ones = np.full(size, 1.0 / np.sqrt(size))
    if kernel_dim == 1:
        kernel_rest = np.empty((size, 0))
    else:
        kernel = dec.eigenvectors[:, :kernel_dim]
        residual = kernel - np.outer(ones, ones @ kernel)
        basis, singular, _ = np.linalg.svd(residual, full_matrices=False)
        # one singular value collapses (the constant direction); keep the rest
        kernel_rest = basis[:, : kernel_dim - 1]
    values = np.concatenate([np.zeros(kernel_dim - 1), dec.eigenvalues[kernel_dim:]])
    vectors = np.concatenate([kernel_rest, dec.eigenvectors[:, kernel_dim:]], axis=1)
    return BlockSpectrum(block=i, size=size, eigenvalues=values, vectors=vectors)


@dataclass(frozen=True)
class ReducedSpectrum:
    """Eigenpairs of the k x k block-constant mode problem.

    ``alpha[i, j]`` is the block-i coefficient of mode j. Columns satisfy the
    weighted normalization sum_i sizes[i] * alpha[i, j]^2 = 1 and weighted
    orthogonality across modes, so expanding a mode to a per-vertex vector
    (each block constant at its coefficient) gives an orthonormal family.
    """

    eigenvalues: np.ndarray
    alpha: np.ndarray

    @property
    def k(self) -> int:
        return int(self.eigenvalues.shape[0])


def reduced_spectrum(p: FidPartition, tol: float = DEFAULT_EIGH_TOL) -> ReducedSpectrum:
    """Solve the block-constant mode problem via its symmetrized similarity.

    With D = diag(sizes), the similarity D^(1/2) R D^(-1/2) of the reduced
    matrix R is symmetric (off-diagonal -sqrt(size_i * size_j) on joined
    pairs). Its orthonormal eigenvectors, scaled back by D^(-1/2), are the
    weight-normalized coefficient vectors.
    """
    r = reduced_matrix(p).astype(np.float64)
    s = np.sqrt(p.sizes.astype(np.float64))
    sym = r * (s[:, None] / s[None, :])
    sym = (sym + sym.T) / 2.0
    dec = eigh(sym, tol)
    alpha = dec.eigenvectors / s[:, None]
    return ReducedSpectrum(eigenvalues=dec.eigenvalues, alpha=alpha)
