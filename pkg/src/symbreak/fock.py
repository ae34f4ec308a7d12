"""Truncated multi-mode bosonic Fock spaces and sparse operators on them.

Tensor-factor ordering convention (used everywhere in this package): mode 0 is
the slowest index, i.e. the basis state |n_0, n_1, ..., n_{M-1}> has flat index
((n_0 * d_1 + n_1) * d_2 + ...), matching successive numpy Kronecker products
kron(op_0, op_1, ..., op_{M-1}).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "FockSpace",
    "SparseOperator",
    "annihilation",
    "creation",
    "number",
    "identity",
    "compose",
]


@dataclass(frozen=True)
class FockSpace:
    """A truncated product of single-mode Fock spaces.

    mode_dims[k] is the per-mode truncation dimension (occupations 0..d_k-1).
    An optional cap on the total occupation keeps only basis states with
    sum_k n_k <= max_total, which is a far more economical truncation than
    per-mode cutoffs when the physics bounds the total photon number.
    """

    mode_dims: tuple[int, ...]
    max_total: int | None = None

    def __init__(self, mode_dims: Sequence[int], max_total: int | None = None):
        dims = tuple(int(d) for d in mode_dims)
        if not dims:
            raise ValueError("need at least one mode")
        if any(d < 2 for d in dims):
            raise ValueError(f"every mode dimension must be >= 2, got {dims}")
        if max_total is not None:
            max_total = int(max_total)
            if max_total < 1:
                raise ValueError("max_total must be at least 1")
            if max_total >= sum(d - 1 for d in dims):
                max_total = None  # cap is not binding
        object.__setattr__(self, "mode_dims", dims)
        object.__setattr__(self, "max_total", max_total)

    @property
    def n_modes(self) -> int:
        return len(self.mode_dims)

    @property
    def product_dim(self) -> int:
        """Dimension of the underlying uncapped tensor-product space."""
        return int(np.prod(self.mode_dims))

    @property
    def total_dim(self) -> int:
        if self.max_total is None:
            return self.product_dim
        return len(self._kept_indices())

    def _kept_indices(self) -> np.ndarray:
        """Flat tensor-basis indices retained under the total-occupation cap."""
        total = np.zeros(self.product_dim)
        for m in range(self.n_modes):
            total += self._product_occupations(m)
        return np.flatnonzero(total <= self.max_total)

    def _product_occupations(self, mode: int) -> np.ndarray:
        diag = np.arange(self.mode_dims[mode], dtype=float)
        left = int(np.prod(self.mode_dims[:mode], initial=1))
        right = int(np.prod(self.mode_dims[mode + 1:], initial=1))
        return np.tile(np.repeat(diag, right), left)

    def occupations(self, mode: int) -> np.ndarray:
        """Occupation of `mode` for each basis state, as a length-total_dim array."""
        if not 0 <= mode < self.n_modes:
            raise IndexError(f"mode {mode} out of range for {self.n_modes} modes")
        occ = self._product_occupations(mode)
        if self.max_total is None:
            return occ
        return occ[self._kept_indices()]

    def total_occupation(self) -> np.ndarray:
        """Total photon number of each basis state."""
        out = np.zeros(self.total_dim)
        for m in range(self.n_modes):
            out += self.occupations(m)
        return out


class SparseOperator:
    """A sparse complex matrix acting on a FockSpace.

    Immutable after construction; arithmetic returns new instances.
    """

    def __init__(self, space: FockSpace, matrix: sp.spmatrix | np.ndarray):
        mat = sp.csr_matrix(matrix, dtype=complex)
        d = space.total_dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match space dim {d}")
        self.space = space
        self.matrix = mat

    # -- algebra -------------------------------------------------------------

    def _check_space(self, other: "SparseOperator") -> None:
        if self.space is not other.space and self.space != other.space:
            raise ValueError("operators act on different Fock spaces")

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_space(other)
        return SparseOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_space(other)
        return SparseOperator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "SparseOperator":
        return SparseOperator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SparseOperator":
        return self * (-1.0)

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_space(other)
        return SparseOperator(self.space, self.matrix @ other.matrix)

    def dag(self) -> "SparseOperator":
        return SparseOperator(self.space, self.matrix.conj().T)

    # -- queries -------------------------------------------------------------

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        diff = self.matrix - self.matrix.conj().T
        return spnorm_inf(diff) < tol

    def apply(self, vector: np.ndarray) -> np.ndarray:
        return self.matrix @ vector

    def __repr__(self) -> str:
        return (f"SparseOperator(dims={self.space.mode_dims}, "
                f"nnz={self.matrix.nnz})")


def spnorm_inf(mat: sp.spmatrix) -> float:
    """Max-row-sum norm of a sparse matrix (cheap, no densification)."""
    mat = sp.csr_matrix(mat)
    if mat.nnz == 0:
        return 0.0
    return float(np.max(np.abs(mat).sum(axis=1)))


def _single_mode_annihilation(dim: int) -> sp.csr_matrix:
    # <n-1|a|n> = sqrt(n)
    return sp.diags(np.sqrt(np.arange(1, dim)), 1, format="csr", dtype=complex)


def _embed(space: FockSpace, mode: int, op1: sp.spmatrix) -> sp.csr_matrix:
    mats: list[sp.spmatrix] = []
    for k, d in enumerate(space.mode_dims):
        mats.append(op1 if k == mode else sp.identity(d, dtype=complex, format="csr"))
    full = reduce(lambda x, y: sp.kron(x, y, format="csr"), mats)
    if space.max_total is not None:
        kept = space._kept_indices()
        full = full[kept][:, kept]
    return full


def annihilation(space: FockSpace, mode: int = 0) -> SparseOperator:
    """Annihilation operator of `mode`, embedded in the full tensor space."""
    if not 0 <= mode < space.n_modes:
        raise IndexError(f"mode {mode} out of range for {space.n_modes} modes")
    return SparseOperator(space, _embed(space, mode, _single_mode_annihilation(space.mode_dims[mode])))


def creation(space: FockSpace, mode: int = 0) -> SparseOperator:
    return annihilation(space, mode).dag()


def number(space: FockSpace, mode: int = 0) -> SparseOperator:
    if not 0 <= mode < space.n_modes:
        raise IndexError(f"mode {mode} out of range for {space.n_modes} modes")
    return SparseOperator(space, sp.diags(space.occupations(mode), format="csr", dtype=complex))


def identity(space: FockSpace) -> SparseOperator:
    return SparseOperator(space, sp.identity(space.total_dim, dtype=complex, format="csr"))


def compose(ops: Iterable[SparseOperator], coefficients: Iterable[complex]) -> SparseOperator:
    """Linear combination sum_k c_k O_k of operators sharing one FockSpace."""
    ops = list(ops)
    coeffs = [complex(c) for c in coefficients]
    if not ops:
        raise ValueError("compose needs at least one operator")
    if len(ops) != len(coeffs):
        raise ValueError("one coefficient per operator required")
    space = ops[0].space
    acc = sp.csr_matrix((space.total_dim, space.total_dim), dtype=complex)
    for op, c in zip(ops, coeffs):
        if op.space != space:
            raise ValueError("operators act on different Fock spaces")
        acc = acc + c * op.matrix
    return SparseOperator(space, acc)
