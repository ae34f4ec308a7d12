"""Vectorized Lindblad superoperators: steady states, time evolution, moments.

Vectorization is column-stacking (Fortran order), so vec(A rho B) =
kron(B.T, A) vec(rho).  The master equation convention is

    d rho/dt = -i[H, rho] + sum_k ( L_k rho L_k^+ - {L_k^+ L_k, rho}/2 ).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fock import FockSpace, SparseOperator, spnorm_inf

__all__ = [
    "Liouvillian",
    "DensityMatrix",
    "DegenerateSteadyStateError",
    "SteadyStateError",
    "build_liouvillian",
    "steady_state",
    "steady_state_basis",
    "evolve",
    "expectation",
    "moment_rhs",
    "vec",
    "unvec",
]

# Dense null-space solves below this superoperator dimension, sparse
# inverse iteration above it.
DENSE_SUPEROP_LIMIT = 1024

# A second null vector is declared present when its singular value (or
# residual) is below this fraction of the superoperator norm.
DEGENERACY_GAP = 1e-8


class SteadyStateError(RuntimeError):
    """Steady-state solve failed to converge; carries the best residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class DegenerateSteadyStateError(RuntimeError):
    """A unique steady state was requested but the null space is degenerate."""


def vec(matrix: np.ndarray) -> np.ndarray:
    return np.asarray(matrix).reshape(-1, order="F")

def unvec(vector: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(vector).reshape((dim, dim), order="F")


@dataclass
class DensityMatrix:
    space: FockSpace
    matrix: np.ndarray

    def validate(self, trace_tol: float = 1e-10, pos_tol: float = 1e-8) -> None:
        tr = np.trace(self.matrix)
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"trace {tr} deviates from 1 beyond {trace_tol}")
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > trace_tol:
            raise ValueError("density matrix is not Hermitian within tolerance")
        evals = la.eigvalsh(self.matrix)
        if evals.min() < -pos_tol:
            raise ValueError(f"negative eigenvalue {evals.min():.3e}")

    def clipped(self) -> np.ndarray:
        """Positivity-clipped copy for reporting (never used in residual checks)."""
        w, v = la.eigh(self.matrix)
        w = np.clip(w, 0.0, None)
        w /= w.sum()
        return (v * w) @ v.conj().T


@dataclass
class Liouvillian:
    space: FockSpace
    hamiltonian: SparseOperator
    jumps: list[SparseOperator]
    superop: sp.csr_matrix = field(repr=False)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = self.space.total_dim
        return unvec(self.superop @ vec(rho), d)


def build_liouvillian(H: SparseOperator, jumps: list[SparseOperator]) -> Liouvillian:
    """Assemble the vectorized superoperator for Hamiltonian H and jump list."""
    space = H.space
    if not H.is_hermitian(1e-10):
        raise ValueError("Hamiltonian must be Hermitian")
    for L in jumps:
        if L.space != space:
            raise ValueError("jump operator acts on a different Fock space")
    d = space.total_dim
    eye = sp.identity(d, dtype=complex, format="csr")
    Hm = H.matrix
    sup = -1j * (sp.kron(eye, Hm) - sp.kron(Hm.T, eye))
    for L in jumps:
        Lm = L.matrix
        LdL = (Lm.conj().T @ Lm).tocsr()
        sup = sup + sp.kron(Lm.conj(), Lm) \
            - 0.5 * sp.kron(eye, LdL) - 0.5 * sp.kron(LdL.T, eye)
    return Liouvillian(space, H, list(jumps), sup.tocsr())


# -- steady states ------------------------------------------------------------


def _charge_sector_indices(liouv: Liouvillian, charge: np.ndarray) -> np.ndarray:
    """Indices of the zero-coherence sector of a weak-U(1)-symmetric Liouvillian.

    `charge` is the diagonal of a conserved number-like operator in the Fock
    basis.  Vectorized index I (column stacking) refers to the matrix element
    (row, col) = (I % d, I // d); the steady state of a weak-symmetric map
    lives where charge[row] == charge[col].  Exact decoupling is verified.
    """
    d = liouv.space.total_dim
    rows = np.arange(d * d) % d
    cols = np.arange(d * d) // d
    mask = np.isclose(charge[rows], charge[cols])
    idx = np.flatnonzero(mask)
    other = np.flatnonzero(~mask)
    if other.size:
        coupling = liouv.superop[idx][:, other]
        if coupling.nnz and spnorm_inf(coupling) > 0:
            raise ValueError("provided charge is not conserved by the Liouvillian")
    return idx


def _ritz_refine(A, V: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    """Diagonalize A restricted to the orthonormal block V; candidates sorted
    by Ritz-value magnitude.  Separates a true null vector from slow modes
    even when their eigenvalue splitting is far below the solver tolerance."""
    M = V.conj().T @ (A @ V)
    w, u = la.eig(M)
    order = np.argsort(np.abs(w))
    vecs = []
    for k in order:
        v = V @ u[:, k]
        vecs.append(v / la.norm(v))
    return vecs, np.abs(w[order])


def _select_null(A, V: np.ndarray, scale: float) -> tuple[list[np.ndarray], float]:
    """Null vectors among the candidate block V, with relative residual.

    A second candidate counts as degenerate only if its Ritz value is both
    below the degeneracy gap and comparable to the best one; a clean
    hierarchy (e.g. 1e-16 vs 1e-10) means a unique steady state with a slow
    relaxation mode, not degeneracy.
    """
    vecs, mus = _ritz_refine(A, V)
    null = [vecs[0]]
    floor = max(1e3 * mus[0], 1e-12 * scale)
    for j in range(1, len(vecs)):
        if mus[j] <= DEGENERACY_GAP * scale and mus[j] <= floor:
            null.append(vecs[j])
    res = la.norm(A @ vecs[0]) / scale
    return null, float(res)


def _dense_null_vectors(A: np.ndarray) -> tuple[list[np.ndarray], float]:
    u, s, vh = la.svd(A)
    scale = s[0] if s[0] > 0 else 1.0
    k = max(2, int(np.sum(s <= DEGENERACY_GAP * scale)))
    k = min(k, A.shape[0])
    return _select_null(A, vh[-k:].conj().T, scale)


def _sparse_null_vectors(A: sp.csr_matrix, rng: np.random.Generator,
                         max_iter: int = 50) -> tuple[list[np.ndarray], float]:
    """Block shifted-inverse iteration for the (near-)null space of A."""
    n = A.shape[0]
    scale = spnorm_inf(A)
    shift = 1e-12 * max(scale, 1.0)
    lu = spla.splu((A - shift * sp.identity(n, dtype=complex, format="csr")).tocsc())
    # two probe vectors: one biased toward a physical state, one random
    V = np.empty((n, 2), dtype=complex)
    V[:, 0] = 1.0
    V[:, 1] = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    V, _ = la.qr(V, mode="economic")
    res = np.inf
    for _ in range(max_iter):
        V = lu.solve(V)
        V, _ = la.qr(V, mode="economic")
        r0 = la.norm(A @ V[:, 0]) / scale
        if r0 < 1e-14:
            break
        if abs(r0 - res) < 1e-3 * res:
            break
        res = r0
    return _select_null(A, V, scale)


def steady_state_basis(liouv: Liouvillian, charge: np.ndarray | None = None,
                       seed: int = 0) -> tuple[list[np.ndarray], float]:
    """Null vectors of the superoperator, unvectorized to matrices.

    Returns (list of d x d matrices spanning the null space, relative residual).
    """
    d = liouv.space.total_dim
    A = liouv.superop
    if charge is not None:
        idx = _charge_sector_indices(liouv, charge)
        A = A[idx][:, idx].tocsr()
    n = A.shape[0]
    if n <= DENSE_SUPEROP_LIMIT:
        null, res = _dense_null_vectors(A.toarray())
    else:
        null, res = _sparse_null_vectors(A.tocsr(), np.random.default_rng(seed))
    mats = []
    for v in null:
        if charge is not None:
            full = np.zeros(d * d, dtype=complex)
            full[idx] = v
        else:
            full = v
        mats.append(unvec(full, d))
    return mats, res


def steady_state(liouv: Liouvillian, tol: float = 1e-10,
                 charge: np.ndarray | None = None,
                 allow_degenerate: bool = False, seed: int = 0):
    """Steady state rho with ||L(rho)|| <= tol * ||L|| and unit trace.

    With `allow_degenerate`, a degenerate null space is returned as a list of
    (non-normalized, possibly non-positive) basis matrices instead of raising.
    `charge` optionally restricts the solve to the zero-coherence sector of a
    conserved number operator (diagonal given in the Fock basis).
    """
    mats, res = steady_state_basis(liouv, charge=charge, seed=seed)
    if res > tol:
        raise SteadyStateError("steady-state solve did not reach tolerance", res)
    if len(mats) > 1:
        if not allow_degenerate:
            raise DegenerateSteadyStateError(
                f"{len(mats)} degenerate steady states found")
        return mats
    rho = mats[0]
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-14:
        raise SteadyStateError("null vector is traceless; cannot normalize", res)
    rho = rho / tr
    return DensityMatrix(liouv.space, rho)


# -- evolution and moments -----------------------------------------------------


def evolve(liouv: Liouvillian, rho0: DensityMatrix, t_grid) -> list[DensityMatrix]:
    """Propagate rho0 through the master equation at the requested times.

    Uses the exact sparse exponential action (stiff-safe); trace drift over the
    run is checked against 1e-8.
    """
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if np.any(np.diff(t_grid) <= 0) or t_grid[0] < 0:
        raise ValueError("t_grid must be strictly increasing and start at t >= 0")
    d = liouv.space.total_dim
    v = vec(rho0.matrix).astype(complex)
    out = []
    t_prev = 0.0
    for t in t_grid:
        dt = t - t_prev
        if dt > 0:
            v = spla.expm_multiply(liouv.superop * dt, v)
        t_prev = t
        rho = unvec(v, d)
        drift = abs(np.trace(rho) - 1.0)
        if drift > 1e-8:
            raise RuntimeError(f"trace drift {drift:.3e} exceeds 1e-8 at t={t}")
        out.append(DensityMatrix(liouv.space, rho))
    return out


def expectation(rho: DensityMatrix, O: SparseOperator) -> complex:
    if rho.space != O.space:
        raise ValueError("operator and state act on different Fock spaces")
    return complex(np.sum((O.matrix @ rho.matrix).diagonal()))


def moment_rhs(rho: DensityMatrix, liouv: Liouvillian, O: SparseOperator) -> complex:
    """d<O>/dt computed through the adjoint (Heisenberg-picture) generator:

        i<[H, O]> + sum_k < L_k^+ O L_k - {L_k^+ L_k, O}/2 >.
    """
    if rho.space != O.space or rho.space != liouv.space:
        raise ValueError("mismatched Fock spaces")
    H = liouv.hamiltonian.matrix
    Om = O.matrix
    adj = 1j * (H @ Om - Om @ H)
    for L in liouv.jumps:
        Lm = L.matrix
        LdL = Lm.conj().T @ Lm
        adj = adj + Lm.conj().T @ Om @ Lm - 0.5 * (LdL @ Om + Om @ LdL)
    return complex(np.sum((adj @ rho.matrix).diagonal()))
