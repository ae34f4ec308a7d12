"""Driven-dissipative SSH chain with on-site Kerr interactions.

Sublattice/bond convention used throughout: sites are numbered 1..N (odd N),
odd sites form the pumped A sublattice, even sites the lossy B sublattice.
The bond between sites i and i+1 has strength -J(1 - delta) for odd i and
-J(1 + delta) for even i, so the edge-localized phase is delta > 0 and the
edge-mode amplitude decays by xi = (1 - delta)/(1 + delta) per unit cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.optimize as opt
from scipy.integrate import solve_ivp

from .fock import FockSpace, SparseOperator, annihilation, number
from .lindblad import (DegenerateSteadyStateError, Liouvillian, SteadyStateError,
                       build_liouvillian, expectation, steady_state)

__all__ = [
    "SSHParams",
    "ModeDecomposition",
    "LimitCycle",
    "build_ssh",
    "mode_decomposition",
    "edge_wavefunction",
    "dissipator_identity_deviation",
    "semiclassical_rhs",
    "integrate_semiclassical",
    "limit_cycle_solve",
    "floquet_multipliers",
    "mean_field_self_consistent",
    "build_chain_liouvillian",
    "quantum_steady_state",
    "single_photon_state",
    "fock_fidelity",
    "rate_equation_prediction",
    "single_mode_no_go_scan",
    "added_loss_scan",
    "edge_bulk_coupling",
    "mode_occupations",
    "delta_from_xi",
]


def delta_from_xi(xi: float) -> float:
    """Dimerization giving edge-mode decay ratio xi = (1 - delta)/(1 + delta)."""
    if not 0 < xi:
        raise ValueError("xi must be positive")
    return (1 - xi) / (1 + xi)


@dataclass(frozen=True)
class SSHParams:
    """Chain parameters.  n_sites odd; gain rate is eta^2 * kappa on A
    (odd-numbered) sites, loss rate kappa on B sites.  gamma is unwanted
    extra loss applied to the pumped A sublattice -- the sublattice carrying
    the edge mode -- which is the perturbation that actually degrades the
    stabilized state (extra loss on the already-lossy sites is benign)."""

    n_sites: int
    J: float
    delta: float
    U: float
    kappa: float
    eta: float
    gamma: float = 0.0

    def __post_init__(self):
        if self.n_sites < 3:
            raise ValueError("need at least 3 sites")
        if not -1 < self.delta < 1:
            raise ValueError("delta must lie in (-1, 1)")
        for name in ("J", "U", "kappa", "eta", "gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def xi(self) -> float:
        """Edge-mode localization ratio (1 - delta)/(1 + delta)."""
        return (1 - self.delta) / (1 + self.delta)

    @property
    def eta_prime(self) -> float:
        """Rescaled pump parameter, eta = eta' xi^2."""
        return self.eta / self.xi ** 2

    @property
    def topological(self) -> bool:
        return self.delta > 0

    @classmethod
    def from_xi(cls, n_sites: int, xi: float, U: float, kappa: float,
                eta: float | None = None, eta_prime: float | None = None,
                J: float = 1.0, gamma: float = 0.0) -> "SSHParams":
        if (eta is None) == (eta_prime is None):
            raise ValueError("give exactly one of eta, eta_prime")
        if eta is None:
            eta = eta_prime * xi ** 2
        return cls(n_sites, J, delta_from_xi(xi), U, kappa, eta, gamma)


def _a_sites(n: int) -> np.ndarray:
    return np.arange(0, n, 2)

def _b_sites(n: int) -> np.ndarray:
    return np.arange(1, n, 2)


def build_ssh(p: SSHParams, allow_even: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Single-particle Hamiltonian matrix and the chiral sign vector.

    Returns (H1, chiral) where chiral is +1 on A (odd-numbered) sites and -1
    on B sites; chiral * H1 * chiral == -H1 exactly.  Even site counts are
    rejected (no unique zero mode) unless explicitly allowed.
    """
    n = p.n_sites
    if n % 2 == 0 and not allow_even:
        raise ValueError("site count must be odd for a single zero mode")
    H1 = np.zeros((n, n))
    for k in range(n - 1):  # bond between array sites k, k+1
        t = -p.J * (1 - p.delta) if k % 2 == 0 else -p.J * (1 + p.delta)
        H1[k, k + 1] = H1[k + 1, k] = t
    chiral = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    assert np.array_equal(chiral[:, None] * H1 * chiral[None, :], -H1)
    return H1, chiral


@dataclass
class ModeDecomposition:
    """Eigenmodes of a chiral-symmetric single-particle Hamiltonian.

    Columns of `modes` are the real-space wavefunctions; `pairing[k]` is the
    index of the chiral partner of mode k (the zero mode is its own partner,
    with the partner wavefunction equal to the original up to a B-sublattice
    sign flip, exactly).
    """

    energies: np.ndarray
    modes: np.ndarray
    pairing: np.ndarray
    zero_index: int | None
    chiral: np.ndarray


def mode_decomposition(H1: np.ndarray, chiral: np.ndarray) -> ModeDecomposition:
    """Diagonalize via the SVD of the A->B coupling block, so that chiral
    pairing and sublattice support of zero modes hold to machine precision."""
    a_idx = np.flatnonzero(chiral > 0)
    b_idx = np.flatnonzero(chiral < 0)
    h = H1[np.ix_(a_idx, b_idx)]
    W, s, Vt = la.svd(h)
    n = H1.shape[0]
    dtype = complex if np.iscomplexobj(H1) else float
    n_pairs = len(b_idx) if len(a_idx) >= len(b_idx) else len(a_idx)
    energies = []
    modes = []
    pair_of = []
    for k in range(n_pairs):
        psi_p = np.zeros(n, dtype=dtype)
        psi_m = np.zeros(n, dtype=dtype)
        psi_p[a_idx] = W[:, k] / np.sqrt(2)
        psi_p[b_idx] = Vt[k].conj() / np.sqrt(2)
        psi_m[a_idx] = W[:, k] / np.sqrt(2)
        psi_m[b_idx] = -Vt[k].conj() / np.sqrt(2)
        energies += [s[k], -s[k]]
        modes += [psi_p, psi_m]
        pair_of += [len(modes) - 1, len(modes) - 2]
    zero_index = None
    for k in range(n_pairs, len(a_idx)):
        psi = np.zeros(n, dtype=dtype)
        psi[a_idx] = W[:, k]
        anchor = psi[np.flatnonzero(psi)[0]]
        psi = psi * (np.abs(anchor) / anchor)
        energies.append(0.0)
        modes.append(psi)
        pair_of.append(len(modes) - 1)
        zero_index = len(modes) - 1
    order = np.argsort(energies, kind="stable")
    inverse = np.argsort(order)
    energies = np.asarray(energies)[order]
    modes = np.column_stack([modes[k] for k in order])
    pairing = np.array([inverse[pair_of[k]] for k in order])
    if zero_index is not None:
        zero_index = int(inverse[zero_index])
    return ModeDecomposition(energies, modes, pairing, zero_index, np.asarray(chiral, dtype=float))


def edge_wavefunction(p: SSHParams) -> np.ndarray:
    """Analytic zero-mode wavefunction, normalized on the finite chain.

    Site i (1-based) carries amplitude sin(pi i / 2) xi^{(i-1)/2}: support on
    A sites only, alternating sign, geometric decay with ratio xi per cell.
    """
    if not p.topological:
        raise ValueError("edge wavefunction defined in the topological phase (delta > 0)")
    i = np.arange(1, p.n_sites + 1)
    psi = np.sin(np.pi * i / 2) * p.xi ** ((i - 1) / 2)
    return psi / la.norm(psi)


# -- dissipator identity --------------------------------------------------------


def _site_operators(space: FockSpace) -> list[SparseOperator]:
    return [annihilation(space, m) for m in range(space.n_modes)]


def _mode_operator(site_ops: list[SparseOperator], wavefunction: np.ndarray) -> SparseOperator:
    acc = None
    for amp, op in zip(wavefunction, site_ops):
        if amp == 0:
            continue
        term = complex(amp) * op
        acc = term if acc is None else acc + term
    return acc


def dissipator_identity_deviation(H1: np.ndarray, chiral: np.ndarray,
                                  dims: int | tuple, kappa: float, eta: float) -> float:
    """Norm of the superoperator difference between site-basis dissipators
    (gain eta^2 kappa on A, loss kappa on B) and their chiral mode-basis
    rewriting 1/2 sqrt(eta^2 kappa) (d_a^+ + partner^+), 1/2 sqrt(kappa)
    (d_a - partner), summed over all modes."""
    n = H1.shape[0]
    if isinstance(dims, int):
        dims = (dims,) * n
    space = FockSpace(dims)
    ops = _site_operators(space)
    zero = 0.0 * ops[0]

    site_jumps = []
    for i in range(n):
        if chiral[i] > 0:
            site_jumps.append(np.sqrt(eta ** 2 * kappa) * ops[i].dag())
        else:
            site_jumps.append(np.sqrt(kappa) * ops[i])

    dec = mode_decomposition(H1, chiral)
    mode_jumps = []
    for k in range(n):
        d_k = _mode_operator(ops, dec.modes[:, k])
        d_p = _mode_operator(ops, dec.modes[:, dec.pairing[k]])
        mode_jumps.append(0.5 * np.sqrt(eta ** 2 * kappa) * (d_k.dag() + d_p.dag()))
        mode_jumps.append(0.5 * np.sqrt(kappa) * (d_k - d_p))

    L_site = build_liouvillian(zero, site_jumps)
    L_mode = build_liouvillian(zero, mode_jumps)
    diff = L_site.superop - L_mode.superop
    return float(abs(diff).max()) if diff.nnz else 0.0


# -- semiclassics and the limit cycle ---------------------------------------------


def _gain_loss_vector(p: SSHParams) -> np.ndarray:
    n = p.n_sites
    g = np.empty(n)
    g[_a_sites(n)] = 0.5 * (p.kappa * p.eta ** 2 - p.gamma)
    g[_b_sites(n)] = -0.5 * p.kappa
    return g


def semiclassical_rhs(v: np.ndarray, p: SSHParams,
                      H1: np.ndarray | None = None) -> np.ndarray:
    """Gross-Pitaevskii flow of the site amplitudes: coherent hopping, on-site
    Kerr shift, gain on A sites and loss on B sites."""
    if H1 is None:
        H1, _ = build_ssh(p)
    v = np.asarray(v, dtype=complex)
    return -1j * (H1 @ v) - 1j * p.U * np.abs(v) ** 2 * v + _gain_loss_vector(p) * v


def integrate_semiclassical(p: SSHParams, v0: np.ndarray, t_grid: np.ndarray,
                            rtol: float = 1e-9, atol: float = 1e-11) -> np.ndarray:
    """Amplitude trajectory sampled on t_grid; returns array (len(t_grid), N)."""
    H1, _ = build_ssh(p)
    sol = solve_ivp(lambda t, y: semiclassical_rhs(y, p, H1),
                    (0.0, float(t_grid[-1])), np.asarray(v0, dtype=complex),
                    t_eval=t_grid, rtol=rtol, atol=atol, method="DOP853")
    if not sol.success:
        raise RuntimeError(f"semiclassical integration failed: {sol.message}")
    return sol.y.T


@dataclass
class LimitCycle:
    """Self-consistent rotating edge mode: amplitudes d0, real frequency, and
    the residual ||flow(d0) - i lambda d0|| at the solution."""

    d0: np.ndarray
    frequency: float
    residual: float


def _cycle_residual(d: np.ndarray, lam: float, p: SSHParams, H1: np.ndarray) -> np.ndarray:
    return semiclassical_rhs(d, p, H1) - 1j * lam * d


def limit_cycle_solve(p: SSHParams, guess: np.ndarray | None = None,
                      guess_frequency: float | None = None,
                      tol: float = 1e-8, max_iter: int = 200) -> LimitCycle:
    """Damped-Newton solve of the self-consistent rotation condition
    flow(d0) = i lambda d0, gauge-fixed so the first component is real > 0.

    Seeded from the mean-field self-consistent edge mode unless a guess is
    given; falls back to long-time integration if Newton stalls.
    """
    H1, chiral = build_ssh(p)
    n = p.n_sites

    if guess is None:
        try:
            mf = mean_field_self_consistent(p)
            amp = np.sqrt(mf["density"] / p.U) if p.U > 0 else 1.0
            guess = mf["psi"] * amp
            guess_frequency = -mf["edge_energy"]
        except Exception:
            guess = edge_wavefunction(p)
            guess_frequency = 0.0
    if guess_frequency is None:
        d = np.asarray(guess, dtype=complex)
        guess_frequency = float(np.imag(np.vdot(d, semiclassical_rhs(d, p, H1))
                                        / np.vdot(d, d)))

    def pack(d, lam):
        return np.concatenate([d.real, d.imag, [lam]])

    def unpack(x):
        return x[:n] + 1j * x[n:2 * n], x[2 * n]

    def F(x):
        d, lam = unpack(x)
        r = _cycle_residual(d, lam, p, H1)
        return np.concatenate([r.real, r.imag, [d[0].imag]])

    x = pack(np.asarray(guess, dtype=complex), float(guess_frequency))

    def newton(x):
        fx = F(x)
        for _ in range(max_iter):
            norm = la.norm(fx)
            if norm < 1e-2 * tol:
                break
            m = len(x)
            Jac = np.empty((m, m))
            h = 1e-7 * max(1.0, np.max(np.abs(x)))
            for k in range(m):
                dx = np.zeros(m)
                dx[k] = h
                Jac[:, k] = (F(x + dx) - F(x - dx)) / (2 * h)
            try:
                step = la.solve(Jac, -fx)
            except la.LinAlgError:
                step = la.lstsq(Jac, -fx)[0]
            lam_damp = 1.0
            for _ in range(40):
                x_new = x + lam_damp * step
                f_new = F(x_new)
                if la.norm(f_new) < norm:
                    break
                lam_damp *= 0.5
            else:
                break
            x, fx = x_new, f_new
        return x, la.norm(F(x))

    norm_seed = la.norm(np.asarray(guess))
    x_sol, res = newton(x)
    d_sol, _ = unpack(x_sol)
    if res > tol or la.norm(d_sol) < 1e-3 * norm_seed:
        # fallback: ride the dynamics onto the cycle, then re-run Newton
        t_relax = 20.0 / max(p.kappa * p.eta ** 2, 1e-3)
        v0 = edge_wavefunction(p) * (1.0 + 0.0j)
        traj = integrate_semiclassical(p, v0, np.linspace(0, t_relax, 200),
                                       rtol=1e-8, atol=1e-10)
        d_end = traj[-1]
        lam_est = float(np.imag(np.vdot(d_end, semiclassical_rhs(d_end, p, H1))
                                / np.vdot(d_end, d_end)))
        d_end = d_end * np.exp(-1j * np.angle(d_end[0]))
        x_sol, res = newton(pack(d_end, lam_est))
        d_sol, _ = unpack(x_sol)
        if res > tol or la.norm(d_sol) < 1e-3 * norm_seed:
            raise RuntimeError(f"limit-cycle Newton did not converge; best residual {res:.3e}")
    d, lam = unpack(x_sol)
    if d[0].real < 0:
        d, lam = -d, lam
    return LimitCycle(d, float(lam), float(la.norm(_cycle_residual(d, lam, p, H1))))


def floquet_multipliers(p: SSHParams, cycle: LimitCycle) -> np.ndarray:
    """Monodromy eigenvalues of the linearized dynamics over one period.

    In the frame co-rotating at the cycle frequency the orbit is a fixed
    point; the monodromy matrix is the exponential of the real linearization
    there times the period.  One multiplier sits on the unit circle (global
    phase); stability requires the rest strictly inside.
    """
    H1, _ = build_ssh(p)
    n = p.n_sites
    lam = cycle.frequency

    def flow(x):
        d = x[:n] + 1j * x[n:]
        r = _cycle_residual(d, lam, p, H1)
        return np.concatenate([r.real, r.imag])

    x0 = np.concatenate([cycle.d0.real, cycle.d0.imag])
    m = 2 * n
    Jac = np.empty((m, m))
    h = 1e-7 * max(1.0, np.max(np.abs(x0)))
    for k in range(m):
        dx = np.zeros(m)
        dx[k] = h
        Jac[:, k] = (flow(x0 + dx) - flow(x0 - dx)) / (2 * h)
    period = 2 * np.pi / abs(lam)
    return la.eigvals(la.expm(Jac * period))


# -- self-consistent mean field -----------------------------------------------------


def _edge_state_at(H1: np.ndarray, onsite: np.ndarray, psi_ref: np.ndarray):
    w, v = la.eigh(H1 + np.diag(onsite))
    k = int(np.argmax(np.abs(v.T @ psi_ref)))
    psi = v[:, k]
    if psi @ psi_ref < 0:
        psi = -psi
    return psi, float(w[k])


def _self_consistent_edge(H1, psi0, s, mixing=0.5, tol=1e-10, max_iter=10000):
    psi = psi0.copy()
    onsite = s * psi ** 2
    for _ in range(max_iter):
        psi_new, energy = _edge_state_at(H1, onsite, psi)
        onsite_new = (1 - mixing) * onsite + mixing * s * psi_new ** 2
        change = np.max(np.abs(onsite_new - onsite))
        psi, onsite = psi_new, onsite_new
        if change < tol:
            return psi, onsite, energy
    raise RuntimeError("self-consistent edge-mode iteration did not converge")


def mean_field_self_consistent(p: SSHParams, s_max: float = 50.0,
                               n_curve: int = 40, tol: float = 1e-8) -> dict:
    """Self-consistent edge delocalization analysis.

    For each trial on-site strength s = U |d0|^2, the edge eigenvector of the
    chain plus its own induced potential s |psi_i|^2 is iterated to a fixed
    point; the steady density is the s at which the edge mode's weight on the
    lossy B sublattice equals the pump/loss ratio eta^2.

    Returns density (the matched s), onsite potentials, the self-consistent
    wavefunction and energy, and the full overlap-vs-s curve.
    """
    H1, chiral = build_ssh(p)
    b_idx = _b_sites(p.n_sites)
    psi0 = edge_wavefunction(p)

    def b_overlap(s):
        psi, onsite, energy = _self_consistent_edge(H1, psi0, s)
        return float(np.sum(psi[b_idx] ** 2)), psi, onsite, energy

    target = p.eta ** 2
    s_grid = np.linspace(0.0, s_max, n_curve)
    curve = np.array([b_overlap(s)[0] for s in s_grid])

    hi_candidates = np.flatnonzero(curve >= target)
    if target > 0 and hi_candidates.size == 0:
        raise RuntimeError(
            f"B-sublattice overlap never reaches eta^2={target:.3e} on [0, {s_max}]; "
            f"attained range [{curve.min():.3e}, {curve.max():.3e}]")
    lo, hi = 0.0, float(s_grid[hi_candidates[0]]) if target > 0 else 0.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if b_overlap(mid)[0] < target:
            lo = mid
        else:
            hi = mid
    s_star = 0.5 * (lo + hi)
    overlap, psi, onsite, energy = b_overlap(s_star)
    return {
        "density": s_star,
        "onsite": onsite,
        "psi": psi,
        "edge_energy": energy,
        "b_overlap": overlap,
        "curve_s": s_grid,
        "curve_overlap": curve,
    }


# -- exact quantum steady states ------------------------------------------------------


def build_chain_liouvillian(p: SSHParams, dims: int | tuple,
                            kerr_a_only: bool = False,
                            allow_even: bool = False,
                            max_total: int | None = None) -> Liouvillian:
    """Full interacting Liouvillian of the chain on a truncated Fock space.

    Kerr term (U/2) n (n - 1) on every site by default (`kerr_a_only`
    restricts it to the pumped sublattice); gain eta^2 kappa on A sites,
    loss kappa + gamma on B sites.  `max_total` additionally caps the total
    photon number, which converges much faster than per-site cutoffs in the
    few-photon regime.
    """
    n = p.n_sites
    if isinstance(dims, int):
        dims = (dims,) * n
    H1, chiral = build_ssh(p, allow_even=allow_even)
    space = FockSpace(dims, max_total=max_total)
    ops = _site_operators(space)
    H = None
    for i in range(n):
        for j in range(n):
            if H1[i, j] != 0:
                term = H1[i, j] * (ops[i].dag() @ ops[j])
                H = term if H is None else H + term
    if p.U > 0:
        kerr_sites = _a_sites(n) if kerr_a_only else np.arange(n)
        for i in kerr_sites:
            ni = number(space, int(i))
            H = H + (0.5 * p.U) * (ni @ ni - ni)
    jumps = []
    for i in range(n):
        if chiral[i] > 0:
            if p.eta > 0:
                jumps.append(np.sqrt(p.eta ** 2 * p.kappa) * ops[i].dag())
            if p.gamma > 0:
                jumps.append(np.sqrt(p.gamma) * ops[i])
        else:
            jumps.append(np.sqrt(p.kappa) * ops[i])
    return build_liouvillian(H, jumps)


def truncation_edge_weight(rho, space: FockSpace) -> float:
    """Total probability of any mode sitting at its truncation edge.

    Modes truncated at two levels are skipped (unless all are): occupying the
    top of a two-level mode is ordinary single-photon physics, not a sign of
    population piling up against the cutoff.  On a capped space the weight at
    the total-occupation cap is counted as well.
    """
    pops = np.real(np.diag(rho.matrix))
    counted = [m for m in range(space.n_modes) if space.mode_dims[m] >= 3]
    if not counted:
        counted = list(range(space.n_modes))
    weight = 0.0
    for m in counted:
        occ = space.occupations(m)
        weight += pops[occ == space.mode_dims[m] - 1].sum()
    if space.max_total is not None:
        weight += pops[space.total_occupation() == space.max_total].sum()
    return float(weight)


def quantum_steady_state(p: SSHParams, dims: int | tuple,
                         kerr_a_only: bool = False, tol: float = 1e-8,
                         edge_weight_max: float = 0.05,
                         check_convergence: bool = False,
                         conv_tol: float = 1e-4,
                         allow_even: bool = False,
                         max_total: int | None = None):
    """Exact steady state of the interacting chain; returns (rho, site densities).

    The solve is restricted to the zero-coherence sector of the conserved
    total photon number.  A steady state whose truncation-edge weight exceeds
    `edge_weight_max` is rejected as unconverged (for U = 0 in the
    topological phase this is how the pure-gain instability of the zero mode
    shows up).  `check_convergence` re-solves with enlarged cutoffs and
    demands the site densities agree to `conv_tol`.
    """
    n = p.n_sites
    if isinstance(dims, int):
        dims = (dims,) * n

    def solve(d, cap):
        liouv = build_chain_liouvillian(p, d, kerr_a_only=kerr_a_only,
                                        allow_even=allow_even, max_total=cap)
        space = liouv.space
        rho = steady_state(liouv, tol=tol, charge=space.total_occupation())
        if truncation_edge_weight(rho, space) > edge_weight_max:
            raise RuntimeError(
                "steady state piles up at the truncation edge; "
                "unstable dynamics or insufficient dims")
        dens = np.array([expectation(rho, number(space, m)).real
                         for m in range(n)])
        return rho, dens

    rho, dens = solve(dims, max_total)
    if check_convergence:
        cap_up = None if max_total is None else max_total + 1
        _, dens_up = solve(tuple(d + 1 for d in dims), cap_up)
        if np.max(np.abs(dens_up - dens)) > conv_tol:
            raise RuntimeError(f"truncation not converged: {dens} vs {dens_up}")
    return rho, dens


def single_photon_state(space: FockSpace, wavefunction: np.ndarray) -> np.ndarray:
    """Fock-basis vector of one photon in the given single-particle mode."""
    vec_out = np.zeros(space.total_dim, dtype=complex)
    total = space.total_occupation()
    for i, amp in enumerate(wavefunction):
        if amp != 0:
            idx = np.flatnonzero((total == 1) & (space.occupations(i) == 1))
            vec_out[idx[0]] += amp
    return vec_out


def fock_fidelity(rho, p: SSHParams) -> float:
    """Overlap of rho with the one-photon Fock state of the linear zero mode."""
    H1, chiral = build_ssh(p)
    dec = mode_decomposition(H1, chiral)
    psi0 = dec.modes[:, dec.zero_index]
    ket = single_photon_state(rho.space, psi0)
    return float(np.real(ket.conj() @ rho.matrix @ ket))


def rate_equation_prediction(xi: float) -> tuple[float, float, float]:
    """Leading-power occupation probabilities (p0, p1, p2) of the vacuum,
    single-photon and two-photon edge manifolds in the strongly localized
    regime; p1 = (xi^2 + xi^4)/(xi^2 + 3 xi^4), p0 = p2 = xi^4/(xi^2 + 3 xi^4)."""
    if not 0 < xi < 1:
        raise ValueError("xi must lie in (0, 1)")
    denom = xi ** 2 + 3 * xi ** 4
    p1 = (xi ** 2 + xi ** 4) / denom
    p02 = xi ** 4 / denom
    return (p02, p1, p02)


# -- single-mode no-go and robustness scans ----------------------------------------


def _single_mode_steady(kappa_g: float, kappa_l: float, gamma: float,
                        dim: int, detuning: float = 0.0, U: float = 0.0):
    space = FockSpace([dim])
    a = annihilation(space)
    nop = number(space)
    H = detuning * nop + (0.5 * U) * (nop @ nop)
    jumps = []
    if kappa_g > 0:
        jumps.append(np.sqrt(kappa_g) * a.dag())
    if kappa_l > 0:
        jumps.append(np.sqrt(kappa_l) * a)
    if gamma > 0:
        jumps.append(np.sqrt(gamma) * (a @ a))
    liouv = build_liouvillian(H, jumps)
    rho = steady_state(liouv, tol=1e-9)
    if truncation_edge_weight(rho, space) > 1e-3:
        raise RuntimeError("single-mode steady state hits truncation edge (unstable)")
    return rho


def single_mode_no_go_scan(gamma_ratios: np.ndarray, loss_ratios: np.ndarray,
                           dim: int = 12, check_convergence: bool = True) -> dict:
    """Single-photon fidelity surface for one mode with incoherent gain,
    linear loss and two-photon loss.  The Hamiltonian part (detuning, Kerr)
    commutes with photon number and cannot change the steady state, so the
    scan is purely over gamma/kappa_g and kappa_l/kappa_g.

    Reports the Uhlmann fidelity F(rho, |1><1|) = sqrt(<1|rho|1>).

    Returns the fidelity surface, its argmax and max; unstable points carry NaN.
    """
    fid = np.full((len(loss_ratios), len(gamma_ratios)), np.nan)
    for r, kl in enumerate(loss_ratios):
        for c, g in enumerate(gamma_ratios):
            if kl == 0 and g == 0:
                continue  # pure gain: no steady state
            try:
                rho = _single_mode_steady(1.0, kl, g, dim)
                if check_convergence:
                    rho2 = _single_mode_steady(1.0, kl, g, dim + 2)
                    if abs(rho2.matrix[1, 1].real - rho.matrix[1, 1].real) > 1e-4:
                        continue
                    rho = rho2
                fid[r, c] = np.sqrt(max(rho.matrix[1, 1].real, 0.0))
            except RuntimeError:
                continue
    best = np.unravel_index(np.nanargmax(fid), fid.shape)
    return {
        "gamma_ratios": np.asarray(gamma_ratios),
        "loss_ratios": np.asarray(loss_ratios),
        "fidelity": fid,
        "max_fidelity": float(fid[best]),
        "argmax": {"kappa_l": float(loss_ratios[best[0]]),
                   "gamma": float(gamma_ratios[best[1]])},
    }


def _infidelity(x: np.ndarray, gamma: float, n_sites: int, dims: int,
                max_total: int) -> float:
    kappa, eta, xi = np.exp(x)
    if xi >= 0.999:
        return 1.0
    try:
        p = SSHParams.from_xi(n_sites, xi, U=1.0, kappa=kappa, eta=eta,
                              J=1.0, gamma=gamma)
        rho, _ = quantum_steady_state(p, dims, max_total=max_total,
                                      edge_weight_max=1.0)
        return 1.0 - fock_fidelity(rho, p)
    except (RuntimeError, SteadyStateError, DegenerateSteadyStateError):
        return 1.0


def added_loss_scan(gammas: np.ndarray, n_sites: int = 5, dims: int = 5,
                    max_total: int = 3, optimize_each: bool = False,
                    budget: int = 60, x0: np.ndarray | None = None) -> list[dict]:
    """Best-achievable Fock infidelity against unwanted pumped-sublattice loss.

    U = J = 1 held fixed; (kappa, eta, xi) are optimized (log-space
    Nelder-Mead, bounded budget) at the first grid point, and optionally at
    every point with `optimize_each`.  Returns per-gamma rows.
    """
    if x0 is None:
        x0 = np.log([1.0, 1e-2, 1e-1])  # kappa, eta, xi
    rows = []
    x_opt = x0
    args = (n_sites, dims, max_total)
    for k, gamma in enumerate(np.asarray(gammas, dtype=float)):
        if optimize_each or k == 0:
            res = opt.minimize(_infidelity, x_opt, args=(gamma,) + args,
                               method="Nelder-Mead",
                               options={"maxfev": budget, "xatol": 1e-2, "fatol": 1e-5})
            x_opt = res.x
            flagged = not res.success and res.nfev >= budget
        else:
            flagged = False
        infid = _infidelity(x_opt, gamma, *args)
        kappa, eta, xi = np.exp(x_opt)
        rows.append({"gamma": gamma, "infidelity": infid, "kappa": kappa,
                     "eta": eta, "xi": xi, "budget_exhausted": flagged})
    return rows


# -- mode-space diagnostics ----------------------------------------------------------


def edge_bulk_coupling(p: SSHParams) -> float:
    """Strength of the interaction-induced tunneling of a doubly occupied
    edge mode into the bulk: (U/2) sum_{a != 0} |sum_i psi_a[i] psi_0[i]^3|.
    Scales linearly with the localization ratio xi (and with U)."""
    H1, chiral = build_ssh(p)
    dec = mode_decomposition(H1, chiral)
    psi0 = dec.modes[:, dec.zero_index]
    total = 0.0
    for k in range(p.n_sites):
        if k == dec.zero_index:
            continue
        total += abs(np.sum(dec.modes[:, k] * psi0 ** 3))
    return 0.5 * p.U * total


def mode_occupations(p: SSHParams, dims: int | tuple,
                     allow_even: bool = False,
                     max_total: int | None = None) -> np.ndarray:
    """Steady-state occupation of each chain eigenmode (non-interacting or
    interacting chain alike); used to check the thermal pump/loss balance."""
    n = p.n_sites
    if isinstance(dims, int):
        dims = (dims,) * n
    liouv = build_chain_liouvillian(p, dims, allow_even=allow_even,
                                    max_total=max_total)
    space = liouv.space
    rho = steady_state(liouv, tol=1e-9, charge=space.total_occupation())
    H1, chiral = build_ssh(p, allow_even=allow_even)
    dec = mode_decomposition(H1, chiral)
    ops = _site_operators(space)
    out = np.empty(len(dec.energies))
    for k in range(len(dec.energies)):
        d_k = _mode_operator(ops, dec.modes[:, k])
        out[k] = expectation(rho, d_k.dag() @ d_k).real
    return out
