import numpy as np
import pytest

import symbreak.lindblad as lind
from symbreak.fock import FockSpace, annihilation, creation, identity, number
from symbreak.lindblad import (DegenerateSteadyStateError, DensityMatrix,
                               build_liouvillian, evolve, expectation,
                               moment_rhs, steady_state, steady_state_basis)


def _loss_liouvillian(dim, kappa=1.0):
    space = FockSpace([dim])
    H = 0.0 * number(space)
    return build_liouvillian(H, [np.sqrt(kappa) * annihilation(space)])


def test_pure_loss_steady_state_is_vacuum():
    liouv = _loss_liouvillian(3)
    rho = steady_state(liouv)
    expected = np.zeros((3, 3))
    expected[0, 0] = 1.0
    assert np.abs(rho.matrix - expected).max() < 1e-10


def test_commutator_only_superop_keeps_vacuum():
    space = FockSpace([4])
    liouv = build_liouvillian(1.3 * number(space), [])
    vac = np.zeros((4, 4), dtype=complex)
    vac[0, 0] = 1.0
    assert np.abs(liouv.apply(vac)).max() < 1e-14


def test_trace_preservation_adjoint_identity():
    space = FockSpace([3, 2])
    H = number(space, 0) + 0.7 * number(space, 1)
    jumps = [annihilation(space, 0), 0.3 * creation(space, 1)]
    liouv = build_liouvillian(H, jumps)
    eye = np.eye(space.total_dim, dtype=complex).reshape(-1, order="F")
    assert np.abs(liouv.superop.conj().T @ eye).max() < 1e-12


def test_non_hermitian_hamiltonian_rejected():
    space = FockSpace([3])
    with pytest.raises(ValueError):
        build_liouvillian(annihilation(space), [])


def test_evolve_matches_analytic_decay():
    kappa = 0.8
    dim = 12
    space = FockSpace([dim])
    liouv = build_liouvillian(0.0 * number(space),
                              [np.sqrt(kappa) * annihilation(space)])
    alpha = 1.2
    ns = np.arange(dim)
    from math import factorial
    amps = np.exp(-abs(alpha) ** 2 / 2) * alpha ** ns / np.sqrt(
        [factorial(int(k)) for k in ns])
    psi = amps / np.linalg.norm(amps)
    rho0 = DensityMatrix(space, np.outer(psi, psi.conj()))
    t_grid = np.array([0.0, 0.5, 1.5])
    states = evolve(liouv, rho0, t_grid)
    n_op = number(space)
    n0 = expectation(rho0, n_op).real
    for t, rho in zip(t_grid, states):
        assert abs(np.trace(rho.matrix) - 1) < 1e-9
        assert expectation(rho, n_op).real == pytest.approx(
            n0 * np.exp(-kappa * t), abs=1e-7)


def test_moment_rhs_linear_loss():
    kappa = 0.8
    space = FockSpace([10])
    liouv = build_liouvillian(0.0 * number(space),
                              [np.sqrt(kappa) * annihilation(space)])
    rng = np.random.default_rng(5)
    m = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
    rho = DensityMatrix(space, m @ m.conj().T / np.trace(m @ m.conj().T).real)
    n_op = number(space)
    lhs = moment_rhs(rho, liouv, n_op).real
    assert lhs == pytest.approx(-kappa * expectation(rho, n_op).real, abs=1e-12)


def test_thermal_balance_single_mode():
    eta = 0.3
    kappa = 1.0
    space = FockSpace([40])
    a = annihilation(space)
    liouv = build_liouvillian(0.0 * number(space),
                              [np.sqrt(kappa) * a,
                               np.sqrt(eta ** 2 * kappa) * a.dag()])
    rho = steady_state(liouv)
    n = expectation(rho, number(space)).real
    assert n == pytest.approx(eta ** 2 / (1 - eta ** 2), abs=1e-9)


def test_degenerate_steady_state_detected():
    # loss on mode 0 only; every Fock state of mode 1 is stationary
    space = FockSpace([2, 3])
    liouv = build_liouvillian(0.0 * number(space, 0),
                              [annihilation(space, 0)])
    with pytest.raises(DegenerateSteadyStateError):
        steady_state(liouv)
    basis = steady_state_basis(liouv)
    assert len(basis) >= 2


def test_charge_sector_restriction_agrees():
    space = FockSpace([3, 3])
    a, b = annihilation(space, 0), annihilation(space, 1)
    H = a.dag() @ b + b.dag() @ a
    liouv = build_liouvillian(H, [np.sqrt(2.0) * a, 0.4 * b.dag()])
    rho_full = steady_state(liouv)
    rho_sector = steady_state(liouv, charge=space.total_occupation())
    assert np.abs(rho_full.matrix - rho_sector.matrix).max() < 1e-7


def test_dense_and_sparse_paths_agree(monkeypatch):
    space = FockSpace([4, 3])
    a, b = annihilation(space, 0), annihilation(space, 1)
    H = a.dag() @ b + b.dag() @ a
    liouv = build_liouvillian(H, [np.sqrt(2.0) * a, 0.4 * b.dag()])
    rho_dense = steady_state(liouv)
    monkeypatch.setattr(lind, "DENSE_SUPEROP_LIMIT", 4)
    rho_sparse = steady_state(liouv)
    assert np.abs(rho_dense.matrix - rho_sparse.matrix).max() < 1e-7


def test_steady_state_validates():
    rho = steady_state(_loss_liouvillian(4))
    rho.validate()
    tr = np.trace(rho.matrix)
    assert abs(tr - 1) < 1e-10
    assert np.abs(rho.matrix - rho.matrix.conj().T).max() < 1e-10
