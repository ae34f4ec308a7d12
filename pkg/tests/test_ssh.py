import numpy as np
import pytest

from symbreak.ssh import (LimitCycle, SSHParams, added_loss_scan, build_ssh,
                          delta_from_xi, dissipator_identity_deviation,
                          edge_bulk_coupling, edge_wavefunction,
                          floquet_multipliers, fock_fidelity,
                          integrate_semiclassical, limit_cycle_solve,
                          mean_field_self_consistent, mode_decomposition,
                          mode_occupations, quantum_steady_state,
                          rate_equation_prediction, single_mode_no_go_scan,
                          _single_mode_steady)


def _random_chiral_hamiltonian(rng, n):
    a_idx = np.arange(0, n, 2)
    b_idx = np.arange(1, n, 2)
    block = rng.normal(size=(len(a_idx), len(b_idx))) \
        + 1j * rng.normal(size=(len(a_idx), len(b_idx)))
    H = np.zeros((n, n), dtype=complex)
    H[np.ix_(a_idx, b_idx)] = block
    H[np.ix_(b_idx, a_idx)] = block.conj().T
    chiral = np.array([1.0 if i % 2 == 0 else -1.0 for i in range(n)])
    return H, chiral


def test_xi_delta_roundtrip():
    for xi in (0.1, 0.5, 0.9):
        p = SSHParams.from_xi(5, xi, U=1.0, kappa=1.0, eta=0.1)
        assert p.xi == pytest.approx(xi, rel=1e-12)
        assert delta_from_xi(xi) == pytest.approx(p.delta, rel=1e-12)
    assert SSHParams.from_xi(5, 0.5, U=1.0, kappa=1.0, eta=0.1).topological


def test_eta_prime_scaling():
    p = SSHParams.from_xi(5, 0.2, U=1.0, kappa=1.0, eta_prime=0.3)
    assert p.eta == pytest.approx(0.3 * 0.2 ** 2, rel=1e-12)
    assert p.eta_prime == pytest.approx(0.3, rel=1e-12)


def test_build_ssh_anticommutes_with_chiral():
    p = SSHParams.from_xi(9, 0.4, U=0.0, kappa=1.0, eta=0.1)
    H1, chiral = build_ssh(p)
    C = np.diag(chiral)
    assert np.abs(C @ H1 @ C + H1).max() < 1e-14


def test_mode_decomposition_pairing_and_spectrum():
    rng = np.random.default_rng(3)
    for n in (5, 7):
        H, chiral = _random_chiral_hamiltonian(rng, n)
        dec = mode_decomposition(H, chiral)
        M = dec.modes
        assert np.abs(M.conj().T @ M - np.eye(n)).max() < 1e-12
        assert np.abs(H @ M - M @ np.diag(dec.energies)).max() < 1e-12
        for k in range(n):
            partner = dec.pairing[k]
            assert dec.energies[partner] == pytest.approx(-dec.energies[k],
                                                          abs=1e-12)
            # the partner wavefunction is the chiral image, exactly
            image = chiral * M[:, k]
            assert min(np.abs(M[:, partner] - image).max(),
                       np.abs(M[:, partner] + image).max()) < 1e-12


def test_zero_mode_lives_on_one_sublattice():
    p = SSHParams.from_xi(11, 0.3, U=0.0, kappa=1.0, eta=0.1)
    H1, chiral = build_ssh(p)
    dec = mode_decomposition(H1, chiral)
    assert dec.zero_index is not None
    psi = dec.modes[:, dec.zero_index]
    assert np.abs(psi[chiral < 0]).max() == 0.0
    assert dec.energies[dec.zero_index] == pytest.approx(0.0, abs=1e-14)


def test_edge_wavefunction_matches_zero_mode():
    p = SSHParams.from_xi(11, 0.3, U=0.0, kappa=1.0, eta=0.1)
    H1, chiral = build_ssh(p)
    dec = mode_decomposition(H1, chiral)
    psi = edge_wavefunction(p)
    overlap = abs(np.vdot(psi, dec.modes[:, dec.zero_index]))
    assert overlap == pytest.approx(1.0, abs=1e-12)


def test_edge_wavefunction_decay():
    xi = 0.25
    p = SSHParams.from_xi(9, xi, U=0.0, kappa=1.0, eta=0.1)
    psi = edge_wavefunction(p)
    assert psi[2] / psi[0] == pytest.approx(-xi, rel=1e-12)
    assert np.abs(psi[1::2]).max() < 1e-12


def test_edge_wavefunction_requires_topological_phase():
    p = SSHParams(n_sites=9, J=1.0, delta=-0.3, U=0.0, kappa=1.0, eta=0.1)
    with pytest.raises(ValueError):
        edge_wavefunction(p)


def test_dissipator_identity_chain_and_random():
    p = SSHParams.from_xi(3, 0.4, U=0.0, kappa=1.0, eta=0.3)
    H1, chiral = build_ssh(p)
    assert dissipator_identity_deviation(H1, chiral, (2, 2, 2), 1.0, 0.3) < 1e-12
    rng = np.random.default_rng(8)
    for _ in range(3):
        H, chiral = _random_chiral_hamiltonian(rng, 3)
        assert dissipator_identity_deviation(H, chiral, (2, 2, 2), 1.0, 0.3) < 1e-12


def test_thermal_occupation_gapped_chain():
    eta = 0.1
    p = SSHParams(n_sites=4, J=1.0, delta=0.5, U=0.0, kappa=0.001, eta=eta)
    occ = mode_occupations(p, 4, allow_even=True)
    assert np.abs(occ - eta ** 2 / (1 - eta ** 2)).max() < 1e-6


def test_limit_cycle_small_chain():
    p = SSHParams.from_xi(9, 0.5, U=0.001, kappa=1.0, eta=0.2)
    cycle = limit_cycle_solve(p)
    assert cycle.residual < 1e-8
    assert np.sum(np.abs(cycle.d0) ** 2) > 1.0
    mults = np.sort(np.abs(floquet_multipliers(p, cycle)))
    assert mults[-1] == pytest.approx(1.0, abs=1e-4)   # phase freedom
    assert mults[-2] < 1.0                             # everything else damped


def test_limit_cycle_amplitude_is_edge_localized():
    p = SSHParams.from_xi(9, 0.4, U=0.001, kappa=1.0, eta=0.2)
    cycle = limit_cycle_solve(p)
    weights = np.abs(cycle.d0) ** 2
    assert weights[0] == weights.max()
    assert weights[1] < 0.1 * weights[0]


def test_mean_field_overlap_curve():
    p = SSHParams.from_xi(21, 0.5, U=1.0, kappa=1.0, eta=0.1)
    result = mean_field_self_consistent(p)
    fine = mean_field_self_consistent(p, s_max=1.0, n_curve=20)
    curve = fine["curve_overlap"]
    assert curve[0] == pytest.approx(0.0, abs=1e-12)
    assert np.all(np.diff(curve[:5]) > 0)
    assert result["b_overlap"] == pytest.approx(p.eta ** 2, rel=1e-4)


def test_quantum_steady_state_fidelity_regression():
    p = SSHParams.from_xi(5, 0.1, U=1.0, kappa=1.0, eta=0.01)
    rho, dens = quantum_steady_state(p, 5, max_total=4)
    assert 1 - fock_fidelity(rho, p) == pytest.approx(0.21062, abs=2e-4)
    # photons live on the pumped sublattice, mostly at the edge
    assert dens[0] == dens.max()


def test_rate_equation_probabilities_normalized():
    for xi in (0.05, 0.2):
        p0, p1, p2 = rate_equation_prediction(xi)
        assert p0 + p1 + p2 == pytest.approx(1.0, rel=1e-12)
        assert p1 > 0.9


def test_single_mode_detuning_and_kerr_irrelevant():
    base = _single_mode_steady(1.0, 0.3, 0.5, 10)
    shifted = _single_mode_steady(1.0, 0.3, 0.5, 10, detuning=0.7, U=1.3)
    assert np.abs(base.matrix - shifted.matrix).max() < 1e-10


def test_single_mode_no_go_maximum():
    gammas = np.logspace(-1, 1, 9)
    scan = single_mode_no_go_scan(gammas, np.array([0.0, 0.3]), dim=12)
    assert scan["argmax"]["kappa_l"] == 0.0
    assert scan["max_fidelity"] == pytest.approx(0.60, abs=0.05)


def test_added_loss_monotonicity():
    rows = added_loss_scan(np.array([1e-3, 1e-2, 1e-1]), n_sites=5, dims=5,
                           max_total=3)
    infs = [r["infidelity"] for r in rows]
    assert all(b >= a - 1e-12 for a, b in zip(infs, infs[1:]))


def test_edge_bulk_coupling_shrinks_with_localization():
    strong = SSHParams.from_xi(9, 0.1, U=1.0, kappa=1.0, eta=0.1)
    weak = SSHParams.from_xi(9, 0.6, U=1.0, kappa=1.0, eta=0.1)
    assert edge_bulk_coupling(strong) < edge_bulk_coupling(weak)


def test_even_chain_rejected_without_flag():
    p = SSHParams(n_sites=4, J=1.0, delta=0.5, U=0.0, kappa=1.0, eta=0.1)
    with pytest.raises(ValueError):
        build_ssh(p)
