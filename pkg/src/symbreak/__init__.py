"""Numerical toolkit for symmetry-breaking stabilization in driven-dissipative
bosonic lattices: sparse Fock-space operators, Lindblad steady states and
dynamics, a nonlinear-hopping dimer laser, and interacting SSH chains with
pumped edge modes."""

from .fock import FockSpace, SparseOperator, annihilation, compose, creation, identity, number
from .lindblad import (DegenerateSteadyStateError, DensityMatrix, Liouvillian,
                       SteadyStateError, build_liouvillian, evolve,
                       expectation, moment_rhs, steady_state,
                       steady_state_basis)
from .pt_dimer import (DimerParams, MeanFieldState, UnstableDynamicsError,
                       build_dimer_model, default_dims,
                       density_block_eigenvalues, exact_mean_photon,
                       instability_certificate, langevin_simulate,
                       lasing_branch_density, mean_field_rhs,
                       mean_field_steady_state, mf_vs_exact_scan,
                       phase_diffusion_estimate, scaling_param_grid,
                       semiclassical_fixed_point, semiclassical_rhs)
from .ssh import (LimitCycle, ModeDecomposition, SSHParams, added_loss_scan,
                  build_chain_liouvillian, build_ssh, delta_from_xi,
                  dissipator_identity_deviation, edge_bulk_coupling,
                  edge_wavefunction, floquet_multipliers, fock_fidelity,
                  integrate_semiclassical, limit_cycle_solve,
                  mean_field_self_consistent, mode_decomposition,
                  mode_occupations, quantum_steady_state,
                  rate_equation_prediction, single_mode_no_go_scan,
                  single_photon_state)

__version__ = "0.1.0"
