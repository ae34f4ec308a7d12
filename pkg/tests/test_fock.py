import numpy as np
import pytest

from symbreak.fock import (FockSpace, annihilation, compose, creation,
                           identity, number)


def test_single_mode_annihilation_entries():
    space = FockSpace([3])
    a = annihilation(space).to_dense()
    assert a[0, 1] == pytest.approx(1.0)
    assert a[1, 2] == pytest.approx(np.sqrt(2))
    assert np.count_nonzero(a) == 2


def test_number_operator_diagonal():
    space = FockSpace([4])
    n = number(space).to_dense()
    assert np.allclose(n, np.diag([0, 1, 2, 3]))


def test_commutator_truncation_signature():
    for d in (2, 5, 9):
        space = FockSpace([d])
        a = annihilation(space)
        comm = (a @ a.dag() - a.dag() @ a).to_dense()
        expected = np.eye(d)
        expected[-1, -1] = -(d - 1)
        assert np.allclose(comm, expected)


def test_two_mode_embedding_order():
    space = FockSpace([2, 2])
    a0 = annihilation(space, 0).to_dense()
    one = np.eye(2)
    a1_local = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert np.allclose(a0, np.kron(a1_local, one))
    a1 = annihilation(space, 1).to_dense()
    assert np.allclose(a1, np.kron(one, a1_local))


def test_operators_on_different_modes_commute():
    space = FockSpace([3, 4])
    a0, a1 = annihilation(space, 0), annihilation(space, 1)
    diff = (a0 @ a1 - a1 @ a0).to_dense()
    assert np.abs(diff).max() == 0.0


def test_compose_linear_combination():
    space = FockSpace([3])
    a = annihilation(space)
    x = compose([a, a.dag()], [1.0, 1.0]).to_dense()
    assert np.allclose(x, np.array([[0, 1, 0],
                                    [1, 0, np.sqrt(2)],
                                    [0, np.sqrt(2), 0]]))
    zero = compose([a], [0.0]).to_dense()
    assert np.abs(zero).max() == 0.0


def test_double_excitation_diagonal():
    space = FockSpace([4])
    a = annihilation(space)
    op = (a.dag() @ a.dag() @ a @ a).to_dense()
    assert np.allclose(op, np.diag([0, 0, 2, 6]))


def test_hermiticity_flags():
    space = FockSpace([3, 3])
    assert number(space, 0).is_hermitian()
    assert identity(space).is_hermitian()
    assert not annihilation(space, 0).is_hermitian()


def test_space_mismatch_rejected():
    a = annihilation(FockSpace([3]))
    b = annihilation(FockSpace([4]))
    with pytest.raises(ValueError):
        _ = a + b


def test_mode_out_of_range():
    space = FockSpace([3, 3])
    with pytest.raises(IndexError):
        annihilation(space, 2)


def test_occupations_and_total():
    space = FockSpace([2, 3])
    occ0 = space.occupations(0)
    occ1 = space.occupations(1)
    assert np.array_equal(occ0, [0, 0, 0, 1, 1, 1])
    assert np.array_equal(occ1, [0, 1, 2, 0, 1, 2])
    assert np.array_equal(space.total_occupation(), occ0 + occ1)


# -- total-occupation-capped spaces -------------------------------------------------


def test_capped_space_dimension_count():
    space = FockSpace([4, 4], max_total=3)
    # pairs (na, nb) with na + nb <= 3
    assert space.total_dim == 10
    assert space.product_dim == 16
    assert np.all(space.total_occupation() <= 3)


def test_non_binding_cap_is_dropped():
    space = FockSpace([3, 3], max_total=10)
    assert space.max_total is None
    assert space.total_dim == 9


def test_capped_operators_match_restriction():
    full = FockSpace([4, 3])
    capped = FockSpace([4, 3], max_total=3)
    keep = np.flatnonzero(full.total_occupation() <= 3)
    for mode in (0, 1):
        dense_full = annihilation(full, mode).to_dense()
        dense_capped = annihilation(capped, mode).to_dense()
        assert np.allclose(dense_capped, dense_full[np.ix_(keep, keep)])
        n_full = number(full, mode).to_dense()
        n_capped = number(capped, mode).to_dense()
        assert np.allclose(n_capped, n_full[np.ix_(keep, keep)])


def test_capped_commutator_between_modes():
    space = FockSpace([3, 3, 3], max_total=2)
    a0, a2 = annihilation(space, 0), annihilation(space, 2)
    assert np.abs((a0 @ a2 - a2 @ a0).to_dense()).max() < 1e-14


def test_invalid_dims_rejected():
    with pytest.raises(ValueError):
        FockSpace([1, 3])
    with pytest.raises(ValueError):
        FockSpace([])
    with pytest.raises(ValueError):
        FockSpace([3, 3], max_total=0)
