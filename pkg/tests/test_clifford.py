import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_hardy.clifford import (
    PAULI,
    alpha_hat,
    alpha_hat_field,
    build_clifford,
    minus_i_alphahat_beta,
    spinor_dim,
    unit_direction,
)

I2 = np.eye(2)


@pytest.mark.parametrize("n", range(1, 9))
def test_relations_hold_exactly(n):
    rep = build_clifford(n)
    mats = list(rep.alphas) + [rep.beta]
    eye = np.eye(rep.m)
    for (i, a), (j, b) in itertools.product(enumerate(mats), repeat=2):
        assert np.array_equal(a @ b + b @ a, 2 * eye * (i == j))
    assert max(rep.anticommutator_errors().values()) == 0.0


@pytest.mark.parametrize("n", range(1, 9))
def test_hermitian_and_entries_are_units(n):
    rep = build_clifford(n)
    for a in list(rep.alphas) + [rep.beta]:
        assert np.array_equal(a, a.conj().T)
        assert set(np.unique(a).tolist()) <= {0, 1, -1, 1j, -1j}


def test_dimension_is_two_to_ceil_half():
    assert [spinor_dim(n) for n in range(1, 8)] == [2, 2, 4, 4, 8, 8, 16]
    assert all(build_clifford(n).m == spinor_dim(n) for n in range(1, 8))


def test_three_dimensional_block_form():
    rep = build_clifford(3)
    z = np.zeros((2, 2))
    for a, s in zip(rep.alphas, PAULI):
        assert np.array_equal(a, np.block([[z, s], [s, z]]))
    assert np.array_equal(rep.beta, np.block([[I2, z], [z, -I2]]))


def test_rejects_nonpositive_dimension():
    with pytest.raises(ValueError):
        build_clifford(0)


def test_unit_direction_rejects_zero_and_wrong_norm():
    with pytest.raises(ValueError):
        unit_direction([0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        unit_direction([1.0, 1.0])


directions = st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 1e-3
)


@settings(max_examples=60, deadline=None)
@given(directions)
def test_alpha_hat_is_an_involution(v):
    rep = build_clifford(3)
    w = np.asarray(v) / np.linalg.norm(v)
    ah = alpha_hat(rep, w)
    assert np.allclose(ah @ ah, np.eye(4), atol=1e-13)
    t = minus_i_alphahat_beta(rep, w)
    assert np.allclose(t, t.conj().T, atol=1e-14)
    assert np.allclose(np.linalg.eigvalsh(t), [-1, -1, 1, 1], atol=1e-12)


def test_field_version_matches_pointwise():
    rep = build_clifford(4)
    rng = np.random.default_rng(3)
    w = rng.standard_normal((7, 4))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    stack = alpha_hat_field(rep, w)
    for i in range(7):
        assert np.allclose(stack[i], alpha_hat(rep, w[i]))
