import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effectframes import (
    DEFAULT_TOL,
    DimensionMismatchError,
    HermitianOperator,
    NonHermitianError,
    OperatorBasis,
    SingularBasisError,
    ToleranceConfig,
    change_of_basis,
    eig_hermitian,
    expand,
    hs_distance,
    hs_inner,
    identity,
    operator_from_jsonable,
    operator_to_jsonable,
    orthonormal_operator_basis,
    rank_one,
    real_coordinates,
    zero,
)
from conftest import random_hermitian

KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
KET_PLUS_I = np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2.0)


def test_constructor_rejects_non_hermitian():
    with pytest.raises(NonHermitianError):
        HermitianOperator(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))


def test_constructor_rejects_non_square():
    with pytest.raises(ValueError):
        HermitianOperator(np.zeros((2, 3), dtype=complex))


def test_matrix_is_read_only():
    op = identity(2)
    with pytest.raises(ValueError):
        op.mat[0, 0] = 5.0


def test_hs_inner_identity():
    assert hs_inner(identity(2), identity(2)) == pytest.approx(2.0)


def test_hs_inner_orthogonal_projectors():
    assert hs_inner(rank_one(KET0), rank_one(KET1)) == pytest.approx(0.0, abs=1e-15)


def test_hs_inner_overlapping_projectors():
    # Tr(|0><0| |+><+|) = |<0|+>|^2 = 1/2
    assert hs_inner(rank_one(KET0), rank_one(KET_PLUS)) == pytest.approx(0.5)


def test_hs_inner_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        hs_inner(identity(2), identity(3))


def test_hs_inner_symmetric(rng):
    a = random_hermitian(rng, 3)
    b = random_hermitian(rng, 3)
    assert hs_inner(a, b) == pytest.approx(hs_inner(b, a), abs=1e-12)


def test_eig_identity():
    w, v = eig_hermitian(identity(2))
    np.testing.assert_allclose(w, [1.0, 1.0], atol=1e-13)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(2), atol=1e-13)


def test_eig_diagonal_sorted():
    op = HermitianOperator(np.diag([0.2, 0.7]).astype(complex))
    w, _ = eig_hermitian(op)
    np.testing.assert_allclose(w, [0.7, 0.2], atol=1e-13)


def test_eig_augmented_gram_operator():
    # G = I + |+><+| + |+i><+i| has eigenvalues 2 +- 1/sqrt(2)
    g = HermitianOperator(
        np.eye(2, dtype=complex) + rank_one(KET_PLUS).mat + rank_one(KET_PLUS_I).mat
    )
    w, v = eig_hermitian(g)
    assert w[0] == pytest.approx(2.0 + 1.0 / math.sqrt(2.0), abs=1e-12)
    assert w[1] == pytest.approx(2.0 - 1.0 / math.sqrt(2.0), abs=1e-12)
    recon = v @ np.diag(w) @ v.conj().T
    np.testing.assert_allclose(recon, g.mat, atol=1e-12)


def test_eig_matches_numpy_oracle(rng):
    for d in (2, 3, 4, 5, 6):
        for _ in range(20):
            op = random_hermitian(rng, d, scale=3.0)
            w, v = eig_hermitian(op)
            np.testing.assert_allclose(w, np.linalg.eigvalsh(op.mat)[::-1], atol=1e-10)
            np.testing.assert_allclose(v.conj().T @ v, np.eye(d), atol=1e-11)


def test_eig_round_trip_bulk(rng):
    """Spectral round trip over a large seeded ensemble, d up to 6."""
    count = 0
    for d in (2, 3, 4, 5, 6):
        for _ in range(200):
            op = random_hermitian(rng, d, scale=2.0)
            w, v = eig_hermitian(op)
            err = np.linalg.norm(v @ np.diag(w) @ v.conj().T - op.mat)
            assert err <= 10 * DEFAULT_TOL.residual * max(1.0, op.norm())
            count += 1
    assert count == 1000


def test_eig_cache_returns_same_arrays():
    op = identity(3)
    w1, v1 = eig_hermitian(op)
    w2, v2 = eig_hermitian(op)
    assert w1 is w2 and v1 is v2


def test_operator_arithmetic():
    a = identity(2)
    b = rank_one(KET0)
    s = a + b
    assert s.mat[0, 0] == pytest.approx(2.0)
    diff = a - b
    assert diff.mat[0, 0] == pytest.approx(0.0)
    scaled = b * 0.25
    assert scaled.mat[0, 0] == pytest.approx(0.25)
    assert (0.25 * b).mat[0, 0] == pytest.approx(0.25)
    assert (-b).mat[0, 0] == pytest.approx(-1.0)


def test_zero_and_trace():
    assert zero(3).trace() == pytest.approx(0.0)
    assert identity(3).trace() == pytest.approx(3.0)


def test_orthonormal_basis_d2_is_scaled_paulis():
    basis = orthonormal_operator_basis(2)
    assert len(basis) == 4
    gram = np.array(
        [[hs_inner(a, b) for b in basis.elements] for a in basis.elements]
    )
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-14)
    # first element is I/sqrt(2)
    np.testing.assert_allclose(basis.elements[0].mat, np.eye(2) / math.sqrt(2.0), atol=1e-14)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_orthonormal_basis_gram_identity(d):
    basis = orthonormal_operator_basis(d)
    assert basis.kind == "orthonormal"
    assert len(basis) == d * d
    np.testing.assert_allclose(basis.gram, np.eye(d * d), atol=1e-13)
    for w in basis.elements:
        assert hs_inner(w, w) == pytest.approx(1.0, abs=1e-13)


def test_expand_orthonormal_unit_vector():
    basis = orthonormal_operator_basis(2)
    coeffs = expand(basis.elements[3], basis).coeffs
    np.testing.assert_allclose(coeffs, [0.0, 0.0, 0.0, 1.0], atol=1e-13)


def test_expand_recombine_round_trip(rng):
    for d in (2, 3, 4):
        basis = orthonormal_operator_basis(d)
        op = random_hermitian(rng, d)
        vec = expand(op, basis)
        assert hs_distance(vec.recombine(), op) < DEFAULT_TOL.residual


def test_expand_dimension_mismatch():
    basis = orthonormal_operator_basis(2)
    with pytest.raises(DimensionMismatchError):
        expand(identity(3), basis)


def test_real_coordinates_isometry(rng):
    a = random_hermitian(rng, 3)
    b = random_hermitian(rng, 3)
    va, vb = real_coordinates(a), real_coordinates(b)
    assert va @ vb == pytest.approx(hs_inner(a, b), abs=1e-12)
    assert va @ va == pytest.approx(hs_inner(a, a), abs=1e-12)


def test_operator_basis_needs_d_squared_elements():
    with pytest.raises(ValueError):
        OperatorBasis(elements=(identity(2), rank_one(KET0)), kind="generic")


def test_operator_basis_rejects_dependent_family():
    ops = (identity(2), identity(2) * 2.0, rank_one(KET0), rank_one(KET1))
    with pytest.raises(SingularBasisError):
        OperatorBasis(elements=ops, kind="generic")


def test_change_of_basis_same_basis_is_identity():
    basis = orthonormal_operator_basis(2)
    cob = change_of_basis(basis, basis)
    np.testing.assert_allclose(cob.matrix, np.eye(4), atol=1e-12)


def test_change_of_basis_transports_coefficients(rng):
    src = orthonormal_operator_basis(3)
    perm = tuple(src.elements[k] for k in (4, 0, 8, 2, 6, 1, 7, 3, 5))
    dst = OperatorBasis(elements=perm, kind="generic")
    cob = change_of_basis(src, dst)
    for _ in range(20):
        op = random_hermitian(rng, 3)
        e_src = expand(op, src).coeffs
        e_dst = expand(op, dst).coeffs
        assert np.linalg.norm(cob.matrix @ e_src - e_dst) < DEFAULT_TOL.residual
    # inverse transpose consistency: (D^-T)^T D = I
    np.testing.assert_allclose(
        cob.inverse_transpose.T @ cob.matrix, np.eye(9), atol=1e-10
    )


def test_change_of_basis_round_trip():
    b1 = orthonormal_operator_basis(2)
    elems = tuple(reversed(b1.elements))
    b2 = OperatorBasis(elements=elems, kind="generic")
    forward = change_of_basis(b1, b2)
    backward = change_of_basis(b2, b1)
    np.testing.assert_allclose(forward.matrix @ backward.matrix, np.eye(4), atol=1e-12)


def test_json_round_trip(rng):
    op = random_hermitian(rng, 3)
    blob = json.dumps(operator_to_jsonable(op))
    back = operator_from_jsonable(json.loads(blob))
    assert hs_distance(op, back) < 1e-15


def test_json_rejects_non_hermitian():
    payload = {"dim": 2, "entries": [[[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]}
    with pytest.raises(NonHermitianError):
        operator_from_jsonable(payload)


def test_tolerance_config_validation():
    with pytest.raises(ValueError):
        ToleranceConfig(residual=-1.0)
    with pytest.raises(ValueError):
        ToleranceConfig(psd_slack=1e-6, residual=1e-8)
    custom = ToleranceConfig(residual=1e-6)
    assert custom.residual == 1e-6
    assert custom.eig_offdiag == DEFAULT_TOL.eig_offdiag


@given(st.integers(min_value=2, max_value=5), st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_hs_inner_positive_definite(d, seed):
    gen = np.random.default_rng(seed)
    x = gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))
    op = HermitianOperator((x + x.conj().T) / 2.0)
    self_inner = hs_inner(op, op)
    assert self_inner >= 0.0
    if op.norm() >= DEFAULT_TOL.residual:
        assert self_inner > 0.0


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_eig_trace_preserved(seed):
    gen = np.random.default_rng(seed)
    x = gen.standard_normal((4, 4)) + 1j * gen.standard_normal((4, 4))
    op = HermitianOperator((x + x.conj().T) / 2.0)
    w, _ = eig_hermitian(op)
    assert float(np.sum(w)) == pytest.approx(op.trace(), abs=1e-10)
