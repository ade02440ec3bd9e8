import numpy as np
import pytest

from clonekit.errors import ValidationError
from clonekit.qlinalg import cholesky_psd2, extend_to_unitary, inner, psd2_check, tensor
from helpers import random_gram_matched, random_psd2

E0 = np.array([1.0, 0.0], dtype=complex)
E1 = np.array([0.0, 1.0], dtype=complex)


class TestInner:
    def test_orthonormal_basis(self):
        assert inner(E0, E0) == 1
        assert inner(E0, E1) == 0

    def test_superposition(self):
        plus = (E0 + E1) / np.sqrt(2)
        assert inner(plus, E0) == pytest.approx(1 / np.sqrt(2))

    def test_conjugate_linear_first_argument(self):
        a = np.array([1j, 0.5])
        b = np.array([0.25, -1j])
        assert inner(1j * a, b) == pytest.approx(-1j * inner(a, b))
        assert inner(a, 1j * b) == pytest.approx(1j * inner(a, b))

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            inner(E0, np.ones(3))

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            a = rng.normal(size=4) + 1j * rng.normal(size=4)
            b = rng.normal(size=4) + 1j * rng.normal(size=4)
            lhs = abs(inner(a, b)) ** 2
            rhs = inner(a, a).real * inner(b, b).real
            assert lhs <= rhs + 1e-12


class TestTensor:
    def test_basis(self):
        out = tensor(E0, E0)
        assert out.shape == (4,)
        assert out[0] == 1

    def test_norm_multiplicative(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=3) + 1j * rng.normal(size=3)
        b = rng.normal(size=2) + 1j * rng.normal(size=2)
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        assert np.linalg.norm(tensor(a, b)) == pytest.approx(1.0, abs=1e-12)

    def test_inner_product_factorizes(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            a, b, c, d = (rng.normal(size=3) + 1j * rng.normal(size=3) for _ in range(4))
            lhs = inner(tensor(a, b), tensor(c, d))
            assert lhs == pytest.approx(inner(a, c) * inner(b, d), abs=1e-10)

    def test_associative_up_to_flattening(self):
        rng = np.random.default_rng(5)
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        b = rng.normal(size=3) + 1j * rng.normal(size=3)
        c = rng.normal(size=4) + 1j * rng.normal(size=4)
        np.testing.assert_allclose(
            tensor(tensor(a, b), c), tensor(a, tensor(b, c)), rtol=1e-14, atol=1e-15
        )


class TestPsd2Check:
    def test_identity(self):
        det, ok = psd2_check(np.eye(2))
        assert det == pytest.approx(1.0) and ok

    def test_rank_one_boundary(self):
        det, ok = psd2_check(np.ones((2, 2)))
        assert det == pytest.approx(0.0) and ok

    def test_indefinite(self):
        det, ok = psd2_check(np.array([[1.0, 1.1], [1.1, 1.0]]))
        assert det == pytest.approx(-0.21)
        assert not ok

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValidationError):
            psd2_check(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestCholeskyPsd2:
    def test_identity(self):
        np.testing.assert_allclose(cholesky_psd2(np.eye(2)), np.eye(2))

    def test_rank_one(self):
        L = cholesky_psd2(np.ones((2, 2)))
        np.testing.assert_allclose(L, np.array([[1.0, 0.0], [1.0, 0.0]]))

    def test_zero_leading_entry(self):
        L = cholesky_psd2(np.diag([0.0, 2.0]).astype(complex))
        np.testing.assert_allclose(L, np.diag([0.0, np.sqrt(2)]))
        assert np.all(L[:, 0] == 0)

    def test_reconstructs_random_psd(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            h = random_psd2(rng)
            L = cholesky_psd2(h)
            assert np.max(np.abs(L @ L.conj().T - h)) < 1e-10
            assert L[0, 1] == 0  # lower triangular

    def test_rejects_indefinite(self):
        with pytest.raises(ValidationError):
            cholesky_psd2(np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestExtendToUnitary:
    def test_identity_case(self):
        u = extend_to_unitary([E0, E1], [E0, E1])
        np.testing.assert_allclose(u, np.eye(2), atol=1e-12)

    def test_forced_mapped_direction(self):
        u = extend_to_unitary([E0], [E1])
        np.testing.assert_allclose(u @ E0, E1, atol=1e-12)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-12)

    def test_random_gram_matched_dim8(self):
        rng = np.random.default_rng(13)
        for _ in range(1000):
            ins, outs = random_gram_matched(rng, 8)
            u = extend_to_unitary(ins, outs)
            assert np.max(np.abs(u.conj().T @ u - np.eye(8))) < 1e-10
            for a, b in zip(ins, outs):
                assert np.max(np.abs(u @ a - b)) < 1e-10

    def test_deterministic(self):
        rng = np.random.default_rng(17)
        ins, outs = random_gram_matched(rng, 6)
        u1 = extend_to_unitary(ins, outs)
        u2 = extend_to_unitary(ins, outs)
        np.testing.assert_array_equal(u1, u2)

    def test_gram_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            extend_to_unitary([E0], [0.5 * E0])

    def test_linear_dependence_rejected(self):
        with pytest.raises(ValidationError):
            extend_to_unitary([E0, E0], [E0, E0])
