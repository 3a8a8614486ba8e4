import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

import blaschke_lab as bl
from blaschke_lab.errors import CompositionDivergenceError, DimensionMismatchError
from blaschke_lab.spaces import TaylorPoly


def poly(*coeffs):
    return TaylorPoly(np.array(coeffs, dtype=complex))


small_complex = st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False)
coeff_lists = st.lists(small_complex, min_size=1, max_size=12)


class TestWeightedInner:
    def test_disjoint_monomials_orthogonal(self):
        for j, k in [(0, 1), (2, 5), (1, 7)]:
            assert bl.weighted_inner(TaylorPoly.monomial(j, 8), TaylorPoly.monomial(k, 8), -1.0) == 0

    def test_z3_bergman_value(self):
        # <z^3, z^3> at alpha = -1 is (3+1)^(-1) = 1/4
        v = bl.weighted_inner(TaylorPoly.monomial(3), TaylorPoly.monomial(3), -1.0)
        assert v == pytest.approx(0.25)

    def test_parseval_alpha0(self):
        f = poly(1, 1)
        assert bl.weighted_inner(f, f, 0.0) == pytest.approx(2.0)

    @given(coeff_lists, coeff_lists, st.sampled_from([-1.0, -0.5, 0.0, 1.0]))
    def test_conjugate_symmetry(self, a, b, alpha):
        f, g = TaylorPoly(a), TaylorPoly(b)
        lhs = bl.weighted_inner(f, g, alpha)
        rhs = np.conj(bl.weighted_inner(g, f, alpha))
        assert lhs == pytest.approx(rhs, abs=1e-10)


class TestWeightedNorm:
    def test_zero(self):
        assert bl.weighted_norm(TaylorPoly.zero(5), -1.0) == 0.0

    @pytest.mark.parametrize("k,alpha", [(0, -1.0), (3, -1.0), (2, 0.0), (5, 1.0), (4, 0.37)])
    def test_monomial(self, k, alpha):
        assert bl.weighted_norm(TaylorPoly.monomial(k), alpha) == pytest.approx((k + 1) ** (alpha / 2))

    def test_three_terms_bergman(self):
        # |1|^2/1 + |2|^2/2 + |3|^2/3 = 6
        f = poly(1, 2, 3)
        assert bl.weighted_norm(f, -1.0) == pytest.approx(np.sqrt(6.0))

    @given(coeff_lists)
    def test_parseval_alpha0_exact(self, a):
        f = TaylorPoly(a)
        assert bl.weighted_norm(f, 0.0) ** 2 == pytest.approx(
            float(np.sum(np.abs(f.coeffs) ** 2)), rel=1e-12
        )


class TestMultiply:
    def test_identity_element(self):
        f = poly(2, 0, 1j)
        out = bl.multiply(f, TaylorPoly.one(), 4)
        assert np.allclose(out.coeffs[:3], f.coeffs)

    def test_difference_of_squares(self):
        out = bl.multiply(poly(1, 1), poly(1, -1), 2)
        assert np.allclose(out.coeffs, [1, 0, -1])

    @given(
        st.lists(small_complex, min_size=1, max_size=11),
        st.lists(small_complex, min_size=1, max_size=11),
    )
    def test_matches_double_loop_convolution(self, a, b):
        D = len(a) + len(b) - 2
        out = bl.multiply(TaylorPoly(a), TaylorPoly(b), D)
        brute = np.zeros(D + 1, dtype=complex)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                brute[i + j] += ai * bj
        assert np.allclose(out.coeffs, brute, atol=1e-9)


class TestCompose:
    def test_identity_symbol_returns_b(self, B3):
        b = B3.taylor(24)
        out = bl.compose_truncated(TaylorPoly.monomial(1), b, 24)
        assert np.allclose(out.coeffs, b.coeffs)

    def test_monomial_composition(self):
        out = bl.compose_truncated(TaylorPoly.monomial(2), TaylorPoly.monomial(3), 6)
        assert np.allclose(out.coeffs, TaylorPoly.monomial(6).coeffs)

    def test_geometric_series_pointwise_oracle(self):
        # f = 1/(1 - z/2) against the degree-1 factor with zero 0.5
        D = 64
        f = TaylorPoly(0.5 ** np.arange(D + 1))
        B = bl.BlaschkeProduct(0.0, [0.5])
        comp = bl.compose_truncated(f, B.taylor(D), D)
        for t in range(20):
            z = 0.5 * (0.25 + 0.75 * t / 19) * np.exp(2j * np.pi * t / 20)
            expected = 1.0 / (1.0 - B.eval(z) / 2)
            assert abs(comp(z) - expected) < 1e-10

    def test_divergence_error_on_budget_exhaustion(self):
        # degree exceeds 4*D with coefficients that never decay
        D = 4
        f = TaylorPoly(np.ones(40))
        B = bl.BlaschkeProduct(0.0, [0.5])
        with pytest.raises(CompositionDivergenceError):
            bl.compose_truncated(f, B.taylor(D), D)

    def test_composition_consistency_invariant(self, rng):
        # taylor-of-composition agrees with pointwise composition inside
        # the disc; zeros up to modulus 0.8 at D >= 64
        D = 64
        B = bl.BlaschkeProduct(0.3, [0.8, -0.5 + 0.3j])
        fc = (0.6 ** np.arange(D + 1)) * (1 + 0.5j)
        f = TaylorPoly(fc)
        comp = bl.compose_truncated(f, B.taylor(D), D)
        for _ in range(10):
            z = 0.5 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            direct = f(B.eval(z))
            assert abs(comp(z) - direct) < 1e-9


class TestToeplitz:
    def test_constant_one_gives_identity(self):
        T = bl.toeplitz_matrix(TaylorPoly.one(), 5, 0.0)
        assert np.allclose(T.entries, np.eye(6))

    def test_z_gives_forward_shift(self):
        T = bl.toeplitz_matrix(TaylorPoly.monomial(1), 4, 0.0)
        expected = np.diag(np.ones(4), -1)
        assert np.allclose(T.entries, expected)

    def test_apply_is_multiply(self, rng):
        D = 24
        g = TaylorPoly(rng.standard_normal(6) + 1j * rng.standard_normal(6))
        f = TaylorPoly(rng.standard_normal(10) + 1j * rng.standard_normal(10))
        via_matrix = bl.apply(bl.toeplitz_matrix(g, D, 0.0), f)
        via_mul = bl.multiply(g, f, D)
        assert np.allclose(via_matrix.coeffs, via_mul.coeffs)

    def test_homomorphism_on_block(self, rng):
        # T_{fg} = T_f T_g exactly for lower-triangular truncations
        D = 20
        f = TaylorPoly(rng.standard_normal(4) + 1j * rng.standard_normal(4))
        g = TaylorPoly(rng.standard_normal(5) + 1j * rng.standard_normal(5))
        lhs = bl.toeplitz_matrix(bl.multiply(f, g, D), D, 0.0).entries
        rhs = bl.toeplitz_matrix(f, D, 0.0).entries @ bl.toeplitz_matrix(g, D, 0.0).entries
        blk = D - f.degree - g.degree + 1
        assert np.allclose(lhs[:blk, :blk], rhs[:blk, :blk], atol=1e-13)


class TestAdjoint:
    def test_identity(self):
        I = bl.OperatorMatrix.identity(6, -1.0)
        assert np.allclose(bl.weighted_adjoint(I).entries, np.eye(7))

    def test_alpha0_is_conjugate_transpose(self, rng):
        m = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
        A = bl.OperatorMatrix(m, 0.0)
        assert np.allclose(bl.weighted_adjoint(A).entries, m.conj().T)

    def test_defining_identity_bergman(self, rng):
        D = 32
        Tz = bl.toeplitz_matrix(TaylorPoly.monomial(1), D, -1.0)
        Tzs = bl.weighted_adjoint(Tz)
        for _ in range(50):
            f = TaylorPoly(rng.standard_normal(D + 1) + 1j * rng.standard_normal(D + 1))
            g = TaylorPoly(rng.standard_normal(D + 1) + 1j * rng.standard_normal(D + 1))
            lhs = bl.weighted_inner(bl.apply(Tz, f), g, -1.0)
            rhs = bl.weighted_inner(f, bl.apply(Tzs, g), -1.0)
            assert abs(lhs - rhs) < 1e-13 * max(1.0, abs(lhs))

    def test_involution(self, rng):
        D = 16
        m = rng.standard_normal((D + 1, D + 1)) + 1j * rng.standard_normal((D + 1, D + 1))
        A = bl.OperatorMatrix(m, 0.7)
        back = bl.weighted_adjoint(bl.weighted_adjoint(A))
        assert np.max(np.abs(back.entries - m)) < 1e-14 * np.max(np.abs(m))


class TestApply:
    def test_identity(self, rng):
        f = TaylorPoly(rng.standard_normal(5))
        out = bl.apply(bl.OperatorMatrix.identity(4, 0.0), f)
        assert np.allclose(out.coeffs, f.coeffs)

    def test_shift(self):
        out = bl.apply(bl.toeplitz_matrix(TaylorPoly.monomial(1), 3, 0.0), poly(1, 1))
        assert np.allclose(out.coeffs, [0, 1, 1, 0])

    def test_rejects_longer_input(self):
        with pytest.raises(DimensionMismatchError):
            bl.apply(bl.OperatorMatrix.identity(2, 0.0), TaylorPoly(np.ones(5)))

    def test_matches_row_dots(self, rng):
        D = 9
        m = rng.standard_normal((D + 1, D + 1))
        f = rng.standard_normal(D + 1)
        out = bl.apply(bl.OperatorMatrix(m, 0.0), TaylorPoly(f))
        expected = np.array([np.dot(m[i], f) for i in range(D + 1)])
        assert np.allclose(out.coeffs, expected)


def test_taylor_poly_rejects_nonfinite():
    with pytest.raises(ValueError):
        TaylorPoly([1.0, np.nan])
    with pytest.raises(ValueError):
        TaylorPoly([np.inf])


def test_taylor_poly_immutable():
    f = poly(1, 2)
    with pytest.raises(ValueError):
        f.coeffs[0] = 5
