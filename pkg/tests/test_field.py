"""
Tests for exact field arithmetic, the Euclidean algorithm and SL₂(O_F).
"""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hilbert_mvf.errors import (
    ConfigError,
    DeterminantError,
    FieldMismatchError,
    UnsupportedFieldError,
    ValidationError,
)
from hilbert_mvf.field import (
    SL2Matrix,
    batch_conj_product,
    batch_ext_gcd,
    batch_multiply,
    batch_norm,
    complete_row,
    embed,
    euclid_gcd,
    make_field,
    parse_field_spec,
    translation_generators,
    working_precision,
)

coords = st.integers(min_value=-40, max_value=40)
SUPPORTED = [None, 2, 3, 5, 13]


class TestMakeField:
    """Field construction and validation."""

    def test_rational_spellings(self):
        for spec in (None, "Q", "q", "rational"):
            F = make_field(spec)
            assert F.degree == 1
            assert F.is_rational
            assert F.spec_string == "Q"

    def test_quadratic_spellings(self):
        assert make_field("Q(sqrt:5)") == make_field(5)
        assert parse_field_spec(" Q( sqrt : 13 ) ").d == 13
        assert make_field(2).spec_string == "Q(sqrt:2)"

    def test_unsupported_and_invalid(self):
        with pytest.raises(UnsupportedFieldError):
            make_field(7)
        with pytest.raises(ValidationError):
            make_field(4)
        with pytest.raises(ValidationError):
            make_field(1)
        with pytest.raises(ValidationError):
            make_field("Q(sqrt5)")
        with pytest.raises(TypeError):
            make_field(2.0)

    def test_omega_relation(self, K5, K2):
        """ω² = tω + c₀ for both shapes of integral basis."""
        assert K5.omega * K5.omega == K5.omega + 1
        assert K2.omega * K2.omega == 2

    def test_precision_environment(self, monkeypatch):
        monkeypatch.delenv("HMVF_PRECISION", raising=False)
        assert working_precision() == 50
        monkeypatch.setenv("HMVF_PRECISION", "80")
        assert working_precision() == 80
        monkeypatch.setenv("HMVF_PRECISION", "10")
        with pytest.raises(ConfigError):
            working_precision()
        monkeypatch.setenv("HMVF_PRECISION", "many")
        with pytest.raises(ConfigError):
            working_precision()


class TestFieldElement:
    """Arithmetic, norms and embeddings."""

    def test_rational_folds_second_coordinate(self, Q):
        x = Q.element(2, 3)
        assert x.a == 5 and x.b == 0

    def test_golden_ratio(self, K5):
        w = K5.omega
        assert w.norm() == -1
        assert w.trace() == 1
        assert w.conjugate() == 1 - w
        assert w.is_unit()
        s1, s2 = (float(x) for x in embed(K5, w))
        assert s1 == pytest.approx((1 + 5**0.5) / 2, abs=1e-15)
        assert s2 == pytest.approx((1 - 5**0.5) / 2, abs=1e-15)

    def test_division_and_powers(self, K5):
        x = K5.element(3, -2)
        assert (x / x) == 1
        assert x**-2 * x**2 == 1
        assert (1 / K5.omega) == K5.omega - 1
        with pytest.raises(ZeroDivisionError):
            x / K5.zero

    def test_mixed_fields_rejected(self, K5, K2):
        with pytest.raises(FieldMismatchError):
            K5.one + K2.one
        assert K5.one != K2.one

    def test_coords_need_integrality(self, K5):
        assert K5.element(3, 4).coords == (3, 4)
        with pytest.raises(ValidationError):
            K5.element(Fraction(1, 2), 0).coords

    def test_fundamental_units(self):
        assert make_field("Q").fundamental_unit is None
        for d in (2, 3, 5, 13):
            eps = make_field(d).fundamental_unit
            assert eps.is_unit()
            assert abs(float(eps.embed_float()[0])) > 1

    @given(coords, coords, coords, coords, st.sampled_from(SUPPORTED))
    def test_norm_is_multiplicative(self, a, b, c, d, disc):
        F = make_field(disc)
        x, y = F.element(a, b), F.element(c, d)
        assert (x * y).norm() == x.norm() * y.norm()

    @given(coords, coords, st.sampled_from([2, 3, 5, 13]))
    def test_embedding_is_a_homomorphism(self, a, b, disc):
        F = make_field(disc)
        x = F.element(a, b)
        product = (x * x.conjugate()).embed_float()
        expected = x.embed_float()[0] * x.embed_float()[1]
        assert np.allclose(product, expected, rtol=1e-12, atol=1e-9)


class TestEuclid:
    """Extended Euclidean algorithm and row completion."""

    @settings(max_examples=60)
    @given(coords, coords, coords, coords, st.sampled_from(SUPPORTED))
    def test_bezout_identity(self, a, b, c, d, disc):
        F = make_field(disc)
        x, y = F.element(a, b), F.element(c, d)
        if x.is_zero() and y.is_zero():
            return
        g, s, t = euclid_gcd(F, x, y)
        assert s * x + t * y == g
        assert (x / g).is_integral() and (y / g).is_integral()

    def test_zero_pair_rejected(self, K5):
        with pytest.raises(ValidationError):
            euclid_gcd(K5, K5.zero, K5.zero)

    def test_complete_row_normalization(self, K5):
        c, d = K5.element(2, 1), K5.element(3, 0)
        M = complete_row(K5, c, d)
        assert M.bottom_row == (c, d)
        ratio = M.a / c
        assert 0 <= ratio.a < 1 and 0 <= ratio.b < 1

    def test_complete_row_with_zero_c(self, K5):
        d = K5.omega
        M = complete_row(K5, K5.zero, d)
        assert M.a == 1 / d and M.b == 0

    def test_non_coprime_row(self, Q):
        with pytest.raises(ValidationError):
            complete_row(Q, Q.from_int(2), Q.from_int(4))

    def test_batch_gcd_matches_bezout(self, K5, rng):
        xa, xb, ya, yb = (rng.integers(-30, 31, size=200) for _ in range(4))
        ga, gb, sa, sb, ta, tb = batch_ext_gcd(K5, xa, xb, ya, yb)
        left = batch_multiply(K5, sa, sb, xa, xb)
        right = batch_multiply(K5, ta, tb, ya, yb)
        assert np.array_equal(left[0] + right[0], ga)
        assert np.array_equal(left[1] + right[1], gb)

    def test_batch_norms_over_q(self, Q):
        x = np.array([-3, 2, 5])
        assert np.array_equal(batch_norm(Q, x, np.zeros_like(x)), x)
        assert np.array_equal(batch_conj_product(Q, x, np.zeros_like(x)), x * x)

    def test_integers_in_box(self, K5):
        a, b = K5.integers_in_box(3.0)
        emb = np.abs(a[:, None] + b[:, None] * K5.sigma_float[None, :])
        assert np.all(emb <= 3.0 + 1e-9)
        order = np.lexsort((b, a))
        assert np.array_equal(order, np.arange(a.shape[0]))
        assert ((a == 1) & (b == 1)).any()


class TestSL2Matrix:
    """The Hilbert modular group."""

    def test_determinant_enforced(self, Q):
        with pytest.raises(DeterminantError):
            SL2Matrix(Q.from_int(1), Q.from_int(1), Q.from_int(1), Q.from_int(1))

    def test_entries_must_be_integral(self, Q):
        half = Q.element(Fraction(1, 2))
        with pytest.raises(ValidationError):
            SL2Matrix(half, Q.zero, Q.zero, Q.from_int(2))

    def test_group_laws(self, K5):
        S = SL2Matrix.S(K5)
        T = SL2Matrix.T(K5, K5.omega)
        assert S @ S @ S @ S == SL2Matrix.identity(K5)
        assert T @ T.inverse() == SL2Matrix.identity(K5)
        assert T.is_translation() and not S.is_translation()

    def test_translation_generators(self, Q, K5):
        assert len(translation_generators(Q)) == 1
        gens = translation_generators(K5)
        assert [g.b for g in gens] == [K5.one, K5.omega]

    def test_embedded_shape(self, K5):
        emb = SL2Matrix.S(K5).embedded()
        assert emb.shape == (4, 2)
        assert np.array_equal(emb[1], [-1.0, -1.0])
