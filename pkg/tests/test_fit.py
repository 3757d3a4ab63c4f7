import random

import pytest

from kahlerlap.fit import (
    FitResult,
    LaplacePolynomial,
    RescaleError,
    check_delta_property,
    fit_pk,
    monomial_test_set,
    rescaled_value,
    verify_witness,
)
from kahlerlap.jets import Jet, multiindices_upto, substitute_radial
from kahlerlap.metric import (
    TruncationError,
    delta_power_at0,
    euclidean_power_at0,
    metric_from_potential,
)
from kahlerlap.radial import named_profile
from kahlerlap.rationals import Q
from kahlerlap.series import TSeries


def radial_metric(name, n, D):
    prof = named_profile(name, (D + 1) // 2)
    return metric_from_potential(substitute_radial(prof.series, n, D))


class TestTestSet:
    def test_n1_k1_enumeration(self):
        got = monomial_test_set(1, 1)
        assert set(got) == {
            ((0,), (0,)), ((1,), (0,)), ((0,), (1,)), ((1,), (1,)),
            ((2,), (0,)), ((0,), (2,)),
        }
        degrees = [sum(P) + sum(Q_) for P, Q_ in got]
        assert degrees == sorted(degrees)

    def test_n2_k1_count(self):
        assert len(monomial_test_set(2, 1)) == 15

    def test_k0_rejected(self):
        with pytest.raises(ValueError):
            monomial_test_set(1, 0)

    def test_graded_lex_deterministic(self):
        assert monomial_test_set(2, 2) == monomial_test_set(2, 2)


class TestRescaledValue:
    def test_unit_gauge_identity(self):
        m = radial_metric("fubini-study", 1, 6)
        assert rescaled_value(m, (2,), (2,), 3) == delta_power_at0(
            m, Jet.monomial(1, (2,), (2,), 1, 6), 3
        )

    def test_doubled_fubini_study(self):
        # potential 2 log(1+t): origin diagonal 2, rescaled first value is 1
        prof = named_profile("fubini-study", 3)
        m = metric_from_potential(
            substitute_radial(prof.series.scale(2), 1, 6)
        )
        assert m.origin_diag == (2,)
        assert rescaled_value(m, (1,), (1,), 1) == 1

    def test_scaled_flat(self):
        phi = substitute_radial(TSeries([0, 4], order=3), 1, 6)
        m = metric_from_potential(phi)
        raw = delta_power_at0(m, Jet.monomial(1, (1,), (1,), 1, 6), 1)
        assert raw == Q(1, 4)
        assert rescaled_value(m, (1,), (1,), 1) == 4 * raw == 1

    def test_irrational_rescale_raises_only_when_nonzero(self):
        # doubled flat line with a cubic term: lap^2(z^2 zb)(0) = -1/2 != 0,
        # and the (3,0) exponent sum over d = 2 has no rational rescale
        phi = substitute_radial(TSeries([0, 2], order=3), 1, 6) + Jet.monomial(
            1, (2,), (1,), 1, 6
        ) + Jet.monomial(1, (1,), (2,), 1, 6)
        m = metric_from_potential(phi)
        assert rescaled_value(m, (1,), (0,), 1) == 0
        from kahlerlap.fit import _raw_value

        assert _raw_value(m, (2,), (1,), 2) == Q(-1, 2)
        with pytest.raises(RescaleError):
            rescaled_value(m, (2,), (1,), 2)


class TestFit:
    def test_flat_c2_is_pure_power(self):
        m = radial_metric("flat", 2, 6)
        r = fit_pk(m, 3)
        assert r.fitted
        assert r.polynomial == LaplacePolynomial(3, (Q(0), Q(0), Q(1)))

    def test_fs_quadratic(self):
        m = radial_metric("fubini-study", 1, 6)
        r = fit_pk(m, 2)
        assert r.fitted and r.polynomial == LaplacePolynomial(2, (Q(2), Q(1)))

    def test_fitted_polynomials_monic_zero_constant(self):
        m = radial_metric("hyperbolic", 2, 8)
        for r in check_delta_property(m, 4):
            assert r.fitted
            assert r.polynomial.coefficient(r.k) == 1
            assert r.polynomial.coefficient(0) == 0

    def test_truncation_guard(self):
        m = radial_metric("fubini-study", 1, 4)
        with pytest.raises(TruncationError):
            fit_pk(m, 3)

    def test_fit_result_exactly_one_variant(self):
        with pytest.raises(ValueError):
            FitResult(k=1)


class TestKnownPolynomials:
    def test_cp1_sequence(self):
        m = radial_metric("fubini-study", 1, 6)
        res = check_delta_property(m, 3)
        assert [str(r.polynomial) for r in res] == [
            "x", "x^2 + 2*x", "x^3 + 10*x^2 + 8*x",
        ]

    def test_cp2_sequence(self):
        m = radial_metric("fubini-study", 2, 6)
        res = check_delta_property(m, 3)
        assert str(res[1].polynomial) == "x^2 + 3*x"
        assert str(res[2].polynomial) == "x^3 + 13*x^2 + 15*x"

    def test_ch1_sequence(self):
        m = radial_metric("hyperbolic", 1, 6)
        res = check_delta_property(m, 3)
        assert [str(r.polynomial) for r in res] == [
            "x", "x^2 - 2*x", "x^3 - 10*x^2 + 8*x",
        ]


class TestViolations:
    def test_grassmannian_24(self, spaces):
        m = spaces("grassmannian:k=2,N=4").metric
        res = check_delta_property(m, 3)
        assert [r.fitted for r in res] == [True, True, False]
        w = res[2].witness
        assert w.kind == "diagonal_inconsistent"
        # the two unitary orbits of degree-4 diagonal monomials disagree:
        # single-entry directions give 64 = 12 lam + 16, transversal pairs 24 = 6 lam
        assert w.P == w.Q == (0, 1, 1, 0)
        assert w.lhs == 24 and w.expected == 32
        assert verify_witness(m, 3, w)

    def test_cp1xcp1_product_fails_k3(self, spaces):
        m = spaces("product(cp:n=1;cp:n=1)").metric
        res = check_delta_property(m, 3)
        assert [r.fitted for r in res] == [True, True, False]
        w = res[2].witness
        assert w.P == w.Q == (1, 1) and w.lhs == 12 and w.expected == 20
        assert verify_witness(m, 3, w)

    def test_sp2_passes_k2_fails_k3(self, spaces):
        m = spaces("sp:N=2").metric
        res = check_delta_property(m, 3)
        assert [r.fitted for r in res] == [True, True, False]
        assert str(res[1].polynomial) == "x^2 + 3*x"
        assert verify_witness(m, 3, res[2].witness)

    def test_stops_after_first_violation(self, spaces):
        m = spaces("grassmannian:k=2,N=4").metric
        res = check_delta_property(m, 3)
        assert len(res) == 3 and not res[-1].fitted

    def test_determinism(self, spaces):
        m = spaces("grassmannian:k=2,N=4").metric
        assert fit_pk(m, 3) == fit_pk(m, 3)


class TestRandomPolynomialIdentity:
    def _random_jet(self, rng, n, deg, D):
        keys = [
            (P, Q_)
            for P in multiindices_upto(n, deg)
            for Q_ in multiindices_upto(n, deg)
            if sum(P) + sum(Q_) <= deg
        ]
        coeffs = {}
        for key in rng.sample(keys, k=min(8, len(keys))):
            coeffs[key] = Q(rng.randint(-9, 9), rng.randint(1, 5))
        return Jet(n, coeffs, D)

    def test_fitted_polynomial_holds_for_random_functions(self):
        rng = random.Random(20260810)
        m = radial_metric("fubini-study", 2, 6)
        fits = {r.k: r.polynomial for r in check_delta_property(m, 3)}
        for _ in range(200):
            phi = self._random_jet(rng, 2, 6, 6)
            for k in (1, 2, 3):
                lhs = delta_power_at0(m, phi, k)
                rhs = sum(
                    fits[k].coefficient(l) * euclidean_power_at0(phi, l)
                    for l in range(1, k + 1)
                )
                assert lhs == rhs

    def test_weighted_identity_on_rescaled_gauge(self, spaces):
        # mixed origin diagonal: the identity holds with 1/d-weighted
        # Euclidean powers
        from kahlerlap.metric import _weighted_euclidean_at0

        rng = random.Random(4)
        m = spaces("sp:N=2").metric
        fits = {r.k: r.polynomial for r in check_delta_property(m, 2)}
        for _ in range(50):
            phi = self._random_jet(rng, 3, 4, 6)
            for k in (1, 2):
                lhs = delta_power_at0(m, phi, k)
                rhs = sum(
                    fits[k].coefficient(l)
                    * _weighted_euclidean_at0(phi, l, m.origin_diag)
                    for l in range(1, k + 1)
                )
                assert lhs == rhs
