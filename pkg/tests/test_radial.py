import random

import pytest

from kahlerlap.fit import LaplacePolynomial, check_delta_property
from kahlerlap.jets import ValidityError
from kahlerlap.metric import metric_from_potential
from kahlerlap.radial import (
    c_constant,
    c_constant_at,
    named_profile,
    normalize,
    potential_jet,
    profile_from_coeffs,
    psi_functions,
    radial_pk,
    recursion_step,
)
from kahlerlap.rationals import Q
from kahlerlap.series import TSeries


class TestProfiles:
    def test_normalize_scales_argument(self):
        p = profile_from_coeffs([0, 2], order=4)
        q = normalize(p)
        assert q.series.coeffs[1] == 1 and q.normalized

    def test_normalize_fixed_point(self):
        p = named_profile("fubini-study", 4)
        assert normalize(p) is p

    def test_negative_slope_rejected(self):
        with pytest.raises(ValueError):
            profile_from_coeffs([0, -1])

    def test_normalize_keeps_rationality(self):
        p = profile_from_coeffs([0, 3, 1], order=3)
        q = normalize(p)
        assert q.series.coeffs[2] == Q(1, 9)


class TestPsiFunctions:
    def test_fubini_study(self):
        psi1, psi2 = psi_functions(named_profile("fubini-study", 5))
        # 1/Phi' = 1 + t, psi2 = -(1 + t)
        assert psi1.coeffs[:3] == (1, 1, 0)
        assert psi2.coeffs[:3] == (-1, -1, 0)

    def test_hyperbolic(self):
        psi1, psi2 = psi_functions(named_profile("hyperbolic", 5))
        assert psi1.coeffs[:3] == (1, -1, 0)
        assert psi2.coeffs[:3] == (1, -1, 0)

    def test_flat(self):
        psi1, psi2 = psi_functions(named_profile("flat", 5))
        assert all(c == 0 for c in psi2.coeffs)
        assert psi1.coeffs[0] == 1 and all(c == 0 for c in psi1.coeffs[1:])

    def test_requires_normalized(self):
        with pytest.raises(ValueError):
            psi_functions(profile_from_coeffs([0, 2], order=4))


class TestCConstants:
    def test_vanishing_triangle(self):
        rng = random.Random(11)
        for _ in range(5):
            psi = TSeries([Q(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(5)])
            for l in range(0, 5):
                for p in range(l + 1, 5):
                    for n in (1, 2):
                        assert c_constant(psi, p, l, n) == 0

    def test_fs_examples(self):
        psi1, psi2 = psi_functions(named_profile("fubini-study", 6))
        assert c_constant(psi2, 1, 1, 1) == -1
        assert c_constant(psi1, 1, 2, 1) == 4
        assert c_constant(psi1, 0, 1, 1) == 1

    def test_unit_diagonal(self):
        for name in ("fubini-study", "hyperbolic", "flat"):
            psi1, _ = psi_functions(named_profile(name, 6))
            for h in range(1, 5):
                assert c_constant(psi1, h, h, 3) == 1

    def test_depends_on_dimension(self):
        psi = TSeries([0, 1, 0, 0, 0])  # psi = t
        assert c_constant(psi, 1, 2, 1) != c_constant(psi, 1, 2, 2)

    def test_p_independence(self):
        reps = {
            1: [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
            2: [(2, 0, 0), (1, 1, 0), (0, 1, 1)],
            3: [(3, 0, 0), (2, 1, 0), (1, 1, 1)],
            4: [(4, 0, 0), (2, 2, 0), (2, 1, 1)],
        }
        rng = random.Random(7)
        series = [
            psi_functions(named_profile("fubini-study", 6))[0],
            psi_functions(named_profile("hyperbolic", 6))[1],
            TSeries([Q(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(5)]),
        ]
        for psi in series:
            for p, plist in reps.items():
                for l in range(p, 5):
                    values = {c_constant_at(psi, P, l, 3) for P in plist}
                    assert len(values) == 1

    def test_insufficient_order(self):
        with pytest.raises(ValidityError):
            c_constant(TSeries([1, 1]), 1, 3, 1)


class TestRecursion:
    def test_flat_shifts(self):
        prof = named_profile("flat", 6)
        p2 = recursion_step(LaplacePolynomial(1, (Q(1),)), prof, 2)
        assert p2 == LaplacePolynomial(2, (Q(0), Q(1)))

    def test_fs_quadratic_step(self):
        prof = named_profile("fubini-study", 6)
        p2 = recursion_step(LaplacePolynomial(1, (Q(1),)), prof, 1)
        assert p2 == LaplacePolynomial(2, (Q(2), Q(1)))

    def test_fs_cubic(self):
        polys = radial_pk(named_profile("fubini-study", 6), 1, 3)
        assert str(polys[2]) == "x^3 + 10*x^2 + 8*x"

    def test_hyperbolic_quadratic(self):
        polys = radial_pk(named_profile("hyperbolic", 6), 1, 2)
        assert str(polys[1]) == "x^2 - 2*x"

    def test_monic_preserved(self):
        polys = radial_pk(profile_from_coeffs([0, 1, Q(1, 2)], order=8), 2, 4)
        for p in polys:
            assert p.coefficient(p.k) == 1

    def test_order_guard(self):
        with pytest.raises(ValidityError):
            radial_pk(profile_from_coeffs([0, 1], order=2), 1, 4)


CORPUS = [
    ("fubini-study", None),
    ("hyperbolic", None),
    ("flat", None),
    (None, [0, 1, Q(1, 2)]),
    (None, [0, 1, 0, Q(-1, 6)]),
]


class TestOracleEquivalence:
    @pytest.mark.parametrize("name,coeffs", CORPUS)
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_recursion_matches_direct_fit(self, name, coeffs, n):
        k_max = 4
        order = 6
        profile = (
            named_profile(name, order)
            if name
            else profile_from_coeffs(coeffs, order=order)
        )
        polys = radial_pk(profile, n, k_max)
        metric = metric_from_potential(potential_jet(profile, n, 2 * k_max))
        fits = check_delta_property(metric, k_max)
        assert len(fits) == k_max
        for fit, poly in zip(fits, polys):
            assert fit.fitted, f"radial fit must succeed at k={fit.k}"
            assert fit.polynomial == poly

    def test_off_diagonal_annihilation(self):
        from kahlerlap.fit import _raw_value

        prof = profile_from_coeffs([0, 1, Q(1, 2)], order=4)
        m = metric_from_potential(potential_jet(prof, 2, 8))
        for P, Q_ in [((1, 0), (0, 1)), ((2, 0), (1, 1)), ((2, 1), (1, 0)),
                      ((3, 1), (2, 0))]:
            for k in range(1, 5):
                assert _raw_value(m, P, Q_, k) == 0
