"""Radial metrics: psi-series, the C constants, and the polynomial recursion.

For a potential Phi(t), t = |z|^2, the inverse metric is

    ginv[i][j] = (1/Phi')(delta_ij - Phi''/(Phi' + t Phi'') z_j zb_i),

so applying the Laplacian to |z^P|^2 only involves the two radial series

    psi1 = 1/Phi'        psi2 = Phi'' / (Phi' (Phi' + t Phi'')).

With C^psi_{p,l} defined by (lap_c)^l (|z^P|^2 psi(t))(0) = C^psi_{p,l} p! P!
(depending on psi, p = |P|, l, and the dimension only), the monic polynomials
p_k satisfy, for a profile normalized to Phi'(0) = 1:

    a_{k+1,p} = a_{k,p-1} + sum_{l=p}^{k} a_{k,l} (C^psi1_{p-1,l}
                                                   - p^2 C^psi2_{p,l}),

with a_{k,0} = 0 and a_{k,l} = 0 for l > k.  This produces p_1..p_kmax
without ever applying the Kahler Laplacian, giving a computation path
independent of the direct fit.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from .fit import LaplacePolynomial
from .jets import Jet, ValidityError, mi_factorial, multiindices, substitute_radial
from .rationals import Q, ZERO, as_q
from .series import TSeries


@dataclass(frozen=True)
class RadialProfile:
    """Taylor data of Phi(t); normalized means Phi'(0) = 1."""

    series: TSeries

    def __post_init__(self):
        if self.series.order < 1:
            raise ValidityError("profile needs at least the t^1 coefficient")
        if self.series.coeffs[1] <= 0:
            raise ValueError(f"Phi'(0) = {self.series.coeffs[1]} must be positive")

    @property
    def order(self):
        return self.series.order

    @property
    def normalized(self):
        return self.series.coeffs[1] == 1


def profile_from_coeffs(coeffs, order=None) -> RadialProfile:
    """Profile from Taylor coefficients of Phi (constant term first).

    A finite coefficient list is an exact polynomial; order (default: the
    list length minus one) may extend it with zeros.
    """
    coeffs = [as_q(c) for c in coeffs]
    if order is not None and order + 1 > len(coeffs):
        coeffs.extend([ZERO] * (order + 1 - len(coeffs)))
    return RadialProfile(TSeries(coeffs))


def named_profile(name, order) -> RadialProfile:
    """Built-in profiles: flat, fubini-study (log(1+t)), hyperbolic (-log(1-t))."""
    if name == "flat":
        return profile_from_coeffs([0, 1], order=order)
    if name == "fubini-study":
        coeffs = [ZERO] + [Q((-1) ** (m + 1), m) for m in range(1, order + 1)]
        return RadialProfile(TSeries(coeffs))
    if name == "hyperbolic":
        coeffs = [ZERO] + [Q(1, m) for m in range(1, order + 1)]
        return RadialProfile(TSeries(coeffs))
    raise ValueError(f"unknown profile name: {name!r}")


def normalize(profile: RadialProfile) -> RadialProfile:
    """Rescale t so that Phi'(0) = 1 (rational substitution t -> t/Phi'(0))."""
    c = profile.series.coeffs[1]
    if c == 1:
        return profile
    return RadialProfile(profile.series.rescale_argument(Q(1) / c))


def psi_functions(profile: RadialProfile):
    """(psi1, psi2) = (1/Phi', Phi''/(Phi'(Phi' + t Phi''))) as t-series."""
    if not profile.normalized:
        raise ValueError("profile must be normalized (Phi'(0) = 1)")
    d1 = profile.series.derivative()
    d2 = d1.derivative()
    denom = d1.truncate(d2.order) + d2.multiply_by_t()
    if denom.constant_term() == 0:
        raise ValueError("Phi' + t Phi'' vanishes at t = 0")
    psi1 = d1.reciprocal()
    psi2 = d2 * d1.reciprocal().truncate(d2.order) * denom.reciprocal()
    return psi1, psi2


_C_CACHE: dict = {}


def c_constant(psi: TSeries, p, l, n):
    """C^psi_{p,l} from the jet engine: build |z^P|^2 psi(t) for
    P = (p, 0, .., 0), apply lap_c l times, evaluate at 0, divide by p! P!.

    The result depends on the representative P only through |P| (a tested
    property, not an assumption here).
    """
    if p < 0 or l < 0:
        raise ValueError("p and l must be >= 0")
    if psi.order < l:
        raise ValidityError(
            f"psi trusted to t^{psi.order}, need t^{l} for l={l}"
        )
    key = (psi.coeffs[: l + 1], p, l, n)
    got = _C_CACHE.get(key)
    if got is not None:
        return got
    P = (p,) + (0,) * (n - 1)
    value = c_constant_at(psi, P, l, n)
    _C_CACHE[key] = value
    return value


def c_constant_at(psi: TSeries, P, l, n):
    """(lap_c)^l (|z^P|^2 psi)(0) / (p! P!) for an explicit representative P.

    The jet of |z^P|^2 psi(t) is built directly, truncated at degree 2l
    (higher terms cannot reach the origin value), so representatives with
    p > l give an empty jet and the value 0.
    """
    P = tuple(P)
    p = sum(P)
    coeffs = {}
    for m in range(0, min(psi.order, l - p) + 1):
        a = psi.coeffs[m]
        if a == 0:
            continue
        fm = factorial(m)
        for A in multiindices(n, m):
            key = tuple(x + y for x, y in zip(A, P))
            coeffs[(key, key)] = a * Q(fm, mi_factorial(A))
    jet = Jet(n, coeffs, 2 * l)
    for _ in range(l):
        nxt = Jet.zero(n, jet.valid_degree - 2)
        for i in range(n):
            nxt = nxt + jet.dz(i).dzbar(i)
        jet = nxt
    return jet.eval0() / Q(factorial(p) * mi_factorial(P))


def recursion_step(
    a_k: LaplacePolynomial, profile: RadialProfile, n
) -> LaplacePolynomial:
    """One step k -> k+1 of the recursion in the module docstring."""
    profile = normalize(profile)
    psi1, psi2 = psi_functions(profile)
    k = a_k.k
    if psi1.order < k or psi2.order < k:
        raise ValidityError(
            f"profile order {profile.order} insufficient for step to k={k + 1}"
        )
    new = []
    for p in range(1, k + 2):
        val = a_k.coefficient(p - 1)
        for l in range(p, k + 1):
            val += a_k.coefficient(l) * (
                c_constant(psi1, p - 1, l, n)
                - p * p * c_constant(psi2, p, l, n)
            )
        new.append(val)
    return LaplacePolynomial(k=k + 1, coeffs=tuple(new))


def radial_pk(profile: RadialProfile, n, k_max):
    """p_1..p_kmax by iterating the recursion from p_1 = x."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    profile = normalize(profile)
    polys = [LaplacePolynomial(k=1, coeffs=(Q(1),))]
    while len(polys) < k_max:
        polys.append(recursion_step(polys[-1], profile, n))
    return polys


def potential_jet(profile: RadialProfile, n, valid_degree) -> Jet:
    """The radial potential as a jet in n variables (no normalization)."""
    return substitute_radial(profile.series, n, valid_degree)
