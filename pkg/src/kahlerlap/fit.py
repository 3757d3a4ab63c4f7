"""Fit of the origin identity lap^k phi(0) = p_k(lap_c) phi(0).

Both sides are linear in the derivatives of phi at the origin of total
degree <= 2k, so checking all monomials z^P zb^Q with |P|+|Q| <= 2k decides
the identity for every smooth phi.  The fit works on values rescaled to unit
gauge (multiplying by prod d_i^{(P_i+Q_i)/2}), which keeps the arithmetic
rational without changing coordinates.

Outcomes are witness-first: the first monomial (in graded lexicographic
order) whose value is inconsistent is returned with the discrepancy, which
makes every failure reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from .jets import mi_factorial, multiindices, weight
from .metric import MetricJet, TruncationError, _laplacian_functional
from .rationals import Q, ZERO


class RescaleError(ValueError):
    """Value-level rescaling would be irrational and the value is nonzero."""


@dataclass(frozen=True)
class LaplacePolynomial:
    """Monic degree-k polynomial sum_{l=1..k} a_l x^l with zero constant term."""

    k: int
    coeffs: tuple  # a_1 .. a_k

    def __post_init__(self):
        if self.k < 1 or len(self.coeffs) != self.k:
            raise ValueError("need coefficients a_1..a_k")
        if self.coeffs[-1] != 1:
            raise ValueError("polynomial must be monic")

    def coefficient(self, l):
        if 1 <= l <= self.k:
            return self.coeffs[l - 1]
        return ZERO

    def __str__(self):
        parts = []
        for l in range(self.k, 0, -1):
            a = self.coeffs[l - 1]
            if a == 0:
                continue
            mag = abs(a)
            xs = "x" if l == 1 else f"x^{l}"
            body = xs if mag == 1 else f"{mag}*{xs}"
            parts.append(("-" if a < 0 else "+", body))
        if not parts:
            return "0"
        sign0, body0 = parts[0]
        text = body0 if sign0 == "+" else f"-{body0}"
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


@dataclass(frozen=True)
class ViolationWitness:
    """A concrete monomial whose lap^k value breaks the polynomial identity."""

    P: tuple
    Q: tuple
    kind: str  # off_diagonal_nonzero | diagonal_inconsistent | non_monic
    lhs: object
    expected: object


@dataclass(frozen=True)
class FitResult:
    k: int
    polynomial: LaplacePolynomial | None = None
    witness: ViolationWitness | None = None

    def __post_init__(self):
        if (self.polynomial is None) == (self.witness is None):
            raise ValueError("exactly one of polynomial/witness must be set")

    @property
    def fitted(self):
        return self.witness is None


def monomial_test_set(n, k):
    """All pairs (P, Q) with |P| + |Q| <= 2k in graded lexicographic order.

    Sufficient: lap^k(.)(0) and p_k(lap_c)(.)(0) are both linear functionals
    reading only derivatives of order <= 2k at the origin.
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    by_degree = [list(multiindices(n, t)) for t in range(2 * k + 1)]
    pairs = []
    for dp in range(2 * k + 1):
        for dq in range(2 * k + 1 - dp):
            for P in by_degree[dp]:
                for Q_ in by_degree[dq]:
                    pairs.append((P, Q_))
    pairs.sort(key=lambda pq: (weight(pq[0]) + weight(pq[1]), pq[0], pq[1]))
    return pairs


def _raw_value(m: MetricJet, P, Q_, k):
    """lap^k(z^P zb^Q)(0) via the cached functional table."""
    if m.potential.valid_degree < 2 * k:
        raise TruncationError(
            f"potential valid_degree {m.potential.valid_degree} < {2 * k}",
            required=2 * k,
        )
    return _laplacian_functional(m, k).get((tuple(P), tuple(Q_)), ZERO)


def rescaled_value(m: MetricJet, P, Q_, k):
    """lap^k value on the monomial, rescaled to unit gauge.

    Multiplies by prod d_i^{(P_i+Q_i)/2}.  Zero values need no rescaling;
    a nonzero value whose rescale exponents are half-integral over a d_i != 1
    has no rational rescaled form and raises.
    """
    v = _raw_value(m, P, Q_, k)
    if v == 0:
        return ZERO
    factor = Q(1)
    for i in range(m.n):
        e = P[i] + Q_[i]
        d = m.origin_diag[i]
        if d == 1:
            continue
        if e % 2:
            raise RescaleError(
                f"monomial P={P}, Q={Q_} rescales by an irrational factor "
                f"and has nonzero value {v}"
            )
        factor *= d ** (e // 2)
    return v * factor


def fit_pk(m: MetricJet, k) -> FitResult:
    """Fit the monic order-k polynomial over the degree <= 2k monomial set,
    or return the first violation in enumeration order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if m.potential.valid_degree < 2 * k:
        raise TruncationError(
            f"potential valid_degree {m.potential.valid_degree} < {2 * k} "
            f"needed for the order-{k} fit",
            required=2 * k,
        )
    table = _laplacian_functional(m, k)
    candidates = {}
    for P, Q_ in monomial_test_set(m.n, k):
        if P != Q_:
            v = table.get((P, Q_), ZERO)
            if v != 0:
                return FitResult(
                    k=k,
                    witness=ViolationWitness(
                        P=P, Q=Q_, kind="off_diagonal_nonzero", lhs=v,
                        expected=ZERO,
                    ),
                )
            continue
        p = weight(P)
        if p == 0:
            # lap^k annihilates constants, so the fitted constant term is zero
            continue
        v = rescaled_value(m, P, Q_, k)
        norm = Q(factorial(p) * mi_factorial(P))
        ratio = v / norm
        if p not in candidates:
            if p == k and ratio != 1:
                return FitResult(
                    k=k,
                    witness=ViolationWitness(
                        P=P, Q=Q_, kind="non_monic", lhs=v, expected=norm,
                    ),
                )
            candidates[p] = ratio
        elif ratio != candidates[p]:
            return FitResult(
                k=k,
                witness=ViolationWitness(
                    P=P, Q=Q_, kind="diagonal_inconsistent", lhs=v,
                    expected=candidates[p] * norm,
                ),
            )
    coeffs = tuple(candidates[p] for p in range(1, k + 1))
    return FitResult(k=k, polynomial=LaplacePolynomial(k=k, coeffs=coeffs))


def check_delta_property(m: MetricJet, k_max):
    """FitResults for k = 1..k_max, stopping after the first violation."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if m.potential.valid_degree < 2 * k_max:
        raise TruncationError(
            f"potential valid_degree {m.potential.valid_degree} < "
            f"{2 * k_max} needed for k_max={k_max}",
            required=2 * k_max,
        )
    results = []
    for k in range(1, k_max + 1):
        r = fit_pk(m, k)
        results.append(r)
        if not r.fitted:
            break
    return results


def verify_witness(m: MetricJet, k, w: ViolationWitness) -> bool:
    """Re-evaluate a witness: the stated lhs must reproduce and still differ
    from the stated expectation."""
    if w.kind == "off_diagonal_nonzero":
        lhs = _raw_value(m, w.P, w.Q, k)
    else:
        lhs = rescaled_value(m, w.P, w.Q, k)
    return lhs == w.lhs and lhs != w.expected
