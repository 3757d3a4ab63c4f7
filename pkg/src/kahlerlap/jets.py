"""Exact truncated power series in paired variables z_1..z_n, zb_1..zb_n.

A Jet is a finite sparse map (P, Q) -> rational coefficient for monomials
z^P * zb^Q, together with valid_degree: the total degree |P|+|Q| through
which the coefficients are trusted.  Validity is data, not convention; every
operation computes the validity of its result (min rule for products, minus
one per derivative), and using a jet past its validity raises.

Coefficients are exact rationals.  Zero coefficients are never stored, so
jet equality is map equality.  Jets are immutable values: no operation
mutates its operands, which makes everything safe to evaluate concurrently.
"""

from __future__ import annotations

import itertools
from math import factorial

from .rationals import Q, ZERO, as_q
from .series import TSeries


class JetError(ValueError):
    pass


class ValidityError(JetError):
    """Degree overflow, exhausted validity, or insufficient series order."""


class DimensionMismatch(JetError):
    pass


class NonInvertibleError(JetError):
    """Reciprocal or matrix inverse with a non-invertible constant term."""


def weight(exponents) -> int:
    return sum(exponents)


def mi_factorial(exponents):
    out = 1
    for e in exponents:
        out *= factorial(e)
    return out


def multiindices(n, total):
    """All exponent vectors of length n with entries summing to total."""
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in multiindices(n - 1, total - first):
            yield (first,) + rest


def multiindices_upto(n, max_total):
    for total in range(max_total + 1):
        yield from multiindices(n, total)


class Jet:
    __slots__ = ("n", "coeffs", "valid_degree")

    def __init__(self, n, coeffs, valid_degree):
        if n < 1:
            raise DimensionMismatch("need at least one variable")
        if valid_degree < 0:
            raise ValidityError("valid_degree must be >= 0")
        clean = {}
        for (P, Q_), c in coeffs.items():
            if c == 0:
                continue
            if len(P) != n or len(Q_) != n:
                raise DimensionMismatch("exponent vector length != n")
            if min(P) < 0 or min(Q_) < 0:
                raise JetError("negative exponent")
            if weight(P) + weight(Q_) > valid_degree:
                raise ValidityError(
                    f"monomial of degree {weight(P) + weight(Q_)} exceeds "
                    f"valid_degree {valid_degree}"
                )
            clean[(P, Q_)] = c
        self.n = n
        self.coeffs = clean
        self.valid_degree = valid_degree

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n, valid_degree):
        return cls(n, {}, valid_degree)

    @classmethod
    def constant(cls, n, c, valid_degree):
        zero_mi = (0,) * n
        return cls(n, {(zero_mi, zero_mi): as_q(c)}, valid_degree)

    @classmethod
    def monomial(cls, n, P, Q_, c, valid_degree):
        P, Q_ = tuple(P), tuple(Q_)
        if weight(P) + weight(Q_) > valid_degree:
            raise ValidityError(
                f"monomial degree {weight(P) + weight(Q_)} exceeds "
                f"valid_degree {valid_degree}"
            )
        return cls(n, {(P, Q_): as_q(c)}, valid_degree)

    @classmethod
    def variable(cls, n, i, valid_degree):
        """The coordinate z_i (0-based)."""
        P = tuple(1 if a == i else 0 for a in range(n))
        return cls.monomial(n, P, (0,) * n, 1, valid_degree)

    # -- basics ------------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Jet)
            and self.n == other.n
            and self.valid_degree == other.valid_degree
            and self.coeffs == other.coeffs
        )

    __hash__ = None

    def is_zero(self):
        return not self.coeffs

    def agrees_with(self, other, through_degree):
        """Coefficientwise equality of all monomials of total degree <= bound."""
        if self.n != other.n:
            return False
        if min(self.valid_degree, other.valid_degree) < through_degree:
            raise ValidityError("comparison beyond the validity of an operand")
        for key, c in self.coeffs.items():
            if weight(key[0]) + weight(key[1]) <= through_degree:
                if other.coeffs.get(key, ZERO) != c:
                    return False
        for key, c in other.coeffs.items():
            if weight(key[0]) + weight(key[1]) <= through_degree:
                if key not in self.coeffs:
                    return False
        return True

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            parts = []
            for (P, Q_), c in sorted(
                self.coeffs.items(),
                key=lambda kv: (weight(kv[0][0]) + weight(kv[0][1]), kv[0]),
            ):
                factors = []
                for i, e in enumerate(P):
                    if e:
                        factors.append(f"z{i + 1}" + (f"^{e}" if e > 1 else ""))
                for i, e in enumerate(Q_):
                    if e:
                        factors.append(f"zb{i + 1}" + (f"^{e}" if e > 1 else ""))
                mono = "*".join(factors)
                parts.append(f"{c}*{mono}" if mono else f"{c}")
            body = " + ".join(parts)
        return f"Jet({body}; D={self.valid_degree})"

    # -- ring operations ---------------------------------------------------

    def _check_same_space(self, other):
        if self.n != other.n:
            raise DimensionMismatch(
                f"variable counts differ: {self.n} vs {other.n}"
            )

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(self.n, other, self.valid_degree)
        self._check_same_space(other)
        D = min(self.valid_degree, other.valid_degree)
        out = {}
        for key, c in self.coeffs.items():
            if weight(key[0]) + weight(key[1]) <= D:
                out[key] = c
        for key, c in other.coeffs.items():
            if weight(key[0]) + weight(key[1]) > D:
                continue
            s = out.get(key, ZERO) + c
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        return Jet(self.n, out, D)

    __radd__ = __add__

    def __neg__(self):
        return Jet(
            self.n, {k: -c for k, c in self.coeffs.items()}, self.valid_degree
        )

    def __sub__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(self.n, other, self.valid_degree)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = as_q(c)
        if c == 0:
            return Jet.zero(self.n, self.valid_degree)
        return Jet(
            self.n, {k: c * v for k, v in self.coeffs.items()}, self.valid_degree
        )

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        self._check_same_space(other)
        D = min(self.valid_degree, other.valid_degree)
        # bucket the right factor by total degree so high-degree pairs are
        # skipped instead of computed and discarded
        buckets = {}
        for key, c in other.coeffs.items():
            buckets.setdefault(weight(key[0]) + weight(key[1]), []).append((key, c))
        out = {}
        for (P, Q_), a in self.coeffs.items():
            da = weight(P) + weight(Q_)
            if da > D:
                continue
            for db in range(0, D - da + 1):
                for (P2, Q2), b in buckets.get(db, ()):
                    key = (
                        tuple(x + y for x, y in zip(P, P2)),
                        tuple(x + y for x, y in zip(Q_, Q2)),
                    )
                    s = out.get(key, ZERO) + a * b
                    if s == 0:
                        out.pop(key, None)
                    else:
                        out[key] = s
        return Jet(self.n, out, D)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        return self.scale(Q(1) / as_q(c))

    # -- calculus ----------------------------------------------------------

    def dz(self, i):
        """Formal partial derivative with respect to z_i (0-based)."""
        if self.valid_degree == 0:
            raise ValidityError("validity exhausted: cannot differentiate")
        out = {}
        for (P, Q_), c in self.coeffs.items():
            e = P[i]
            if e:
                P2 = P[:i] + (e - 1,) + P[i + 1 :]
                out[(P2, Q_)] = c * e
        return Jet(self.n, out, self.valid_degree - 1)

    def dzbar(self, i):
        """Formal partial derivative with respect to conj(z_i) (0-based)."""
        if self.valid_degree == 0:
            raise ValidityError("validity exhausted: cannot differentiate")
        out = {}
        for (P, Q_), c in self.coeffs.items():
            e = Q_[i]
            if e:
                Q2 = Q_[:i] + (e - 1,) + Q_[i + 1 :]
                out[(P, Q2)] = c * e
        return Jet(self.n, out, self.valid_degree - 1)

    def eval0(self):
        """The constant-term coefficient (value at the origin)."""
        zero_mi = (0,) * self.n
        return self.coeffs.get((zero_mi, zero_mi), ZERO)

    def conj(self):
        """Complex conjugate: rational coefficients stay, exponent roles swap."""
        return Jet(
            self.n,
            {(Q_, P): c for (P, Q_), c in self.coeffs.items()},
            self.valid_degree,
        )

    def truncated(self, valid_degree):
        if valid_degree > self.valid_degree:
            raise ValidityError("cannot raise validity by truncation")
        out = {
            k: c
            for k, c in self.coeffs.items()
            if weight(k[0]) + weight(k[1]) <= valid_degree
        }
        return Jet(self.n, out, valid_degree)

    def reciprocal(self):
        """Jet r with self*r = 1 through valid_degree (nonzero constant term)."""
        c0 = self.eval0()
        if c0 == 0:
            raise NonInvertibleError("reciprocal of a jet with zero constant term")
        u = Jet.constant(self.n, 1, self.valid_degree) - self / c0
        acc = Jet.constant(self.n, 1, self.valid_degree)
        power = Jet.constant(self.n, 1, self.valid_degree)
        for _ in range(self.valid_degree):
            power = power * u
            if power.is_zero():
                break
            acc = acc + power
        return acc / c0


def log1p(s: Jet) -> Jet:
    """log(1 + s) for a jet s with zero constant term."""
    if s.eval0() != 0:
        raise JetError("log1p needs a zero constant term")
    acc = Jet.zero(s.n, s.valid_degree)
    power = Jet.constant(s.n, 1, s.valid_degree)
    for m in range(1, s.valid_degree + 1):
        power = power * s
        if power.is_zero():
            break
        acc = acc + power.scale(Q(-1 if m % 2 == 0 else 1, m))
    return acc


def substitute_radial(f: TSeries, n, valid_degree) -> Jet:
    """The jet f(|z_1|^2 + ... + |z_n|^2) truncated at the given degree.

    f must be trusted through t^ceil(D/2); monomials of t^m are spread over
    exponent vectors A with |A| = m with multinomial weights.
    """
    need = (valid_degree + 1) // 2
    if f.order < need:
        raise ValidityError(
            f"series order {f.order} insufficient: need t^{need} for degree "
            f"{valid_degree}"
        )
    coeffs = {}
    for m in range(0, min(f.order, valid_degree // 2) + 1):
        a = f.coeffs[m]
        if a == 0:
            continue
        fm = factorial(m)
        for A in multiindices(n, m):
            coeffs[(A, A)] = a * Q(fm, mi_factorial(A))
    return Jet(n, coeffs, valid_degree)


class JetMatrix:
    """Rectangular matrix of jets sharing n and a common valid_degree.

    Construction truncates all entries to the minimum validity present, so
    the uniform-validity invariant holds by normalization.
    """

    __slots__ = ("rows", "cols", "n", "valid_degree", "entries")

    def __init__(self, entries):
        entries = tuple(tuple(row) for row in entries)
        if not entries or not entries[0]:
            raise DimensionMismatch("empty matrix")
        rows = len(entries)
        cols = len(entries[0])
        if any(len(row) != cols for row in entries):
            raise DimensionMismatch("ragged rows")
        n = entries[0][0].n
        if any(e.n != n for row in entries for e in row):
            raise DimensionMismatch("entries live in different variable spaces")
        D = min(e.valid_degree for row in entries for e in row)
        entries = tuple(
            tuple(e if e.valid_degree == D else e.truncated(D) for e in row)
            for row in entries
        )
        self.rows = rows
        self.cols = cols
        self.n = n
        self.valid_degree = D
        self.entries = entries

    @classmethod
    def identity(cls, n, size, valid_degree):
        return cls(
            [
                [
                    Jet.constant(n, 1 if i == j else 0, valid_degree)
                    for j in range(size)
                ]
                for i in range(size)
            ]
        )

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other):
        return (
            isinstance(other, JetMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    __hash__ = None

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shape mismatch in matrix sum")
        return JetMatrix(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shape mismatch in matrix difference")
        return JetMatrix(
            [
                [self.entries[i][j] - other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __neg__(self):
        return JetMatrix([[-e for e in row] for row in self.entries])

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise DimensionMismatch("shape mismatch in matrix product")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = self.entries[i][0] * other.entries[0][j]
                for k in range(1, self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return JetMatrix(out)

    def transpose(self):
        return JetMatrix(
            [
                [self.entries[i][j] for i in range(self.rows)]
                for j in range(self.cols)
            ]
        )

    def conj(self):
        return JetMatrix([[e.conj() for e in row] for row in self.entries])

    def scale_rows(self, factors):
        """Left-multiply by a constant diagonal matrix of rationals."""
        return JetMatrix(
            [
                [self.entries[i][j].scale(factors[i]) for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def det(self):
        """Determinant over the jet ring, exact at the shared validity.

        Expansion along rows with memoization on the set of free columns;
        no division, so it works for any entries.
        """
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        m = self.rows
        memo = {}

        def rec(row, mask):
            if row == m:
                return Jet.constant(self.n, 1, self.valid_degree)
            got = memo.get(mask)
            if got is not None:
                return got
            acc = Jet.zero(self.n, self.valid_degree)
            sign = 1
            for col in range(m):
                bit = 1 << col
                if not (mask & bit):
                    continue
                entry = self.entries[row][col]
                if not entry.is_zero():
                    sub = rec(row + 1, mask & ~bit)
                    term = entry * sub
                    acc = acc + (term if sign > 0 else -term)
                sign = -sign
            memo[mask] = acc
            return acc

        return rec(0, (1 << m) - 1)

    def inverse(self):
        """Matrix inverse over the jet ring: self @ inverse() == identity.

        Splits off the constant part G0 (inverted exactly over the
        rationals) and sums the Neumann series of the degree >= 1 remainder;
        the series terminates at the validity.
        """
        if self.rows != self.cols:
            raise DimensionMismatch("inverse of a non-square matrix")
        m = self.rows
        g0 = [[self.entries[i][j].eval0() for j in range(m)] for i in range(m)]
        g0_inv = _invert_rational(g0)
        b = _const_times(g0_inv, self)
        r = JetMatrix.identity(self.n, m, self.valid_degree) - b  # -N, min deg >= 1
        acc = JetMatrix.identity(self.n, m, self.valid_degree)
        power = acc
        for _ in range(self.valid_degree):
            power = power @ r
            if all(e.is_zero() for row in power.entries for e in row):
                break
            acc = acc + power
        return _times_const(acc, g0_inv)


def _invert_rational(mat):
    """Exact inverse of a square rational matrix (Gaussian elimination)."""
    m = len(mat)
    a = [[as_q(mat[i][j]) for j in range(m)] for i in range(m)]
    inv = [[Q(1) if i == j else ZERO for j in range(m)] for i in range(m)]
    for col in range(m):
        pivot = next((r for r in range(col, m) if a[r][col] != 0), None)
        if pivot is None:
            raise NonInvertibleError("singular constant term")
        a[col], a[pivot] = a[pivot], a[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        inv[col] = [x / p for x in inv[col]]
        for r in range(m):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


def _const_times(const, mat):
    """Rational matrix times JetMatrix."""
    m = len(const)
    out = []
    for i in range(m):
        row = []
        for j in range(mat.cols):
            acc = Jet.zero(mat.n, mat.valid_degree)
            for k in range(m):
                if const[i][k] != 0:
                    acc = acc + mat.entries[k][j].scale(const[i][k])
            row.append(acc)
        out.append(row)
    return JetMatrix(out)


def _times_const(mat, const):
    """JetMatrix times rational matrix."""
    m = len(const)
    out = []
    for i in range(mat.rows):
        row = []
        for j in range(m):
            acc = Jet.zero(mat.n, mat.valid_degree)
            for k in range(m):
                if const[k][j] != 0:
                    acc = acc + mat.entries[i][k].scale(const[k][j])
            row.append(acc)
        out.append(row)
    return JetMatrix(out)


def divisor_pairs(P, Q_):
    """All componentwise-dominated pairs (U, V) <= (P, Q)."""
    return itertools.product(
        itertools.product(*(range(p + 1) for p in P)),
        itertools.product(*(range(q + 1) for q in Q_)),
    )
