"""Exact scalar arithmetic, truncated power series and truncated polynomials.

Everything here works over :class:`fractions.Fraction`.  There is no floating
point anywhere in the package; equality tests are exact.

Three coefficient rings are provided:

* ``Fraction`` for plain rationals,
* :class:`TruncSeries` for univariate power series in ``z`` truncated at a
  fixed order,
* :class:`MultiPoly` for multivariate polynomials, optionally truncated at a
  total degree cap.

:class:`PolyMatrix` holds square matrices over :class:`MultiPoly` and is used to
evaluate analytic functions such as ``j(A)`` and ``f(A)`` on matrices whose
entries are polynomial in auxiliary variables.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

from .errors import CapExceededError, MalformedInputError, UnknownNameError

Rational = Fraction
Scalar = (int, Fraction)


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a reduced Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise MalformedInputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise MalformedInputError(f"not a rational: {value!r}")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` with arbitrary-precision integers."""
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise MalformedInputError(f"malformed rational {text!r}") from None
    if q == 0:
        raise MalformedInputError(f"zero denominator in {text!r}")
    return Fraction(p, q)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Truncated univariate series
# ---------------------------------------------------------------------------


class TruncSeries:
    """Power series ``sum c_k z^k`` known exactly for ``k <= order_cap``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable, order_cap: int | None = None):
        cs = [as_rational(c) for c in coeffs]
        if order_cap is not None:
            if order_cap < 0:
                raise ValueError("order_cap must be non-negative")
            cs = cs[: order_cap + 1] + [Fraction(0)] * (order_cap + 1 - len(cs))
        if not cs:
            raise ValueError("a series needs at least the constant coefficient")
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @property
    def order_cap(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        return f"TruncSeries({[format_rational(c) for c in self.coeffs]})"

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    @classmethod
    def constant(cls, c, order_cap: int) -> "TruncSeries":
        return cls([c], order_cap)

    @classmethod
    def variable(cls, order_cap: int) -> "TruncSeries":
        return cls([0, 1], order_cap)

    def _cap_with(self, other: "TruncSeries") -> int:
        return min(self.order_cap, other.order_cap)

    def truncate(self, order_cap: int) -> "TruncSeries":
        return TruncSeries(self.coeffs, order_cap)

    def __add__(self, other):
        if isinstance(other, Scalar):
            return TruncSeries((self.coeffs[0] + other,) + self.coeffs[1:])
        if not isinstance(other, TruncSeries):
            return NotImplemented
        n = self._cap_with(other)
        return TruncSeries([self.coeffs[k] + other.coeffs[k] for k in range(n + 1)])

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return TruncSeries([c * other for c in self.coeffs])
        if not isinstance(other, TruncSeries):
            return NotImplemented
        n = self._cap_with(other)
        a, b = self.coeffs, other.coeffs
        return TruncSeries(
            [sum((a[i] * b[k - i] for i in range(k + 1)), Fraction(0)) for k in range(n + 1)]
        )

    __rmul__ = __mul__

    def derivative(self) -> "TruncSeries":
        """Exact derivative; the result is known to one order less."""
        if self.order_cap == 0:
            return TruncSeries([0], 0)
        return TruncSeries([k * self.coeffs[k] for k in range(1, self.order_cap + 1)])

    def integral(self, constant=0) -> "TruncSeries":
        return TruncSeries(
            [as_rational(constant)] + [c / (k + 1) for k, c in enumerate(self.coeffs)]
        )

    def reciprocal(self) -> "TruncSeries":
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv = [1 / a[0]]
        for k in range(1, len(a)):
            s = sum((a[i] * inv[k - i] for i in range(1, k + 1)), Fraction(0))
            inv.append(-s / a[0])
        return TruncSeries(inv)

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            return self * (Fraction(1) / other)
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self * other.reciprocal()

    def log(self) -> "TruncSeries":
        """``log(s)`` for a series with constant term 1, via ``(log s)' = s'/s``."""
        if self.coeffs[0] != 1:
            raise ValueError("log needs constant term 1 to stay rational")
        if self.order_cap == 0:
            return TruncSeries([0])
        q = self.derivative() / self.truncate(self.order_cap - 1)
        return q.integral(0)

    def exp(self) -> "TruncSeries":
        """``exp(s)`` for a series with zero constant term.

        Uses the recurrence obtained from ``E' = s' E``.
        """
        a = self.coeffs
        if a[0] != 0:
            raise ValueError("exp needs a zero constant term to stay rational")
        e = [Fraction(1)]
        for k in range(1, len(a)):
            e.append(sum((i * a[i] * e[k - i] for i in range(1, k + 1)), Fraction(0)) / k)
        return TruncSeries(e)

    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        """``self(inner(z))`` for ``inner`` with zero constant term (Horner)."""
        if inner.coeffs[0] != 0:
            raise ValueError("inner series must have zero constant term")
        n = self._cap_with(inner)
        acc = TruncSeries.constant(self.coeffs[n], n)
        inner = inner.truncate(n)
        for k in range(n - 1, -1, -1):
            acc = acc * inner + self.coeffs[k]
        return acc


def _sinh_half(order_cap: int) -> TruncSeries:
    # sinh(z/2) = sum over odd k of z^k / (2^k k!)
    return TruncSeries(
        [Fraction(1, 2**k * factorial(k)) if k % 2 else 0 for k in range(order_cap + 1)]
    )


SERIES_NAMES = ("j", "ln_j", "f", "exp", "sinh_half_over_half")


def series_of(name: str, order_cap: int) -> TruncSeries:
    """Taylor series at 0 of one of the named analytic functions.

    ``j(z) = sinh(z/2)/(z/2)``, ``ln_j = log j`` and ``f = (log j)'``.  Only the
    Taylor coefficients of ``sinh`` are written down; everything else is
    derived by series division, logarithm and differentiation.
    """
    if order_cap < 0:
        raise ValueError("order_cap must be non-negative")
    if name in ("j", "sinh_half_over_half"):
        s = _sinh_half(order_cap + 1)
        # divide by z/2: drop the (zero) constant term and rescale
        return TruncSeries([2 * c for c in s.coeffs[1:]])
    if name == "ln_j":
        return series_of("j", order_cap).log()
    if name == "f":
        return series_of("ln_j", order_cap + 1).derivative()
    if name == "exp":
        return TruncSeries.variable(order_cap).exp()
    raise UnknownNameError(name)


def bernoulli_numbers(n: int) -> list[Fraction]:
    """``B_0..B_n`` (with ``B_1 = -1/2``) from ``sum_k C(m+1, k) B_k = 0``."""
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum((comb(m + 1, k) * B[k] for k in range(m)), Fraction(0)) / (m + 1))
    return B


def series_identity_check(order: int):
    """Exact checks of the defining relations between ``j``, ``ln_j`` and ``f`` up to ``order``.

    ``f`` is compared with the independent closed form
    ``coth(z/2)/2 - 1/z = sum_k B_2k z^(2k-1) / (2k)!``.
    """
    from .results import CheckResult

    j = series_of("j", order)
    lnj = series_of("ln_j", order)
    f = series_of("f", order)
    B = bernoulli_numbers(order + 1)
    closed = [Fraction(0)] * (order + 1)
    for m in range(1, order + 1, 2):
        closed[m] = B[m + 1] / factorial(m + 1)
    checks = [
        ("f == (ln j)'", f.coeffs, series_of("ln_j", order + 1).derivative().coeffs),
        ("f == coth(z/2)/2 - 1/z", f.coeffs, closed),
        ("exp(ln j) == j", lnj.exp().coeffs, j.coeffs),
        ("j * z/2 == sinh(z/2)", (j * TruncSeries([0, Fraction(1, 2)] + [0] * order)).truncate(order).coeffs, _sinh_half(order).coeffs),
    ]
    for label, lhs, rhs in checks:
        if list(lhs) != list(rhs):
            k = next(i for i, (a, b) in enumerate(zip(lhs, rhs)) if a != b)
            return CheckResult.fail({"identity": label, "coefficient": k})
    for label, s, parity in (("j even", j, 0), ("ln_j even", lnj, 0), ("f odd", f, 1)):
        bad = [k for k, c in enumerate(s.coeffs) if c and k % 2 != parity]
        if bad:
            return CheckResult.fail({"identity": label, "coefficient": bad[0]})
    return CheckResult.ok(order=order)


# ---------------------------------------------------------------------------
# Truncated multivariate polynomials
# ---------------------------------------------------------------------------


def _min_cap(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class MultiPoly:
    """Sparse polynomial in ``num_vars`` variables with rational coefficients.

    ``terms`` maps exponent tuples to non-zero Fractions.  When ``degree_cap``
    is set, every term of total degree above the cap is dropped; results of
    arithmetic inherit the smaller cap of the operands.
    """

    __slots__ = ("num_vars", "degree_cap", "terms")

    def __init__(self, num_vars: int, terms: Mapping | None = None, degree_cap: int | None = None):
        self.num_vars = num_vars
        self.degree_cap = degree_cap
        clean = {}
        if terms:
            for exps, c in terms.items():
                if len(exps) != num_vars:
                    raise MalformedInputError(f"exponent {exps} has wrong length for {num_vars} vars")
                if c and (degree_cap is None or sum(exps) <= degree_cap):
                    clean[tuple(exps)] = as_rational(c)
        self.terms: dict[tuple[int, ...], Fraction] = clean

    @classmethod
    def _raw(cls, num_vars, terms, degree_cap):
        p = cls.__new__(cls)
        p.num_vars = num_vars
        p.degree_cap = degree_cap
        p.terms = terms
        return p

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, num_vars: int, degree_cap: int | None = None) -> "MultiPoly":
        return cls._raw(num_vars, {}, degree_cap)

    @classmethod
    def constant(cls, c, num_vars: int, degree_cap: int | None = None) -> "MultiPoly":
        c = as_rational(c)
        return cls._raw(num_vars, {(0,) * num_vars: c} if c else {}, degree_cap)

    @classmethod
    def variable(cls, i: int, num_vars: int, degree_cap: int | None = None) -> "MultiPoly":
        e = [0] * num_vars
        e[i] = 1
        return cls(num_vars, {tuple(e): 1}, degree_cap)

    @classmethod
    def monomial(cls, exps, c=1, degree_cap: int | None = None) -> "MultiPoly":
        return cls(len(exps), {tuple(exps): c}, degree_cap)

    # -- inspection -----------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), tuple(-e for e in t[0]))):
            mono = "*".join(
                f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(exps) if e
            )
            parts.append(f"{format_rational(c)}*{mono}" if mono else format_rational(c))
        return " + ".join(parts)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self) -> int | None:
        return min((sum(e) for e in self.terms), default=None)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.num_vars, Fraction(0))

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def homogeneous(self, d: int) -> "MultiPoly":
        return MultiPoly._raw(
            self.num_vars, {e: c for e, c in self.terms.items() if sum(e) == d}, self.degree_cap
        )

    def truncate(self, degree_cap: int | None) -> "MultiPoly":
        cap = _min_cap(self.degree_cap, degree_cap)
        if cap is None:
            return self
        return MultiPoly._raw(
            self.num_vars, {e: c for e, c in self.terms.items() if sum(e) <= cap}, cap
        )

    def with_cap(self, degree_cap: int | None) -> "MultiPoly":
        """Copy carrying exactly ``degree_cap`` (truncating if needed)."""
        terms = self.terms
        if degree_cap is not None:
            terms = {e: c for e, c in terms.items() if sum(e) <= degree_cap}
        return MultiPoly._raw(self.num_vars, dict(terms), degree_cap)

    # -- arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.num_vars != self.num_vars:
                from .errors import RingMismatchError

                raise RingMismatchError("polynomials in different numbers of variables")
            return other
        if isinstance(other, Scalar):
            return MultiPoly.constant(other, self.num_vars)
        return None

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    __hash__ = None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        cap = _min_cap(self.degree_cap, o.degree_cap)
        out = dict(self.terms)
        for e, c in o.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        if cap is not None:
            out = {e: c for e, c in out.items() if sum(e) <= cap}
        return MultiPoly._raw(self.num_vars, out, cap)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.num_vars, {e: -c for e, c in self.terms.items()}, self.degree_cap)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Scalar):
            if not other:
                return MultiPoly._raw(self.num_vars, {}, self.degree_cap)
            return MultiPoly._raw(
                self.num_vars, {e: c * other for e, c in self.terms.items()}, self.degree_cap
            )
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        cap = _min_cap(self.degree_cap, o.degree_cap)
        out: dict = {}
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in o.terms.items():
                if cap is not None and d1 + sum(e2) > cap:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly._raw(self.num_vars, {e: c for e, c in out.items() if c}, cap)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            return self * (Fraction(1) / other)
        return NotImplemented

    def __pow__(self, k: int):
        acc = MultiPoly.constant(1, self.num_vars, self.degree_cap)
        for _ in range(k):
            acc = acc * self
        return acc

    def partial(self, i: int) -> "MultiPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return MultiPoly._raw(self.num_vars, out, self.degree_cap)

    def partial_multi(self, alpha: Sequence[int]) -> "MultiPoly":
        """Apply ``prod_i (d/dx_i)^alpha_i``."""
        out = {}
        for e, c in self.terms.items():
            if any(a > b for a, b in zip(alpha, e)):
                continue
            k = c
            for a, b in zip(alpha, e):
                for t in range(a):
                    k *= b - t
            ne = tuple(b - a for a, b in zip(alpha, e))
            out[ne] = out.get(ne, 0) + k
        return MultiPoly._raw(self.num_vars, {e: c for e, c in out.items() if c}, self.degree_cap)

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= as_rational(x) ** k
            total += v
        return total

    def substitute(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Replace variable ``i`` by ``images[i]`` (all in a common ring)."""
        if not images:
            return self
        target = images[0]
        acc = MultiPoly.zero(target.num_vars, target.degree_cap)
        for e, c in self.terms.items():
            m = MultiPoly.constant(c, target.num_vars, target.degree_cap)
            for img, k in zip(images, e):
                for _ in range(k):
                    m = m * img
            acc = acc + m
        return acc


def apply_series_to_poly(s: TruncSeries, p: MultiPoly) -> MultiPoly:
    """``sum_k s_k p^k`` for ``p`` with zero constant term under a degree cap."""
    if p.constant_term() != 0:
        raise CapExceededError("series argument must have zero constant term")
    if p.degree_cap is None:
        raise CapExceededError("series substitution needs a degree cap")
    acc = MultiPoly.constant(s[0], p.num_vars, p.degree_cap)
    power = MultiPoly.constant(1, p.num_vars, p.degree_cap)
    for k in range(1, p.degree_cap + 1):
        power = power * p
        if not power:
            return acc
        if k > s.order_cap:
            raise CapExceededError(f"series order {s.order_cap} too small for degree cap {p.degree_cap}")
        acc = acc + power * s[k]
    return acc


def poly_exp(p: MultiPoly) -> MultiPoly:
    """Truncated ``exp(p)``; ``p`` must vanish at the origin."""
    cap = p.degree_cap if p.degree_cap is not None else 0
    return apply_series_to_poly(series_of("exp", max(cap, 1)), p)


# ---------------------------------------------------------------------------
# Matrices over MultiPoly
# ---------------------------------------------------------------------------


class PolyMatrix:
    """Square matrix with :class:`MultiPoly` entries sharing variables and cap."""

    __slots__ = ("n", "num_vars", "degree_cap", "entries")

    def __init__(self, entries: Sequence[Sequence], num_vars: int = 0, degree_cap: int | None = None):
        n = len(entries)
        if any(len(row) != n for row in entries):
            raise MalformedInputError("matrix must be square")
        rows = []
        for row in entries:
            r = []
            for x in row:
                if isinstance(x, MultiPoly):
                    num_vars = x.num_vars
                    r.append(x)
                else:
                    r.append(as_rational(x))
            rows.append(r)
        self.n = n
        self.num_vars = num_vars
        self.degree_cap = degree_cap
        self.entries: tuple[tuple[MultiPoly, ...], ...] = tuple(
            tuple(
                (x if isinstance(x, MultiPoly) else MultiPoly.constant(x, num_vars)).with_cap(
                    _min_cap(degree_cap, x.degree_cap if isinstance(x, MultiPoly) else None)
                )
                for x in row
            )
            for row in rows
        )
        if degree_cap is None:
            caps = [x.degree_cap for row in self.entries for x in row if x.degree_cap is not None]
            self.degree_cap = min(caps) if caps else None

    @classmethod
    def identity(cls, n: int, num_vars: int = 0, degree_cap: int | None = None) -> "PolyMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], num_vars, degree_cap)

    @classmethod
    def zero(cls, n: int, num_vars: int = 0, degree_cap: int | None = None) -> "PolyMatrix":
        return cls([[0] * n for _ in range(n)], num_vars, degree_cap)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __repr__(self):
        return f"PolyMatrix({[list(map(repr, r)) for r in self.entries]})"

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.n == other.n and all(
            a == b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb)
        )

    __hash__ = None

    def is_zero(self) -> bool:
        return not any(x for row in self.entries for x in row)

    def with_cap(self, degree_cap: int | None) -> "PolyMatrix":
        return PolyMatrix([[x.with_cap(degree_cap) for x in r] for r in self.entries], self.num_vars, degree_cap)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        return PolyMatrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
            self.num_vars,
        )

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + other * (-1)

    def __mul__(self, c) -> "PolyMatrix":
        return PolyMatrix([[x * c for x in r] for r in self.entries], self.num_vars)

    __rmul__ = __mul__

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        n = self.n
        cols = list(zip(*other.entries))
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = None
                for a, b in zip(self.entries[i], cols[j]):
                    if a and b:
                        t = a * b
                        acc = t if acc is None else acc + t
                if acc is None:
                    acc = MultiPoly.zero(self.num_vars, _min_cap(self.degree_cap, other.degree_cap))
                row.append(acc)
            out.append(row)
        return PolyMatrix(out, self.num_vars)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([list(c) for c in zip(*self.entries)], self.num_vars, self.degree_cap)

    def trace(self) -> MultiPoly:
        acc = MultiPoly.zero(self.num_vars, self.degree_cap)
        for i in range(self.n):
            acc = acc + self.entries[i][i]
        return acc

    def evaluate(self, point: Sequence) -> list[list[Fraction]]:
        return [[x.evaluate(point) for x in r] for r in self.entries]

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix([[fn(x) for x in r] for r in self.entries], self.num_vars)


def matrix_apply_series(s: TruncSeries, A: PolyMatrix, degree_cap: int) -> PolyMatrix:
    """``sum_k s_k A^k`` with entries truncated at ``degree_cap``.

    Stops as soon as a power of ``A`` vanishes under the cap; raises
    :class:`CapExceededError` if the series runs out first.
    """
    A = A.with_cap(degree_cap)
    n = A.n
    power = PolyMatrix.identity(n, A.num_vars, degree_cap)
    acc = power * s[0]
    k = 0
    while True:
        power = power @ A
        k += 1
        if power.is_zero():
            return acc
        if k > s.order_cap:
            raise CapExceededError(
                f"series order {s.order_cap} too small: A^{k} is non-zero under degree cap {degree_cap}"
            )
        if s[k]:
            acc = acc + power * s[k]


def series_order_needed(A: PolyMatrix, degree_cap: int) -> int:
    """An order at which ``A^(k+1)`` is guaranteed to vanish under the cap.

    Powers of the constant part vanish after ``n`` factors when it is
    nilpotent, and each non-constant factor raises the degree by at least one.
    """
    return (degree_cap + 1) * max(A.n, 1) + A.n


def det_sqrt_j(A: PolyMatrix, degree_cap: int) -> MultiPoly:
    """``det(j(A))^(1/2)`` as ``exp(tr(ln j(A)) / 2)`` on the formal neighbourhood of 0."""
    if degree_cap < 0:
        raise ValueError("degree_cap must be non-negative")
    order = series_order_needed(A, degree_cap)
    log_j = matrix_apply_series(series_of("ln_j", order), A, degree_cap)
    half_trace = log_j.trace().with_cap(degree_cap) * Fraction(1, 2)
    if half_trace.constant_term():
        raise CapExceededError("tr ln j(A) has a non-zero constant term; A is not formally small")
    return poly_exp(half_trace)


def poly_det(M: PolyMatrix) -> MultiPoly:
    """Determinant by cofactor expansion along the first row."""

    def rec(rows: tuple[int, ...], cols: tuple[int, ...]) -> MultiPoly:
        if not rows:
            return MultiPoly.constant(1, M.num_vars, M.degree_cap)
        r = rows[0]
        acc = MultiPoly.zero(M.num_vars, M.degree_cap)
        for k, c in enumerate(cols):
            entry = M.entries[r][c]
            if not entry:
                continue
            minor = rec(rows[1:], cols[:k] + cols[k + 1 :])
            term = entry * minor
            acc = acc + (term if k % 2 == 0 else -term)
        return acc

    return rec(tuple(range(M.n)), tuple(range(M.n)))


# ---------------------------------------------------------------------------
# Exact rational linear algebra
# ---------------------------------------------------------------------------


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns (matrix, pivot columns)."""
    m = [[as_rational(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{x : M x = 0}``, returned in reduced echelon form."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    R, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[fcol]
        basis.append(v)
    if not basis:
        return []
    echelon, _ = rref(basis)
    return echelon


def mat_inverse(M: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(M)
    if any(len(r) != n for r in M):
        raise MalformedInputError("matrix must be square")
    aug = [[as_rational(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(R) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def mat_det(M: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    m = [[as_rational(x) for x in r] for r in M]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in zip(*B)] for row in A]


def permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def all_permutations(k: int):
    """Yield ``(perm, sign)`` for every permutation of ``range(k)``."""
    for perm in permutations(range(k)):
        yield perm, permutation_sign(perm)
