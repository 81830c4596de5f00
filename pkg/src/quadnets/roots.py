"""Exact real root isolation for univariate integer polynomials.

Roots are isolated by Descartes' rule of signs with bisection (the
Vincent-Collins-Akritas scheme) on top of flint's integer polynomials.
Isolating intervals are open intervals with rational endpoints that are not
roots; an exact rational root is reported as a degenerate interval (q, q).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

from flint import fmpq, fmpq_poly, fmpz_poly

_SHIFT = fmpz_poly([1, 1])
_X = fmpz_poly([0, 1])


def to_fmpq(q) -> fmpq:
    q = Fraction(q)
    return fmpq(q.numerator, q.denominator)


def to_fraction(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


def integer_poly(coeffs: Iterable) -> fmpz_poly:
    """Positive rational multiple of the polynomial with the given coefficients (low degree first)."""
    p = fmpq_poly([to_fmpq(c) for c in coeffs])
    return primitive(p.numer())


def primitive(p: fmpz_poly) -> fmpz_poly:
    if isinstance(p, fmpq_poly):
        p = p.numer()
    if p.is_zero():
        return p
    c = abs(p.content())
    return p if c == 1 else fmpz_poly([v // c for v in p.coeffs()])


def squarefree_part(p: fmpz_poly) -> fmpz_poly:
    if p.degree() <= 0:
        return p
    g = p.gcd(p.derivative())
    if g.degree() > 0:
        p = divmod(p, g)[0]
    return primitive(p)


def sign(v) -> int:
    return (v > 0) - (v < 0)


def eval_at(p, q) -> Fraction:
    return to_fraction(p(to_fmpq(q)))


def sign_at(p, q) -> int:
    return sign(p(to_fmpq(q)))


def _variations(coeffs) -> int:
    count, last = 0, 0
    for c in coeffs:
        s = sign(c)
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def _descartes_bound(q: fmpz_poly) -> int:
    """Sign variations of (x+1)^n q(1/(x+1)): an upper bound for the roots of q in (0, 1)."""
    rev = fmpz_poly(list(reversed(q.coeffs())))
    return _variations(rev(_SHIFT).coeffs())


def _vca(q: fmpz_poly, a: Fraction, b: Fraction, out: list, limit: int | None = None) -> None:
    """Isolate the roots in (a, b) given q(x) ~ p(a + (b - a) x) squarefree."""
    stack = [(q, a, b)]
    while stack:
        q, a, b = stack.pop()
        if q.degree() <= 0:
            continue
        v = _descartes_bound(q)
        if v == 0:
            continue
        if v == 1:
            out.append((a, b))
            continue
        m = (a + b) / 2
        coeffs = q.coeffs()
        n = len(coeffs) - 1
        ql = fmpz_poly([c * (1 << (n - i)) for i, c in enumerate(coeffs)])
        qr = ql(_SHIFT)
        if qr.coeffs()[0] == 0:
            out.append((m, m))
            ql = divmod(ql, fmpz_poly([-1, 1]))[0]
            qr = divmod(qr, _X)[0]
        stack.append((primitive(qr), m, b))
        stack.append((primitive(ql), a, m))
        if limit is not None and len(out) > limit:
            return


def _transform(p: fmpz_poly, a: Fraction, b: Fraction) -> fmpz_poly:
    """Integer multiple of p(a + (b - a) x)."""
    lin = fmpq_poly([to_fmpq(a), to_fmpq(b - a)])
    return primitive(fmpq_poly(p)(lin).numer())


def root_bound(p: fmpz_poly) -> Fraction:
    """Power of two strictly larger than the modulus of every root (Cauchy bound)."""
    coeffs = p.coeffs()
    lead = abs(int(coeffs[-1]))
    top = max(abs(int(c)) for c in coeffs[:-1]) if len(coeffs) > 1 else 0
    # 1 + top/lead < top//lead + 2 <= 2^bitlen(top//lead + 1); integer arithmetic avoids float overflow
    k = max(1, (top // lead + 1).bit_length() + 1) if top else 1
    return Fraction(1 << k)


def isolate_in(p: fmpz_poly, a, b) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals of the roots of squarefree ``p`` in the open interval (a, b)."""
    a, b = Fraction(a), Fraction(b)
    out: list = []
    if p.degree() <= 0 or a >= b:
        return out
    _vca(_transform(p, a, b), a, b, out)
    out.sort()
    return out


def isolate_real_roots(p) -> list[tuple[Fraction, Fraction]]:
    """Sorted isolating intervals for all distinct real roots of ``p``."""
    if not isinstance(p, fmpz_poly):
        p = integer_poly(p)
    p = squarefree_part(p)
    if p.degree() <= 0:
        return []
    B = root_bound(p)
    return isolate_in(p, -B, B)


def count_roots_closed(p: fmpz_poly, a, b) -> int:
    """Number of distinct roots of squarefree ``p`` in the closed interval [a, b]."""
    a, b = Fraction(a), Fraction(b)
    n = (sign_at(p, a) == 0) + (a != b and sign_at(p, b) == 0)
    return n + len(isolate_in(p, a, b))


def has_root_closed(p: fmpz_poly, a, b) -> bool:
    p = squarefree_part(p)
    if sign_at(p, a) == 0 or sign_at(p, b) == 0:
        return True
    out: list = []
    _vca(_transform(p, Fraction(a), Fraction(b)), Fraction(a), Fraction(b), out, limit=0)
    return bool(out)


def refine(p: fmpz_poly, a: Fraction, b: Fraction, width) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval of a simple root until it is narrower than ``width``."""
    while a != b and b - a > width:
        a, b = bisect_once(p, a, b)
    return a, b


def bisect_once(p: fmpz_poly, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    """Halve an isolating interval; an endpoint may itself be a root of a neighbouring interval."""
    if a == b:
        return a, b
    m = (a + b) / 2
    sm = sign_at(p, m)
    if sm == 0:
        return m, m
    sa = sign_at(p, a)
    if sa != 0:
        return (m, b) if sm == sa else (a, m)
    sb = sign_at(p, b)
    if sb != 0:
        return (a, m) if sm == sb else (m, b)
    # both endpoints are roots of neighbouring intervals
    return (a, m) if isolate_in(squarefree_part(p), a, m) else (m, b)


def roots_below(p: fmpz_poly, intervals, y0) -> int:
    """Count isolated roots of ``p`` strictly below ``y0``; ``y0`` must not be a root."""
    y0 = Fraction(y0)
    s0 = sign_at(p, y0)
    assert s0 != 0
    count = 0
    for a, b in intervals:
        if a == b:
            count += a < y0
        elif b <= y0:
            count += 1
        elif a < y0:
            sa = sign_at(p, a)
            if sa:
                count += sa * s0 < 0
            else:
                count += sign_at(p, b) * s0 > 0
    return count


def simplest_between(a, b) -> Fraction:
    """The rational with the smallest denominator (then numerator) in the open interval (a, b)."""
    a, b = Fraction(a), Fraction(b)
    if not a < b:
        raise ValueError("empty interval")
    if a < 0 < b:
        return Fraction(0)
    if b <= 0:
        return -simplest_between(-b, -a)
    n = math.floor(a) + 1
    if n < b:
        return Fraction(n)
    fl = math.floor(a)
    lo = 1 / (b - fl)
    y = Fraction(math.floor(lo) + 1) if a == fl else simplest_between(lo, 1 / (a - fl))
    return fl + 1 / y


class RealAlgebraic:
    """A real root of a squarefree integer polynomial, given by an isolating interval.

    The defining polynomial may shrink to a factor during computations (when a
    common factor with some element turns up), which keeps Q[x]/(poly) usable
    as if it were a field.
    """

    __slots__ = ("poly", "lo", "hi")

    def __init__(self, poly: fmpz_poly, lo, hi):
        self.poly = squarefree_part(poly)
        self.lo, self.hi = Fraction(lo), Fraction(hi)
        if self.lo != self.hi and sign_at(self.poly, self.lo) * sign_at(self.poly, self.hi) >= 0:
            raise ValueError("interval does not isolate a simple root")

    @property
    def is_rational(self) -> bool:
        return self.lo == self.hi

    def refine(self, width) -> None:
        self.lo, self.hi = refine(self.poly, self.lo, self.hi, width)

    def __float__(self) -> float:
        self.refine(Fraction(1, 1 << 60) * max(1, abs(self.lo)))
        return float((self.lo + self.hi) / 2)

    def sign_of(self, g) -> int:
        """Exact sign of g(alpha) for a polynomial g with rational coefficients."""
        if isinstance(g, fmpq_poly):
            g = g.numer()
        if g.is_zero():
            return 0
        if g.degree() == 0:
            return sign(g.coeffs()[0])
        if self.is_rational:
            return sign_at(g, self.lo)
        h = self.poly.gcd(g)
        if h.degree() > 0 and sign_at(h, self.lo) * sign_at(h, self.hi) < 0:
            self.poly = primitive(h)
            return 0
        while has_root_closed(g, self.lo, self.hi):
            self.lo, self.hi = bisect_once(self.poly, self.lo, self.hi)
            if self.is_rational:
                return sign_at(g, self.lo)
        return sign_at(g, self.lo)

    def shrink(self, factor: fmpz_poly) -> None:
        self.poly = primitive(factor)


class AlgElem:
    """Element g(alpha) of Q(alpha), stored as a rational polynomial in alpha."""

    __slots__ = ("g", "ctx")

    def __init__(self, g, ctx: RealAlgebraic):
        if not isinstance(g, fmpq_poly):
            g = fmpq_poly([to_fmpq(g)]) if not isinstance(g, fmpz_poly) else fmpq_poly(g)
        self.g = g
        self.ctx = ctx

    def _reduced(self, g) -> "AlgElem":
        P = fmpq_poly(self.ctx.poly)
        if g.degree() >= P.degree():
            g = divmod(g, P)[1]
        return AlgElem(g, self.ctx)

    def _coerce(self, other):
        return other.g if isinstance(other, AlgElem) else fmpq_poly([to_fmpq(other)])

    def __add__(self, other):
        return self._reduced(self.g + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._reduced(self.g - self._coerce(other))

    def __rsub__(self, other):
        return self._reduced(self._coerce(other) - self.g)

    def __neg__(self):
        return AlgElem(-self.g, self.ctx)

    def __mul__(self, other):
        return self._reduced(self.g * self._coerce(other))

    __rmul__ = __mul__

    def inverse(self) -> "AlgElem":
        while True:
            P = fmpq_poly(self.ctx.poly)
            G, s, _ = self._reduced(self.g).g.xgcd(P)
            if G.degree() == 0:
                return self._reduced(s / G.coeffs()[0])
            # alpha is not a root of G since g(alpha) != 0
            self.ctx.shrink(divmod(P, G)[0].numer())

    def __truediv__(self, other):
        if not isinstance(other, AlgElem):
            return self._reduced(self.g / to_fmpq(other))
        return self * other.inverse()

    def sign(self) -> int:
        return self.ctx.sign_of(self._reduced(self.g).g)
