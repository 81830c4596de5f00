"""Homogeneous ternary forms with exact rational coefficients."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from flint import fmpq, fmpq_mpoly_ctx, fmpz_mpoly_ctx

from .errors import InputError
from .forms import as_fraction, fraction_to_json

QCTX = fmpq_mpoly_ctx.get(("x0", "x1", "x2"), "lex")
ZCTX = fmpz_mpoly_ctx.get(("x0", "x1", "x2"), "lex")


def monomials(d: int) -> list[tuple[int, int, int]]:
    """Exponent triples of degree d in lexicographic order."""
    return sorted(((a, b, d - a - b) for a in range(d + 1) for b in range(d + 1 - a)), reverse=True)


@dataclass(frozen=True)
class TernaryForm:
    """Homogeneous polynomial of degree d in x0, x1, x2.

    ``coeffs`` maps exponent triples to nonzero Fractions. The zero form is
    allowed as an intermediate value (e.g. a vanishing derivative) but not in
    the JSON format.
    """

    d: int
    coeffs: Mapping

    def __post_init__(self):
        clean = {}
        for e, c in self.coeffs.items():
            e = tuple(int(v) for v in e)
            if len(e) != 3 or min(e) < 0 or sum(e) != self.d:
                raise InputError(f"exponent {e} does not have degree {self.d}")
            c = as_fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
        object.__setattr__(self, "coeffs", {e: c for e, c in sorted(clean.items(), reverse=True) if c})

    def __hash__(self):
        return hash((self.d, tuple(self.coeffs.items())))

    def __eq__(self, other):
        return isinstance(other, TernaryForm) and self.d == other.d and self.coeffs == other.coeffs

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: Sequence) -> Fraction:
        return eval_form(self, x)

    def __neg__(self):
        return TernaryForm(self.d, {e: -c for e, c in self.coeffs.items()})

    def __add__(self, other: "TernaryForm"):
        if other.d != self.d and not other.is_zero and not self.is_zero:
            raise ValueError("degree mismatch")
        d = self.d if not self.is_zero else other.d
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return TernaryForm(d, out)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TernaryForm):
            return from_mpoly(self.to_mpoly() * other.to_mpoly(), self.d + other.d)
        c = as_fraction(other)
        return TernaryForm(self.d, {e: c * v for e, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return from_mpoly(self.to_mpoly() ** k, self.d * k)

    def to_mpoly(self):
        return QCTX.from_dict({e: fmpq(c.numerator, c.denominator) for e, c in self.coeffs.items()})

    def to_zpoly(self):
        """Primitive integer multiple as an fmpz_mpoly (positive scaling)."""
        p = self.to_mpoly()
        if p.is_zero():
            return ZCTX.from_dict({})
        den = 1
        for c in self.coeffs.values():
            den = math.lcm(den, c.denominator)
        z = ZCTX.from_dict({e: int(c * den) for e, c in self.coeffs.items()})
        cont = abs(int(z.content()))
        return ZCTX.from_dict({e: int(c) // cont for e, c in z.to_dict().items()})

    def primitive(self) -> "TernaryForm":
        return from_mpoly(self.to_zpoly(), self.d)

    def gradient(self) -> tuple["TernaryForm", "TernaryForm", "TernaryForm"]:
        return gradient(self)

    def transform(self, M: Sequence[Sequence]) -> "TernaryForm":
        """The form X -> U(M X)."""
        g = QCTX.gens()
        M = [[as_fraction(v) for v in row] for row in M]
        images = [sum((fmpq(M[i][j].numerator, M[i][j].denominator) * g[j] for j in range(3)), QCTX.from_dict({}))
                  for i in range(3)]
        return from_mpoly(self.to_mpoly().compose(*images), self.d)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "coeffs": {f"{a},{b},{c}": fraction_to_json(v) for (a, b, c), v in sorted(self.coeffs.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "TernaryForm":
        try:
            d = int(data["d"])
            coeffs = {tuple(int(t) for t in k.split(",")): v for k, v in data["coeffs"].items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise InputError(f"malformed form description: {exc}") from exc
        form = cls(d, coeffs)
        if form.is_zero:
            raise InputError("form has no nonzero coefficient")
        return form

    def __repr__(self):
        return f"TernaryForm(d={self.d}, {self.to_mpoly()})"


def from_mpoly(p, d: int) -> TernaryForm:
    return TernaryForm(d, {tuple(e): as_fraction(c) for e, c in p.to_dict().items()})


def eval_form(U: TernaryForm, x: Sequence) -> Fraction:
    x = [as_fraction(v) for v in x]
    if len(x) != 3:
        raise InputError("a point of the projective plane has three coordinates")
    total = Fraction(0)
    for (a, b, c), v in U.coeffs.items():
        total += v * x[0] ** a * x[1] ** b * x[2] ** c
    return total


def eval_float(U: TernaryForm, x) -> float:
    return sum(float(v) * x[0] ** a * x[1] ** b * x[2] ** c for (a, b, c), v in U.coeffs.items())


def gradient(U: TernaryForm) -> tuple[TernaryForm, TernaryForm, TernaryForm]:
    out = []
    for i in range(3):
        coeffs = {}
        for e, v in U.coeffs.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                coeffs[tuple(f)] = v * e[i]
        out.append(TernaryForm(U.d - 1, coeffs))
    return tuple(out)


def linear(a, b, c) -> TernaryForm:
    return TernaryForm(1, {(1, 0, 0): a, (0, 1, 0): b, (0, 0, 1): c})


def variable(i: int) -> TernaryForm:
    e = [0, 0, 0]
    e[i] = 1
    return TernaryForm(1, {tuple(e): 1})


def load_form(path) -> TernaryForm:
    with open(path) as fh:
        try:
            return TernaryForm.from_json(json.load(fh))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc
