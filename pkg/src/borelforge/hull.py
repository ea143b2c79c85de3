"""Codes ``(lambda, b_1 < ... < b_n)`` for points of the linear hull of P.

A code denotes ``sum_i lambda_i * h(b_i)``.  Branches are ordered
lexicographically; two distinct codes are told apart by a coordinate where
their difference has absolute value at least 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .exact_arith import TowerForm, as_fraction, encode_exact, encode_scalar, normalize, tf_abs_ge
from .thick_family import xi
from .tree import Branch, eval_coordinate
from .verifier import r_and_l, smallest_window


class WindowUnfit(ValueError):
    """The residual coefficients fit no window ``m <= m_max``."""


class HorizonExhausted(AssertionError):
    """No separating coordinate within the horizon; should never happen."""


def lex_compare(b1: Branch, b2: Branch) -> int:
    """-1, 0 or 1 comparing the zero-extended sequences lexicographically."""
    n = max(len(b1.stem), len(b2.stem))
    for k in range(n):
        if b1[k] != b2[k]:
            return -1 if b1[k] < b2[k] else 1
    return 0


@dataclass(frozen=True)
class HullCode:
    lambdas: tuple[Fraction, ...]
    branches: tuple[Branch, ...]

    def __post_init__(self):
        if len(self.lambdas) != len(self.branches):
            raise ValueError("one coefficient per branch")
        if any(lam == 0 for lam in self.lambdas):
            raise ValueError("coefficients must be nonzero")
        for b1, b2 in zip(self.branches, self.branches[1:]):
            if lex_compare(b1, b2) >= 0:
                raise ValueError("branches must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.branches)

    @classmethod
    def build(cls, lambdas: Sequence, stems: Sequence[Sequence[int]]) -> "HullCode":
        return cls(tuple(as_fraction(x) for x in lambdas), tuple(Branch(s) for s in stems))

    @classmethod
    def from_json(cls, data: Mapping) -> "HullCode":
        return cls.build([Fraction(x) for x in data["lambda"]], data["stems"])

    def to_json(self) -> dict:
        return {"lambda": [encode_scalar(x) for x in self.lambdas],
                "stems": [b.to_json() for b in self.branches]}

    def coefficients(self) -> dict[Branch, Fraction]:
        return dict(zip(self.branches, self.lambdas))


class HullPoint:
    """Coordinate evaluator for the point a code denotes."""

    def __init__(self, terms: Mapping[Branch, Fraction]):
        self.terms = dict(terms)

    def __call__(self, k: int):
        total = TowerForm()
        for b, lam in self.terms.items():
            total = total + TowerForm.coerce(eval_coordinate(b, k)) * lam
        return normalize(total)


def hull_encode(code: HullCode) -> HullPoint:
    return HullPoint(code.coefficients())


@dataclass(frozen=True)
class Separation:
    coordinate: int
    value: Fraction | TowerForm
    m: int
    threshold: int

    def to_json(self) -> dict:
        return {"k": self.coordinate, "value": encode_exact(self.value),
                "m": self.m, "threshold": self.threshold}


IDENTICAL = "Identical"


def residual(c1: HullCode, c2: HullCode) -> dict[Branch, Fraction]:
    diff = c1.coefficients()
    for b, lam in c2.coefficients().items():
        diff[b] = diff.get(b, Fraction(0)) - lam
    return {b: lam for b, lam in diff.items() if lam}


def hull_distinguish(c1: HullCode, c2: HullCode, m_max: int = 3,
                     horizon: int = 500) -> Separation | str:
    if c1 == c2:
        return IDENTICAL
    diff = residual(c1, c2)
    if not diff:
        # distinct codes always leave a nonzero residual; equal coefficient
        # maps mean the codes were equal after all
        return IDENTICAL
    m = smallest_window(list(diff.values()), m_max)
    if m is None:
        raise WindowUnfit(f"coefficients {[str(x) for x in diff.values()]} fit no m <= {m_max}")
    _, l_e = r_and_l(diff)
    threshold = max(l_e, xi(m).Xi_int)
    point = HullPoint(diff)
    for k in range(threshold + 1, threshold + horizon + 1):
        value = point(k)
        if tf_abs_ge(TowerForm.coerce(value), 1):
            return Separation(k, value, m, threshold)
    raise HorizonExhausted(f"no coordinate in ({threshold}, {threshold + horizon}]")


def rescale(code: HullCode, factor) -> HullCode:
    factor = as_fraction(factor)
    if factor <= 0:
        raise ValueError("rescale by a positive rational")
    return HullCode(tuple(lam * factor for lam in code.lambdas), code.branches)
