"""Exact rationals and symbolic tower numbers ``sum_a q_a * 2**(2**a) + r``.

Rationals are plain :class:`fractions.Fraction` values.  A :class:`TowerForm`
keeps double-exponential terms symbolic; its sign is decided by a dominance
test that only ever compares exponents, and falls back to full expansion
when the numbers involved are small enough (``2**a <= bit_budget``).

Tower indices may themselves be very large integers (the tree module hands
out indices around ``10**17`` at depth a few thousand); nothing here ever
materialises ``2**a`` for such an index.
"""

from __future__ import annotations

import sys
from collections import abc
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

DEFAULT_BIT_BUDGET = 1 << 20
_budget = DEFAULT_BIT_BUDGET


def get_bit_budget() -> int:
    return _budget


def set_bit_budget(bits: int) -> None:
    """Process-wide expansion limit used when no explicit budget is passed."""
    global _budget
    if bits < 1 << 10:
        raise ValueError("bit budget must be at least 2**10")
    _budget = bits

Scalar = Union[int, Fraction]


class BudgetExceeded(ArithmeticError):
    """Dominance was inconclusive and the expansion is over the bit budget."""


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact scalar: {value!r}")


def encode_scalar(value: Scalar) -> str:
    return str(as_fraction(value))


def decode_scalar(text: str) -> Fraction:
    return Fraction(text)


def log2_floor_bound(x: Fraction) -> int:
    """Integer ``e`` with ``|x| >= 2**e`` (x nonzero)."""
    return abs(x.numerator).bit_length() - 1 - x.denominator.bit_length()


def log2_ceil_bound(x: Fraction) -> int:
    """Integer ``e`` with ``|x| < 2**e`` (x nonzero)."""
    return abs(x.numerator).bit_length() - x.denominator.bit_length() + 1


def pow2_plus_ge(x: int, c: int, y: int | None, d: int) -> bool:
    """Decide ``2**x + c >= 2**y + d`` (``y=None`` drops the ``2**y`` term).

    ``x`` and ``y`` may be astronomically large; powers are only formed
    when the exponent is below the bit length of ``c - d``.
    """
    if y is None:
        gap = d - c
        if gap <= 0 or x >= gap.bit_length():
            return True
        return (1 << x) >= gap
    if x == y:
        return c >= d
    if x > y:
        gap = d - c
        if gap <= 0 or x - 1 >= gap.bit_length():
            return True
        return (1 << x) - (1 << y) >= gap
    slack = c - d
    if slack <= 0 or y - 1 >= slack.bit_length():
        return False
    return slack >= (1 << y) - (1 << x)


class TowerForm:
    """Exact value ``sum_a q_a * 2**(2**a) + r`` with ``a >= 1``.

    Instances are immutable.  ``terms`` is a tuple of ``(a, q_a)`` pairs,
    strictly increasing in ``a`` with no zero coefficients.  The
    representation is canonical as a *form*, not as a value: ``{1: 4}`` and
    ``{2: 1}`` are both 16.  Equality (``==``) compares values.
    """

    __slots__ = ("terms", "r", "_hash")

    def __init__(self, terms: Mapping[int, Scalar] | Iterable[tuple[int, Scalar]] = (),
                 r: Scalar = 0):
        items = terms.items() if isinstance(terms, (dict, abc.Mapping)) else terms
        merged: dict[int, Fraction] = {}
        rest = as_fraction(r)
        for a, q in items:
            a = int(a)
            q = as_fraction(q)
            if a < 0:
                raise ValueError(f"negative tower index {a}")
            if a == 0:
                # 2**(2**0) == 2
                rest += 2 * q
                continue
            merged[a] = merged.get(a, Fraction(0)) + q
        self.terms = tuple(sorted((a, q) for a, q in merged.items() if q))
        self.r = rest
        self._hash = None

    @classmethod
    def tower(cls, a: int, coefficient: Scalar = 1) -> "TowerForm":
        return cls({a: coefficient})

    @classmethod
    def coerce(cls, value) -> "TowerForm":
        if isinstance(value, TowerForm):
            return value
        return cls((), value)

    # -- structure -------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return not self.terms

    @property
    def top_index(self) -> int | None:
        return self.terms[-1][0] if self.terms else None

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.terms)

    def canonical(self) -> "TowerForm":
        return TowerForm(self.terms, self.r)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, (TowerForm, int, Fraction)):
            return NotImplemented
        other = TowerForm.coerce(other)
        return TowerForm(self.terms + other.terms, self.r + other.r)

    __radd__ = __add__

    def __neg__(self):
        return TowerForm(((a, -q) for a, q in self.terms), -self.r)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, (TowerForm, int, Fraction)):
            return NotImplemented
        return self + (-TowerForm.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, q):
        if not isinstance(q, (int, Fraction)):
            return NotImplemented
        q = as_fraction(q)
        return TowerForm(((a, q * c) for a, c in self.terms), q * self.r)

    __rmul__ = __mul__

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- comparison ------------------------------------------------------
    def sign(self, bit_budget: int | None = None) -> int:
        return tf_sign(self, bit_budget)

    def _cmp(self, other) -> int:
        return (self - TowerForm.coerce(other)).sign()

    def __eq__(self, other):
        if not isinstance(other, (TowerForm, int, Fraction)):
            return NotImplemented
        other = TowerForm.coerce(other)
        if self.terms == other.terms:
            return self.r == other.r
        return self._cmp(other) == 0

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.r) if not self.terms else _value_hash(self)
        return self._hash

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # -- expansion -------------------------------------------------------
    def expand(self, bit_budget: int | None = None, unlimited: bool = False) -> Fraction:
        """Full value as a Fraction.  Raises BudgetExceeded past the budget."""
        if not unlimited and bit_budget is None:
            bit_budget = _budget
        total = self.r
        for a, q in self.terms:
            if not unlimited and (a >= bit_budget.bit_length()
                                           or (1 << a) > bit_budget):
                raise BudgetExceeded(f"2**(2**{a}) exceeds {bit_budget} bits")
            total += q * (1 << (1 << a))
        return total

    def to_json(self) -> dict:
        return {"terms": [{"a": a, "q": encode_scalar(q)} for a, q in self.terms],
                "r": encode_scalar(self.r)}

    @classmethod
    def from_json(cls, data: Mapping) -> "TowerForm":
        return cls(((t["a"], decode_scalar(t["q"])) for t in data["terms"]),
                   decode_scalar(data["r"]))

    def __repr__(self):
        parts = [f"{q}*T({a})" for a, q in reversed(self.terms)]
        if self.r or not parts:
            parts.append(str(self.r))
        return "TowerForm(" + " + ".join(parts) + ")"


Exact = Union[Fraction, TowerForm]


_P = sys.hash_info.modulus


def _value_hash(x: TowerForm) -> int:
    """Hash of the value, matching ``hash(Fraction)`` when the value is rational.

    Python hashes a rational n/d as ``sign * (|n| * d**-1 mod P)``.  The
    residue of a form mod P is computable because ``2**(2**a) mod P`` reduces
    the exponent mod P - 1.  The sign comes from ``tf_sign`` and is only
    skipped for forms whose sign is beyond the budget; those never compare
    equal to a rational without raising anyway.
    """
    rho = 0
    for a, q in x.terms + ((None, x.r),):
        if q.denominator % _P == 0:
            return sys.hash_info.inf
        t = 1 if a is None else pow(2, pow(2, a, _P - 1), _P)
        rho = (rho + q.numerator * pow(q.denominator, -1, _P) * t) % _P
    try:
        negative = tf_sign(x) < 0
    except BudgetExceeded:
        negative = False
    if not negative:
        return rho
    h = rho - _P if rho else 0
    return -2 if h == -1 else h


def tf_add(x: TowerForm, y: TowerForm) -> TowerForm:
    return TowerForm.coerce(x) + TowerForm.coerce(y)


def tf_scale(q: Scalar, x: TowerForm) -> TowerForm:
    return TowerForm.coerce(x) * as_fraction(q)


def dominance_sign(x: TowerForm, slack_bits: int = 0) -> int | None:
    """Sign of ``x`` if the leading tower term provably dominates, else None.

    With ``slack_bits=s`` the rest must stay below ``2**-s`` times the lead.
    """
    if not x.terms:
        return (x.r > 0) - (x.r < 0)
    top, lead = x.terms[-1]
    rest = [(a, log2_ceil_bound(q)) for a, q in x.terms[:-1]]
    if x.r:
        rest.append((None, log2_ceil_bound(x.r)))
    lead_sign = 1 if lead > 0 else -1
    if not rest:
        return lead_sign
    # rest < len(rest) * 2**max(E_i) <= 2**(max(E_i) + bl(len(rest)))
    margin = log2_floor_bound(lead) - len(rest).bit_length() - slack_bits
    for a, ub in rest:
        if a is None:
            # the residue has no tower part: compare 2**(2**top)-scale against ub
            if not pow2_plus_ge(top, margin, None, ub):
                return None
        elif not pow2_plus_ge(top, margin, a, ub):
            return None
    return lead_sign


def tf_sign(x: TowerForm, bit_budget: int | None = None) -> int:
    x = TowerForm.coerce(x)
    decided = dominance_sign(x)
    if decided is not None:
        return decided
    value = x.expand(bit_budget)
    return (value > 0) - (value < 0)


def tf_abs_ge(x: TowerForm, bound: Scalar, bit_budget: int | None = None) -> bool:
    """``|x| >= bound`` for ``bound >= 0``."""
    bound = as_fraction(bound)
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    x = TowerForm.coerce(x)
    return (tf_sign(x - bound, bit_budget) >= 0
            or tf_sign(x + bound, bit_budget) <= 0)


def tf_abs_le(x: TowerForm, bound: Scalar, bit_budget: int | None = None) -> bool:
    """``|x| <= bound`` for ``bound >= 0``."""
    bound = as_fraction(bound)
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    x = TowerForm.coerce(x)
    return (tf_sign(x - bound, bit_budget) <= 0
            and tf_sign(x + bound, bit_budget) >= 0)


def log2_bounds(x: TowerForm) -> tuple[tuple[int | None, int], tuple[int | None, int]] | None:
    """Symbolic log2 bounds ``(lo, hi)`` of ``|x|`` as ``(a, c)`` meaning ``2**a + c``.

    ``a=None`` means the bound is the plain integer ``c``.  Returns None when
    the value is zero or the leading term does not provably dominate.
    """
    if not x.terms:
        if not x.r:
            return None
        return (None, log2_floor_bound(x.r)), (None, log2_ceil_bound(x.r))
    if dominance_sign(x, slack_bits=1) is None:
        return None
    top, lead = x.terms[-1]
    # rest < 2**(2**top + lb - 1) <= half the lead term
    lo = (top, log2_floor_bound(lead) - 1)
    hi = (top, log2_ceil_bound(lead) + 1)
    return lo, hi


def encode_exact(value) -> str | dict:
    if isinstance(value, TowerForm):
        if value.is_rational:
            return encode_scalar(value.r)
        return value.to_json()
    return encode_scalar(value)


def decode_exact(data) -> Fraction | TowerForm:
    if isinstance(data, dict):
        return TowerForm.from_json(data)
    return decode_scalar(data)


def normalize(value) -> Fraction | TowerForm:
    """Rational-valued TowerForms collapse to Fraction."""
    if isinstance(value, TowerForm):
        return value.r if value.is_rational else value
    return as_fraction(value)


def expand_if_small(x: TowerForm, bit_budget: int | None = None) -> Fraction:
    """Rational value of ``x``; BudgetExceeded when it is too large to expand."""
    return TowerForm.coerce(x).expand(bit_budget)
