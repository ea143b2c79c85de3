"""Disjoint thick subsets of the line and the thresholds that separate them.

Family ``j`` owns the tower indices ``A_j = {pair(j, k) + 1 : k >= 0}`` (the
rows of the Cantor pairing, a partition of the positive integers) and the
thick set ``T_j = union of [2**(2**a) - a, 2**(2**a) + a]`` over ``a`` in
``A_j``.  Row ``j`` starts at ``j*(j+1)/2 + 1``, so indices stay polynomial in
``j``; tree nodes thousands of levels deep still get representable indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import count
from math import comb, isqrt
from typing import Iterator, Sequence

from .exact_arith import (
    TowerForm,
    as_fraction,
    expand_if_small,
    log2_bounds,
    log2_ceil_bound,
    pow2_plus_ge,
    tf_abs_le,
    tf_sign,
)

HALF = Fraction(1, 2)


def pair(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + y


def unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def family_of(a: int) -> int:
    """The family ``j`` with ``a`` in ``A_j``."""
    if a < 1:
        raise ValueError("tower indices start at 1")
    return unpair(a - 1)[0]


def family_indices(j: int) -> Iterator[int]:
    for k in count():
        yield pair(j, k) + 1


# towers up to 2**32 are carried as plain rationals
SMALL_TOWER = 5


def tower(a: int) -> TowerForm:
    if a <= SMALL_TOWER:
        return TowerForm((), 1 << (1 << a))
    return TowerForm.tower(a)


def interval(a: int) -> tuple[TowerForm, TowerForm]:
    t = tower(a)
    return t - a, t + a


def left_end_exceeds(a: int, n) -> bool:
    """``2**(2**a) - a > n``."""
    return tf_sign(tower(a) - a - as_fraction(n)) > 0


# -- thresholds ----------------------------------------------------------------

def xi_predicate(m: int, x: int) -> bool:
    """``2**(2**x) - x >= m*(1 + m + m**2*(2**(2**(x-1)) + x))`` for integer x >= 1."""
    rhs = m * (1 + m + m * m * (tower(x - 1) + x))
    return tf_sign(tower(x) - x - rhs) >= 0


def _tail_condition(m: int, x: int) -> bool:
    rhs = m * (1 + m) + x + 2 * m * m * (tower(x - 2) + x)
    return tf_sign(tower(x - 1) - rhs) >= 0


TAIL_WINDOW = 8


@dataclass(frozen=True)
class Thresholds:
    m: int
    xi: int
    Xi: TowerForm
    tail_certified: bool = True

    def to_json(self) -> dict:
        return {"m": self.m, "xi": self.xi, "Xi": self.Xi.to_json()}

    @property
    def Xi_int(self) -> int:
        return int(self.Xi.expand())


@lru_cache(maxsize=None)
def xi(m: int) -> Thresholds:
    if m < 1:
        raise ValueError("m must be a positive integer")
    x = 1
    while True:
        window = [xi_predicate(m, y) for y in range(x, x + TAIL_WINDOW + 1)]
        if all(window):
            tail = _tail_condition(m, x + TAIL_WINDOW)
            if tail:
                return Thresholds(m, x, TowerForm.tower(x) + x, tail)
            x += 1
            continue
        # restart just past the last failure inside the window
        x += max(i for i, ok in enumerate(window) if not ok) + 1


# -- membership ----------------------------------------------------------------

def _candidate_indices(q: TowerForm) -> list[int]:
    """Tower indices ``a`` whose interval could contain ``q`` (q > 0)."""
    bounds = log2_bounds(q)
    if bounds is None or bounds[0][0] is None:
        v = expand_if_small(q)
        hi = v.numerator // v.denominator + 1
        out = []
        for a in count(1):
            if (1 << a) > hi.bit_length() + 1:
                break
            out.append(a)
        return out
    (top, c_lo), (_, c_hi) = bounds
    # q in I_a forces 2**a within (log2 q - 1, log2 q + 1)
    out = []
    if pow2_plus_ge(top, c_hi + 1, top, 0) and pow2_plus_ge(top, 0, top, c_lo - 1):
        out.append(top)
    a = top + 1
    while pow2_plus_ge(top, c_hi + 1, a, 0):
        out.append(a)
        a += 1
    a = top - 1
    while a >= 1 and pow2_plus_ge(a, 0, top, c_lo - 1):
        out.append(a)
        a -= 1
    return sorted(out)


def containing_index(q) -> int | None:
    """The tower index ``a`` with ``q`` in ``[2**(2**a) - a, 2**(2**a) + a]``, if any."""
    q = TowerForm.coerce(q)
    if len(q.terms) == 1 and q.terms[0][1] == 1:
        # q = 2**(2**a) + r: the intervals are disjoint, so I_a is the only
        # candidate unless r is nearly as large as the tower itself
        a = q.terms[0][0]
        if abs(q.r) <= a:
            return a
        if not q.r or log2_ceil_bound(q.r) < (1 << min(a, 64)) - 1:
            return None
    if tf_sign(q) <= 0:
        return None
    for a in _candidate_indices(q):
        if tf_abs_le(q - tower(a), a):
            return a
    return None


def thick_member(j: int, q) -> bool:
    a = containing_index(q)
    return a is not None and family_of(a) == j


@lru_cache(maxsize=1 << 16)
def marker_index(j: int, n: int) -> int:
    for a in family_indices(j):
        if left_end_exceeds(a, n):
            return a
    raise AssertionError("unreachable")


@lru_cache(maxsize=1 << 16)
def marker(j: int, n: int) -> TowerForm:
    a = marker_index(j, n)
    return tower(a) - a


def trimmed_member(j: int, n: int, q) -> bool:
    q = TowerForm.coerce(q)
    return (thick_member(j, q)
            and q != marker(j, n)
            and tf_sign(q - n) > 0)


@lru_cache(maxsize=1 << 16)
def canonical_element(j: int, n: int) -> TowerForm:
    return marker(j, n) + HALF


# -- node indexing -------------------------------------------------------------

def _binom(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        return 0
    return comb(n, k)


def _count_below_sum(length: int, total: int) -> int:
    """Number of length-``length`` sequences over N with sum < ``total``."""
    if total <= 0:
        return 0
    return _binom(total - 1 + length, length)


def extend_rank(length: int, total: int, rank: int, c: int) -> int:
    """Within-class rank of ``s + (c,)`` from that of ``s`` (length, sum known)."""
    return rank + _binom(total + c + length, length) - _binom(total + length, length)


def family_code(length: int, total: int, rank: int) -> int:
    if length == 0:
        return 0
    return 1 + pair(length - 1, _count_below_sum(length, total) + rank)


def node_family_index(path: Sequence[int]) -> int:
    """Bijection from finite sequences over N onto N.

    Sequences are grouped by length, then by sum, then ordered by last
    element and recursively by prefix.  ``code(child) > code(parent)``.
    """
    length, total, rank = 0, 0, 0
    for c in path:
        if c < 0:
            raise ValueError("path entries must be nonnegative")
        rank = extend_rank(length, total, rank, c)
        length += 1
        total += c
    return family_code(length, total, rank)


def decode_family_index(code: int) -> tuple[int, ...]:
    if code < 0:
        raise ValueError("codes are nonnegative")
    if code == 0:
        return ()
    length, overall = unpair(code - 1)
    length += 1
    total = 0
    while _count_below_sum(length, total + 1) <= overall:
        total += 1
    rank = overall - _count_below_sum(length, total)
    out = []
    while length:
        prefix_len = length - 1
        c = 0
        while True:
            nxt = _binom(total + prefix_len, prefix_len) - _binom(total - c - 1 + prefix_len, prefix_len)
            if nxt > rank:
                break
            c += 1
        offset = _binom(total + prefix_len, prefix_len) - _binom(total - c + prefix_len, prefix_len)
        rank -= offset
        out.append(c)
        total -= c
        length -= 1
    return tuple(reversed(out))
