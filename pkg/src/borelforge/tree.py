"""Lazy tree of points ``z_s`` and levels ``l_s`` indexed by finite sequences.

Nodes are created on demand and memoised on their parent, so a branch can be
followed tens of thousands of levels down without materialising anything
else.  Children copy the parent's coordinates below ``l_s`` exactly; the
coordinates in ``[l_s, l_child)`` are chosen by a deterministic rule from the
child index ``i``:

* ``i`` unpairs to ``(x, v)`` and ``x`` to ``(w - 1, r - 1)``: a window
  length ``w``, a grid resolution ``2**-r`` and a selector ``v``;
* window coordinates ``[l_s, l_s + w)`` take the ``v``-th tuple of grid
  points of ``T_{j,n}`` (each position taken modulo the grid size); at a coordinate used as an earlier sibling's marker
  the points within 1/4 of the marker are off limits;
* coordinate ``M_i`` carries the marker itself, every other coordinate the
  canonical element ``marker + 1/2``.

Siblings are separated at ``M_min(i, i')`` by at least 1/4, and every level
is at least 4, so their balls are disjoint.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import islice
from typing import Callable, Iterable, Mapping, Sequence

from .exact_arith import TowerForm, normalize, tf_abs_le, tf_sign
from .thick_family import (
    canonical_element,
    containing_index,
    extend_rank,
    family_code,
    family_indices,
    marker,
    marker_index,
    pair,
    tower,
    unpair,
)

MIN_LEVEL = 4
SEPARATION = Fraction(1, 4)


class SelectorExhausted(LookupError):
    """The selector points past the finite grid at this resolution."""


class CertificateNotFound(AssertionError):
    """Two siblings have no separating coordinate; the construction is broken."""


# -- child index decoding ------------------------------------------------------

@dataclass(frozen=True)
class ChildRule:
    selector: int
    window: int
    resolution: int


def decode_child_index(i: int) -> ChildRule:
    x, v = unpair(i)
    w1, r1 = unpair(x)
    return ChildRule(v, w1 + 1, r1 + 1)


def encode_child_index(rule: ChildRule) -> int:
    return pair(pair(rule.window - 1, rule.resolution - 1), rule.selector)


def tuple_decode(v: int, width: int) -> tuple[int, ...]:
    out = []
    for _ in range(width - 1):
        head, v = unpair(v)
        out.append(head)
    out.append(v)
    return tuple(out)


def tuple_encode(items: Sequence[int]) -> int:
    v = items[-1]
    for head in reversed(items[:-1]):
        v = pair(head, v)
    return v


# -- grid of admissible window values ------------------------------------------

class CoordinateGrid:
    """Grid points ``2**-r * Z`` inside ``T_{j,n}`` over the first ``r + 1`` intervals.

    Order: the marker's interval from ``t + 1/2`` up, then ``[t + 1/4, t + 1/2)``,
    then the later intervals, and last the points in ``(t, t + 1/4)``, which
    are dropped when ``exclude_near_marker`` is set.  Keeping the near-marker
    points at the tail makes every other point's position independent of the
    exclusion.
    """

    def __init__(self, j: int, n: int, r: int, exclude_near_marker: bool = False):
        self.j, self.n, self.r = j, n, r
        self.exclude = exclude_near_marker
        self.scale = 1 << r
        self.first = marker_index(j, n)
        self.marker = marker(j, n)
        self.intervals = list(islice((a for a in family_indices(j) if a >= self.first), r + 1))
        self.g_half = self.scale // 2
        self.g_quarter = -(-self.scale // 4)
        top = 2 * self.first * self.scale
        # segments as (interval index a, g_start, g_stop) over left-end offsets
        self.segments = [(self.first, self.g_half, top + 1),
                         (self.first, self.g_quarter, self.g_half)]
        for a in self.intervals[1:]:
            self.segments.append((a, 0, 2 * a * self.scale + 1))
        self.tail = (self.first, 1, self.g_quarter)

    def _all_segments(self):
        return self.segments if self.exclude else self.segments + [self.tail]

    def size(self) -> int:
        """Number of grid points; may exceed ``sys.maxsize``, unlike ``len``."""
        return sum(max(0, stop - start) for _, start, stop in self._all_segments())

    def __len__(self) -> int:
        return self.size()

    def __getitem__(self, c: int):
        if c < 0:
            raise IndexError(c)
        for a, start, stop in self._all_segments():
            span = max(0, stop - start)
            if c < span:
                return normalize(tower(a) - a + Fraction(start + c, self.scale))
            c -= span
        raise SelectorExhausted(f"grid position beyond size at j={self.j}, n={self.n}, r={self.r}")

    def index(self, value) -> int:
        """Position of ``value`` in the grid; ValueError if absent."""
        value = TowerForm.coerce(value)
        a = containing_index(value)
        if a is None:
            raise ValueError("value is outside every tower interval")
        offset = normalize(value - (tower(a) - a))
        if not isinstance(offset, Fraction) or (offset * self.scale).denominator != 1:
            raise ValueError("value is off the grid")
        g = int(offset * self.scale)
        pos = 0
        for sa, start, stop in self._all_segments():
            if sa == a and start <= g < stop:
                return pos + g - start
            pos += max(0, stop - start)
        raise ValueError("value is not in this grid")

    def values(self) -> Iterable:
        for c in range(self.size()):
            yield self[c]


# -- nodes ---------------------------------------------------------------------

class TreeNode:
    """A node ``s`` with point ``z_s`` and level ``l_s``.

    Only the window ``[parent.level, parent.level + w)`` is stored; the marker
    coordinate and the canonical coordinates above are computed on request,
    and lower coordinates live on ancestors.  ``marker_coord`` is ``M`` (None for the root) and
    ``parent_family`` the thick-set index the window was drawn from.
    """

    __slots__ = ("parent", "index", "depth", "level", "marker_coord", "window",
                 "parent_family", "family", "_length", "_sum", "_rank",
                 "children", "_path")

    def __init__(self, parent: TreeNode | None, index: int | None, level: int,
                 marker_coord: int | None, window: dict[int, object]):
        self.parent = parent
        self.index = index
        self.level = level
        self.marker_coord = marker_coord
        self.window = window
        self.children: dict[int, TreeNode] = {}
        self._path = None
        if parent is None:
            self.depth = 0
            self._length = self._sum = self._rank = 0
            self.parent_family = None
        else:
            self.depth = parent.depth + 1
            self._rank = extend_rank(parent._length, parent._sum, parent._rank, index)
            self._length = parent._length + 1
            self._sum = parent._sum + index
            self.parent_family = parent.family
        self.family = family_code(self._length, self._sum, self._rank)

    @property
    def path(self) -> tuple[int, ...]:
        if self._path is None:
            out = []
            node = self
            while node.parent is not None:
                out.append(node.index)
                node = node.parent
            self._path = tuple(reversed(out))
        return self._path

    @property
    def l(self) -> int:
        return self.level

    def value(self, n: int):
        """Coordinate ``n`` of ``z_s``."""
        if n < 0:
            raise IndexError(n)
        node = self
        while node.parent is not None and n < node.parent.level:
            node = node.parent
        if node.parent is None:
            return Fraction(0)
        if n in node.window:
            return node.window[n]
        if n == node.marker_coord:
            return normalize(marker(node.parent_family, n))
        return normalize(canonical_element(node.parent_family, n))

    def prefix(self, length: int | None = None) -> list:
        length = self.level if length is None else length
        return [self.value(n) for n in range(length)]

    def __repr__(self):
        return f"TreeNode(path={self.path}, l={self.level}, M={self.marker_coord})"


class ConstructionTree:
    """Owner of the lazily built node tree; safe for concurrent queries."""

    def __init__(self):
        self._lock = threading.RLock()
        self._root = TreeNode(None, None, 0, None, {})

    def root(self) -> TreeNode:
        return self._root

    @staticmethod
    def sibling_marker(s: TreeNode, i: int) -> int:
        """``M_i = max(l_s + w_i, M_{i-1} + 1, l_s + 1)`` with ``M_{-1} = l_s``.

        Every child index has ``w_i <= i + 1``, so the recursion collapses to
        ``l_s + i + 1``.
        """
        return s.level + i + 1

    def child(self, s: TreeNode, i: int) -> TreeNode:
        if i < 0:
            raise ValueError("child index must be nonnegative")
        node = s.children.get(i)
        if node is not None:
            return node
        with self._lock:
            node = s.children.get(i)
            if node is None:
                node = self._build_child(s, i)
                s.children[i] = node
            return node

    def _build_child(self, s: TreeNode, i: int) -> TreeNode:
        rule = decode_child_index(i)
        j = s.family
        ls = s.level
        m_i = self.sibling_marker(s, i)
        level = max(ls + i + 1, m_i + 1, MIN_LEVEL)
        window: dict[int, object] = {}
        picks = tuple_decode(rule.selector, rule.window)
        for offset, c in enumerate(picks):
            n = ls + offset
            # earlier siblings put their markers on ls+1 .. ls+i
            grid = CoordinateGrid(j, n, rule.resolution, exclude_near_marker=ls < n <= ls + i)
            # selectors past the grid wrap around, so every index names a child
            window[n] = grid[c % grid.size()]
        return TreeNode(s, i, level, m_i, window)

    def detached_child(self, s: TreeNode, i: int) -> TreeNode:
        """Build ``s^i`` without caching it on ``s`` (for bulk probing)."""
        node = s.children.get(i)
        return node if node is not None else self._build_child(s, i)

    def node(self, path: Iterable[int]) -> TreeNode:
        node = self._root
        for i in path:
            node = self.child(node, i)
        return node


DEFAULT_TREE = ConstructionTree()


def root() -> TreeNode:
    return DEFAULT_TREE.root()


def child(s: TreeNode, i: int) -> TreeNode:
    return DEFAULT_TREE.child(s, i)


def node_at(path: Iterable[int]) -> TreeNode:
    return DEFAULT_TREE.node(path)


# -- balls ---------------------------------------------------------------------

@dataclass(frozen=True)
class BallPrefix:
    """``{x : max_{i<l} |x(i) - values[i]| <= 2**-l}``."""

    values: tuple
    radius_exponent: int

    @property
    def radius(self) -> Fraction:
        return Fraction(1, 1 << self.radius_exponent)

    def contains(self, x: Sequence | Mapping | Callable[[int], object]) -> bool:
        get = x if callable(x) else x.__getitem__
        eps = self.radius
        return all(tf_abs_le(TowerForm.coerce(get(i)) - v, eps)
                   for i, v in enumerate(self.values))


def ball(s: TreeNode) -> BallPrefix:
    return BallPrefix(tuple(s.prefix()), s.level)


# -- branches and limit points ----------------------------------------------------

class Branch:
    """A point of the Baire space: a finite stem followed by zeros."""

    __slots__ = ("stem",)

    def __init__(self, stem: Iterable[int] = ()):
        stem = list(stem)
        if any(c < 0 for c in stem):
            raise ValueError("branch entries must be nonnegative")
        while stem and stem[-1] == 0:
            stem.pop()
        self.stem = tuple(stem)

    def __getitem__(self, k: int) -> int:
        return self.stem[k] if k < len(self.stem) else 0

    def prefix(self, m: int) -> tuple[int, ...]:
        return tuple(self[k] for k in range(m))

    def __eq__(self, other):
        return isinstance(other, Branch) and self.stem == other.stem

    def __hash__(self):
        return hash(self.stem)

    def __repr__(self):
        return f"Branch({list(self.stem)}+0^inf)"

    def to_json(self) -> list[int]:
        return list(self.stem)


class LazyPoint:
    """The limit point ``h(b)`` with memoised coordinates."""

    def __init__(self, branch: Branch, tree: ConstructionTree | None = None):
        self.branch = branch
        self.tree = tree or DEFAULT_TREE
        self._nodes = [self.tree.root()]
        self._memo: dict[int, object] = {}
        self._lock = threading.Lock()

    def node_for(self, k: int) -> TreeNode:
        """First prefix node with level above ``k``."""
        with self._lock:
            nodes = self._nodes
            if nodes[-1].level <= k:
                while nodes[-1].level <= k:
                    d = len(nodes) - 1
                    nodes.append(self.tree.child(nodes[-1], self.branch[d]))
                return nodes[-1]
        lo, hi = 0, len(nodes) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if nodes[mid].level > k:
                hi = mid
            else:
                lo = mid + 1
        return nodes[lo]

    def prefix_node(self, m: int) -> TreeNode:
        with self._lock:
            while len(self._nodes) <= m:
                d = len(self._nodes) - 1
                self._nodes.append(self.tree.child(self._nodes[-1], self.branch[d]))
            return self._nodes[m]

    def __call__(self, k: int):
        value = self._memo.get(k)
        if value is None:
            value = self.node_for(k).value(k)
            self._memo[k] = value
        return value


_POINTS: dict[Branch, LazyPoint] = {}
_POINTS_LOCK = threading.Lock()


def lazy_point(branch: Branch) -> LazyPoint:
    with _POINTS_LOCK:
        point = _POINTS.get(branch)
        if point is None:
            point = _POINTS[branch] = LazyPoint(branch)
        return point


def eval_coordinate(branch: Branch | Sequence[int], k: int):
    if not isinstance(branch, Branch):
        branch = Branch(branch)
    if k < 0:
        raise IndexError(k)
    return lazy_point(branch)(k)


# -- sibling separation --------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    coordinate: int
    gap: Fraction | TowerForm


def disjointness_certificate(s: TreeNode, i: int, i2: int,
                             tree: ConstructionTree | None = None) -> Certificate:
    if i == i2:
        raise ValueError("siblings must be distinct")
    tree = tree or DEFAULT_TREE
    a, b = tree.child(s, i), tree.child(s, i2)
    bound = Fraction(1, 1 << a.level) + Fraction(1, 1 << b.level)
    first = a if i < i2 else b
    candidates = [first.marker_coord] + list(range(min(a.level, b.level)))
    for n in candidates:
        diff = TowerForm.coerce(a.value(n)) - b.value(n)
        if not tf_abs_le(diff, bound):
            gap = normalize(diff if tf_sign(diff) > 0 else -diff)
            return Certificate(n, gap)
    raise CertificateNotFound(f"children {i} and {i2} of {s.path} are not separated")
