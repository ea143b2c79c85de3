"""Exact checks of the separation lemma, the coordinate bound for linear
combinations of limit points, and the tree conditions.

Every check works on exact values; a failing check is a defect in this
package, never a numerical accident.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

from .exact_arith import (
    TowerForm,
    as_fraction,
    encode_exact,
    encode_scalar,
    normalize,
    tf_abs_ge,
    tf_sign,
)
from .thick_family import (
    family_indices,
    marker,
    node_family_index,
    thick_member,
    tower,
    trimmed_member,
    xi,
)
from .tree import (
    DEFAULT_TREE,
    SEPARATION,
    Branch,
    ConstructionTree,
    CoordinateGrid,
    TreeNode,
    disjointness_certificate,
    encode_child_index,
    eval_coordinate,
    ChildRule,
    tuple_encode,
)


class InvalidInstance(ValueError):
    """An instance violates a precondition; ``clause`` names which."""

    def __init__(self, clause: str, detail: str = ""):
        super().__init__(f"{clause}: {detail}" if detail else clause)
        self.clause = clause


class RangeTooLow(ValueError):
    def __init__(self, k: int, threshold: int):
        super().__init__(f"coordinate {k} is not above max(l_E, Xi_m) = {threshold}")
        self.k = k
        self.threshold = threshold


def in_window(lam, m: int) -> bool:
    """``lam`` in ``[-m, m]`` minus the open interval ``(-1/m, 1/m)``."""
    lam = abs(as_fraction(lam))
    return Fraction(1, m) <= lam <= m


def smallest_window(lambdas: Sequence, m_max: int) -> int | None:
    """Smallest ``m <= m_max`` whose window holds every coefficient and ``m >= len``."""
    for m in range(max(1, len(lambdas)), m_max + 1):
        if all(in_window(lam, m) for lam in lambdas):
            return m
    return None


# -- separation lemma ----------------------------------------------------------

@dataclass(frozen=True)
class Lemma1Instance:
    m: int
    families: tuple[int, ...]
    lambdas: tuple[Fraction, ...]
    points: tuple

    @classmethod
    def from_paths(cls, m: int, paths: Sequence[Sequence[int]], lambdas, points):
        return cls(m, tuple(node_family_index(p) for p in paths),
                   tuple(as_fraction(x) for x in lambdas), tuple(points))

    def validate(self) -> None:
        n = len(self.families)
        if not (len(self.lambdas) == n == len(self.points)):
            raise InvalidInstance("shape", "families, lambdas and points differ in length")
        if not 1 <= n <= self.m:
            raise InvalidInstance("n <= m", f"n={n}, m={self.m}")
        if len(set(self.families)) != n:
            raise InvalidInstance("distinct sets", f"families {self.families}")
        for lam in self.lambdas:
            if not in_window(lam, self.m):
                raise InvalidInstance("lambda range", f"{lam} outside [-m,m]\\(-1/m,1/m)")
        for j, x in zip(self.families, self.points):
            if not thick_member(j, x):
                raise InvalidInstance("x_i in T_i", f"{encode_exact(x)} not in family {j}")
        bound = xi(self.m).Xi
        if not any(tf_sign(abs(TowerForm.coerce(x)) - bound) > 0 for x in self.points):
            raise InvalidInstance("not inside [-Xi_m, Xi_m]", f"Xi_{self.m} = {xi(self.m).Xi_int}")

    def to_json(self) -> dict:
        return {"m": self.m, "families": list(self.families),
                "lambda": [encode_scalar(lam) for lam in self.lambdas],
                "points": [encode_exact(normalize(x)) for x in self.points]}


@dataclass(frozen=True)
class Lemma1Result:
    holds: bool
    witness: TowerForm


def lemma1_check(inst: Lemma1Instance) -> Lemma1Result:
    inst.validate()
    total = TowerForm()
    for lam, x in zip(inst.lambdas, inst.points):
        total = total + TowerForm.coerce(x) * lam
    return Lemma1Result(tf_abs_ge(total, inst.m + 1), total)


def _random_lambda(rng: random.Random, m: int) -> Fraction:
    while True:
        q = rng.randint(1, 4)
        p = rng.randint(-m * q, m * q)
        lam = Fraction(p, q)
        if p and in_window(lam, m):
            return lam


def _random_point(rng: random.Random, a: int):
    kind = rng.choice(("left", "right", "canonical", "grid", "grid"))
    t = tower(a)
    if kind == "left":
        return normalize(t - a)
    if kind == "right":
        return normalize(t + a)
    if kind == "canonical":
        return normalize(t - a + Fraction(1, 2))
    r = rng.randint(0, 4)
    g = rng.randint(-a << r, a << r)
    return normalize(t + Fraction(g, 1 << r))


def random_lemma1_instance(rng: random.Random, m_max: int, a_max: int) -> Lemma1Instance:
    m = rng.randint(1, m_max)
    n = rng.randint(1, m)
    owned: dict[int, list[int]] = {}
    for j in range(a_max):
        elems = []
        for a in family_indices(j):
            if a > a_max:
                break
            elems.append(a)
        if elems:
            owned[j] = elems
    threshold = xi(m).xi
    forced = [(j, a) for j, elems in owned.items() for a in elems if a > threshold]
    if not forced:
        raise ValueError(f"a_max={a_max} leaves no tower index above xi_{m}={threshold}")
    j0, a0 = rng.choice(forced)
    others = sorted(set(owned) - {j0})
    chosen = [j0] + rng.sample(others, min(n - 1, len(others)))
    points = [_random_point(rng, a0)]
    points += [_random_point(rng, rng.choice(owned[j])) for j in chosen[1:]]
    lambdas = [_random_lambda(rng, m) for _ in chosen]
    order = list(range(len(chosen)))
    rng.shuffle(order)
    return Lemma1Instance(m, tuple(chosen[i] for i in order),
                          tuple(lambdas[i] for i in order),
                          tuple(points[i] for i in order))


@dataclass
class FuzzReport:
    trials: int
    m_max: int
    a_max: int
    seed: int
    passed: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.passed == self.trials

    def lines(self) -> list[dict]:
        out = [{"kind": "lemma1", "trials": self.trials, "m_max": self.m_max,
                "a_max": self.a_max, "seed": self.seed}]
        out += self.failures
        out.append({"passed": self.passed, "failed": len(self.failures), "ok": self.ok})
        return out


def lemma1_fuzz(trials: int, m_max: int, a_max: int, seed: int) -> FuzzReport:
    if m_max > 6 or a_max > 20:
        raise ValueError("m_max <= 6 and a_max <= 20")
    report = FuzzReport(trials, m_max, a_max, seed)
    for t in range(trials):
        rng = random.Random(f"lemma1:{seed}:{t}")
        inst = random_lemma1_instance(rng, m_max, a_max)
        result = lemma1_check(inst)
        if result.holds:
            report.passed += 1
        else:
            report.failures.append({"trial": t, "instance": inst.to_json(),
                                    "sum": encode_exact(result.witness)})
    return report


# -- linear combinations of limit points ----------------------------------------

def r_and_l(branches: Iterable[Branch], tree: ConstructionTree | None = None) -> tuple[int, int]:
    """``r_E`` (first depth where prefixes separate E) and ``l_E``."""
    tree = tree or DEFAULT_TREE
    branches = [b if isinstance(b, Branch) else Branch(b) for b in branches]
    if not branches:
        raise ValueError("E must be nonempty")
    if len(set(branches)) != len(branches):
        raise ValueError("branches must be pairwise distinct")
    r = 0
    for b1, b2 in combinations(branches, 2):
        k = 0
        while b1[k] == b2[k]:
            k += 1
        r = max(r, k + 1)
    level = max(tree.node(b.prefix(r)).level for b in branches)
    return r, level


@dataclass(frozen=True)
class CombinationSpec:
    m: int
    branches: tuple[Branch, ...]
    lambdas: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.branches) != len(self.lambdas):
            raise ValueError("one coefficient per branch")
        if not 1 <= len(self.branches) <= self.m:
            raise ValueError("need 1 <= |E| <= m")
        if len(set(self.branches)) != len(self.branches):
            raise ValueError("branches must be pairwise distinct")
        for lam in self.lambdas:
            if not in_window(lam, self.m):
                raise ValueError(f"coefficient {lam} outside the m={self.m} window")

    @classmethod
    def build(cls, m: int, stems: Sequence[Sequence[int]], lambdas: Sequence) -> "CombinationSpec":
        return cls(m, tuple(Branch(s) for s in stems), tuple(as_fraction(x) for x in lambdas))

    def threshold(self) -> int:
        return max(r_and_l(self.branches)[1], xi(self.m).Xi_int)

    def coordinate(self, k: int):
        total = TowerForm()
        for lam, b in zip(self.lambdas, self.branches):
            total = total + TowerForm.coerce(eval_coordinate(b, k)) * lam
        return normalize(total)


@dataclass
class Claim2Report:
    spec: CombinationSpec
    threshold: int
    entries: list[tuple[int, object, bool]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(ok for _, _, ok in self.entries)

    def lines(self) -> list[dict]:
        head = {"kind": "claim2", "m": self.spec.m,
                "stems": [b.to_json() for b in self.spec.branches],
                "lambda": [encode_scalar(x) for x in self.spec.lambdas],
                "threshold": self.threshold}
        body = [{"k": k, "value": encode_exact(v), "pass": ok} for k, v, ok in self.entries]
        return [head] + body + [{"checked": len(self.entries), "ok": self.ok}]


def claim2_check(spec: CombinationSpec, ks: Iterable[int]) -> Claim2Report:
    ks = list(ks)
    threshold = spec.threshold()
    for k in ks:
        if k <= threshold:
            raise RangeTooLow(k, threshold)
    report = Claim2Report(spec, threshold)
    for k in ks:
        value = spec.coordinate(k)
        report.entries.append((k, value, tf_abs_ge(TowerForm.coerce(value), 1)))
    return report


# -- tree conditions -------------------------------------------------------------

@dataclass
class TreeReport:
    depth: int
    fanout: int
    nodes: int = 0
    separation_pairs: int = 0
    containment_coords: int = 0
    density_targets: int = 0
    max_density_index: dict[int, int] = field(default_factory=dict)
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[dict]:
        return ([{"kind": "tree", "depth": self.depth, "fanout": self.fanout}]
                + self.violations
                + [{"nodes": self.nodes, "separation_pairs": self.separation_pairs,
                    "containment_coords": self.containment_coords,
                    "density_targets": self.density_targets,
                    "max_density_index": {str(r): i for r, i in sorted(self.max_density_index.items())},
                    "ok": self.ok}])


def check_children(s: TreeNode, fanout: int, report: TreeReport,
                   tree: ConstructionTree | None = None) -> None:
    tree = tree or DEFAULT_TREE
    kids = [tree.child(s, i) for i in range(fanout)]
    j = s.family
    for i, c in enumerate(kids):
        if not c.level > s.level + i:
            report.violations.append({"condition": "2", "path": list(c.path)})
        for n in range(s.level, c.level):
            v = c.value(n)
            report.containment_coords += 1
            if n == c.marker_coord:
                ok = TowerForm.coerce(v) == marker(j, n)
            else:
                ok = trimmed_member(j, n, v)
            if not ok:
                report.violations.append({"condition": "3", "path": list(c.path), "n": n,
                                          "value": encode_exact(v)})
    for i, i2 in combinations(range(fanout), 2):
        report.separation_pairs += 1
        cert = disjointness_certificate(s, i, i2, tree)
        if TowerForm.coerce(cert.gap) < SEPARATION:
            report.violations.append({"condition": "1", "path": list(s.path),
                                      "siblings": [i, i2], "gap": encode_exact(cert.gap)})


DENSITY_WIDTH = 2
DENSITY_EXHAUSTIVE = 1024
DENSITY_SAMPLES = 96


def density_targets(s: TreeNode, r: int, rng: random.Random) -> list[tuple[int, ...]]:
    """Grid positions of targets on ``[l_s, l_s + 2)`` avoiding the markers' 1/4 zones.

    All targets when there are at most ``DENSITY_EXHAUSTIVE`` of them,
    otherwise the corner cases plus a seeded sample.
    """
    grids = [CoordinateGrid(s.family, s.level + d, r, exclude_near_marker=True)
             for d in range(DENSITY_WIDTH)]
    sizes = [g.size() for g in grids]
    total = 1
    for size in sizes:
        total *= size
    if total <= DENSITY_EXHAUSTIVE:
        return list(product(*(range(size) for size in sizes)))
    corners = list(product(*((0, size - 1) for size in sizes)))
    sample = [tuple(rng.randrange(size) for size in sizes) for _ in range(DENSITY_SAMPLES)]
    return corners + sample


def check_density(s: TreeNode, r: int, report: TreeReport, seed: int = 0,
                  tree: ConstructionTree | None = None) -> None:
    tree = tree or DEFAULT_TREE
    rng = random.Random(f"density:{seed}:{s.family}:{r}")
    grids = [CoordinateGrid(s.family, s.level + d, r, exclude_near_marker=True)
             for d in range(DENSITY_WIDTH)]
    for positions in density_targets(s, r, rng):
        target = [g[c] for g, c in zip(grids, positions)]
        i = encode_child_index(ChildRule(tuple_encode(positions), DENSITY_WIDTH, r))
        c = tree.detached_child(s, i)
        report.density_targets += 1
        report.max_density_index[r] = max(report.max_density_index.get(r, 0), i)
        got = [c.value(s.level + d) for d in range(DENSITY_WIDTH)]
        if any(TowerForm.coerce(x) != y for x, y in zip(got, target)):
            report.violations.append({"condition": "3-density", "path": list(s.path), "r": r,
                                      "child": i, "target": [encode_exact(x) for x in target]})


def verify_tree(depth: int, fanout: int, resolutions: int = 3, density_depth: int = 1,
                seed: int = 0, tree: ConstructionTree | None = None) -> TreeReport:
    """Conditions (1)-(3) on every internal node above ``depth``, density near the root."""
    tree = tree or DEFAULT_TREE
    report = TreeReport(depth, fanout)
    level: list[TreeNode] = [tree.root()]
    report.nodes = 1
    for d in range(depth):
        nxt = []
        for s in level:
            check_children(s, fanout, report, tree)
            if d < density_depth:
                for r in range(1, resolutions + 1):
                    check_density(s, r, report, seed, tree)
            nxt.extend(tree.child(s, i) for i in range(fanout))
        report.nodes += len(nxt)
        level = nxt
    return report
