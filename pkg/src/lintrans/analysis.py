"""Cycle structure, multiplier sets M(H) and direction sets D_H."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import BIsMinusOne, GViolatesHypotheses, InvariantViolation
from .maps import FieldMap, GroundFn, ScalarFn, is_bijection
from .perms import _check_cert, bk
from .translators import TranslatorCert, lambda_space


@dataclass(frozen=True)
class CycleDecomposition:
    """Cycles start at their smallest index and are sorted by that index."""

    cycles: tuple
    fixed_count: int

    def lengths(self) -> Counter:
        return Counter(len(c) for c in self.cycles)

    def to_lists(self):
        return [list(c) for c in self.cycles]


def _canonical(cycles):
    out = []
    for c in cycles:
        i = c.index(min(c))
        out.append(tuple(c[i:] + c[:i]))
    out.sort(key=lambda c: c[0])
    fixed = sum(1 for c in out if len(c) == 1)
    return CycleDecomposition(tuple(out), fixed)


def cycle_structure_brute(P) -> CycleDecomposition:
    """Orbit-following decomposition of a permutation table."""
    table = [int(v) for v in P.table]
    seen = [False] * len(table)
    cycles = []
    for start in range(len(table)):
        if seen[start]:
            continue
        cycle, x = [], start
        while not seen[x]:
            seen[x] = True
            cycle.append(x)
            x = table[x]
        if x != start:
            raise InvariantViolation("table is not a permutation")
        cycles.append(cycle)
    return _canonical(cycles)


def cycle_structure_closed_form(f: GroundFn, gamma: int, cert: TranslatorCert) -> CycleDecomposition:
    """Cycles of x + gamma f(x) without iterating the table.

    Zeros of f are the fixed points.  Every other u lies on the cycle
    u_k = u + B_k gamma f(u), k = 0 .. l-1, where l = p when b = 0 and
    l = ord(b + 1) otherwise.
    """
    tower = f.tower
    b = _check_cert(f, gamma, cert)
    if b == tower.minus_one:
        raise BIsMinusOne("x + gamma f(x) is not a permutation when b = -1")
    length = tower.p if b == 0 else tower.mult_order(tower.add(b, 1))
    zeros = f.zeros()
    N = tower.order - len(zeros)
    if N % length:
        raise InvariantViolation(f"{N} moved points do not split into cycles of length {length}")
    steps = [tower.mul(bk(tower, k, b).value, gamma) for k in range(length)]
    seen = np.zeros(tower.order, dtype=bool)
    seen[zeros] = True
    cycles = [[int(z)] for z in zeros]
    for u in np.flatnonzero(~seen):
        if seen[u]:
            continue
        fu = f(int(u))
        orbit = [tower.add(int(u), tower.mul(s, fu)) for s in steps]
        seen[orbit] = True
        cycles.append(orbit)
    decomposition = _canonical(cycles)
    if len(decomposition.cycles) - decomposition.fixed_count != N // length:
        raise InvariantViolation("closed-form orbits overlap")
    return decomposition


# -- M(H) and D_H --------------------------------------------------------------


@dataclass(frozen=True)
class MultiplierSet:
    members: frozenset

    def __contains__(self, c):
        return int(c) in self.members

    def __len__(self):
        return len(self.members)

    def sorted(self):
        return sorted(self.members)


@dataclass(frozen=True)
class DirectionSet:
    members: frozenset

    def __contains__(self, c):
        return int(c) in self.members

    def __len__(self):
        return len(self.members)

    def sorted(self):
        return sorted(self.members)


def _as_table(H):
    return H.as_field_map().table if isinstance(H, GroundFn) else H.table


def mob_set(H) -> MultiplierSet:
    """{c : x -> H(x) + c x is a bijection}, c = 0 included when H is."""
    tower = H.tower
    table = _as_table(H)
    xs = tower.elements()
    members = [c for c in range(tower.order) if is_bijection(tower.add(table, tower.mul(c, xs)))]
    return MultiplierSet(frozenset(members))


def direction_set(H) -> DirectionSet:
    """{(H(x) - H(y)) / (x - y) : x != y}, one quotient per unordered pair."""
    tower = H.tower
    table = _as_table(H)
    found = set()
    for x in range(tower.order - 1):
        ys = np.arange(x + 1, tower.order, dtype=np.int64)
        num = tower.sub(table[x], table[ys])
        den = tower.sub(x, ys)
        found.update(np.unique(tower.div(num, den)).tolist())
    return DirectionSet(frozenset(int(v) for v in found))


@dataclass
class DualityReport:
    multipliers: MultiplierSet
    directions: DirectionSet
    violations: list

    @property
    def ok(self):
        return not self.violations


def duality_check(H) -> DualityReport:
    """c in M(H) iff -c not in D_H, for every c in the field."""
    tower = H.tower
    M, D = mob_set(H), direction_set(H)
    bad = [c for c in range(tower.order) if (c in M) == (tower.neg(c) in D)]
    return DualityReport(M, D, bad)


@dataclass
class InclusionReport:
    left: frozenset
    multipliers: MultiplierSet
    missing: list

    @property
    def ok(self):
        return not self.missing


def translator_direction_inclusion(f: GroundFn) -> InclusionReport:
    """{d != 0 : 1/d in Lambda*(f), f(1/d) - f(0) != -1} is inside M(f)."""
    tower = f.tower
    space = lambda_space(f)
    minus_one = tower.minus_one
    left = frozenset(
        tower.inv(alpha) for alpha, a in space.values.items() if alpha and a != minus_one
    )
    M = mob_set(f)
    return InclusionReport(left, M, sorted(left - M.members))


@dataclass
class DirBoundReport:
    h: GroundFn
    predicted: frozenset
    multipliers: MultiplierSet
    bound: int

    @property
    def subset_holds(self):
        return self.predicted <= self.multipliers.members

    @property
    def bound_holds(self):
        return len(self.multipliers) >= self.bound


def th_dir_bound(g: ScalarFn, alpha: int) -> DirBoundReport:
    """For h(x) = g(Tr(alpha x)), check {d != 0 : Tr(alpha/d) = 0} is in M(h)."""
    tower = g.tower
    alpha = int(alpha)
    if alpha == 0:
        raise GViolatesHypotheses("alpha must be nonzero")
    if g(0) != 0 or tower.minus_one in set(g.table.tolist()):
        raise GViolatesHypotheses("need g(0) = 0 and -1 outside the image of g")
    xs = tower.elements()
    h = GroundFn(tower, g.table[tower.trace(tower.mul(alpha, xs))], {"name": "g(Tr(alpha x))", "alpha": alpha})
    nonzero = xs[1:]
    keep = tower.trace(tower.mul(alpha, tower.inv(nonzero))) == 0
    predicted = frozenset(int(d) for d in nonzero[keep])
    report = DirBoundReport(h, predicted, mob_set(h), tower.order // tower.q - 1)
    if not (report.subset_holds and report.bound_holds):
        raise InvariantViolation("multiplier set misses predicted members")
    return report
