"""Function objects on the tower, all materialized as dense index tables.

``GroundFn``  F_{q^n} -> F_q      (f, g, h o f, ...)
``FieldMap``  F_{q^n} -> F_{q^n}  (H, G, L, F, ...)
``ScalarFn``  F_q -> F_q          (the scalar h of the h o f constructions)
``LinearMap`` a q-polynomial sum_i a_i X^(q^i), also usable as a FieldMap
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ExponentOutOfRange, LengthMismatch, NotLinear
from .field import FieldTower, tower_from_spec


def _freeze(table):
    arr = np.array(table, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class _Table:
    tower: FieldTower
    table: np.ndarray
    origin: dict | None = field(default=None, compare=False)

    _length_attr = "order"
    _range_attr = "order"

    def __post_init__(self):
        table = _freeze(self.table)
        object.__setattr__(self, "table", table)
        expected = getattr(self.tower, self._length_attr)
        if table.shape != (expected,):
            raise LengthMismatch(f"{type(self).__name__} needs {expected} entries, got {table.shape}")
        bound = getattr(self.tower, self._range_attr)
        if table.size and (table.min() < 0 or table.max() >= bound):
            raise ValueError(f"{type(self).__name__} entries must lie in [0, {bound})")

    def __call__(self, x):
        r = self.table[np.asarray(x, dtype=np.int64)]
        return int(r) if np.ndim(r) == 0 else r

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.tower == other.tower
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self):
        return hash((type(self).__name__, self.tower, self.table.tobytes()))

    def __len__(self):
        return len(self.table)


class GroundFn(_Table):
    """A map F_{q^n} -> F_q; entries are ground indices in [0, q)."""

    _range_attr = "q"

    def as_field_map(self) -> FieldMap:
        """The same map with its values viewed inside F_{q^n}."""
        return FieldMap(self.tower, self.table, self.origin)

    def zeros(self):
        return np.flatnonzero(self.table == 0)


class FieldMap(_Table):
    """A map F_{q^n} -> F_{q^n}."""

    def is_permutation(self) -> bool:
        return is_bijection(self.table)


class ScalarFn(_Table):
    """A map F_q -> F_q."""

    _length_attr = "q"
    _range_attr = "q"

    def is_permutation(self) -> bool:
        return is_bijection(self.table)


def is_bijection(table) -> bool:
    table = np.asarray(table)
    return bool(np.all(np.bincount(table, minlength=len(table)) == 1))


def fiber_sizes(table, size=None):
    """Preimage count of every point (zeros for points not hit)."""
    table = np.asarray(table)
    return np.bincount(table, minlength=size or len(table))


# -- constructors -------------------------------------------------------------


def ground_fn_from_table(tower: FieldTower, values, origin=None) -> GroundFn:
    return GroundFn(tower, values, origin)


def zero_ground_fn(tower):
    return GroundFn(tower, np.zeros(tower.order, dtype=np.int64), {"name": "zero"})


def trace_fn(tower):
    return GroundFn(tower, tower.trace_table, {"name": "trace"})


def identity_map(tower):
    return FieldMap(tower, tower.elements(), {"name": "identity"})


def zero_map(tower):
    return FieldMap(tower, np.zeros(tower.order, dtype=np.int64), {"name": "zero"})


def identity_scalar(tower):
    return ScalarFn(tower, tower.ground_elements(), {"name": "identity"})


def eval_poly(tower: FieldTower, terms, xs=None):
    """Evaluate sum_j c_j x^{e_j} at ``xs`` (default: every element).

    Exponents must lie in [0, q^n - 1]; 0**0 is taken to be 1.
    """
    xs = tower.elements() if xs is None else np.asarray(xs, dtype=np.int64)
    acc = np.zeros(xs.shape, dtype=np.int64)
    for coeff, exponent in terms:
        coeff, exponent = int(coeff), int(exponent)
        if not 0 <= exponent <= tower.order - 1:
            raise ExponentOutOfRange(f"exponent {exponent} outside [0, {tower.order - 1}]")
        if not 0 <= coeff < tower.order:
            raise ValueError(f"coefficient {coeff} is not a field element")
        acc = tower.add(acc, tower.mul(coeff, tower.power(xs, exponent)))
    return acc


def poly_map(tower: FieldTower, terms) -> FieldMap:
    terms = [(int(c), int(e)) for c, e in terms]
    return FieldMap(tower, eval_poly(tower, terms), {"name": "poly", "terms": terms})


def trace_of_poly(tower: FieldTower, terms) -> GroundFn:
    """x -> Tr(sum_j c_j x^{e_j})."""
    terms = [(int(c), int(e)) for c, e in terms]
    values = tower.trace(eval_poly(tower, terms))
    return GroundFn(tower, values, {"name": "trace_of_poly", "terms": terms})


def trace_of_map(G: FieldMap) -> GroundFn:
    """f = Tr o G for an arbitrary G."""
    origin = {"name": "trace_of_map", "inner": G.origin}
    return GroundFn(G.tower, G.tower.trace(G.table), origin)


def scalar_power(tower, t: int) -> ScalarFn:
    return ScalarFn(tower, tower.power(tower.ground_elements(), t), {"name": "power", "t": t})


# -- linear maps ------------------------------------------------------------


class LinearMap(FieldMap):
    """The F_q-linear map x -> sum_i coeffs[i] * x^(q^i)."""

    coeffs: tuple = ()

    def kernel(self):
        return np.flatnonzero(self.table == 0)

    def image(self):
        return frozenset(int(v) for v in np.unique(self.table))

    def is_permutation(self) -> bool:
        return len(self.kernel()) == 1


def linear_map_from_coeffs(tower: FieldTower, coeffs) -> LinearMap:
    """Tabulate a q-polynomial and check linearity on generators.

    Additivity is checked as L(a + e) = L(a) + L(e) for every a and every
    F_p-basis vector e; homogeneity as L(y a) = y L(a) for the generator y
    of F_q over F_p.  Together these imply the identities for all pairs.
    """
    coeffs = tuple(int(c) for c in coeffs)
    if len(coeffs) != tower.n:
        raise LengthMismatch(f"need {tower.n} coefficients, got {len(coeffs)}")
    xs = tower.elements()
    table = np.zeros(tower.order, dtype=np.int64)
    for i, c in enumerate(coeffs):
        if c:
            table = tower.add(table, tower.mul(c, tower.frobenius(xs, i)))
    L = LinearMap(tower, table, {"name": "q-polynomial", "coeffs": list(coeffs)})
    object.__setattr__(L, "coeffs", coeffs)
    _check_linear(L)
    return L


def _check_linear(L: FieldMap):
    tower, table, xs = L.tower, L.table, L.tower.elements()
    for j in range(tower.m * tower.n):
        e = tower.p**j
        if not np.array_equal(table[tower.add(xs, e)], tower.add(table, table[e])):
            raise NotLinear(f"additivity fails for shift by {e}")
    if tower.m > 1:
        y = tower.p
        if not np.array_equal(table[tower.mul(y, xs)], tower.mul(y, table)):
            raise NotLinear("F_q-homogeneity fails")


def kernel_and_image(L: LinearMap):
    """(kernel as a sorted list of indices, image as a frozenset of indices)."""
    kernel = [int(v) for v in L.kernel()]
    image = L.image()
    if len(kernel) * len(image) != L.tower.order:
        raise NotLinear("rank-nullity fails")
    return kernel, image


def frobenius_minus_scaled(tower, gamma: int) -> LinearMap:
    """x -> x^q - gamma^(q-1) x, whose kernel is gamma*F_q."""
    coeffs = [0] * tower.n
    coeffs[0] = tower.neg(tower.power(gamma, tower.q - 1))
    if tower.n > 1:
        coeffs[1] = 1
    else:
        # x^q = x when n = 1
        coeffs[0] = tower.add(coeffs[0], 1)
    return linear_map_from_coeffs(tower, coeffs)


def compose(outer: FieldMap, inner: FieldMap) -> FieldMap:
    """x -> outer(inner(x))."""
    return FieldMap(outer.tower, outer.table[inner.table], {"name": "compose"})


def scalar_compose(h: ScalarFn, f: GroundFn) -> GroundFn:
    """x -> h(f(x))."""
    return GroundFn(f.tower, h.table[f.table], {"name": "scalar_compose", "outer": h.origin, "inner": f.origin})


# -- JSON -------------------------------------------------------------------

_KINDS = {"ground": GroundFn, "map": FieldMap, "scalar": ScalarFn}


def to_json_dict(obj, kind: str | None = None) -> dict:
    if kind is None:
        kind = {GroundFn: "ground", ScalarFn: "scalar"}.get(type(obj), "map")
    return {"field": obj.tower.spec, "kind": kind, "table": [int(v) for v in obj.table]}


def from_json_dict(data: dict, kind: str | None = None, budget=None):
    """Inverse of :func:`to_json_dict`; a missing ``kind`` means FieldMap."""
    if "field" not in data or "table" not in data:
        raise ValueError("table JSON needs 'field' and 'table'")
    tower = tower_from_spec(data["field"]) if budget is None else tower_from_spec(data["field"], budget)
    kind = kind or data.get("kind", "map")
    if kind == "perm":
        kind = "map"
    if kind not in _KINDS:
        raise ValueError(f"unknown table kind {kind!r}")
    return _KINDS[kind](tower, data["table"], {"name": "imported"})


def dumps(obj, kind=None) -> str:
    return json.dumps(to_json_dict(obj, kind), sort_keys=True)


def loads(text: str, kind=None):
    return from_json_dict(json.loads(text), kind)
