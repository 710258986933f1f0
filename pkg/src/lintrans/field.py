"""Arithmetic in the tower F_p < F_q < F_{q^n}.

Every element of F_{q^n} is identified with its canonical index::

    index = sum_i c_i * q**i,    c_i = sum_j d_ij * p**j

where ``c_i`` are the coordinates over F_q in the basis 1, x, ..., x^(n-1)
and ``d_ij`` the coordinates of ``c_i`` over F_p in the basis 1, y, ...,
y^(m-1).  The base-p digits of an index are therefore its coordinate vector
over F_p, and the subfield F_q (embedded as constants) is exactly the set of
indices ``0 <= i < q``.  F_q scalars are passed around as those indices.

The arithmetic methods of :class:`FieldTower` accept ints or integer numpy
arrays and broadcast; two plain ints give back a plain int.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadSpec,
    BudgetExceeded,
    NoIrreducible,
    NotInSubfield,
    NotPrime,
)

DEFAULT_BUDGET = 1 << 20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- scalar arithmetic used while building the tower ------------------------


class _PrimeScalars:
    def __init__(self, p):
        self.p = p
        self.size = p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p


class _TableScalars:
    """Python-level F_q arithmetic on indices, from log/exp tables."""

    def __init__(self, p, dim, exp, log):
        self.p = p
        self.dim = dim
        self.size = p**dim
        self._exp = [int(v) for v in exp]
        self._log = [int(v) for v in log]

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        out, w = 0, 1
        for _ in range(self.dim):
            out += ((a // w + b // w) % self.p) * w
            w *= self.p
        return out

    def sub(self, a, b):
        if self.p == 2:
            return a ^ b
        out, w = 0, 1
        for _ in range(self.dim):
            out += ((a // w - b // w) % self.p) * w
            w *= self.p
        return out

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]


def _poly_rem(a, mod, S):
    """Remainder of ``a`` modulo the monic ``mod`` (coefficient lists, low first)."""
    d = len(mod) - 1
    a = list(a)
    for k in range(len(a) - 1, d - 1, -1):
        c = a[k]
        if c:
            for j in range(d + 1):
                a[k - d + j] = S.sub(a[k - d + j], S.mul(c, mod[j]))
    a = a[:d]
    return a + [0] * (d - len(a))


def _poly_mulmod(a, b, mod, S):
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] = S.add(prod[i + j], S.mul(ai, bj))
    return _poly_rem(prod, mod, S)


def _irreducibles_up_to(degree, S):
    """All monic irreducibles of degree 1..``degree`` over ``S``."""
    found = []
    for k in range(1, degree + 1):
        for tail in itertools.product(range(S.size), repeat=k):
            poly = list(tail) + [1]
            if _no_divisor(poly, found, S):
                found.append(poly)
    return found


def _no_divisor(poly, divisors, S):
    # divisors are sorted by degree
    d = len(poly) - 1
    for div in divisors:
        if 2 * (len(div) - 1) > d:
            break
        if not any(_poly_rem(poly, div, S)):
            return False
    return True


def is_irreducible(poly, S, small=None) -> bool:
    """Root test plus trial division by the monic irreducibles of degree up
    to half that of ``poly`` (a monic coefficient list, low first)."""
    d = len(poly) - 1
    if d < 1 or poly[-1] != 1:
        return False
    if d == 1:
        return True
    if any(_eval(poly, r, S) == 0 for r in range(S.size)):
        return False
    if small is None:
        small = _irreducibles_up_to(d // 2, S)
    return _no_divisor(poly, [f for f in small if len(f) > 2], S)


def _eval(poly, x, S):
    acc = 0
    for c in reversed(poly):
        acc = S.add(S.mul(acc, x), c)
    return acc


def smallest_irreducible(degree, S):
    """Lexicographically smallest monic irreducible of the given degree,
    comparing coefficient tuples (c_0, c_1, ..., c_{d-1}) from c_0 on."""
    small = _irreducibles_up_to(degree // 2, S) if degree > 1 else []
    for tail in itertools.product(range(S.size), repeat=degree):
        if tail[0] == 0 and degree > 1:
            continue  # root at zero
        poly = list(tail) + [1]
        if is_irreducible(poly, S, small):
            return tuple(poly)
    raise NoIrreducible(f"no monic irreducible of degree {degree} over a field of size {S.size}")


def _digits(value, p, dim):
    out = []
    for _ in range(dim):
        out.append(value % p)
        value //= p
    return out


def _undigits(digits, p):
    out, w = 0, 1
    for d in digits:
        out += int(d) * w
        w *= p
    return out


def _log_exp_tables(p, dim, slow_mul):
    """Find the smallest-index primitive element and tabulate its powers.

    Multiplication by a fixed element is F_p-linear on digit vectors, so the
    powers are generated blockwise by a D x D matrix over F_p.
    """
    order = p**dim
    group = order - 1

    def slow_pow(a, e):
        result, base = 1, a
        while e:
            if e & 1:
                result = slow_mul(result, base)
            base = slow_mul(base, base)
            e >>= 1
        return result

    factors = prime_factors(group)
    prim = None
    for c in range(1, order):
        if slow_pow(c, group) != 1:
            # zero divisor or non-field modulus
            raise NoIrreducible("modulus does not define a field")
        if all(slow_pow(c, group // r) != 1 for r in factors):
            prim = c
            break
    if prim is None:
        raise NoIrreducible("no primitive element found")

    mat = np.zeros((dim, dim), dtype=np.int64)
    for j in range(dim):
        mat[:, j] = _digits(slow_mul(prim, p**j), p, dim)

    powers = np.zeros((dim, group), dtype=np.int64)
    powers[0, 0] = 1
    filled = 1
    step = mat.copy()
    while filled < group:
        take = min(filled, group - filled)
        powers[:, filled : filled + take] = (step @ powers[:, :take]) % p
        filled += take
        step = (step @ step) % p
    weights = p ** np.arange(dim, dtype=np.int64)
    exp = weights @ powers
    log = np.zeros(order, dtype=np.int64)
    log[exp] = np.arange(group, dtype=np.int64)
    if len(np.unique(exp)) != group or np.any(exp == 0):
        raise NoIrreducible("powers of the candidate do not cover the multiplicative group")
    return prim, exp, log


def _as_array(a):
    return np.asarray(a, dtype=np.int64)


def _out(r, *inputs):
    if all(isinstance(x, (int, np.integer)) for x in inputs):
        return int(r)
    return r


class FieldTower:
    """The tower F_p < F_q = F_p[y]/(g) < F_{q^n} = F_q[x]/(h).

    Build instances with :func:`make_tower` (cached) rather than directly.
    """

    def __init__(self, p, m, n, g=None, h=None, budget=DEFAULT_BUDGET):
        if not isinstance(p, int) or not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if m < 1 or n < 1:
            raise BadSpec("extension degrees must be positive")
        order = p ** (m * n)
        if order > budget:
            raise BudgetExceeded(f"field of order {order} exceeds budget {budget}")
        self.p, self.m, self.n = p, m, n
        self.q = p**m
        self.order = order
        self.budget = budget

        fp = _PrimeScalars(p)
        if g is None:
            g = smallest_irreducible(m, fp)
        else:
            g = tuple(int(c) for c in g)
            if len(g) != m + 1 or any(not 0 <= c < p for c in g) or not is_irreducible(list(g), fp):
                raise BadSpec(f"g={list(g)} is not a monic irreducible of degree {m} over F_{p}")
        self.g = g

        def ground_mul(a, b):
            prod = _poly_mulmod(_digits(a, p, m), _digits(b, p, m), g, fp)
            return _undigits(prod, p)

        _, gexp, glog = _log_exp_tables(p, m, ground_mul)
        fq = _TableScalars(p, m, np.concatenate([gexp, gexp]), glog)
        self._fq = fq

        if h is None:
            h = smallest_irreducible(n, fq)
        else:
            h = tuple(int(c) for c in h)
            if len(h) != n + 1 or any(not 0 <= c < self.q for c in h) or not is_irreducible(list(h), fq):
                raise BadSpec(f"h={list(h)} is not a monic irreducible of degree {n} over F_{self.q}")
        self.h = h

        self.primitive, exp, log = _log_exp_tables(p, m * n, self.slow_mul)
        self._exp = np.concatenate([exp, exp])
        self._log = log
        self._weights = [p**j for j in range(m * n)]

    # -- identity ---------------------------------------------------------

    @property
    def key(self):
        return (self.p, self.m, self.n, self.g, self.h)

    def __eq__(self, other):
        return isinstance(other, FieldTower) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"FieldTower({self.spec})"

    @property
    def spec(self) -> str:
        g = ",".join(map(str, self.g))
        h = ",".join(map(str, self.h))
        return f"p={self.p},m={self.m},n={self.n},g={g},h={h}"

    # -- reference arithmetic (no tables) ---------------------------------

    def coords(self, a: int) -> list[int]:
        """Coordinates over F_q (as ground indices), lowest power first."""
        return _digits(int(a), self.q, self.n)

    def from_coords(self, coords) -> int:
        return _undigits(coords, self.q)

    def slow_mul(self, a: int, b: int) -> int:
        """Schoolbook product modulo h and g, independent of the log tables."""
        prod = _poly_mulmod(self.coords(a), self.coords(b), self.h, self._fq)
        return self.from_coords(prod)

    def slow_add(self, a: int, b: int) -> int:
        return self.from_coords([self._fq.add(x, y) for x, y in zip(self.coords(a), self.coords(b))])

    # -- table arithmetic -------------------------------------------------

    def elements(self):
        return np.arange(self.order, dtype=np.int64)

    def ground_elements(self):
        return np.arange(self.q, dtype=np.int64)

    @property
    def one(self):
        return 1

    @property
    def minus_one(self):
        return self.p - 1

    def add(self, a, b):
        if self.p == 2:
            return _out(np.bitwise_xor(_as_array(a), _as_array(b)), a, b)
        A, B = _as_array(a), _as_array(b)
        out = np.zeros(np.broadcast(A, B).shape, dtype=np.int64)
        for w in self._weights:
            out += ((A // w + B // w) % self.p) * w
        return _out(out, a, b)

    def sub(self, a, b):
        if self.p == 2:
            return _out(np.bitwise_xor(_as_array(a), _as_array(b)), a, b)
        A, B = _as_array(a), _as_array(b)
        out = np.zeros(np.broadcast(A, B).shape, dtype=np.int64)
        for w in self._weights:
            out += ((A // w - B // w) % self.p) * w
        return _out(out, a, b)

    def neg(self, a):
        return self.sub(0 if isinstance(a, (int, np.integer)) else np.zeros_like(_as_array(a)), a)

    def int_mul(self, k: int, a):
        """``k * a`` for an integer ``k`` (repeated addition)."""
        A = _as_array(a)
        out = np.zeros(A.shape, dtype=np.int64)
        for w in self._weights:
            out += (((A // w) * k) % self.p) * w
        return _out(out, a)

    def mul(self, a, b):
        A, B = _as_array(a), _as_array(b)
        r = self._exp[self._log[A] + self._log[B]]
        r = np.where((A == 0) | (B == 0), 0, r)
        return _out(r, a, b)

    def inv(self, a):
        A = _as_array(a)
        if np.any(A == 0):
            raise ZeroDivisionError("inverse of zero")
        r = self._exp[(-self._log[A]) % (self.order - 1)]
        return _out(r, a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, k: int):
        """``a**k`` with 0**0 = 1; negative ``k`` needs nonzero ``a``."""
        A = _as_array(a)
        if k < 0:
            return self.power(self.inv(a), -k)
        kk = k % (self.order - 1)
        r = self._exp[(self._log[A] * kk) % (self.order - 1)]
        r = np.where(A == 0, 1 if k == 0 else 0, r)
        return _out(r, a)

    def frobenius(self, a, i: int = 1):
        """``a**(q**i)``."""
        return self.power(a, self.q ** (i % self.n))

    def trace(self, a):
        """Relative trace F_{q^n} -> F_q, returned as a ground index."""
        out = a
        for i in range(1, self.n):
            out = self.add(out, self.frobenius(a, i))
        return out

    @functools.cached_property
    def trace_table(self):
        t = self.trace(self.elements())
        t.setflags(write=False)
        return t

    def log(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("log of zero")
        return int(self._log[a])

    def mult_order(self, a: int) -> int:
        """Multiplicative order of a nonzero element."""
        if a == 0:
            raise ZeroDivisionError("order of zero")
        group = self.order - 1
        order = group
        for r in prime_factors(group):
            while order % r == 0 and self.power(a, order // r) == 1:
                order //= r
        return order

    # -- subfield ----------------------------------------------------------

    def is_ground(self, a) -> bool:
        return 0 <= int(a) < self.q

    def embed_ground(self, c) -> int:
        """Embed an F_q scalar (index or length-m digit vector) as a constant."""
        if not isinstance(c, (int, np.integer)):
            digits = list(c)
            if len(digits) != self.m or any(not 0 <= d < self.p for d in digits):
                raise ValueError(f"bad ground coefficient vector {digits}")
            c = _undigits(digits, self.p)
        if not 0 <= c < self.q:
            raise ValueError(f"ground index {c} out of range")
        return int(c)

    def project_ground(self, a) -> int:
        if not self.is_ground(a):
            raise NotInSubfield(f"element {a} is not in the embedded F_{self.q}")
        return int(a)

    def ground_coeffs(self, c: int) -> list[int]:
        return _digits(int(c), self.p, self.m)

    # -- Elt helpers -------------------------------------------------------

    def element_of(self, i: int) -> Elt:
        if not 0 <= i < self.order:
            raise IndexError(f"index {i} outside [0, {self.order})")
        return Elt(self, int(i))

    def index_of(self, a: Elt) -> int:
        if a.tower != self:
            raise ValueError("element belongs to a different tower")
        return a.index

    def __call__(self, i: int) -> Elt:
        return self.element_of(i)


@functools.lru_cache(maxsize=64)
def _cached_tower(p, m, n, g, h, budget):
    return FieldTower(p, m, n, g, h, budget)


def make_tower(p: int, m: int, n: int, g=None, h=None, budget: int = DEFAULT_BUDGET) -> FieldTower:
    """Construct (or fetch from cache) the tower with the given parameters.

    Without ``g``/``h`` the lexicographically smallest monic irreducibles
    are used, so repeated calls give identical tables.
    """
    if not isinstance(p, int) or not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    g = tuple(g) if g is not None else None
    h = tuple(h) if h is not None else None
    return _cached_tower(p, m, n, g, h, budget)


_SPEC_KEY = re.compile(r"^\s*([a-z]+)\s*=\s*(.*)$")


def parse_field_spec(spec: str) -> dict:
    """Parse ``p=3,m=1,n=2[,g=0,1,h=1,0,1]``.

    Bare numbers following ``g=`` or ``h=`` extend that coefficient list.
    """
    out: dict = {}
    current = None
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        match = _SPEC_KEY.match(token)
        try:
            if match:
                key, value = match.group(1), match.group(2).strip()
                if key in out:
                    raise BadSpec(f"duplicate key {key!r}")
                if key in ("p", "m", "n"):
                    out[key] = int(value)
                    current = None
                elif key in ("g", "h"):
                    out[key] = [int(value)]
                    current = key
                else:
                    raise BadSpec(f"unknown key {key!r}")
            elif current is not None:
                out[current].append(int(token))
            else:
                raise BadSpec(f"stray token {token!r}")
        except ValueError as exc:
            if isinstance(exc, BadSpec):
                raise
            raise BadSpec(f"bad field spec {spec!r}: {exc}") from None
    missing = {"p", "m", "n"} - out.keys()
    if missing:
        raise BadSpec(f"field spec missing {sorted(missing)}")
    return out


def tower_from_spec(spec: str, budget: int = DEFAULT_BUDGET) -> FieldTower:
    parts = parse_field_spec(spec)
    return make_tower(parts["p"], parts["m"], parts["n"], parts.get("g"), parts.get("h"), budget)


@dataclass(frozen=True, eq=True)
class Elt:
    """A single element of F_{q^n}; a thin operator-overloading wrapper."""

    tower: FieldTower
    index: int

    def _wrap(self, i):
        return Elt(self.tower, int(i))

    def _idx(self, other):
        if isinstance(other, Elt):
            if other.tower != self.tower:
                raise ValueError("elements of different towers")
            return other.index
        return int(other)

    def __add__(self, other):
        return self._wrap(self.tower.add(self.index, self._idx(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.tower.sub(self.index, self._idx(other)))

    def __rsub__(self, other):
        return self._wrap(self.tower.sub(self._idx(other), self.index))

    def __mul__(self, other):
        return self._wrap(self.tower.mul(self.index, self._idx(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.tower.div(self.index, self._idx(other)))

    def __neg__(self):
        return self._wrap(self.tower.neg(self.index))

    def __pow__(self, k):
        return self._wrap(self.tower.power(self.index, k))

    def inverse(self):
        return self._wrap(self.tower.inv(self.index))

    def frobenius(self, i=1):
        return self._wrap(self.tower.frobenius(self.index, i))

    def trace(self):
        return self._wrap(self.tower.trace(self.index))

    def __int__(self):
        return self.index

    def __index__(self):
        return self.index

    def __bool__(self):
        return self.index != 0

    @property
    def coeffs(self) -> tuple:
        """Coordinates over F_q, each an m-tuple of F_p digits."""
        return tuple(tuple(self.tower.ground_coeffs(c)) for c in self.tower.coords(self.index))

    def __repr__(self):
        return f"Elt({self.index})"


def field_arith(a: Elt, b: Elt | None, op: str, k: int | None = None) -> Elt:
    """Dispatch one of add, sub, mul, div, neg, inv, pow on :class:`Elt` values."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    if op == "pow":
        return a**k
    raise ValueError(f"unknown op {op!r}")
