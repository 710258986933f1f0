"""Linear translators of maps F_{q^n} -> F_q.

A nonzero ``alpha`` is an a-translator of ``f`` when
``f(x + u*alpha) - f(x) = u*a`` for every x in F_{q^n} and u in F_q;
``a`` is then forced to be ``f(alpha) - f(0)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadDegree,
    BijectiveL,
    CertFailed,
    EvenCharacteristic,
    InvariantViolation,
    NotATranslator,
    ZeroAlpha,
    ZeroGamma,
)
from .field import FieldTower
from .maps import FieldMap, GroundFn, LinearMap, frobenius_minus_scaled, trace_of_map


def _ground_basis(tower):
    # y^j, j < m: an F_p-basis of F_q
    return [tower.p**j for j in range(tower.m)]


def _holds_for(f: GroundFn, alpha: int, a: int, us) -> bool:
    tower, xs = f.tower, f.tower.elements()
    for u in us:
        shifted = tower.add(xs, tower.mul(u, alpha))
        lhs = tower.sub(f.table[shifted], f.table)
        if not np.all(lhs == tower.mul(u, a)):
            return False
    return True


def translator_value(f: GroundFn, alpha: int, full: bool = False):
    """Return ``a`` if ``alpha`` is an a-translator of ``f``, else None.

    The set of good ``u`` is closed under addition and F_p-scaling, so the
    default check only runs ``u`` over an F_p-basis of F_q.  ``full=True``
    runs every ``u``.
    """
    alpha = int(alpha)
    if alpha == 0:
        raise ZeroAlpha("translators are nonzero by definition")
    tower = f.tower
    a = tower.sub(f(alpha), f(0))
    us = range(1, tower.q) if full else _ground_basis(tower)
    return a if _holds_for(f, alpha, a, us) else None


@dataclass(frozen=True)
class TranslatorCert:
    """``alpha`` is an ``a``-translator of ``f``."""

    alpha: int
    a: int
    f: GroundFn = field(repr=False, compare=False)

    def check(self) -> bool:
        """Full check over all (x, u) pairs."""
        tower = self.f.tower
        if self.alpha == 0:
            return False
        if self.a != tower.sub(self.f(self.alpha), self.f(0)):
            return False
        return _holds_for(self.f, self.alpha, self.a, range(tower.q))

    def valid_for(self, f: GroundFn, alpha: int | None = None) -> bool:
        if alpha is not None and int(alpha) != self.alpha:
            return False
        return TranslatorCert(self.alpha, self.a, f).check()


def certify(f: GroundFn, alpha: int) -> TranslatorCert:
    """Certificate for ``alpha`` as a translator of ``f`` (full check)."""
    a = translator_value(f, alpha, full=True)
    if a is None:
        raise NotATranslator(f"{alpha} is not a linear translator of the given function")
    return TranslatorCert(int(alpha), a, f)


def _verified(cert: TranslatorCert) -> TranslatorCert:
    if not cert.check():
        raise CertFailed(f"certificate for alpha={cert.alpha}, a={cert.a} does not hold")
    return cert


# -- the subspace of translators --------------------------------------------


def span(tower: FieldTower, basis) -> set[int]:
    """All F_q-linear combinations of ``basis``."""
    out = {0}
    for b in basis:
        multiples = tower.mul(tower.ground_elements(), b)
        out = {tower.add(s, int(v)) for s in out for v in multiples}
    return out


@dataclass(frozen=True)
class TranslatorSpace:
    """Lambda(f): translators of ``f`` together with 0, with their values."""

    tower: FieldTower
    basis: tuple
    basis_values: tuple
    values: dict = field(repr=False)  # every member -> its value a

    @property
    def members(self):
        return frozenset(self.values)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def value(self, alpha: int) -> int:
        """The value map alpha -> a, extended linearly from the basis."""
        return self.values[int(alpha)]

    def is_affine(self) -> bool:
        return len(self.values) == self.tower.order


def lambda_space(f: GroundFn) -> TranslatorSpace:
    """Scan every nonzero candidate; the basis is chosen greedily in index order."""
    tower = f.tower
    values = {0: 0}
    for alpha in range(1, tower.order):
        a = translator_value(f, alpha)
        if a is not None:
            values[alpha] = a
    basis, basis_values, spanned = [], [], {0}
    for alpha in sorted(values):
        if alpha not in spanned:
            basis.append(alpha)
            basis_values.append(values[alpha])
            spanned = span(tower, basis)
    if spanned != set(values):
        raise InvariantViolation("translators do not form an F_q-subspace")
    space = TranslatorSpace(tower, tuple(basis), tuple(basis_values), values)
    _check_value_map(space)
    return space


def _check_value_map(space: TranslatorSpace):
    tower = space.tower
    for coeffs in itertools.product(range(tower.q), repeat=space.dimension):
        alpha, a = 0, 0
        for c, b, v in zip(coeffs, space.basis, space.basis_values):
            alpha = tower.add(alpha, tower.mul(c, b))
            a = tower.add(a, tower.mul(c, v))
        if space.values[alpha] != a:
            raise InvariantViolation(f"value map is not linear at {alpha}")


def subspace_law_violations(f: GroundFn, space: TranslatorSpace | None = None) -> list:
    """Counterexamples to closure under + and F_q-scaling and to linearity
    of the value map, checked pair by pair over Lambda*(f)."""
    tower = f.tower
    space = space or lambda_space(f)
    members = sorted(m for m in space.values if m)
    bad = []
    for i, alpha in enumerate(members):
        a = space.values[alpha]
        for beta in members[i:]:
            s = tower.add(alpha, beta)
            if s == 0:
                continue
            got = translator_value(f, s, full=True)
            want = tower.add(a, space.values[beta])
            if got != want:
                bad.append(("sum", alpha, beta, got, want))
        for c in range(1, tower.q):
            got = translator_value(f, tower.mul(c, alpha), full=True)
            if got != tower.mul(c, a):
                bad.append(("scale", alpha, c, got, tower.mul(c, a)))
    return bad


# -- constructions with known translators -----------------------------------


def lai_construct(H: FieldMap, gamma: int, beta: int):
    """f(x) = Tr(H(x^q - gamma^(q-1) x) + beta x); gamma is a Tr(beta gamma)-translator."""
    tower = H.tower
    gamma, beta = int(gamma), int(beta)
    if gamma == 0:
        raise ZeroGamma("gamma must be nonzero")
    inner = frobenius_minus_scaled(tower, gamma)
    xs = tower.elements()
    G = FieldMap(tower, tower.add(H.table[inner.table], tower.mul(beta, xs)))
    f = trace_of_map(G)
    f = GroundFn(tower, f.table, {"name": "lai", "gamma": gamma, "beta": beta, "H": H.origin})
    cert = _verified(TranslatorCert(gamma, tower.trace(tower.mul(beta, gamma)), f))
    return f, cert


def deriv_construct(g: GroundFn, alpha: int):
    """f(x) = sum_{u in F_q} g(x + u alpha); every c*alpha is a 0-translator."""
    tower = g.tower
    alpha = int(alpha)
    if alpha == 0:
        raise ZeroAlpha("alpha must be nonzero")
    xs = tower.elements()
    acc = np.zeros(tower.order, dtype=np.int64)
    for u in range(tower.q):
        acc = tower.add(acc, g.table[tower.add(xs, tower.mul(u, alpha))])
    f = GroundFn(tower, acc, {"name": "deriv", "alpha": alpha, "g": g.origin})
    certs = [_verified(TranslatorCert(tower.mul(c, alpha), 0, f)) for c in range(1, tower.q)]
    return f, certs


def monom_coset(tower: FieldTower) -> list[int]:
    """lambda^e * F_{q^2}^*, e = (q^n - 1) / (2 (q^2 - 1)), for n = 4k and odd q."""
    if tower.n % 4:
        raise BadDegree(f"n = {tower.n} is not a multiple of 4")
    if tower.p == 2:
        raise EvenCharacteristic("the coset needs -1 != 1")
    q, N = tower.q, tower.order
    e = (N - 1) // (2 * (q * q - 1))
    base = tower.power(tower.primitive, e)
    # F_{q^2}^* = <lambda^((q^n-1)/(q^2-1))>
    sub_gen = tower.power(tower.primitive, (N - 1) // (q * q - 1))
    coset = [tower.mul(base, tower.power(sub_gen, j)) for j in range(q * q - 1)]
    return sorted(coset)


def monom_construct(tower: FieldTower, beta: int):
    """f(x) = Tr(x^(q+1) + beta x) together with the coset of translators.

    Returns ``(f, coset, certs)``; each coset element gamma is certified as a
    Tr(beta gamma)-translator after checking gamma^(q^2) + gamma = 0 and
    Tr(gamma^(q+1)) = 0.
    """
    coset = monom_coset(tower)
    beta = int(beta)
    q, xs = tower.q, tower.elements()
    values = tower.trace(tower.add(tower.power(xs, q + 1), tower.mul(beta, xs)))
    f = GroundFn(tower, values, {"name": "monom", "beta": beta})
    certs = []
    for gamma in coset:
        if tower.add(tower.frobenius(gamma, 2), gamma) != 0:
            raise InvariantViolation(f"gamma^(q^2) + gamma != 0 for gamma={gamma}")
        if tower.trace(tower.power(gamma, q + 1)) != 0:
            raise InvariantViolation(f"Tr(gamma^(q+1)) != 0 for gamma={gamma}")
        certs.append(_verified(TranslatorCert(gamma, tower.trace(tower.mul(beta, gamma)), f)))
    return f, coset, certs


@dataclass
class KernelReport:
    f: GroundFn
    kernel: list
    certs: list
    contained: bool


def verify_kernel_in_lambda(L: LinearMap, H: FieldMap, beta: int) -> KernelReport:
    """Build f = Tr(H(L(x)) + beta x) and check ker L is inside Lambda(f)."""
    tower = L.tower
    kernel = [int(k) for k in np.flatnonzero(L.table == 0)]
    if len(kernel) == 1:
        raise BijectiveL("L must have a nontrivial kernel")
    beta = int(beta)
    G = FieldMap(tower, tower.add(H.table[L.table], tower.mul(beta, tower.elements())))
    f = trace_of_map(G)
    certs = []
    for k in kernel:
        if k == 0:
            continue
        a = translator_value(f, k, full=True)
        if a is None:
            raise InvariantViolation(f"kernel element {k} is not a translator")
        certs.append(TranslatorCert(k, a, f))
    return KernelReport(f, kernel, certs, True)
