"""Seeded self-check suites run by ``lintrans verify``.

Each check compares a closed-form construction with a brute-force
computation on the same field and records any counterexample.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .analysis import (
    cycle_structure_brute,
    cycle_structure_closed_form,
    duality_check,
    mob_set,
    th_dir_bound,
    translator_direction_inclusion,
)
from .errors import InvariantViolation
from .field import FieldTower
from .maps import (
    FieldMap,
    GroundFn,
    ScalarFn,
    fiber_sizes,
    frobenius_minus_scaled,
    identity_map,
    is_bijection,
    linear_map_from_coeffs,
    trace_fn,
)
from .perms import (
    FAMILIES,
    build_named_family,
    complete_mapping_shift,
    general_h_perm,
    iterate_closed_form,
    kernel_perm,
    linear_compose_perm,
    linear_general_h_perm,
    marcos_pp,
    qplus_map,
    shift_perm,
    shift_perm_inverse,
)
from .translators import (
    TranslatorCert,
    certify,
    deriv_construct,
    lai_construct,
    lambda_space,
    monom_construct,
    subspace_law_violations,
    translator_value,
    verify_kernel_in_lambda,
)

SUITES = ("core", "translators", "families", "analysis")

# exhaustive pairwise checks up to this many elements, sampled above
EXHAUSTIVE_LIMIT = 81


# -- random instances ------------------------------------------------------------


def random_field_map(tower, rng) -> FieldMap:
    return FieldMap(tower, rng.integers(0, tower.order, tower.order), {"name": "random"})


def random_ground_fn(tower, rng) -> GroundFn:
    return GroundFn(tower, rng.integers(0, tower.q, tower.order), {"name": "random"})


def random_nonzero(tower, rng) -> int:
    return int(rng.integers(1, tower.order))


def beta_for_value(tower, gamma: int, b: int, rng) -> int:
    """A random beta with Tr(beta * gamma) = b."""
    kernel = np.flatnonzero(tower.trace_table == 0)
    unit = int(np.flatnonzero(tower.trace_table == 1)[0])
    target = tower.add(tower.mul(b, unit), int(rng.choice(kernel)))
    return tower.div(target, gamma)


def random_instance(tower: FieldTower, rng, b: int | None = None):
    """A random ``(f, gamma, cert)`` with gamma a translator of f.

    Alternates between the Lai-type construction with a random H (whose
    translator value can be steered to ``b``), derivative sums of random
    tables and affine maps.
    """
    kind = int(rng.integers(0, 3)) if b is None else 0
    if kind == 0:
        gamma = random_nonzero(tower, rng)
        value = int(rng.integers(0, tower.q)) if b is None else b
        beta = beta_for_value(tower, gamma, value, rng)
        f, cert = lai_construct(random_field_map(tower, rng), gamma, beta)
        return f, gamma, cert
    if kind == 1:
        alpha = random_nonzero(tower, rng)
        f, certs = deriv_construct(random_ground_fn(tower, rng), alpha)
        cert = certs[int(rng.integers(0, len(certs)))]
        return f, cert.alpha, cert
    beta = int(rng.integers(0, tower.order))
    shift = int(rng.integers(0, tower.q))
    values = tower.add(tower.trace(tower.mul(beta, tower.elements())), shift)
    f = GroundFn(tower, values, {"name": "affine", "beta": beta, "shift": shift})
    gamma = random_nonzero(tower, rng)
    return f, gamma, certify(f, gamma)


def all_scalar_fns(tower):
    for values in itertools.product(range(tower.q), repeat=tower.q):
        yield ScalarFn(tower, values)


def scalar_fns(tower, rng, limit=64):
    """Every F_q -> F_q map when there are at most ``limit``, else a sample."""
    if tower.q**tower.q <= limit:
        return list(all_scalar_fns(tower))
    return [ScalarFn(tower, rng.integers(0, tower.q, tower.q)) for _ in range(limit)]


def k_fold(table, k):
    out = np.arange(len(table))
    for _ in range(k):
        out = table[out]
    return out


# -- report ---------------------------------------------------------------------


@dataclass
class RunReport:
    command: str
    field: str
    seed: int
    verdicts: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    @property
    def status(self):
        return "pass" if not self.counterexamples else "fail"

    def to_dict(self, timings=False):
        out = {
            "command": self.command,
            "field": self.field,
            "seed": self.seed,
            "verdicts": self.verdicts,
            "counterexamples": self.counterexamples,
            "status": self.status,
        }
        if timings:
            out["timings"] = self.timings
        return out


class _Runner:
    def __init__(self, report):
        self.report = report

    def run(self, name, fn):
        start = time.perf_counter()
        try:
            result = fn()
        except InvariantViolation as exc:
            self.report.counterexamples.append({"check": name, "detail": str(exc)})
            result = "fail"
        else:
            if result is None:
                result = "pass"
            elif isinstance(result, list):
                for detail in result:
                    self.report.counterexamples.append({"check": name, "detail": detail})
                result = "fail" if result else "pass"
        self.report.verdicts[name] = result
        self.report.timings[name] = round(time.perf_counter() - start, 4)


# -- suites -------------------------------------------------------------------------


def _pairs(tower, rng, count=4096):
    if tower.order <= EXHAUSTIVE_LIMIT:
        xs = tower.elements()
        a, b = np.meshgrid(xs, xs, indexing="ij")
        return a.ravel(), b.ravel()
    return rng.integers(0, tower.order, count), rng.integers(0, tower.order, count)


def suite_core(tower, rng, run):
    def axioms():
        bad = []
        a, b = _pairs(tower, rng)
        c = rng.permutation(np.resize(tower.elements(), len(a)))
        if not np.array_equal(tower.mul(a, b), tower.mul(b, a)):
            bad.append("multiplication not commutative")
        if not np.array_equal(tower.mul(tower.mul(a, b), c), tower.mul(a, tower.mul(b, c))):
            bad.append("multiplication not associative")
        if not np.array_equal(tower.mul(a, tower.add(b, c)), tower.add(tower.mul(a, b), tower.mul(a, c))):
            bad.append("distributivity fails")
        sample = range(min(len(a), 400))
        for i in sample:
            if tower.mul(int(a[i]), int(b[i])) != tower.slow_mul(int(a[i]), int(b[i])):
                bad.append(f"table product differs from schoolbook at {int(a[i])}*{int(b[i])}")
                break
        return bad

    def inverses():
        xs = tower.elements()[1:]
        bad = []
        if not np.all(tower.mul(xs, tower.inv(xs)) == 1):
            bad.append("a * a^-1 != 1")
        if not np.all(tower.power(xs, tower.order - 1) == 1):
            bad.append("a^(q^n - 1) != 1")
        return bad

    def trace():
        bad = []
        t = tower.trace_table
        if t.max() >= tower.q:
            bad.append("trace leaves F_q")
        counts = np.bincount(t, minlength=tower.q)
        if not np.all(counts == tower.order // tower.q):
            bad.append(f"trace fibers {counts.tolist()}")
        a, b = _pairs(tower, rng)
        if not np.array_equal(t[tower.add(a, b)], tower.add(t[a], t[b])):
            bad.append("trace not additive")
        u = a % tower.q
        if not np.array_equal(t[tower.mul(u, b)], tower.mul(u, t[b])):
            bad.append("trace not F_q-homogeneous")
        return bad

    def frobenius():
        a, b = _pairs(tower, rng)
        bad = []
        for i in range(tower.n + 1):
            if not np.array_equal(tower.frobenius(tower.mul(a, b), i), tower.mul(tower.frobenius(a, i), tower.frobenius(b, i))):
                bad.append(f"frobenius {i} not multiplicative")
        fixed = np.flatnonzero(tower.frobenius(tower.elements(), 1) == tower.elements())
        if fixed.tolist() != list(range(tower.q)):
            bad.append("frobenius fixed points are not the embedded F_q")
        return bad

    def primitive():
        if tower.mult_order(tower.primitive) != tower.order - 1:
            return ["primitive element has the wrong order"]
        return []

    def encoding():
        for i in range(min(tower.order, 4096)):
            if tower.index_of(tower.element_of(i)) != i:
                return [f"index round trip fails at {i}"]
        return []

    run("core.axioms", axioms)
    run("core.inverses", inverses)
    run("core.trace", trace)
    run("core.frobenius", frobenius)
    run("core.primitive", primitive)
    run("core.encoding", encoding)


def suite_translators(tower, rng, run, instances=12):
    def constructions():
        bad = []
        for _ in range(instances):
            f, gamma, cert = random_instance(tower, rng)
            if not cert.check():
                bad.append(f"certificate fails for gamma={gamma}")
            if cert.a != tower.sub(f(gamma), f(0)):
                bad.append("a != f(alpha) - f(0)")
        return bad

    def fast_vs_full():
        bad = []
        for _ in range(instances):
            f = random_ground_fn(tower, rng) if rng.integers(0, 2) else random_instance(tower, rng)[0]
            for alpha in rng.integers(1, tower.order, 8):
                if translator_value(f, int(alpha)) != translator_value(f, int(alpha), full=True):
                    bad.append(f"fast and full checks disagree at alpha={int(alpha)}")
        return bad

    def subspace_law():
        bad = []
        for _ in range(max(2, instances // 4)):
            f, _, _ = random_instance(tower, rng)
            bad.extend(str(v) for v in subspace_law_violations(f))
        return bad

    def kernel_in_lambda():
        if tower.n < 2:
            return "skipped"
        L = frobenius_minus_scaled(tower, 1)
        for _ in range(max(2, instances // 4)):
            verify_kernel_in_lambda(L, random_field_map(tower, rng), int(rng.integers(0, tower.order)))
        return None

    def monom():
        if tower.n % 4 or tower.p == 2:
            return "skipped"
        beta = int(rng.integers(0, tower.order))
        monom_construct(tower, beta)
        return None

    run("translators.constructions", constructions)
    run("translators.fast_vs_full", fast_vs_full)
    run("translators.subspace_law", subspace_law)
    run("translators.kernel_in_lambda", kernel_in_lambda)
    run("translators.monom", monom)


def suite_families(tower, rng, run, instances=12):
    minus_one = tower.minus_one

    def dichotomy():
        bad = []
        for i in range(instances):
            b = minus_one if i % 3 == 0 else None
            f, gamma, cert = random_instance(tower, rng, b)
            result = shift_perm(f, gamma, cert)
            counts = fiber_sizes(result.table, tower.order)
            brute = "permutation" if np.all(counts == 1) else ("q-to-1" if set(counts[counts > 0]) == {tower.q} else "other")
            if brute != result.verdict:
                bad.append(f"gamma={gamma}: {result.verdict} vs brute force {brute}")
        return bad

    def inverse_and_iterates():
        bad = []
        for _ in range(instances):
            f, gamma, cert = random_instance(tower, rng)
            if cert.a == minus_one:
                continue
            F = shift_perm(f, gamma, cert)
            inv = shift_perm_inverse(f, gamma, cert)
            if not np.array_equal(F.table[inv.table], tower.elements()):
                bad.append("closed-form inverse fails")
            length = tower.p if cert.a == 0 else tower.mult_order(tower.add(cert.a, 1))
            for k in range(1, length + 1):
                if not np.array_equal(iterate_closed_form(f, gamma, cert, k).table, k_fold(F.table, k)):
                    bad.append(f"iterate {k} differs from composition")
            closed = cycle_structure_closed_form(f, gamma, cert)
            if closed != cycle_structure_brute(F):
                bad.append("closed-form cycles differ from brute force")
        return bad

    def h_criteria():
        for _ in range(max(2, instances // 4)):
            f, gamma, cert = random_instance(tower, rng)
            for h in scalar_fns(tower, rng):
                general_h_perm(f, gamma, cert, h)
                linear_general_h_perm(identity_map(tower), f, gamma, cert, h)
        return None

    def linear_compose():
        if tower.n % 2 == 0 or tower.p == 2:
            L = linear_map_from_coeffs(tower, [tower.primitive] + [0] * (tower.n - 1))
        else:
            L = qplus_map(tower)
        for _ in range(max(2, instances // 4)):
            f, gamma, cert = random_instance(tower, rng)
            linear_compose_perm(L, f, gamma, cert)
        return None

    def kernel_family():
        if tower.n < 2:
            return "skipped"
        for _ in range(max(2, instances // 4)):
            alpha = random_nonzero(tower, rng)
            L = frobenius_minus_scaled(tower, alpha)
            f, cert = lai_construct(random_field_map(tower, rng), alpha, int(rng.integers(0, tower.order)))
            for h in scalar_fns(tower, rng):
                if is_bijection(h.table):
                    kernel_perm(L, f, cert, h, random_nonzero(tower, rng))
        return None

    def marcos():
        L = linear_map_from_coeffs(tower, [0] * (tower.n - 1) + [1])
        for _ in range(max(2, instances // 4)):
            gamma = int(rng.integers(0, tower.order))
            for h in scalar_fns(tower, rng):
                marcos_pp(L, h, gamma)
        return None

    def complete():
        if tower.p == 2:
            return "skipped"
        for _ in range(instances):
            f, gamma, cert = random_instance(tower, rng)
            complete_mapping_shift(f, gamma, cert)
        return None

    def named():
        bad = []
        for family in FAMILIES:
            for _ in range(max(2, instances // 4)):
                params = {"gamma": random_nonzero(tower, rng), "beta": int(rng.integers(0, tower.order)), "t": 1}
                if family == "double_coord":
                    if tower.n < 2:
                        break
                    params = {"alpha": int(rng.integers(tower.q, tower.order)), "beta1": int(rng.integers(0, tower.order)), "beta2": int(rng.integers(0, tower.order))}
                if family in ("qplus_shift_a", "qplus_shift_b") and (tower.n % 2 == 0 or tower.p == 2):
                    break
                if family == "monom_t":
                    if tower.n % 4 or tower.p == 2:
                        break
                    params.pop("gamma")
                build_named_family(tower, family, params)
        return bad

    run("families.dichotomy", dichotomy)
    run("families.inverse_iterates_cycles", inverse_and_iterates)
    run("families.h_criteria", h_criteria)
    run("families.linear_compose", linear_compose)
    run("families.kernel", kernel_family)
    run("families.marcos", marcos)
    run("families.complete", complete)
    run("families.named", named)


def suite_analysis(tower, rng, run, instances=6):
    def trace_multipliers():
        M = mob_set(trace_fn(tower))
        # for n = 1 the trace is the identity, so c = 0 also qualifies
        zero_in = tower.n == 1
        expected = tower.order - tower.order // tower.q - 1 + zero_in
        bad = []
        if len(M) != expected:
            bad.append(f"|M(Tr)| = {len(M)}, expected {expected}")
        for d in range(tower.order):
            predicted = zero_in if d == 0 else tower.trace(tower.inv(d)) != tower.minus_one
            if predicted != (d in M):
                bad.append(f"membership of {d} disagrees")
        return bad

    def duality():
        bad = []
        for _ in range(instances):
            report = duality_check(random_field_map(tower, rng))
            bad.extend(f"c={c}" for c in report.violations)
        return bad

    def inclusion():
        bad = []
        for _ in range(instances):
            f, _, _ = random_instance(tower, rng)
            bad.extend(f"delta={d}" for d in translator_direction_inclusion(f).missing)
        return bad

    def dir_bound():
        for g in scalar_fns(tower, rng, limit=256):
            if g(0) == 0 and tower.minus_one not in g.table.tolist():
                th_dir_bound(g, random_nonzero(tower, rng))
        return None

    run("analysis.trace_multipliers", trace_multipliers)
    run("analysis.duality", duality)
    run("analysis.inclusion", inclusion)
    run("analysis.dir_bound", dir_bound)


_SUITES = {
    "core": suite_core,
    "translators": suite_translators,
    "families": suite_families,
    "analysis": suite_analysis,
}


def run_suites(tower: FieldTower, suite: str = "all", seed: int = 0, command: str = "verify") -> RunReport:
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name not in _SUITES:
            raise ValueError(f"unknown suite {name!r}")
    report = RunReport(command=command, field=tower.spec, seed=seed)
    runner = _Runner(report)
    for name in names:
        # one generator per suite keeps suites independent of each other
        rng = np.random.default_rng([seed, SUITES.index(name)])
        _SUITES[name](tower, rng, runner.run)
    return report


__all__ = [
    "RunReport",
    "SUITES",
    "TranslatorCert",
    "all_scalar_fns",
    "beta_for_value",
    "k_fold",
    "lambda_space",
    "random_field_map",
    "random_ground_fn",
    "random_instance",
    "run_suites",
]
