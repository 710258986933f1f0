import itertools

import numpy as np
import pytest

from lintrans.errors import (
    BIsMinusOne,
    CertMismatch,
    CoefficientsNotInSubfield,
    EvenQ,
    FamilyPreconditionFailed,
    HNotBijective,
    HypothesisFailed,
    InvariantViolation,
    KernelNotLine,
    NonBijectiveL,
)
from lintrans.field import make_tower
from lintrans.maps import (
    FieldMap,
    GroundFn,
    ScalarFn,
    frobenius_minus_scaled,
    identity_map,
    identity_scalar,
    linear_map_from_coeffs,
    poly_map,
    trace_fn,
    zero_ground_fn,
)
from lintrans.perms import (
    FiberMap,
    NotPermutation,
    PermTable,
    alternating_map,
    bk,
    build_named_family,
    complete_mapping_shift,
    double_coord_map,
    general_h_perm,
    iterate_closed_form,
    kernel_perm,
    linear_compose_perm,
    linear_general_h_perm,
    marcos_pp,
    qplus_map,
    shift_perm,
    shift_perm_inverse,
    two_translator_perm,
)
from lintrans.translators import TranslatorCert, certify, lai_construct
from lintrans.verify import all_scalar_fns, random_field_map, random_instance
from oracles import compose_k, fibers, is_perm, naive


def _linear_trace(tower, beta):
    return GroundFn(tower, tower.trace(tower.mul(beta, tower.elements())))


def test_trace_shift_on_f27_is_permutation(F27):
    f = trace_fn(F27)
    P = shift_perm(f, 1, certify(f, 1))
    assert isinstance(P, PermTable)
    assert is_perm(P.table)


def test_trace_shift_on_f9_is_three_to_one(F9):
    f = trace_fn(F9)
    cert = certify(f, 1)
    assert cert.a == 2
    R = shift_perm(f, 1, cert)
    assert isinstance(R, FiberMap) and R.fiber_size == 3
    assert fibers(R.table) == {3: 3}


def test_zero_function_gives_identity(F9):
    f = zero_ground_fn(F9)
    cert = certify(f, 4)
    assert shift_perm(f, 4, cert).table.tolist() == list(range(9))
    assert shift_perm_inverse(f, 4, cert).table.tolist() == list(range(9))


def test_wrong_certificate(F9):
    f = trace_fn(F9)
    with pytest.raises(CertMismatch):
        shift_perm(f, 1, TranslatorCert(1, 0, f))
    with pytest.raises(CertMismatch):
        shift_perm(f, 3, certify(f, 1))


def test_inverse_on_f27_trace(F27):
    f = trace_fn(F27)
    cert = certify(f, 1)
    F = shift_perm(f, 1, cert)
    inv = shift_perm_inverse(f, 1, cert)
    assert F.table[inv.table].tolist() == list(range(27))
    assert inv == F.inverse()
    # b = 0: the inverse is x - gamma f(x)
    assert inv.table.tolist() == F27.sub(F27.elements(), f.table).tolist()


def test_inverse_rejects_minus_one(F9):
    f = trace_fn(F9)
    with pytest.raises(BIsMinusOne):
        shift_perm_inverse(f, 1, certify(f, 1))


def test_bk_values(F9):
    assert bk(F9, 1, 0).value == 1
    assert bk(F9, 3, 0).value == 0  # B_p = p = 0
    assert bk(F9, 2, 1).value == 0  # 1 + 2
    assert bk(F9, 1, 1).value == 1
    with pytest.raises(ValueError):
        bk(F9, -1, 0)


@pytest.mark.parametrize("key", [(3, 1, 2), (2, 2, 2), (5, 1, 2)])
def test_bk_matches_geometric_sum(key):
    tower = make_tower(*key)
    for b in range(tower.q):
        acc, term = 0, 1
        for k in range(1, 9):
            acc = tower.add(acc, term)
            term = tower.mul(term, tower.add(b, 1))
            assert bk(tower, k, b).value == acc


def test_iterates_q3_b1_period_two(F27, rng):
    f, gamma, cert = random_instance(F27, rng, 1)
    F = shift_perm(f, gamma, cert)
    assert iterate_closed_form(f, gamma, cert, 1) == F
    two = iterate_closed_form(f, gamma, cert, 2)
    assert two.table.tolist() == list(range(27)) == compose_k(F.table, 2)


def test_iterates_b0_period_p(F27):
    f = trace_fn(F27)
    cert = certify(f, 1)
    assert iterate_closed_form(f, 1, cert, 3).table.tolist() == list(range(27))


def test_fixed_points_are_zeros(F81, rng):
    for _ in range(5):
        f, gamma, cert = random_instance(F81, rng)
        if cert.a == F81.minus_one:
            continue
        P = shift_perm(f, gamma, cert)
        fixed = {x for x in range(81) if P(x) == x}
        assert fixed == set(f.zeros().tolist())


def test_linear_compose_identity_reduces(F9, rng):
    f, gamma, cert = random_instance(F9, rng)
    a = linear_compose_perm(identity_map(F9), f, gamma, cert)
    b = shift_perm(f, gamma, cert)
    assert np.array_equal(a.table, b.table) and a.verdict == b.verdict


def test_linear_compose_b_minus_one_fiber(F9):
    f = trace_fn(F9)
    L = linear_map_from_coeffs(F9, [F9.primitive, 0])
    R = linear_compose_perm(L, f, 1, certify(f, 1))
    assert isinstance(R, FiberMap) and R.fiber_size == 3


def test_linear_compose_qplus_f27(F27):
    F = naive(F27)
    f = trace_fn(F27)
    gamma = next(g for g in range(1, 27) if F.trace(g) != 2)
    P = linear_compose_perm(qplus_map(F27), f, gamma, certify(f, gamma))
    ref = [F.add(F.add(F.pow(x, 3), x), F.mul(F.add(F.pow(gamma, 3), gamma), F.trace(x))) for x in range(27)]
    assert P.table.tolist() == ref and is_perm(ref)


def test_linear_compose_rejects_singular_qplus_in_char_two(F8):
    f = trace_fn(F8)
    with pytest.raises(NonBijectiveL):
        linear_compose_perm(qplus_map(F8), f, 1, certify(f, 1))


def test_linear_compose_rejects_nonlinear(F9):
    f = trace_fn(F9)
    with pytest.raises(NonBijectiveL):
        linear_compose_perm(poly_map(F9, [(1, 5)]), f, 3, certify(f, 3))


def test_two_translators_f27():
    tower = make_tower(3, 1, 3)
    F = naive(tower)
    found = 0
    for beta1, beta2, gamma, delta in itertools.product([1, 2, 5], [1, 4, 7], [1, 3], [4, 9]):
        f, g = _linear_trace(tower, beta1), _linear_trace(tower, beta2)
        certs = [certify(f, gamma), certify(g, gamma), certify(f, delta), certify(g, delta)]
        b1, b2, d1, d2 = (c.a for c in certs)
        ok = b1 != 2 and (d2 - d1 * b2 * pow(b1 + 1, -1, 3)) % 3 != 2
        if not ok:
            with pytest.raises(HypothesisFailed):
                two_translator_perm(f, g, gamma, delta, *certs)
            continue
        found += 1
        P = two_translator_perm(f, g, gamma, delta, *certs)
        ref = [F.add(F.add(x, F.mul(gamma, int(f.table[x]))), F.mul(delta, int(g.table[x]))) for x in range(27)]
        assert P.table.tolist() == ref and is_perm(ref)
    assert found > 0


def test_two_translators_g_zero_reduces(F9):
    # f is linear, so every element translates it; g = 0 kills the delta term
    f = trace_fn(F9)
    g = zero_ground_fn(F9)
    for gamma in (g_ for g_ in range(1, 9) if F9.trace(g_) != F9.minus_one):
        cert = certify(f, gamma)
        for delta in range(1, 9):
            P = two_translator_perm(f, g, gamma, delta, cert, certify(g, gamma), certify(f, delta), certify(g, delta))
            assert np.array_equal(P.table, shift_perm(f, gamma, cert).table)


def test_general_h_identity_recovers_shift(F9, rng):
    for _ in range(10):
        f, gamma, cert = random_instance(F9, rng)
        a = general_h_perm(f, gamma, cert, identity_scalar(F9))
        b = shift_perm(f, gamma, cert)
        assert a.verdict in ("permutation", "not-permutation")
        assert (a.verdict == "permutation") == (b.verdict == "permutation")


def test_general_h_b_zero_always_permutation(F9, rng):
    f, gamma, cert = random_instance(F9, rng, 0)
    for h in all_scalar_fns(F9):
        assert general_h_perm(f, gamma, cert, h).verdict == "permutation"


def test_general_h_exhaustive_b1_f9(F9, rng):
    F = naive(F9)
    f, gamma, cert = random_instance(F9, rng, 1)
    verdicts = []
    for h in all_scalar_fns(F9):
        R = general_h_perm(f, gamma, cert, h)
        ref = [F.add(x, F.mul(gamma, int(h.table[int(f.table[x])]))) for x in range(9)]
        g = [(int(h.table[u]) + u) % 3 for u in range(3)]
        assert (R.verdict == "permutation") == is_perm(ref) == is_perm(g)
        verdicts.append(R.verdict)
    assert "not-permutation" in verdicts and "permutation" in verdicts
    assert isinstance(R, (PermTable, NotPermutation))


def test_linear_general_h_reductions(F9, rng):
    f, gamma, cert = random_instance(F9, rng)
    for h in list(all_scalar_fns(F9))[:9]:
        a = linear_general_h_perm(identity_map(F9), f, gamma, cert, h)
        b = general_h_perm(f, gamma, cert, h)
        assert np.array_equal(a.table, b.table) and a.verdict == b.verdict
    L = linear_map_from_coeffs(F9, [2, 0])
    a = linear_general_h_perm(L, f, gamma, cert, identity_scalar(F9))
    b = linear_compose_perm(L, f, gamma, cert)
    assert np.array_equal(a.table, b.table)


def test_marcos_zero_h_is_L(F9):
    L = linear_map_from_coeffs(F9, [0, 1])
    R = marcos_pp(L, ScalarFn(F9, [0, 0, 0]), 5)
    assert np.array_equal(R.table, L.table) and R.verdict == "permutation"


def test_marcos_identity_matches_general_h(F9):
    f = trace_fn(F9)
    for gamma in range(1, 9):
        for h in all_scalar_fns(F9):
            a = marcos_pp(identity_map_linear(F9), h, gamma)
            b = general_h_perm(f, gamma, certify(f, gamma), h)
            assert np.array_equal(a.table, b.table) and a.verdict == b.verdict


def identity_map_linear(tower):
    return linear_map_from_coeffs(tower, [1] + [0] * (tower.n - 1))


def test_marcos_preconditions(F9):
    with pytest.raises(CoefficientsNotInSubfield):
        marcos_pp(linear_map_from_coeffs(F9, [F9.primitive, 0]), identity_scalar(F9), 1)
    with pytest.raises(CoefficientsNotInSubfield):
        marcos_pp(identity_map(F9), identity_scalar(F9), 1)
    with pytest.raises(NonBijectiveL):
        marcos_pp(frobenius_minus_scaled(F9, 1), identity_scalar(F9), 1)


def test_kernel_perm_example_f9(F9):
    F = naive(F9)
    L = frobenius_minus_scaled(F9, 1)
    beta = next(b for b in range(9) if F.trace(b) != 0)
    gamma = next(g for g in range(9) if F.trace(g) != 0)
    f = _linear_trace(F9, beta)
    P = kernel_perm(L, f, certify(f, 1), identity_scalar(F9), gamma)
    assert P.verdict == "permutation"
    # gamma in the image of L, or b = 0, gives a non-permutation
    image_gamma = int(L(2))
    assert kernel_perm(L, f, certify(f, 1), identity_scalar(F9), image_gamma).verdict == "not-permutation"
    f0 = _linear_trace(F9, next(b for b in range(1, 9) if F.trace(b) == 0))
    assert kernel_perm(L, f0, certify(f0, 1), identity_scalar(F9), gamma).verdict == "not-permutation"


def test_kernel_perm_preconditions(F9):
    f = trace_fn(F9)
    with pytest.raises(KernelNotLine):
        kernel_perm(identity_map_linear(F9), f, certify(f, 1), identity_scalar(F9), 1)
    with pytest.raises(HNotBijective):
        kernel_perm(frobenius_minus_scaled(F9, 1), f, certify(f, 1), ScalarFn(F9, [0, 0, 1]), 1)


def test_complete_mapping(F27, rng):
    F = naive(F27)
    for b in range(3):
        f, gamma, cert = random_instance(F27, rng, b)
        R = complete_mapping_shift(f, gamma, cert)
        table = [F.add(x, F.mul(gamma, int(f.table[x]))) for x in range(27)]
        complete = is_perm(table) and is_perm([F.add(table[x], x) for x in range(27)])
        assert complete == (b == 0) == (R.verdict == "permutation")


def test_complete_mapping_even_q(F16):
    f = trace_fn(F16)
    with pytest.raises(EvenQ):
        complete_mapping_shift(f, 1, certify(f, 1))


def test_permtable_rejects_non_bijection(F9):
    with pytest.raises(InvariantViolation):
        PermTable(F9, [0] * 9)
    with pytest.raises(InvariantViolation):
        FiberMap(F9, [0, 0, 1, 1, 1, 2, 2, 2, 2], 3)


# -- named families ----------------------------------------------------------


def test_lai_family_trivial(F27):
    for gamma in (1, 7, 20):
        R = build_named_family(F27, "lai_shift", {"gamma": gamma, "beta": 0})
        assert R.table.tolist() == list(range(27))
        assert R.criterion["holds"] and R.criterion["b"] == 0


@pytest.mark.parametrize("key", [(3, 1, 2), (2, 1, 4), (5, 1, 2), (2, 2, 2)])
def test_lai_family_sweep(key, rng):
    tower = make_tower(*key)
    F = naive(tower)
    H = random_field_map(tower, rng)
    seen = set()
    for gamma in range(1, tower.order, 3):
        for beta in range(0, tower.order, 2):
            R = build_named_family(tower, "lai_shift", {"gamma": gamma, "beta": beta, "H": H})
            b = F.trace(F.mul(gamma, beta))
            expected = "q-to-1" if b == tower.minus_one else "permutation"
            assert R.verdict == expected
            seen.add(expected)
    assert seen == {"q-to-1", "permutation"}


def test_qplus_families_f27(F27, rng):
    F = naive(F27)
    H = poly_map(F27, [(2, 2), (1, 5)])
    for gamma, beta in itertools.product((1, 4, 11), (0, 3, 8, 17)):
        b = F.trace(F.mul(gamma, beta))
        for fam in ("qplus_shift_a", "qplus_shift_b"):
            R = build_named_family(F27, fam, {"gamma": gamma, "beta": beta, "H": H})
            assert (R.verdict == "permutation") == (b != 2)
            assert R.verdict in ("permutation", "q-to-1")


def test_alternating_sum_is_twice_inverse(F27):
    Q, A = qplus_map(F27), alternating_map(F27)
    assert Q.table[A.table].tolist() == F27.int_mul(2, F27.elements()).tolist()
    F125 = make_tower(5, 1, 3)
    Q, A = qplus_map(F125), alternating_map(F125)
    assert Q.table[A.table].tolist() == F125.int_mul(2, F125.elements()).tolist()


def test_qplus_preconditions(F9, F8):
    with pytest.raises(FamilyPreconditionFailed):
        build_named_family(F9, "qplus_shift_a", {})
    with pytest.raises(FamilyPreconditionFailed):
        build_named_family(F8, "qplus_shift_b", {})


def test_double_coord_map_kernel(F27):
    for alpha in (3, 10, 25):
        M = double_coord_map(F27, alpha)
        assert M(1) == 0 and M(alpha) == 0


def test_double_coord_family(F27, rng):
    F = naive(F27)
    sufficient = 0
    for _ in range(30):
        alpha = int(rng.integers(3, 27))
        b1, b2 = (int(v) for v in rng.integers(0, 27, 2))
        R = build_named_family(F27, "double_coord", {"alpha": alpha, "beta1": b1, "beta2": b2})
        assert (R.verdict == "permutation") == is_perm(R.table)
        if R.criterion["holds"]:
            sufficient += 1
            assert R.verdict == "permutation"
        t = [F.trace(v) for v in (b1, b2, F.mul(alpha, b1), F.mul(alpha, b2))]
        assert [R.criterion[k] for k in ("Tr(beta1)", "Tr(beta2)", "Tr(alpha*beta1)", "Tr(alpha*beta2)")] == t
    assert sufficient > 0
    with pytest.raises(FamilyPreconditionFailed):
        build_named_family(F27, "double_coord", {"alpha": 1})


def test_monom_family_nontrivial_exponent():
    tower = make_tower(5, 1, 4)
    F = naive(tower)
    from lintrans.translators import monom_coset

    coset = monom_coset(tower)
    for gamma, beta in ((coset[0], 1), (coset[3], 7), (coset[5], 0)):
        R = build_named_family(tower, "monom_t", {"gamma": gamma, "beta": beta, "t": 3})
        assert R.verdict == "permutation" and is_perm(R.table)
        b = F.trace(F.mul(gamma, beta))
        x = 2
        inner = F.trace(F.add(F.pow(x, 6), F.mul(beta, x)))
        val = F.mul(F.pow(b, 3), (pow(inner, 3, 5) - inner) % 5)
        assert R(x) == F.add(x, F.mul(gamma, val))


def test_monom_family_preconditions(F81, F27):
    with pytest.raises(FamilyPreconditionFailed):
        build_named_family(F27, "monom_t", {})
    with pytest.raises(FamilyPreconditionFailed):
        build_named_family(F81, "monom_t", {"t": 2})
    with pytest.raises(FamilyPreconditionFailed):
        build_named_family(F81, "monom_t", {"gamma": 1})


def test_artin_schreier_with_h_and_t(F27):
    F = naive(F27)
    H = poly_map(F27, [(1, 2)])
    for gamma, beta in itertools.product(range(0, 27, 4), range(0, 27, 5)):
        R = build_named_family(F27, "artin_schreier_t", {"gamma": gamma, "beta": beta, "t": 1, "H": H})
        assert (R.verdict == "permutation") == (F.trace(gamma) != 0 and F.trace(beta) != 0)
    F25 = make_tower(5, 1, 2)
    R = build_named_family(F25, "artin_schreier_t", {"gamma": 1, "beta": 1, "t": 3})
    assert R.verdict == ("permutation" if F25.trace(1) != 0 else "not-permutation")
    with pytest.raises(FamilyPreconditionFailed):
        build_named_family(F25, "artin_schreier_t", {"t": 2})


def test_unknown_family(F9):
    with pytest.raises(FamilyPreconditionFailed):
        build_named_family(F9, "nope", {})


def test_lai_construct_random_h_is_verified(F16q4, rng):
    f, cert = lai_construct(random_field_map(F16q4, rng), 6, 9)
    P = shift_perm(f, 6, cert)
    assert P.verdict in ("permutation", "q-to-1")
    assert isinstance(FieldMap(F16q4, P.table), FieldMap)
