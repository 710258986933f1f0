import numpy as np
import pytest

from lintrans.errors import InvariantViolation
from lintrans.field import make_tower
from lintrans.verify import RunReport, _Runner, beta_for_value, k_fold, random_instance, run_suites, scalar_fns


@pytest.mark.parametrize(
    "key",
    [(2, 1, 1), (3, 1, 1), (3, 1, 2), (2, 2, 2), (2, 1, 3), (3, 1, 3), (2, 1, 4), (5, 1, 2), (3, 1, 4), (2, 3, 1)],
)
def test_all_suites_pass(key):
    report = run_suites(make_tower(*key), "all", seed=1)
    assert report.status == "pass", report.counterexamples


def test_report_is_reproducible():
    tower = make_tower(3, 1, 2)
    a = run_suites(tower, "all", seed=9).to_dict()
    b = run_suites(tower, "all", seed=9).to_dict()
    assert a == b


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suites(make_tower(3, 1, 2), "bogus")


def test_runner_records_failures():
    report = RunReport("verify", "x", 0)
    runner = _Runner(report)

    def boom():
        raise InvariantViolation("broken")

    runner.run("a", boom)
    runner.run("b", lambda: ["counterexample"])
    runner.run("c", lambda: "skipped")
    runner.run("d", lambda: None)
    assert report.verdicts == {"a": "fail", "b": "fail", "c": "skipped", "d": "pass"}
    assert report.status == "fail" and len(report.counterexamples) == 2


def test_beta_for_value_hits_target(rng):
    tower = make_tower(2, 2, 2)
    for b in range(tower.q):
        gamma = int(rng.integers(1, tower.order))
        beta = beta_for_value(tower, gamma, b, rng)
        assert tower.trace(tower.mul(beta, gamma)) == b


def test_random_instance_forced_value(rng):
    tower = make_tower(3, 1, 3)
    for b in range(3):
        _, _, cert = random_instance(tower, rng, b)
        assert cert.a == b and cert.check()


def test_k_fold():
    table = np.array([1, 2, 0])
    assert k_fold(table, 0).tolist() == [0, 1, 2]
    assert k_fold(table, 2).tolist() == [2, 0, 1]


def test_scalar_fns_exhaustive_or_sampled(rng):
    assert len(scalar_fns(make_tower(3, 1, 2), rng)) == 27
    assert len(scalar_fns(make_tower(5, 1, 2), rng, limit=64)) == 64
