import json

import numpy as np
import pytest

from wulff_willmore import minkowski as mk
from wulff_willmore.errors import DomainError
from wulff_willmore.identities import (
    GROUPS, NORM_CHOICES, NormCase, norm_cases, run_group, run_identities, sampled_example,
)


@pytest.fixture(scope="module")
def report():
    return run_identities(trials=200, angle_trials=2000, seed=3)


def test_all_groups_pass(report):
    assert report["passed"]
    assert [g["group"] for g in report["groups"]] == list(GROUPS)
    assert set(report["norms"]) == set(NORM_CHOICES)
    for g in report["groups"]:
        assert set(g["norms"]) == set(NORM_CHOICES)
        assert g["passed"]


def test_report_is_json(report):
    assert json.loads(json.dumps(report)) == report


def test_analytic_residuals_are_tight(report):
    for g in report["groups"]:
        for label, res in g["norms"].items():
            assert res["residual"] <= (1e-5 if label == "sampled" else 1e-7)


def test_single_norm_selection():
    rep = run_identities("capillary", theta0=np.pi / 3, trials=50, angle_trials=500)
    assert list(rep["norms"]) == ["capillary"]
    assert rep["norms"]["capillary"]["theta0"] == pytest.approx(np.pi / 3)
    assert rep["passed"]


def test_seeded_runs_repeat():
    a = run_identities("tilted", trials=50, angle_trials=500, seed=7)
    b = run_identities("tilted", trials=50, angle_trials=500, seed=7)
    assert a == b


def test_unknown_norm_and_trials():
    with pytest.raises(DomainError):
        norm_cases("hyperbolic")
    with pytest.raises(DomainError):
        run_identities(trials=0)


def test_group_detects_a_violation():
    # zero tolerance makes the round-off-level dual residuals count as failures
    case = NormCase("ellipsoidal", mk.ellipsoidal(np.diag([1.0, 3.0, 0.2])), 0.0, 0.2)
    res = run_group("cahn_hoffman", [case], trials=100)
    assert not res.passed
    assert res.to_dict()["worst_residual"] > 0


def test_sampled_example_matches_its_table():
    F = sampled_example()
    z = np.random.default_rng(0).normal(size=(50, 3))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    exact = 1 + 0.15 * z[:, 0] ** 2 - 0.1 * z[:, 1] * z[:, 2] + 0.05 * z[:, 2] ** 3
    assert np.allclose(F.value(z), exact, atol=1e-10)
