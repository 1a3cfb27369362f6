import math

import numpy as np
import pytest

import slackal


def test_chi_square_one_dof_cdf():
    spec = slackal.WNCSSpec([1.0], [0.0])
    # P(chi2_1 <= 1) = erf(1/sqrt 2)
    assert slackal.cdf(spec, 1.0) == pytest.approx(math.erf(1 / math.sqrt(2)), abs=1e-10)


def test_ei_gaussian_zero_sd_is_deterministic_improvement():
    assert slackal.ei_gaussian(1.0, 0.0, 3.0) == 2.0
    assert slackal.ei_gaussian(5.0, 0.0, 3.0) == 0.0


def test_optimal_slack_and_al_value():
    state = slackal.ALState(np.array([1.0, -0.5]), 0.25)
    kinds = slackal.ConstraintKinds(1, 1)
    s = slackal.optimal_slack(np.array([-1.0, 0.3]), state, kinds)
    assert s[0] == pytest.approx(0.75)
    assert s[1] == 0.0
    v = slackal.slack_al_value(0.0, np.array([-1.0, 0.3]), s, state)
    assert math.isfinite(v)


def test_problem_evaluation_and_domain_error():
    f, c = slackal.evaluate("lsq", np.array([0.5, 0.5]))
    assert f == pytest.approx(1.0)
    assert c.shape == (2,)
    with pytest.raises(slackal.DomainError):
        slackal.evaluate("lsq", np.array([1.5, 0.5]))
    with pytest.raises(slackal.ConfigError):
        slackal.evaluate("nope", np.array([0.5, 0.5]))


def test_latin_hypercube_strata():
    X = slackal.latin_hypercube(8, 3, 7)
    assert X.shape == (8, 3)
    for j in range(3):
        assert sorted(np.floor(X[:, j] * 8).astype(int)) == list(range(8))


def test_short_run_is_deterministic():
    a = slackal.run("lsq", "slack-al-ei", budget=12, n0=10, seed=4, candidate_count=100)
    b = slackal.run("lsq", "slack-al-ei", budget=12, n0=10, seed=4, candidate_count=100)
    assert len(a["records"]) == 12
    strip = lambda t: [{k: v for k, v in r.items() if k != "wall_time"} for r in t["records"]]
    assert strip(a) == strip(b)
