"""Slack-variable augmented Lagrangian Bayesian optimization."""

import json

from ._core import *  # noqa: F401,F403
from ._core import run_json

__version__ = "0.1.0"


def run(problem, method="slack-al-ei-optim", budget=40, n0=10, seed=0, epsilon=1e-2, candidate_count=1000):
    """Run one sequential design and return its trace as a dict.

    Non-finite numbers in the trace are None; a None best_valid_f means no
    valid point had been found yet.
    """
    return json.loads(run_json(problem, method, budget, n0, seed, epsilon, candidate_count))
