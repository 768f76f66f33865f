"""Systems of subspaces of finite-dimensional normed spaces.

Subspaces are given as 2-D arrays whose rows span them. ``p`` is 1, 2 or
``float("inf")``; complex arrays switch the system to C^d (p = 2 only).
"""

import json
import os

from ._core import (
    SCHEMA_VERSION,
    BudgetError,
    Error,
    NumericError,
    ValidationError,
    alternating,
    apss_margin,
    c_constant,
    greedy,
    lambda_S,
    psr_margin,
    scenario_schema,
    set_threads,
    task_names,
    theta_bar,
    theta_star,
    theta_x_eps,
)
from . import _core


def run_scenario(scenario, seed=None, tol=None):
    """Run a scenario given as a dict or a path to a JSON file.

    Returns a dict with ``exit_code``, ``report`` (parsed) and ``csv``
    (empty unless the task emits a table row). A malformed dict raises
    ValidationError; a malformed file yields exit code 2 and an error report,
    as with the command-line tool.
    """
    if isinstance(scenario, (str, os.PathLike)):
        code, text, csv = _core._run_scenario_file(os.fspath(scenario), seed, tol)
    else:
        code, text, csv = _core._run_scenario_text(json.dumps(scenario), seed, tol)
    return {"exit_code": code, "report": json.loads(text), "csv": csv, "text": text}


__all__ = [
    "SCHEMA_VERSION",
    "BudgetError",
    "Error",
    "NumericError",
    "ValidationError",
    "alternating",
    "apss_margin",
    "c_constant",
    "greedy",
    "lambda_S",
    "psr_margin",
    "run_scenario",
    "scenario_schema",
    "set_threads",
    "task_names",
    "theta_bar",
    "theta_star",
    "theta_x_eps",
]
