"""Capacity-constrained demand-response scheduling and allocation engine."""

from ._core import (
    Scenario,
    UtilityPair,
    gm_solve_tiny,
    heat_step,
    lm_allocate,
    oracle_check,
    parse_scenario,
    project_allocation,
    render_scenario,
    round_robin_init,
    run_sweep,
    sg_run,
    solve_home,
    utility_cmp,
)

__all__ = [
    "Scenario",
    "UtilityPair",
    "gm_solve_tiny",
    "heat_step",
    "lm_allocate",
    "oracle_check",
    "parse_scenario",
    "project_allocation",
    "render_scenario",
    "round_robin_init",
    "run_sweep",
    "sg_run",
    "solve_home",
    "utility_cmp",
]
