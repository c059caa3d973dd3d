"""Parameter sweeps combining the analytic models and the simulator."""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from ramac.analytic_qos import StarvationWarning, solve_equilibrium_qos
from ramac.analytic_single import solve_equilibrium
from ramac.errors import ConvergenceError
from ramac.mac_sim import SimConfig, analytic_values, replicate
from ramac.xp_cli.scenario import Scenario

log = logging.getLogger(__name__)

DEFAULT_FRAMES = 500
DEFAULT_REPLICATIONS = 30
DEFAULT_SEED = 1


@dataclass(frozen=True)
class SimOptions:
    frames: int = DEFAULT_FRAMES
    replications: int = DEFAULT_REPLICATIONS
    seed: int = DEFAULT_SEED

    @classmethod
    def for_scenario(cls, scenario: Scenario, **overrides) -> "SimOptions":
        opts = {k: v for k, v in scenario.sim.items()}
        opts.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**opts)


@dataclass
class SweepRow:
    var: str
    value: float
    analytic: dict[str, float]
    sim: dict[str, float] | None = None
    ci: dict[str, float] | None = None
    status: str = "ok"
    message: str = ""


def analytic_point(scenario: Scenario) -> dict[str, float]:
    """Analytic values (state probabilities, metrics, fixed-point byproducts)."""
    params = scenario.model_params()
    if scenario.model == "single":
        eq = solve_equilibrium(params)
        out = analytic_values(eq)
        out.update(x=eq.x, n_ave=eq.n_ave)
        return out
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StarvationWarning)
        eq = solve_equilibrium_qos(params)
    out = analytic_values(eq)
    out.update(x_1=eq.x1, x_2=eq.x2, n_ave_1=eq.n1a, n_ave_2=eq.n2a)
    return out


def analytic_keys(scenario: Scenario) -> list[str]:
    return sorted(analytic_point(_calm(scenario)).keys())


def _calm(scenario: Scenario) -> Scenario:
    # a light-load copy that always converges, used only to learn the column set
    return scenario.with_value("a", 0.1)


def evaluate_point(args) -> SweepRow:
    scenario, var, value, with_sim, opts = args
    point = scenario.with_value(var, value) if var else scenario
    try:
        analytic = analytic_point(point)
        status, message = "ok", ""
    except ConvergenceError as exc:
        analytic = {k: math.nan for k in analytic_keys(scenario)}
        status, message = "nonconverged", str(exc)
    row = SweepRow(var or "point", float(value) if var else 0.0, analytic, status=status, message=message)
    if with_sim:
        cfg = SimConfig(point.model_params(), frames=opts.frames, replications=opts.replications, seed=opts.seed)
        res = replicate(cfg)
        row.sim = dict(res.estimates)
        row.ci = dict(res.half_widths)
    return row


def run_sweep(
    scenario: Scenario,
    with_simulation: bool = False,
    options: SimOptions | None = None,
    workers: int | None = None,
) -> list[SweepRow]:
    """One row per sweep value, in sweep order; a scenario without a sweep gives one row.

    Points that fail to converge are marked ``nonconverged`` with NaN
    analytic cells instead of aborting the sweep.
    """
    opts = options or SimOptions.for_scenario(scenario)
    if scenario.sweep is None:
        jobs = [(scenario, None, None, with_simulation, opts)]
    else:
        jobs = [(scenario, scenario.sweep.var, v, with_simulation, opts) for v in scenario.sweep.values]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate_point, jobs))
    else:
        rows = [evaluate_point(j) for j in jobs]
    bad = [r for r in rows if r.status != "ok"]
    if bad:
        log.warning("%d of %d sweep points did not converge", len(bad), len(rows))
    return rows
