"""Multi-restart Nelder-Mead minimization of the three circuit angles."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .errors import InvalidArgumentError, NonFiniteObjectiveError
from .qubit import TWO_PI, CircuitParams

Objective = Callable[[CircuitParams], float]


@dataclass(frozen=True)
class OptimConfig:
    max_evals: int = 2000
    tolerance: float = 1e-10
    restarts: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.max_evals < 1:
            raise InvalidArgumentError("max_evals must be >= 1")
        if not self.tolerance > 0:
            raise InvalidArgumentError("tolerance must be > 0")
        if self.restarts < 1:
            raise InvalidArgumentError("restarts must be >= 1")


@dataclass
class RestartResult:
    index: int
    initial_params: CircuitParams
    initial_value: float
    best_params: CircuitParams
    best_value: float
    evals: int


@dataclass
class OptimReport:
    best_params: CircuitParams
    best_value: float
    evals_used: int
    trace: list[tuple[int, float]] = field(default_factory=list)
    restarts: list[RestartResult] = field(default_factory=list)


class _BudgetExhausted(Exception):
    pass


def restart_starts(seed: int, restarts: int) -> list[CircuitParams]:
    """Initial angles per restart, uniform on [0, 2pi)^3 from spawned seed streams."""
    children = np.random.SeedSequence(seed).spawn(restarts)
    return [
        CircuitParams(*np.random.Generator(np.random.PCG64(c)).uniform(0.0, TWO_PI, 3).tolist())
        for c in children
    ]


def _run_single(objective: Objective, start: CircuitParams, config: OptimConfig, index: int):
    evals = 0
    best_x = start
    best_f = math.inf
    trace: list[tuple[int, float]] = []

    def wrapped(x):
        nonlocal evals, best_x, best_f
        if evals >= config.max_evals:
            raise _BudgetExhausted
        p = CircuitParams(*map(float, x))
        value = objective(p)
        evals += 1
        if not math.isfinite(value):
            raise NonFiniteObjectiveError(f"objective returned {value!r} at params {tuple(p)}", params=p)
        if value < best_f:
            best_f, best_x = value, p
            trace.append((evals, value))
        return value

    try:
        _scipy_minimize(
            wrapped,
            np.asarray(start, dtype=float),
            method="Nelder-Mead",
            # only the simplex value spread terminates a run
            options={"maxfev": config.max_evals, "fatol": config.tolerance, "xatol": math.inf,
                     "adaptive": False},
        )
    except _BudgetExhausted:
        pass
    initial = trace[0][1]
    return RestartResult(index, start, initial, best_x, best_f, evals), trace


def minimize(objective: Objective, config: OptimConfig = OptimConfig(), threads: int = 1) -> OptimReport:
    """Best of ``config.restarts`` independent Nelder-Mead runs.

    The outcome does not depend on ``threads``: restarts are independent and
    ties are broken by restart index.
    """
    starts = restart_starts(config.seed, config.restarts)
    jobs = [(objective, s, config, i) for i, s in enumerate(starts)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda a: _run_single(*a), jobs))
    else:
        results = [_run_single(*a) for a in jobs]

    trace: list[tuple[int, float]] = []
    offset = 0
    incumbent = math.inf
    for res, run_trace in results:
        for k, value in run_trace:
            if value < incumbent:
                incumbent = value
                trace.append((offset + k, value))
        offset += res.evals
    best = min((r for r, _ in results), key=lambda r: (r.best_value, r.index))
    return OptimReport(
        best_params=best.best_params,
        best_value=best.best_value,
        evals_used=offset,
        trace=trace,
        restarts=[r for r, _ in results],
    )
