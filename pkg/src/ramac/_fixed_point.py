"""Damped fixed-point iteration with stall detection."""

from __future__ import annotations

from typing import Callable

import numpy as np

DAMPING = 0.5
TOL = 1e-10
MAX_ITER = 10_000
# residual must improve at least this much over STALL_WINDOW iterations
STALL_WINDOW = 200
STALL_RATIO = 0.99


def damped_iteration(
    update: Callable[[np.ndarray], np.ndarray],
    start: np.ndarray,
    damping: float = DAMPING,
    tol: float = TOL,
    max_iter: int = MAX_ITER,
) -> tuple[np.ndarray, float, int, bool]:
    """Iterate ``v <- (1-damping) v + damping update(v)``.

    Returns ``(v, residual, iterations, converged)`` where residual is
    ``max |update(v) - v|`` at the returned point. Stops early (not
    converged) when the residual stalls, which signals oscillation.
    """
    v = np.asarray(start, dtype=float).copy()
    history: list[float] = []
    for it in range(1, max_iter + 1):
        fv = update(v)
        res = float(np.max(np.abs(fv - v)))
        if res <= tol:
            return v, res, it, True
        history.append(res)
        if len(history) > STALL_WINDOW and res > STALL_RATIO * history[-STALL_WINDOW - 1]:
            return v, res, it, False
        v = (1.0 - damping) * v + damping * fv
    fv = update(v)
    return v, float(np.max(np.abs(fv - v))), max_iter, False
