"""Two-class (high/low priority) extension of the single-class chain.

Request channels are split between the classes by a weight factor. Each
request issued from idle belongs to class 1 with probability ``l``; a
class-i request contends only on the class's own ``k_i`` channels and a
collided class-i user retries with probability ``c_i``. State order:
``idle, c1, t1_0..t1_{n-1}, c2, t2_0..t2_{n-1}``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy import optimize

from ramac import _fixed_point, metrics
from ramac.analytic_single import _check_count, _check_prob, contention_success
from ramac.errors import ConvergenceError, DegenerateLoadError, DomainError
from ramac.markov_core import TransitionMatrix
from ramac.metrics import MetricsReport
from ramac.phy_channel import packet_error_probability


class StarvationWarning(UserWarning):
    """A traffic class has load but no request channels."""


@dataclass(frozen=True)
class QosParams:
    N: int
    a: float
    l: float
    m: float
    k_max: int
    c1: float
    c2: float
    n: int
    e: float
    L1: int
    L2: int

    def __post_init__(self):
        _check_count(self.k_max, "k_max", 2)
        for name in ("N", "n", "L1", "L2", "k_max"):
            _check_count(getattr(self, name), name)
            object.__setattr__(self, name, int(getattr(self, name)))
        for name in ("a", "l", "c1", "c2", "e"):
            _check_prob(getattr(self, name), name)
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.m > 0 and math.isfinite(self.m)):
            raise DomainError(f"m must be positive, got {self.m}")
        object.__setattr__(self, "m", float(self.m))

    @classmethod
    def from_bit_errors(cls, *, ber, nb, **kw) -> "QosParams":
        return cls(e=packet_error_probability(ber, nb), **kw)


@dataclass(frozen=True)
class ChannelSplit:
    k1: int
    k2: int

    @property
    def k_max(self) -> int:
        return self.k1 + self.k2


def split_channels(l: float, m: float, k_max: int) -> ChannelSplit:
    """Weighted split of ``k_max`` request channels; class 1 gets the floor.

    Exact rational arithmetic keeps integral boundaries from rounding down.
    """
    _check_prob(l, "l")
    if not m > 0:
        raise DomainError(f"m must be positive, got {m}")
    _check_count(k_max, "k_max", 2)
    lm = Fraction(l) * Fraction(m)
    k1 = math.floor(lm / (lm + 1 - Fraction(l)) * int(k_max))
    return ChannelSplit(k1, int(k_max) - k1)


def qos_state_labels(n: int) -> tuple[str, ...]:
    return (
        ("idle", "c1")
        + tuple(f"t1_{j}" for j in range(n))
        + ("c2",)
        + tuple(f"t2_{j}" for j in range(n))
    )


@dataclass(frozen=True, eq=False)
class QosEquilibrium:
    params: QosParams
    split: ChannelSplit
    x1: float
    x2: float
    s_i: float
    s_c1: float
    s_c2: float
    s_t1: np.ndarray
    s_t2: np.ndarray
    n1a: float
    n2a: float
    iterations: int = 0
    residual: float = float("nan")
    method: str = "closed-form"
    starved: tuple[bool, bool] = (False, False)

    @cached_property
    def b1(self) -> float:
        p = self.params
        return p.a * p.l * self.x1 * (1.0 + p.c1 * (1.0 - self.x1))

    @cached_property
    def b2(self) -> float:
        p = self.params
        return p.a * (1.0 - p.l) * self.x2 * (1.0 + p.c2 * (1.0 - self.x2))

    def vector(self) -> np.ndarray:
        return np.concatenate(([self.s_i, self.s_c1], self.s_t1, [self.s_c2], self.s_t2))

    @property
    def labels(self) -> tuple[str, ...]:
        return qos_state_labels(self.params.n)


def _class_x(k_i: int, n_ia: float) -> float:
    # no channels at all: every request collides
    return 0.0 if k_i == 0 else contention_success(k_i, n_ia)


def _states(p: QosParams, x1: float, x2: float):
    y1, y2 = 1.0 - x1, 1.0 - x2
    b1 = p.a * p.l * x1 * (1.0 + p.c1 * y1)
    b2 = p.a * (1.0 - p.l) * x2 * (1.0 + p.c2 * y2)
    ladder = p.e ** np.arange(p.n)
    col1 = p.a * p.l * y1
    col2 = p.a * (1.0 - p.l) * y2
    d = 1.0 + (b1 + b2) * ladder.sum() + col1 + col2
    return 1.0 / d, col1 / d, col2 / d, b1 * ladder / d, b2 * ladder / d


def _starvation(p: QosParams, split: ChannelSplit) -> tuple[bool, bool]:
    return (
        split.k1 == 0 and p.a * p.l > 0.0,
        split.k2 == 0 and p.a * (1.0 - p.l) > 0.0,
    )


def qos_closed_form_states(params: QosParams, split: ChannelSplit, x1: float, x2: float) -> QosEquilibrium:
    _check_prob(x1, "x1")
    _check_prob(x2, "x2")
    p = params
    s_i, s_c1, s_c2, s_t1, s_t2 = _states(p, x1, x2)
    n1a = p.N * (p.l * p.a * s_i + p.c1 * s_c1)
    n2a = p.N * ((1.0 - p.l) * p.a * s_i + p.c2 * s_c2)
    return QosEquilibrium(p, split, x1, x2, s_i, s_c1, s_c2, s_t1, s_t2, n1a, n2a, starved=_starvation(p, split))


def qos_transition_matrix(params: QosParams, x1: float, x2: float) -> TransitionMatrix:
    p = params
    n = p.n
    dim = 2 * n + 3
    idle = 0
    m = np.zeros((dim, dim))
    m[idle, idle] = 1.0 - p.a
    for col, share, x, c in ((1, p.l, x1, p.c1), (n + 2, 1.0 - p.l, x2, p.c2)):
        t0 = col + 1
        m[col, idle] = p.a * share * (1.0 - x)
        m[t0, idle] = p.a * share * x
        m[t0, col] = c * x
        m[idle, col] = 1.0 - c * x
        for j in range(n):
            src = t0 + j
            if j < n - 1:
                m[src + 1, src] = p.e
                m[idle, src] = 1.0 - p.e
            else:
                m[idle, src] = 1.0
    return TransitionMatrix(m, qos_state_labels(n))


def _active(p: QosParams, split: ChannelSplit, n1a: float, n2a: float) -> tuple[float, float]:
    s_i, s_c1, s_c2, _, _ = _states(p, _class_x(split.k1, n1a), _class_x(split.k2, n2a))
    return (
        p.N * (p.l * p.a * s_i + p.c1 * s_c1),
        p.N * ((1.0 - p.l) * p.a * s_i + p.c2 * s_c2),
    )


def _nested_root(p: QosParams, split: ChannelSplit) -> tuple[float, float, int]:
    """Bracketed fallback: solve class 2 for each class-1 guess, then class 1."""
    calls = 0

    def inner(n1):
        nonlocal calls
        g2 = lambda n2: _active(p, split, n1, n2)[1] - n2
        n2, info = optimize.brentq(g2, 0.0, float(p.N), xtol=1e-14, full_output=True)
        calls += info.iterations
        return n2

    g1 = lambda n1: _active(p, split, n1, inner(n1))[0] - n1
    n1 = optimize.brentq(g1, 0.0, float(p.N), xtol=1e-14)
    return n1, inner(n1), calls


def solve_equilibrium_qos(params: QosParams, split: ChannelSplit | None = None) -> QosEquilibrium:
    """Joint fixed point of both classes' contention probabilities."""
    p = params
    if split is None:
        split = split_channels(p.l, p.m, p.k_max)
    elif split.k_max != p.k_max:
        raise DomainError(f"split {split} does not partition k_max={p.k_max}")
    starved = _starvation(p, split)
    for cls, flag in enumerate(starved, start=1):
        if flag:
            warnings.warn(f"class {cls} has traffic but no request channels; it can never be granted", StarvationWarning)

    update = lambda v: np.array(_active(p, split, float(v[0]), float(v[1])))
    start = np.array([p.N * p.a * p.l, p.N * p.a * (1.0 - p.l)])
    v, res, iters, ok = _fixed_point.damped_iteration(update, start)
    n1a, n2a = float(v[0]), float(v[1])
    method = "damped"
    if not ok:
        try:
            n1a, n2a, calls = _nested_root(p, split)
            iters += calls
            res = float(np.max(np.abs(update(np.array([n1a, n2a])) - [n1a, n2a])))
            method = "bisection"
        except ValueError:
            pass
        if res > _fixed_point.TOL:
            raise ConvergenceError("two-class fixed point did not converge", (n1a, n2a), res, iters)
    x1, x2 = _class_x(split.k1, n1a), _class_x(split.k2, n2a)
    s_i, s_c1, s_c2, s_t1, s_t2 = _states(p, x1, x2)
    return QosEquilibrium(p, split, x1, x2, s_i, s_c1, s_c2, s_t1, s_t2, n1a, n2a, iters, res, method, starved)


def class_access_metrics(eq: QosEquilibrium, cls: int) -> tuple[float, float, float, float]:
    """(throughput, acceptance, delay, energy dB) for class 1 or 2."""
    p = eq.params
    s_t, k_i, share = _class_view(eq, cls)
    th = metrics.request_throughput(p.N * float(s_t[0]), k_i)
    offered = share * p.N * p.a
    if offered <= 0.0:
        raise DegenerateLoadError(f"class {cls} has zero offered load")
    p_a = th / offered
    return th, p_a, metrics.access_delay(p_a), metrics.access_energy_db(p_a)


def _class_view(eq: QosEquilibrium, cls: int):
    p = eq.params
    if cls == 1:
        return eq.s_t1, eq.split.k1, p.l
    if cls == 2:
        return eq.s_t2, eq.split.k2, 1.0 - p.l
    raise DomainError(f"class must be 1 or 2, got {cls}")


def class_metrics(eq: QosEquilibrium) -> tuple[MetricsReport, MetricsReport]:
    p = eq.params
    reports = []
    for cls, b, L_i in ((1, eq.b1, p.L1), (2, eq.b2, p.L2)):
        s_t, k_i, share = _class_view(eq, cls)
        reports.append(
            metrics.build_report(
                grant_rate=p.N * float(s_t[0]),
                occupancy=p.N * float(np.sum(s_t)),
                request_channels=k_i,
                data_channels=L_i,
                offered_load=share * p.N * p.a,
                retransmissions=metrics.literal_retransmissions(p.e, p.n, b),
                drop_probability=float(s_t[-1] * p.e),
                conditional=metrics.conditional_retransmissions(p.e, p.n),
                starved=eq.starved[cls - 1],
            )
        )
    return reports[0], reports[1]
