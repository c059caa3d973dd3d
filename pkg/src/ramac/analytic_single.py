"""Single-class request/grant/transmit chain with truncated stop-and-wait ARQ.

Per-user states, in order: ``idle``, ``collide``, ``t0`` .. ``t{n-1}``.
``t{j}`` is the (j+1)-th transmission attempt of a granted packet.

One step (one MAC frame):

* idle: requests with probability ``a``; the request lands on a free
  request channel with probability ``x`` (-> t0) or collides (-> collide).
* collide: retries with probability ``c`` and wins with probability ``x``
  (-> t0); otherwise returns to idle.
* t{j}: the frame is corrupted with probability ``e`` (-> t{j+1}); the last
  attempt always returns to idle, delivered or dropped.

``x`` depends on the mean number of contenders, which depends on the state
probabilities, so the equilibrium is a mean-field fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import optimize

from ramac import _fixed_point, metrics
from ramac.errors import ConvergenceError, DomainError
from ramac.markov_core import TransitionMatrix
from ramac.metrics import MetricsReport
from ramac.phy_channel import packet_error_probability


def _check_count(value, name: str, minimum: int = 1) -> None:
    if int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value}")


def _check_prob(value, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must be a probability, got {value}")


@dataclass(frozen=True)
class SingleParams:
    N: int
    k: int
    a: float
    c: float
    n: int
    e: float
    L: int

    def __post_init__(self):
        for name in ("N", "k", "n", "L"):
            _check_count(getattr(self, name), name)
            object.__setattr__(self, name, int(getattr(self, name)))
        for name in ("a", "c", "e"):
            _check_prob(getattr(self, name), name)
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_bit_errors(cls, *, N, k, a, c, n, ber, nb, L) -> "SingleParams":
        return cls(N=N, k=k, a=a, c=c, n=n, e=packet_error_probability(ber, nb), L=L)


def contention_success(k: int, n_ave: float) -> float:
    """Probability a requester's channel is not chosen by any other contender."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if n_ave < 0:
        raise DomainError(f"n_ave must be >= 0, got {n_ave}")
    return (1.0 - 1.0 / k) ** max(n_ave - 1.0, 0.0)


def state_labels(n: int) -> tuple[str, ...]:
    return ("idle", "collide") + tuple(f"t{j}" for j in range(n))


@dataclass(frozen=True, eq=False)
class Equilibrium:
    params: SingleParams
    x: float
    s_i: float
    s_c: float
    s_t: np.ndarray
    n_ave: float
    iterations: int = 0
    residual: float = float("nan")
    method: str = "closed-form"

    @cached_property
    def b(self) -> float:
        p = self.params
        return p.a * self.x * (1.0 + p.c * (1.0 - self.x))

    @property
    def s_t_total(self) -> float:
        return float(np.sum(self.s_t))

    @property
    def drop_probability(self) -> float:
        """Stationary rate of packets abandoned after the last attempt."""
        return float(self.s_t[-1] * self.params.e)

    def vector(self) -> np.ndarray:
        return np.concatenate(([self.s_i, self.s_c], self.s_t))

    @property
    def labels(self) -> tuple[str, ...]:
        return state_labels(self.params.n)


def _states(p: SingleParams, x: float) -> tuple[float, float, np.ndarray]:
    b = p.a * x * (1.0 + p.c * (1.0 - x))
    ladder = p.e ** np.arange(p.n)
    collide = p.a * (1.0 - x)
    d = 1.0 + b * ladder.sum() + collide
    return 1.0 / d, collide / d, b * ladder / d


def closed_form_states(params: SingleParams, x: float) -> Equilibrium:
    """Stationary state probabilities for a fixed contention-success probability."""
    _check_prob(x, "x")
    s_i, s_c, s_t = _states(params, x)
    n_ave = params.N * (params.a * s_i + params.c * s_c)
    return Equilibrium(params, x, s_i, s_c, s_t, n_ave)


def transition_matrix(params: SingleParams, x: float) -> TransitionMatrix:
    """Column-stochastic one-frame transition matrix for a frozen ``x``."""
    p = params
    dim = p.n + 2
    m = np.zeros((dim, dim))
    idle, col, t0 = 0, 1, 2
    m[idle, idle] = 1.0 - p.a
    m[col, idle] = p.a * (1.0 - x)
    m[t0, idle] = p.a * x
    m[t0, col] = p.c * x
    m[idle, col] = 1.0 - p.c * x
    for j in range(p.n):
        src = t0 + j
        if j < p.n - 1:
            m[src + 1, src] = p.e
            m[idle, src] = 1.0 - p.e
        else:
            m[idle, src] = 1.0
    return TransitionMatrix(m, state_labels(p.n))


def _active_users(p: SingleParams, n_ave: float) -> float:
    s_i, s_c, _ = _states(p, contention_success(p.k, n_ave))
    return p.N * (p.a * s_i + p.c * s_c)


def solve_equilibrium(params: SingleParams) -> Equilibrium:
    """Self-consistent equilibrium of the chain and the mean contender count.

    Damped iteration on the mean number of active users; if it stalls the
    root of ``F(n) - n`` is bracketed on ``[0, N]`` and refined with Brent's
    method.
    """
    p = params
    update = lambda v: np.array([_active_users(p, float(v[0]))])
    v, res, iters, ok = _fixed_point.damped_iteration(update, np.array([p.N * p.a]))
    n_ave, method = float(v[0]), "damped"
    if not ok:
        g = lambda n: _active_users(p, n) - n
        try:
            n_ave, info = optimize.brentq(g, 0.0, float(p.N), xtol=1e-14, full_output=True)
            iters += info.iterations
            res = abs(g(n_ave))
            method = "bisection"
        except ValueError:
            pass
        if res > _fixed_point.TOL:
            raise ConvergenceError("single-class fixed point did not converge", n_ave, res, iters)
    x = contention_success(p.k, n_ave)
    s_i, s_c, s_t = _states(p, x)
    return Equilibrium(p, x, s_i, s_c, s_t, n_ave, iters, res, method)


def retransmission_stats(eq: Equilibrium) -> tuple[float, float]:
    """(average transmissions per packet from the ARQ ladder, ARQ efficiency)."""
    n_t = metrics.literal_retransmissions(eq.params.e, eq.params.n, eq.b)
    return n_t, metrics.arq_efficiency(n_t)


def access_metrics(eq: Equilibrium) -> tuple[float, float, float, float]:
    """(request throughput, acceptance probability, access delay, energy in dB).

    Raises DegenerateLoadError when the offered load ``N a`` is zero.
    """
    p = eq.params
    th = metrics.request_throughput(p.N * float(eq.s_t[0]), p.k)
    p_a = metrics.acceptance_probability(th, p.N * p.a)
    return th, p_a, metrics.access_delay(p_a), metrics.access_energy_db(p_a)


def capacity_metrics(eq: Equilibrium) -> tuple[float, float]:
    """(data-channel utilization, net acceptance probability)."""
    p = eq.params
    occ = p.N * eq.s_t_total
    _, p_a, _, _ = access_metrics(eq)
    return metrics.channel_utilization(p.L, occ), metrics.net_acceptance(p_a, p.L, occ)


def single_metrics(eq: Equilibrium) -> MetricsReport:
    p = eq.params
    n_t, _ = retransmission_stats(eq)
    return metrics.build_report(
        grant_rate=p.N * float(eq.s_t[0]),
        occupancy=p.N * eq.s_t_total,
        request_channels=p.k,
        data_channels=p.L,
        offered_load=p.N * p.a,
        retransmissions=n_t,
        drop_probability=eq.drop_probability,
        conditional=metrics.conditional_retransmissions(p.e, p.n),
    )
