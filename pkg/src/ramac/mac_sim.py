"""Frame-level Monte-Carlo simulator of the request/grant/transmit protocol.

Each of the N users is a small state machine (idle, collided, or
transmitting attempt j of its current packet). One loop iteration is one
MAC frame:

1. every idle user requests with probability ``a`` (in QoS mode the request
   is high priority with probability ``l``); every collided user retries
   with its class's probability ``c_i``;
2. each requester picks one of its class's request channels uniformly; a
   channel with exactly one request grants it (user -> transmit attempt 0),
   a channel with more than one collides;
3. a fresh requester that collides moves to ``collided``; a retry that
   collides, and a collided user that does not retry, return to idle;
4. each transmitting user's frame is corrupted with probability ``e``; a
   corrupted frame is retried next frame until the n-th attempt, after which
   the packet is dropped. A clean frame delivers the packet.

Randomness: one PCG64 stream per replication, seeded with
``SeedSequence((seed, replication))``, drawing four uniform vectors of
length N per frame in a fixed order. Results are reproducible bit-for-bit
across runs and platforms.

Statistics skip a warm-up prefix of each replication. Packets granted inside
the measurement window are followed to completion (a short data-only drain
after the last frame), so every counted grant ends as exactly one success or
one drop.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ramac import metrics
from ramac.analytic_qos import ChannelSplit, QosEquilibrium, QosParams, class_metrics, split_channels
from ramac.analytic_single import Equilibrium, SingleParams, single_metrics
from ramac.errors import ComparisonError, DomainError

RNG_ALGORITHM = "numpy PCG64, SeedSequence(entropy=(seed, replication)), 4 x N uniforms per frame"
Z95 = 1.959963984540054

IDLE, COLLIDED, TRANSMIT = 0, 1, 2


class ClassMode(str, Enum):
    SINGLE = "SINGLE"
    QOS = "QOS"


@dataclass(frozen=True)
class SimConfig:
    scenario: SingleParams | QosParams
    frames: int = 500
    replications: int = 30
    seed: int = 0
    split: ChannelSplit | None = None
    warmup_fraction: float = 0.1

    def __post_init__(self):
        if not isinstance(self.scenario, (SingleParams, QosParams)):
            raise DomainError(f"unsupported scenario type {type(self.scenario).__name__}")
        if int(self.frames) != self.frames or self.frames < 1:
            raise DomainError(f"frames must be a positive integer, got {self.frames}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise DomainError(f"replications must be a positive integer, got {self.replications}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not 0.0 <= self.warmup_fraction < 1.0:
            raise DomainError(f"warmup_fraction must lie in [0, 1), got {self.warmup_fraction}")
        if isinstance(self.scenario, QosParams):
            if self.split is None:
                p = self.scenario
                object.__setattr__(self, "split", split_channels(p.l, p.m, p.k_max))
            elif self.split.k_max != self.scenario.k_max:
                raise DomainError(f"split {self.split} does not partition k_max={self.scenario.k_max}")
        elif self.split is not None:
            raise DomainError("a channel split only applies to QoS scenarios")

    @property
    def class_mode(self) -> ClassMode:
        return ClassMode.QOS if isinstance(self.scenario, QosParams) else ClassMode.SINGLE

    @property
    def warmup_frames(self) -> int:
        return int(math.floor(self.frames * self.warmup_fraction))

    @property
    def measured_frames(self) -> int:
        return self.frames - self.warmup_frames


@dataclass
class ReplicationCounters:
    """Raw counts for one replication; per-class arrays have one entry per class."""

    index: int
    frames: int
    requests: np.ndarray
    fresh_requests: np.ndarray
    retries: np.ndarray
    grants: np.ndarray
    collisions: np.ndarray
    data_attempts: np.ndarray
    data_successes: np.ndarray
    data_drops: np.ndarray
    idle_occupancy: int
    collided_occupancy: np.ndarray
    transmit_occupancy: np.ndarray
    first_attempt_occupancy: np.ndarray
    transmitters_per_frame: np.ndarray  # (frames, classes)
    grants_per_frame: np.ndarray  # (frames, classes)


def _class_arrays(config: SimConfig):
    p = config.scenario
    if config.class_mode is ClassMode.QOS:
        k = np.array([config.split.k1, config.split.k2])
        c = np.array([p.c1, p.c2])
        l = p.l
    else:
        k = np.array([p.k])
        c = np.array([p.c])
        l = 1.0
    return k, c, l


def make_rng(seed: int, replication: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((int(seed), int(replication)))))


def run_replication(config: SimConfig, index: int) -> ReplicationCounters:
    p = config.scenario
    N, n, e, a = p.N, p.n, p.e, p.a
    k, c, l = _class_arrays(config)
    ncls = len(k)
    offsets = np.concatenate(([0], np.cumsum(k)[:-1]))
    total_channels = max(int(k.sum()), 1)
    rng = make_rng(config.seed, index)

    phase = np.zeros(N, dtype=np.int8)
    attempt = np.zeros(N, dtype=np.int64)
    cls = np.zeros(N, dtype=np.int64)
    tagged = np.zeros(N, dtype=bool)

    F = config.measured_frames
    z = lambda: np.zeros(ncls, dtype=np.int64)
    requests, fresh_req, retries, grants, collisions = z(), z(), z(), z(), z()
    attempts, successes, drops = z(), z(), z()
    idle_occ = 0
    col_occ, tx_occ, t0_occ = z(), z(), z()
    tx_per_frame = np.zeros((F, ncls), dtype=np.int64)
    grants_per_frame = np.zeros((F, ncls), dtype=np.int64)

    def per_class(mask):
        return np.bincount(cls[mask], minlength=ncls)

    for f in range(config.frames):
        u_req, u_cls, u_ch, u_err = rng.random((4, N))
        measuring = f >= config.warmup_frames
        idle = phase == IDLE
        collided = phase == COLLIDED
        transmitting = phase == TRANSMIT

        fresh = idle & (u_req < a)
        cls = np.where(fresh, (u_cls >= l).astype(np.int64), cls)
        retry = collided & (u_req < c[cls])
        req = fresh | retry

        k_user = k[cls]
        reachable = req & (k_user > 0)
        channel = offsets[cls] + np.minimum((u_ch * k_user).astype(np.int64), np.maximum(k_user - 1, 0))
        channel = np.minimum(channel, total_channels - 1)  # channel-less classes never reach the table
        load = np.bincount(channel[reachable], minlength=total_channels)
        won = reachable & (load[channel] == 1)
        lost = req & ~won

        failed = transmitting & (u_err < e)
        last = attempt == n - 1
        dropped = failed & last
        delivered = transmitting & ~failed

        if measuring:
            row = f - config.warmup_frames
            idle_occ += int(idle.sum())
            col_occ += per_class(collided)
            tx_occ += per_class(transmitting)
            t0_occ += per_class(transmitting & (attempt == 0))
            tx_per_frame[row] = per_class(transmitting)
            requests += per_class(req)
            fresh_req += per_class(fresh)
            retries += per_class(retry)
            g = per_class(won)
            grants += g
            grants_per_frame[row] = g
            collisions += per_class(lost)
        counted = transmitting & tagged
        attempts += per_class(counted)
        successes += per_class(delivered & tagged)
        drops += per_class(dropped & tagged)

        phase = phase.copy()
        phase[(collided & ~retry) | (retry & lost) | delivered | dropped] = IDLE
        phase[fresh & lost] = COLLIDED
        phase[won] = TRANSMIT
        attempt = np.where(failed & ~last, attempt + 1, attempt)
        attempt[won] = 0
        tagged = np.where(delivered | dropped, False, tagged)
        tagged[won] = measuring

    # drain: resolve packets granted in the window that are still in flight
    while np.any(tagged):
        u_err = rng.random(N)
        failed = tagged & (u_err < e)
        last = attempt == n - 1
        attempts += per_class(tagged)
        successes += per_class(tagged & ~failed)
        drops += per_class(failed & last)
        attempt = np.where(failed & ~last, attempt + 1, attempt)
        tagged = failed & ~last

    return ReplicationCounters(
        index=index,
        frames=F,
        requests=requests,
        fresh_requests=fresh_req,
        retries=retries,
        grants=grants,
        collisions=collisions,
        data_attempts=attempts,
        data_successes=successes,
        data_drops=drops,
        idle_occupancy=idle_occ,
        collided_occupancy=col_occ,
        transmit_occupancy=tx_occ,
        first_attempt_occupancy=t0_occ,
        transmitters_per_frame=tx_per_frame,
        grants_per_frame=grants_per_frame,
    )


def _suffix(mode: ClassMode, cls: int) -> str:
    return "" if mode is ClassMode.SINGLE else f"_{cls + 1}"


def replication_estimates(config: SimConfig, rc: ReplicationCounters) -> dict[str, float]:
    """Plug-in estimates of state probabilities and every report metric."""
    p = config.scenario
    mode = config.class_mode
    k, _, _ = _class_arrays(config)
    slots = p.N * rc.frames
    s_i = rc.idle_occupancy / slots
    out = {"s_i": s_i}
    if mode is ClassMode.QOS:
        shares, data_channels = (p.l, 1.0 - p.l), (p.L1, p.L2)
    else:
        shares, data_channels = (1.0,), (p.L,)
    for i in range(len(k)):
        sfx = _suffix(mode, i)
        s_c = rc.collided_occupancy[i] / slots
        s_t0 = rc.first_attempt_occupancy[i] / slots
        s_t = rc.transmit_occupancy[i] / slots
        g = int(rc.grants[i])
        b_hat = s_t0 / s_i if s_i > 0 else 0.0
        report = metrics.build_report(
            grant_rate=g / rc.frames,
            occupancy=p.N * s_t,
            request_channels=int(k[i]),
            data_channels=data_channels[i],
            offered_load=shares[i] * p.N * p.a,
            retransmissions=metrics.literal_retransmissions(p.e, p.n, b_hat),
            drop_probability=rc.data_drops[i] / slots,
            conditional=(rc.data_attempts[i] - g) / g if g else math.nan,
        )
        out.update({f"s_c{sfx}": s_c, f"s_t0{sfx}": s_t0, f"s_t{sfx}": s_t})
        out.update({f"{name}{sfx}": float(v) for name, v in report.values().items()})
        out[f"request_rate{sfx}"] = rc.requests[i] / rc.frames
    return out


@dataclass(frozen=True, eq=False)
class SimResult:
    config: SimConfig
    replications: tuple[ReplicationCounters, ...]
    estimates: dict[str, float]
    half_widths: dict[str, float]
    metadata: dict = field(default_factory=dict)


def _aggregate(config: SimConfig, reps: list[ReplicationCounters]) -> SimResult:
    reps = sorted(reps, key=lambda r: r.index)
    per_rep = [replication_estimates(config, r) for r in reps]
    estimates, half_widths = {}, {}
    for key in per_rep[0]:
        vals = np.array([d[key] for d in per_rep], dtype=float)
        finite = vals[np.isfinite(vals)]
        if len(finite) < len(vals):
            # undefined in at least one replication (zero load, no grants)
            estimates[key], half_widths[key] = math.nan, math.nan
            continue
        estimates[key] = float(np.mean(vals))
        half_widths[key] = float(Z95 * np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else math.nan
    metadata = {
        "rng": RNG_ALGORITHM,
        "seed": config.seed,
        "frames": config.frames,
        "warmup_frames": config.warmup_frames,
        "replications": len(reps),
        "confidence": "95% normal approximation across replications",
        "s_t_interpretation": metrics.S_T_INTERPRETATION,
    }
    return SimResult(config, tuple(reps), estimates, half_widths, metadata)


def simulate(config: SimConfig, replication: int = 0) -> SimResult:
    """A single replication wrapped as a result (half-widths are NaN)."""
    return _aggregate(config, [run_replication(config, replication)])


def _run_indexed(args):
    return run_replication(*args)


def replicate(config: SimConfig, workers: int | None = None) -> SimResult:
    """All ``config.replications`` replications, optionally in worker processes.

    The reduction sorts by replication index, so the result does not depend
    on completion order.
    """
    jobs = [(config, i) for i in range(config.replications)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reps = list(pool.map(_run_indexed, jobs))
    else:
        reps = [_run_indexed(j) for j in jobs]
    return _aggregate(config, reps)


# --- comparison with the analytic models -------------------------------------


def analytic_values(eq: Equilibrium | QosEquilibrium) -> dict[str, float]:
    """Analytic counterparts of the simulator's estimate keys."""
    if isinstance(eq, QosEquilibrium):
        p = eq.params
        out = {"s_i": eq.s_i}
        for i, (s_c, s_t, report) in enumerate(zip((eq.s_c1, eq.s_c2), (eq.s_t1, eq.s_t2), class_metrics(eq))):
            sfx = f"_{i + 1}"
            out.update({f"s_c{sfx}": s_c, f"s_t0{sfx}": float(s_t[0]), f"s_t{sfx}": float(np.sum(s_t))})
            out.update({f"{name}{sfx}": float(v) for name, v in report.values().items()})
        out["request_rate_1"] = p.N * (p.l * p.a * eq.s_i + p.c1 * eq.s_c1)
        out["request_rate_2"] = p.N * ((1 - p.l) * p.a * eq.s_i + p.c2 * eq.s_c2)
        return out
    p = eq.params
    out = {"s_i": eq.s_i, "s_c": eq.s_c, "s_t0": float(eq.s_t[0]), "s_t": eq.s_t_total}
    out.update({name: float(v) for name, v in single_metrics(eq).values().items()})
    out["request_rate"] = eq.n_ave
    return out


DEFAULT_COMPARED = ("s_i", "s_c", "s_t0", "s_t", "grant_rate", "throughput")


@dataclass(frozen=True)
class TolerancePolicy:
    """Pass iff |sim - analytic| <= max(ci_multiple * half_width, rel_tol * |analytic|, abs_tol)."""

    ci_multiple: float = 3.0
    rel_tol: float = 0.0
    abs_tol: float = 1e-12

    def allowance(self, half_width: float, analytic: float) -> float:
        hw = 0.0 if math.isnan(half_width) else half_width
        return max(self.ci_multiple * hw, self.rel_tol * abs(analytic), self.abs_tol)


@dataclass(frozen=True)
class ValidationRow:
    metric: str
    simulated: float
    half_width: float
    analytic: float
    z: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple[ValidationRow, ...]
    policy: TolerancePolicy

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def __getitem__(self, metric: str) -> ValidationRow:
        for r in self.rows:
            if r.metric == metric:
                return r
        raise KeyError(metric)

    def describe(self) -> str:
        lines = [f"{'metric':<16}{'sim':>14}{'+-95%':>12}{'analytic':>14}{'z':>9}  ok"]
        for r in self.rows:
            lines.append(
                f"{r.metric:<16}{r.simulated:>14.6g}{r.half_width:>12.3g}{r.analytic:>14.6g}{r.z:>9.2f}  {'yes' if r.passed else 'NO'}"
            )
        return "\n".join(lines)


def validate_against_analytic(
    sim: SimResult,
    eq: Equilibrium | QosEquilibrium,
    policy: TolerancePolicy = TolerancePolicy(),
    compared: tuple[str, ...] = DEFAULT_COMPARED,
) -> ValidationReport:
    """Side-by-side check of simulated estimates against an analytic solution."""
    if sim.config.scenario != eq.params:
        raise ComparisonError(f"simulated scenario {sim.config.scenario} differs from analytic {eq.params}")
    if isinstance(eq, QosEquilibrium):
        if sim.config.split != eq.split:
            raise ComparisonError(f"channel split {sim.config.split} differs from analytic {eq.split}")
        keys = [k for k in ("s_i",) + tuple(f"{m}_{c}" for c in (1, 2) for m in compared if m != "s_i")]
    else:
        keys = list(compared)
    ref = analytic_values(eq)
    rows = []
    for key in keys:
        s, hw, an = sim.estimates[key], sim.half_widths[key], ref[key]
        diff = abs(s - an)
        if math.isnan(diff):
            rows.append(ValidationRow(key, s, hw, an, math.nan, False))
            continue
        if hw and not math.isnan(hw):
            z = diff / hw
        else:
            z = 0.0 if diff == 0.0 else math.inf
        rows.append(ValidationRow(key, s, hw, an, z, diff <= policy.allowance(hw, an)))
    return ValidationReport(tuple(rows), policy)
