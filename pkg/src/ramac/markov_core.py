"""Discrete-time Markov chains in column-stochastic form.

Convention: ``P[r, c]`` is the probability of moving *to* state ``r`` given
the chain is currently *in* state ``c``. Columns sum to one and the
stationary vector satisfies ``P @ s = s``. Most textbooks use the transpose
(row-stochastic) convention; pass ``P.T`` when importing such matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ramac.errors import DomainError, NonUniqueEquilibriumError

COLUMN_SUM_TOL = 1e-12
RANK_TOL = 1e-8
POWER_TOL = 1e-12
POWER_MAX_STEPS = 1_000_000
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    entries: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        p = np.array(self.entries, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] < 1:
            raise DomainError(f"transition matrix must be square and non-empty, got shape {p.shape}")
        p.setflags(write=False)
        object.__setattr__(self, "entries", p)
        labels = tuple(self.labels) if self.labels else tuple(f"s{i}" for i in range(p.shape[0]))
        if len(labels) != p.shape[0]:
            raise DomainError(f"{len(labels)} labels for a {p.shape[0]}-state chain")
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def permuted(self, order: Sequence[int]) -> "TransitionMatrix":
        """Same chain with states reordered so new state i is old state ``order[i]``."""
        idx = np.asarray(order)
        return TransitionMatrix(self.entries[np.ix_(idx, idx)], tuple(self.labels[i] for i in idx))


@dataclass(frozen=True, eq=False)
class DistributionVector:
    probabilities: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "labels", tuple(self.labels))

    def __getitem__(self, label: str) -> float:
        return float(self.probabilities[self.labels.index(label)])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, map(float, self.probabilities)))


@dataclass
class ValidationReport:
    ok: bool
    bad_entries: list[tuple[int, int, float]] = field(default_factory=list)
    bad_columns: list[tuple[int, float]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "ok"
        parts = [f"entry ({r},{c}) = {v!r} outside [0,1]" for r, c, v in self.bad_entries]
        parts += [f"column {c} sums to {s!r}" for c, s in self.bad_columns]
        return "; ".join(parts)


def validate_stochastic(P: TransitionMatrix) -> ValidationReport:
    m = P.entries
    rows, cols = np.nonzero(~((m >= 0.0) & (m <= 1.0)))
    bad_entries = [(int(r), int(c), float(m[r, c])) for r, c in zip(rows, cols)]
    sums = m.sum(axis=0)
    bad_columns = [(int(c), float(sums[c])) for c in np.nonzero(np.abs(sums - 1.0) > COLUMN_SUM_TOL)[0]]
    return ValidationReport(not bad_entries and not bad_columns, bad_entries, bad_columns)


def _linear_solve(m: np.ndarray) -> np.ndarray:
    dim = m.shape[0]
    a = m - np.eye(dim)
    a[-1, :] = 1.0
    b = np.zeros(dim)
    b[-1] = 1.0
    return np.linalg.solve(a, b)


def _power_iteration(m: np.ndarray, tol: float = POWER_TOL, max_steps: int = POWER_MAX_STEPS) -> np.ndarray:
    dim = m.shape[0]
    s = np.full(dim, 1.0 / dim)
    for _ in range(max_steps):
        nxt = m @ s
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - s)) <= tol:
            return nxt
        s = nxt
    raise NonUniqueEquilibriumError(f"power iteration did not converge in {max_steps} steps")


def stationary_distribution(P: TransitionMatrix, method: str = "linear") -> DistributionVector:
    """Unique stationary distribution of ``P``.

    ``method="linear"`` replaces one balance equation with the normalization
    row and solves directly, falling back to power iteration if the solve is
    singular or inaccurate. ``method="power"`` runs power iteration only.
    """
    report = validate_stochastic(P)
    if not report:
        raise DomainError(f"not a column-stochastic matrix: {report.describe()}")
    m = P.entries
    dim = P.dim
    if dim > 1:
        rank = np.linalg.matrix_rank(m - np.eye(dim), tol=RANK_TOL)
        if rank != dim - 1:
            raise NonUniqueEquilibriumError(
                f"null space of (P - I) has dimension {dim - rank}; stationary distribution is not unique"
            )
    if method == "power":
        s = _power_iteration(m)
    elif method == "linear":
        try:
            s = _linear_solve(m)
            if not np.all(np.isfinite(s)) or np.max(np.abs(m @ s - s)) > RESIDUAL_TOL:
                raise np.linalg.LinAlgError("inaccurate solve")
        except np.linalg.LinAlgError:
            s = _power_iteration(m)
    else:
        raise ValueError(f"unknown method {method!r}")
    # round-off can leave -1e-17 on unreachable states
    s = np.clip(s, 0.0, None)
    s /= s.sum()
    return DistributionVector(s, P.labels)
