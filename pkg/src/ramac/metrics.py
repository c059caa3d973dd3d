"""Performance measures shared by the analytic models and the simulator."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from ramac.errors import DegenerateLoadError, DomainError

# Which transmit-state mass feeds which metric: request throughput counts
# fresh grants (first transmit state only), data-channel occupancy counts
# every transmit state because retransmitting users still hold a channel.
S_T_INTERPRETATION = "throughput=N*s_t[0]; occupancy=N*sum(s_t)"


@dataclass(frozen=True)
class MetricsReport:
    throughput: float
    acceptance: float
    delay: float
    energy_db: float
    retransmissions: float
    efficiency: float
    utilization: float
    net_acceptance: float
    grant_rate: float
    occupancy: float
    drop_probability: float
    conditional_retransmissions: float
    degenerate: bool = False
    starved: bool = False

    @classmethod
    def metric_names(cls) -> list[str]:
        return [f.name for f in fields(cls) if f.type in ("float", float)]

    def values(self) -> dict[str, float]:
        d = asdict(self)
        return {name: d[name] for name in self.metric_names()}


def request_throughput(grant_rate: float, channels: int) -> float:
    return min(grant_rate, float(channels))


def acceptance_probability(throughput: float, offered_load: float) -> float:
    if offered_load <= 0.0:
        raise DegenerateLoadError("offered load is zero; acceptance probability undefined")
    return throughput / offered_load


def access_delay(p_a: float) -> float:
    """Mean number of failed access attempts before a grant."""
    if p_a <= 0.0:
        return math.inf
    return (1.0 - p_a) / p_a


def access_energy_db(p_a: float) -> float:
    """Mean request energy relative to a single attempt, in dB."""
    if p_a <= 0.0:
        return math.inf
    return -10.0 * math.log10(p_a)


def literal_retransmissions(e: float, n: int, b: float) -> float:
    # sum_{i=1..n} i e^i B, with no normalizing denominator
    return b * sum(i * e**i for i in range(1, n + 1))


def conditional_retransmissions(e: float, n: int) -> float:
    """Expected retransmissions of a granted packet, truncated at n attempts."""
    return sum(e**j for j in range(1, n))


def arq_efficiency(retransmissions: float) -> float:
    return 1.0 / (1.0 + retransmissions)


def channel_utilization(data_channels: int, occupancy: float) -> float:
    if data_channels < 1:
        raise DomainError(f"data channel count must be >= 1, got {data_channels}")
    return min(float(data_channels), occupancy) / data_channels


def net_acceptance(p_a: float, data_channels: int, occupancy: float) -> float:
    if data_channels < 1:
        raise DomainError(f"data channel count must be >= 1, got {data_channels}")
    if occupancy <= data_channels:
        return p_a
    return p_a * data_channels / occupancy


def build_report(
    *,
    grant_rate: float,
    occupancy: float,
    request_channels: int,
    data_channels: int,
    offered_load: float,
    retransmissions: float,
    drop_probability: float,
    conditional: float,
    starved: bool = False,
) -> MetricsReport:
    """Assemble a full report; acceptance-type fields are NaN under zero load."""
    th = request_throughput(grant_rate, request_channels)
    try:
        p_a = acceptance_probability(th, offered_load)
        delay, energy = access_delay(p_a), access_energy_db(p_a)
        p_net = net_acceptance(p_a, data_channels, occupancy)
        degenerate = False
    except DegenerateLoadError:
        p_a = delay = energy = p_net = math.nan
        degenerate = True
    return MetricsReport(
        throughput=th,
        acceptance=p_a,
        delay=delay,
        energy_db=energy,
        retransmissions=retransmissions,
        efficiency=arq_efficiency(retransmissions),
        utilization=channel_utilization(data_channels, occupancy),
        net_acceptance=p_net,
        grant_rate=grant_rate,
        occupancy=occupancy,
        drop_probability=drop_probability,
        conditional_retransmissions=conditional,
        degenerate=degenerate,
        starved=starved,
    )
