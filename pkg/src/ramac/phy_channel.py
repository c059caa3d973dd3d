"""Bit- and packet-error models for BPSK / 16-QAM over AWGN and flat fading.

Closed forms are used where they exist (BPSK on AWGN and Rayleigh, Gray
16-QAM on AWGN). Everything else averages the conditional AWGN bit-error
probability over the fading power distribution numerically, using Craig's
finite-range form of the Q-function together with the moment generating
function of the Rician/Rayleigh received SNR.

SNR values are average SNR per bit in dB.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy import integrate, special

from ramac.errors import DomainError, MissingParameterError, NoSolutionError

SNR_MIN_DB = -20.0
SNR_MAX_DB = 80.0
BER_FLOOR = 1e-300
QUAD_RTOL = 1e-6


class Modulation(str, Enum):
    BPSK = "BPSK"
    QAM16 = "QAM16"


class Channel(str, Enum):
    AWGN = "AWGN"
    RAYLEIGH = "RAYLEIGH"
    RICIAN = "RICIAN"


# Conditional AWGN BER written as amp * Q(sqrt(gain * snr)).
_Q_FORM = {
    Modulation.BPSK: (1.0, 2.0),
    Modulation.QAM16: (0.75, 0.8),
}


@dataclass(frozen=True)
class LinkSpec:
    modulation: Modulation
    channel: Channel
    snr_db: float
    rician_k_db: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "modulation", Modulation(self.modulation))
        object.__setattr__(self, "channel", Channel(self.channel))
        _check_snr(self.snr_db)
        if self.channel is Channel.RICIAN:
            if self.rician_k_db is None:
                raise MissingParameterError("RICIAN channel requires rician_k_db")
            if not math.isfinite(self.rician_k_db):
                raise DomainError(f"rician_k_db must be finite, got {self.rician_k_db}")
        elif self.rician_k_db is not None:
            raise DomainError(f"rician_k_db only applies to RICIAN, not {self.channel.value}")


@dataclass(frozen=True)
class PacketErrorModel:
    """Independent bit errors at rate ``ber`` over an ``nb``-bit packet."""

    ber: float
    nb: int

    def __post_init__(self):
        _check_probability(self.ber, "ber")
        if int(self.nb) != self.nb or self.nb < 1:
            raise DomainError(f"nb must be a positive integer, got {self.nb}")

    @property
    def e(self) -> float:
        return packet_error_probability(self.ber, self.nb)


def _check_snr(snr_db: float) -> None:
    if not math.isfinite(snr_db) or not SNR_MIN_DB <= snr_db <= SNR_MAX_DB:
        raise DomainError(f"snr_db must lie in [{SNR_MIN_DB}, {SNR_MAX_DB}], got {snr_db}")


def _check_probability(p: float, name: str) -> None:
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"{name} must be a probability, got {p}")


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def q_function(x: float) -> float:
    return 0.5 * special.erfc(x / math.sqrt(2.0))


def _rician_mgf(s: float, snr: float, k: float) -> float:
    """E[exp(s * gamma)] for Rician-faded SNR with mean ``snr`` (s <= 0)."""
    denom = 1.0 + k - s * snr
    return (1.0 + k) / denom * math.exp(k * s * snr / denom)


def _faded_q_average(amp: float, gain: float, snr: float, k: float) -> float:
    # Q(x) = 1/pi * int_0^{pi/2} exp(-x^2 / (2 sin^2 t)) dt, averaged over gamma.
    def integrand(theta: float) -> float:
        st = math.sin(theta)
        if st == 0.0:
            return 0.0
        return _rician_mgf(-gain / (2.0 * st * st), snr, k)

    val, _ = integrate.quad(integrand, 0.0, math.pi / 2.0, epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
    return amp * val / math.pi


def bit_error_rate(link: LinkSpec) -> float:
    """Bit-error probability for ``link``, floored at ``BER_FLOOR``."""
    snr = db_to_linear(link.snr_db)
    amp, gain = _Q_FORM[link.modulation]

    if link.channel is Channel.AWGN:
        ber = amp * q_function(math.sqrt(gain * snr))
    elif link.channel is Channel.RAYLEIGH and link.modulation is Modulation.BPSK:
        ber = 0.5 * (1.0 - math.sqrt(snr / (1.0 + snr)))
    else:
        k = 0.0 if link.channel is Channel.RAYLEIGH else db_to_linear(link.rician_k_db)
        ber = _faded_q_average(amp, gain, snr, k)
    return min(max(ber, BER_FLOOR), 0.5)


def packet_error_probability(ber: float, nb: int) -> float:
    """Probability that at least one of ``nb`` independent bits is in error."""
    _check_probability(ber, "ber")
    if int(nb) != nb or nb < 1:
        raise DomainError(f"nb must be a positive integer, got {nb}")
    if ber == 1.0:
        return 1.0
    # 1 - (1-ber)^nb without cancellation for small ber
    return min(1.0, max(0.0, -math.expm1(nb * math.log1p(-ber))))


def required_snr(
    modulation: Modulation | str,
    channel: Channel | str,
    target_ber: float,
    rician_k_db: float | None = None,
    tol_db: float = 1e-9,
) -> float:
    """Smallest SNR (dB) at which the link reaches ``target_ber``.

    Bisection over the supported SNR range on log(BER).
    """
    if not 0.0 < target_ber < 0.5:
        raise DomainError(f"target_ber must lie in (0, 0.5), got {target_ber}")

    def log_excess(snr_db: float) -> float:
        link = LinkSpec(modulation, channel, snr_db, rician_k_db)
        return math.log(bit_error_rate(link)) - math.log(target_ber)

    lo, hi = SNR_MIN_DB, SNR_MAX_DB
    f_lo, f_hi = log_excess(lo), log_excess(hi)
    if f_lo < 0.0 or f_hi > 0.0:
        raise NoSolutionError(
            f"BER {target_ber:g} not reachable for {Modulation(modulation).value}/"
            f"{Channel(channel).value} within [{lo}, {hi}] dB"
        )
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if log_excess(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
