"""Analytic and simulated performance of multi-channel random-access MACs with ARQ."""

from ramac.analytic_qos import QosParams, solve_equilibrium_qos, split_channels
from ramac.analytic_single import SingleParams, solve_equilibrium
from ramac.phy_channel import Channel, LinkSpec, Modulation, bit_error_rate, packet_error_probability, required_snr

__all__ = [
    "Channel",
    "LinkSpec",
    "Modulation",
    "QosParams",
    "SingleParams",
    "bit_error_rate",
    "packet_error_probability",
    "required_snr",
    "solve_equilibrium",
    "solve_equilibrium_qos",
    "split_channels",
]
__version__ = "0.1.0"
