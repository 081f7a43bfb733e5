"""Unit conventions and conversion helpers.

Internally every frequency is an angular frequency in rad/ns, every time is
in ns and every flux is in units of the flux quantum Phi_0. Device data is
usually quoted as ordinary frequencies (``g/2pi = 27 MHz``), so the helpers
below multiply by 2*pi.
"""

from __future__ import annotations

import math

TWO_PI = 2.0 * math.pi


def ghz(value: float) -> float:
    """Ordinary frequency in GHz -> angular frequency in rad/ns."""
    return TWO_PI * value


def mhz(value: float) -> float:
    """Ordinary frequency in MHz -> angular frequency in rad/ns."""
    return TWO_PI * value * 1e-3


def to_ghz(omega: float) -> float:
    return omega / TWO_PI


def to_mhz(omega: float) -> float:
    return omega / TWO_PI * 1e3


def mphi0(value: float) -> float:
    """Flux in milli flux quanta -> flux in Phi_0."""
    return value * 1e-3
