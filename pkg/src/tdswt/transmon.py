"""Flux-tunable transmon parameters and the derived dispersive quantities.

All functions accept scalar or array fluxes and broadcast.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DispersiveValidityWarning, OutOfDomainError, ResonanceError
from .units import ghz, mhz

FLUX_LIMIT = 0.5
RESONANCE_TOL = 1e-3
VALIDITY_LIMIT = 0.3
LAMBDA_FLUX_STEP = 1e-5


@dataclass(frozen=True)
class TransmonParams:
    """Symmetric-junction transmon. Energies are angular frequencies (rad/ns).

    ``g0`` is the coupling of the 0-1 transition at ``flux_bias``; couplings
    at other fluxes follow the E_J^(1/4) scaling relative to that point.
    """

    EJ_sigma: float
    Ec: float
    alpha2: float
    g0: float
    flux_bias: float
    d: float = 0.0

    def __post_init__(self):
        if self.Ec <= 0 or self.EJ_sigma <= 0:
            raise ValueError("Ec and EJ_sigma must be positive")
        if self.d != 0.0:
            raise ValueError("only symmetric junctions (d = 0) are supported")
        if abs(self.flux_bias) >= FLUX_LIMIT:
            raise OutOfDomainError(f"bias flux {self.flux_bias} outside |Phi| < 0.5")
        ratio = josephson_energy(self.flux_bias, self) / self.Ec
        if ratio <= 20:
            raise ValueError(f"E_J/E_c = {ratio:.1f} at bias is not in the transmon regime (> 20)")

    @classmethod
    def from_frequency(cls, omega1: float, Ec: float, alpha2: float, g0: float,
                       flux_bias: float = 0.0) -> "TransmonParams":
        """Fix E_JSigma so that the 0-1 frequency at ``flux_bias`` equals ``omega1``."""
        ej_bias = omega1**2 / (8.0 * Ec)
        return cls(EJ_sigma=ej_bias / np.cos(np.pi * flux_bias), Ec=Ec, alpha2=alpha2,
                   g0=g0, flux_bias=flux_bias)


def _check_flux(flux):
    flux = np.asarray(flux, dtype=float)
    if np.any(np.abs(flux) >= FLUX_LIMIT):
        raise OutOfDomainError("flux must satisfy |Phi/Phi_0| < 0.5")
    return flux


def josephson_energy(flux, p: TransmonParams):
    """E_J = E_JSigma |cos(pi Phi)| on the branch |Phi| < 0.5 (so cos > 0)."""
    flux = _check_flux(flux)
    return p.EJ_sigma * np.abs(np.cos(np.pi * flux))


def anharmonicity(j, p: TransmonParams):
    """Duffing anharmonicity alpha_j = j(j-1)/2 alpha_2."""
    j = np.asarray(j)
    return j * (j - 1) / 2.0 * p.alpha2


def level_frequency(j, flux, p: TransmonParams):
    """omega_j(Phi) = j sqrt(8 E_c E_J(Phi)) + alpha_j."""
    if np.any(np.asarray(j) < 0):
        raise ValueError("level index must be >= 0")
    plasma = np.sqrt(8.0 * p.Ec * josephson_energy(flux, p))
    return j * plasma + anharmonicity(j, p)


def coupling(j, flux, p: TransmonParams):
    """g_{j,j+1}(Phi) = g0 sqrt(j+1) (E_J(Phi)/E_J(Phi_bias))^(1/4)."""
    if np.any(np.asarray(j) < 0):
        raise ValueError("level index must be >= 0")
    ratio = josephson_energy(flux, p) / josephson_energy(p.flux_bias, p)
    return p.g0 * np.sqrt(j + 1.0) * ratio**0.25


def detuning(j, flux, omega_r: float, p: TransmonParams):
    """Delta_j = omega_{j+1} - omega_j - omega_r."""
    return level_frequency(j + 1, flux, p) - level_frequency(j, flux, p) - omega_r


def dispersive_parameter(j, flux, omega_r: float, p: TransmonParams):
    return coupling(j, flux, p) / detuning(j, flux, omega_r, p)


def dispersive_parameter_slope(j, flux, omega_r: float, p: TransmonParams,
                               step: float = LAMBDA_FLUX_STEP):
    """d lambda_j / d Phi by a fourth-order central difference."""
    flux = np.asarray(flux, dtype=float)
    lam = lambda x: dispersive_parameter(j, x, omega_r, p)  # noqa: E731
    return (-lam(flux + 2 * step) + 8 * lam(flux + step)
            - 8 * lam(flux - step) + lam(flux - 2 * step)) / (12.0 * step)


@dataclass(frozen=True)
class DispersiveQuantities:
    """Delta, lambda, lambda-dot, chi and g of one transition (arrays broadcast over time)."""

    delta: np.ndarray
    lam: np.ndarray
    lam_dot: np.ndarray
    chi: np.ndarray
    g: np.ndarray


def dispersive_quantities(j: int, flux, flux_dot, omega_r: float, p: TransmonParams,
                          check: bool = True) -> DispersiveQuantities:
    """Dispersive quantities of transition j -> j+1 at the given flux and flux velocity.

    Raises
    ------
    ResonanceError
        If |Delta_j| <= 1e-3 rad/ns anywhere.
    """
    g = coupling(j, flux, p)
    delta = detuning(j, flux, omega_r, p)
    if np.any(np.abs(delta) <= RESONANCE_TOL):
        raise ResonanceError(f"transition {j}->{j + 1} is resonant with the cavity")
    lam = g / delta
    lam_dot = dispersive_parameter_slope(j, flux, omega_r, p) * np.asarray(flux_dot, dtype=float)
    if check:
        _warn_validity(lam, lam_dot / delta, j)
    return DispersiveQuantities(delta=delta, lam=lam, lam_dot=lam_dot, chi=g**2 / delta, g=g)


def _warn_validity(lam, adiabaticity, j):
    if np.max(np.abs(lam), initial=0.0) >= VALIDITY_LIMIT:
        warnings.warn(f"|lambda_{j}| reaches {np.max(np.abs(lam)):.3f}",
                      DispersiveValidityWarning, stacklevel=3)
    if np.max(np.abs(adiabaticity), initial=0.0) >= VALIDITY_LIMIT:
        warnings.warn(f"|lambda_dot_{j}/Delta_{j}| reaches {np.max(np.abs(adiabaticity)):.3f}",
                      DispersiveValidityWarning, stacklevel=3)


@dataclass(frozen=True)
class Device:
    """Transmons sharing one cavity; only ``transmons[driven]`` follows the flux pulse.

    The remaining transmons sit at their bias flux.
    """

    transmons: tuple[TransmonParams, ...]
    omega_r: float
    levels: int = 3
    cavity_cutoff: int = 5
    driven: int = 1

    def __post_init__(self):
        object.__setattr__(self, "transmons", tuple(self.transmons))
        if not 0 <= self.driven < len(self.transmons):
            raise ValueError("driven index out of range")
        if self.levels < 2:
            raise ValueError("need at least two levels per transmon")

    @property
    def n_systems(self) -> int:
        return len(self.transmons)

    def replace(self, **changes) -> "Device":
        return replace(self, **changes)


DEFAULT_OMEGA_R = ghz(6.0)
DEFAULT_EC = mhz(300.0)
DEFAULT_ALPHA2 = mhz(-300.0)
DEFAULT_G0 = mhz(27.0)
DEFAULT_Q1_FREQUENCY = ghz(7.0)
DEFAULT_Q2_FREQUENCY = ghz(6.9)


def default_device(**overrides) -> Device:
    """Two identical transmons; Q1 at its sweet spot (7.0 GHz), Q2 biased to 6.9 GHz."""
    q1 = TransmonParams.from_frequency(DEFAULT_Q1_FREQUENCY, DEFAULT_EC, DEFAULT_ALPHA2,
                                       DEFAULT_G0, flux_bias=0.0)
    ratio = (DEFAULT_Q2_FREQUENCY / DEFAULT_Q1_FREQUENCY) ** 2
    q2_bias = float(np.arccos(ratio) / np.pi)
    q2 = replace(q1, flux_bias=q2_bias)
    dev = Device(transmons=(q1, q2), omega_r=DEFAULT_OMEGA_R)
    return dev.replace(**overrides) if overrides else dev
