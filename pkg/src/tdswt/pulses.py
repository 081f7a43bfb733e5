"""Sinusoidal and tangential flux pulses and sampled control traces."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import erf

from .errors import TangentPoleError
from .transmon import Device, dispersive_quantities, level_frequency

MAX_EXCURSION = 0.060
_GUARD_SLACK = 1e-12


@dataclass(frozen=True)
class PulseSpec:
    """Flux waveform on the driven transmon.

    ``kind`` is ``"sinusoidal"``:  Phi = bias + A sin(2 pi nu t + phase), or
    ``"tangential"``: Phi = bias + A tan(B erf(C (t - t_gate/2))).
    Fluxes in Phi_0, times in ns, ``nu`` and ``C`` in 1/ns.
    """

    kind: str
    flux_bias: float
    amplitude: float
    t_gate: float = 30.0
    nu: float = 0.0
    phase: float = 0.0
    B: float = 1.0
    C: float = 0.25

    def __post_init__(self):
        if self.kind not in ("sinusoidal", "tangential"):
            raise ValueError(f"unknown pulse kind {self.kind!r}")
        if self.t_gate <= 0:
            raise ValueError("t_gate must be positive")
        if self.kind == "tangential" and abs(self.B) >= math.pi / 2:
            raise TangentPoleError("|B| must stay below pi/2")
        if self.max_excursion() > MAX_EXCURSION + _GUARD_SLACK:
            raise ValueError(
                f"flux excursion {self.max_excursion() * 1e3:.3f} mPhi0 exceeds 60 mPhi0"
            )

    def max_excursion(self) -> float:
        """Analytic bound on max |Phi - bias|: |A| or |A tan B|."""
        if self.kind == "sinusoidal":
            return abs(self.amplitude)
        return abs(self.amplitude * math.tan(self.B))

    def replace(self, **changes) -> "PulseSpec":
        return replace(self, **changes)


def default_pulse(kind: str, device: Device, t_gate: float = 30.0) -> PulseSpec:
    """Smooth 60 mPhi0 pulse on the driven transmon of ``device``."""
    bias = device.transmons[device.driven].flux_bias
    if kind in ("sin", "sinusoidal"):
        return PulseSpec("sinusoidal", bias, MAX_EXCURSION, t_gate,
                         nu=1.0 / (2.0 * t_gate), phase=0.0)
    if kind in ("tan", "tangential"):
        B = 1.0
        return PulseSpec("tangential", bias, MAX_EXCURSION / math.tan(B), t_gate, B=B, C=0.25)
    raise ValueError(f"unknown pulse kind {kind!r}")


def _tangent_argument(spec: PulseSpec, t):
    arg = spec.B * erf(spec.C * (np.asarray(t, dtype=float) - spec.t_gate / 2.0))
    if np.any(np.abs(arg) >= math.pi / 2):
        raise TangentPoleError("B * erf(...) reached the tangent pole")
    return arg


def flux(spec: PulseSpec, t):
    t = np.asarray(t, dtype=float)
    if spec.kind == "sinusoidal":
        return spec.flux_bias + spec.amplitude * np.sin(2 * np.pi * spec.nu * t + spec.phase)
    return spec.flux_bias + spec.amplitude * np.tan(_tangent_argument(spec, t))


def flux_dot(spec: PulseSpec, t):
    t = np.asarray(t, dtype=float)
    if spec.kind == "sinusoidal":
        w = 2 * np.pi * spec.nu
        return spec.amplitude * w * np.cos(w * t + spec.phase)
    x = t - spec.t_gate / 2.0
    arg = _tangent_argument(spec, t)
    return (spec.amplitude * spec.B * 2.0 * spec.C / math.sqrt(math.pi)
            * np.exp(-(spec.C * x) ** 2) / np.cos(arg) ** 2)


@dataclass(frozen=True)
class ControlTrace:
    """Control fluxes and per-transition dispersive quantities on a set of times.

    Array shapes: ``flux``/``flux_dot`` are (T, N); ``energies`` is (T, N, L);
    the per-transition arrays ``g``, ``delta``, ``lam``, ``lam_dot``, ``chi``
    are (T, N, L-1) with index [t, m, j] for the j -> j+1 transition of system m.
    """

    times: np.ndarray
    flux: np.ndarray
    flux_dot: np.ndarray
    energies: np.ndarray
    g: np.ndarray
    delta: np.ndarray
    lam: np.ndarray
    lam_dot: np.ndarray
    chi: np.ndarray
    omega_r: float
    t_gate: float

    @property
    def n_samples(self) -> int:
        return len(self.times)

    @property
    def n_systems(self) -> int:
        return self.flux.shape[1]

    @property
    def levels(self) -> int:
        return self.energies.shape[2]


def trace_at(pulse: PulseSpec, device: Device, times, check: bool = True) -> ControlTrace:
    """Evaluate fluxes and dispersive quantities of every transmon at ``times``."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    n_t, n_sys, levels = len(times), device.n_systems, device.levels
    fluxes = np.empty((n_t, n_sys))
    fluxes_dot = np.zeros((n_t, n_sys))
    for m, p in enumerate(device.transmons):
        if m == device.driven:
            fluxes[:, m] = flux(pulse, times)
            fluxes_dot[:, m] = flux_dot(pulse, times)
        else:
            fluxes[:, m] = p.flux_bias
    energies = np.empty((n_t, n_sys, levels))
    shape = (n_t, n_sys, levels - 1)
    out = {k: np.empty(shape) for k in ("g", "delta", "lam", "lam_dot", "chi")}
    for m, p in enumerate(device.transmons):
        for j in range(levels):
            energies[:, m, j] = level_frequency(j, fluxes[:, m], p)
        for j in range(levels - 1):
            q = dispersive_quantities(j, fluxes[:, m], fluxes_dot[:, m], device.omega_r, p,
                                      check=check)
            for k in out:
                out[k][:, m, j] = getattr(q, k)
    return ControlTrace(times=times, flux=fluxes, flux_dot=fluxes_dot, energies=energies,
                        omega_r=device.omega_r, t_gate=pulse.t_gate, **out)


def time_grid(t_gate: float, n_steps: int) -> np.ndarray:
    return np.linspace(0.0, t_gate, n_steps + 1)


def sample(pulse: PulseSpec, n_steps: int, device: Device, check: bool = True) -> ControlTrace:
    """Trace on the uniform grid t_k = k t_gate / n_steps, k = 0..n_steps."""
    if n_steps < 16:
        raise ValueError("n_steps must be >= 16")
    return trace_at(pulse, device, time_grid(pulse.t_gate, n_steps), check=check)
