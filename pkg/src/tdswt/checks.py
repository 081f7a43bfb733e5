"""Numerical self-checks of the transformation machinery.

These back the ``verify-swt`` command and the acceptance tests:

* residual scaling of the static hierarchy with the coupling strength,
* agreement of the numerically solved generators with the closed forms,
* phase agreement between the dispersive-frame reduced model and a direct
  propagation of the multilevel Jaynes-Cummings Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dispersive, propagator, pulses, quadrature, swt
from .operators import dagger, expm_skew
from .pulses import PulseSpec
from .transmon import Device, coupling, default_device, level_frequency

SCALING_FACTORS = (1.0, 0.5, 0.25)
SCALING_LAMBDA = 0.05
EXPONENT_TOL = 0.15
GENERATOR_TOL = 1e-6
PHASE_TOL = 5e-3


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    target: str
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.value:.6g} (target {self.target})"


def static_jc_parts(device: Device, lam: float = SCALING_LAMBDA):
    """Bare energies and couplings at bias, couplings rescaled so max |g/Delta| = ``lam``."""
    e = np.array([[level_frequency(j, p.flux_bias, p) for j in range(device.levels)]
                  for p in device.transmons])
    g = np.array([[coupling(j, p.flux_bias, p) for j in range(device.levels - 1)]
                  for p in device.transmons])
    delta = e[:, 1:] - e[:, :-1] - device.omega_r
    return e, g * lam / np.max(np.abs(g / delta))


def fit_exponent(factors, values) -> float:
    """Slope of log(values) against log(factors)."""
    return float(np.polyfit(np.log(factors), np.log(values), 1)[0])


@dataclass(frozen=True)
class ScalingReport:
    factors: tuple
    residual_first: np.ndarray     # after S1
    residual_third: np.ndarray     # after S1 + S2 + S3
    exponent_first: float
    exponent_third: float


def residual_scaling(device: Device | None = None, lam: float = SCALING_LAMBDA,
                     factors=SCALING_FACTORS, partition: str = "number") -> ScalingReport:
    """Off-diagonal residual of the static JC system for scaled couplings.

    ``partition`` is ``"number"`` (blocks of fixed photon number) or
    ``"parity"`` (even / odd photon number).
    """
    device = device or default_device()
    spec = dispersive.system_spec(device)
    part = (swt.photon_number_partition(spec) if partition == "number"
            else swt.photon_parity_partition(spec))
    e, g = static_jc_parts(device, lam)
    first, third = [], []
    for f in factors:
        h0, h1, h2 = dispersive.jc_hamiltonian(spec, e, g * f)
        series = swt.build_hierarchy(h0, h1, h2, part)
        h = h0 + h1 + h2
        first.append(swt.offdiagonal_residual(h, series.S1, part)[0])
        third.append(swt.offdiagonal_residual(h, series.total(3), part)[0])
    first, third = np.array(first), np.array(third)
    return ScalingReport(tuple(factors), first, third,
                         fit_exponent(factors, first), fit_exponent(factors, third))


def generator_deviation(pulse: PulseSpec | None = None, device: Device | None = None,
                        n_steps: int = 2048):
    """Max entrywise |S_numeric - S_closed_form| for S1 and S2 along a pulse.

    Uses the even/odd photon-number partition, on which the numerical
    hierarchy and the closed forms describe the same transformation.
    """
    device = device or default_device()
    pulse = pulse or pulses.default_pulse("sinusoidal", device)
    spec = dispersive.system_spec(device)
    trace = pulses.sample(pulse, n_steps, device)
    h0, h1, h2 = dispersive.jc_hamiltonian(spec, trace.energies, trace.g)
    series = swt.build_hierarchy(h0, h1, h2, swt.photon_parity_partition(spec), times=trace.times)
    s1, s2 = dispersive.analytic_generators(spec, trace.lam, trace.lam_dot, trace.delta)
    return float(np.max(np.abs(series.S1 - s1))), float(np.max(np.abs(series.S2 - s2)))


def _frame(s):
    return expm_skew(1j * s, 1.0)       # exp(S) for anti-Hermitian S


def jc_phase_difference(pulse: PulseSpec | None = None, device: Device | None = None,
                        n_steps: int = 4096) -> float:
    """Phase of <11,0| in the dispersive frame: full JC minus reduced model (rad).

    The full propagator U is moved into the dispersive frame with the closed
    form S = S1 + S2 at both ends, e^{-S(t_g)} U e^{S(0)}. The reduced model
    is traceless, so the dropped mean energy (E11 + E20)/2 is integrated and
    restored before comparing.
    """
    device = device or default_device()
    pulse = pulse or pulses.default_pulse("tangential", device)
    spec = dispersive.system_spec(device)
    full = propagator.evolve_full_jc(pulse, device, n_steps, check_convergence=False).U_final
    trace = pulses.sample(pulse, n_steps, device)
    ends = [0, -1]
    s1, s2 = dispersive.analytic_generators(spec, trace.lam[ends], trace.lam_dot[ends],
                                            trace.delta[ends])
    s = s1 + s2
    u_frame = dagger(_frame(s[1])) @ full @ _frame(s[0])
    i11 = spec.index(0, 1, 1)
    reduced = propagator.evolve_reduced(pulse, device, dispersive.ModelVariant.FULL, n_steps,
                                        check_convergence=False).U_final
    entries = dispersive.extract_reduced_entries(trace)
    dynamic = quadrature.integrate(entries.offset, trace.times)
    diff = np.angle(u_frame[i11, i11]) - (np.angle(reduced[0, 0]) - dynamic)
    return float(np.angle(np.exp(1j * diff)))


def swt_suite(device: Device | None = None) -> list[CheckResult]:
    """Everything ``verify-swt`` reports."""
    device = device or default_device()
    out = []
    rep = residual_scaling(device)
    out.append(CheckResult("residual exponent after S1", rep.exponent_first,
                           f"2 +- {EXPONENT_TOL}", abs(rep.exponent_first - 2) <= EXPONENT_TOL))
    out.append(CheckResult("residual exponent after S1+S2+S3", rep.exponent_third,
                           f"4 +- {EXPONENT_TOL}", abs(rep.exponent_third - 4) <= EXPONENT_TOL))
    ordered = bool(np.all(rep.residual_first > rep.residual_third))
    out.append(CheckResult("residual(S1) > residual(S1+S2+S3)",
                           float(np.min(rep.residual_first / rep.residual_third)), "> 1", ordered))
    d1, d2 = generator_deviation(device=device)
    out.append(CheckResult("S1 closed-form deviation", d1, f"< {GENERATOR_TOL:g}", d1 < GENERATOR_TOL))
    out.append(CheckResult("S2 closed-form deviation", d2, f"< {GENERATOR_TOL:g}", d2 < GENERATOR_TOL))
    ph = jc_phase_difference(device=device)
    out.append(CheckResult("full JC |11> phase mismatch", abs(ph), f"< {PHASE_TOL:g} rad",
                           abs(ph) < PHASE_TOL))
    return out
