"""Time-ordered propagation with midpoint matrix exponentials.

Each step applies exp(-i H(t_k + dt/2) dt), a second-order Magnus step, so
the product is unitary to machine precision and converges as dt^2.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dispersive import (
    ModelVariant, extract_reduced_entries, jc_hamiltonian, mean_primitives,
    reduced_hamiltonian, system_spec,
)
from .errors import ConvergenceWarning
from .operators import dagger, expm_skew, is_hermitian
from .pulses import PulseSpec, sample, trace_at
from .transmon import Device

DEFAULT_STEPS = 4096
CONVERGENCE_WARN = 1e-6
FULL_JC = "full-jc"


def unitarity_defect(u) -> float:
    """max |U^dag U - I|"""
    u = np.asarray(u)
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[-1]))))


@dataclass(frozen=True)
class EvolutionResult:
    U_final: np.ndarray
    unitarity_defect: float
    n_steps: int
    variant: object = None
    convergence: float = float("nan")   # max |U(n_steps) - U(n_steps/2)|


def _sample_hamiltonians(h_at, times):
    try:
        stack = np.asarray(h_at(times))
        if stack.ndim == 3 and stack.shape[0] == len(times):
            return stack
    except (TypeError, ValueError):
        pass
    return np.stack([np.asarray(h_at(float(t))) for t in times])


def _product(h_mid, dt):
    if not is_hermitian(h_mid):
        raise ValueError("Hamiltonian samples must be Hermitian")
    steps = expm_skew(h_mid, dt)
    u = np.eye(h_mid.shape[-1], dtype=complex)
    for step in steps:
        u = step @ u
    return u


def evolve(h_at, t_gate: float, n_steps: int = DEFAULT_STEPS, t_start: float = 0.0,
           variant=None, check_convergence: bool = True) -> EvolutionResult:
    """Propagator U(t_start + t_gate, t_start) of a sampled Hamiltonian.

    ``h_at`` maps an array of times to a (T, d, d) stack; a callable that
    only takes scalar times also works, at the cost of a Python loop.
    With ``check_convergence`` the run is repeated on half as many steps and
    the largest entry change is stored in ``convergence``.
    """
    if n_steps < 64:
        raise ValueError("n_steps must be >= 64")
    dt = t_gate / n_steps
    mids = t_start + (np.arange(n_steps) + 0.5) * dt
    u = _product(_sample_hamiltonians(h_at, mids), dt)
    conv = float("nan")
    if check_convergence:
        coarse_dt = t_gate / (n_steps // 2)
        coarse = t_start + (np.arange(n_steps // 2) + 0.5) * coarse_dt
        u_coarse = _product(_sample_hamiltonians(h_at, coarse), coarse_dt)
        conv = float(np.max(np.abs(u - u_coarse)))
        if conv > CONVERGENCE_WARN:
            warnings.warn(f"propagator changed by {conv:.2e} on step doubling",
                          ConvergenceWarning, stacklevel=2)
    return EvolutionResult(u, unitarity_defect(u), n_steps, variant, conv)


def reduced_hamiltonian_function(pulse: PulseSpec, device: Device, variant, n_steps=DEFAULT_STEPS):
    """Callable times -> reduced 2x2 Hamiltonians for one model variant.

    The constant-mean variant takes its averages from a Simpson quadrature
    on the uniform ``n_steps`` grid, so all time samples share one set of means.
    """
    variant = ModelVariant.parse(variant)
    means = None
    if variant is ModelVariant.CONSTANT_MEAN:
        means = mean_primitives(extract_reduced_entries(sample(pulse, n_steps, device, check=False)))

    def h_at(times):
        entries = extract_reduced_entries(trace_at(pulse, device, times, check=False))
        return reduced_hamiltonian(entries, variant, means=means)

    return h_at


def evolve_reduced(pulse: PulseSpec, device: Device, variant, n_steps: int = DEFAULT_STEPS,
                   check_convergence: bool = True) -> EvolutionResult:
    variant = ModelVariant.parse(variant)
    h_at = reduced_hamiltonian_function(pulse, device, variant, n_steps)
    return evolve(h_at, pulse.t_gate, n_steps, variant=variant,
                  check_convergence=check_convergence)


def jc_hamiltonian_function(pulse: PulseSpec, device: Device):
    spec = system_spec(device)

    def h_at(times):
        trace = trace_at(pulse, device, times, check=False)
        h0, _, h2 = jc_hamiltonian(spec, trace.energies, trace.g)
        return h0 + h2

    return h_at


def evolve_full_jc(pulse: PulseSpec, device: Device, n_steps: int = DEFAULT_STEPS,
                   check_convergence: bool = True) -> EvolutionResult:
    """Propagate the full multilevel Jaynes-Cummings Hamiltonian (lab frame)."""
    if device.cavity_cutoff < 3:
        raise ValueError("full JC propagation needs cavity_cutoff >= 3")
    return evolve(jc_hamiltonian_function(pulse, device), pulse.t_gate, n_steps,
                  variant=FULL_JC, check_convergence=check_convergence)
