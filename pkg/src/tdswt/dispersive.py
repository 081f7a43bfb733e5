"""Jaynes-Cummings and dispersive Hamiltonians, and the reduced {|11>, |20>} model.

Cross-system terms of the dispersive Hamiltonian carry a factor 1/2 per
ordered pair (m, n): summing over both orderings gives the familiar
J = g1 g2 (1/Delta1 + 1/Delta2) / 2 exchange coupling, and it is what the
numerical block diagonalization in :mod:`tdswt.swt` produces.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import quadrature
from .operators import SystemSpec, annihilation, dagger, embed, level_projector, raise_op
from .pulses import ControlTrace
from .transmon import Device, VALIDITY_LIMIT

CROSS_FACTOR = 0.5


class ModelVariant(enum.Enum):
    FULL = "full"                    # U1: complete reduced Hamiltonian
    NO_SDOT = "no-sdot"              # U2: drop the lambda-dot coupling
    CONSTANT_MEAN = "constant"       # U3: drop lambda-dot, g/chi/Delta at their means

    @classmethod
    def parse(cls, value) -> "ModelVariant":
        if isinstance(value, cls):
            return value
        for v in cls:
            if value in (v.value, v.name, v.name.lower()):
                return v
        raise ValueError(f"unknown model variant {value!r}")


def system_spec(device: Device) -> SystemSpec:
    return SystemSpec(device.cavity_cutoff, (device.levels,) * device.n_systems, device.omega_r)


@dataclass(frozen=True)
class _Ops:
    a: np.ndarray
    n_photon: np.ndarray
    proj: tuple          # proj[m][j]
    sp: tuple            # sp[m][j] = |j+1><j| on system m


@lru_cache(maxsize=16)
def _ops(spec: SystemSpec) -> _Ops:
    a = embed(annihilation(spec.cavity_cutoff), 0, spec)
    proj, sp = [], []
    for m, lev in enumerate(spec.levels, start=1):
        proj.append(tuple(embed(level_projector(lev, j), m, spec) for j in range(lev)))
        sp.append(tuple(embed(raise_op(lev, j), m, spec) for j in range(lev - 1)))
    return _Ops(a=a, n_photon=dagger(a) @ a, proj=tuple(proj), sp=tuple(sp))


def number_operator(spec: SystemSpec) -> np.ndarray:
    """Total excitation number a^dag a + sum_m sum_j j Pi_j^(m)."""
    ops = _ops(spec)
    out = ops.n_photon.copy()
    for m in range(spec.n_systems):
        for j, p in enumerate(ops.proj[m]):
            out = out + j * p
    return out


def jc_hamiltonian(spec: SystemSpec, energies, g):
    """Parts (H0, H1, H2) of the multilevel Jaynes-Cummings Hamiltonian.

    ``energies[m, j]`` is omega_j of system m, ``g[m, j]`` the j -> j+1 coupling.
    Leading time axes are allowed and produce stacks of matrices.
    """
    ops = _ops(spec)
    energies = np.asarray(energies, dtype=float)
    g = np.asarray(g, dtype=float)
    lead = energies.shape[:-2]
    h0 = spec.omega_r * ops.n_photon + np.zeros(lead + (1, 1))
    h2 = np.zeros(lead + (spec.dim, spec.dim), dtype=complex)
    for m in range(spec.n_systems):
        for j, p in enumerate(ops.proj[m]):
            h0 = h0 + energies[..., m, j, None, None] * p
        for j, s in enumerate(ops.sp[m]):
            term = s @ ops.a
            h2 = h2 + g[..., m, j, None, None] * (term + dagger(term))
    return h0.astype(complex), np.zeros_like(h2), h2


def analytic_generators(spec: SystemSpec, lam, lam_dot, delta):
    """Closed-form S1 and S2 of the dispersive transformation.

    S1 = sum lambda (sigma^- a^dag - sigma^+ a),
    S2 = -i sum (lambda_dot / Delta) (sigma^- a^dag + sigma^+ a).
    """
    ops = _ops(spec)
    lam, lam_dot, delta = (np.asarray(x, dtype=float) for x in (lam, lam_dot, delta))
    lead = lam.shape[:-2]
    s1 = np.zeros(lead + (spec.dim, spec.dim), dtype=complex)
    s2 = np.zeros_like(s1)
    for m in range(spec.n_systems):
        for j, s in enumerate(ops.sp[m]):
            up = s @ ops.a
            down = dagger(up)
            s1 = s1 + lam[..., m, j, None, None] * (down - up)
            rate = lam_dot[..., m, j] / delta[..., m, j]
            s2 = s2 - 1j * rate[..., None, None] * (down + up)
    return s1, s2


def _padded_chi(chi, levels):
    """chi_{j,j+1} for j = -1..levels-1, zero outside the truncated ladder."""
    out = np.zeros(chi.shape[:-1] + (levels + 1,))
    out[..., 1:levels] = chi
    return out


def full_dispersive_hamiltonian(spec: SystemSpec, trace: ControlTrace, t_index: int) -> np.ndarray:
    """Second-order time-dependent dispersive Hamiltonian at one trace sample.

    Groups: state-dependent cavity pull on a^dag a, chi-shifted level energies,
    exchange coupling g lambda, and the i g lambda_dot / Delta coupling that
    only appears when parameters move. Transitions beyond the truncated
    ladder contribute no dispersive shift.
    """
    ops = _ops(spec)
    k = t_index
    e, g = trace.energies[k], trace.g[k]
    lam, delta, lam_dot = trace.lam[k], trace.delta[k], trace.lam_dot[k]
    dim = spec.dim
    pull = spec.omega_r * np.eye(dim, dtype=complex)
    h = np.zeros((dim, dim), dtype=complex)
    for m, lev in enumerate(spec.levels):
        chi = _padded_chi(trace.chi[k, m], lev)     # chi[j+1] = chi_{j,j+1}
        for j, p in enumerate(ops.proj[m]):
            below, above = chi[j], chi[j + 1]
            pull = pull + (below - above) * p
            h = h + (e[m, j] + below) * p
    h = h + pull @ ops.n_photon
    rate = lam_dot / delta
    for m in range(spec.n_systems):
        for n in range(spec.n_systems):
            if m == n:
                continue
            for j, sp_m in enumerate(ops.sp[m]):
                for kk, sp_n in enumerate(ops.sp[n]):
                    x = dagger(sp_m) @ sp_n         # sigma^-_j(m) sigma^+_k(n)
                    h = h + CROSS_FACTOR * g[m, j] * lam[n, kk] * (x + dagger(x))
                    h = h + 1j * CROSS_FACTOR * g[m, j] * rate[n, kk] * (x - dagger(x))
    if np.max(np.abs(h - dagger(h))) > 1e-14 * max(np.max(np.abs(h)), 1.0):
        raise AssertionError("dispersive Hamiltonian is not Hermitian")
    return h


def static_dispersive_hamiltonian(spec: SystemSpec, energies, g) -> np.ndarray:
    """Time-independent dispersive Hamiltonian assembled state by state.

    Kept independent of :func:`full_dispersive_hamiltonian` on purpose: it
    works directly from the second-order energy shifts of each product state.
    """
    energies = np.asarray(energies, dtype=float)
    g = np.asarray(g, dtype=float)
    labels = spec.labels()
    delta = energies[:, 1:] - energies[:, :-1] - spec.omega_r
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    for idx, (n, *levels) in enumerate(labels):
        e = spec.omega_r * n
        for m, j in enumerate(levels):
            e += energies[m, j]
            if j + 1 < spec.levels[m]:              # |j, n> <-> |j+1, n-1>
                e -= n * g[m, j] ** 2 / delta[m, j]
            if j >= 1:                              # |j, n> <-> |j-1, n+1>
                e += (n + 1) * g[m, j - 1] ** 2 / delta[m, j - 1]
        h[idx, idx] = e
    for idx, (n, *levels) in enumerate(labels):
        for m in range(spec.n_systems):
            for q in range(spec.n_systems):
                if q == m:
                    continue
                j, k = levels[m], levels[q]
                # excitation hops from system m (j -> j-1) to system q (k -> k+1)
                if j >= 1 and k + 1 < spec.levels[q]:
                    target = list(levels)
                    target[m], target[q] = j - 1, k + 1
                    jdx = spec.index(n, *target)
                    a, b = g[m, j - 1], g[q, k]
                    h[jdx, idx] += 0.5 * a * b * (1 / delta[m, j - 1] + 1 / delta[q, k])
    return h


@dataclass(frozen=True)
class ReducedEntries:
    """Entries of the reduced {|11>, |20>} Hamiltonian on a set of times.

    H_red = [[omega, g_r - i g_i], [g_r + i g_i, -omega]]. The primitive arrays
    ``g`` and ``delta`` (shape (T, 2, L-1)), ``delta_omega`` and ``alpha`` are
    kept so the constant-mean model can be recomposed from averaged inputs.
    """

    times: np.ndarray
    omega: np.ndarray
    g_r: np.ndarray
    g_i: np.ndarray
    offset: np.ndarray       # (E11 + E20)/2, dropped from the traceless H_red
    delta_omega: np.ndarray
    alpha: np.ndarray
    g: np.ndarray
    delta: np.ndarray

    def as_arrays(self):
        return self.omega, self.g_r, self.g_i


def _compose(g, delta, delta_omega, alpha, lam_dot=None):
    """omega, g_r, g_i (and offset) from the primitive dispersive quantities."""
    g01_1, g12_1, g01_2 = g[..., 0, 0], g[..., 0, 1], g[..., 1, 0]
    d0_1, d1_1, d0_2 = delta[..., 0, 0], delta[..., 0, 1], delta[..., 1, 0]
    chi01_1, chi12_1, chi01_2 = g01_1**2 / d0_1, g12_1**2 / d1_1, g01_2**2 / d0_2
    omega = 0.5 * (chi01_1 + chi01_2 - chi12_1 + delta_omega - alpha)
    g_r = CROSS_FACTOR * (g01_2 * g12_1 / d1_1 + g12_1 * g01_2 / d0_2)
    if lam_dot is None:
        g_i = np.zeros_like(g_r)
    else:
        g_i = CROSS_FACTOR * (lam_dot[..., 0, 1] * g01_2 / d1_1 - lam_dot[..., 1, 0] * g12_1 / d0_2)
    return omega, g_r, g_i


def extract_reduced_entries(trace: ControlTrace) -> ReducedEntries:
    """Reduced-model entries; system 0 is Q1 (static), system 1 is Q2.

    ``omega`` is half the dispersive energy difference E(|11>) - E(|20>) with
    the cavity empty, so it includes -chi_{12} of Q1 (|20> is pushed up by
    chi_{12}, |11> by chi_{01} of each qubit).
    """
    if trace.n_systems != 2 or trace.levels < 3:
        raise ValueError("the reduced model needs two transmons with >= 3 levels")
    e = trace.energies
    delta_omega = e[:, 1, 1] - e[:, 0, 1]
    alpha = e[:, 0, 2] - 2.0 * e[:, 0, 1]
    omega, g_r, g_i = _compose(trace.g, trace.delta, delta_omega, alpha, trace.lam_dot)
    chi = trace.chi
    e11 = e[:, 0, 1] + e[:, 1, 1] + chi[:, 0, 0] + chi[:, 1, 0]
    e20 = e[:, 0, 2] + e[:, 1, 0] + chi[:, 0, 1]
    return ReducedEntries(times=trace.times, omega=omega, g_r=g_r, g_i=g_i,
                          offset=0.5 * (e11 + e20), delta_omega=delta_omega, alpha=alpha,
                          g=trace.g[:, :2], delta=trace.delta[:, :2])


def mean_primitives(entries: ReducedEntries):
    """Simpson time averages of g and Delta used by the constant-mean model."""
    return (quadrature.time_average(entries.g, entries.times),
            quadrature.time_average(entries.delta, entries.times))


def reduced_hamiltonian(entries: ReducedEntries, variant, t_index=None, means=None) -> np.ndarray:
    """Reduced 2x2 Hamiltonian(s) for a model variant.

    Returns a (T, 2, 2) stack, or one matrix if ``t_index`` is given.
    CONSTANT_MEAN averages g and Delta first (``means`` = (g_bar, Delta_bar),
    computed from ``entries`` by Simpson quadrature when omitted), rebuilds
    chi and lambda from them, and keeps only the qubit-qubit detuning
    delta_omega(t) time dependent.
    """
    variant = ModelVariant.parse(variant)
    if variant is ModelVariant.FULL:
        omega, g_r, g_i = entries.omega, entries.g_r, entries.g_i
    elif variant is ModelVariant.NO_SDOT:
        omega, g_r, g_i = entries.omega, entries.g_r, np.zeros_like(entries.g_i)
    else:
        g_bar, d_bar = means if means is not None else mean_primitives(entries)
        omega, g_r, g_i = _compose(g_bar, d_bar, entries.delta_omega, entries.alpha)
        g_r = np.broadcast_to(g_r, entries.omega.shape)
        g_i = np.zeros_like(entries.omega)
    off = g_r - 1j * g_i
    h = np.empty(entries.omega.shape + (2, 2), dtype=complex)
    h[..., 0, 0] = omega
    h[..., 1, 1] = -omega
    h[..., 0, 1] = off
    h[..., 1, 0] = np.conj(off)
    return h if t_index is None else h[t_index]


@dataclass(frozen=True)
class AdiabaticityReport:
    max_lambda: float
    max_lambda_dot_over_delta: float
    ok: bool


def adiabaticity_report(trace: ControlTrace, limit: float = VALIDITY_LIMIT) -> AdiabaticityReport:
    max_lam = float(np.max(np.abs(trace.lam)))
    max_ad = float(np.max(np.abs(trace.lam_dot / trace.delta)))
    return AdiabaticityReport(max_lam, max_ad, max_lam < limit and max_ad < limit)
