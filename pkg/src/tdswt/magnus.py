"""Second-order Magnus estimate of the fidelity error caused by dropping lambda-dot terms.

With H(t) = omega sz + g_r sx + g_i sy, the first two Magnus terms give

    U_bar = exp(-i n.sigma),  n = t_g (H_bar1 + H_bar2)
    n_x = t_g g_r_bar - d(omega, g_i)
    n_y = t_g g_i_bar + d(omega, g_r)
    n_z = t_g omega_bar - d(g_i, g_r)

where d(a, b) = int_0^tg dt2 int_0^t2 dt1 [a(t2) b(t1) - a(t1) b(t2)] is
dimensionless. The means are multiplied by t_g so every argument of f is a
rotation angle. Against a target parametrized by (phi1, phi2, theta),
|Tr(U_bar^dag U)|^2 = f(|n|, n_z, n_y, n_x), and the fidelity difference is
[f(U1 args) - f(U2 args)] / 4.

Signs follow the convention <11|H|20> = g_r - i g_i.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, linalg

from . import quadrature
from .dispersive import ReducedEntries
from .fidelity import gate_fidelity, target_unitary

DEFAULT_GRID = 64


def averaged_h(entries: ReducedEntries):
    """Time averages (omega_bar, g_r_bar, g_i_bar) in rad/ns, Simpson rule."""
    t = entries.times
    return tuple(float(quadrature.time_average(x, t))
                 for x in (entries.omega, entries.g_r, entries.g_i))


def delta(a, b, times) -> float:
    """d(a, b) = int (a B - b A) dt with A, B the running integrals of a, b."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    big_a = quadrature.cumulative(a, times)
    big_b = quadrature.cumulative(b, times)
    return float(quadrature.integrate(a * big_b - b * big_a, times))


def delta_integrals(entries: ReducedEntries):
    """(d(omega, g_r), d(omega, g_i), d(g_i, g_r))"""
    t = entries.times
    return (delta(entries.omega, entries.g_r, t),
            delta(entries.omega, entries.g_i, t),
            delta(entries.g_i, entries.g_r, t))


@dataclass(frozen=True)
class MagnusSummary:
    t_gate: float
    omega_bar: float
    gr_bar: float
    gi_bar: float
    d_wgr: float
    d_wgi: float
    d_gigr: float
    k1: float
    k2: float

    def full_arguments(self):
        """(n_z, n_y, n_x) for the complete Hamiltonian (U1)."""
        tg = self.t_gate
        return (tg * self.omega_bar - self.d_gigr,
                tg * self.gi_bar + self.d_wgr,
                tg * self.gr_bar - self.d_wgi)

    def reduced_arguments(self):
        """(n_z, n_y, n_x) with g_i = 0 (U2)."""
        tg = self.t_gate
        return (tg * self.omega_bar, self.d_wgr, tg * self.gr_bar)


def k_constants(t_gate, omega_bar, gr_bar, gi_bar, d_wgr, d_wgi, d_gigr):
    """Rotation angles |n| of the Magnus-averaged U1 and U2."""
    tg = t_gate
    k1 = np.sqrt((tg * omega_bar - d_gigr) ** 2 + (d_wgr + tg * gi_bar) ** 2
                 + (tg * gr_bar - d_wgi) ** 2)
    k2 = np.sqrt((tg * omega_bar) ** 2 + d_wgr**2 + (tg * gr_bar) ** 2)
    return float(k1), float(k2)


def summarize(entries: ReducedEntries) -> MagnusSummary:
    t = entries.times
    tg = float(t[-1] - t[0])
    means = averaged_h(entries)
    deltas = delta_integrals(entries)
    k1, k2 = k_constants(tg, *means, *deltas)
    return MagnusSummary(tg, *means, *deltas, k1, k2)


def f_function(k, a1, a2, a3, angles):
    """(4/k^2) {k cos phi1 cos k cos theta
                - sin k [a1 cos theta sin phi1 + a2 cos phi2 sin theta + a3 sin phi2 sin theta]}^2

    Evaluated as 4 {cos phi1 cos k cos theta - sinc(k) [...]}^2, which is
    regular at k = 0.
    """
    angles = np.asarray(angles, dtype=float)
    phi1, phi2, theta = angles[..., 0], angles[..., 1], angles[..., 2]
    bracket = (a1 * np.cos(theta) * np.sin(phi1) + a2 * np.cos(phi2) * np.sin(theta)
               + a3 * np.sin(phi2) * np.sin(theta))
    sinc_k = np.sinc(np.asarray(k) / np.pi)
    return 4.0 * (np.cos(phi1) * np.cos(k) * np.cos(theta) - sinc_k * bracket) ** 2


def analytic_delta_f(summary: MagnusSummary, angles):
    """F(U1_bar) - F(U2_bar) from the closed form; ``angles`` shape (..., 3)."""
    f1 = f_function(summary.k1, *summary.full_arguments(), angles)
    f2 = f_function(summary.k2, *summary.reduced_arguments(), angles)
    return (f1 - f2) / 4.0


def angle_grid(points_per_axis: int = DEFAULT_GRID) -> np.ndarray:
    """Midpoint tensor grid on [0, 2 pi)^3, shape (points^3, 3)."""
    ax = (np.arange(points_per_axis) + 0.5) * (2 * np.pi / points_per_axis)
    return np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 3)


def mean_delta_f(summary: MagnusSummary, grid_per_axis: int = DEFAULT_GRID,
                 absolute: bool = True, seed: int | None = None, samples: int = 0) -> float:
    """Average of |Delta F| (or Delta F) over the angle cube.

    Uses a deterministic midpoint grid unless ``samples`` > 0, in which case
    Monte Carlo angles are drawn from ``default_rng(seed)``.
    """
    if samples > 0:
        angles = np.random.default_rng(seed).uniform(0, 2 * np.pi, size=(samples, 3))
    else:
        angles = angle_grid(grid_per_axis)
    df = analytic_delta_f(summary, angles)
    return float(np.mean(np.abs(df) if absolute else df))


def summary_json(summary: MagnusSummary, mean_df: float) -> str:
    data = asdict(summary)
    out = {
        "omega_bar": data["omega_bar"], "gr_bar": data["gr_bar"], "gi_bar": data["gi_bar"],
        "d_wgr": data["d_wgr"], "d_wgi": data["d_wgi"], "d_gigr": data["d_gigr"],
        "k1": data["k1"], "k2": data["k2"], "mean_dF": mean_df,
        "log10_mean_dF": float(np.log10(mean_df)) if mean_df > 0 else None,
    }
    return json.dumps(out, indent=2)


def averaged_hamiltonians(times, hamiltonians):
    """H_bar1 and H_bar2 assembled numerically from a (T, d, d) stack.

    Independent of the closed form above: plain matrix quadrature with
    scipy's Simpson rules on the commutator integrand.
    """
    times = np.asarray(times, dtype=float)
    tg = times[-1] - times[0]
    h = np.asarray(hamiltonians, dtype=complex)
    h1 = integrate.simpson(h, x=times, axis=0) / tg
    # cumulative_simpson drops imaginary parts, so integrate them separately
    running = (integrate.cumulative_simpson(h.real, x=times, axis=0, initial=0)
               + 1j * integrate.cumulative_simpson(h.imag, x=times, axis=0, initial=0))
    comm = h @ running - running @ h
    h2 = -1j / (2 * tg) * integrate.simpson(comm, x=times, axis=0)
    return h1, h2


def magnus_unitaries(entries: ReducedEntries):
    """U1_bar, U2_bar = exp(-i t_g (H_bar1 + H_bar2)) with and without g_i."""
    from .dispersive import ModelVariant, reduced_hamiltonian
    t = entries.times
    tg = t[-1] - t[0]
    out = []
    for variant in (ModelVariant.FULL, ModelVariant.NO_SDOT):
        h1, h2 = averaged_hamiltonians(t, reduced_hamiltonian(entries, variant))
        out.append(linalg.expm(-1j * tg * (h1 + h2)))
    return tuple(out)


def magnus_numeric_delta_f(entries: ReducedEntries, angles):
    u1, u2 = magnus_unitaries(entries)
    targets = target_unitary(angles)
    return gate_fidelity(u1, targets) - gate_fidelity(u2, targets)
