"""Random SU(2) targets, gate overlap fidelity and fidelity-difference statistics."""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dispersive import ModelVariant
from .propagator import DEFAULT_STEPS, EvolutionResult, evolve_reduced
from .pulses import PulseSpec
from .transmon import Device

TWO_PI = 2.0 * np.pi
DEFAULT_TARGETS = 10000
DEFAULT_BINS = 60


class TargetAngles(NamedTuple):
    phi1: float
    phi2: float
    theta: float


def target_unitary(angles) -> np.ndarray:
    """[[e^{i phi1} cos th, e^{i phi2} sin th], [-e^{-i phi2} sin th, e^{-i phi1} cos th]].

    ``angles`` has shape (..., 3) ordered (phi1, phi2, theta).
    """
    angles = np.asarray(angles, dtype=float)
    phi1, phi2, theta = angles[..., 0], angles[..., 1], angles[..., 2]
    c, s = np.cos(theta), np.sin(theta)
    u = np.empty(angles.shape[:-1] + (2, 2), dtype=complex)
    u[..., 0, 0] = np.exp(1j * phi1) * c
    u[..., 0, 1] = np.exp(1j * phi2) * s
    u[..., 1, 0] = -np.exp(-1j * phi2) * s
    u[..., 1, 1] = np.exp(-1j * phi1) * c
    return u


def sample_angles(seed: int, count: int) -> np.ndarray:
    """``count`` angle triples, i.i.d. uniform on [0, 2 pi).

    Drawn from ``numpy.random.default_rng(seed)`` (PCG64) as one (count, 3)
    block, so a given seed always yields the same sequence. theta is uniform,
    not Haar weighted.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    return np.random.default_rng(seed).uniform(0.0, TWO_PI, size=(count, 3))


def gate_fidelity(u, u_ideal) -> np.ndarray:
    """|Tr(U^dag U_ideal)|^2 / 4 for 2x2 unitaries (broadcasts over leading axes)."""
    u, u_ideal = np.asarray(u), np.asarray(u_ideal)
    if u.shape[-2:] != (2, 2) or u_ideal.shape[-2:] != (2, 2):
        raise ValueError("gate_fidelity is defined for 2x2 unitaries only")
    overlap = np.einsum("...ji,...ji->...", u.conj(), u_ideal)
    return np.abs(overlap) ** 2 / 4.0


class GateStatsRecord(NamedTuple):
    angles: TargetAngles
    F1: float
    F2: float
    F3: float
    dF12: float
    dF13: float


@dataclass(frozen=True)
class GateStats:
    """Per-target fidelities of U1 (full), U2 (no lambda-dot) and U3 (constant means)."""

    angles: np.ndarray
    F1: np.ndarray
    F2: np.ndarray
    F3: np.ndarray
    unitaries: dict

    @property
    def dF12(self) -> np.ndarray:
        return self.F1 - self.F2

    @property
    def dF13(self) -> np.ndarray:
        return self.F1 - self.F3

    def __len__(self):
        return len(self.F1)

    def records(self):
        d12, d13 = self.dF12, self.dF13
        for k in range(len(self)):
            yield GateStatsRecord(TargetAngles(*self.angles[k]), self.F1[k], self.F2[k],
                                  self.F3[k], d12[k], d13[k])


def delta_f(f_m, f_n):
    return np.asarray(f_m) - np.asarray(f_n)


def _fidelities(unitaries, angles, threads):
    chunks = np.array_split(np.arange(len(angles)), max(threads, 1))

    def work(idx):
        targets = target_unitary(angles[idx])
        return [gate_fidelity(unitaries[v], targets) for v in ModelVariant]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    return [np.concatenate([p[i] for p in parts]) for i in range(3)]


def run_statistics(pulse: PulseSpec, device: Device, n_targets: int = DEFAULT_TARGETS,
                   seed: int = 0, n_steps: int = DEFAULT_STEPS, threads: int = 1,
                   evolutions: dict | None = None) -> GateStats:
    """Evolve U1, U2, U3 once and score them against ``n_targets`` random targets.

    Angles are drawn up front in one block; parallel chunks are reassembled
    in target order, so results do not depend on ``threads``.
    """
    if n_targets < 1:
        raise ValueError("n_targets must be >= 1")
    if evolutions is None:
        evolutions = {v: evolve_reduced(pulse, device, v, n_steps) for v in ModelVariant}
    unitaries = {v: r.U_final if isinstance(r, EvolutionResult) else np.asarray(r)
                 for v, r in evolutions.items()}
    angles = sample_angles(seed, n_targets)
    f1, f2, f3 = _fidelities(unitaries, angles, threads)
    return GateStats(angles=angles, F1=f1, F2=f2, F3=f3, unitaries=unitaries)


def histogram(values, n_bins: int = DEFAULT_BINS):
    """Density histogram of log10|values| (zeros are dropped), unit area."""
    values = np.abs(np.asarray(values, dtype=float))
    logs = np.log10(values[values > 0])
    if logs.size == 0:
        return np.linspace(0.0, 1.0, n_bins + 1), np.zeros(n_bins)
    lo, hi = logs.min(), logs.max()
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    density, edges = np.histogram(logs, bins=n_bins, range=(lo, hi), density=True)
    return edges, density


def _fmt(x) -> str:
    return format(float(x) + 0.0, ".17g")   # + 0.0 folds -0 into 0


def write_records_csv(path, stats: GateStats) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["phi1", "phi2", "theta", "F1", "F2", "F3", "dF12", "dF13"])
        rows = np.column_stack([stats.angles, stats.F1, stats.F2, stats.F3,
                                stats.dF12, stats.dF13])
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_histogram_csv(path, edges, density) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["bin_left", "bin_right", "density"])
        for left, right, d in zip(edges[:-1], edges[1:], density):
            w.writerow([_fmt(left), _fmt(right), _fmt(d)])
