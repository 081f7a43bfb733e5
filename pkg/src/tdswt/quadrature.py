"""Composite Simpson quadrature on uniform grids (integration along axis 0)."""

from __future__ import annotations

import numpy as np

from .errors import QuadratureError


def grid_step(times) -> float:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 3:
        raise QuadratureError("Simpson quadrature needs at least 3 samples")
    if (len(times) - 1) % 2:
        raise QuadratureError(f"Simpson quadrature needs an even number of intervals, "
                              f"got {len(times) - 1}")
    steps = np.diff(times)
    h = steps.mean()
    if h <= 0 or np.max(np.abs(steps - h)) > 1e-9 * abs(h):
        raise QuadratureError("sample times must be uniformly spaced and increasing")
    return float(h)


def simpson_weights(times) -> np.ndarray:
    h = grid_step(times)
    w = np.full(len(times), 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * h / 3.0


def integrate(values, times):
    """Integral over the full grid of ``values`` (first axis = time)."""
    values = np.asarray(values)
    return np.tensordot(simpson_weights(times), values, axes=(0, 0))


def time_average(values, times):
    times = np.asarray(times, dtype=float)
    return integrate(values, times) / (times[-1] - times[0])


def cumulative(values, times):
    """Running integral A(t_k) = int_{t_0}^{t_k} values dt, Simpson-consistent.

    Even nodes carry composite Simpson sums; odd nodes add a three-point
    partial-panel rule. A(t_end) equals :func:`integrate` exactly.
    """
    h = grid_step(times)
    f = np.asarray(values)
    out = np.zeros_like(f, dtype=np.result_type(f, float))
    panels = h / 3.0 * (f[0:-2:2] + 4.0 * f[1:-1:2] + f[2::2])
    out[2::2] = np.cumsum(panels, axis=0)
    out[1::2] = out[0:-2:2] + h / 12.0 * (5.0 * f[0:-2:2] + 8.0 * f[1:-1:2] - f[2::2])
    return out
