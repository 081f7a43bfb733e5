"""Fidelity cost of dropping the lambda-dot terms during a flux pulse.

Evolves the reduced {|11>, |20>} model three ways (full, without the
lambda-dot coupling, with time-averaged couplings), scores each against
random SU(2) targets and compares the result with the second-order Magnus
estimate.

    python demos/gate_errors.py [tangential|sinusoidal]
"""

import sys

import numpy as np

from tdswt import dispersive, fidelity, magnus, pulses, transmon

kind = sys.argv[1] if len(sys.argv) > 1 else "tangential"
device = transmon.default_device()
pulse = pulses.default_pulse(kind, device)
trace = pulses.sample(pulse, 4096, device)

rep = dispersive.adiabaticity_report(trace)
print(f"{kind} pulse, t_g = {pulse.t_gate} ns, amplitude {pulse.amplitude * 1e3:.2f} mPhi0")
print(f"max lambda = {rep.max_lambda:.4f}, max lambda_dot/Delta = "
      f"{rep.max_lambda_dot_over_delta:.2e}")

stats = fidelity.run_statistics(pulse, device, 10_000, seed=0)
print("\nsimulated, 10^4 random targets:")
for name, values in (("dF12 (no lambda-dot)", stats.dF12), ("dF13 (mean couplings)", stats.dF13)):
    a = np.abs(values)
    print(f"  {name:22s} median {np.median(a):.3e}   mean {np.mean(a):.3e}   max {a.max():.3e}")

entries = dispersive.extract_reduced_entries(trace)
summary = magnus.summarize(entries)
analytic = magnus.analytic_delta_f(summary, stats.angles)
print("\nsecond-order Magnus estimate:")
print(f"  rotation angles k1 = {summary.k1:.3f}, k2 = {summary.k2:.3f} rad")
print(f"  median |analytic - simulated| = {np.median(np.abs(analytic - stats.dF12)):.3e}")
print(f"  mean |dF| over the angle cube = {magnus.mean_delta_f(summary):.3e}")

edges, density = fidelity.histogram(stats.dF12, 20)
print("\nlog10 |dF12| histogram:")
peak = density.max()
for left, d in zip(edges[:-1], density):
    print(f"  {left:6.2f} {'#' * int(round(40 * d / peak))}")
