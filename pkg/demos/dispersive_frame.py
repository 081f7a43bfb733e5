"""Walk through the numerical Schrieffer-Wolff hierarchy on the default device.

Builds the static Jaynes-Cummings Hamiltonian at the bias point, solves for
S1, S2, S3 on the photon-parity partition, and prints how much coupling is
left between the blocks after each order. Then checks the effective
Hamiltonian against the assembled dispersive Hamiltonian.

    python demos/dispersive_frame.py
"""

import numpy as np

from tdswt import dispersive, pulses, swt, transmon

device = transmon.default_device()
spec = dispersive.system_spec(device)
bias = device.transmons[device.driven].flux_bias
still = pulses.PulseSpec("sinusoidal", bias, 0.0, 30.0, nu=1 / 60.0)
trace = pulses.sample(still, 16, device)

print(f"Hilbert space: cavity cutoff {spec.cavity_cutoff}, transmon levels {spec.levels}, "
      f"dimension {spec.dim}")
print("lambda = g / Delta per transition:")
for m, row in enumerate(trace.lam[0]):
    print(f"  Q{m + 1}: " + ", ".join(f"{j}{j + 1}: {x:+.4f}" for j, x in enumerate(row)))

h0, h1, h2 = dispersive.jc_hamiltonian(spec, trace.energies[0], trace.g[0])
part = swt.photon_parity_partition(spec)
series = swt.build_hierarchy(h0, h1, h2, part)
h = h0 + h1 + h2

print("\noff-block residual after each order (rad/ns):")
print(f"  none         : {swt.offdiagonal_residual(h, np.zeros_like(h), part)[0]:.3e}")
for k in (1, 2, 3):
    res = swt.offdiagonal_residual(h, series.total(k), part)[0]
    label = "+".join(f"S{j}" for j in range(1, k + 1))
    print(f"  {label:12s} : {res:.3e}")

terms = swt.effective_hamiltonian_terms(h0, h1, h2, series, part)
heff = terms[0] + terms[1] + terms[2]
hd = dispersive.full_dispersive_hamiltonian(spec, trace, 0)
n = spec.labels()[:, 0]
keep = n <= spec.cavity_cutoff - 2
same = (n[:, None] == n[None, :]) & keep[:, None] & keep[None, :]
print(f"\nmax |H_eff - H_dispersive| within fixed photon number: "
      f"{np.max(np.abs(np.where(same, heff - hd, 0))):.2e}")

i11, i20 = spec.index(0, 1, 1), spec.index(0, 2, 0)
print(f"exchange <11|H|20> = {hd[i11, i20].real / (2 * np.pi) * 1e3:.4f} MHz")
