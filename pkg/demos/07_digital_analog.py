"""Digital-analog simulation: big analog blocks, few digital corrections.

Two flavors:

* Heisenberg chains from always-on XX/XY interactions plus collective
  rotations -- two analog blocks per Trotter step regardless of range,
  versus a fully digital route whose gate count grows with the pair
  count.  For uniform couplings the split commutes and one step is exact.

* Rabi/Dicke dynamics in a qubit-resonator setup that natively offers
  only excitation-conserving (Jaynes-Cummings) coupling: interleaving
  frame-detuned segments with pi flips synthesizes the counter-rotating
  half, reaching deep-strong coupling with its collapse-revival dynamics.
"""
import math

import numpy as np

from qworkbench import daqs
from qworkbench import qcore as qc

print("Heisenberg digitization, power-law range alpha = 0.6, five spins:")
coupling = daqs.SpinCouplingMatrix.power_law(5, 1.0, 0.6)
state = qc.qubit_register_state([1, 1, 0, 1, 1])
states = {"bench": state}
print(f"{'Jt':>5s} {'l':>3s} {'F digital-analog':>17s} {'F digital':>10s} "
      f"{'gates DA':>9s} {'gates dig':>10s}")
for steps in (1, 2, 3):
    for jt in (0.7, 2.0944):
        da = daqs.daqs_heisenberg(coupling, jt, steps, states)
        dg = daqs.digital_heisenberg(coupling, jt, steps, states)
        print(f"{jt:5.2f} {steps:3d} {da.fidelities['bench']:17.6f} "
              f"{dg.fidelities['bench']:10.6f} {da.plan.gate_count:9d} "
              f"{dg.plan.gate_count:10d}")

uni = daqs.daqs_heisenberg(daqs.SpinCouplingMatrix.uniform(5, 0.8), 1.3, 1)
print(f"uniform couplings, ONE step: operator defect {uni.trotter_defect:.2e}")

print("\nphysical XY block from a far-detuned spin-boson drive:")
two_pi = 2 * math.pi
res = daqs.xy_block_physical(j_coupling=two_pi * 25.0, delta_mode=two_pi * 60e3,
                             delta_spin=two_pi * 3e3, omega=two_pi * 62e3,
                             n_spins=3, times=[0.01, 0.02, 0.04], n_max=4,
                             tol=3e-7)
print(f"  effective Lamb-Dicke {res.eta_eff:.4f}; block fidelities "
      + ", ".join(f"{f:.4f}" for f in res.fidelities))

print("\ndigitized Rabi model in a resonator setup, deep-strong preset "
      "(g = mode frequency, zero splitting):")
for steps in (5, 15, 40):
    half = daqs.cqed_rabi_digitize(1.0, 0.0, 1.0, math.pi, steps, n_max=24)
    full = daqs.cqed_rabi_digitize(1.0, 0.0, 1.0, 2 * math.pi, steps, n_max=24)
    print(f"  n = {steps:2d}: <photons> at half period {half.observables['n']:.3f} "
          f"(exact 4.0), at full period {full.observables['n']:.3f} (exact 0.0)")

print("\nconvergence of the digitization across coupling presets (g t = 2):")
for name, pr in (("g = wr = wq", dict(omega_r=1.0, omega_q=1.0, g=1.0)),
                 ("g = 2wr = wq", dict(omega_r=0.5, omega_q=1.0, g=1.0))):
    infids = [1 - daqs.cqed_rabi_digitize(**pr, t=2.0, steps=n, n_max=24).fidelity
              for n in (4, 8, 16, 32)]
    print(f"  {name}: 1-F = " + ", ".join(f"{x:.4f}" for x in infids))

print("\nnoisy digitization (resonator loss, dephasing, finite flips):")
noise = daqs.CqedNoise(kappa=0.01, gamma_phi=0.005, gamma_minus=0.002,
                       flip_duration=0.02)
clean = daqs.cqed_rabi_digitize(1.0, 1.0, 1.0, 2.0, 8, n_max=12)
noisy = daqs.cqed_rabi_digitize(1.0, 1.0, 1.0, 2.0, 8, n_max=12, noise=noise,
                                tol=1e-8)
print(f"  fidelity {clean.fidelity:.4f} (noiseless) -> {noisy.fidelity:.4f} (noisy)")

n_eps, norm = daqs.gate_count_bound(t=1.0, omega_r=1.0, omega_q=1.0, g=1.0,
                                    n_qubits=3, m_excitations=16, eps=0.1)
print(f"\ngate-count bound for a 3-qubit collective run: ||H|| <= {norm:.1f}, "
      f"N_eps = {n_eps}")
