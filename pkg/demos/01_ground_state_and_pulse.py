#!/usr/bin/env python3
"""Tour of the basic ingredients: curves, the vibrational ground state,
the laser pulse, and the ionization-rate kernels.

Run from the repository root:  python3 demos/01_ground_state_and_pulse.py
"""

import numpy as np

import h2frag as hf
from h2frag.constants import AU_TIME_FS, HARTREE_EV
from h2frag.rates import RateModel, pulse_field

ds = hf.load_dataset()
print(f"bundled dataset {ds.checksum[:12]}..., reduced mass {ds.reduced_mass}")

print("\npotential curves (hartree):")
print(f"{'R':>6} {'V_H2':>10} {'V_g':>10} {'V_u':>10} {'mu_ug':>8} {'Ip1 (eV)':>9}")
for r in (1.0, 1.4, 2.0, 3.0, 6.0, 20.0):
    ip1, _, _ = hf.ionization_potentials(ds, r)
    print(f"{r:6.1f} {hf.eval_curve(ds.V_H2, r):10.4f} "
          f"{hf.eval_curve(ds.V_g, r):10.4f} {hf.eval_curve(ds.V_u, r):10.4f} "
          f"{hf.eval_curve(ds.mu_ug, r):8.3f} {ip1 * HARTREE_EV:9.2f}")

grid = hf.build_grid(0.1, 40.0, 2048)
chi0 = hf.numerov_bound(ds.V_H2, grid, ds.reduced_mass, 0)
norm2, mean_r = hf.observables(chi0.wavefunction)
print(f"\nvibrational ground state: E = {chi0.energy:.6f} hartree, "
      f"<R> = {mean_r:.3f} bohr, zero-point = "
      f"{(chi0.energy - ds.V_H2.values.min()):.6f} hartree")

pulse = hf.make_pulse(wavelength_nm=800.0, intensity_w_cm2=1e14, n_cycles=3)
print(f"\n3-cycle pulse at 800 nm, 1e14 W/cm^2: "
      f"E0 = {pulse.e0:.4f} a.u., duration {pulse.t_f * AU_TIME_FS:.2f} fs")
t = np.linspace(0.0, pulse.t_f, 7)
print("field samples E(t)/E0:",
      np.round(pulse_field(pulse, t) / pulse.e0, 3))

model = RateModel(z_res=1)
print("\nionization rate of the neutral vs field (atomic units):")
for F in (0.03, 0.05, 0.08, 0.12):
    gamma = hf.keldysh(F, pulse.omega, 0.6045)
    w = hf.ppt_rate(F, pulse.omega, 0.6045, model)
    print(f"  F = {F:.2f}: gamma = {gamma:5.2f}, W = {w:.3e}")
