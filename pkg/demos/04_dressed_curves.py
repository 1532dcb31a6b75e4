#!/usr/bin/env python3
"""Light-dressed potential curves of the molecular ion at 266 nm.

The photon-number picture shifts each electronic curve down by n photon
energies; where a gerade and an ungerade dressed curve cross, the
radiative coupling mu(R) E0 / 2 opens an avoided crossing.  These two
crossings organize the low-energy dissociation pathways (bond softening
and above-threshold dissociation).

Run:  python3 demos/04_dressed_curves.py
"""

import h2frag as hf
from h2frag.constants import HARTREE_EV
from h2frag.dressed import dressed_pair, find_crossing

ds = hf.load_dataset()
omega = hf.make_pulse(266.0, 2e14, 1).omega
e0 = hf.make_pulse(266.0, 2e14, 1).e0
print(f"photon energy {omega * HARTREE_EV:.2f} eV, field amplitude {e0:.4f} a.u.")

for pair in ((0, 3), (2, 3)):
    r_star = find_crossing(ds, omega, pair)
    dc = dressed_pair(ds, omega, e0, *pair)
    i = abs(dc.R_axis - r_star).argmin()
    gap = dc.adiabatic_upper[i] - dc.adiabatic_lower[i]
    mu = hf.eval_curve(ds.mu_ug, r_star)
    print(f"pair (g,{pair[0]})/(u,{pair[1]}): crossing at R* = {r_star:.3f} bohr, "
          f"avoided-crossing gap {gap * HARTREE_EV:.3f} eV "
          f"(mu E0 = {mu * e0 * HARTREE_EV:.3f} eV)")

print("\nnet photon budget of the two pathways:")
print("  3-photon absorption at the inner crossing opens the dissociative")
print("  channel; stimulated re-emission of one photon at the outer")
print("  crossing returns the flux to the bound curve with 2 net photons.")
