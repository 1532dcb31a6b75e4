"""Field-dressed potential curves of the ion and their crossings.

In the photon-number picture a channel that has absorbed n photons is
shifted down by n times the photon energy, so the diabatic dressed
curves are V(R) - n w.  A one-photon-coupled (g, n_g) / (u, n_u) pair
(|n_g - n_u| odd) acquires the off-diagonal coupling mu(R) E0 / 2, and
the adiabatic curves are the eigenvalues of the resulting 2x2 matrix:
the diabatic crossing opens into an avoided crossing of gap mu(R*) E0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import MolecularDataset, eval_curve


@dataclass
class DressedCurves:
    R_axis: np.ndarray
    omega: float
    e0: float
    pair: tuple[int, int]            # (n_g, n_u) photon indices
    diabatic_g: np.ndarray           # V_g - n_g w
    diabatic_u: np.ndarray           # V_u - n_u w
    adiabatic_lower: np.ndarray
    adiabatic_upper: np.ndarray


def dressed_pair(ds: MolecularDataset, omega: float, e0: float,
                 n_g: int, n_u: int,
                 r_axis: np.ndarray | None = None) -> DressedCurves:
    """Diabatic and adiabatic dressed curves for one coupled pair."""
    if (n_g - n_u) % 2 == 0:
        raise ValueError("photon indices must differ by an odd count "
                         "(one-photon-coupled pair)")
    if r_axis is None:
        r_axis = np.linspace(0.5, 15.0, 1451)
    dia_g = np.asarray(eval_curve(ds.V_g, r_axis)) - n_g * omega
    dia_u = np.asarray(eval_curve(ds.V_u, r_axis)) - n_u * omega
    coupling = np.asarray(eval_curve(ds.mu_ug, r_axis)) * e0 / 2.0
    avg = 0.5 * (dia_g + dia_u)
    half_gap = np.hypot(0.5 * (dia_g - dia_u), coupling)
    return DressedCurves(R_axis=r_axis, omega=omega, e0=e0, pair=(n_g, n_u),
                         diabatic_g=dia_g, diabatic_u=dia_u,
                         adiabatic_lower=avg - half_gap,
                         adiabatic_upper=avg + half_gap)


def find_crossing(ds: MolecularDataset, omega: float, pair: tuple[int, int],
                  r_lo: float = 0.5, r_hi: float = 15.0,
                  tol: float = 1e-4) -> float:
    """Diabatic crossing of the (g, n_g)/(u, n_u) pair by bisection."""
    n_g, n_u = pair

    def gap(r: float) -> float:
        return (float(eval_curve(ds.V_u, r)) - n_u * omega
                - float(eval_curve(ds.V_g, r)) + n_g * omega)

    a, b = r_lo, r_hi
    fa, fb = gap(a), gap(b)
    if fa * fb > 0.0:
        raise ValueError(f"no diabatic crossing for pair {pair} in "
                         f"[{r_lo}, {r_hi}] bohr")
    while b - a > tol * 0.5:
        mid = 0.5 * (a + b)
        fm = gap(mid)
        if fa * fm <= 0.0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)
