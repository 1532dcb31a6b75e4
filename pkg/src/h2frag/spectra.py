"""Proton kinetic-energy-release spectra.

Two contributions on a common per-proton energy axis (eV):

* P_c, the Coulomb-explosion part, accumulated during the propagation.
  Each ionization loss from the two ion channels carries the energy
  E(R) = 1/(2R) hartree per proton (each fragment takes half of the 1/R
  repulsion).  A grid cell's probability is painted uniformly over the
  energy image of the cell, [E(R + dr/2), E(R - dr/2)], which conserves
  probability exactly, carries the 2R^2 Jacobian implicitly, and stays
  smooth even where the image of one radial cell spans many energy bins
  (a two-point deposit would leave comb artifacts there).

* P_diss, the photodissociation part, obtained at the end of the pulse
  by projecting the ion wave packets onto energy-normalized continuum
  states of their field-free potentials.

Both are stored as densities per eV; integrating P_c over the axis
returns the accumulated Coulomb-explosion population.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import EV_HARTREE, HARTREE_EV
from .dataset import MolecularDataset
from .grid import RadialGrid, WavePacket, norm2
from .states import BoundState, continuum_states, find_bound_levels


def map_R_to_energy(R):
    """Per-proton Coulomb-explosion energy in eV for ionization at R."""
    return HARTREE_EV / (2.0 * np.asarray(R, dtype=float)) \
        if np.ndim(R) else HARTREE_EV / (2.0 * R)


@dataclass
class Spectrum:
    e_axis: np.ndarray            # eV per proton, uniform
    P_c: np.ndarray
    P_diss: np.ndarray
    overflow: float = 0.0         # probability mapped beyond the axis
    _maps: dict = field(default_factory=dict, repr=False)

    @property
    def de(self) -> float:
        return float(self.e_axis[1] - self.e_axis[0])

    @property
    def P_total(self) -> np.ndarray:
        return self.P_c + self.P_diss

    def integral(self, density: np.ndarray) -> float:
        return float(np.sum(density) * self.de)


def new_spectrum(e_max_ev: float = 20.0, de_ev: float = 0.01) -> Spectrum:
    n = int(round(e_max_ev / de_ev)) + 1
    axis = de_ev * np.arange(n)
    return Spectrum(e_axis=axis, P_c=np.zeros(n), P_diss=np.zeros(n))


_SUBDIV = 8


def _deposit_map(spec: Spectrum, grid: RadialGrid):
    """Sparse pushforward matrix: cell probabilities -> axis densities.

    Each grid cell's probability is first spread over 8 sub-cells with
    piecewise-linear reconstruction of the radial density, then every
    sub-cell is painted uniformly over its energy image.  Columns are
    normalized so the mapping conserves probability exactly (the share
    of a column beyond the axis goes to the overflow vector instead).
    """
    key = (grid.n, grid.r_min, grid.r_max)
    if key not in spec._maps:
        from scipy.sparse import csr_matrix

        s = _SUBDIV
        de = spec.de
        n_bins = spec.e_axis.size
        e_edge_top = spec.e_axis[-1] + 0.5 * de
        # sub-cell centers across the whole grid extent
        rf = grid.r_min - 0.5 * grid.dr + grid.dr * (np.arange(grid.n * s) + 0.5) / s
        hi = map_R_to_energy(rf - 0.5 * grid.dr / s)
        lo = map_R_to_energy(rf + 0.5 * grid.dr / s)
        # linear spread: sub-cell f draws from cells floor(pos) and +1
        pos = (rf - grid.r[0]) / grid.dr
        i_lo = np.clip(np.floor(pos).astype(int), 0, grid.n - 1)
        i_hi = np.clip(i_lo + 1, 0, grid.n - 1)
        t = np.clip(pos - i_lo, 0.0, 1.0)
        rows, cols, vals = [], [], []
        ovf_rows, ovf_vals = [], []
        for f in range(grid.n * s):
            a, b = lo[f], hi[f]
            width = b - a
            pieces = ((i_lo[f], (1.0 - t[f]) / s), (i_hi[f], t[f] / s))
            if a >= e_edge_top:
                for col, wgt in pieces:
                    ovf_rows.append(col)
                    ovf_vals.append(wgt)
                continue
            over = 0.0
            if b > e_edge_top:
                over = (b - e_edge_top) / width
                b = e_edge_top
            j_lo = max(0, int(np.floor(a / de + 0.5)))
            j_hi = min(n_bins - 1, int(np.floor(b / de + 0.5)))
            j = np.arange(j_lo, j_hi + 1)
            overlap = np.clip(np.minimum(b, (j + 0.5) * de)
                              - np.maximum(a, (j - 0.5) * de), 0.0, None)
            frac = overlap / (width * de)
            for col, wgt in pieces:
                if wgt == 0.0:
                    continue
                rows.extend(j.tolist())
                cols.extend([col] * j.size)
                vals.extend((wgt * frac).tolist())
                if over > 0.0:
                    ovf_rows.append(col)
                    ovf_vals.append(wgt * over)
        push = csr_matrix((vals, (rows, cols)), shape=(n_bins, grid.n))
        ovf = np.zeros(grid.n)
        np.add.at(ovf, ovf_rows, ovf_vals)
        # exact conservation: push columns + overflow must sum to 1
        colsum = np.asarray(push.sum(axis=0)).ravel() * de + ovf
        fix = np.where(colsum > 0.0, 1.0 / colsum, 1.0)
        push = push @ csr_matrix((fix, (np.arange(grid.n), np.arange(grid.n))),
                                 shape=(grid.n, grid.n))
        ovf = ovf * fix
        spec._maps[key] = (push, ovf)
    return spec._maps[key]


def accumulate_ce(spec: Spectrum, psi_g: WavePacket, psi_u: WavePacket,
                  W_g: np.ndarray, W_u: np.ndarray, dt: float) -> Spectrum:
    """Add one time step of ion-channel ionization losses to P_c."""
    grid = psi_g.grid
    if psi_u.grid is not grid and (psi_u.grid.n, psi_u.grid.r_min) != (grid.n, grid.r_min):
        raise ValueError("packets live on different grids")
    w = (W_g * np.abs(psi_g.amp) ** 2 + W_u * np.abs(psi_u.amp) ** 2) * dt * grid.dr
    if np.any(w != 0.0):
        push, ovf = _deposit_map(spec, grid)
        spec.P_c += push @ w
        spec.overflow += float(ovf @ w)
    return spec


def dissociation_spectrum(psi_g: WavePacket, psi_u: WavePacket,
                          ds: MolecularDataset, e_axis_ev: np.ndarray,
                          refine: int = 4) -> np.ndarray:
    """Per-proton dissociation spectrum (1/eV) from end-of-pulse packets.

    Each axis point E corresponds to total fragment energy 2E above the
    atom + ion limit; the factor 2 (and the hartree -> eV change) turn
    the per-total-energy projection densities into per-proton-energy
    densities.  The two channels add incoherently.
    """
    grid = psi_g.grid
    mass = ds.reduced_mass
    e_axis_ev = np.asarray(e_axis_ev, dtype=float)
    out = np.zeros(e_axis_ev.size)
    live = e_axis_ev > 0.0
    if not np.any(live):
        return out
    e_tot = 2.0 * e_axis_ev[live] * EV_HARTREE

    for curve, psi in ((ds.V_g, psi_g), (ds.V_u, psi_u)):
        if norm2(psi) < 1e-30:
            continue
        v_inf = curve.asymptote if curve.extrap_high == "r4" else 0.0
        states = continuum_states(curve, grid, mass, v_inf + e_tot,
                                  channel=psi.channel, refine=refine)
        phi = np.stack([s.wavefunction for s in states])
        amp = phi @ psi.amp * grid.dr
        out[live] += np.abs(amp) ** 2
    out[live] *= 2.0 * EV_HARTREE
    return out


def total_spectrum(spec: Spectrum) -> np.ndarray:
    """Pointwise sum of the Coulomb-explosion and dissociation parts."""
    if spec.P_c.shape != spec.P_diss.shape:
        raise ValueError("spectrum components live on different axes")
    return spec.P_c + spec.P_diss


def dissociated_fraction(psi_g: WavePacket, psi_u: WavePacket,
                         ds: MolecularDataset,
                         bound_g: list[BoundState] | None = None) -> float:
    """Unbound share of the ion population: everything in the repulsive
    channel plus whatever in the gerade channel is orthogonal to all of
    its bound levels."""
    if bound_g is None:
        bound_g = find_bound_levels(ds.V_g, psi_g.grid, ds.reduced_mass)
    frac = norm2(psi_u) + norm2(psi_g)
    for b in bound_g:
        ov = np.sum(b.wavefunction.amp.real * psi_g.amp) * psi_g.grid.dr
        frac -= abs(ov) ** 2
    return float(frac)


def detect_peaks(e_axis: np.ndarray, density: np.ndarray,
                 window_bins: int = 3, floor_frac: float = 1e-4,
                 refine: bool = True) -> list[tuple[float, float]]:
    """Local maxima that dominate their +-window_bins neighborhood.

    Returns (energy, height) pairs in increasing energy; peaks below
    floor_frac of the global maximum are ignored.  With refine=True the
    position is sharpened by a centroid over the window, so peak shifts
    smaller than one bin remain visible.
    """
    y = np.asarray(density, dtype=float)
    n = y.size
    if n == 0 or np.all(y <= 0.0):
        return []
    floor = floor_frac * y.max()
    peaks = []
    w = window_bins
    for i in range(1, n - 1):
        if y[i] < floor:
            continue
        lo = max(0, i - w)
        hi = min(n, i + w + 1)
        if lo + int(np.argmax(y[lo:hi])) != i:
            continue
        above_left = lo == i or y[i] > y[lo]
        above_right = hi == i + 1 or y[i] > y[hi - 1]
        if not (above_left and above_right):
            continue
        e_pk = float(e_axis[i])
        if refine:
            seg = y[lo:hi] - min(y[lo], y[hi - 1])
            seg = np.clip(seg, 0.0, None)
            if seg.sum() > 0.0:
                e_pk = float(np.sum(e_axis[lo:hi] * seg) / seg.sum())
        peaks.append((e_pk, float(y[i])))
    return peaks


def main_peak(e_axis: np.ndarray, density: np.ndarray, e_lo: float = 0.0,
              e_hi: float | None = None, window_bins: int = 25
              ) -> tuple[float, float] | None:
    """Tallest refined peak inside [e_lo, e_hi]; None when nothing is there."""
    e_hi = e_hi if e_hi is not None else float(np.max(e_axis))
    sel = (e_axis >= e_lo) & (e_axis <= e_hi)
    if not np.any(sel):
        return None
    cands = detect_peaks(e_axis[sel], np.asarray(density)[sel],
                         window_bins=window_bins, floor_frac=0.5)
    if not cands:
        return None
    return max(cands, key=lambda p: p[1])
