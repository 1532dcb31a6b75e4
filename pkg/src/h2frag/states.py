"""Bound vibrational states and energy-normalized continuum states.

Bound levels come from Numerov shooting on the simulation grid:
node-count bisection brackets the level, then bisection on the
matching-point log-derivative discontinuity polishes the eigenvalue.

Continuum states integrate outward on a four-fold refined mesh and are
scaled to the energy-normalized asymptotic form
sqrt(2 m / (pi k)) * sin(k R + delta), with amplitude and phase fixed by
a two-point fit in the field-free tail of the grid.  With that
normalization |<phi_E|Psi>|^2 is a probability density per unit energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import CurveTable, eval_curve
from .grid import RadialGrid, WavePacket

_HUGE = 1e220
_MAX_FORBIDDEN_K2H2 = 2.25   # |k^2| h^2 cap for a safe Numerov start


class NoSuchLevelError(ValueError):
    """The requested vibrational level does not exist on this grid."""


@dataclass
class BoundState:
    energy: float
    wavefunction: WavePacket
    node_count: int


@dataclass
class ContinuumState:
    energy: float
    wavefunction: np.ndarray
    channel: str
    asymptotic_k: float
    phase: float


def _numerov_sweep(f: np.ndarray, y0: float, y1: float, forward: bool) -> np.ndarray:
    """March y'' = -k2 y with f = 1 + h^2 k2 / 12, rescaling on overflow."""
    n = f.size
    y = np.empty(n)
    if forward:
        y[0], y[1] = y0, y1
        for i in range(2, n):
            y[i] = ((12.0 - 10.0 * f[i - 1]) * y[i - 1] - f[i - 2] * y[i - 2]) / f[i]
            if abs(y[i]) > _HUGE:
                y[: i + 1] *= 1e-220
    else:
        y[-1], y[-2] = y0, y1
        for i in range(n - 3, -1, -1):
            y[i] = ((12.0 - 10.0 * f[i + 1]) * y[i + 1] - f[i + 2] * y[i + 2]) / f[i]
            if abs(y[i]) > _HUGE:
                y[i:] *= 1e-220
    return y


def _shoot_bound(V: np.ndarray, dx: float, mass: float, E: float):
    """One shot at energy E: (node count, log-derivative mismatch, y or None)."""
    k2 = 2.0 * mass * (E - V)
    f = 1.0 + dx * dx / 12.0 * k2
    allowed = np.nonzero(k2 > 0.0)[0]
    if allowed.size == 0:
        return 0, None, None
    im = int(np.clip(allowed[-1], 4, V.size - 5))

    y_out = _numerov_sweep(f[: im + 3], 0.0, 1e-160, forward=True)
    nodes = int(np.sum(y_out[1:im] * y_out[2:im + 1] < 0.0))
    y_in = _numerov_sweep(f[im - 2:], 0.0, 1e-160, forward=False)

    def d4(w, i):
        return (-w[i + 2] + 8.0 * w[i + 1] - 8.0 * w[i - 1] + w[i - 2]) / (12.0 * dx)

    if y_out[im] == 0.0 or y_in[2] == 0.0:
        return nodes, np.inf, (y_out, y_in, im)
    mism = d4(y_out, im) / y_out[im] - d4(y_in, 2) / y_in[2]
    return nodes, mism, (y_out, y_in, im)


def _refine_level(V: np.ndarray, dx: float, mass: float, v: int,
                  lo: float, hi: float) -> float:
    """Polish the eigenvalue inside a node-true bracket: Ridders on the
    log-derivative mismatch, bisection fallback when the bracket is odd."""
    def mm_at(E: float) -> float:
        nodes, mm, _ = _shoot_bound(V, dx, mass, E)
        if not np.isfinite(mm):
            return np.inf
        # treat a wrong node count as a huge mismatch of the matching side
        if nodes > v:
            return -abs(mm) - 1e6
        if nodes < v:
            return abs(mm) + 1e6
        return mm

    fa, fb = mm_at(lo), mm_at(hi)
    a, b = lo, hi
    if np.isfinite(fa) and np.isfinite(fb) and fa * fb < 0.0:
        for _ in range(80):
            c = 0.5 * (a + b)
            fc = mm_at(c)
            s = np.sqrt(fc * fc - fa * fb)
            if s == 0.0 or not np.isfinite(s):
                break
            d = c + (c - a) * np.sign(fa - fb) * fc / s
            if not (a < d < b):
                d = c
            fd = mm_at(d)
            if fd == 0.0 or b - a < 1e-14 * max(1.0, abs(a)):
                return d
            # keep the sign change
            if fc * fd < 0.0:
                a, fa, b, fb = (c, fc, d, fd) if c < d else (d, fd, c, fc)
            elif fa * fd < 0.0:
                b, fb = d, fd
            else:
                a, fa = d, fd
            if b - a < 1e-14 * max(1.0, abs(a)):
                return 0.5 * (a + b)
        return 0.5 * (a + b)
    # fallback: plain bisection on the too-high predicate
    for _ in range(80):
        mid = 0.5 * (a + b)
        nodes, mm, _ = _shoot_bound(V, dx, mass, mid)
        th = nodes > v or (nodes == v and np.isfinite(mm) and mm < 0.0)
        if th:
            b = mid
        else:
            a = mid
        if b - a < 1e-14 * max(1.0, abs(a)):
            break
    return 0.5 * (a + b)


def numerov_bound(potential: CurveTable, grid: RadialGrid, mass: float,
                  v: int = 0, channel: str = "g") -> BoundState:
    """v-th bound level of the potential on the grid, unit normalized,
    with the inner lobe taken positive."""
    V = np.asarray(eval_curve(potential, grid.r), dtype=float)
    dx = grid.dr
    e_lo = float(V.min()) + 1e-14
    e_top = float(min(V[0], V[-1])) - 1e-12
    if e_top <= e_lo:
        raise NoSuchLevelError("potential supports no bound region on this grid")

    # bisection on (node count, mismatch sign): the v-th eigenvalue is the
    # boundary where the outward solution either gains node v+1 or its
    # log-derivative mismatch at the turning point changes sign
    def too_high(E: float) -> bool:
        nodes, mm, _ = _shoot_bound(V, dx, mass, E)
        if nodes != v:
            return nodes > v
        return bool(np.isfinite(mm) and mm < 0.0)

    nodes_top, _, _ = _shoot_bound(V, dx, mass, e_top)
    if nodes_top <= v and not too_high(e_top):
        raise NoSuchLevelError(f"no level with v = {v} below the grid threshold")
    lo, hi = e_lo, e_top
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        if too_high(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-6:
            break
    if _shoot_bound(V, dx, mass, lo)[0] != v:
        raise NoSuchLevelError(f"level v = {v} not bracketed (grid too coarse?)")
    energy = _refine_level(V, dx, mass, v, lo, hi)

    nodes, mism, parts = _shoot_bound(V, dx, mass, energy)
    if parts is None or not np.isfinite(mism):
        raise RuntimeError("bound-state refinement did not converge")
    y_out, y_in, im = parts
    y = np.empty(V.size)
    y[: im + 1] = y_out[: im + 1] / y_out[im]
    y[im:] = y_in[2:] / y_in[2]
    y /= np.sqrt(np.sum(y * y) * dx)
    first = int(np.argmax(np.abs(y) > 0.1 * np.abs(y).max()))
    if y[first] < 0.0:
        y = -y
    node_count = int(np.sum((y[:-1] * y[1:] < 0.0)
                            & (np.abs(y[:-1]) > 1e-8 * np.abs(y).max())))
    wp = WavePacket(grid, y.astype(np.complex128), channel)
    return BoundState(energy=energy, wavefunction=wp, node_count=node_count)


def find_bound_levels(potential: CurveTable, grid: RadialGrid, mass: float,
                      v_max: int = 80) -> list[BoundState]:
    """All bound levels the grid supports, in increasing v."""
    levels: list[BoundState] = []
    for v in range(v_max + 1):
        try:
            levels.append(numerov_bound(potential, grid, mass, v))
        except NoSuchLevelError:
            break
    return levels


def _fine_mesh(grid: RadialGrid, refine: int):
    """Refined mesh reaching from (almost) the origin to r_max."""
    h = grid.dr / refine
    j0 = int(np.floor(grid.r_min / h + 1e-12))
    n_fine = j0 + refine * grid.n
    r = grid.r_min + (np.arange(n_fine) - j0) * h
    return r, h, j0


def continuum_states(potential: CurveTable, grid: RadialGrid, mass: float,
                     energies: np.ndarray, channel: str = "g",
                     v_inf: float | None = None, refine: int = 4,
                     _window_shift: float = 0.0) -> list[ContinuumState]:
    """Energy-normalized scattering states for every energy (total energy,
    hartree, absolute: must lie above the channel asymptote).

    All energies integrate in lockstep on the refined mesh; the
    amplitude/phase fit uses two points in the field-free tail window
    (last 20% of the grid).
    """
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    if v_inf is None:
        v_inf = (potential.asymptote if potential.extrap_high == "r4"
                 else float(eval_curve(potential, grid.r_max)))
    if np.any(energies <= v_inf):
        raise ValueError("continuum energies must lie above the channel asymptote")
    k = np.sqrt(2.0 * mass * (energies - v_inf))

    r_fine, h, j0 = _fine_mesh(grid, refine)
    V = np.asarray(eval_curve(potential, np.maximum(r_fine, 1e-8)), dtype=float)

    # fit window: tail of the grid, and the potential must be flat there
    win_start = grid.r_min + 0.8 * (grid.r_max - grid.r_min)
    win_start += _window_shift * (grid.r_max - grid.r_min)
    iw = np.nonzero(grid.r >= win_start)[0]
    if iw.size < 8 or np.any(np.abs(np.asarray(eval_curve(potential, grid.r[iw]))
                                    - v_inf) > 1e-4):
        raise ValueError("asymptotic window is not field-free flat; enlarge the grid")

    # common safe start: innermost point that is not catastrophically forbidden
    # for the lowest energy
    k2_min = 2.0 * mass * (energies.min() - V)
    ok = k2_min * h * h > -_MAX_FORBIDDEN_K2H2
    if not np.any(ok):
        raise ValueError("no startable region for the continuum integration")
    i_start = int(np.argmax(ok))

    ne = energies.size
    k2 = 2.0 * mass * (energies[:, None] - V[None, i_start:])
    f = 1.0 + h * h / 12.0 * k2
    n_march = f.shape[1]

    y_ds = np.zeros((ne, grid.n))
    y_prev = np.zeros(ne)
    y_cur = np.full(ne, 1e-18)

    def maybe_store(i_abs, col):
        rel = i_abs - j0
        if rel >= 0 and rel % refine == 0:
            idx = rel // refine
            if idx < grid.n:
                y_ds[:, idx] = col

    maybe_store(i_start, y_prev * 0.0)
    maybe_store(i_start + 1, y_cur)
    for i in range(2, n_march):
        y_next = ((12.0 - 10.0 * f[:, i - 1]) * y_cur - f[:, i - 2] * y_prev) / f[:, i]
        big = np.abs(y_next) > _HUGE
        if np.any(big):
            y_next[big] *= 1e-220
            y_cur[big] *= 1e-220
            y_ds[big, :] *= 1e-220
        y_prev, y_cur = y_cur, y_next
        maybe_store(i_start + i, y_cur)

    # two-point amplitude/phase fit on down-sampled tail points
    ia = iw[0]
    span = np.clip(np.rint(0.5 * np.pi / (k * grid.dr)).astype(int), 1, iw.size - 2)
    ib = np.minimum(ia + span, grid.n - 1)
    ra, rb = grid.r[ia], grid.r[ib]
    ya = y_ds[:, ia]
    yb = y_ds[np.arange(ne), ib]
    det = np.sin(k * (rb - ra))
    bad = np.abs(det) < 0.05
    if np.any(bad):  # nudge the second point off a node of the determinant
        ib = np.where(bad, np.minimum(ia + np.maximum(span // 2, 1), grid.n - 1), ib)
        rb = grid.r[ib]
        yb = y_ds[np.arange(ne), ib]
        det = np.sin(k * (rb - ra))
    a_coef = (ya * np.cos(k * rb) - yb * np.cos(k * ra)) / det
    b_coef = (yb * np.sin(k * ra) - ya * np.sin(k * rb)) / det
    amp = np.hypot(a_coef, b_coef)
    target = np.sqrt(2.0 * mass / (np.pi * k))
    scale = target / amp
    phase = np.arctan2(b_coef, a_coef)
    y_ds *= scale[:, None]

    return [ContinuumState(energy=float(energies[i]), wavefunction=y_ds[i],
                           channel=channel, asymptotic_k=float(k[i]),
                           phase=float(phase[i]))
            for i in range(ne)]


def continuum_state(potential: CurveTable, grid: RadialGrid, mass: float,
                    E: float, channel: str = "g", **kw) -> ContinuumState:
    return continuum_states(potential, grid, mass, np.array([E]), channel, **kw)[0]
