"""Coupled-channel time evolution of the four-channel system.

Each time step of length dt executes, in order:

  1. ionization loss on the neutral at the field E(t), recording the
     lost probability dP,
  2. split-operator propagation of the neutral on its ground curve,
  3. population gain into the gerade ion channel, built from the
     time-t neutral packet and phase-adjusted so the gain equals dP
     exactly (the ungerade packet is untouched: the neutral ionizes
     into the ion ground state only),
  4. coupled two-channel split-operator propagation of the ion packets
     with the radiative coupling -mu(R) E(t + dt/2),
  5. ionization losses on both ion channels at E(t + dt), feeding the
     accumulated Coulomb-explosion distribution and spectrum.

The kinetic factors exp(-i k^2 dt / (4 m)) act in momentum space; the
2x2 potential factor is applied through its exact exponential at every
grid point.  Setting frozen=True replaces the kinetic factors with the
identity everywhere, which suppresses all transport of probability
density between grid points while keeping the R-resolved ionization and
the g/u radiative coupling intact.

Channel bookkeeping is exact by construction: the gain matches the
neutral's loss, the ion losses accumulate into the Coulomb channel, so
pop_H2 + pop_g + pop_u + pop_CE stays at 1 to rounding; simulate()
aborts if it ever drifts beyond 1e-8.
"""

from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass, field

import numpy as np

from .dataset import MolecularDataset, eval_curve
from .grid import RadialGrid, WavePacket, absorbing_mask, mean_r_or_nan, norm2, zero_packet
from .rates import (GridRateLookup, PulseParams, RateModel, RateTable,
                    cached_rate_table, pulse_field)
from .spectra import Spectrum, accumulate_ce, new_spectrum
from .states import numerov_bound

BOUNDARY_FLUX_LIMIT = 1e-4


class SimulationError(RuntimeError):
    """Channel bookkeeping broke down (see message for diagnostics)."""


def default_models(f_floor: float = 1e-4) -> dict[str, RateModel]:
    return {"H2": RateModel(z_res=1, f_floor=f_floor),
            "g": RateModel(z_res=2, f_floor=f_floor),
            "u": RateModel(z_res=2, f_floor=f_floor)}


# -- elementary operations ---------------------------------------------------

def apply_loss(wp: WavePacket, W_of_R: np.ndarray, dt: float) -> tuple[WavePacket, float]:
    """Pointwise survival factor (1 - W dt)^(1/2); returns the lost
    probability (positive).  W dt >= 1 clamps the survival at zero."""
    eff = W_of_R * dt
    clamped = eff > 1.0
    if np.any(clamped):
        _warnings.warn("rate-step overflow: W dt >= 1 clamped at full depletion")
        eff = np.minimum(eff, 1.0)
    dens = np.abs(wp.amp) ** 2
    dp = float(np.sum(dens * eff) * wp.grid.dr)
    out = wp.copy()
    out.amp *= np.sqrt(1.0 - eff)
    return out, dp


def _gain_phase(psi_amp: np.ndarray, b: np.ndarray, dr: float) -> complex:
    """Global phase for the ionized slice making <psi|b> purely imaginary.

    The population constraint fixes only |alpha|; the slice's global
    phase is free (no reported observable depends on it).  Solving the
    quadratic for a real alpha instead blows up whenever the slice
    arrives out of phase with the accumulated packet while the target
    gain is small (alpha ~ 2|<psi|b>|/dP, unbounded as dt -> 0), so the
    phase is spent on removing the cross term: alpha = 1 exactly and
    the channel gains exactly ||b||^2.
    """
    ov = complex(np.sum(np.conj(psi_amp) * b) * dr)
    if abs(ov) == 0.0:
        return 1.0 + 0.0j
    return 1j * np.conj(ov) / abs(ov)


def apply_gain(psi_g: WavePacket, psi_h2: WavePacket, W_h2: np.ndarray,
               dt: float, dp_target: float) -> WavePacket:
    """Add the freshly ionized amplitude alpha sqrt(W dt) Psi_H2 (times a
    phase) to the gerade channel so that it gains exactly dp_target."""
    if dp_target < 0.0:
        raise ValueError("gain target must be non-negative")
    out = psi_g.copy()
    if dp_target == 0.0:
        return out
    b = -1j * np.sqrt(np.minimum(W_h2 * dt, 1.0)) * psi_h2.amp
    dr = psi_g.grid.dr
    nb2 = float(np.sum(np.abs(b) ** 2) * dr)
    if nb2 <= 0.0:
        raise ValueError("no source amplitude to build the gain from")
    out.amp += np.sqrt(dp_target / nb2) * _gain_phase(psi_g.amp, b, dr) * b
    return out


def split_step_single(wp: WavePacket, V: np.ndarray, dt: float, mass: float,
                      frozen: bool = False) -> WavePacket:
    """Symmetric kinetic-half / potential / kinetic-half step."""
    out = wp.copy()
    if frozen:
        out.amp *= np.exp(-1j * V * dt)
        return out
    kin = np.exp(-1j * wp.grid.k ** 2 * dt / (4.0 * mass))
    amp = np.fft.ifft(kin * np.fft.fft(out.amp))
    amp *= np.exp(-1j * V * dt)
    out.amp = np.fft.ifft(kin * np.fft.fft(amp))
    return out


def _coupled_potential_step(ag, au, avg_phase, delta, v_ug, dt):
    """Exact exponential of the symmetric 2x2 potential matrix."""
    omega = np.hypot(delta, v_ug)
    theta = omega * dt
    c = np.cos(theta)
    s = dt * np.sinc(theta / np.pi)   # sin(theta)/omega, finite at omega -> 0
    new_g = avg_phase * (c * ag - 1j * s * (delta * ag + v_ug * au))
    new_u = avg_phase * (c * au - 1j * s * (v_ug * ag - delta * au))
    return new_g, new_u


def split_step_coupled(psi_g: WavePacket, psi_u: WavePacket,
                       V_g: np.ndarray, V_u: np.ndarray, V_ug: np.ndarray,
                       dt: float, mass: float, frozen: bool = False
                       ) -> tuple[WavePacket, WavePacket]:
    """Coupled two-channel step: kinetic halves act on each channel
    independently, the potential factor mixes them exactly."""
    g = psi_g.copy()
    u = psi_u.copy()
    avg_phase = np.exp(-1j * 0.5 * (V_g + V_u) * dt)
    delta = 0.5 * (V_g - V_u)
    if not frozen:
        kin = np.exp(-1j * psi_g.grid.k ** 2 * dt / (4.0 * mass))
        g.amp = np.fft.ifft(kin * np.fft.fft(g.amp))
        u.amp = np.fft.ifft(kin * np.fft.fft(u.amp))
    g.amp, u.amp = _coupled_potential_step(g.amp, u.amp, avg_phase, delta,
                                           np.asarray(V_ug, dtype=float), dt)
    if not frozen:
        g.amp = np.fft.ifft(kin * np.fft.fft(g.amp))
        u.amp = np.fft.ifft(kin * np.fft.fft(u.amp))
    return g, u


# -- stepping machinery -------------------------------------------------------

@dataclass
class StepConfig:
    dt: float
    mass: float
    frozen: bool
    v_h2: np.ndarray
    v_g: np.ndarray
    v_u: np.ndarray
    mu: np.ndarray
    lookups: dict[str, GridRateLookup]
    absorber: np.ndarray | None = None
    rate_field: str = "instantaneous"   # or "envelope"
    # precomputed step factors
    exp_v_h2: np.ndarray = field(default=None, repr=False)
    exp_kin_half: np.ndarray = field(default=None, repr=False)
    avg_phase: np.ndarray = field(default=None, repr=False)
    delta_gu: np.ndarray = field(default=None, repr=False)

    def prepare(self, grid: RadialGrid) -> "StepConfig":
        self.exp_v_h2 = np.exp(-1j * self.v_h2 * self.dt)
        self.exp_kin_half = (np.ones(grid.n) if self.frozen
                             else np.exp(-1j * grid.k ** 2 * self.dt / (4.0 * self.mass)))
        self.avg_phase = np.exp(-1j * 0.5 * (self.v_g + self.v_u) * self.dt)
        self.delta_gu = 0.5 * (self.v_g - self.v_u)
        return self


def make_step_config(ds: MolecularDataset, grid: RadialGrid, pulse: PulseParams,
                     frozen: bool = False,
                     models: dict[str, RateModel] | None = None,
                     tables: dict[str, RateTable] | None = None,
                     f_max: float | None = None,
                     absorber: bool = False,
                     rate_field: str = "instantaneous") -> StepConfig:
    models = models or default_models()
    f_max = f_max if f_max is not None else pulse.e0 * (1.0 + 1e-9)
    if tables is None:
        tables = {sp: cached_rate_table(ds, sp, pulse.omega, models[sp], f_max,
                                        r_axis=grid.r)
                  for sp in ("H2", "g", "u")}
    for sp, tab in tables.items():
        if not tab.covers(pulse.e0):
            raise ValueError(f"rate table for {sp!r} does not cover the peak field")
        if abs(tab.omega - pulse.omega) > 1e-12:
            raise ValueError(f"rate table for {sp!r} was built for another carrier")
    lookups = {sp: GridRateLookup(tab, grid.r) for sp, tab in tables.items()}
    cfg = StepConfig(dt=pulse.dt, mass=ds.reduced_mass, frozen=frozen,
                     v_h2=np.asarray(eval_curve(ds.V_H2, grid.r)),
                     v_g=np.asarray(eval_curve(ds.V_g, grid.r)),
                     v_u=np.asarray(eval_curve(ds.V_u, grid.r)),
                     mu=np.asarray(eval_curve(ds.mu_ug, grid.r)),
                     lookups=lookups,
                     absorber=absorbing_mask(grid) if absorber else None,
                     rate_field=rate_field)
    return cfg.prepare(grid)


@dataclass
class SimulationState:
    t: float
    step_index: int
    psi_H2: WavePacket
    psi_g: WavePacket
    psi_u: WavePacket
    P_vib_accum: np.ndarray
    spectrum: Spectrum
    pop_H2: float = 1.0
    pop_g: float = 0.0
    pop_u: float = 0.0
    pop_CE: float = 0.0
    absorbed: float = 0.0
    clamp_events: int = 0
    trace: list = field(default_factory=list)

    def populations(self) -> tuple[float, float, float, float]:
        return self.pop_H2, self.pop_g, self.pop_u, self.pop_CE


def _fft_sandwich(amp: np.ndarray, kin: np.ndarray) -> np.ndarray:
    return np.fft.ifft(kin * np.fft.fft(amp))


def step(state: SimulationState, cfg: StepConfig, pulse: PulseParams) -> SimulationState:
    """Advance one dt (see module docstring for the stage ordering)."""
    dt = cfg.dt
    t = state.t
    dr = state.psi_H2.grid.dr
    e_t = pulse_field(pulse, t)
    e_mid = pulse_field(pulse, t + 0.5 * dt)
    e_next = pulse_field(pulse, t + dt)
    if cfg.rate_field == "envelope":
        f_t = pulse.e0 * np.sin(np.pi * t / pulse.t_f) ** 2
        f_next = pulse.e0 * np.sin(np.pi * (t + dt) / pulse.t_f) ** 2
    else:
        f_t, f_next = abs(e_t), abs(e_next)

    amp_h2 = state.psi_H2.amp
    dp_h2 = 0.0
    if state.pop_H2 > 1e-18:
        w_h2 = cfg.lookups["H2"].at_field(f_t)
        eff = w_h2 * dt
        if eff.max() > 1.0:
            state.clamp_events += 1
            np.minimum(eff, 1.0, out=eff)
        src = np.sqrt(eff) * amp_h2          # the time-t packet feeds the gain
        dp_h2 = float(np.sum(eff * np.abs(amp_h2) ** 2) * dr)
        amp_h2 *= np.sqrt(1.0 - eff)
        if cfg.frozen:
            amp_h2 *= cfg.exp_v_h2
        else:
            amp_h2 = _fft_sandwich(amp_h2, cfg.exp_kin_half)
            amp_h2 *= cfg.exp_v_h2
            amp_h2 = _fft_sandwich(amp_h2, cfg.exp_kin_half)
        state.psi_H2.amp = amp_h2
        if dp_h2 > 0.0:
            b = -1j * src
            state.psi_g.amp += _gain_phase(state.psi_g.amp, b, dr) * b

    if state.pop_g + state.pop_u > 0.0 or dp_h2 > 0.0:
        ag, au = state.psi_g.amp, state.psi_u.amp
        if not cfg.frozen:
            ag = _fft_sandwich(ag, cfg.exp_kin_half)
            au = _fft_sandwich(au, cfg.exp_kin_half)
        v_ug = -cfg.mu * e_mid
        ag, au = _coupled_potential_step(ag, au, cfg.avg_phase, cfg.delta_gu, v_ug, dt)
        if not cfg.frozen:
            ag = _fft_sandwich(ag, cfg.exp_kin_half)
            au = _fft_sandwich(au, cfg.exp_kin_half)

        w_g = cfg.lookups["g"].at_field(f_next)
        w_u = cfg.lookups["u"].at_field(f_next)
        eff_g = w_g * dt
        eff_u = w_u * dt
        if max(eff_g.max(), eff_u.max()) > 1.0:
            state.clamp_events += 1
            np.minimum(eff_g, 1.0, out=eff_g)
            np.minimum(eff_u, 1.0, out=eff_u)
        dens_g = np.abs(ag) ** 2
        dens_u = np.abs(au) ** 2
        vib = eff_g * dens_g + eff_u * dens_u
        state.P_vib_accum += vib
        accumulate_ce(state.spectrum,
                      WavePacket(state.psi_g.grid, ag, "g"),
                      WavePacket(state.psi_u.grid, au, "u"),
                      eff_g / dt, eff_u / dt, dt)
        state.pop_CE += float(np.sum(vib) * dr)
        ag = ag * np.sqrt(1.0 - eff_g)
        au = au * np.sqrt(1.0 - eff_u)
        state.psi_g.amp = ag
        state.psi_u.amp = au

    if cfg.absorber is not None:
        for wp in (state.psi_H2, state.psi_g, state.psi_u):
            before = norm2(wp)
            wp.amp *= cfg.absorber
            state.absorbed += before - norm2(wp)

    state.pop_H2 = norm2(state.psi_H2)
    state.pop_g = norm2(state.psi_g)
    state.pop_u = norm2(state.psi_u)
    state.t = t + dt
    state.step_index += 1

    total = state.pop_H2 + state.pop_g + state.pop_u + state.pop_CE + state.absorbed
    if not np.isfinite(total) or abs(total - 1.0) > 1e-8:
        raise SimulationError(
            f"channel sum drifted to {total:.12f} at step {state.step_index} "
            f"(t = {state.t:.3f}): H2={state.pop_H2:.3e} g={state.pop_g:.3e} "
            f"u={state.pop_u:.3e} CE={state.pop_CE:.3e} absorbed={state.absorbed:.3e}")
    return state


# -- full runs ----------------------------------------------------------------

@dataclass
class SimulationSetup:
    ds: MolecularDataset
    pulse: PulseParams
    grid: RadialGrid
    frozen: bool = False
    models: dict[str, RateModel] | None = None
    tables: dict[str, RateTable] | None = None
    e_max_ev: float = 20.0
    de_ev: float = 0.01
    trace_stride: int = 10
    absorber: bool = False
    f_max: float | None = None
    rate_field: str = "instantaneous"


@dataclass
class SimulationResult:
    setup: SimulationSetup
    times: np.ndarray
    field_over_e0: np.ndarray
    pops: dict[str, np.ndarray]
    mean_r_g: np.ndarray
    final_pops: dict[str, float]
    psi_H2: WavePacket
    psi_g: WavePacket
    psi_u: WavePacket
    P_vib_accum: np.ndarray
    spectrum: Spectrum
    clamp_events: int
    absorbed: float
    warnings: list[str]


def initial_state(setup: SimulationSetup) -> SimulationState:
    """Ground vibrational state of the neutral; empty everywhere else."""
    chi0 = numerov_bound(setup.ds.V_H2, setup.grid, setup.ds.reduced_mass, 0,
                         channel="H2")
    psi_h2 = chi0.wavefunction
    return SimulationState(
        t=0.0, step_index=0, psi_H2=psi_h2,
        psi_g=zero_packet(setup.grid, "g"), psi_u=zero_packet(setup.grid, "u"),
        P_vib_accum=np.zeros(setup.grid.n),
        spectrum=new_spectrum(setup.e_max_ev, setup.de_ev))


def simulate(setup: SimulationSetup) -> SimulationResult:
    """Run the full pulse from the ground-state initial condition."""
    cfg = make_step_config(setup.ds, setup.grid, setup.pulse, frozen=setup.frozen,
                           models=setup.models, tables=setup.tables,
                           f_max=setup.f_max, absorber=setup.absorber,
                           rate_field=setup.rate_field)
    state = initial_state(setup)
    warns: list[str] = []
    if setup.absorber:
        warns.append("absorbing mask on: the end-of-pulse continuum projection "
                     "misses whatever flux the mask removed")

    rows = []

    e0_scale = setup.pulse.e0 if setup.pulse.e0 > 0.0 else 1.0

    def record():
        e = pulse_field(setup.pulse, state.t)
        rows.append((state.t, e / e0_scale, state.pop_H2, state.pop_g,
                     state.pop_u, state.pop_CE, mean_r_or_nan(state.psi_g)))

    record()
    n_steps = setup.pulse.n_steps
    for i in range(n_steps):
        step(state, cfg, setup.pulse)
        if state.step_index % setup.trace_stride == 0 or i == n_steps - 1:
            record()

    edge = max(abs(state.psi_g.amp[-1]), abs(state.psi_u.amp[-1]),
               abs(state.psi_H2.amp[-1]))
    if edge > BOUNDARY_FLUX_LIMIT:
        warns.append(f"outgoing flux reached the grid edge (|amp| = {edge:.2e} "
                     f"at r_max); enlarge the grid for converged spectra")
    if state.clamp_events:
        warns.append(f"rate-step overflow clamped on {state.clamp_events} steps")

    arr = np.array(rows)
    pops = {"H2": arr[:, 2], "g": arr[:, 3], "u": arr[:, 4], "CE": arr[:, 5]}
    final = {"H2": state.pop_H2, "g": state.pop_g, "u": state.pop_u,
             "CE": state.pop_CE}
    return SimulationResult(setup=setup, times=arr[:, 0], field_over_e0=arr[:, 1],
                            pops=pops, mean_r_g=arr[:, 6], final_pops=final,
                            psi_H2=state.psi_H2, psi_g=state.psi_g,
                            psi_u=state.psi_u, P_vib_accum=state.P_vib_accum,
                            spectrum=state.spectrum,
                            clamp_events=state.clamp_events,
                            absorbed=state.absorbed, warnings=warns)
