import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from h2frag.dataset import CurveTable, eval_curve
from h2frag.grid import build_grid, observables
from h2frag.states import (NoSuchLevelError, continuum_state, continuum_states,
                           find_bound_levels, numerov_bound)

MASS = 918.0764
OMEGA_H = 0.02


def harmonic_curve(center=3.0):
    r = np.linspace(0.2, 6.5, 64)
    return CurveTable("harmonic", r, 0.5 * MASS * OMEGA_H**2 * (r - center) ** 2,
                      extrap_low="clamp", extrap_high="clamp")


def test_harmonic_ground_state():
    grid = build_grid(1.0, 5.0, 1024)
    b0 = numerov_bound(harmonic_curve(), grid, MASS, 0)
    assert abs(b0.energy - OMEGA_H / 2.0) < 1e-8
    assert b0.node_count == 0
    n2, mean_r = observables(b0.wavefunction)
    assert abs(n2 - 1.0) < 1e-10
    assert abs(mean_r - 3.0) < 1e-6


def test_harmonic_level_spacing():
    grid = build_grid(1.0, 5.0, 1024)
    b0 = numerov_bound(harmonic_curve(), grid, MASS, 0)
    b1 = numerov_bound(harmonic_curve(), grid, MASS, 1)
    assert b1.node_count == 1
    assert abs((b1.energy - b0.energy) - OMEGA_H) < 1e-6


def test_no_such_level():
    r = np.linspace(0.2, 6.5, 64)
    shallow = CurveTable("shallow", r, -1e-4 * np.exp(-(r - 3.0) ** 2),
                         extrap_low="clamp", extrap_high="clamp")
    grid = build_grid(1.0, 5.0, 512)
    with pytest.raises(NoSuchLevelError):
        numerov_bound(shallow, grid, MASS, 12)


def test_ground_state_sign_convention(ds, grid):
    b = numerov_bound(ds.V_H2, grid, ds.reduced_mass, 0)
    peak = np.argmax(np.abs(b.wavefunction.amp.real))
    assert b.wavefunction.amp.real[peak] > 0


def test_chi0_matches_diagonalization(ds):
    # independent oracle: dense-grid three-point matrix diagonalization
    dx = 0.005
    r = np.arange(0.3, 6.0, dx)
    v = np.asarray(eval_curve(ds.V_H2, r))
    diag = 1.0 / (ds.reduced_mass * dx * dx) + v
    off = -0.5 / (ds.reduced_mass * dx * dx) * np.ones(r.size - 1)
    e_ref = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0),
                             eigvals_only=True)[0]
    grid = build_grid(0.25, 0.25 + 1024 * 0.0056, 1024)
    b = numerov_bound(ds.V_H2, grid, ds.reduced_mass, 0)
    assert abs(b.energy - e_ref) < 1e-6


def test_chi0_mean_distance(ds, grid):
    b = numerov_bound(ds.V_H2, grid, ds.reduced_mass, 0)
    _, mean_r = observables(b.wavefunction)
    assert abs(mean_r - 1.4) < 0.1


def test_eigenvalue_grid_doubling(ds):
    g1 = build_grid(0.1, 40.0, 2048)
    g2 = build_grid(0.1, 40.0, 4096)
    e1 = numerov_bound(ds.V_H2, g1, ds.reduced_mass, 0).energy
    e2 = numerov_bound(ds.V_H2, g2, ds.reduced_mass, 0).energy
    assert abs(e1 - e2) < 1e-8


def test_ion_well_level_ladder(ds, grid):
    levels = find_bound_levels(ds.V_g, grid, ds.reduced_mass)
    assert 17 <= len(levels) <= 22
    energies = np.array([b.energy for b in levels])
    assert np.all(np.diff(energies) > 0)
    for v, b in enumerate(levels):
        assert b.node_count == v
    # anharmonic ladder: spacings shrink with v
    spacings = np.diff(energies)
    assert spacings[0] > spacings[5] > spacings[10]


def test_free_particle_continuum():
    n = 1024
    dr = 40.0 / n
    grid = build_grid(dr, dr + 40.0, n)
    flat = CurveTable("flat", np.linspace(0.01, 45.0, 32), np.zeros(32),
                      extrap_low="clamp", extrap_high="clamp")
    e = 0.02
    st = continuum_state(flat, grid, MASS, e, v_inf=0.0)
    k = np.sqrt(2.0 * MASS * e)
    assert abs(st.asymptotic_k - k) < 1e-12
    expected = np.sqrt(2.0 * MASS / (np.pi * k)) * np.sin(k * grid.r)
    assert np.abs(st.wavefunction - expected).max() < 2e-3 * np.abs(expected).max()
    assert abs(st.phase % np.pi) < 2e-3 or abs(st.phase % np.pi - np.pi) < 2e-3


def test_continuum_orthogonal_to_bound(ds, grid):
    b0 = numerov_bound(ds.V_g, grid, ds.reduced_mass, 0)
    st = continuum_state(ds.V_g, grid, ds.reduced_mass, -0.5 + 0.05)
    ov = np.sum(st.wavefunction * b0.wavefunction.amp.real) * grid.dr
    # normalize against the continuum amplitude scale over the packet region
    scale = np.abs(st.wavefunction).max()
    assert abs(ov) / scale < 1e-4


def test_delta_normalization(ds, grid):
    # smear <phi_E|phi_E'> over a narrow Gaussian in E'; the integral
    # over E' must come out as 1 (energy-normalization check)
    e0 = -0.5 + 0.04
    mass = ds.reduced_mass
    k0 = np.sqrt(2 * mass * 0.04)
    length = grid.r_max - grid.r_min
    sigma_k = 6.0 / length
    sigma_e = k0 * sigma_k / mass
    e_mesh = e0 + np.linspace(-6 * sigma_e, 6 * sigma_e, 1200)
    states = continuum_states(ds.V_g, grid, mass, e_mesh)
    phi0 = continuum_state(ds.V_g, grid, mass, e0).wavefunction
    overlaps = np.array([np.sum(phi0 * s.wavefunction) * grid.dr for s in states])
    weights = np.exp(-((e_mesh - e0) ** 2) / (2 * sigma_e**2))
    integral = np.trapezoid(overlaps * weights, e_mesh)
    assert abs(integral - 1.0) < 1e-2


def test_matching_window_stability(ds, grid):
    e = -0.5 + 0.08
    a = continuum_state(ds.V_g, grid, ds.reduced_mass, e)
    b = continuum_state(ds.V_g, grid, ds.reduced_mass, e, _window_shift=0.02)
    inner = grid.r < 20.0
    ratio = np.linalg.norm(b.wavefunction[inner]) / np.linalg.norm(a.wavefunction[inner])
    assert abs(ratio - 1.0) < 0.01


def test_continuum_below_threshold_rejected(ds, grid):
    with pytest.raises(ValueError):
        continuum_state(ds.V_g, grid, ds.reduced_mass, -0.6)
