"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one ACCEPTANCE line with the criterion verdict before
asserting, so a full run (pytest tests/test_acceptance.py -v -s) shows
the complete scoreboard even when individual criteria fail.

Scenario runs are cached at session scope; the whole suite finishes in
a few minutes on a laptop-class machine.
"""

import time

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal
from scipy.signal import find_peaks

from h2frag.constants import HARTREE_EV
from h2frag.dataset import eval_curve, load_dataset
from h2frag.dressed import dressed_pair, find_crossing
from h2frag.grid import WavePacket, build_grid, norm2, zero_packet
from h2frag.propagate import (SimulationSetup, default_models, simulate,
                              split_step_coupled, split_step_single)
from h2frag.rates import (RateModel, cached_rate_table, keldysh,
                          make_pulse, ppt_rate, pulse_field, structure_c2)
from h2frag.spectra import dissociation_spectrum, main_peak
from h2frag.states import numerov_bound

DS = load_dataset()
GRID = build_grid(0.1, 40.0, 2048)
W266 = make_pulse(266.0, 1e15, 1).omega
W800 = make_pulse(800.0, 1e15, 1).omega
_CACHE: dict = {}


def run_scenario(wavelength_nm, intensity, cycles, frozen=False,
                 steps_per_cycle=1000, n_points=2048, with_diss=False,
                 tables=None, f_max=None, trace_stride=10):
    key = (wavelength_nm, intensity, cycles, frozen, steps_per_cycle,
           n_points, with_diss, trace_stride)
    if key in _CACHE:
        return _CACHE[key]
    grid = GRID if n_points == 2048 else build_grid(0.1, 40.0, n_points)
    setup = SimulationSetup(
        ds=DS, pulse=make_pulse(wavelength_nm, intensity, cycles,
                                steps_per_cycle),
        grid=grid, frozen=frozen, tables=tables, f_max=f_max,
        trace_stride=trace_stride)
    res = simulate(setup)
    if with_diss:
        res.spectrum.P_diss = dissociation_spectrum(res.psi_g, res.psi_u, DS,
                                                    res.spectrum.e_axis)
    _CACHE[key] = res
    return res


def report(cid: str, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {cid}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {cid}: {detail}"


def subchecks(pairs):
    """[(ok, label)] -> (all_ok, 'label1 ok; label2 FAIL(...)')"""
    parts = []
    for ok, label in pairs:
        parts.append(f"{label}[{'ok' if ok else 'FAIL'}]")
    return all(ok for ok, _ in pairs), "; ".join(parts)


# -- criterion 1: unitarity and conservation ---------------------------------

def test_criterion_1_conservation():
    t0 = time.perf_counter()
    # zero-rate coupled propagation stays unitary over 1000 steps
    rng = np.random.default_rng(11)
    g = WavePacket(GRID, (rng.normal(size=GRID.n)
                          + 1j * rng.normal(size=GRID.n)).astype(complex), "g")
    g.amp /= np.sqrt(norm2(g))
    u = WavePacket(GRID, np.exp(-((GRID.r - 3.0) ** 2)).astype(complex), "u")
    u.amp *= 0.6 / np.sqrt(norm2(u))
    v_g = np.asarray(eval_curve(DS.V_g, GRID.r))
    v_u = np.asarray(eval_curve(DS.V_u, GRID.r))
    mu = np.asarray(eval_curve(DS.mu_ug, GRID.r))
    pulse = make_pulse(266.0, 1e15, 1)
    total0 = norm2(g) + norm2(u)
    for i in range(1000):
        v_ug = -mu * pulse_field(pulse, (i + 0.5) * pulse.dt)
        g, u = split_step_coupled(g, u, v_g, v_u, v_ug, pulse.dt,
                                  DS.reduced_mass)
    drift = abs(norm2(g) + norm2(u) - total0)

    res = run_scenario(266.0, 1e15, 1)
    channel_residual = abs(sum(res.final_pops.values()) - 1.0)
    pc_int = res.spectrum.integral(res.spectrum.P_c) + res.spectrum.overflow
    ce_residual = abs(pc_int - res.final_pops["CE"])
    elapsed = time.perf_counter() - t0

    ok, detail = subchecks([
        (drift < 1e-12, f"coupled-unitarity drift={drift:.2e}"),
        (channel_residual < 1e-8, f"channel-sum residual={channel_residual:.2e}"),
        (ce_residual < 1e-6, f"P_c-vs-pop_CE residual={ce_residual:.2e}"),
        (elapsed < 10.0, f"runtime={elapsed:.1f}s"),
    ])
    report("1 (conservation)", ok, detail)


# -- criterion 2: oracle suite ------------------------------------------------

def test_criterion_2_oracles():
    t0 = time.perf_counter()
    checks = []

    # harmonic ground state at omega/2
    from h2frag.dataset import CurveTable
    mass, w_h = 918.0764, 0.02
    r = np.linspace(0.2, 6.5, 64)
    harm = CurveTable("harm", r, 0.5 * mass * w_h**2 * (r - 3.0) ** 2,
                      extrap_low="clamp", extrap_high="clamp")
    hgrid = build_grid(1.0, 5.0, 1024)
    e0 = numerov_bound(harm, hgrid, mass, 0).energy
    checks.append((abs(e0 - w_h / 2) < 1e-8, f"harmonic-E0 err={abs(e0-w_h/2):.1e}"))

    # free-Gaussian spreading
    fgrid = build_grid(1.0, 81.0, 2048)
    sigma0 = 0.8
    amp = np.exp(-((fgrid.r - 40.0) ** 2) / (4 * sigma0**2)).astype(complex)
    amp /= np.sqrt(np.sum(np.abs(amp) ** 2) * fgrid.dr)
    wp = WavePacket(fgrid, amp)
    for _ in range(100):
        wp = split_step_single(wp, np.zeros(fgrid.n), 2.0, mass)
    dens = np.abs(wp.amp) ** 2
    mean = np.sum(fgrid.r * dens) * fgrid.dr
    var = np.sum((fgrid.r - mean) ** 2 * dens) * fgrid.dr
    expected = sigma0**2 + (200.0 / (2 * mass * sigma0)) ** 2
    checks.append((abs(var / expected - 1) < 1e-3,
                   f"gaussian-spread err={abs(var/expected-1):.1e}"))

    # two-level Rabi
    omega_r = 0.02
    pg = WavePacket(GRID, amp := np.exp(-((GRID.r - 10) ** 2)).astype(complex), "g")
    pg.amp /= np.sqrt(norm2(pg))
    pu = zero_packet(GRID, "u")
    zeros = np.zeros(GRID.n)
    coupling = np.full(GRID.n, omega_r)
    worst = 0.0
    steps = int(round(np.pi / omega_r / 2.0))
    for i in range(steps):
        pg, pu = split_step_coupled(pg, pu, zeros, zeros, coupling, 2.0,
                                    mass, frozen=True)
        worst = max(worst, abs(norm2(pu) - np.sin(omega_r * 2.0 * (i + 1)) ** 2))
    checks.append((worst < 1e-6, f"rabi err={worst:.1e}"))

    # tunneling-limit agreement with an independently coded static-limit rate
    def adk(F, ip):
        ns = 1.0 / np.sqrt(2 * ip)
        f0 = (2 * ip) ** 1.5
        c2 = structure_c2(RateModel(), ip)
        return (np.sqrt(3 * F / (np.pi * f0)) * c2 * ip
                * (2 * f0 / F) ** (2 * ns - 1) * np.exp(-2 * f0 / (3 * F)))
    worst_ratio = 0.0
    for F in (0.03, 0.05, 0.08):
        gam = keldysh(F, 0.00456, 0.5)
        assert gam < 0.3
        ratio = ppt_rate(F, 0.00456, 0.5, RateModel()) / adk(F, 0.5)
        worst_ratio = max(worst_ratio, abs(ratio - 1.0))
    checks.append((worst_ratio < 0.2, f"ppt-vs-adk max dev={worst_ratio:.3f}"))

    # chi0 zero-point energy vs dense matrix diagonalization
    dx = 0.005
    rr = np.arange(0.3, 6.0, dx)
    v = np.asarray(eval_curve(DS.V_H2, rr))
    diag = 1.0 / (DS.reduced_mass * dx * dx) + v
    off = -0.5 / (DS.reduced_mass * dx * dx) * np.ones(rr.size - 1)
    e_ref = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0),
                             eigvals_only=True)[0]
    ngrid = build_grid(0.25, 0.25 + 1024 * 0.0056, 1024)
    e_num = numerov_bound(DS.V_H2, ngrid, DS.reduced_mass, 0).energy
    checks.append((abs(e_num - e_ref) < 1e-6,
                   f"chi0-vs-diag err={abs(e_num-e_ref):.1e}"))

    elapsed = time.perf_counter() - t0
    checks.append((elapsed < 30.0, f"runtime={elapsed:.1f}s"))
    ok, detail = subchecks(checks)
    report("2 (oracles)", ok, detail)


# -- criteria 3/4: single-cycle explosion spectra ------------------------------

def test_criterion_3_single_cycle_uv():
    dyn = run_scenario(266.0, 1e15, 1)
    frz = run_scenario(266.0, 1e15, 1, frozen=True)
    d, f = dyn.spectrum, frz.spectrum
    l1 = np.sum(np.abs(d.P_c - f.P_c)) * d.de / d.integral(d.P_c)
    pk = main_peak(d.e_axis, d.P_c, 4.0, 16.0)[0]
    ok, detail = subchecks([
        (l1 < 0.02, f"frozen/dynamic L1={l1:.4f} (<0.02)"),
        (abs(pk - 8.3) <= 0.5, f"CE peak={pk:.2f} eV (8.3+-0.5)"),
        (pk < 9.7, f"below vertical 9.7"),
    ])
    report("3 (one-cycle 266nm)", ok, detail)


def test_criterion_4_single_cycle_ir():
    dyn = run_scenario(800.0, 1e15, 1)
    frz = run_scenario(800.0, 1e15, 1, frozen=True)
    pk_d = main_peak(dyn.spectrum.e_axis, dyn.spectrum.P_c, 4.0, 16.0)[0]
    pk_f = main_peak(frz.spectrum.e_axis, frz.spectrum.P_c, 4.0, 16.0)[0]
    ce_d = dyn.final_pops["CE"]
    ce_f = frz.final_pops["CE"]
    ok, detail = subchecks([
        (pk_d > pk_f, f"ordering dyn={pk_d:.3f} > frz={pk_f:.3f}"),
        (abs(pk_d - 8.9) <= 0.6, f"dyn peak={pk_d:.2f} (8.9+-0.6)"),
        (abs(pk_f - 8.2) <= 0.6, f"frz peak={pk_f:.2f} (8.2+-0.6)"),
        (ce_d < ce_f, f"yield dyn={ce_d:.4e} < frz={ce_f:.4e}"),
    ])
    report("4 (one-cycle 800nm)", ok, detail)


# -- criterion 5: 12-cycle intensity scan --------------------------------------

SCAN_INTENSITIES = np.geomspace(5e13, 5e15, 12)


@pytest.fixture(scope="module")
def scan_results():
    models = default_models()
    f_top = float(np.sqrt(SCAN_INTENSITIES[-1] / 3.50945e16)) * (1 + 1e-9)
    tables = {sp: cached_rate_table(DS, sp, W800, models[sp], f_top,
                                    r_axis=GRID.r) for sp in ("H2", "g", "u")}
    out = {}
    for intensity in SCAN_INTENSITIES:
        for frozen in (False, True):
            out[(intensity, frozen)] = run_scenario(
                800.0, float(intensity), 12, frozen=frozen,
                tables=tables, f_max=f_top)
    return out


def test_criterion_5_intensity_scan(scan_results):
    t0 = time.perf_counter()
    checks = []

    # populations below 1e-4 sit under the resolution of the trend plots
    # this criterion mirrors; they count as agreeing
    floor = 1e-4
    h2_rel = []
    ion_rel_below = []
    ratios_above = []
    for intensity in SCAN_INTENSITIES:
        d = scan_results[(intensity, False)]
        f = scan_results[(intensity, True)]
        if max(d.final_pops["H2"], f.final_pops["H2"]) > floor:
            h2_rel.append(abs(d.final_pops["H2"] - f.final_pops["H2"])
                          / max(f.final_pops["H2"], 1e-300))
        ion_d = d.final_pops["g"] + d.final_pops["u"]
        ion_f = f.final_pops["g"] + f.final_pops["u"]
        if intensity < 4e14 and max(ion_d, ion_f) > floor:
            ion_rel_below.append(abs(ion_d - ion_f) / max(ion_f, 1e-300))
        if intensity > 4e14:
            ratios_above.append(d.final_pops["CE"] / max(f.final_pops["CE"], 1e-300))
    checks.append((max(h2_rel) <= 0.05,
                   f"(a) max H2 rel dev={max(h2_rel):.3f} (<=0.05)"))
    checks.append((max(ion_rel_below) <= 0.10,
                   f"(b) max ion rel dev below 4e14={max(ion_rel_below):.3f} (<=0.10)"))
    n_enh = sum(1 for r in ratios_above if r >= 10.0)
    checks.append((n_enh >= (len(ratios_above) + 1) // 2,
                   f"(c) >=10x CE enhancement at {n_enh}/{len(ratios_above)} points"))

    # (d) stretch/burst oscillation of <R> at 6.3e14: each half-cycle burst
    # pulls <R> down sharply and leaves brief ringing, so maxima closer
    # than ~a third of a period belong to the same burst cluster
    res = run_scenario(800.0, 6.3e14, 12, trace_stride=5)
    t = res.times
    m = res.mean_r_g.copy()
    good = np.isfinite(m)
    t, m = t[good], m[good]
    t_l = 2 * np.pi / W800
    dtr = t[1] - t[0]
    idx, _ = find_peaks(m, prominence=0.02,
                        distance=max(1, int(0.7 * (t_l / 2) / dtr)))
    spacings = np.diff(t[idx])
    n_half = int(np.sum(np.abs(spacings - t_l / 2) <= 0.1 * t_l / 2))
    checks.append((len(idx) >= 8 and n_half >= 7,
                   f"(d) {len(idx)} maxima, {n_half} spacings at T_L/2 +-10%"))

    elapsed = time.perf_counter() - t0
    checks.append((elapsed < 1800.0, f"runtime={elapsed:.0f}s"))
    ok, detail = subchecks(checks)
    report("5 (intensity scan)", ok, detail)


# -- criterion 6: 36-cycle KER spectra ------------------------------------------

def test_criterion_6_ker_spectra():
    t0 = time.perf_counter()
    checks = []

    a = run_scenario(266.0, 2e14, 36, with_diss=True)
    sp = a.spectrum
    diss_total = sp.integral(sp.P_diss)
    ce_total = sp.integral(sp.P_c)
    atd = main_peak(sp.e_axis, sp.P_diss, 0.0, 20.0, window_bins=15)
    bs = main_peak(sp.e_axis, sp.P_diss, 0.0, 0.5, window_bins=15)
    atd_e = atd[0] if atd else np.nan
    bs_e = bs[0] if bs else np.nan
    half_photon = 0.5 * W266 * HARTREE_EV
    checks.append((atd is not None and abs(atd_e - 2.7) <= 0.3,
                   f"ATD peak={atd_e:.2f} (2.7+-0.3)"))
    checks.append((bs is not None and abs(bs_e - 0.1) <= 0.15,
                   f"BS peak={bs_e:.2f} (0.1+-0.15)"))
    checks.append((atd is not None and bs is not None and atd[1] > bs[1],
                   "ATD dominant"))
    checks.append((atd is not None and bs is not None
                   and abs((atd_e - bs_e) - half_photon) <= 0.3,
                   f"ATD-BS sep={atd_e - bs_e:.2f} vs w/2={half_photon:.2f}+-0.3"))
    checks.append((ce_total < 1e-3, f"CE total={ce_total:.2e} (<1e-3)"))
    checks.append((0.012 / 3 <= diss_total <= 0.012 * 3,
                   f"diss total={diss_total:.4f} (1.2% x/ 3)"))

    sce_peaks = []
    ce_totals = []
    for intensity, target in ((1e15, 4.2), (1.2e15, 4.4), (1.5e15, 4.8)):
        r = run_scenario(266.0, intensity, 36, with_diss=True)
        pk = main_peak(r.spectrum.e_axis, r.spectrum.P_c, 2.5, 7.0,
                       window_bins=25)
        sce_peaks.append(pk[0] if pk else np.nan)
        ce_totals.append(r.spectrum.integral(r.spectrum.P_c))
        checks.append((pk is not None and abs(pk[0] - target) <= 0.4,
                       f"SCE@{intensity:.1e}={pk[0] if pk else np.nan:.2f} ({target}+-0.4)"))
    checks.append((sce_peaks[0] < sce_peaks[1] < sce_peaks[2],
                   f"SCE monotonic {sce_peaks[0]:.2f}<{sce_peaks[1]:.2f}<{sce_peaks[2]:.2f}"))
    for got, target in zip(ce_totals, (0.036, 0.276, 0.438)):
        checks.append((target / 3 <= got <= target * 3,
                       f"CE@{target:.3f} got={got:.3f} (x/ 3)"))
    checks.append((ce_totals[0] < ce_totals[1] < ce_totals[2],
                   "CE totals monotonic"))

    r15 = run_scenario(266.0, 1.5e15, 36, with_diss=True)
    sel = (r15.spectrum.e_axis >= 7.0) & (r15.spectrum.e_axis <= 10.0)
    dce_share = (np.sum(r15.spectrum.P_c[sel]) * r15.spectrum.de
                 / max(r15.spectrum.integral(r15.spectrum.P_c), 1e-300))
    checks.append((dce_share > 0.02, f"DCE 7-10eV share={dce_share:.3f} (>0.02)"))

    elapsed = time.perf_counter() - t0
    checks.append((elapsed < 1800.0, f"runtime={elapsed:.0f}s"))
    ok, detail = subchecks(checks)
    report("6 (KER spectra)", ok, detail)


# -- criterion 7: dressed analysis ---------------------------------------------

def test_criterion_7_dressed():
    t0 = time.perf_counter()
    r1 = find_crossing(DS, W266, (0, 3))
    r2 = find_crossing(DS, W266, (2, 3))
    e0 = (2e14 / 3.50945e16) ** 0.5
    dc = dressed_pair(DS, W266, e0, 0, 3,
                      r_axis=np.array([r1 - 1e-3, r1, r1 + 1e-3]))
    gap = dc.adiabatic_upper[1] - dc.adiabatic_lower[1]
    mu = float(eval_curve(DS.mu_ug, r1))
    gap_err = abs(gap - mu * e0)
    elapsed = time.perf_counter() - t0
    ok, detail = subchecks([
        (abs(r1 - 2.0) <= 0.2, f"(g,0)/(u,3) crossing={r1:.3f} (2.0+-0.2)"),
        (abs(r2 - 3.3) <= 0.2, f"(g,2)/(u,3) crossing={r2:.3f} (3.3+-0.2)"),
        (gap_err < 1e-6, f"gap-vs-muE0 err={gap_err:.1e}"),
        (elapsed < 1.0, f"runtime={elapsed:.2f}s"),
    ])
    report("7 (dressed curves)", ok, detail)


# -- criterion 8: convergence ----------------------------------------------------

def test_criterion_8_convergence():
    checks = []
    base3 = run_scenario(266.0, 1e15, 1)
    fine3 = run_scenario(266.0, 1e15, 1, steps_per_cycle=2000, n_points=4096)
    pk_b = main_peak(base3.spectrum.e_axis, base3.spectrum.P_c, 4.0, 16.0)[0]
    pk_f = main_peak(fine3.spectrum.e_axis, fine3.spectrum.P_c, 4.0, 16.0)[0]
    checks.append((abs(pk_b - pk_f) < 0.1,
                   f"one-cycle peak shift={abs(pk_b - pk_f):.3f} eV (<0.1)"))
    pop_dev = max(abs(base3.final_pops[k] - fine3.final_pops[k])
                  / max(base3.final_pops[k], 1e-4) for k in base3.final_pops)
    checks.append((pop_dev < 0.01, f"one-cycle pop dev={pop_dev:.4f} (<0.01)"))

    base6 = run_scenario(266.0, 1e15, 36, with_diss=True)
    fine6 = run_scenario(266.0, 1e15, 36, steps_per_cycle=2000, n_points=4096,
                         with_diss=True)
    pk6b = main_peak(base6.spectrum.e_axis, base6.spectrum.P_c, 2.5, 7.0,
                     window_bins=25)
    pk6f = main_peak(fine6.spectrum.e_axis, fine6.spectrum.P_c, 2.5, 7.0,
                     window_bins=25)
    if pk6b and pk6f:
        checks.append((abs(pk6b[0] - pk6f[0]) < 0.1,
                       f"36-cycle SCE shift={abs(pk6b[0]-pk6f[0]):.3f} eV (<0.1)"))
    else:
        checks.append((False, "36-cycle SCE peak missing"))
    pop_dev6 = max(abs(base6.final_pops[k] - fine6.final_pops[k])
                   / max(base6.final_pops[k], 1e-4) for k in base6.final_pops)
    checks.append((pop_dev6 < 0.01, f"36-cycle pop dev={pop_dev6:.4f} (<0.01)"))

    ok, detail = subchecks(checks)
    report("8 (convergence)", ok, detail)
