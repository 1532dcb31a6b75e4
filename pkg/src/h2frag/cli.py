"""Command-line entry point and deterministic output serialization.

Subcommands:

    h2frag run     --preset fig2a --out results/
    h2frag scan    --preset fig3 --out scan/
    h2frag dressed --wavelength-nm 266 --intensity 2e14 --out dressed/
    h2frag presets

Every output file starts with a provenance header (artifact version,
dataset checksum, canonical config echo), and reruns with identical
inputs produce identical bytes: nothing in the outputs depends on wall
clock, locale, or iteration order.  Wall-clock cost is logged to
stderr only.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path


from . import __version__
from .config import PRESETS, RunConfig, parse_config
from .constants import AU_TIME_FS
from .dataset import MolecularDataset, load_dataset
from .dressed import dressed_pair, find_crossing
from .grid import build_grid
from .propagate import SimulationResult, SimulationSetup, simulate
from .rates import cached_rate_table, make_pulse
from .spectra import detect_peaks, dissociated_fraction, dissociation_spectrum
from .states import find_bound_levels


def _fmt(x: float) -> str:
    return f"{x:.12e}"


def _config_echo(cfg: RunConfig) -> list[str]:
    d = asdict(cfg)
    d.pop("out_dir")   # output location cannot influence any computed value
    return [f"{k} = {d[k]}" for k in sorted(d)]


def _header(cfg: RunConfig, ds: MolecularDataset, extra: list[str] = ()) -> str:
    lines = [f"h2frag {__version__}", f"dataset_checksum = {ds.checksum}"]
    lines += list(extra)
    lines += _config_echo(cfg)
    return "".join(f"# {ln}\n" for ln in lines)


def _write_populations(path: Path, cfg: RunConfig, ds: MolecularDataset,
                       res: SimulationResult) -> None:
    with open(path, "w") as fh:
        fh.write(_header(cfg, ds))
        fh.write("t_fs,E_over_E0,pop_H2,pop_g,pop_u,pop_CE,mean_R_g\n")
        for i in range(res.times.size):
            fh.write(",".join([
                _fmt(res.times[i] * AU_TIME_FS), _fmt(res.field_over_e0[i]),
                _fmt(res.pops["H2"][i]), _fmt(res.pops["g"][i]),
                _fmt(res.pops["u"][i]), _fmt(res.pops["CE"][i]),
                _fmt(res.mean_r_g[i])]) + "\n")


def _write_spectrum(path: Path, cfg: RunConfig, ds: MolecularDataset,
                    res: SimulationResult) -> None:
    sp = res.spectrum
    with open(path, "w") as fh:
        fh.write(_header(cfg, ds))
        fh.write("E_eV,P_c,P_diss,P_total\n")
        for i in range(sp.e_axis.size):
            fh.write(",".join([
                _fmt(sp.e_axis[i]), _fmt(sp.P_c[i]), _fmt(sp.P_diss[i]),
                _fmt(sp.P_c[i] + sp.P_diss[i])]) + "\n")


def _peak_list(e, y) -> list[dict]:
    return [{"energy_ev": round(pe, 6), "height": ph}
            for pe, ph in detect_peaks(e, y, window_bins=3, floor_frac=1e-3)]


def _run_one(cfg: RunConfig, ds: MolecularDataset, tables=None, f_max=None,
             bound_g=None):
    grid = build_grid(cfg.r_min, cfg.r_max, cfg.n_points)
    pulse = make_pulse(cfg.wavelength_nm, cfg.intensity_w_cm2, cfg.cycles,
                       cfg.steps_per_cycle)
    setup = SimulationSetup(ds=ds, pulse=pulse, grid=grid,
                            frozen=(cfg.mode == "frozen"),
                            models=cfg.rate_models(), tables=tables,
                            e_max_ev=cfg.e_max_ev, de_ev=cfg.e_step_ev,
                            trace_stride=cfg.trace_stride,
                            absorber=cfg.absorber, f_max=f_max,
                            rate_field=cfg.rate_field)
    res = simulate(setup)
    res.spectrum.P_diss = dissociation_spectrum(res.psi_g, res.psi_u, ds,
                                                res.spectrum.e_axis)
    if bound_g is None:
        bound_g = find_bound_levels(ds.V_g, grid, ds.reduced_mass)
    diss = dissociated_fraction(res.psi_g, res.psi_u, ds, bound_g)
    return res, diss


def _summary_dict(cfg: RunConfig, ds: MolecularDataset, res: SimulationResult,
                  diss: float) -> dict:
    sp = res.spectrum
    cfg_echo = asdict(cfg)
    cfg_echo.pop("out_dir")
    return {
        "artifact_version": __version__,
        "dataset_checksum": ds.checksum,
        "config": cfg_echo,
        "n_steps": int(res.setup.pulse.n_steps),
        "final_populations": {k: res.final_pops[k] for k in sorted(res.final_pops)},
        "photodissociation_total": diss,
        "coulomb_explosion_total": sp.integral(sp.P_c),
        "spectrum_overflow": sp.overflow,
        "clamp_events": res.clamp_events,
        "absorbed_norm": res.absorbed,
        "peaks": {
            "total": _peak_list(sp.e_axis, sp.P_total),
            "coulomb": _peak_list(sp.e_axis, sp.P_c),
            "dissociation": _peak_list(sp.e_axis, sp.P_diss),
        },
        "warnings": res.warnings,
    }


def _write_summary(path: Path, data: dict) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_run(cfg: RunConfig) -> int:
    ds = load_dataset(cfg.dataset_dir or None)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    res, diss = _run_one(cfg, ds)
    print(f"run finished in {time.perf_counter() - t0:.1f} s "
          f"({res.setup.pulse.n_steps} steps)", file=sys.stderr)
    _write_populations(out / "populations.csv", cfg, ds, res)
    _write_spectrum(out / "spectrum.csv", cfg, ds, res)
    _write_summary(out / "summary.json", _summary_dict(cfg, ds, res, diss))
    return 0


def _scan_point(args):
    cfg_dict, intensity, mode = args
    cfg = RunConfig(**cfg_dict)
    cfg.intensity_w_cm2 = intensity
    cfg.mode = mode
    cfg.validate()
    ds = load_dataset(cfg.dataset_dir or None)
    f_max = (max(cfg.scan_list()) / 3.50945e16) ** 0.5 * (1 + 1e-9)
    res, diss = _run_one(cfg, ds, f_max=f_max)
    return cfg, res, diss


def cmd_scan(cfg: RunConfig, workers: int = 1) -> int:
    ds = load_dataset(cfg.dataset_dir or None)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    intensities = cfg.scan_list()
    modes = [m.strip() for m in cfg.scan_modes.split(",") if m.strip()]
    for m in modes:
        if m not in ("dynamic", "frozen"):
            raise ValueError(f"bad scan mode {m!r}")

    jobs = [(asdict(cfg), i, m) for i in intensities for m in modes]
    t0 = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_point, jobs))
    else:
        # share rate tables and the bound-level set across all points
        grid = build_grid(cfg.r_min, cfg.r_max, cfg.n_points)
        models = cfg.rate_models()
        f_max = (max(intensities) / 3.50945e16) ** 0.5 * (1 + 1e-9)
        omega = make_pulse(cfg.wavelength_nm, intensities[0], cfg.cycles).omega
        tables = {sp: cached_rate_table(ds, sp, omega, models[sp], f_max,
                                        r_axis=grid.r)
                  for sp in ("H2", "g", "u")}
        bound_g = find_bound_levels(ds.V_g, grid, ds.reduced_mass)
        results = []
        for cfg_dict, intensity, mode in jobs:
            c = RunConfig(**cfg_dict)
            c.intensity_w_cm2 = intensity
            c.mode = mode
            c.validate()
            results.append((c,) + _run_one(c, ds, tables=tables, f_max=f_max,
                                           bound_g=bound_g))
    print(f"scan of {len(jobs)} points finished in "
          f"{time.perf_counter() - t0:.1f} s", file=sys.stderr)

    rows = []
    for (c, res, diss), (cfg_dict, intensity, mode) in zip(results, jobs):
        tag = f"point_{intensities.index(intensity):02d}_{mode}"
        sub = out / tag
        sub.mkdir(parents=True, exist_ok=True)
        _write_populations(sub / "populations.csv", c, ds, res)
        _write_spectrum(sub / "spectrum.csv", c, ds, res)
        _write_summary(sub / "summary.json", _summary_dict(c, ds, res, diss))
        rows.append((intensity, mode, res, diss))

    with open(out / "scan.csv", "w") as fh:
        fh.write(_header(cfg, ds))
        fh.write("intensity_w_cm2,mode,pop_H2,pop_g,pop_u,pop_CE,"
                 "photodissociation_total,coulomb_explosion_total\n")
        for intensity, mode, res, diss in rows:
            sp = res.spectrum
            fh.write(",".join([
                _fmt(intensity), mode,
                _fmt(res.final_pops["H2"]), _fmt(res.final_pops["g"]),
                _fmt(res.final_pops["u"]), _fmt(res.final_pops["CE"]),
                _fmt(diss), _fmt(sp.integral(sp.P_c))]) + "\n")
    return 0


def cmd_dressed(cfg: RunConfig) -> int:
    ds = load_dataset(cfg.dataset_dir or None)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    omega = make_pulse(cfg.wavelength_nm, cfg.intensity_w_cm2, 1).omega
    e0 = (cfg.intensity_w_cm2 / 3.50945e16) ** 0.5
    pairs = cfg.dressed_pair_list()

    curves = [dressed_pair(ds, omega, e0, ng, nu) for ng, nu in pairs]
    crossings = {}
    for (ng, nu) in pairs:
        key = f"g{ng}u{nu}"
        try:
            crossings[key] = find_crossing(ds, omega, (ng, nu))
        except ValueError:
            crossings[key] = None

    with open(out / "dressed.csv", "w") as fh:
        fh.write(_header(cfg, ds))
        cols = ["R_bohr"]
        for (ng, nu) in pairs:
            tag = f"g{ng}u{nu}"
            cols += [f"diabatic_g_{tag}", f"diabatic_u_{tag}",
                     f"adiabatic_lower_{tag}", f"adiabatic_upper_{tag}"]
        fh.write(",".join(cols) + "\n")
        r_axis = curves[0].R_axis
        for i in range(r_axis.size):
            row = [_fmt(r_axis[i])]
            for dc in curves:
                row += [_fmt(dc.diabatic_g[i]), _fmt(dc.diabatic_u[i]),
                        _fmt(dc.adiabatic_lower[i]), _fmt(dc.adiabatic_upper[i])]
            fh.write(",".join(row) + "\n")

    cfg_echo = asdict(cfg)
    cfg_echo.pop("out_dir")
    _write_summary(out / "summary.json", {
        "artifact_version": __version__,
        "dataset_checksum": ds.checksum,
        "config": cfg_echo,
        "photon_energy_hartree": omega,
        "field_amplitude_au": e0,
        "crossings_bohr": crossings,
    })
    return 0


def cmd_presets() -> int:
    for name in sorted(PRESETS):
        print(f"{name}: " + ", ".join(f"{k}={v}" for k, v in
                                      sorted(PRESETS[name].items())))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="h2frag",
                                 description="strong-field fragmentation simulator")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--preset", help="named scenario preset")
    common.add_argument("--out", help="output directory")
    common.add_argument("--mode", choices=("dynamic", "frozen"))
    common.add_argument("--frozen", action="store_true",
                        help="shortcut for --mode frozen")
    common.add_argument("--intensity", type=float, help="peak intensity, W/cm^2")
    common.add_argument("--wavelength-nm", type=float)
    common.add_argument("--cycles", type=int)
    common.add_argument("--steps-per-cycle", type=int)
    common.add_argument("--dataset-dir", help="alternative curve-table directory")
    sub.add_parser("run", parents=[common])
    scan = sub.add_parser("scan", parents=[common])
    scan.add_argument("--workers", type=int, default=1)
    sub.add_parser("dressed", parents=[common])
    sub.add_parser("presets")
    return ap


def _overrides(args: argparse.Namespace) -> dict:
    ov = {
        "out_dir": args.out,
        "mode": "frozen" if args.frozen else args.mode,
        "intensity_w_cm2": args.intensity,
        "wavelength_nm": args.wavelength_nm,
        "cycles": args.cycles,
        "steps_per_cycle": args.steps_per_cycle,
        "dataset_dir": args.dataset_dir,
    }
    return {k: v for k, v in ov.items() if v is not None}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "presets":
        return cmd_presets()
    try:
        cfg = parse_config(args.config, args.preset, _overrides(args))
        cfg.scenario = {"run": "run", "scan": "scan", "dressed": "dressed"}[args.command]
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "scan":
            return cmd_scan(cfg, workers=args.workers)
        return cmd_dressed(cfg)
    except Exception as exc:
        err = {"error": str(exc), "type": type(exc).__name__}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
