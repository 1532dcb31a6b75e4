"""Render simulator CSV outputs into publication-style panels.

Figure ids mirror the standard scenarios:

    fig2   one-cycle explosion: KER spectra (frozen vs dynamic overlay)
           plus population dynamics on a log scale
    fig3   intensity scan: final populations vs peak intensity, log-log
    fig4   2x2 grid of KER spectra with BS/ATD/SCE/DCE peak annotations
    fig5   dressed potential curves with their crossings circled

Inputs must exist and carry matching provenance headers (same dataset
checksum); an empty spectrum is an error.  Rendering is a pure function
of the input files: rerunning writes byte-identical PNGs.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

DPI = 150


class FigureError(RuntimeError):
    pass


@dataclass
class FigureSpec:
    figure_id: str          # fig2 | fig3 | fig4 | fig5
    inputs: list[str]
    output: str
    labels: list[str] = field(default_factory=list)


def read_csv(path: str | Path):
    """(header dict, column dict) of one provenance-stamped CSV."""
    path = Path(path)
    if not path.is_file():
        raise FigureError(f"input file {path} does not exist")
    header: dict[str, str] = {}
    names: list[str] = []
    rows: list[list[float]] = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, val = (s.strip() for s in body.split("=", 1))
                    header[key] = val
                continue
            if not names:
                names = line.split(",")
                continue
            if line.strip():
                rows.append([_maybe_float(tok) for tok in line.split(",")])
    if not names or not rows:
        raise FigureError(f"{path}: no data rows")
    cols = {}
    for i, name in enumerate(names):
        values = [r[i] for r in rows]
        cols[name] = (np.array(values) if not isinstance(values[0], str)
                      else values)
    return header, cols


def _maybe_float(tok: str):
    try:
        return float(tok)
    except ValueError:
        return tok


def check_provenance(headers: list[dict]) -> None:
    checksums = {h.get("dataset_checksum", "") for h in headers}
    if len(checksums) != 1 or "" in checksums:
        raise FigureError("inputs carry mismatched or missing provenance "
                          f"(dataset checksums: {sorted(checksums)})")


def local_maxima(e: np.ndarray, y: np.ndarray, window: int = 25,
                 floor_frac: float = 0.05) -> list[tuple[float, float]]:
    if y.max() <= 0.0:
        return []
    floor = floor_frac * y.max()
    peaks = []
    for i in range(1, y.size - 1):
        lo, hi = max(0, i - window), min(y.size, i + window + 1)
        if y[i] >= floor and lo + int(np.argmax(y[lo:hi])) == i:
            peaks.append((float(e[i]), float(y[i])))
    return peaks


def _peak_tag(energy: float) -> str:
    if energy < 1.0:
        return "BS"
    if energy < 4.0:
        return "ATD"
    if energy < 7.0:
        return "SCE"
    return "DCE"


def _save(fig, spec: FigureSpec) -> None:
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=DPI, metadata={"Software": "h2figs"})
    plt.close(fig)


def render_fig2(spec: FigureSpec) -> None:
    """Overlaid frozen/dynamic spectra (left), populations (right)."""
    spectra = [p for p in spec.inputs if "spectrum" in Path(p).name]
    pops = [p for p in spec.inputs if "populations" in Path(p).name]
    if not spectra:
        raise FigureError("fig2 needs at least one spectrum.csv input")
    loaded = [read_csv(p) for p in spectra + pops]
    check_provenance([h for h, _ in loaded])
    labels = spec.labels or [_mode_label(h) for h, _ in loaded[:len(spectra)]]

    fig, axes = plt.subplots(1, 2 if pops else 1,
                             figsize=(9.0 if pops else 5.0, 3.6))
    ax0 = axes[0] if pops else axes
    styles = [dict(ls="-"), dict(ls="--", marker="o", markevery=40, ms=3)]
    for (hdr, cols), label, style in zip(loaded[:len(spectra)], labels, styles):
        if cols["P_total"].max() <= 0.0:
            raise FigureError("empty spectrum input")
        ax0.plot(cols["E_eV"], cols["P_c"], label=label, lw=1.2, **style)
    ax0.set_xlabel("proton energy (eV)")
    ax0.set_ylabel(r"$P_c(E)$ (1/eV)")
    ax0.set_xlim(4, 14)
    ax0.legend(frameon=False, fontsize=8)
    for e_pk, y_pk in local_maxima(*_main_spectrum(loaded[0][1])):
        ax0.annotate(f"{e_pk:.1f}", xy=(e_pk, y_pk), fontsize=7,
                     xytext=(0, 4), textcoords="offset points", ha="center")

    if pops:
        ax1 = axes[1]
        for (hdr, cols), style in zip(loaded[len(spectra):], styles):
            t = cols["t_fs"]
            ax1.semilogy(t, np.maximum(cols["pop_H2"], 1e-12), "k", lw=1, **_nols(style))
            ax1.semilogy(t, np.maximum(cols["pop_g"] + cols["pop_u"], 1e-12),
                         "r", lw=1, **_nols(style))
            ax1.semilogy(t, np.maximum(cols["pop_CE"], 1e-12), "g", lw=1,
                         **_nols(style))
        ax1.plot(loaded[len(spectra)][1]["t_fs"],
                 10 ** (-6 + 3 * (1 + loaded[len(spectra)][1]["E_over_E0"])),
                 "k:", lw=0.6)
        ax1.set_ylim(1e-8, 2)
        ax1.set_xlabel("t (fs)")
        ax1.set_ylabel("population")
    fig.tight_layout()
    _save(fig, spec)


def _nols(style):
    return {k: v for k, v in style.items() if k != "ls"}


def _mode_label(header: dict) -> str:
    return header.get("mode", "run")


def _main_spectrum(cols):
    return cols["E_eV"], cols["P_c"]


def render_fig3(spec: FigureSpec) -> None:
    """Final populations vs peak intensity from scan.csv."""
    if len(spec.inputs) != 1:
        raise FigureError("fig3 takes exactly one scan.csv input")
    hdr, cols = read_csv(spec.inputs[0])
    check_provenance([hdr])
    modes = cols["mode"]
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    colors = {"pop_H2": "k", "ion": "r", "pop_CE": "g"}
    for mode, ls in (("frozen", "-"), ("dynamic", "--")):
        sel = np.array([m == mode for m in modes])
        if not np.any(sel):
            continue
        x = cols["intensity_w_cm2"][sel]
        order = np.argsort(x)
        ion = (cols["pop_g"] + cols["pop_u"])[sel]
        for key, col in (("pop_H2", "k"), ("ion", "r"), ("pop_CE", "g")):
            y = ion if key == "ion" else cols[key][sel]
            ax.loglog(x[order], np.maximum(y[order], 1e-12), col + ls, lw=1.1,
                      marker="o" if mode == "dynamic" else None, ms=3,
                      label=f"{key} ({mode})")
    ax.set_xlabel(r"peak intensity (W/cm$^2$)")
    ax.set_ylabel("final population")
    ax.set_ylim(1e-10, 2)
    ax.legend(frameon=False, fontsize=6, ncol=2)
    fig.tight_layout()
    _save(fig, spec)


def render_fig4(spec: FigureSpec) -> None:
    """2x2 grid of KER spectra with annotated detected peaks."""
    if len(spec.inputs) != 4:
        raise FigureError("fig4 takes exactly four spectrum.csv inputs")
    loaded = [read_csv(p) for p in spec.inputs]
    check_provenance([h for h, _ in loaded])
    fig, axes = plt.subplots(2, 2, figsize=(8.0, 6.0))
    for ax, (hdr, cols), tag in zip(axes.ravel(), loaded, "abcd"):
        if cols["P_total"].max() <= 0.0:
            raise FigureError("empty spectrum input")
        e = cols["E_eV"]
        ax.plot(e, cols["P_total"], "b-", lw=1.1, label=r"$P(E)$")
        ax.plot(e, cols["P_c"], "r--", lw=1.0, label=r"$P_c(E)$")
        for e_pk, y_pk in local_maxima(e, cols["P_total"], window=40,
                                       floor_frac=0.08):
            ax.annotate(f"{_peak_tag(e_pk)} {e_pk:.1f}", xy=(e_pk, y_pk),
                        fontsize=7, xytext=(0, 4), textcoords="offset points",
                        ha="center")
        intensity = hdr.get("intensity_w_cm2", "?")
        ax.set_title(f"({tag}) I = {intensity} W/cm$^2$", fontsize=8)
        ax.set_xlim(0, 12)
        ax.set_xlabel("proton energy (eV)")
        ax.set_ylabel("KER density (1/eV)")
    axes[0, 0].legend(frameon=False, fontsize=7)
    fig.tight_layout()
    _save(fig, spec)


def render_fig5(spec: FigureSpec) -> None:
    """Dressed potential curves; crossings of each pair circled."""
    if len(spec.inputs) != 1:
        raise FigureError("fig5 takes exactly one dressed.csv input")
    hdr, cols = read_csv(spec.inputs[0])
    check_provenance([hdr])
    r = cols["R_bohr"]
    pair_tags = sorted({name.split("_")[-1] for name in cols
                        if name.startswith("diabatic_g_")})
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    for tag in pair_tags:
        dg = cols[f"diabatic_g_{tag}"]
        du = cols[f"diabatic_u_{tag}"]
        ax.plot(r, dg, "k--", lw=1.0)
        ax.plot(r, du, "r--", lw=1.0)
        ax.plot(r, cols[f"adiabatic_lower_{tag}"], "g-", lw=0.9)
        ax.plot(r, cols[f"adiabatic_upper_{tag}"], "g-", lw=0.9)
        gap = du - dg
        sign_change = np.nonzero(np.diff(np.sign(gap)))[0]
        for i in sign_change:
            ax.plot(r[i], dg[i], "o", mfc="none", mec="b", ms=12, mew=1.4)
    ax.set_xlim(r[0], min(r[-1], 8.0))
    lo = min(cols[f"diabatic_g_{t}"].min() for t in pair_tags)
    ax.set_ylim(lo - 0.05, lo + 0.6)
    ax.set_xlabel("R (bohr)")
    ax.set_ylabel("dressed energy (hartree)")
    fig.tight_layout()
    _save(fig, spec)


_RENDERERS = {"fig2": render_fig2, "fig3": render_fig3,
              "fig4": render_fig4, "fig5": render_fig5}


def render(spec: FigureSpec) -> None:
    if spec.figure_id not in _RENDERERS:
        raise FigureError(f"unknown figure id {spec.figure_id!r}; "
                          f"choose from {sorted(_RENDERERS)}")
    _RENDERERS[spec.figure_id](spec)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="h2frag-figures",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("figure_id", choices=sorted(_RENDERERS))
    ap.add_argument("--inputs", nargs="+", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--labels", nargs="*", default=[])
    args = ap.parse_args(argv)
    try:
        render(FigureSpec(args.figure_id, args.inputs, args.out, args.labels))
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
