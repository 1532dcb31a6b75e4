"""Tabulated molecular curves: loading, interpolation, derived potentials.

A dataset directory holds one two-column text file per curve (R in bohr,
value in hartree, or atomic units for the dipole) plus a manifest naming
the roles:

    h2_ground = h2_ground.dat      # neutral ground state, -> -1.0
    ion_g     = ion_g.dat          # ion ground state, -> -0.5
    ion_u     = ion_u.dat          # ion first excited state, -> -0.5
    dipole_ug = dipole_ug.dat      # g-u transition dipole, -> R/2
    reduced_mass = 918.0764        # nuclear reduced mass, electron masses

`#` starts a comment anywhere.  The bundled reference set lives in
h2frag/data and is validated on load against asymptotic and
monotonicity invariants rather than trusted blindly.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

DEFAULT_REDUCED_MASS = 918.0764


class DatasetError(ValueError):
    """A curve file failed to parse or an invariant does not hold."""


@dataclass
class CurveTable:
    """One tabulated curve with a cubic-spline interpolant.

    extrap_low / extrap_high select what happens outside the tabulated
    range: "coulomb" continues with the 1/R trend matched at the edge,
    "r4" decays to `asymptote` like 1/R^4, "half_r" continues with slope
    1/2 (dipole), "clamp" holds the edge value, "none" raises.
    """

    name: str
    R: np.ndarray
    values: np.ndarray
    extrap_low: str = "none"
    extrap_high: str = "none"
    asymptote: float = 0.0

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.R.ndim != 1 or self.R.size < 10:
            raise DatasetError(f"curve {self.name!r}: need at least 10 samples")
        if self.values.shape != self.R.shape:
            raise DatasetError(f"curve {self.name!r}: column length mismatch")
        if not np.all(np.diff(self.R) > 0.0):
            raise DatasetError(f"curve {self.name!r}: R column must be strictly increasing")
        self._spline = CubicSpline(self.R, self.values)


def eval_curve(curve: CurveTable, R) -> np.ndarray | float:
    """Spline value inside the table, extrapolation-rule value outside."""
    R_arr = np.asarray(R, dtype=float)
    scalar = R_arr.ndim == 0
    R_arr = np.atleast_1d(R_arr)
    out = curve._spline(R_arr)

    lo, hi = curve.R[0], curve.R[-1]
    below = R_arr < lo
    above = R_arr > hi
    if np.any(below):
        if curve.extrap_low == "coulomb":
            out[below] = curve.values[0] + (1.0 / R_arr[below] - 1.0 / lo)
        elif curve.extrap_low == "clamp":
            out[below] = curve.values[0]
        else:
            raise DatasetError(f"curve {curve.name!r}: R below the first node "
                               f"({R_arr[below].min():.4g} < {lo:.4g}) and no rule")
    if np.any(above):
        if curve.extrap_high == "r4":
            out[above] = curve.asymptote + (curve.values[-1] - curve.asymptote) \
                * (hi / R_arr[above]) ** 4
        elif curve.extrap_high == "half_r":
            out[above] = curve.values[-1] + 0.5 * (R_arr[above] - hi)
        elif curve.extrap_high == "clamp":
            out[above] = curve.values[-1]
        else:
            raise DatasetError(f"curve {curve.name!r}: R above the last node "
                               f"({R_arr[above].max():.4g} > {hi:.4g}) and no rule")
    return float(out[0]) if scalar else out


@dataclass
class MolecularDataset:
    V_H2: CurveTable
    V_g: CurveTable
    V_u: CurveTable
    mu_ug: CurveTable
    reduced_mass: float
    checksum: str = ""
    source: str = ""


def ionization_potentials(ds: MolecularDataset, R):
    """(Ip1, Ipg, Ipu) at R: neutral->ion vertical gap and the two
    ion-channel gaps to the bare Coulomb curve 1/R."""
    vh2 = eval_curve(ds.V_H2, R)
    vg = eval_curve(ds.V_g, R)
    vu = eval_curve(ds.V_u, R)
    inv_r = 1.0 / np.asarray(R, dtype=float)
    if np.ndim(R) == 0:
        inv_r = float(inv_r)
    return vg - vh2, inv_r - vg, inv_r - vu


_ROLES = ("h2_ground", "ion_g", "ion_u", "dipole_ug")
_EXTRAP = {
    "h2_ground": dict(extrap_low="coulomb", extrap_high="r4", asymptote=-1.0),
    "ion_g": dict(extrap_low="coulomb", extrap_high="r4", asymptote=-0.5),
    "ion_u": dict(extrap_low="coulomb", extrap_high="r4", asymptote=-0.5),
    "dipole_ug": dict(extrap_low="clamp", extrap_high="half_r"),
}


def _parse_manifest(path: Path) -> dict[str, str]:
    entries: dict[str, str] = {}
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DatasetError(f"manifest line not of the form key = value: {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        entries[key] = val
    return entries


def _read_table(path: Path) -> tuple[np.ndarray, np.ndarray]:
    try:
        data = np.loadtxt(path, comments="#", ndmin=2)
    except Exception as exc:
        raise DatasetError(f"cannot parse curve file {path.name}: {exc}") from exc
    if data.shape[1] != 2:
        raise DatasetError(f"curve file {path.name}: expected two columns")
    return data[:, 0], data[:, 1]


def bundled_dataset_dir() -> Path:
    return Path(resources.files("h2frag.data"))


def load_dataset(path: str | Path | None = None) -> MolecularDataset:
    """Read a curve-file set, build interpolants, validate all invariants."""
    root = Path(path) if path is not None else bundled_dataset_dir()
    manifest = root / "manifest.txt"
    if not manifest.is_file():
        raise DatasetError(f"no manifest.txt in {root}")
    entries = _parse_manifest(manifest)

    curves: dict[str, CurveTable] = {}
    digest = hashlib.sha256()
    for role in _ROLES:
        if role not in entries:
            raise DatasetError(f"dataset is missing the {role!r} curve")
        fpath = root / entries[role]
        if not fpath.is_file():
            raise DatasetError(f"curve file {fpath} not found")
        R, vals = _read_table(fpath)
        curves[role] = CurveTable(role, R, vals, **_EXTRAP[role])
        digest.update(role.encode())
        digest.update(fpath.read_bytes())
    mass = float(entries.get("reduced_mass", DEFAULT_REDUCED_MASS))
    digest.update(f"reduced_mass={mass}".encode())

    ds = MolecularDataset(V_H2=curves["h2_ground"], V_g=curves["ion_g"],
                          V_u=curves["ion_u"], mu_ug=curves["dipole_ug"],
                          reduced_mass=mass, checksum=digest.hexdigest(),
                          source=str(root))
    validate_dataset(ds)
    return ds


def validate_dataset(ds: MolecularDataset) -> None:
    """Asymptotic and monotonicity checks; raises DatasetError naming the
    first violated invariant."""
    checks = [
        ("ion g-state asymptote", abs(eval_curve(ds.V_g, 30.0) + 0.5) < 1e-2),
        ("g/u degeneracy at 30 bohr",
         abs(eval_curve(ds.V_u, 30.0) - eval_curve(ds.V_g, 30.0)) < 1e-2),
        ("neutral asymptote", abs(eval_curve(ds.V_H2, 30.0) + 1.0) < 1e-2),
        ("charge-resonance dipole",
         abs(eval_curve(ds.mu_ug, 15.0) / 15.0 - 0.5) < 0.025),
        ("positive reduced mass", ds.reduced_mass > 0.0),
    ]
    for name, ok in checks:
        if not ok:
            raise DatasetError(f"dataset invariant violated: {name}")

    r_pos = np.linspace(0.05, 40.0, 2400)
    ip1, ipg, ipu = ionization_potentials(ds, r_pos)
    if not np.all(ip1 > 0.0):
        raise DatasetError("dataset invariant violated: Ip1 must stay positive")
    if not (np.all(ipg > 0.0) and np.all(ipu > 0.0)):
        raise DatasetError("dataset invariant violated: ion-channel potentials "
                           "must stay below the Coulomb curve")

    r_mono = np.linspace(1.0, 6.0, 1000)
    ip1, ipg, _ = ionization_potentials(ds, r_mono)
    if not np.all(np.diff(ip1) < 0.0):
        raise DatasetError("dataset invariant violated: Ip1 not monotonically "
                           "decreasing on [1, 6] bohr")
    if not np.all(np.diff(ipg) < 0.0):
        raise DatasetError("dataset invariant violated: Ipg not monotonically "
                           "decreasing on [1, 6] bohr")
