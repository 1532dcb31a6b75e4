"""Run configuration: plain-text config files, presets, validation.

Config files are `key = value` lines with `#` comments.  Unknown keys
are errors, so typos fail loudly.  Named presets cover the standard
scenarios; command-line flags override file values, which override
preset values.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields
from pathlib import Path

import numpy as np

from .rates import RateModel

_SCENARIOS = ("run", "scan", "dressed")
_MODES = ("dynamic", "frozen")


@dataclass
class RunConfig:
    scenario: str = "run"
    mode: str = "dynamic"
    wavelength_nm: float = 800.0
    intensity_w_cm2: float = 1e14
    cycles: int = 12
    steps_per_cycle: int = 1000
    r_min: float = 0.1
    r_max: float = 40.0
    n_points: int = 2048
    e_max_ev: float = 20.0
    e_step_ev: float = 0.01
    trace_stride: int = 10
    absorber: bool = False
    dataset_dir: str = ""            # empty -> bundled
    out_dir: str = "out"
    # rate-model overrides (applied to every species unless species-specific)
    z_res_first: int = 1
    z_res_second: int = 2
    l: int = 0
    m: int = 0
    c2: str = "hydrogenic"           # "hydrogenic" or a number
    f_floor: float = 1e-4
    rate_field: str = "instantaneous"  # or "envelope"
    # scan controls
    scan_min_w_cm2: float = 5e13
    scan_max_w_cm2: float = 5e15
    scan_points: int = 12
    scan_intensities: str = ""       # comma list overriding min/max/points
    scan_modes: str = "dynamic,frozen"
    # dressed-curve controls
    dressed_pairs: str = "g0u3,g2u3"

    def validate(self) -> "RunConfig":
        if self.scenario not in _SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        for key in ("wavelength_nm", "intensity_w_cm2", "e_max_ev", "e_step_ev",
                    "f_floor", "scan_min_w_cm2", "scan_max_w_cm2"):
            if getattr(self, key) <= 0:
                raise ValueError(f"{key} must be positive")
        for key in ("cycles", "steps_per_cycle", "n_points", "trace_stride",
                    "scan_points"):
            if getattr(self, key) < 1:
                raise ValueError(f"{key} must be at least 1")
        if self.r_min <= 0 or self.r_max <= self.r_min:
            raise ValueError("need 0 < r_min < r_max")
        if self.rate_field not in ("instantaneous", "envelope"):
            raise ValueError("rate_field must be 'instantaneous' or 'envelope'")
        if self.c2 != "hydrogenic":
            float(self.c2)  # must parse
        return self

    def rate_models(self) -> dict[str, RateModel]:
        c2 = self.c2 if self.c2 == "hydrogenic" else float(self.c2)
        return {"H2": RateModel(z_res=self.z_res_first, l=self.l, m=self.m,
                                c2=c2, f_floor=self.f_floor),
                "g": RateModel(z_res=self.z_res_second, l=self.l, m=self.m,
                               c2=c2, f_floor=self.f_floor),
                "u": RateModel(z_res=self.z_res_second, l=self.l, m=self.m,
                               c2=c2, f_floor=self.f_floor)}

    def scan_list(self) -> list[float]:
        if self.scan_intensities.strip():
            vals = [float(s) for s in self.scan_intensities.split(",") if s.strip()]
        else:
            vals = list(np.geomspace(self.scan_min_w_cm2, self.scan_max_w_cm2,
                                     self.scan_points))
        if not vals or any(v <= 0 for v in vals):
            raise ValueError("scan intensities must be positive")
        return vals

    def dressed_pair_list(self) -> list[tuple[int, int]]:
        pairs = []
        for tok in self.dressed_pairs.split(","):
            tok = tok.strip()
            if not tok:
                continue
            if not (tok.startswith("g") and "u" in tok):
                raise ValueError(f"bad dressed pair {tok!r} (want e.g. g0u3)")
            gpart, upart = tok[1:].split("u")
            pairs.append((int(gpart), int(upart)))
        if not pairs:
            raise ValueError("no dressed pairs configured")
        return pairs


PRESETS: dict[str, dict] = {
    # single-cycle explosion scenarios
    "fig2a": dict(scenario="run", wavelength_nm=266.0, intensity_w_cm2=1e15,
                  cycles=1, mode="dynamic"),
    "fig2b": dict(scenario="run", wavelength_nm=800.0, intensity_w_cm2=1e15,
                  cycles=1, mode="dynamic"),
    # 12-cycle intensity scan
    "fig3": dict(scenario="scan", wavelength_nm=800.0, cycles=12,
                 scan_min_w_cm2=5e13, scan_max_w_cm2=5e15, scan_points=12),
    # 36-cycle KER spectra
    "fig4a": dict(scenario="run", wavelength_nm=266.0, intensity_w_cm2=2e14,
                  cycles=36, mode="dynamic"),
    "fig4b": dict(scenario="run", wavelength_nm=266.0, intensity_w_cm2=1e15,
                  cycles=36, mode="dynamic"),
    "fig4c": dict(scenario="run", wavelength_nm=266.0, intensity_w_cm2=1.2e15,
                  cycles=36, mode="dynamic"),
    "fig4d": dict(scenario="run", wavelength_nm=266.0, intensity_w_cm2=1.5e15,
                  cycles=36, mode="dynamic"),
    # dressed-curve analysis at the spectra wavelength
    "fig5": dict(scenario="dressed", wavelength_nm=266.0,
                 intensity_w_cm2=2e14, dressed_pairs="g0u3,g2u3"),
}

_FIELD_TYPES = {f.name: f.type for f in dc_fields(RunConfig)}
_BOOL_KEYS = {"absorber"}


def _coerce(key: str, raw: str):
    if key not in _FIELD_TYPES:
        raise ValueError(f"unknown config key {key!r}")
    if key in _BOOL_KEYS:
        low = raw.strip().lower()
        if low in ("1", "true", "on", "yes"):
            return True
        if low in ("0", "false", "off", "no"):
            return False
        raise ValueError(f"{key}: expected a boolean, got {raw!r}")
    current = getattr(RunConfig(), key)
    if isinstance(current, bool):
        return raw
    if isinstance(current, int):
        return int(float(raw))
    if isinstance(current, float):
        return float(raw)
    return raw


def parse_config(path: str | Path | None = None, preset: str | None = None,
                 overrides: dict | None = None) -> RunConfig:
    """Assemble a validated RunConfig from preset + file + overrides."""
    values: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}; "
                             f"available: {', '.join(sorted(PRESETS))}")
        values.update(PRESETS[preset])
    if path is not None:
        text = Path(path).read_text()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key] = _coerce(key, val)
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in _FIELD_TYPES:
            raise ValueError(f"unknown config key {key!r}")
        values[key] = val
    cfg = RunConfig(**values)
    return cfg.validate()
