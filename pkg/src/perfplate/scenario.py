"""Scenario files: strict JSON parsing and conversion to SI value types.

Example::

    {
      "perforation": {"family": "circular_bore", "r_mm": 0.225,
                      "h_mm": 2.0, "theta_deg": 60},
      "lattice": {"xi1_mm": [3.0, 0.0], "xi2_mm": [0.0, 2.7]},
      "wave": {"phi_deg": 45, "psi_deg": 0, "c0_m_s": 343,
               "frequency_hz": 1000},
      "sweep": {"f_min_hz": 500, "f_max_hz": 5000, "n": 91,
                "spacing": "linear"}
    }

Lengths are in millimetres, angles in degrees. Unknown keys are rejected
and every error names the offending field.
"""

import json
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import ConfigError, PerfPlateError
from .geometry import (
    CircularBoreSpec,
    IncidentWave,
    LatticeGeometry,
    PerforationGeometry,
    PlateScenario,
)

__all__ = [
    "FAMILIES",
    "ScenarioConfig",
    "parse_scenario",
    "load_scenario",
]

FAMILIES = (
    "circular_bore",
    "tilted_elliptical",
    "untilted_elliptical",
    "tilted_circular_opening",
    "untilted_cylinder",
)

_KEYS = {
    "": {"name", "perforation", "lattice", "wave", "sweep"},
    "perforation": {"family", "r_mm", "a_mm", "b_mm", "h_mm", "theta_deg"},
    "lattice": {"xi1_mm", "xi2_mm"},
    "wave": {"frequency_hz", "phi_deg", "psi_deg", "c0_m_s"},
    "sweep": {"f_min_hz", "f_max_hz", "n", "spacing", "frequencies_hz"},
}
_REQUIRED = {
    "circular_bore": ("r_mm", "h_mm"),
    "tilted_circular_opening": ("r_mm", "h_mm"),
    "untilted_cylinder": ("r_mm", "h_mm"),
    "tilted_elliptical": ("a_mm", "b_mm", "h_mm"),
    "untilted_elliptical": ("a_mm", "b_mm", "h_mm"),
}
_FORBIDDEN = {
    "circular_bore": ("a_mm", "b_mm"),
    "tilted_circular_opening": ("a_mm", "b_mm"),
    "untilted_cylinder": ("a_mm", "b_mm"),
    "tilted_elliptical": ("r_mm",),
    "untilted_elliptical": ("r_mm",),
}


@dataclass(frozen=True)
class ScenarioConfig:
    family: str
    perforation: PerforationGeometry
    bore: Optional[CircularBoreSpec]
    lattice: Optional[LatticeGeometry]
    wave: Optional[IncidentWave]
    frequencies: Optional[List[float]]
    source: dict
    name: str = ""

    def plate(self) -> PlateScenario:
        if self.lattice is None:
            raise ConfigError("a lattice is required for this command", "lattice")
        wave = self.wave
        if wave is None:
            raise ConfigError("a wave block is required for this command", "wave")
        return PlateScenario(self.perforation, self.lattice, wave, self.bore)


def _check_keys(block, path):
    if not isinstance(block, dict):
        raise ConfigError("expected an object", path or "<root>")
    allowed = _KEYS[path]
    for key in block:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ConfigError(f"unknown key (allowed: {', '.join(sorted(allowed))})", where)


def _number(block, key, path, default=None, positive=False, nonneg=False):
    where = f"{path}{key}" if key.startswith("[") else f"{path}.{key}"
    if key not in block:
        if default is None:
            raise ConfigError("missing required value", where)
        return default
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"expected a finite number, got {v!r}", where)
    if positive and not v > 0:
        raise ConfigError(f"must be > 0, got {v!r}", where)
    if nonneg and not v >= 0:
        raise ConfigError(f"must be >= 0, got {v!r}", where)
    return float(v)


def _vector(block, key, path):
    where = f"{path}.{key}"
    if key not in block:
        raise ConfigError("missing required value", where)
    v = block[key]
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)):
        raise ConfigError(f"expected a list of two numbers, got {v!r}", where)
    return (float(v[0]) * 1e-3, float(v[1]) * 1e-3)


def _infer_family(p):
    theta = p.get("theta_deg", 0)
    if "r_mm" in p:
        return "circular_bore" if theta else "untilted_cylinder"
    return "tilted_elliptical" if theta else "untilted_elliptical"


def _perforation(p):
    path = "perforation"
    _check_keys(p, path)
    family = p.get("family", _infer_family(p))
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r} (choose from {', '.join(FAMILIES)})", f"{path}.family")
    for key in _FORBIDDEN[family]:
        if key in p:
            raise ConfigError(f"not used by the {family} family", f"{path}.{key}")
    for key in _REQUIRED[family]:
        if key not in p:
            raise ConfigError(f"missing required value for the {family} family", f"{path}.{key}")
    h = _number(p, "h_mm", path, nonneg=True) * 1e-3
    theta_deg = _number(p, "theta_deg", path, default=0.0)
    if not 0 <= theta_deg < 90:
        raise ConfigError(f"must lie in [0, 90), got {theta_deg!r}", f"{path}.theta_deg")
    theta = math.radians(theta_deg)
    if family.startswith("untilted") and theta != 0:
        raise ConfigError(f"the {family} family has no tilt", f"{path}.theta_deg")
    bore = None
    try:
        if family in ("circular_bore", "tilted_circular_opening", "untilted_cylinder"):
            r = _number(p, "r_mm", path, positive=True) * 1e-3
            if family == "tilted_circular_opening":
                geom = PerforationGeometry(r, r, h, theta)
            else:
                bore = CircularBoreSpec(r, h, theta)
                geom = bore.to_perforation()
        else:
            a = _number(p, "a_mm", path, positive=True) * 1e-3
            b = _number(p, "b_mm", path, positive=True) * 1e-3
            if b > a:
                raise ConfigError("semi-minor axis b must not exceed a", f"{path}.b_mm")
            geom = PerforationGeometry(a, b, h, theta)
    except ConfigError:
        raise
    except PerfPlateError as exc:
        raise ConfigError(str(exc), path) from exc
    return family, geom, bore


def _lattice(block):
    _check_keys(block, "lattice")
    xi1 = _vector(block, "xi1_mm", "lattice")
    xi2 = _vector(block, "xi2_mm", "lattice")
    try:
        return LatticeGeometry(xi1, xi2)
    except PerfPlateError as exc:
        raise ConfigError(str(exc), "lattice") from exc


def _wave(block):
    _check_keys(block, "wave")
    phi = _number(block, "phi_deg", "wave", default=0.0)
    if not abs(phi) < 90:
        raise ConfigError(f"|phi| must be < 90, got {phi!r}", "wave.phi_deg")
    psi = _number(block, "psi_deg", "wave", default=0.0)
    c0 = _number(block, "c0_m_s", "wave", default=343.0, positive=True)
    freq = _number(block, "frequency_hz", "wave", default=1000.0, positive=True)
    return IncidentWave(freq, c0, math.radians(phi), math.radians(psi))


def _sweep(block):
    _check_keys(block, "sweep")
    if "frequencies_hz" in block:
        for key in ("f_min_hz", "f_max_hz", "n", "spacing"):
            if key in block:
                raise ConfigError("cannot be combined with frequencies_hz", f"sweep.{key}")
        v = block["frequencies_hz"]
        if not (isinstance(v, list) and v):
            raise ConfigError("expected a non-empty list", "sweep.frequencies_hz")
        out = []
        for i, f in enumerate(v):
            out.append(_number({f"[{i}]": f}, f"[{i}]", "sweep.frequencies_hz", positive=True))
        return out
    f0 = _number(block, "f_min_hz", "sweep", positive=True)
    f1 = _number(block, "f_max_hz", "sweep", positive=True)
    if f1 < f0:
        raise ConfigError("must be >= f_min_hz", "sweep.f_max_hz")
    n = block.get("n", 91)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError(f"expected a positive integer, got {n!r}", "sweep.n")
    spacing = block.get("spacing", "linear")
    if spacing == "linear":
        grid = np.linspace(f0, f1, n)
    elif spacing == "log":
        grid = np.geomspace(f0, f1, n)
    else:
        raise ConfigError(f"expected 'linear' or 'log', got {spacing!r}", "sweep.spacing")
    return [float(f) for f in grid]


def parse_scenario(data: dict) -> ScenarioConfig:
    """Validate a scenario mapping and convert it to SI value types."""
    _check_keys(data, "")
    if "perforation" not in data:
        raise ConfigError("missing required block", "perforation")
    family, geom, bore = _perforation(data["perforation"])
    lattice = _lattice(data["lattice"]) if "lattice" in data else None
    wave = _wave(data["wave"]) if "wave" in data else None
    freqs = _sweep(data["sweep"]) if "sweep" in data else None
    name = data.get("name", "")
    if not isinstance(name, str):
        raise ConfigError("expected a string", "name")
    return ScenarioConfig(family, geom, bore, lattice, wave, freqs, data, name)


def load_scenario(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file: {exc.strerror}", str(path)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (line {exc.lineno})", str(path)) from exc
    return parse_scenario(data)
