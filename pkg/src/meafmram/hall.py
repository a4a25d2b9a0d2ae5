"""Anomalous-Hall (AH) read-out of the boundary magnetization."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from . import _yaml
from .constants import MU0
from .errors import ConfigError

# |V_AHE| a current-latch sense amplifier resolves without instrumentation amps
CONVENTIONAL_SENSE_THRESHOLD = 1e-3


@dataclass(frozen=True)
class HallMaterial:
    name: str
    R_s: float
    t_hall: float
    T_op: float
    room_temp_ok: bool = True
    kind: str = ""

    def __post_init__(self):
        if not (self.R_s > 0 and self.t_hall > 0):
            raise ValueError(f"{self.name}: R_s and t_hall must be > 0")

    @property
    def coefficient_per_thickness(self) -> float:
        """R_s / t_hall [Ohm/T]."""
        return self.R_s / self.t_hall


@dataclass(frozen=True)
class ReadSetup:
    I_hall: float = 2e-3
    V_offset: float = 0.0
    V_threshold: float = 0.0
    k: float = 1.0
    # relative excess of the '1' signal over the '0' signal before compensation
    asymmetry: float = 0.0

    def __post_init__(self):
        if not (self.I_hall > 0 and self.k > 0):
            raise ValueError("I_hall and k must be > 0")
        if self.V_threshold < 0:
            raise ValueError("V_threshold must be >= 0")


@dataclass(frozen=True)
class MaterialRow:
    name: str
    R_s_per_t: float
    V_AHE: float
    detectable: bool


def proximity_moment(V_ME: float, k: float = 1.0) -> float:
    """Proximity-induced magnetization [A/m] with ``mu0 M_z = k V_ME``."""
    return k * V_ME / MU0


def v_ahe(mat: HallMaterial, setup: ReadSetup, M_z: float) -> float:
    return MU0 * mat.R_s / mat.t_hall * setup.I_hall * M_z


def raw_signal(mat: HallMaterial, setup: ReadSetup, V_ME: float) -> float:
    """Hall voltage for node voltage ``V_ME`` including the 0/1 imbalance."""
    v = v_ahe(mat, setup, proximity_moment(V_ME, setup.k))
    return v * (1 + setup.asymmetry) if v > 0 else v


def compensation_offset(v_one: float, v_zero: float) -> float:
    """Offset that centres the two state signals symmetrically about zero."""
    return 0.5 * (v_one + v_zero)


def sense_bit(v: float, setup: ReadSetup) -> Optional[int]:
    """Threshold a Hall voltage to 1, 0 or None (indeterminate)."""
    x = v - setup.V_offset
    if x > setup.V_threshold:
        return 1
    if x < -setup.V_threshold:
        return 0
    return None


def compare_materials(
    catalog: Sequence[HallMaterial],
    setup: ReadSetup | None = None,
    V_ME: float = 0.3,
    threshold: float = CONVENTIONAL_SENSE_THRESHOLD,
) -> list[MaterialRow]:
    if not catalog:
        raise ValueError("empty material catalog")
    setup = setup or ReadSetup()
    M_z = proximity_moment(V_ME, setup.k)
    rows = []
    for mat in catalog:
        v = v_ahe(mat, setup, M_z)
        rows.append(MaterialRow(mat.name, mat.coefficient_per_thickness, v, abs(v) >= threshold))
    rows.sort(key=lambda r: r.R_s_per_t, reverse=True)
    return rows


def write_comparison_csv(rows: Iterable[MaterialRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "R_s_per_t_Ohm_per_T", "V_AHE_V", "detectable"])
        for r in rows:
            writer.writerow([r.name, repr(r.R_s_per_t), repr(r.V_AHE), int(r.detectable)])


def load_catalog(path=None) -> list[HallMaterial]:
    """Load a material list; the bundled catalog when ``path`` is None."""
    if path is None:
        text = resources.files("meafmram.data").joinpath("hall_materials.yaml").read_text()
    else:
        text = Path(path).read_text()
    entries = _yaml.load(text)
    if not isinstance(entries, list):
        raise ConfigError("material catalog must be a list of entries")
    out = []
    for i, e in enumerate(entries):
        try:
            out.append(
                HallMaterial(
                    name=str(e["name"]), R_s=float(e["R_s"]), t_hall=float(e["t_hall"]),
                    T_op=float(e["T_op"]), room_temp_ok=bool(e.get("room_temp_ok", True)),
                    kind=str(e.get("kind", "")),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"catalog entry {i}: {exc}") from exc
    return out


def catalog_entry(name: str, catalog: Sequence[HallMaterial] | None = None) -> HallMaterial:
    for mat in catalog or load_catalog():
        if mat.name == name:
            return mat
    raise KeyError(name)
