"""YAML configuration: one section per parameter record, SI units.

A user file only needs the keys it changes; everything else falls back to the
bundled ``default_config.yaml``.
"""

from __future__ import annotations

import copy
import dataclasses
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import yaml

from . import _yaml
from .array_model import MemoryOrganization, PeripheralTimings
from .cell import CellCircuit
from .errors import ConfigError
from .hall import ReadSetup
from .physics import CellGeometry, CreepParams, DwDynamicsParams, MaterialParams

DEFAULT_SEED = 20200419

_SECTIONS = {
    "material": MaterialParams,
    "geometry": CellGeometry,
    "dynamics": DwDynamicsParams,
    "creep": CreepParams,
    "circuit": CellCircuit,
    "read": ReadSetup,
    "organization": MemoryOrganization,
    "timings": PeripheralTimings,
}
_OPERATING_KEYS = {"V_G", "B", "T"}
_ENCRYPTION_KEYS = {"line_width", "scheme", "counter_width", "d_cnot", "d_xor_cmos",
                    "t_aes", "t_write_base", "e_aes", "e_xor_cmos", "e_cnot"}


def _default_tree() -> dict:
    text = resources.files("meafmram.data").joinpath("default_config.yaml").read_text()
    return _yaml.load(text)


def _parse(text: str, source: str) -> dict:
    try:
        data = _yaml.load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"{source}: {where}: {exc.problem}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping of sections")
    return data


@dataclass(frozen=True)
class SimConfig:
    material: MaterialParams
    geometry: CellGeometry
    dynamics: DwDynamicsParams
    creep: CreepParams
    circuit: CellCircuit
    read: ReadSetup
    organization: MemoryOrganization
    timings: PeripheralTimings
    V_G: float
    B: float
    T: float
    encryption: dict
    tree: dict

    @property
    def E(self) -> float:
        return self.V_G / self.geometry.t

    def with_value(self, dotted: str, value: Any) -> "SimConfig":
        """Copy with one ``section.key`` (or operating-point key) replaced."""
        tree = copy.deepcopy(self.tree)
        section, _, key = dotted.rpartition(".")
        if not section:
            section = "operating_point"
        tree.setdefault(section, {})[key] = value
        return build_config(tree, source=f"override {dotted}")


def _make(cls, values: dict, section: str, source: str, **extra):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(values) - names
    if unknown:
        raise ConfigError(f"{source}: [{section}] unknown field(s): {', '.join(sorted(unknown))}")
    kwargs = {}
    for k, v in values.items():
        kwargs[k] = tuple(v) if isinstance(v, list) else v
    try:
        return cls(**kwargs, **extra)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: [{section}] {exc}") from exc


def build_config(tree: dict, source: str = "<config>") -> SimConfig:
    unknown = set(tree) - set(_SECTIONS) - {"operating_point", "encryption"}
    if unknown:
        raise ConfigError(f"{source}: unknown section(s): {', '.join(sorted(unknown))}")
    for name, sec in tree.items():
        if not isinstance(sec, dict):
            raise ConfigError(f"{source}: section [{name}] must be a mapping")

    op = tree.get("operating_point", {})
    bad = set(op) - _OPERATING_KEYS
    if bad:
        raise ConfigError(f"{source}: [operating_point] unknown field(s): {', '.join(sorted(bad))}")
    bad = set(tree.get("encryption", {})) - _ENCRYPTION_KEYS
    if bad:
        raise ConfigError(f"{source}: [encryption] unknown field(s): {', '.join(sorted(bad))}")
    V_G, B, T = float(op.get("V_G", 0.3)), float(op.get("B", 0.5)), float(op.get("T", 292.0))

    material = _make(MaterialParams, tree.get("material", {}), "material", source)
    geometry = _make(CellGeometry, tree.get("geometry", {}), "geometry", source)
    dynamics = _make(DwDynamicsParams, tree.get("dynamics", {}), "dynamics", source)
    creep_sec = tree.get("creep")
    if creep_sec:
        creep = _make(CreepParams, {"T": T, **creep_sec}, "creep", source)
    else:
        try:
            creep = CreepParams.calibrated(material, geometry, T)
        except ValueError as exc:
            raise ConfigError(f"{source}: [creep] {exc}") from exc
    circuit = _make(CellCircuit, tree.get("circuit", {}), "circuit", source,
                    geometry=geometry, material=material, B_applied=B)
    read = _make(ReadSetup, tree.get("read", {}), "read", source)
    organization = _make(MemoryOrganization, tree.get("organization", {}), "organization", source)
    timings = _make(PeripheralTimings, tree.get("timings", {}), "timings", source)
    return SimConfig(material, geometry, dynamics, creep, circuit, read, organization,
                     timings, V_G, B, T, dict(tree.get("encryption", {})), tree)


def load_config(path: Optional[str | Path] = None) -> SimConfig:
    """Defaults overlaid with the sections of ``path`` (if given)."""
    tree = _default_tree()
    source = "<defaults>"
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        source = str(path)
        user = _parse(path.read_text(), source)
        for section, values in user.items():
            if values is None:
                continue
            if not isinstance(values, dict):
                raise ConfigError(f"{source}: section [{section}] must be a mapping")
            tree.setdefault(section, {}).update(values)
    return build_config(tree, source)


def load_reference_values() -> dict:
    text = resources.files("meafmram.data").joinpath("reference_values.yaml").read_text()
    return _yaml.load(text)["values"]
