"""Hierarchical (bank / mat / subarray / cell array) performance estimate.

Latencies are additive compositions of peripheral and cell components in the
style of NVSim; area and per-level energy are not modelled.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Mapping, Optional, Sequence


@dataclass(frozen=True)
class MemoryOrganization:
    banks: tuple[int, int] = (4, 1)
    mats_per_bank: tuple[int, int] = (2, 1)
    subarrays_per_mat: tuple[int, int] = (4, 2)
    cells_per_array: tuple[int, int] = (128, 64)
    word_length: int = 128

    def __post_init__(self):
        for name in ("banks", "mats_per_bank", "subarrays_per_mat", "cells_per_array"):
            dims = getattr(self, name)
            if len(dims) != 2 or any(not isinstance(d, int) or d < 1 for d in dims):
                raise ValueError(f"{name} must be two positive integers, got {dims!r}")
        if self.word_length < 1:
            raise ValueError("word_length must be >= 1")

    @property
    def bits(self) -> int:
        return math.prod(
            math.prod(d)
            for d in (self.banks, self.mats_per_bank, self.subarrays_per_mat, self.cells_per_array)
        )


@dataclass(frozen=True)
class PeripheralTimings:
    write_peripheral: float = 133.9e-12
    cell_switch: float = 630e-12
    sense_amp: float = 1.45e-9
    bitline_parasitic: float = 3.5e-12
    decoder_peripheral: float = 150e-12
    hall_measurement: float = 0.7e-9

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if value < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class LatencyBreakdown:
    components: tuple[tuple[str, float], ...]

    @property
    def total(self) -> float:
        return math.fsum(v for _, v in self.components)

    def __getitem__(self, label: str) -> float:
        return dict(self.components)[label]


@dataclass(frozen=True)
class TechComparisonEntry:
    technology: str
    write_latency: float = math.nan
    read_latency: float = math.nan
    energy_per_bit: float = math.nan
    endurance: str = ""
    nonvolatile: bool = True
    flags: tuple[str, ...] = field(default=())


def capacity(org: MemoryOrganization) -> int:
    """Capacity in bytes."""
    bits = org.bits
    if bits % 8:
        raise ValueError(f"{bits} bits is not a whole number of bytes")
    return bits // 8


def write_latency(org: MemoryOrganization, timings: PeripheralTimings) -> LatencyBreakdown:
    return LatencyBreakdown(
        (("peripheral", timings.write_peripheral), ("cell_switch", timings.cell_switch))
    )


def read_latency(org: MemoryOrganization, timings: PeripheralTimings) -> LatencyBreakdown:
    return LatencyBreakdown(
        (
            ("sense_amp", timings.sense_amp),
            ("bitline_parasitic", timings.bitline_parasitic),
            ("decoder_peripheral", timings.decoder_peripheral),
            ("hall_measurement", timings.hall_measurement),
        )
    )


def _blank(text: str) -> float:
    return float(text) if text.strip() else math.nan


def load_tech_table(path=None) -> list[TechComparisonEntry]:
    if path is None:
        text = resources.files("meafmram.data").joinpath("tech_comparison.csv").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    out = []
    for row in csv.DictReader(io.StringIO("\n".join(lines))):
        out.append(
            TechComparisonEntry(
                technology=row["technology"],
                write_latency=_blank(row["write_latency_s"]),
                read_latency=_blank(row["read_latency_s"]),
                energy_per_bit=_blank(row["energy_per_bit_J"]),
                endurance=row.get("endurance", ""),
                nonvolatile=bool(int(row["nonvolatile"])),
            )
        )
    return out


DEVIATION_LIMIT = 0.10
_METRICS = (
    ("write_latency", "write_latency"),
    ("read_latency", "read_latency"),
    ("energy_per_bit", "energy_per_bit"),
)


def tech_comparison_report(
    entries: Sequence[TechComparisonEntry],
    me_afmram_results: Optional[Mapping[str, float]] = None,
    technology: str = "ME-AFMRAM",
) -> list[TechComparisonEntry]:
    """Replace the ME-AFMRAM row with computed values, flagging any metric
    more than 10 % away from the transcribed row."""
    if not entries:
        raise ValueError("empty comparison table")
    if not me_afmram_results:
        return list(entries)
    out = []
    for entry in entries:
        if entry.technology != technology:
            out.append(entry)
            continue
        updates, flags = {}, []
        for key, attr in _METRICS:
            if key not in me_afmram_results:
                continue
            value = float(me_afmram_results[key])
            ref = getattr(entry, attr)
            if math.isfinite(ref) and abs(value - ref) > DEVIATION_LIMIT * abs(ref):
                flags.append(key)
            updates[attr] = value
        out.append(replace(entry, flags=tuple(flags), **updates))
    return out


def write_report_csv(rows: Sequence[TechComparisonEntry], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["technology", "write_latency_s", "read_latency_s", "energy_per_bit_J",
             "nonvolatile", "flags"]
        )
        for r in rows:
            writer.writerow(
                [r.technology, _fmt(r.write_latency), _fmt(r.read_latency),
                 _fmt(r.energy_per_bit), int(r.nonvolatile), ";".join(r.flags)]
            )


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else repr(x)
