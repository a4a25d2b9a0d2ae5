"""Behavioral RC model of a single ME-AFM memory cell.

The magnetoelectric node ``V_ME`` follows the gate voltage through
``R_eq * C_active``.  ``C_active`` is the flow capacitance (numerically the
flow time) while a write is enabled above the critical voltage, and the creep
capacitance otherwise.  The magnetization rides on ``V_ME`` as a clamp of
``V_ME / V_G_nominal``.

Bits are reported as ``1``, ``0`` or ``None`` (indeterminate).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from . import _yaml
from .constants import EPS0
from .errors import ConfigError, ResolutionError, WriteBlocked
from .physics import (
    NOMINAL_B,
    CellGeometry,
    CreepParams,
    DwDynamicsParams,
    MaterialParams,
    Regime,
    creep_time,
    flow_time,
    me_pressure,
)

# capacitance the authors quote for the chromia dielectric; the parallel-plate
# formula at 60x60x10 nm gives ~35 aF instead
QUOTED_C_EL = 5.8e-18
TARGET_WRITE_ENERGY = 0.063e-12
SETTLE_FRACTION = 0.05


def electrostatic_capacitance(geom: CellGeometry, eps_r: float) -> float:
    """Parallel-plate capacitance of the chromia dielectric [F]."""
    return EPS0 * eps_r * geom.area / geom.t


@dataclass(frozen=True)
class CellCircuit:
    R_eq: float = 1.0
    C_flow: float = 0.223e-9
    C_creep: float = 1e-3
    C_EL: Optional[float] = None
    V_crit: float = 0.2
    E_peripheral: Optional[float] = None
    V_G_nominal: float = 0.3
    m_th: float = 0.9
    geometry: CellGeometry = field(default_factory=CellGeometry)
    material: MaterialParams = field(default_factory=MaterialParams)
    B_applied: float = NOMINAL_B

    def __post_init__(self):
        for name in ("R_eq", "C_flow", "C_creep", "V_crit", "V_G_nominal"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not 0 < self.m_th < 1:
            raise ValueError("m_th must lie in (0, 1)")
        if self.C_EL is None:
            object.__setattr__(
                self, "C_EL", electrostatic_capacitance(self.geometry, self.material.eps_r)
            )
        if self.E_peripheral is None:
            object.__setattr__(self, "E_peripheral", calibrate_peripheral_energy(self))

    @property
    def tau_flow(self) -> float:
        return self.R_eq * self.C_flow

    @property
    def tau_creep(self) -> float:
        return self.R_eq * self.C_creep

    def physical_write_energy(self, V_G: float) -> float:
        """Electrostatic charging plus ME work on the cell volume [J]."""
        F = me_pressure(self.material.alpha_ME, V_G / self.geometry.t, self.B_applied)
        return 0.5 * self.C_EL * V_G**2 + F * self.geometry.volume

    @classmethod
    def from_physics(
        cls,
        mat: MaterialParams | None = None,
        geom: CellGeometry | None = None,
        dyn: DwDynamicsParams | None = None,
        creep: CreepParams | None = None,
        B: float = NOMINAL_B,
        V_G: float = 0.3,
        **kwargs,
    ) -> "CellCircuit":
        """Circuit whose capacitances carry the physics-core time constants."""
        mat = mat or MaterialParams()
        geom = geom or CellGeometry()
        dyn = dyn or DwDynamicsParams()
        creep = creep or CreepParams.calibrated(mat, geom)
        E = V_G / geom.t
        F = me_pressure(mat.alpha_ME, E, B)
        R_eq = kwargs.pop("R_eq", 1.0)
        return cls(
            R_eq=R_eq,
            C_flow=flow_time(mat, dyn, E, F, geom.l) / R_eq,
            C_creep=creep_time(creep, 0.0, mat.F_d) / R_eq,
            V_G_nominal=V_G,
            geometry=geom,
            material=mat,
            B_applied=B,
            **kwargs,
        )


def calibrate_peripheral_energy(
    circuit: CellCircuit, target: float = TARGET_WRITE_ENERGY, V_G: float | None = None
) -> float:
    """Driver energy that brings the nominal write to ``target`` joules."""
    V = circuit.V_G_nominal if V_G is None else V_G
    return target - circuit.physical_write_energy(V)


@dataclass(frozen=True)
class CellState:
    V_ME: float
    M: float
    stored_bit: Optional[int]

    @classmethod
    def from_voltage(cls, V_ME: float, circuit: CellCircuit) -> "CellState":
        M = float(np.clip(V_ME / circuit.V_G_nominal, -1.0, 1.0))
        if M > circuit.m_th:
            bit = 1
        elif M < -circuit.m_th:
            bit = 0
        else:
            bit = None
        return cls(V_ME=V_ME, M=M, stored_bit=bit)


@dataclass(frozen=True)
class Segment:
    """Gate drive held from ``t_start`` until the next segment begins."""

    t_start: float
    V_G: float
    WE: int = 1
    RE: int = 0


@dataclass
class TransientTrace:
    t: np.ndarray
    V_G: np.ndarray
    V_ME: np.ndarray
    M: np.ndarray
    regime: np.ndarray
    WE: np.ndarray
    RE: np.ndarray

    HEADER = ("t", "V_G", "V_ME", "M", "regime", "WE", "RE")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.HEADER)
            for row in zip(self.t, self.V_G, self.V_ME, self.M, self.regime, self.WE, self.RE):
                writer.writerow(
                    [repr(float(row[0])), repr(float(row[1])), repr(float(row[2])),
                     repr(float(row[3])), row[4], int(row[5]), int(row[6])]
                )


@dataclass(frozen=True)
class WriteResult:
    latency: float
    energy: float
    final_state: CellState
    completed: bool


def _drive_arrays(segments: Sequence[Segment], t: np.ndarray):
    starts = np.array([s.t_start for s in segments])
    if np.any(np.diff(starts) < 0):
        raise ValueError("segments must be ordered by t_start")
    idx = np.searchsorted(starts, t, side="right") - 1
    idx = np.clip(idx, 0, len(segments) - 1)
    V_G = np.array([s.V_G for s in segments])[idx]
    WE = np.array([s.WE for s in segments], dtype=int)[idx]
    RE = np.array([s.RE for s in segments], dtype=int)[idx]
    return V_G, WE, RE


def simulate_transient(
    circuit: CellCircuit,
    segments: Sequence[Segment],
    dt: float | None = None,
    t_end: float | None = None,
    V0: float = 0.0,
) -> TransientTrace:
    """Integrate the cell node over a piecewise-constant gate waveform.

    Each step applies the exact exponential update for the drive active at the
    start of the step, so step inputs reproduce the analytic RC response.
    """
    if not segments:
        raise ValueError("empty waveform")
    if dt is None:
        dt = circuit.tau_flow / 100
    if dt <= 0 or dt > circuit.tau_flow / 20:
        raise ResolutionError(f"dt = {dt:g} s exceeds tau_flow/20 = {circuit.tau_flow / 20:g} s")
    if t_end is None:
        t_end = segments[-1].t_start + 10 * circuit.tau_flow
    if t_end < segments[0].t_start:
        raise ValueError("t_end precedes the first segment")

    n = int(math.floor((t_end - segments[0].t_start) / dt + 1e-9))
    t = segments[0].t_start + dt * np.arange(n + 1)
    V_G, WE, RE = _drive_arrays(segments, t)

    flow = (WE == 1) & (np.abs(V_G) > circuit.V_crit)
    target = np.where(WE == 1, V_G, 0.0)
    decay = np.where(flow, math.exp(-dt / circuit.tau_flow), math.exp(-dt / circuit.tau_creep))

    V_ME = np.empty_like(t)
    V_ME[0] = V0
    # closed-form update over each run of constant drive
    change = np.flatnonzero((np.diff(target[:-1]) != 0) | (np.diff(decay[:-1]) != 0)) + 1
    bounds = np.concatenate(([0], change, [n]))
    for a, b in zip(bounds[:-1], bounds[1:]):
        if b <= a:
            continue
        j = np.arange(1, b - a + 1)
        V_ME[a + 1 : b + 1] = target[a] + (V_ME[a] - target[a]) * decay[a] ** j

    M = np.clip(V_ME / circuit.V_G_nominal, -1.0, 1.0)
    regime = np.where(flow, Regime.FLOW.value, Regime.CREEP.value)
    return TransientTrace(t=t, V_G=V_G, V_ME=V_ME, M=M, regime=regime, WE=WE, RE=RE)


def write_bit(
    circuit: CellCircuit, bit: int, V_G_magnitude: float = 0.3, dt: float | None = None
) -> WriteResult:
    """Write ``bit`` starting from the complementary stored state.

    Latency is the first time the node settles within 5 % of the full swing
    of its target, interpolated between grid points.
    """
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    if not V_G_magnitude > circuit.V_crit:
        raise WriteBlocked(
            f"|V_G| = {V_G_magnitude:g} V does not exceed V_crit = {circuit.V_crit:g} V"
        )
    V_target = V_G_magnitude if bit == 1 else -V_G_magnitude
    trace = simulate_transient(
        circuit, [Segment(0.0, V_target, WE=1)], dt=dt, t_end=10 * circuit.tau_flow, V0=-V_target
    )
    err = np.abs(trace.V_ME - V_target)
    limit = SETTLE_FRACTION * 2 * V_G_magnitude
    k = int(np.argmax(err <= limit))
    if err[k] > limit:
        return WriteResult(math.inf, math.nan, CellState.from_voltage(trace.V_ME[-1], circuit), False)
    if k == 0:
        latency = 0.0
    else:
        # log-linear interpolation is exact for an exponential approach
        e0, e1 = math.log(err[k - 1]), math.log(err[k])
        frac = (e0 - math.log(limit)) / (e0 - e1)
        latency = float(trace.t[k - 1] + frac * (trace.t[k] - trace.t[k - 1]))
    energy = circuit.E_peripheral + circuit.physical_write_energy(V_G_magnitude)
    final = CellState.from_voltage(float(trace.V_ME[-1]), circuit)
    return WriteResult(latency=latency, energy=energy, final_state=final, completed=True)


def hold_retention(circuit: CellCircuit, initial: CellState, duration: float) -> CellState:
    """Relax the node toward 0 V through the creep time constant."""
    if duration < 0:
        raise ValueError("duration must be >= 0")
    if duration == 0:
        return initial
    V = initial.V_ME * math.exp(-duration / circuit.tau_creep)
    return CellState.from_voltage(V, circuit)


def fig3_waveform(pulse: float = 2e-9, V: float = 0.3, hold: float = 4e-9) -> list[Segment]:
    """Alternating 1/0 writes ending on a 0, then write-enable off."""
    levels = [V, -V, V, -V, V, -V]
    segs = [Segment(i * pulse, v, WE=1, RE=0) for i, v in enumerate(levels)]
    segs.append(Segment(len(levels) * pulse, 0.0, WE=0, RE=1))
    return segs


def load_waveform(path) -> tuple[list[Segment], Optional[float]]:
    """Read ``segments: [{t_start, V_G, WE, RE}, ...]`` and optional ``t_end``."""
    data = _yaml.load(Path(path).read_text())
    if not isinstance(data, dict) or "segments" not in data:
        raise ConfigError(f"{path}: expected a mapping with a 'segments' list")
    segs = []
    for i, raw in enumerate(data["segments"]):
        try:
            segs.append(
                Segment(float(raw["t_start"]), float(raw["V_G"]),
                        int(raw.get("WE", 1)), int(raw.get("RE", 0)))
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: segment {i}: {exc}") from exc
    if not segs:
        raise ConfigError(f"{path}: empty waveform")
    t_end = data.get("t_end")
    return segs, None if t_end is None else float(t_end)
