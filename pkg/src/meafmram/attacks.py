"""Magnetic-field and temperature attacks on FM and AFM storage layers."""

from __future__ import annotations

import enum
import math
import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _yaml
from .constants import GAMMA_E
from .errors import ConfigError
from .llg import integrate, max_stable_dt
from .physics import MaterialParams

# temperatures at or above this are assumed to trip an on-chip sensor
DETECTION_TEMPERATURE = 400.0

FM_DEFAULTS = dict(H_k=5e-3, H_E=0.0, alpha=0.01, duration=1e-6)
# chromia: H_k = 2K/M_s = 56 mT, damping from the material table
AFM_DEFAULTS = dict(H_k=2 * 7300.0 / 2.6e5, H_E=100.0, alpha=2e-4, duration=1e-9)


class Target(str, enum.Enum):
    FM = "FM"
    AFM = "AFM"


@dataclass(frozen=True)
class FieldAttackScenario:
    target: Target
    H_applied: tuple[float, float, float]
    staggered: bool = False
    H_k: float = 5e-3
    H_E: float = 0.0
    alpha: float = 0.01
    duration: float = 1e-6
    dt: Optional[float] = None
    gamma: float = GAMMA_E
    tilt_deg: float = 1.0
    ramp_time: float = 0.0
    n_samples: int = 2000

    def __post_init__(self):
        object.__setattr__(self, "target", Target(self.target))
        object.__setattr__(self, "H_applied", tuple(float(x) for x in self.H_applied))
        if len(self.H_applied) != 3:
            raise ValueError("H_applied must be a 3-vector")
        if self.duration <= 0:
            raise ValueError("duration must be > 0")

    @classmethod
    def fm(cls, H_applied, **kw) -> "FieldAttackScenario":
        return cls(Target.FM, H_applied, **{**FM_DEFAULTS, **kw})

    @classmethod
    def afm(cls, H_applied, staggered: bool = False, **kw) -> "FieldAttackScenario":
        return cls(Target.AFM, H_applied, staggered=staggered, **{**AFM_DEFAULTS, **kw})

    @property
    def step(self) -> float:
        hmax = max(float(np.linalg.norm(self.H_applied)), self.H_k, self.H_E)
        limit = max_stable_dt(self.gamma, hmax)
        return limit if self.dt is None else self.dt


@dataclass
class FieldAttackResult:
    switched: bool
    t: np.ndarray
    m: np.ndarray  # (samples, n_spins, 3)
    max_canting: float = math.nan

    @property
    def neel(self) -> np.ndarray:
        """(m1 - m2)/2 for AFM runs, the magnetization for FM runs."""
        if self.m.shape[1] == 2:
            return 0.5 * (self.m[:, 0] - self.m[:, 1])
        return self.m[:, 0]


def _run(scn: FieldAttackScenario, m0: np.ndarray, happ: np.ndarray):
    dt = scn.step
    n_steps = max(1, int(math.ceil(scn.duration / dt)))
    stride = max(1, n_steps // scn.n_samples)
    ramp = int(round(scn.ramp_time / dt))
    traj = integrate(
        m0, happ, H_k=scn.H_k, H_E=scn.H_E, alpha=scn.alpha, gamma=scn.gamma,
        dt=dt, n_steps=n_steps, stride=stride, ramp_steps=ramp,
    )
    t = dt * stride * np.arange(traj.shape[0])
    return t, traj


def _tilted_up(tilt_deg: float) -> np.ndarray:
    a = math.radians(tilt_deg)
    return np.array([math.sin(a), 0.0, math.cos(a)])


def fm_field_attack(scn: FieldAttackScenario) -> FieldAttackResult:
    """Single-domain ferromagnet starting along +z (tilted by ``tilt_deg``)."""
    if scn.target is not Target.FM:
        raise ValueError("fm_field_attack needs an FM scenario")
    m0 = _tilted_up(scn.tilt_deg)[None, :]
    t, traj = _run(scn, m0, np.array([scn.H_applied]))
    switched = bool(np.sign(traj[-1, 0, 2]) != np.sign(traj[0, 0, 2]))
    return FieldAttackResult(switched=switched, t=t, m=traj)


def sublattice_canting(m: np.ndarray) -> np.ndarray:
    """Per-sublattice deviation from perfect antiparallel order [rad]:
    half the angle between m1 and -m2."""
    c = np.einsum("...k,...k->...", m[..., 0, :], -m[..., 1, :])
    return 0.5 * np.arccos(np.clip(c, -1.0, 1.0))


def afm_field_attack(scn: FieldAttackScenario) -> FieldAttackResult:
    """Two coupled sublattices with the Neel vector starting along +z.

    A homogeneous field acts identically on both sublattices; a staggered one
    acts with opposite sign on the second.
    """
    if scn.target is not Target.AFM:
        raise ValueError("afm_field_attack needs an AFM scenario")
    up = _tilted_up(scn.tilt_deg)
    m0 = np.array([up, -up])
    h = np.array(scn.H_applied)
    happ = np.array([h, -h if scn.staggered else h])
    t, traj = _run(scn, m0, happ)
    neel_z = 0.5 * (traj[:, 0, 2] - traj[:, 1, 2])
    switched = bool(np.sign(neel_z[-1]) != np.sign(neel_z[0]))
    return FieldAttackResult(switched=switched, t=t, m=traj,
                             max_canting=float(np.max(sublattice_canting(traj))))


def load_scenario(path) -> FieldAttackScenario:
    """Read a scenario mapping; unspecified fields take the FM or AFM defaults."""
    data = _yaml.load(Path(path).read_text())
    if not isinstance(data, dict) or "target" not in data or "H_applied" not in data:
        raise ConfigError(f"{path}: scenario needs 'target' and 'H_applied'")
    names = {f.name for f in dataclasses.fields(FieldAttackScenario)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"{path}: unknown field(s): {', '.join(sorted(unknown))}")
    kw = {k: v for k, v in data.items() if k not in ("target", "H_applied")}
    try:
        if Target(data["target"]) is Target.FM:
            return FieldAttackScenario.fm(data["H_applied"], **kw)
        return FieldAttackScenario.afm(data["H_applied"], **kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def run_scenario(scn: FieldAttackScenario) -> FieldAttackResult:
    return fm_field_attack(scn) if scn.target is Target.FM else afm_field_attack(scn)


def neel_deflection(result: FieldAttackResult) -> float:
    """Largest tilt [rad] of the Neel vector away from the easy axis beyond its
    starting tilt; free oscillation inside the initial cone does not count."""
    l = result.neel
    polar = np.arccos(np.clip(np.abs(l[:, 2]) / np.linalg.norm(l, axis=1), 0.0, 1.0))
    return float(max(0.0, np.max(polar) - polar[0]))


def field_sweep(
    magnitudes: Sequence[float],
    staggered: bool,
    direction=(0.0, 0.0, -1.0),
    **kw,
) -> list[FieldAttackResult]:
    """AFM attack at each field magnitude along ``direction``."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    return [
        afm_field_attack(FieldAttackScenario.afm(tuple(h * d), staggered=staggered, **kw))
        for h in magnitudes
    ]


class DataState(str, enum.Enum):
    INTACT = "DataIntact"
    CORRUPTED = "DataCorrupted"


@dataclass(frozen=True)
class TemperatureAttackResult:
    state: DataState
    detectable: bool


def temperature_attack(
    mat: MaterialParams, T_attack: float, detection_threshold: float = DETECTION_TEMPERATURE
) -> TemperatureAttackResult:
    if not T_attack > 0:
        raise ValueError("T_attack must be > 0 K")
    state = DataState.CORRUPTED if T_attack >= mat.T_neel else DataState.INTACT
    return TemperatureAttackResult(state, T_attack >= detection_threshold)
