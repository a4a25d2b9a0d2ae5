"""Closed-form device physics of the chromia ME-AFM memory cell.

Domain-wall (DW) reversal is driven by the magnetoelectric (ME) pressure
``F = |2 alpha_ME E H|``.  Above the de-pinning pressure ``F_d`` the wall moves
in the viscous flow regime, below it the wall creeps thermally.  All functions
take SI inputs and are pure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .constants import GAMMA_E, KB, MU0
from .errors import RegimeError

# nominal write operating point: 0.3 V across 10 nm of chromia, 0.5 T bias
NOMINAL_E = 3.0e7
NOMINAL_B = 0.5
NOMINAL_T = 292.0
# pressure at which the flow time is pinned to 0.22 ns
FLOW_REFERENCE_F = 74.2
FLOW_REFERENCE_TIME = 0.22e-9
CREEP_REFERENCE_TIME = 1.0e-3

DEFAULT_DW_WIDTH = 70e-9


class Regime(str, enum.Enum):
    FLOW = "Flow"
    CREEP = "Creep"


class Ordering(str, enum.Enum):
    ORDERED = "Ordered"
    DISORDERED = "Disordered"


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ValueError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class MaterialParams:
    """Chromia material constants.  Field names double as config keys."""

    M_s: float = 2.6e5
    alpha_ME: float = 3.1e-12
    K_u: float = 7300.0
    alpha_G: float = 2e-4
    F_d: float = 25.0
    A_ex: float = DEFAULT_DW_WIDTH**2 * 7300.0
    gamma: float = GAMMA_E
    T_neel: float = 308.0
    eps_r: float = 11.0
    E_breakdown: float = 2e8

    def __post_init__(self):
        _require_positive(
            M_s=self.M_s, alpha_ME=self.alpha_ME, K_u=self.K_u, A_ex=self.A_ex,
            gamma=self.gamma, T_neel=self.T_neel, E_breakdown=self.E_breakdown,
        )
        if not 0 < self.alpha_G < 1:
            raise ValueError(f"alpha_G must lie in (0, 1), got {self.alpha_G!r}")
        if self.F_d < 0:
            raise ValueError(f"F_d must be >= 0, got {self.F_d!r}")
        if self.eps_r < 1:
            raise ValueError(f"eps_r must be >= 1, got {self.eps_r!r}")

    @classmethod
    def boron_doped(cls, **overrides) -> "MaterialParams":
        """Boron-doped chromia: Neel temperature raised to ~400 K."""
        return cls(**{"T_neel": 400.0, **overrides})


@dataclass(frozen=True)
class CellGeometry:
    l: float = 60e-9
    w: float = 60e-9
    t: float = 10e-9

    def __post_init__(self):
        _require_positive(l=self.l, w=self.w, t=self.t)

    @property
    def area(self) -> float:
        return self.l * self.w

    @property
    def volume(self) -> float:
        return self.l * self.w * self.t


@dataclass(frozen=True)
class DwDynamicsParams:
    lambda_dw: float = DEFAULT_DW_WIDTH
    alpha_plus: float = field(default=None)  # type: ignore[assignment]
    mean_free_path: float = 60e-9

    def __post_init__(self):
        if self.alpha_plus is None:
            object.__setattr__(self, "alpha_plus", calibrate_alpha_plus(lambda_dw=self.lambda_dw))
        _require_positive(
            lambda_dw=self.lambda_dw, alpha_plus=self.alpha_plus,
            mean_free_path=self.mean_free_path,
        )


@dataclass(frozen=True)
class CreepParams:
    eps_dw: float
    sigma_dw: float
    S_dw: float
    T: float = NOMINAL_T

    def __post_init__(self):
        _require_positive(eps_dw=self.eps_dw, sigma_dw=self.sigma_dw, S_dw=self.S_dw, T=self.T)

    @classmethod
    def calibrated(
        cls,
        mat: MaterialParams | None = None,
        geom: CellGeometry | None = None,
        T: float = NOMINAL_T,
        target: float = CREEP_REFERENCE_TIME,
    ) -> "CreepParams":
        """Creep parameters with ``eps = sqrt(A K)`` and ``sigma`` solved so that
        ``creep_time(F=0) == target``.  The wall area is the cell cross-section ``w t``."""
        mat = mat or MaterialParams()
        geom = geom or CellGeometry()
        eps = math.sqrt(mat.A_ex * mat.K_u)
        S = geom.w * geom.t
        kT = KB * T
        rest = (mat.F_d / (2 * math.pi * eps)) * math.exp(
            S**2 * mat.F_d**2 / (4 * math.pi * kT * eps)
        )
        sigma = (target / rest) ** 2 * kT / S**3
        return cls(eps_dw=eps, sigma_dw=sigma, S_dw=S, T=T)


@dataclass(frozen=True)
class CoherentRotation:
    F_threshold: float
    E_required: float
    feasible: bool


def me_pressure(alpha_ME: float, E: float, B_applied: float) -> float:
    """ME pressure difference between the two domains [J/m^3]; ``H = B/mu0``."""
    return abs(2.0 * alpha_ME * E * (B_applied / MU0))


def dw_width(A_ex: float, K_u: float) -> float:
    _require_positive(A_ex=A_ex, K_u=K_u)
    return math.sqrt(A_ex / K_u)


def _xi(mat: MaterialParams, E: float) -> float:
    return mat.alpha_ME * E / (MU0 * mat.M_s)


def flow_velocity(mat: MaterialParams, dyn: DwDynamicsParams, E: float, F: float) -> float:
    """Viscous DW velocity [m/s].  Raises RegimeError unless ``F > F_d``."""
    if not F > mat.F_d:
        raise RegimeError(f"F = {F:g} J/m^3 does not exceed F_d = {mat.F_d:g}; use creep_time")
    if E == 0:
        raise ZeroDivisionError("flow velocity is singular at E = 0")
    xi = _xi(mat, E)
    return mat.alpha_G * mat.gamma * dyn.lambda_dw / (dyn.alpha_plus * xi**2) * (F - mat.F_d) / mat.M_s


def flow_time(
    mat: MaterialParams,
    dyn: DwDynamicsParams,
    E: float,
    F: float,
    path_length: float | None = None,
) -> float:
    if path_length is None:
        path_length = dyn.mean_free_path
    return path_length / flow_velocity(mat, dyn, E, F)


def creep_time(creep: CreepParams, F: float, F_d: float) -> float:
    """Thermally activated creep time [s] for ``0 <= F < F_d``."""
    if not 0 <= F < F_d:
        raise RegimeError(f"creep requires 0 <= F < F_d, got F = {F:g}, F_d = {F_d:g}")
    kT = KB * creep.T
    eps, S, dF = creep.eps_dw, creep.S_dw, F_d - F
    return (
        math.sqrt(creep.sigma_dw * S**3 / kT)
        * (dF / (2 * math.pi * eps))
        * math.exp(S**2 * dF**2 / (4 * math.pi * kT * eps))
    )


def reversal_regime(mat: MaterialParams, E: float, B: float) -> Regime:
    return Regime.FLOW if me_pressure(mat.alpha_ME, E, B) > mat.F_d else Regime.CREEP


def critical_field(mat: MaterialParams, B: float) -> float:
    """Electric field at which the ME pressure equals ``F_d``."""
    if B == 0:
        raise ZeroDivisionError("critical field is singular at B = 0")
    return mat.F_d / (2 * mat.alpha_ME * abs(B / MU0))


def coherent_rotation_requirement(mat: MaterialParams, B: float) -> CoherentRotation:
    if B == 0:
        raise ZeroDivisionError("coherent-rotation field is singular at B = 0")
    F_th = 4 * mat.K_u
    E_req = F_th / (2 * mat.alpha_ME * abs(B / MU0))
    return CoherentRotation(F_threshold=F_th, E_required=E_req, feasible=E_req < mat.E_breakdown)


def neel_check(mat: MaterialParams, T: float) -> Ordering:
    if not T > 0:
        raise ValueError(f"temperature must be > 0 K, got {T!r}")
    return Ordering.ORDERED if T < mat.T_neel else Ordering.DISORDERED


def calibrate_alpha_plus(
    mat: MaterialParams | None = None,
    lambda_dw: float = DEFAULT_DW_WIDTH,
    E: float = NOMINAL_E,
    F: float = FLOW_REFERENCE_F,
    path_length: float = 60e-9,
    target: float = FLOW_REFERENCE_TIME,
) -> float:
    """Drag coefficient that makes ``flow_time`` hit ``target`` at (E, F)."""
    mat = mat or MaterialParams()
    velocity = path_length / target
    xi = _xi(mat, E)
    return mat.alpha_G * mat.gamma * lambda_dw * (F - mat.F_d) / (mat.M_s * xi**2 * velocity)


def with_overrides(obj, **kwargs):
    """``dataclasses.replace`` that ignores keys the record does not have."""
    names = obj.__dataclass_fields__.keys()
    return replace(obj, **{k: v for k, v in kwargs.items() if k in names})
