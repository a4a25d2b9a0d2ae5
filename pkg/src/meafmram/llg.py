"""Macrospin Landau-Lifshitz-Gilbert integration (fields in tesla).

    dm/dt = -g' m x H - g' alpha m x (m x H),   g' = gamma / (1 + alpha^2)

Steps use the implicit midpoint rule, solved by fixed-point iteration and then
renormalized.  The rule conserves |m| and, for alpha = 0 and a static field,
m . H, up to round-off.  One or two coupled spins are supported; with two the
second is the antiparallel sublattice of an antiferromagnet.
"""

from __future__ import annotations

import math

import numba
import numpy as np

from .constants import GAMMA_E
from .errors import ResolutionError

GUARD_FACTOR = 50.0
_TOL = 1e-15
_MAX_ITER = 100


def max_stable_dt(gamma: float, *field_scales: float) -> float:
    """Largest step the resolution guard admits: 1 / (50 gamma max|H|)."""
    h = max(abs(x) for x in field_scales)
    return math.inf if h == 0 else 1.0 / (GUARD_FACTOR * gamma * h)


@numba.njit(cache=True)
def _torque(mx, my, mz, hx, hy, hz, alpha, gp):
    cx = my * hz - mz * hy
    cy = mz * hx - mx * hz
    cz = mx * hy - my * hx
    dx = my * cz - mz * cy
    dy = mz * cx - mx * cz
    dz = mx * cy - my * cx
    return -gp * (cx + alpha * dx), -gp * (cy + alpha * dy), -gp * (cz + alpha * dz)


@numba.njit(cache=True)
def _effective_field(m, happ, scale, hk, he, out):
    n = m.shape[0]
    for i in range(n):
        out[i, 0] = happ[i, 0] * scale
        out[i, 1] = happ[i, 1] * scale
        out[i, 2] = happ[i, 2] * scale + hk * m[i, 2]
        if n == 2:
            j = 1 - i
            out[i, 0] -= he * m[j, 0]
            out[i, 1] -= he * m[j, 1]
            out[i, 2] -= he * m[j, 2]


@numba.njit(cache=True)
def _midpoint_step(m, happ, scale, hk, he, alpha, gp, dt, work_h, work_mid, out):
    n = m.shape[0]
    # explicit Euler predictor
    _effective_field(m, happ, scale, hk, he, work_h)
    for i in range(n):
        tx, ty, tz = _torque(m[i, 0], m[i, 1], m[i, 2],
                             work_h[i, 0], work_h[i, 1], work_h[i, 2], alpha, gp)
        out[i, 0] = m[i, 0] + dt * tx
        out[i, 1] = m[i, 1] + dt * ty
        out[i, 2] = m[i, 2] + dt * tz
    for _ in range(_MAX_ITER):
        for i in range(n):
            for k in range(3):
                work_mid[i, k] = 0.5 * (m[i, k] + out[i, k])
        _effective_field(work_mid, happ, scale, hk, he, work_h)
        err = 0.0
        for i in range(n):
            tx, ty, tz = _torque(work_mid[i, 0], work_mid[i, 1], work_mid[i, 2],
                                 work_h[i, 0], work_h[i, 1], work_h[i, 2], alpha, gp)
            nx = m[i, 0] + dt * tx
            ny = m[i, 1] + dt * ty
            nz = m[i, 2] + dt * tz
            err = max(err, abs(nx - out[i, 0]), abs(ny - out[i, 1]), abs(nz - out[i, 2]))
            out[i, 0] = nx
            out[i, 1] = ny
            out[i, 2] = nz
        if err < _TOL:
            break
    for i in range(n):
        norm = math.sqrt(out[i, 0] ** 2 + out[i, 1] ** 2 + out[i, 2] ** 2)
        out[i, 0] /= norm
        out[i, 1] /= norm
        out[i, 2] /= norm


@numba.njit(cache=True)
def _integrate(m0, happ, hk, he, alpha, gamma, dt, n_steps, stride, ramp_steps):
    gp = gamma / (1.0 + alpha * alpha)
    n = m0.shape[0]
    m = m0.copy()
    nxt = np.empty_like(m)
    work_h = np.empty_like(m)
    work_mid = np.empty_like(m)
    n_out = n_steps // stride + 1
    traj = np.empty((n_out, n, 3))
    traj[0] = m
    o = 1
    for step in range(n_steps):
        if ramp_steps > 0:
            scale = min(1.0, (step + 0.5) / ramp_steps)
        else:
            scale = 1.0
        _midpoint_step(m, happ, scale, hk, he, alpha, gp, dt, work_h, work_mid, nxt)
        m, nxt = nxt, m
        if (step + 1) % stride == 0:
            traj[o] = m
            o += 1
    return traj


def llg_step(m, H_eff, alpha: float, gamma: float = GAMMA_E, dt: float = 1e-13) -> np.ndarray:
    """Advance one unit vector by ``dt`` in a fixed effective field."""
    m = np.asarray(m, dtype=float).reshape(1, 3)
    H = np.asarray(H_eff, dtype=float).reshape(1, 3)
    if abs(np.linalg.norm(m) - 1.0) > 1e-6:
        raise ValueError("m must be a unit vector")
    if dt > max_stable_dt(gamma, float(np.linalg.norm(H))):
        raise ResolutionError(f"dt = {dt:g} s violates the 1/(50 gamma |H|) guard")
    out = np.empty_like(m)
    _midpoint_step(m, H, 1.0, 0.0, 0.0, alpha, gamma / (1 + alpha**2), dt,
                   np.empty_like(m), np.empty_like(m), out)
    return out[0]


def integrate(
    m0,
    H_applied,
    *,
    H_k: float = 0.0,
    H_E: float = 0.0,
    alpha: float,
    gamma: float = GAMMA_E,
    dt: float,
    n_steps: int,
    stride: int = 1,
    ramp_steps: int = 0,
) -> np.ndarray:
    """Integrate one spin or an antiferromagnetic sublattice pair.

    ``m0`` and ``H_applied`` have shape (n, 3) with n in {1, 2}.  The effective
    field on spin i is ``H_applied[i] * ramp + H_k m_i,z z - H_E m_other``
    where ``ramp`` rises linearly to 1 over ``ramp_steps``.  Returns the
    trajectory sampled every ``stride`` steps, shape (n_steps//stride + 1, n, 3).
    """
    m0 = np.ascontiguousarray(m0, dtype=float)
    happ = np.ascontiguousarray(H_applied, dtype=float)
    if m0.ndim != 2 or m0.shape[1] != 3 or m0.shape[0] not in (1, 2) or happ.shape != m0.shape:
        raise ValueError("m0 and H_applied must both have shape (1, 3) or (2, 3)")
    if np.any(np.abs(np.linalg.norm(m0, axis=1) - 1) > 1e-6):
        raise ValueError("initial spins must be unit vectors")
    scale = max(float(np.max(np.linalg.norm(happ, axis=1))), abs(H_k), abs(H_E))
    if dt > max_stable_dt(gamma, scale):
        raise ResolutionError(f"dt = {dt:g} s violates the 1/(50 gamma max|H|) guard")
    if stride < 1 or n_steps < 0:
        raise ValueError("stride must be >= 1 and n_steps >= 0")
    return _integrate(m0, happ, float(H_k), float(H_E), float(alpha), float(gamma),
                      float(dt), int(n_steps), int(stride), int(ramp_steps))
