"""Synthetic power traces and unsupervised DPA / CPA bit recovery.

STT-MRAM accesses draw a bit-dependent current, modelled as a pulse of height
``P0 (1 + delta * bit)``.  The ME-AFM cell writes with the same field magnitude
for both polarities (and the read offset is compensated), so its traces use
``delta = 0`` regardless of what the caller asks for.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AnalysisError


class Tech(str, enum.Enum):
    STT_MRAM = "STT_MRAM"
    SMART = "SMART"


@dataclass
class PowerTraceSet:
    traces: np.ndarray  # (n_accesses, n_samples)
    ground_truth: np.ndarray
    access_type: str
    tech: Tech
    noise_sigma: float
    delta: float
    P0: float = 1.0

    def __post_init__(self):
        if self.traces.shape[0] != len(self.ground_truth):
            raise ValueError("one trace per access is required")


@dataclass
class DpaResult:
    recovered: np.ndarray
    confidence: np.ndarray
    success_rate: float
    difference_of_means: float
    threshold: float
    cpa_correlation: float
    cpa_sample: int

    def to_json(self) -> str:
        bits = np.asarray(self.recovered, dtype=np.uint8)
        return json.dumps(
            {
                "n_bits": int(bits.size),
                "recovered_hex": np.packbits(bits).tobytes().hex(),
                "success_rate": self.success_rate,
                "difference_of_means": self.difference_of_means,
                "threshold": self.threshold,
                "cpa_correlation": self.cpa_correlation,
                "cpa_sample": self.cpa_sample,
                "per_bit_statistic": [round(float(c), 6) for c in self.confidence],
            },
            indent=2,
        )


def pulse_template(n_samples: int = 64) -> np.ndarray:
    """Raised-cosine access pulse occupying the middle half of the window."""
    t = np.arange(n_samples)
    lo, hi = n_samples // 4, 3 * n_samples // 4
    out = np.zeros(n_samples)
    x = (t[lo:hi] - lo) / (hi - lo - 1)
    out[lo:hi] = 0.5 * (1 - np.cos(2 * np.pi * x))
    return out


def generate_power_traces(
    tech: Tech | str,
    bits: Sequence[int],
    access_type: str = "write",
    delta: float = 0.2,
    noise_sigma: float = 0.04,
    seed: int = 0,
    n_samples: int = 64,
    P0: float = 1.0,
) -> PowerTraceSet:
    tech = Tech(tech)
    if delta < 0 or noise_sigma < 0:
        raise ValueError("delta and noise_sigma must be >= 0")
    if access_type not in ("read", "write"):
        raise ValueError("access_type must be 'read' or 'write'")
    bits = np.asarray(bits, dtype=np.uint8)
    if np.any(bits > 1):
        raise ValueError("bits must be 0/1")
    if tech is Tech.SMART:
        delta = 0.0
    rng = np.random.default_rng(seed)
    amp = P0 * (1.0 + delta * bits.astype(float))
    traces = amp[:, None] * pulse_template(n_samples)[None, :]
    if noise_sigma > 0:
        traces = traces + rng.normal(0.0, noise_sigma, traces.shape)
    return PowerTraceSet(traces, bits, access_type, tech, noise_sigma, delta, P0)


def _two_means(x: np.ndarray, max_iter: int = 100) -> float:
    lo, hi = np.percentile(x, [25, 75])
    for _ in range(max_iter):
        thr = 0.5 * (lo + hi)
        upper = x > thr
        if upper.all() or not upper.any():
            break
        new_lo, new_hi = x[~upper].mean(), x[upper].mean()
        if new_lo == lo and new_hi == hi:
            break
        lo, hi = new_lo, new_hi
    return 0.5 * (lo + hi)


def dpa_attack(ts: PowerTraceSet) -> DpaResult:
    """Recover bits by splitting traces into two clusters on pulse amplitude.

    The amplitude of each trace is its average over the samples where the
    mean trace exceeds half its peak.  The higher-power cluster is read as 1.
    """
    traces = np.asarray(ts.traces, dtype=float)
    n = traces.shape[0]
    if n < 100:
        raise ValueError("DPA needs at least 100 accesses")
    if np.ptp(traces, axis=0).max() == 0:
        raise AnalysisError("all traces are identical; nothing to separate")
    mean_trace = traces.mean(axis=0)
    window = mean_trace >= 0.5 * mean_trace.max()
    amplitude = traces[:, window].mean(axis=1)
    if np.ptp(amplitude) == 0:
        raise AnalysisError("pulse amplitudes are identical; nothing to separate")

    thr = _two_means(amplitude)
    recovered = (amplitude > thr).astype(np.uint8)
    ones, zeros = amplitude[recovered == 1], amplitude[recovered == 0]
    if len(ones) > 1 and len(zeros) > 1:
        se = np.sqrt(ones.var(ddof=1) / len(ones) + zeros.var(ddof=1) / len(zeros))
        dom = float((ones.mean() - zeros.mean()) / se) if se > 0 else float("inf")
        spread = np.sqrt(0.5 * (ones.var(ddof=1) + zeros.var(ddof=1)))
    else:
        dom, spread = 0.0, amplitude.std()
    confidence = np.abs(amplitude - thr) / (spread if spread > 0 else 1.0)

    # CPA: correlate the recovered hypothesis with every time sample
    h = recovered - recovered.mean()
    centred = traces - mean_trace
    denom = np.sqrt((h**2).sum() * (centred**2).sum(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(denom > 0, (h @ centred) / denom, 0.0)
    k = int(np.argmax(np.abs(r)))

    success = float(np.mean(recovered == np.asarray(ts.ground_truth)))
    return DpaResult(recovered, confidence, success, dom, float(thr), float(r[k]), k)
