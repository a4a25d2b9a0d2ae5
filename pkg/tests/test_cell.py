import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meafmram import cell, physics
from meafmram.cell import CellCircuit, CellState, Segment
from meafmram.errors import ConfigError, ResolutionError, WriteBlocked
from meafmram.physics import CellGeometry

CIRC = CellCircuit()


def test_defaults_match_physics_core():
    mat, dyn = physics.MaterialParams(), physics.DwDynamicsParams()
    F = physics.me_pressure(mat.alpha_ME, 3e7, 0.5)
    assert CIRC.tau_flow == pytest.approx(physics.flow_time(mat, dyn, 3e7, F, 60e-9), rel=0.02)
    from_physics = CellCircuit.from_physics()
    assert from_physics.tau_flow == pytest.approx(CIRC.tau_flow, rel=0.02)
    assert from_physics.tau_creep == pytest.approx(1e-3, rel=0.10)


def test_electrostatic_capacitance():
    g = CellGeometry()
    c = cell.electrostatic_capacitance(g, 11.0)
    assert c == pytest.approx(35e-18, rel=0.02)
    assert c / cell.QUOTED_C_EL > 5
    assert CIRC.C_EL == c
    wide = CellGeometry(l=120e-9)
    thick = CellGeometry(t=20e-9)
    assert cell.electrostatic_capacitance(wide, 11.0) == pytest.approx(2 * c, rel=1e-12)
    assert cell.electrostatic_capacitance(thick, 11.0) == pytest.approx(c / 2, rel=1e-12)


def test_quoted_capacitance_configurable():
    circ = CellCircuit(C_EL=cell.QUOTED_C_EL)
    assert circ.C_EL == 5.8e-18
    # recalibrated driver energy keeps the nominal total
    assert cell.write_bit(circ, 1, 0.3).energy == pytest.approx(0.063e-12, rel=1e-9)


@pytest.mark.parametrize(
    "V,bit", [(0.3, 1), (-0.3, 0), (0.28, 1), (-0.28, 0), (0.0, None), (0.2, None), (-0.26, None)]
)
def test_cell_state_threshold(V, bit):
    s = CellState.from_voltage(V, CIRC)
    assert s.stored_bit == bit
    assert -1.0 <= s.M <= 1.0


def test_step_response_matches_rc_oracle():
    tr = cell.simulate_transient(CIRC, [Segment(0.0, 0.3, WE=1)], t_end=3e-9)
    analytic = 0.3 * (1 - np.exp(-tr.t / CIRC.tau_flow))
    assert np.max(np.abs(tr.V_ME - analytic)) < 1e-12


def test_zero_drive_stays_zero():
    tr = cell.simulate_transient(CIRC, [Segment(0.0, 0.0, WE=1)], t_end=1e-9)
    assert np.all(tr.V_ME == 0.0)


def test_alternating_writes_and_hold():
    segs = cell.fig3_waveform()
    tr = cell.simulate_transient(CIRC, segs, t_end=segs[-1].t_start + 4e-9)
    for seg, nxt in zip(segs[:-2], segs[1:-1]):
        inside = (tr.t >= seg.t_start) & (tr.t < nxt.t_start)
        assert np.max(tr.V_ME[inside] / seg.V_G) >= 0.95
    hold = tr.WE == 0
    assert np.all(tr.regime[hold] == "Creep")
    assert CellState.from_voltage(float(tr.V_ME[-1]), CIRC).stored_bit == 0


def test_regime_consistency():
    segs = [Segment(0, 0.3), Segment(1e-9, 0.15), Segment(2e-9, -0.3), Segment(3e-9, 0.3, WE=0)]
    tr = cell.simulate_transient(CIRC, segs, t_end=4e-9)
    flow = (tr.WE == 1) & (np.abs(tr.V_G) > CIRC.V_crit)
    assert np.all(tr.regime[flow] == "Flow")
    assert np.all(tr.regime[~flow] == "Creep")


def test_trace_continuity():
    tr = cell.simulate_transient(CIRC, cell.fig3_waveform(), t_end=16e-9)
    dt = tr.t[1] - tr.t[0]
    # no step can move further than the full RC slew over that step
    slew = np.abs(tr.V_G[:-1] - tr.V_ME[:-1]) * (1 - math.exp(-dt / CIRC.tau_flow))
    assert np.all(np.abs(np.diff(tr.V_ME)) <= slew + 1e-15)
    assert np.all(np.diff(tr.t) > 0)


def test_resolution_guard():
    with pytest.raises(ResolutionError):
        cell.simulate_transient(CIRC, [Segment(0, 0.3)], dt=CIRC.tau_flow / 10)


def test_empty_waveform():
    with pytest.raises(ValueError):
        cell.simulate_transient(CIRC, [])


def test_determinism():
    a = cell.simulate_transient(CIRC, cell.fig3_waveform(), t_end=14e-9)
    b = cell.simulate_transient(CIRC, cell.fig3_waveform(), t_end=14e-9)
    assert np.array_equal(a.V_ME, b.V_ME)


def test_write_nominal():
    w = cell.write_bit(CIRC, 1, 0.3)
    assert w.completed
    assert w.latency == pytest.approx(0.63e-9, rel=0.10)
    # 5% settling on an exponential is ln(20) time constants
    assert w.latency == pytest.approx(math.log(20) * CIRC.tau_flow, rel=1e-6)
    assert w.energy == pytest.approx(0.063e-12, rel=0.10)
    assert w.final_state.stored_bit == 1


def test_write_blocked_below_vcrit():
    with pytest.raises(WriteBlocked):
        cell.write_bit(CIRC, 1, 0.15)


@given(st.floats(0.21, 2.0))
@settings(max_examples=25, deadline=None)
def test_write_symmetry(V):
    w1, w0 = cell.write_bit(CIRC, 1, V), cell.write_bit(CIRC, 0, V)
    assert w1.latency == w0.latency
    assert w1.energy == w0.energy
    assert w1.energy >= 0.5 * CIRC.C_EL * V**2


def test_write_latency_converges_in_dt():
    coarse = cell.write_bit(CIRC, 1, 0.3, dt=CIRC.tau_flow / 40).latency
    fine = cell.write_bit(CIRC, 1, 0.3, dt=CIRC.tau_flow / 80).latency
    assert abs(coarse - fine) / fine < 0.01


def test_hold_retention():
    s = CellState.from_voltage(0.3, CIRC)
    assert cell.hold_retention(CIRC, s, 0.0) == s
    short = cell.hold_retention(CIRC, s, 0.01 * CIRC.tau_creep)
    assert short.V_ME == pytest.approx(0.3 * math.exp(-0.01), rel=1e-12)
    assert short.stored_bit == 1
    assert cell.hold_retention(CIRC, s, 10 * CIRC.tau_creep).stored_bit is None


def test_hold_matches_transient():
    tr = cell.simulate_transient(CIRC, [Segment(0.0, 0.0, WE=0)], t_end=1e-8, V0=0.3)
    held = cell.hold_retention(CIRC, CellState.from_voltage(0.3, CIRC), float(tr.t[-1]))
    assert tr.V_ME[-1] == pytest.approx(held.V_ME, rel=1e-12)


def test_trace_csv(tmp_path):
    tr = cell.simulate_transient(CIRC, [Segment(0.0, 0.3)], t_end=1e-10)
    path = tmp_path / "trace.csv"
    tr.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,V_G,V_ME,M,regime,WE,RE"
    assert len(lines) == len(tr.t) + 1


def test_load_waveform(tmp_path):
    path = tmp_path / "w.yaml"
    path.write_text("segments:\n  - {t_start: 0, V_G: 0.3}\n  - {t_start: 1e-9, V_G: 0, WE: 0, RE: 1}\n"
                    "t_end: 2e-9\n")
    segs, t_end = cell.load_waveform(path)
    assert segs == [Segment(0.0, 0.3, 1, 0), Segment(1e-9, 0.0, 0, 1)]
    assert t_end == 2e-9


@pytest.mark.parametrize("text", ["segments: []\n", "foo: 1\n", "segments:\n  - {V_G: 0.3}\n"])
def test_load_waveform_errors(tmp_path, text):
    path = tmp_path / "w.yaml"
    path.write_text(text)
    with pytest.raises(ConfigError):
        cell.load_waveform(path)
