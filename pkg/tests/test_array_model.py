import dataclasses
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from meafmram import array_model, cell
from meafmram.array_model import MemoryOrganization, PeripheralTimings

ORG = MemoryOrganization()
TIMINGS = PeripheralTimings()
ZERO = PeripheralTimings(**{f.name: 0.0 for f in dataclasses.fields(PeripheralTimings)})


def test_capacity_default():
    assert array_model.capacity(ORG) == 65536


def test_capacity_one_byte():
    org = MemoryOrganization((1, 1), (1, 1), (1, 1), (1, 8), word_length=8)
    assert array_model.capacity(org) == 1


@pytest.mark.parametrize("level", ["banks", "mats_per_bank", "subarrays_per_mat", "cells_per_array"])
@pytest.mark.parametrize("n", [2, 3])
def test_capacity_multiplicative(level, n):
    rows, cols = getattr(ORG, level)
    scaled = dataclasses.replace(ORG, **{level: (rows, cols * n)})
    assert array_model.capacity(scaled) == n * array_model.capacity(ORG)


def test_capacity_rejects_partial_bytes():
    with pytest.raises(ValueError):
        array_model.capacity(MemoryOrganization((1, 1), (1, 1), (1, 1), (1, 3)))


def test_organization_validation():
    with pytest.raises(ValueError):
        MemoryOrganization(banks=(0, 1))


def test_write_latency_default():
    w = array_model.write_latency(ORG, TIMINGS)
    assert [label for label, _ in w.components] == ["peripheral", "cell_switch"]
    assert w.total == pytest.approx(763.9e-12, rel=1e-9)


def test_write_latency_coherent_rotation():
    fast = dataclasses.replace(TIMINGS, cell_switch=50e-12)
    assert array_model.write_latency(ORG, fast).total < 200e-12


def test_write_latency_zero_peripheral():
    t = dataclasses.replace(TIMINGS, write_peripheral=0.0)
    assert array_model.write_latency(ORG, t).total == TIMINGS.cell_switch


def test_write_latency_from_cell_sim():
    switch = cell.write_bit(cell.CellCircuit(), 1, 0.3).latency
    t = dataclasses.replace(TIMINGS, cell_switch=switch)
    assert array_model.write_latency(ORG, t)["cell_switch"] == switch


def test_read_latency_default():
    r = array_model.read_latency(ORG, TIMINGS)
    assert r.total == pytest.approx(2.3035e-9, rel=1e-12)
    assert r.total == pytest.approx(2.3e-9, rel=0.02)


def test_read_latency_without_hall():
    t = dataclasses.replace(TIMINGS, hall_measurement=0.0)
    assert array_model.read_latency(ORG, t).total == pytest.approx(1.6035e-9, rel=1e-12)


def test_all_zero_timings():
    assert array_model.read_latency(ORG, ZERO).total == 0.0
    assert array_model.write_latency(ORG, ZERO).total == 0.0


_times = st.floats(0.0, 1e-8, allow_nan=False)


@given(st.builds(PeripheralTimings, *[_times] * 6))
def test_totals_are_exact_sums(t):
    for b in (array_model.write_latency(ORG, t), array_model.read_latency(ORG, t)):
        assert b.total == math.fsum(v for _, v in b.components)


@given(st.builds(PeripheralTimings, *[_times] * 6),
       st.sampled_from([f.name for f in dataclasses.fields(PeripheralTimings)]),
       st.floats(0.0, 1e-9))
def test_write_latency_monotone(t, field, extra):
    bumped = dataclasses.replace(t, **{field: getattr(t, field) + extra})
    assert array_model.write_latency(ORG, bumped).total >= array_model.write_latency(ORG, t).total


def test_negative_timing_rejected():
    with pytest.raises(ValueError):
        PeripheralTimings(sense_amp=-1e-12)


def _me_results(timings=TIMINGS):
    return {
        "write_latency": array_model.write_latency(ORG, timings).total,
        "read_latency": array_model.read_latency(ORG, timings).total,
        "energy_per_bit": cell.write_bit(cell.CellCircuit(), 1, 0.3).energy,
    }


def test_tech_report_default_no_flags():
    report = array_model.tech_comparison_report(array_model.load_tech_table(), _me_results())
    me = next(e for e in report if e.technology == "ME-AFMRAM")
    assert me.flags == ()
    assert me.write_latency == pytest.approx(763.9e-12, rel=1e-9)
    assert me.read_latency == pytest.approx(2.3e-9, rel=0.02)
    assert me.energy_per_bit == pytest.approx(0.063e-12, rel=1e-9)
    assert me.nonvolatile


def test_tech_report_static_only():
    table = array_model.load_tech_table()
    assert array_model.tech_comparison_report(table, {}) == table
    with pytest.raises(ValueError):
        array_model.tech_comparison_report([], _me_results())


def test_tech_report_flags_doubled_switch():
    doubled = dataclasses.replace(TIMINGS, cell_switch=2 * TIMINGS.cell_switch)
    report = array_model.tech_comparison_report(array_model.load_tech_table(), _me_results(doubled))
    me = next(e for e in report if e.technology == "ME-AFMRAM")
    assert me.flags == ("write_latency",)


def test_volatility_flags():
    table = {e.technology: e for e in array_model.load_tech_table()}
    assert not table["SRAM"].nonvolatile and not table["DRAM"].nonvolatile
    assert table["STT-MRAM"].nonvolatile


def test_report_csv(tmp_path):
    path = tmp_path / "tech.csv"
    report = array_model.tech_comparison_report(array_model.load_tech_table(), _me_results())
    array_model.write_report_csv(report, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("technology,write_latency_s,read_latency_s,energy_per_bit_J,nonvolatile")
    assert lines[1].startswith("ME-AFMRAM,")
