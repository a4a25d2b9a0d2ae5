"""Command-line front end.

Exit codes: 0 success, 1 reproduction FAIL, 2 usage/config error,
3 runtime/numerical error.
"""

from __future__ import annotations

import argparse
import csv
import enum
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

import numpy as np

from . import array_model, attacks, cell, crypto, hall, physics, sidechannel
from .config import DEFAULT_SEED, SimConfig, load_config
from .errors import ConfigError, CounterOverflow, RegimeError, ResolutionError, WriteBlocked
from .presets import PRESETS, run_preset

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _clean(x):
    """JSON-safe copy: numpy scalars unwrapped, NaN mapped to null."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, enum.Enum):
        return x.value
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return None if math.isnan(x) else x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def write_rows(rows: Sequence[dict], out: Path, stem: str, fmt: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out / f"{stem}.json"
        path.write_text(json.dumps(_clean(list(rows)), indent=2, sort_keys=True,
                                   allow_nan=False) + "\n")
        return path
    path = out / f"{stem}.csv"
    with open(path, "w", newline="") as fh:
        if rows:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            for r in rows:
                writer.writerow({k: repr(float(v)) if isinstance(v, (float, np.floating)) else v
                                 for k, v in r.items()})
    return path


def write_json(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n")


# --- subcommands -----------------------------------------------------------

def cmd_cell(args, cfg: SimConfig) -> int:
    if args.waveform:
        segments, t_end = cell.load_waveform(args.waveform)
    else:
        segments = cell.fig3_waveform(V=cfg.V_G)
        t_end = segments[-1].t_start + 4e-9
    trace = cell.simulate_transient(cfg.circuit, segments, dt=args.dt, t_end=t_end)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trace.to_csv(out / "trace.csv")
    w = cell.write_bit(cfg.circuit, 1, cfg.V_G, dt=args.dt)
    final = cell.CellState.from_voltage(float(trace.V_ME[-1]), cfg.circuit)
    write_json({"write_latency_s": w.latency, "write_energy_J": w.energy,
                "final_V_ME": final.V_ME, "final_bit": final.stored_bit},
               out / "summary.json")
    print(f"write latency {w.latency * 1e9:.3f} ns, energy {w.energy * 1e12:.4f} pJ")
    return EXIT_OK


def cmd_hall(args, cfg: SimConfig) -> int:
    catalog = hall.load_catalog(args.catalog)
    setup = hall.ReadSetup(I_hall=args.I_hall or cfg.read.I_hall, k=cfg.read.k)
    rows = hall.compare_materials(catalog, setup, V_ME=args.V_ME or cfg.V_G)
    table = [{"name": r.name, "R_s_per_t": r.R_s_per_t, "V_AHE": r.V_AHE,
              "detectable": int(r.detectable)} for r in rows]
    path = write_rows(table, Path(args.out), "hall_comparison", args.format)
    print(path)
    return EXIT_OK


def cmd_array(args, cfg: SimConfig) -> int:
    w = array_model.write_latency(cfg.organization, cfg.timings)
    r = array_model.read_latency(cfg.organization, cfg.timings)
    out = Path(args.out)
    rows = ([{"access": "write", "component": k, "seconds": v} for k, v in w.components]
            + [{"access": "read", "component": k, "seconds": v} for k, v in r.components])
    write_rows(rows, out, "latency_breakdown", args.format)
    energy = cell.write_bit(cfg.circuit, 1, cfg.V_G).energy
    report = array_model.tech_comparison_report(
        array_model.load_tech_table(args.tech_table),
        {"write_latency": w.total, "read_latency": r.total, "energy_per_bit": energy},
    )
    out.mkdir(parents=True, exist_ok=True)
    array_model.write_report_csv(report, out / "tech_comparison.csv")
    print(f"capacity {array_model.capacity(cfg.organization)} B, write {w.total * 1e12:.1f} ps, "
          f"read {r.total * 1e9:.4f} ns")
    return EXIT_OK


def _encryption_config(args, cfg: SimConfig, need_key: bool) -> crypto.EncryptionConfig:
    kwargs = dict(cfg.encryption)
    if getattr(args, "scheme", None):
        kwargs["scheme"] = args.scheme
    if need_key:
        kwargs["key"] = crypto.load_key(args.key_file)
    return crypto.EncryptionConfig(**kwargs)


def cmd_crypt(args, cfg: SimConfig) -> int:
    if args.action == "overheads":
        ecfg = _encryption_config(args, cfg, need_key=False)
        base = crypto.encryption_latency(ecfg, crypto.Scheme.NONE)
        rows = [{"scheme": s.value, "latency_s": crypto.encryption_latency(ecfg, s),
                 "relative": crypto.encryption_latency(ecfg, s) / base,
                 "energy_J": crypto.encryption_energy(ecfg, s)} for s in crypto.Scheme]
        print(write_rows(rows, Path(args.out), "encryption_overheads", args.format))
        return EXIT_OK

    ecfg = _encryption_config(args, cfg, need_key=True)
    counters = Path(args.counters)
    store = crypto.CounterStore.load(counters) if counters.exists() else crypto.CounterStore()
    if args.action == "encrypt":
        data = Path(args.input).read_bytes()
        nb = ecfg.line_bytes
        if len(data) % nb:
            data += bytes(nb - len(data) % nb)
        lines = [crypto.write_line(store, ecfg, args.address + i, data[off: off + nb])
                 for i, off in enumerate(range(0, len(data), nb))]
        crypto.save_image(lines, args.image, ecfg.line_width)
        store.save(counters)
        print(f"{len(lines)} lines written to {args.image}")
    else:
        lines, width = crypto.load_image(args.image)
        if width != ecfg.line_width:
            raise ConfigError(f"image line width {width} does not match config {ecfg.line_width}")
        plain = b"".join(crypto.read_line(store, ecfg, line) for line in lines)
        Path(args.output).write_bytes(plain)
        print(f"{len(lines)} lines decrypted to {args.output}")
    return EXIT_OK


def _trajectory_rows(res: attacks.FieldAttackResult) -> list[dict]:
    rows = []
    for i, t in enumerate(res.t):
        row = {"t": t}
        for s in range(res.m.shape[1]):
            for k, ax in enumerate("xyz"):
                row[f"m{s + 1}_{ax}"] = res.m[i, s, k]
        rows.append(row)
    return rows


def cmd_attack(args, cfg: SimConfig) -> int:
    out = Path(args.out)
    if args.kind in ("fm", "afm"):
        field = tuple(args.field)
        if args.scenario:
            scn = attacks.load_scenario(args.scenario)
            if scn.target.value.lower() != args.kind:
                raise UsageError(f"scenario targets {scn.target.value}, not {args.kind.upper()}")
            res = attacks.run_scenario(scn)
        elif args.kind == "fm":
            scn = attacks.FieldAttackScenario.fm(field, duration=args.duration or 1e-6)
            res = attacks.fm_field_attack(scn)
        else:
            scn = attacks.FieldAttackScenario.afm(field, staggered=args.staggered,
                                                  duration=args.duration or 1e-9,
                                                  ramp_time=args.ramp)
            res = attacks.afm_field_attack(scn)
        write_rows(_trajectory_rows(res), out, f"{args.kind}_trajectory", "csv")
        summary = {"switched": res.switched, "max_canting_rad": res.max_canting}
        if args.kind == "afm":
            summary["neel_deflection_rad"] = attacks.neel_deflection(res)
        write_json(summary, out / f"{args.kind}_summary.json")
        print(json.dumps(_clean(summary), sort_keys=True))
    elif args.kind == "temperature":
        mat = physics.MaterialParams.boron_doped() if args.doped else cfg.material
        res = attacks.temperature_attack(mat, args.T)
        summary = {"T_attack": args.T, "T_neel": mat.T_neel, "state": res.state.value,
                   "detectable": res.detectable}
        write_json(summary, out / "temperature_attack.json")
        print(json.dumps(summary, sort_keys=True))
    else:
        rng = np.random.default_rng(args.seed)
        bits = rng.integers(0, 2, args.n)
        ts = sidechannel.generate_power_traces(args.tech, bits, delta=args.delta,
                                               noise_sigma=args.noise, seed=args.seed)
        res = sidechannel.dpa_attack(ts)
        out.mkdir(parents=True, exist_ok=True)
        (out / "dpa_result.json").write_text(res.to_json() + "\n")
        print(f"{args.tech}: success rate {res.success_rate:.3f}")
    return EXIT_OK


def cmd_preset(args, cfg: SimConfig) -> int:
    if args.name not in PRESETS:
        raise UsageError(f"unknown preset {args.name!r}; valid: {', '.join(PRESETS)}")
    report = run_preset(args.name, cfg, seed=args.seed)
    out = Path(args.out)
    for stem, rows in report.tables.items():
        write_rows(rows, out, stem, args.format)
    for stem, trace in report.traces.items():
        if isinstance(trace, cell.TransientTrace):
            out.mkdir(parents=True, exist_ok=True)
            trace.to_csv(out / f"{stem}.csv")
        elif isinstance(trace, attacks.FieldAttackResult):
            write_rows(_trajectory_rows(trace), out, stem, "csv")
    write_json(report.summary(), out / f"{args.name}_result.json")
    for c in report.checks:
        print(c.line())
    print(f"{args.name}: {'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_FAIL


# --- sweep -----------------------------------------------------------------

_ATTACK_PARAMS = {"H_homogeneous": False, "H_staggered": True}


def _cell_metrics(cfg: SimConfig) -> dict:
    mat = cfg.material
    F = physics.me_pressure(mat.alpha_ME, cfg.E, cfg.B)
    regime = physics.reversal_regime(mat, cfg.E, cfg.B)
    row = {"F": F, "regime": regime.value}
    if regime is physics.Regime.FLOW:
        row["tau_flow"] = physics.flow_time(mat, cfg.dynamics, cfg.E, F, cfg.geometry.l)
        row["tau_creep"] = math.nan
    else:
        row["tau_flow"] = math.nan
        row["tau_creep"] = physics.creep_time(cfg.creep, F, mat.F_d)
    try:
        w = cell.write_bit(cfg.circuit, 1, cfg.V_G)
        row["write_latency"], row["write_energy"] = w.latency, w.energy
    except WriteBlocked:
        row["write_latency"], row["write_energy"] = math.nan, math.nan
    coh = physics.coherent_rotation_requirement(mat, cfg.B)
    row["E_coherent"] = coh.E_required
    row["E_crit"] = physics.critical_field(mat, cfg.B)
    row["read_latency"] = array_model.read_latency(cfg.organization, cfg.timings).total
    row["array_write_latency"] = array_model.write_latency(cfg.organization, cfg.timings).total
    row["neel_order"] = physics.neel_check(mat, cfg.T).value
    return row


def _sweep_point(task) -> dict:
    config_path, parameter, value = task
    if parameter in _ATTACK_PARAMS:
        res = attacks.field_sweep([value], staggered=_ATTACK_PARAMS[parameter])[0]
        return {parameter: value, "switched": res.switched, "max_canting": res.max_canting,
                "neel_deflection_deg": math.degrees(attacks.neel_deflection(res))}
    cfg = load_config(config_path)
    if parameter == "E":
        cfg = cfg.with_value("V_G", value * cfg.geometry.t)
    else:
        cfg = cfg.with_value(parameter, value)
    return {parameter: value, **_cell_metrics(cfg)}


def _check_parameter(name: str, cfg: SimConfig) -> None:
    if name in _ATTACK_PARAMS or name in ("E", "V_G", "B", "T"):
        return
    section, _, key = name.partition(".")
    if not key or section not in cfg.tree:
        raise UsageError(f"unknown sweep parameter {name!r}")
    if section != "encryption":
        import dataclasses
        obj = getattr(cfg, section)
        if key not in {f.name for f in dataclasses.fields(obj)}:
            raise UsageError(f"unknown sweep parameter {name!r}")


def cmd_sweep(args, cfg: SimConfig) -> int:
    _check_parameter(args.parameter, cfg)
    if args.num < 1:
        raise UsageError("--num must be >= 1")
    if args.num == 1:
        values = [args.start]
    elif args.log:
        values = list(np.geomspace(args.start, args.stop, args.num))
    else:
        values = list(np.linspace(args.start, args.stop, args.num))
    tasks = [(args.config, args.parameter, float(v)) for v in values]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    if args.metric:
        keep = [args.parameter] + args.metric
        missing = set(args.metric) - set(rows[0])
        if missing:
            raise UsageError(f"unknown metric(s): {', '.join(sorted(missing))}")
        rows = [{k: r[k] for k in keep} for r in rows]
    print(write_rows(rows, Path(args.out), f"sweep_{args.parameter}", args.format))
    return EXIT_OK


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config overriding the bundled defaults")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = argparse.ArgumentParser(prog="meafmram", description="ME-AFM memory simulator")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cell", parents=[common], help="cell transient simulation")
    c.add_argument("--waveform", help="YAML waveform file (default: alternating write pattern)")
    c.add_argument("--dt", type=float, default=None)
    c.set_defaults(func=cmd_cell)

    h = sub.add_parser("hall", parents=[common], help="AH read-out material comparison")
    h.add_argument("--catalog")
    h.add_argument("--I-hall", dest="I_hall", type=float)
    h.add_argument("--V-ME", dest="V_ME", type=float)
    h.set_defaults(func=cmd_hall)

    a = sub.add_parser("array", parents=[common], help="array latency and tech comparison")
    a.add_argument("--tech-table", dest="tech_table")
    a.set_defaults(func=cmd_array)

    k = sub.add_parser("crypt", parents=[common], help="memory encryption")
    k.add_argument("action", choices=("overheads", "encrypt", "decrypt"))
    k.add_argument("--scheme", choices=[s.value for s in crypto.Scheme])
    k.add_argument("--key-file", help=f"hex key file (default: ${crypto.KEY_ENV_VAR})")
    k.add_argument("--input")
    k.add_argument("--output")
    k.add_argument("--image", default="memory.img")
    k.add_argument("--counters", default="counters.txt")
    k.add_argument("--address", type=lambda s: int(s, 0), default=0)
    k.set_defaults(func=cmd_crypt)

    t = sub.add_parser("attack", parents=[common], help="field / temperature / DPA attacks")
    t.add_argument("kind", choices=("fm", "afm", "temperature", "dpa"))
    t.add_argument("--field", nargs=3, type=float, default=(0.0, 0.0, -10e-3),
                   metavar=("HX", "HY", "HZ"), help="applied field [T]")
    t.add_argument("--scenario", help="YAML field-attack scenario (overrides --field etc.)")
    t.add_argument("--staggered", action="store_true")
    t.add_argument("--duration", type=float)
    t.add_argument("--ramp", type=float, default=0.0, help="field rise time [s]")
    t.add_argument("--T", type=float, default=350.0)
    t.add_argument("--doped", action="store_true", help="Boron-doped chromia")
    t.add_argument("--tech", choices=[x.value for x in sidechannel.Tech], default="STT_MRAM")
    t.add_argument("--n", type=int, default=1000)
    t.add_argument("--delta", type=float, default=0.2)
    t.add_argument("--noise", type=float, default=0.04)
    t.set_defaults(func=cmd_attack)

    r = sub.add_parser("preset", parents=[common], help="reproduce a published artifact")
    r.add_argument("name", help=", ".join(PRESETS))
    r.set_defaults(func=cmd_preset)

    s = sub.add_parser("sweep", parents=[common], help="sweep one parameter")
    s.add_argument("--parameter", required=True,
                   help="E, V_G, B, T, H_homogeneous, H_staggered or section.field")
    s.add_argument("--start", type=float, required=True)
    s.add_argument("--stop", type=float)
    s.add_argument("--num", type=int, default=1)
    s.add_argument("--log", action="store_true")
    s.add_argument("--metric", action="append")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep" and args.num > 1 and args.stop is None:
        parser.error("--stop is required when --num > 1")
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except (ConfigError, UsageError) as exc:
        print(f"meafmram: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"meafmram: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RegimeError, ResolutionError, WriteBlocked, CounterOverflow, ArithmeticError,
            ValueError) as exc:
        print(f"meafmram: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
