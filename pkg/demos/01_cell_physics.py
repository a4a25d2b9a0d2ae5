"""Domain-wall physics and the behavioural cell model at the nominal write point.

Run: python3 demos/01_cell_physics.py
"""

from meafmram import cell, physics
from meafmram.config import load_config

cfg = load_config()
mat, dyn, geom = cfg.material, cfg.dynamics, cfg.geometry

# A gate voltage of 0.3 V across 10 nm of chromia in a 0.5 T bias field.
F = physics.me_pressure(mat.alpha_ME, cfg.E, cfg.B)
print(f"ME pressure            F = {F:.2f} J/m^3 (de-pinning at {mat.F_d} J/m^3)")
print(f"regime                   {physics.reversal_regime(mat, cfg.E, cfg.B).value}")

tau_flow = physics.flow_time(mat, dyn, cfg.E, F, geom.l)
tau_creep = physics.creep_time(cfg.creep, 0.0, mat.F_d)
print(f"flow time across cell    {tau_flow * 1e9:.3f} ns (drag coefficient {dyn.alpha_plus:.2f})")
print(f"creep time at F = 0      {tau_creep * 1e3:.3f} ms, {tau_creep / tau_flow:.2e} times slower")

E_c = physics.critical_field(mat, cfg.B)
print(f"critical field           {E_c:.3e} V/m = {E_c * geom.t:.3f} V over the film"
      f" (circuit uses V_crit = {cfg.circuit.V_crit} V)")
coh = physics.coherent_rotation_requirement(mat, cfg.B)
print(f"coherent rotation needs  {coh.E_required:.2e} V/m, feasible: {coh.feasible}")

# Behavioural circuit: alternating writes followed by a hold.
segments = cell.fig3_waveform(V=cfg.V_G)
trace = cell.simulate_transient(cfg.circuit, segments, t_end=segments[-1].t_start + 4e-9)
for seg in segments:
    k = min(int((seg.t_start + 1.9e-9) / (trace.t[1] - trace.t[0])), len(trace.t) - 1)
    state = cell.CellState.from_voltage(float(trace.V_ME[k]), cfg.circuit)
    mode = "write" if seg.WE else "hold "
    print(f"  t = {seg.t_start * 1e9:4.1f} ns  {mode} V_G = {seg.V_G:+.2f} V -> bit {state.stored_bit}")

w = cell.write_bit(cfg.circuit, 1, cfg.V_G)
print(f"write latency {w.latency * 1e9:.3f} ns, energy {w.energy * 1e12:.4f} pJ")

# Retention through the creep channel.
s = cell.CellState.from_voltage(0.3, cfg.circuit)
for frac in (0.01, 0.1, 10.0):
    held = cell.hold_retention(cfg.circuit, s, frac * cfg.circuit.tau_creep)
    print(f"after {frac:5.2f} tau_creep: V_ME = {held.V_ME:.4f} V, bit = {held.stored_bit}")
