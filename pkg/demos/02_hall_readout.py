"""Anomalous-Hall read-out: which stacks give a signal a plain sense amplifier can see.

Run: python3 demos/02_hall_readout.py
"""

from meafmram import hall

catalog = hall.load_catalog()
setup = hall.ReadSetup(I_hall=2e-3, V_threshold=1e-3)

print(f"{'stack':18s} {'R_s/t [Ohm/T]':>14s} {'V_AHE':>12s}  sense amp")
for row in hall.compare_materials(catalog, setup, V_ME=0.3):
    print(f"{row.name:18s} {row.R_s_per_t:14.3e} {row.V_AHE * 1e3:9.4f} mV  "
          f"{'yes' if row.detectable else 'no'}")

# The '1' and '0' signals need not be mirror images; an offset re-centres them.
mat = hall.catalog_entry("Bi2Se3/LaCoO3")
skewed = hall.ReadSetup(asymmetry=0.02)
v1, v0 = hall.raw_signal(mat, skewed, 0.3), hall.raw_signal(mat, skewed, -0.3)
off = hall.compensation_offset(v1, v0)
print(f"raw signals {v1 * 1e3:+.2f} / {v0 * 1e3:+.2f} mV, offset {off * 1e3:.3f} mV "
      f"-> {(v1 - off) * 1e3:+.2f} / {(v0 - off) * 1e3:+.2f} mV")
sense = hall.ReadSetup(V_offset=off, V_threshold=1e-3)
print("sensed bits:", hall.sense_bit(v1, sense), hall.sense_bit(v0, sense))
