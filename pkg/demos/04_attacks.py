"""Field, temperature and power side-channel attacks on FM and AFM storage.

Run: python3 demos/04_attacks.py
"""

import math

import numpy as np

from meafmram import attacks, physics, sidechannel

# A 10 mT stray field against a ferromagnet with a 5 mT anisotropy field.
fm = attacks.fm_field_attack(attacks.FieldAttackScenario.fm((0.0, 0.0, -10e-3)))
print(f"FM, -10 mT: switched = {fm.switched}, final m_z = {fm.m[-1, 0, 2]:+.3f}")

# The antiferromagnet shrugs off uniform fields but not staggered ones.
for H in (0.1, 0.5, 1.0):
    hom = attacks.field_sweep([H], staggered=False)[0]
    stag = attacks.field_sweep([H], staggered=True)[0]
    print(f"AFM, {H:.1f} T: homogeneous switched = {hom.switched} "
          f"(Neel tilt {math.degrees(attacks.neel_deflection(hom)):.3f} deg), "
          f"staggered switched = {stag.switched}")

# Heating past the Neel point erases the state; Boron doping raises that point.
for label, mat in (("pure", physics.MaterialParams()),
                   ("B-doped", physics.MaterialParams.boron_doped())):
    for T in (350.0, 450.0):
        r = attacks.temperature_attack(mat, T)
        print(f"{label:8s} at {T:.0f} K: {r.state.value}, detectable = {r.detectable}")

# Differential power analysis against written data.
bits = np.random.default_rng(0).integers(0, 2, 1000)
for tech in sidechannel.Tech:
    ts = sidechannel.generate_power_traces(tech, bits, delta=0.2, noise_sigma=0.04, seed=1)
    res = sidechannel.dpa_attack(ts)
    print(f"DPA on {tech.value:8s}: {res.success_rate:.1%} of bits recovered, "
          f"CPA |r| = {abs(res.cpa_correlation):.3f}")
