"""A 64 KB array: latency composition and the cost of encrypting every line.

Run: MEAFMRAM_KEY=000102030405060708090a0b0c0d0e0f python3 demos/03_array_and_encryption.py
"""

import dataclasses
import os

from meafmram import array_model, crypto
from meafmram.config import load_config

cfg = load_config()
org, timings = cfg.organization, cfg.timings
print(f"capacity {array_model.capacity(org)} bytes")
for name, breakdown in (("write", array_model.write_latency(org, timings)),
                        ("read", array_model.read_latency(org, timings))):
    parts = ", ".join(f"{label} {v * 1e12:.1f} ps" for label, v in breakdown.components)
    print(f"{name:5s} {breakdown.total * 1e12:7.1f} ps = {parts}")

# A faster switching mechanism only changes the cell component.
fast = dataclasses.replace(timings, cell_switch=50e-12)
print(f"write with 50 ps cell switching: {array_model.write_latency(org, fast).total * 1e12:.1f} ps")

ecfg = crypto.EncryptionConfig(key=crypto.load_key() if crypto.KEY_ENV_VAR in os.environ
                               else bytes(16))
base = crypto.encryption_latency(ecfg, crypto.Scheme.NONE)
for scheme in crypto.Scheme:
    t = crypto.encryption_latency(ecfg, scheme)
    e = crypto.encryption_energy(ecfg, scheme)
    print(f"{scheme.value:12s} {t * 1e12:7.2f} ps ({t / base:.2f}x)  {e * 1e12:7.3f} pJ")

# Rewriting the same line: the counter scheme changes the ciphertext, the
# address-keyed pulse does not.
store = crypto.CounterStore()
for scheme in (crypto.Scheme.CME, crypto.Scheme.MEMCRYPTION):
    c = dataclasses.replace(ecfg, scheme=scheme)
    a = crypto.write_line(store, c, 0x100, b"sixteen byte msg")
    b = crypto.write_line(store, c, 0x100, b"sixteen byte msg")
    assert crypto.read_line(store, c, b) == b"sixteen byte msg"
    print(f"{scheme.value:12s} rewrite: {a.ciphertext.hex()[:16]}.. -> {b.ciphertext.hex()[:16]}..")
