"""In-memory encryption: counter-mode encryption (CME) vs. Memcryption.

CME XORs the line with an AES one-time pad seeded by (address, counter) and
keeps a per-line counter.  Memcryption feeds (key, address) to AES and uses the
resulting pulse as the control word of a bitwise CNOT layer in the data path;
no counter is involved, so rewriting the same plaintext to the same address
gives the same ciphertext.

Seeds are packed big-endian: 64-bit address in the high half of the AES input,
counter (CME) or zeros (Memcryption) in the low half.
"""

from __future__ import annotations

import enum
import os
import struct
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .errors import ConfigError, CounterOverflow

KEY_ENV_VAR = "MEAFMRAM_KEY"
BLOCK_BYTES = 16
ADDRESS_BITS = 64


class Scheme(str, enum.Enum):
    NONE = "None"
    CME = "CME"
    MEMCRYPTION = "Memcryption"


# calibrated delay/energy model for a 128-bit line
T_WRITE_BASE = 100e-12
T_AES_EXPOSED = 163.46e-12
D_CNOT = 10e-12
D_XOR_CMOS = 35.77e-12
E_AES = 17.370e-12
E_XOR_CMOS = 0.001e-12
E_CNOT = 0.0


@dataclass(frozen=True)
class EncryptionConfig:
    key: bytes = field(repr=False, default=bytes(16))
    line_width: int = 128
    scheme: Scheme = Scheme.MEMCRYPTION
    counter_width: int = 64
    d_cnot: float = D_CNOT
    d_xor_cmos: float = D_XOR_CMOS
    t_aes: float = T_AES_EXPOSED
    t_write_base: float = T_WRITE_BASE
    e_aes: float = E_AES
    e_xor_cmos: float = E_XOR_CMOS
    e_cnot: float = E_CNOT

    def __post_init__(self):
        if len(self.key) != 16:
            raise ValueError("key must be exactly 128 bits")
        if self.line_width % 8 or not 8 <= self.line_width <= 128:
            raise ValueError("line_width must be a multiple of 8 in [8, 128]")
        if not 1 <= self.counter_width <= 64:
            raise ValueError("counter_width must lie in [1, 64]")
        object.__setattr__(self, "scheme", Scheme(self.scheme))

    @property
    def line_bytes(self) -> int:
        return self.line_width // 8


def aes128_block(key: bytes, block: bytes) -> bytes:
    """Single-block AES-128 encryption."""
    if len(key) != 16 or len(block) != 16:
        raise ValueError("AES-128 needs a 16-byte key and a 16-byte block")
    enc = Cipher(algorithms.AES(key), modes.ECB()).encryptor()
    return enc.update(block) + enc.finalize()


def _seed(address: int, low: int) -> bytes:
    if not 0 <= address < 1 << ADDRESS_BITS:
        raise ValueError("address must fit in 64 bits")
    return struct.pack(">QQ", address, low)


def cme_pad(key: bytes, address: int, counter: int, counter_width: int = 64) -> bytes:
    if counter < 0:
        raise ValueError("counter must be >= 0")
    if counter >= (1 << counter_width) - 1:
        raise CounterOverflow(f"counter for line {address:#x} is exhausted; re-key the memory")
    return aes128_block(key, _seed(address, counter))


def memcrypt_pulse(key: bytes, address: int) -> bytes:
    return aes128_block(key, _seed(address, 0))


def cnot_layer(data: bytes, control: bytes) -> bytes:
    """Bitwise controlled inversion: bit i of ``data`` flips where ``control`` is 1."""
    if len(data) != len(control):
        raise ValueError(f"length mismatch: {len(data)} vs {len(control)} bytes")
    n = len(data)
    return (int.from_bytes(data, "big") ^ int.from_bytes(control, "big")).to_bytes(n, "big")


class CounterStore:
    """Per-line write counters.  Missing lines read as 0."""

    def __init__(self, counters: Optional[dict[int, int]] = None):
        self._counters: dict[int, int] = dict(counters or {})
        self._lock = threading.Lock()

    def get(self, address: int) -> int:
        return self._counters.get(address, 0)

    def increment(self, address: int, counter_width: int = 64) -> int:
        """Advance the counter for ``address`` and return the new value."""
        with self._lock:
            current = self._counters.get(address, 0)
            if current >= (1 << counter_width) - 2:
                raise CounterOverflow(
                    f"counter for line {address:#x} is exhausted; re-key the memory"
                )
            self._counters[address] = current + 1
            return current + 1

    def __len__(self) -> int:
        return len(self._counters)

    def items(self):
        return sorted(self._counters.items())

    def save(self, path) -> None:
        with open(path, "w") as fh:
            for addr, ctr in self.items():
                fh.write(f"{addr:016x} {ctr}\n")

    @classmethod
    def load(cls, path) -> "CounterStore":
        counters = {}
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            if not line.strip():
                continue
            try:
                addr, ctr = line.split()
                counters[int(addr, 16)] = int(ctr)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: malformed counter line {line!r}") from exc
        return cls(counters)


@dataclass(frozen=True)
class CipherLine:
    address: int
    ciphertext: bytes
    scheme: Scheme
    counter: Optional[int] = None


def write_line(
    store: CounterStore, config: EncryptionConfig, address: int, plaintext: bytes
) -> CipherLine:
    if len(plaintext) != config.line_bytes:
        raise ValueError(f"plaintext must be {config.line_bytes} bytes")
    nb = config.line_bytes
    if config.scheme is Scheme.CME:
        ctr = store.increment(address, config.counter_width)
        pad = cme_pad(config.key, address, ctr, config.counter_width)[:nb]
        return CipherLine(address, cnot_layer(plaintext, pad), Scheme.CME, ctr)
    if config.scheme is Scheme.MEMCRYPTION:
        pulse = memcrypt_pulse(config.key, address)[:nb]
        return CipherLine(address, cnot_layer(plaintext, pulse), Scheme.MEMCRYPTION)
    if config.scheme is Scheme.NONE:
        return CipherLine(address, bytes(plaintext), Scheme.NONE)
    raise ValueError(f"unknown scheme {config.scheme!r}")


def read_line(store: CounterStore, config: EncryptionConfig, line: CipherLine) -> bytes:
    nb = config.line_bytes
    if len(line.ciphertext) != nb:
        raise ValueError(f"ciphertext must be {nb} bytes")
    scheme = Scheme(line.scheme)
    if scheme is Scheme.CME:
        if line.counter is None:
            raise ValueError("CME line carries no counter snapshot")
        pad = cme_pad(config.key, line.address, line.counter, config.counter_width)[:nb]
        return cnot_layer(line.ciphertext, pad)
    if scheme is Scheme.MEMCRYPTION:
        return cnot_layer(line.ciphertext, memcrypt_pulse(config.key, line.address)[:nb])
    if scheme is Scheme.NONE:
        return bytes(line.ciphertext)
    raise ValueError(f"unknown scheme {line.scheme!r}")


def encryption_latency(config: EncryptionConfig, scheme: Scheme | str | None = None) -> float:
    scheme = Scheme(scheme or config.scheme)
    if scheme is Scheme.NONE:
        return config.t_write_base
    gate = config.d_xor_cmos if scheme is Scheme.CME else config.d_cnot
    return config.t_write_base + config.t_aes + gate


def encryption_energy(config: EncryptionConfig, scheme: Scheme | str | None = None) -> float:
    """Crypto energy per line write [J]; zero for the unencrypted array."""
    scheme = Scheme(scheme or config.scheme)
    if scheme is Scheme.NONE:
        return 0.0
    gate = config.e_xor_cmos if scheme is Scheme.CME else config.e_cnot
    return config.e_aes + gate


# memory image: 8-byte magic, then records of
#   address u64 | scheme u8 | counter u64 | ciphertext (line_width/8 bytes)
_IMAGE_MAGIC = b"MEAFMIMG"
_SCHEME_CODES = {Scheme.NONE: 0, Scheme.CME: 1, Scheme.MEMCRYPTION: 2}
_CODE_SCHEMES = {v: k for k, v in _SCHEME_CODES.items()}


def save_image(lines: Iterable[CipherLine], path, line_width: int = 128) -> None:
    nb = line_width // 8
    with open(path, "wb") as fh:
        fh.write(_IMAGE_MAGIC + struct.pack(">H", line_width))
        for line in lines:
            if len(line.ciphertext) != nb:
                raise ValueError("ciphertext width does not match the image line width")
            ctr = line.counter if line.counter is not None else 0
            fh.write(struct.pack(">QBQ", line.address, _SCHEME_CODES[Scheme(line.scheme)], ctr))
            fh.write(line.ciphertext)


def load_image(path) -> tuple[list[CipherLine], int]:
    raw = Path(path).read_bytes()
    if raw[:8] != _IMAGE_MAGIC:
        raise ConfigError(f"{path}: not a memory image")
    (line_width,) = struct.unpack(">H", raw[8:10])
    nb = line_width // 8
    rec = 17 + nb
    body = raw[10:]
    if len(body) % rec:
        raise ConfigError(f"{path}: truncated memory image")
    lines = []
    for off in range(0, len(body), rec):
        addr, code, ctr = struct.unpack(">QBQ", body[off : off + 17])
        scheme = _CODE_SCHEMES[code]
        lines.append(
            CipherLine(addr, body[off + 17 : off + rec], scheme,
                       ctr if scheme is Scheme.CME else None)
        )
    return lines, line_width


def load_key(key_file=None, env=None) -> bytes:
    """Read a hex-encoded 128-bit key from ``key_file`` or the environment."""
    env = os.environ if env is None else env
    if key_file is not None:
        text = Path(key_file).read_text().strip()
    elif KEY_ENV_VAR in env:
        text = env[KEY_ENV_VAR].strip()
    else:
        raise ConfigError(f"no key: set {KEY_ENV_VAR} or pass a key file")
    try:
        key = bytes.fromhex(text)
    except ValueError as exc:
        raise ConfigError("key is not valid hex") from exc
    if len(key) != 16:
        raise ConfigError(f"key must be 128 bits, got {8 * len(key)}")
    return key
