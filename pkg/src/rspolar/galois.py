"""GF(2^t) arithmetic tables and the bit<->symbol mapping used at the modulation boundary.

Field elements are plain ints in [0, q) whose binary digits are polynomial
coefficients over GF(2), so addition is XOR.  Multiplication goes through
discrete exp/log tables built from a primitive polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

# Primitive polynomials (bit masks, degree t), one per supported extension degree.
DEFAULT_PRIM_POLY = {
    1: 0b11,
    2: 0b111,        # x^2 + x + 1
    3: 0b1011,       # x^3 + x + 1
    4: 0b10011,      # x^4 + x + 1
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
}


@dataclass(frozen=True)
class FieldSpec:
    """Immutable GF(2^t) description: tables plus the fixed bit mapping.

    exp[k] = alpha^k for k in [0, q-1); log[x] inverts it for nonzero x.
    sym_of_bits / bits_of_sym realize the bit-tuple <-> symbol bijection
    ((0,0)<->0, (0,1)<->alpha, (1,0)<->alpha^2, (1,1)<->alpha^3 at t=2).
    """

    t: int
    q: int
    prim_poly: int
    exp: np.ndarray
    log: np.ndarray
    mul_table: np.ndarray
    inv_table: np.ndarray
    sym_of_bits: np.ndarray
    bits_of_sym: np.ndarray
    _hash: int = field(default=0, repr=False)

    @property
    def alpha(self) -> int:
        """Primitive element (= exp[1] for t > 1, else 1)."""
        return int(self.exp[1]) if self.q > 2 else 1

    def __hash__(self):
        return hash((self.t, self.prim_poly))

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.t, self.prim_poly) == (other.t, other.prim_poly)


def _mul_mod(a: int, b: int, poly: int, t: int) -> int:
    # Carry-less multiply, reduced modulo poly; used only while building tables.
    p = 0
    while b:
        if b & 1:
            p ^= a
        a <<= 1
        if a & (1 << t):
            a ^= poly
        b >>= 1
    return p


_FIELD_CACHE: dict[tuple[int, int], FieldSpec] = {}


def build_field(t: int = 2, prim_poly: int | None = None) -> FieldSpec:
    """Build GF(2^t) tables for a primitive polynomial of degree t.

    Raises ConfigurationError if t is out of [1, 8] or the polynomial is not
    primitive (detected when the exp cycle length differs from q - 1).
    """
    if not 1 <= t <= 8:
        raise ConfigurationError(f"t={t} outside supported range [1, 8]")
    if prim_poly is None:
        prim_poly = DEFAULT_PRIM_POLY[t]
    key = (t, prim_poly)
    cached = _FIELD_CACHE.get(key)
    if cached is not None:
        return cached

    q = 1 << t
    if prim_poly >> t != 1:
        raise ConfigurationError(f"polynomial 0x{prim_poly:x} is not monic of degree {t}")

    exp = np.zeros(q - 1, dtype=np.uint8)
    log = np.zeros(q, dtype=np.int64)
    x = 1
    for k in range(q - 1):
        if x == 1 and k > 0:
            raise ConfigurationError(
                f"0x{prim_poly:x} is not primitive: exp cycle length {k} != {q - 1}"
            )
        exp[k] = x
        log[x] = k
        x = _mul_mod(x, 2, prim_poly, t) if t > 1 else 1
    if t > 1 and x != 1:
        raise ConfigurationError(f"0x{prim_poly:x} is not primitive (cycle does not close)")
    if len(set(exp.tolist())) != q - 1:
        raise ConfigurationError(f"0x{prim_poly:x} is not primitive: repeated powers")

    mul = np.zeros((q, q), dtype=np.uint8)
    nz = np.arange(1, q)
    mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
    inv = np.zeros(q, dtype=np.uint8)
    inv[1:] = exp[(-log[nz]) % (q - 1)]

    # Bit tuple (b_0..b_{t-1}), b_0 most significant, read as integer k:
    # k = 0 -> 0, else alpha^k (alpha^{q-1} = 1).
    sym_of_bits = np.zeros(q, dtype=np.uint8)
    sym_of_bits[1:] = exp[nz % (q - 1)]
    bits_of_sym = np.zeros((q, t), dtype=np.uint8)
    for s in range(1, q):
        k = q - 1 if log[s] == 0 else int(log[s])
        bits_of_sym[s] = [(k >> (t - 1 - b)) & 1 for b in range(t)]

    spec = FieldSpec(t, q, prim_poly, exp, log, mul, inv, sym_of_bits, bits_of_sym)
    _FIELD_CACHE[key] = spec
    return spec


def gf_add(a: int, b: int) -> int:
    """Field addition (characteristic 2: XOR)."""
    return a ^ b


def gf_mul(a: int, b: int, field: FieldSpec) -> int:
    return int(field.mul_table[a, b])


def gf_inv(a: int, field: FieldSpec) -> int:
    """Multiplicative inverse; a = 0 is a domain error."""
    if a == 0:
        raise ZeroDivisionError("0 has no multiplicative inverse")
    return int(field.inv_table[a])


def bits_to_symbol(bits, field: FieldSpec) -> int:
    """Map a t-tuple of {0,1} onto a symbol; matches the fixed t=2 mapping."""
    if len(bits) != field.t:
        raise ValueError(f"expected {field.t} bits, got {len(bits)}")
    k = 0
    for b in bits:
        k = (k << 1) | int(b)
    return int(field.sym_of_bits[k])


def symbol_to_bits(s: int, field: FieldSpec) -> tuple[int, ...]:
    """Inverse of bits_to_symbol."""
    return tuple(int(b) for b in field.bits_of_sym[s])


def pack_bits(bits: np.ndarray, field: FieldSpec) -> np.ndarray:
    """Vectorized bits->symbols along the last axis; shape (..., n*t) -> (..., n)."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape[-1] % field.t:
        raise ValueError("bit length not a multiple of t")
    grouped = bits.reshape(bits.shape[:-1] + (-1, field.t))
    weights = 1 << np.arange(field.t - 1, -1, -1)
    return field.sym_of_bits[(grouped * weights).sum(axis=-1)]


def unpack_symbols(symbols: np.ndarray, field: FieldSpec) -> np.ndarray:
    """Vectorized symbols->bits along the last axis; shape (..., n) -> (..., n*t)."""
    symbols = np.asarray(symbols, dtype=np.uint8)
    bits = field.bits_of_sym[symbols]
    return bits.reshape(symbols.shape[:-1] + (-1,))
