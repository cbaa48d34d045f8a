"""Puncturing-based rate matching for a fixed information set.

MPWP removes coded bits belonging to the frozen symbols of smallest
polarization weight; SIP is the smallest-index baseline.  With B = N_b - M_b
bits to drop and l = ceil(B / t) symbols selected (ascending weight or index),
the first l - 1 symbols are punctured whole; the last one is punctured whole
when B divides t, otherwise only its last sigma = B mod t bits go.  Punctured
positions enter the decoder with flat bit likelihoods (LLR 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import AwgnChannel, block_posteriors
from .construct import ReliabilitySequence
from .galois import FieldSpec


@dataclass(frozen=True)
class PuncturePattern:
    """Bit-exact description of the non-transmitted coded bits."""

    n_bits: int
    full_symbols: tuple[int, ...]
    partial_symbol: tuple[int, int] | None     # (symbol index, sigma in [1, t))
    punctured_bits: tuple[int, ...]
    frozen_additions: tuple[int, ...]

    @property
    def m_bits(self) -> int:
        return self.n_bits - len(self.punctured_bits)

    def to_dict(self) -> dict:
        return {
            "full_symbols": list(self.full_symbols),
            "partial": None if self.partial_symbol is None else
                {"index": self.partial_symbol[0], "sigma": self.partial_symbol[1]},
            "bits": list(self.punctured_bits),
        }


def _pattern_from_symbols(symbols, info_set, n_b: int, m_b: int, t: int) -> PuncturePattern:
    drop = n_b - m_b
    if drop == 0:
        return PuncturePattern(n_b, (), None, (), ())
    sigma = drop % t
    full = list(symbols[:-1]) if sigma else list(symbols)
    partial = (int(symbols[-1]), sigma) if sigma else None
    info = set(int(i) for i in np.asarray(info_set).ravel())
    if info & set(int(s) for s in symbols):
        raise ValueError("puncture pattern overlaps the information set")
    bits = []
    for s in full:
        bits.extend(range(s * t, (s + 1) * t))
    if partial is not None:
        s = partial[0]
        bits.extend(range((s + 1) * t - sigma, (s + 1) * t))   # last sigma bits
    bits = tuple(sorted(bits))
    if len(bits) != drop:
        raise AssertionError("bit accounting failed")
    return PuncturePattern(n_b, tuple(int(s) for s in full), partial, bits,
                           tuple(int(s) for s in symbols))


def _check_sizes(info_set, n_sym: int, n_b: int, m_b: int, t: int) -> int:
    if n_b != n_sym * t:
        raise ValueError(f"N_b={n_b} does not equal t*N = {n_sym * t}")
    info = np.asarray(info_set)
    if info.size and (info.min() < 0 or info.max() >= n_sym):
        raise ValueError(f"information set exceeds the {n_sym}-symbol block")
    if not 0 < m_b <= n_b:
        raise ValueError(f"M_b={m_b} must lie in (0, {n_b}]")
    n_frozen = n_sym - np.asarray(info_set).size
    if n_b - m_b > t * n_frozen:
        raise ValueError(
            f"cannot puncture {n_b - m_b} bits: only {t * n_frozen} frozen bits available")
    return math.ceil((n_b - m_b) / t)


def mpwp_pattern(seq: ReliabilitySequence, info_set, n_b: int, m_b: int, t: int) -> PuncturePattern:
    """Minimum-polarization-weight puncturing over the frozen set."""
    n = seq.N
    l = _check_sizes(info_set, n, n_b, m_b, t)
    if l == 0:
        return PuncturePattern(n_b, (), None, (), ())
    frozen = np.setdiff1d(np.arange(n), np.asarray(info_set))
    order = frozen[np.lexsort((frozen, np.asarray(seq.weights)[frozen]))]
    return _pattern_from_symbols(order[:l], info_set, n_b, m_b, t)


def sip_pattern(info_set, n_b: int, m_b: int, t: int) -> PuncturePattern:
    """Smallest-index puncturing baseline."""
    n_sym = n_b // t
    l = _check_sizes(info_set, n_sym, n_b, m_b, t)
    if l == 0:
        return PuncturePattern(n_b, (), None, (), ())
    frozen = np.setdiff1d(np.arange(n_sym), np.asarray(info_set))
    return _pattern_from_symbols(np.sort(frozen)[:l], info_set, n_b, m_b, t)


def apply_puncture(code_bits: np.ndarray, pattern: PuncturePattern) -> np.ndarray:
    """Drop the pattern's bit positions, preserving order; works on (..., N_b)."""
    bits = np.asarray(code_bits)
    if bits.shape[-1] != pattern.n_bits:
        raise ValueError(f"codeword length {bits.shape[-1]} != {pattern.n_bits}")
    if not pattern.punctured_bits:
        return bits
    keep = np.ones(pattern.n_bits, dtype=bool)
    keep[list(pattern.punctured_bits)] = False
    return bits[..., keep]


def pad_posteriors(
    received: np.ndarray,
    pattern: PuncturePattern,
    channel: AwgnChannel,
    field: FieldSpec,
) -> np.ndarray:
    """Symbol posteriors over the full block, punctured bits uninformative.

    `received` has shape (..., M_b); the result is (..., N, q).  A fully
    punctured symbol gets the uniform distribution.
    """
    y = np.asarray(received, dtype=np.float64)
    if y.shape[-1] != pattern.m_bits:
        raise ValueError(f"received length {y.shape[-1]} != M_b = {pattern.m_bits}")
    keep = np.ones(pattern.n_bits, dtype=bool)
    if pattern.punctured_bits:
        keep[list(pattern.punctured_bits)] = False
    full = np.zeros(y.shape[:-1] + (pattern.n_bits,))
    full[..., keep] = y
    mask = np.broadcast_to(keep, full.shape)
    return block_posteriors(full, channel, field, mask=mask)
