"""BPSK/AWGN channel model and Monte-Carlo estimators for I(W), Z(W), P_e bounds.

Bit 0 maps to +1, bit 1 to -1.  The noise variance derives from Eb/N0 and the
actual transmitted bit rate R = K_b/M_b (CRC bits counted in K_b), via
sigma^2 = 1 / (2 R 10^(EbN0/10)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .galois import FieldSpec


@dataclass(frozen=True)
class AwgnChannel:
    eb_n0_db: float
    code_rate: float = 1.0

    def __post_init__(self):
        if not 0 < self.code_rate <= 1:
            raise ValueError(f"code rate {self.code_rate} outside (0, 1]")

    @property
    def sigma2(self) -> float:
        if math.isinf(self.eb_n0_db) and self.eb_n0_db > 0:
            return 0.0
        return 1.0 / (2.0 * self.code_rate * 10.0 ** (self.eb_n0_db / 10.0))


def transmit(code_bits: np.ndarray, channel: AwgnChannel, rng: np.random.Generator) -> np.ndarray:
    """BPSK-modulate and add white Gaussian noise from the supplied generator."""
    bits = np.asarray(code_bits)
    x = 1.0 - 2.0 * bits
    if channel.sigma2 == 0.0:
        return x
    return x + rng.normal(0.0, math.sqrt(channel.sigma2), size=bits.shape)


def block_posteriors(
    y: np.ndarray,
    channel: AwgnChannel,
    field: FieldSpec,
    mask: np.ndarray | None = None,
) -> np.ndarray:
    """Per-symbol posteriors from received bit values.

    y has shape (..., N*t); the result has shape (..., N, q), each row a
    normalized distribution over symbol values.  Entries of `mask` that are
    False mark punctured bit positions, which contribute equal likelihood to
    every symbol (LLR 0).
    """
    y = np.asarray(y, dtype=np.float64)
    t, q = field.t, field.q
    if y.shape[-1] % t:
        raise ValueError("received length not a multiple of t")
    yg = y.reshape(y.shape[:-1] + (-1, t))              # (..., N, t)
    levels = 1.0 - 2.0 * field.bits_of_sym.astype(np.float64)   # (q, t)
    if channel.sigma2 == 0.0:
        # Noiseless limit: indicator of exact agreement on unmasked bits.
        match = yg[..., None, :] == levels[None, :, :]
        if mask is not None:
            match = match | ~np.asarray(mask, bool).reshape(yg.shape[:-1] + (1, t))
        post = match.all(axis=-1).astype(np.float64)
    else:
        d2 = (yg[..., None, :] - levels[None, :, :]) ** 2   # (..., N, q, t)
        if mask is not None:
            d2 = np.where(np.asarray(mask, bool).reshape(yg.shape[:-1] + (1, t)), d2, 0.0)
        loglik = -d2.sum(axis=-1) / (2.0 * channel.sigma2)
        loglik -= loglik.max(axis=-1, keepdims=True)
        post = np.exp(loglik)
    total = post.sum(axis=-1, keepdims=True)
    if np.any(total == 0.0):
        raise FloatingPointError("zero total likelihood while normalizing posteriors")
    return post / total


def symbol_posteriors(y_bits: np.ndarray, channel: AwgnChannel, field: FieldSpec) -> np.ndarray:
    """Posterior over the q symbol values given the t received reals of one symbol."""
    y_bits = np.asarray(y_bits, dtype=np.float64)
    if y_bits.shape != (field.t,):
        raise ValueError(f"expected {field.t} received values, got shape {y_bits.shape}")
    return block_posteriors(y_bits, channel, field)[0]


def _pair_log_ratio(y: np.ndarray, x_bits: np.ndarray, field: FieldSpec, sigma2: float) -> np.ndarray:
    # log W(y|x') - log W(y|x) for all x', vectorized over samples.
    levels = 1.0 - 2.0 * field.bits_of_sym.astype(np.float64)     # (q, t)
    d2 = ((y[:, None, :] - levels[None, :, :]) ** 2).sum(axis=-1)  # (T, q)
    tx = (y - (1.0 - 2.0 * x_bits)) ** 2
    return -(d2 - tx.sum(axis=-1)[:, None]) / (2.0 * sigma2)


def estimate_Z_pairs(
    channel: AwgnChannel,
    field: FieldSpec,
    n_samples: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Monte-Carlo estimate of the pairwise Bhattacharyya matrix Z_{x,x'}.

    Each sample draws a uniform input x and one channel output y, accumulating
    the importance-sampled expectation E_y[sqrt(W(y|x')/W(y|x))] into row x.
    The diagonal is 1 by definition.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    q, t = field.q, field.t
    if channel.sigma2 == 0.0:
        return np.eye(q)    # disjoint supports: Z_{x,x'} = 0 off the diagonal
    acc = np.zeros((q, q))
    counts = np.zeros(q)
    chunk = 1 << 14
    done = 0
    while done < n_samples:
        b = min(chunk, n_samples - done)
        x = rng.integers(0, q, size=b)
        x_bits = field.bits_of_sym[x].astype(np.float64)
        y = transmit(x_bits, channel, rng)
        ratios = np.exp(0.5 * _pair_log_ratio(y, x_bits, field, channel.sigma2))
        np.add.at(acc, x, ratios)
        np.add.at(counts, x, 1.0)
        done += b
    z = np.divide(acc, counts[:, None], out=np.zeros_like(acc), where=counts[:, None] > 0)
    np.fill_diagonal(z, 1.0)
    return z


def estimate_Z(
    channel: AwgnChannel,
    field: FieldSpec,
    n_samples: int,
    rng: np.random.Generator,
) -> float:
    """Average Bhattacharyya parameter: mean of Z_{x,x'} over ordered pairs x != x'."""
    z = estimate_Z_pairs(channel, field, n_samples, rng)
    q = field.q
    return float((z.sum() - np.trace(z)) / (q * (q - 1)))


def estimate_I(posterior_samples: np.ndarray) -> float:
    """Mutual information from posterior samples under a uniform input prior.

    Each sample contributes log2(q) + sum_eta p(eta) log2 p(eta); the average
    is clamped to [0, log2 q].
    """
    p = np.asarray(posterior_samples, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] == 0:
        raise ValueError("need a nonempty (T, q) array of posterior samples")
    q = p.shape[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(p > 0.0, p * np.log2(np.maximum(p, 1e-300)), 0.0)
    i_hat = math.log2(q) + plogp.sum(axis=1).mean()
    return float(min(max(i_hat, 0.0), math.log2(q)))


def pe_bound(z: float, q: int) -> float:
    """Upper bound (q - 1) Z(W) on the ML error probability."""
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"z={z} outside [0, 1]")
    return (q - 1) * z
