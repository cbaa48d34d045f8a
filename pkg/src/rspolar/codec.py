"""Symbol-level SC and CRC-aided SCL codec for RS-kernel polar codes.

Decoding follows the natural-order factorization of c = s G^(x)m: a length
q^r block splits into q rows; row a sees, at each of the q^(r-1) positions,
the a-th single-kernel sub-channel given the re-encoded earlier rows, and is
itself decoded recursively.  Per-node posteriors stay in the linear domain
(renormalized at every stage); path metrics accumulate log-posteriors, so a
path's metric is its exact log probability given the channel output.

Everything is vectorized over a trial batch axis B and a path axis P so that
Monte-Carlo runs amortize numpy dispatch overhead.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .galois import FieldSpec, pack_bits, unpack_symbols
from .kernel import RSKernel, encode_batch

CRC8_POLY = 0x07       # x^8 + x^2 + x + 1, zero initial register, no reflection


# ---------------------------------------------------------------------------
# CRC
# ---------------------------------------------------------------------------

def crc_remainder_batch(bits: np.ndarray, width: int = 8, poly: int = CRC8_POLY) -> np.ndarray:
    """CRC remainder of each row of a (B, K) bit array, as (B, width) bits."""
    bits = np.asarray(bits, dtype=np.uint8)
    reg = np.zeros(bits.shape[0], dtype=np.int64)
    mask = (1 << width) - 1
    for j in range(bits.shape[1]):
        fb = ((reg >> (width - 1)) & 1) ^ bits[:, j]
        reg = ((reg << 1) & mask) ^ (fb * poly)
    out = np.zeros((bits.shape[0], width), dtype=np.uint8)
    for b in range(width):
        out[:, b] = (reg >> (width - 1 - b)) & 1
    return out


def crc_attach(info_bits, width: int = 8, poly: int = CRC8_POLY) -> np.ndarray:
    """Append the CRC remainder to a bit sequence."""
    bits = np.asarray(info_bits, dtype=np.uint8).reshape(1, -1)
    return np.concatenate([bits[0], crc_remainder_batch(bits, width, poly)[0]])


def crc_check(bits, width: int = 8, poly: int = CRC8_POLY) -> bool:
    """True iff the trailing `width` bits are the CRC of the payload."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape[0] < width:
        raise ValueError("stream shorter than the CRC width")
    rem = crc_remainder_batch(bits[None, : bits.shape[0] - width], width, poly)[0]
    return bool(np.array_equal(rem, bits[bits.shape[0] - width:]))


def crc_check_batch(bits: np.ndarray, width: int, poly: int = CRC8_POLY) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    k = bits.shape[1] - width
    rem = crc_remainder_batch(bits[:, :k], width, poly)
    return (rem == bits[:, k:]).all(axis=1)


# ---------------------------------------------------------------------------
# Code specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CodeSpec:
    """One concrete code: kernel, stage count, info set and CRC/list settings."""

    field: FieldSpec
    kernel: RSKernel
    m: int
    info_set: np.ndarray
    crc_width: int = 8
    crc_poly: int = CRC8_POLY
    list_size: int = 2
    frozen_mask: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self):
        n = self.N
        info = np.unique(np.asarray(self.info_set, dtype=np.int64))
        if info.size != np.asarray(self.info_set).size:
            raise ValueError("info set contains duplicates")
        if info.size and (info[0] < 0 or info[-1] >= n):
            raise ValueError("info set index out of range")
        object.__setattr__(self, "info_set", info)
        mask = np.ones(n, dtype=bool)
        mask[info] = False
        object.__setattr__(self, "frozen_mask", mask)
        if self.crc_width < 0 or (self.crc_width and self.crc_width >= self.K_b):
            raise ValueError(f"crc_width {self.crc_width} infeasible for K_b={self.K_b}")
        if self.list_size < 1:
            raise ValueError("list size must be >= 1")

    @property
    def N(self) -> int:
        return self.field.q ** self.m

    @property
    def K_sym(self) -> int:
        return int(self.info_set.size)

    @property
    def K_b(self) -> int:
        return self.K_sym * self.field.t

    @property
    def payload_bits(self) -> int:
        return self.K_b - self.crc_width

    @property
    def N_b(self) -> int:
        return self.N * self.field.t


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

def encode_codeword(info_bits, spec: CodeSpec) -> np.ndarray:
    """Map K_b info bits (CRC already attached) to the N_b-bit codeword."""
    bits = np.asarray(info_bits, dtype=np.uint8)
    if bits.shape != (spec.K_b,):
        raise ValueError(f"expected {spec.K_b} bits, got {bits.shape}")
    return encode_codeword_batch(bits[None, :], spec)[0]


def encode_codeword_batch(info_bits: np.ndarray, spec: CodeSpec) -> np.ndarray:
    bits = np.asarray(info_bits, dtype=np.uint8)
    u = np.zeros((bits.shape[0], spec.N), dtype=np.uint8)
    if spec.K_sym:
        u[:, spec.info_set] = pack_bits(bits, spec.field)
    x = encode_batch(u, spec.kernel, spec.m)
    return unpack_symbols(x, spec.field)


# ---------------------------------------------------------------------------
# Single-kernel marginal (public, exact)
# ---------------------------------------------------------------------------

def _kernel_tables(kernel: RSKernel):
    """Cached per-row candidate codeword tables.

    cand[a][eta, tail, c] is the c-th coordinate of eta*g_a plus the tail-th
    element of span(g_{a+1} .. g_{q-1}).
    """
    cache = kernel._cache
    tabs = cache.get("marginal_tables")
    if tabs is None:
        from .kernel import _span

        q = kernel.q
        mul = kernel.field.mul_table
        tabs = []
        for a in range(q):
            tails = _span(kernel.matrix[a + 1:], kernel.field)       # (T, q)
            sm = mul[np.arange(q)[:, None], kernel.matrix[a][None, :]]  # (q, q)
            tabs.append(sm[:, None, :] ^ tails[None, :, :])
        cache["marginal_tables"] = tabs
    return tabs


def kernel_marginal(posteriors, decided, i: int, kernel: RSKernel) -> np.ndarray:
    """Posterior of kernel input i given q output posteriors and decided prefix.

    Exact enumeration over the q^(q-1-i) undecided tails.  `posteriors` is a
    (q, q) array whose row c is the distribution of output symbol c.
    """
    q = kernel.q
    if not 0 <= i < q:
        raise ValueError(f"input index {i} out of range [0, {q})")
    post = np.asarray(posteriors, dtype=np.float64)
    if post.shape != (q, q):
        raise ValueError(f"expected ({q}, {q}) posterior array")
    decided = np.asarray(decided, dtype=np.uint8)
    if decided.shape != (i,):
        raise ValueError(f"expected {i} decided symbols")
    mul = kernel.field.mul_table
    base = np.zeros(q, dtype=np.uint8)
    for j in range(i):
        base ^= mul[decided[j], kernel.matrix[j]]
    cand = _kernel_tables(kernel)[i]                     # (q, T, q)
    sym = base[None, None, :] ^ cand
    probs = np.ones(sym.shape[:2])
    for c in range(q):
        probs = probs * post[c, sym[:, :, c]]
    marg = probs.sum(axis=1)
    total = marg.sum()
    if total <= 0.0:
        raise FloatingPointError("zero total mass in kernel marginal")
    return marg / total


# ---------------------------------------------------------------------------
# Batched SC / SCL / genie engine
# ---------------------------------------------------------------------------

class _Engine:
    """One decode pass over a batch of trials; paths live on a second axis."""

    def __init__(self, spec: CodeSpec, mode: str, list_size: int,
                 truth: np.ndarray | None = None):
        self.spec = spec
        self.q = spec.field.q
        self.mode = mode                      # "list" or "genie"
        self.L = list_size
        self.truth = truth
        self.kernel = spec.kernel
        self.mul = spec.field.mul_table
        self.g = spec.kernel.matrix
        self.cand = _kernel_tables(spec.kernel)
        self.metric = None
        self.errors = None

    def run(self, posteriors: np.ndarray):
        """posteriors: (B, N, q) -> (paths (B, P, N), metrics (B, P))."""
        B = posteriors.shape[0]
        self.metric = np.zeros((B, 1))
        if self.mode == "genie":
            self.errors = np.zeros((B, self.spec.N), dtype=bool)
        s, _ = self._block(posteriors[:, None, :, :], 0)
        return s, self.metric

    # -- marginalization --------------------------------------------------

    def _marginal(self, pr: np.ndarray, base: np.ndarray, a: int) -> np.ndarray:
        # pr: (B, P, q, M, q) slot-major posteriors; base: (B, P, M, q) decided
        # prefix contribution per slot.  Returns (B, P, M, q).
        cand = self.cand[a]                                  # (q, T, q)
        q = self.q
        acc = None
        for c in range(q):
            sym = base[:, :, :, c, None, None] ^ cand[None, None, None, :, :, c]
            src = np.broadcast_to(pr[:, :, c, :, None, :], sym.shape[:-1] + (q,))
            val = np.take_along_axis(src, sym, axis=-1)
            acc = val if acc is None else acc * val
        marg = acc.sum(axis=-1)
        total = marg.sum(axis=-1, keepdims=True)
        # Dead list paths can zero out; give them a uniform (their metric is
        # already -inf so they never win).
        safe = np.where(total > 0.0, total, 1.0)
        marg = np.where(total > 0.0, marg / safe, 1.0 / q)
        return marg

    # -- recursion ---------------------------------------------------------

    def _block(self, pblk: np.ndarray, gbase: int):
        B, P, n = pblk.shape[0], pblk.shape[1], pblk.shape[2]
        if n == 1:
            return self._leaf(pblk[:, :, 0, :], gbase)
        q = self.q
        M = n // q
        m_child = 0
        while q ** (m_child + 1) < n:
            m_child += 1
        pr = pblk.reshape(B, P, q, M, q)
        base = np.zeros((B, P, M, q), dtype=np.uint8)
        s_out = np.zeros((B, P, n), dtype=np.uint8)
        sel_total = np.broadcast_to(np.arange(P)[None, :], (B, P))
        bi = np.arange(B)[:, None]
        for a in range(q):
            marg = self._marginal(pr, base, a)
            s_child, sel = self._block(marg, gbase + a * M)
            if sel.shape[1] != pr.shape[1] or not np.array_equal(
                    sel, np.broadcast_to(np.arange(sel.shape[1])[None, :], sel.shape)):
                pr = pr[bi, sel]
                base = base[bi, sel]
                s_out = s_out[bi, sel]
                sel_total = np.take_along_axis(np.asarray(sel_total), sel, axis=1)
            s_out[:, :, a * M:(a + 1) * M] = s_child
            z = encode_batch(s_child.reshape(-1, M), self.kernel, m_child)
            z = z.reshape(s_child.shape)
            base = base ^ self.mul[z[..., None], self.g[a][None, None, None, :]]
        return s_out, sel_total

    # -- leaves ------------------------------------------------------------

    def _leaf(self, post: np.ndarray, gi: int):
        B, P = post.shape[0], post.shape[1]
        ident = np.broadcast_to(np.arange(P)[None, :], (B, P))
        if self.mode == "genie":
            am = post.argmax(axis=-1)
            truth = self.truth[:, gi]
            self.errors[:, gi] = am[:, 0] != truth
            return truth[:, None, None].astype(np.uint8)[:, :P], ident
        with np.errstate(divide="ignore"):
            logp = np.log(post)
        if self.spec.frozen_mask[gi]:
            self.metric = self.metric + logp[:, :, 0]
            return np.zeros((B, P, 1), dtype=np.uint8), ident
        cand = (self.metric[:, :, None] + logp).reshape(B, P * self.q)
        keep = min(self.L, P * self.q)
        order = np.argsort(-cand, axis=1, kind="stable")[:, :keep]
        self.metric = np.take_along_axis(cand, order, axis=1)
        sel = order // self.q
        sym = (order % self.q).astype(np.uint8)
        return sym[:, :, None], sel


# ---------------------------------------------------------------------------
# Public decoding entry points
# ---------------------------------------------------------------------------

@dataclass
class DecodeResult:
    info_bits: np.ndarray
    crc_ok: bool
    symbols: np.ndarray
    metric: float


def sc_decode(leaf_posteriors: np.ndarray, spec: CodeSpec) -> np.ndarray:
    """Successive-cancellation decode; returns the N decided input symbols."""
    s, _ = _Engine(spec, "list", 1).run(np.asarray(leaf_posteriors, np.float64)[None])
    return s[0, 0]


def extract_info_bits(symbols: np.ndarray, spec: CodeSpec) -> np.ndarray:
    """Info-position symbols of one or more decoded vectors, unpacked to bits."""
    return unpack_symbols(np.asarray(symbols, np.uint8)[..., spec.info_set], spec.field)


def ca_scl_decode_batch(posteriors: np.ndarray, spec: CodeSpec):
    """CA-SCL over a batch.

    Returns (info_bits (B, K_b), crc_ok (B,), symbols (B, N), metric (B,)).
    Paths are ranked by metric; the best CRC-passing path wins, otherwise the
    best-metric path is returned flagged as failed.
    """
    post = np.asarray(posteriors, dtype=np.float64)
    paths, metrics = _Engine(spec, "list", spec.list_size).run(post)
    B, P = metrics.shape
    order = np.argsort(-metrics, axis=1, kind="stable")
    bi = np.arange(B)[:, None]
    paths = paths[bi, order]
    metrics = np.take_along_axis(metrics, order, axis=1)
    bits = extract_info_bits(paths, spec)                     # (B, P, K_b)
    if spec.crc_width == 0:
        pick = np.zeros(B, dtype=np.int64)
        any_ok = np.ones(B, dtype=bool)
    else:
        ok = crc_check_batch(bits.reshape(B * P, -1), spec.crc_width, spec.crc_poly)
        ok = ok.reshape(B, P)
        any_ok = ok.any(axis=1)
        pick = np.where(any_ok, ok.argmax(axis=1), 0)
    rows = np.arange(B)
    return bits[rows, pick], any_ok, paths[rows, pick], metrics[rows, pick]


def ca_scl_decode(leaf_posteriors: np.ndarray, spec: CodeSpec) -> DecodeResult:
    """List decode one block; CRC selects among the surviving paths."""
    post = np.asarray(leaf_posteriors, dtype=np.float64)[None]
    bits, ok, symbols, metric = ca_scl_decode_batch(post, spec)
    return DecodeResult(bits[0], bool(ok[0]), symbols[0], float(metric[0]))


def genie_decode_batch(posteriors: np.ndarray, spec: CodeSpec, truth: np.ndarray) -> np.ndarray:
    """SC with genie feedback: per-index first-decision error flags (B, N).

    Every decision is replaced by the true symbol after recording whether the
    ML choice at that index was wrong.
    """
    eng = _Engine(spec, "genie", 1, truth=np.asarray(truth, dtype=np.int64))
    eng.run(np.asarray(posteriors, dtype=np.float64))
    return eng.errors
