"""PDPW construction and the genie-aided Monte-Carlo baseline.

The polarization weight of index i with q-ary digits (d_0 .. d_{m-1}) is

    w(i) = sum_k  zeta(d_k) * beta^k * log2(D_{d_k})

where D_d = d + 1 is the kernel partial distance, zeta corrects for the
intra-layer gap between a sub-channel and its genie-aided version, and
beta > 1 corrects for the inter-layer effect.  zeta is estimated on a single
kernel layer by Monte-Carlo mutual information; beta is fitted by intersecting
the intervals implied by partial-order-incomparable index pairs whose
direction an MC reference resolves.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .channel import AwgnChannel, block_posteriors, estimate_I, transmit
from .codec import CodeSpec, genie_decode_batch, _kernel_tables
from .errors import EstimationError
from .galois import FieldSpec, build_field, unpack_symbols
from .kernel import RSKernel, build_rs_kernel, encode_batch
from .porder import comparable_matrix, incomparable_pairs, digits_of

# Back-derived GF(4) defaults at Eb/N0 = -1.8 dB; re-estimated by estimate_zeta
# in the test suite as a consistency check.
DEFAULT_ZETA_GF4 = (0.0, 0.7097, 0.8782, 1.0)
DEFAULT_BETA = 1.512


@dataclass(frozen=True)
class ZetaTable:
    """Intra-layer correction factors, one per single-kernel sub-channel."""

    values: tuple[float, ...]
    design_eb_n0_db: float
    n_samples: int
    monotone: bool = True

    def __post_init__(self):
        v = self.values
        if any(not 0.0 <= x <= 1.0 for x in v):
            raise ValueError("zeta values must lie in [0, 1]")
        if v[0] != 0.0 or v[-1] != 1.0:
            raise ValueError("zeta endpoints must be pinned to 0 and 1")


@dataclass(frozen=True)
class PdpwConfig:
    beta: float
    zeta: ZetaTable
    field: FieldSpec
    kernel: RSKernel

    def __post_init__(self):
        if not self.beta > 1.0:
            raise ValueError(f"beta={self.beta} must exceed 1")
        if len(self.zeta.values) != self.field.q:
            raise ValueError("zeta table size must equal q")


@dataclass(frozen=True)
class GenieStats:
    """Per-index genie-aided first-decision error counts."""

    trials: int
    wrong: np.ndarray
    eb_n0_db: float = math.nan
    seed: int | None = None

    def __post_init__(self):
        if np.any(np.asarray(self.wrong) > self.trials):
            raise ValueError("error counts exceed trial count")

    def error_rate(self) -> np.ndarray:
        return np.asarray(self.wrong, dtype=np.float64) / self.trials


@dataclass(frozen=True)
class ReliabilitySequence:
    """Sub-channel indices in decreasing reliability, with weights and provenance."""

    q: int
    m: int
    method: str
    weights: np.ndarray
    order: np.ndarray
    beta: float | None = None
    zeta: tuple[float, ...] | None = None
    design_eb_n0_db: float | None = None
    seed: int | None = None

    @property
    def N(self) -> int:
        return self.q ** self.m

    def to_json(self) -> str:
        return json.dumps({
            "q": self.q,
            "m": self.m,
            "method": self.method,
            "beta": self.beta,
            "zeta": list(self.zeta) if self.zeta is not None else None,
            "design_ebn0_db": self.design_eb_n0_db,
            "seed": self.seed,
            "weights": [float(w) for w in self.weights],
            "order": [int(i) for i in self.order],
        })

    @classmethod
    def from_json(cls, text: str) -> "ReliabilitySequence":
        d = json.loads(text)
        return cls(
            q=d["q"], m=d["m"], method=d["method"],
            weights=np.asarray(d["weights"], dtype=np.float64),
            order=np.asarray(d["order"], dtype=np.int64),
            beta=d.get("beta"),
            zeta=tuple(d["zeta"]) if d.get("zeta") is not None else None,
            design_eb_n0_db=d.get("design_ebn0_db"),
            seed=d.get("seed"),
        )


# ---------------------------------------------------------------------------
# zeta estimation on a single kernel layer
# ---------------------------------------------------------------------------

def _reduced_rows(kernel: RSKernel) -> np.ndarray:
    """Minimal-weight coset representatives g'_i of g_i + span(g_{i+1}..g_{q-1}).

    The sub-channel i is unchanged when row i is replaced by g'_i, but the
    genie-aided channel is defined with respect to the reduced matrix, whose
    row weight equals the partial distance D_i.
    """
    rows = kernel._cache.get("reduced_rows")
    if rows is None:
        from .kernel import _span

        out = np.zeros_like(kernel.matrix)
        for i in range(kernel.q):
            vecs = _span(kernel.matrix[i + 1:], kernel.field) ^ kernel.matrix[i][None, :]
            out[i] = vecs[np.count_nonzero(vecs, axis=1).argmin()]
        kernel._cache["reduced_rows"] = out
        rows = out
    return rows


def _single_kernel_posterior_samples(field, kernel, channel, T, rng, genie_mode, chunk=8192):
    """Posterior samples of each input symbol of one kernel layer.

    Returns (chan_samples, genie_samples): lists of (T, q) arrays per index i.
    chan_samples[i] conditions on the true prefix s_0^{i-1} and marginalizes
    the tail.  genie_samples[i] additionally conditions on the true tail,
    under the reduced matrix (row i at weight D_i); drawn from an independent
    simulation per index.
    """
    q = field.q
    mul = field.mul_table
    g = kernel.matrix
    cand = _kernel_tables(kernel)
    reduced = _reduced_rows(kernel)
    chan = [[] for _ in range(q)]
    genie = [[] for _ in range(q)]
    done = 0
    while done < T:
        b = min(chunk, T - done)
        s = rng.integers(0, q, size=(b, q)).astype(np.uint8)
        c = encode_batch(s, kernel, 1)
        y = transmit(unpack_symbols(c, field), channel, rng)
        post = block_posteriors(y, channel, field)            # (b, q, q)
        for i in range(q):
            base = np.zeros((b, q), dtype=np.uint8)
            for j in range(i):
                base ^= mul[s[:, j, None], g[j][None, :]]
            sym = base[:, None, None, :] ^ cand[i][None, :, :, :]   # (b, q, T_i, q)
            acc = None
            for col in range(q):
                src = np.broadcast_to(post[:, col, None, None, :], sym.shape[:-1] + (q,))
                val = np.take_along_axis(src, sym[..., col:col + 1].astype(np.int64), axis=-1)[..., 0]
                acc = val if acc is None else acc * val
            marg = acc.sum(axis=-1)
            marg /= marg.sum(axis=-1, keepdims=True)
            chan[i].append(marg)

            if genie_mode == "exact":
                gp = g.copy()
                gp[i] = reduced[i]
                s2 = rng.integers(0, q, size=(b, q)).astype(np.uint8)
                c2 = np.zeros((b, q), dtype=np.uint8)
                for j in range(q):
                    c2 ^= mul[s2[:, j, None], gp[j][None, :]]
                y2 = transmit(unpack_symbols(c2, field), channel, rng)
                post2 = block_posteriors(y2, channel, field)
                # One codeword per eta: flip coordinate i of the true input.
                etas = np.arange(q, dtype=np.uint8)
                x = c2[:, None, :] ^ mul[(etas[None, :] ^ s2[:, i, None])[..., None],
                                         gp[i][None, None, :]]
                gl = None
                for col in range(q):
                    src = np.broadcast_to(post2[:, col, None, :], (b, q, q))
                    val = np.take_along_axis(src, x[..., col:col + 1].astype(np.int64), axis=-1)[..., 0]
                    gl = val if gl is None else gl * val
                gl = gl / gl.sum(axis=-1, keepdims=True)
                genie[i].append(gl)
        done += b
    chan = [np.concatenate(v) for v in chan]
    genie = [np.concatenate(v) for v in genie] if genie_mode == "exact" else None
    return chan, genie


def estimate_zeta(
    field: FieldSpec,
    kernel: RSKernel,
    channel: AwgnChannel,
    T: int,
    rng: np.random.Generator,
    genie_mode: str = "exact",
) -> ZetaTable:
    """Estimate zeta(i) = I(sub-channel i) / I(genie-aided sub-channel i).

    The default "exact" mode simulates the genie posterior directly (the true
    tail symbols are revealed).  The "top" mode instead reuses the mutual
    information of sub-channel q-1 as the genie reference for every index,
    mirroring the cheaper published shortcut; it is off by default.
    Endpoints are pinned: zeta(0) = 0, zeta(q-1) = 1.
    """
    if genie_mode not in ("exact", "top"):
        raise ValueError(f"unknown genie_mode {genie_mode!r}")
    q = field.q
    chan, genie = _single_kernel_posterior_samples(
        field, kernel, channel, T, rng, genie_mode)
    i_chan = [estimate_I(chan[i]) for i in range(q)]
    if genie_mode == "exact":
        i_genie = [estimate_I(genie[i]) for i in range(q)]
    else:
        top = estimate_I(chan[q - 1])
        i_genie = [top] * q
    values = []
    for i in range(q):
        # Below ~0.02 bits the plug-in MI estimate is dominated by its own
        # bias, so the ratio would be meaningless.
        if i_genie[i] < 0.02:
            raise EstimationError(
                f"genie mutual information vanished at index {i}: "
                f"I_genie={i_genie[i]:.2e} (channel too noisy for a stable ratio)")
        values.append(min(max(i_chan[i] / i_genie[i], 0.0), 1.0))
    values[0] = 0.0
    values[-1] = 1.0
    monotone = all(values[i] <= values[i + 1] + 1e-12 for i in range(q - 1))
    return ZetaTable(tuple(values), channel.eb_n0_db, T, monotone)


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

def pdpw_weight(i: int, config: PdpwConfig, m: int) -> float:
    """Polarization weight of one index (exact evaluation of the definition)."""
    if not 0 <= i < config.field.q ** m:
        raise ValueError(f"index {i} out of range")
    zeta = config.zeta.values
    logd = [math.log2(d) for d in config.kernel.partial_distances]
    return float(sum(zeta[d] * config.beta ** k * logd[d]
                     for k, d in enumerate(digits_of(i, config.field.q, m))))


def pdpw_weights(config: PdpwConfig, m: int) -> np.ndarray:
    """Weights of all q^m indices."""
    q = config.field.q
    idx = np.arange(q ** m)
    digits = np.stack([(idx // q ** k) % q for k in range(m)], axis=1)
    contrib = np.asarray(config.zeta.values) * np.log2(
        np.asarray(config.kernel.partial_distances, dtype=np.float64))
    betas = config.beta ** np.arange(m)
    return (contrib[digits] * betas[None, :]).sum(axis=1)


# ---------------------------------------------------------------------------
# beta fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BetaInequality:
    """Solution set of w(i) > w(j) in beta, as intervals within (1, inf)."""

    i: int
    j: int
    intervals: tuple[tuple[float, float], ...]

    def holds_at(self, beta: float) -> bool:
        return any(lo < beta < hi for lo, hi in self.intervals)


def beta_threshold(pair: tuple[int, int], zeta: ZetaTable, q: int, m: int) -> BetaInequality:
    """Where (in beta > 1) index i out-weighs index j, for an incomparable pair."""
    i, j = pair
    from .porder import po_dominates
    if po_dominates(i, j, q, m) or po_dominates(j, i, q, m):
        raise ValueError(f"pair ({i}, {j}) is comparable under the partial order")
    logd = np.log2(np.arange(1, q + 1, dtype=np.float64))
    zv = np.asarray(zeta.values)
    ci = np.array([zv[d] * logd[d] for d in digits_of(i, q, m)])
    cj = np.array([zv[d] * logd[d] for d in digits_of(j, q, m)])
    coef = ci - cj                                  # g(beta) = w(i) - w(j)
    if not np.any(coef):
        return BetaInequality(i, j, ())
    roots = np.roots(coef[::-1])
    cuts = sorted(r.real for r in roots
                  if abs(r.imag) < 1e-9 and r.real > 1.0 + 1e-12)
    edges = [1.0] + cuts + [math.inf]
    intervals = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = lo + 0.5 if math.isinf(hi) else 0.5 * (lo + hi)
        if np.polyval(coef[::-1], mid) > 0.0:
            intervals.append((lo, hi))
    return BetaInequality(i, j, tuple(intervals))


@dataclass(frozen=True)
class BetaFit:
    interval: tuple[float, float]
    beta: float
    constraints: tuple[BetaInequality, ...]
    conflicts: tuple[tuple[int, int], ...] = ()


def _pick_beta(lo: float, hi: float) -> float:
    if math.isinf(hi):
        return lo + 0.5
    return 0.5 * (lo + hi)


def fit_beta(
    zeta: ZetaTable,
    q: int,
    m_max: int,
    mc_reference=None,
    beta: float | None = None,
) -> BetaFit:
    """Fit beta from incomparable-pair inequalities resolved by an MC reference.

    mc_reference maps stage count m (2 .. m_max) to a GenieStats or an array
    of per-index error rates at N = q^m.  Without a reference, a user-supplied
    beta is accepted unchanged.  On an empty intersection the widest interval
    violating the fewest constraints is reported together with the conflicting
    pairs.
    """
    if mc_reference is None:
        if beta is None or not beta > 1.0:
            raise ValueError("without an MC reference a beta > 1 must be supplied")
        return BetaFit((1.0, math.inf), beta, ())

    constraints: list[BetaInequality] = []
    for m in range(2, m_max + 1):
        if m not in mc_reference:
            continue
        ref = mc_reference[m]
        rates = ref.error_rate() if isinstance(ref, GenieStats) else np.asarray(ref, float)
        if rates.shape != (q ** m,):
            raise ValueError(f"MC reference for m={m} has wrong length")
        for i, j in incomparable_pairs(q, m):
            if rates[i] == rates[j]:
                continue                      # direction unresolved; no constraint
            hi_idx, lo_idx = (i, j) if rates[i] < rates[j] else (j, i)
            ineq = beta_threshold((hi_idx, lo_idx), zeta, q, m)
            if ineq.intervals:
                constraints.append(ineq)

    # Sweep interval edges; keep the region violating the fewest constraints.
    edges = {1.0}
    for c in constraints:
        for lo, hi in c.intervals:
            edges.add(lo)
            if not math.isinf(hi):
                edges.add(hi)
    cuts = sorted(edges) + [math.inf]
    best = None
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = lo + 0.5 if math.isinf(hi) else 0.5 * (lo + hi)
        bad = tuple((c.i, c.j) for c in constraints if not c.holds_at(mid))
        width = (hi - lo) if not math.isinf(hi) else math.inf
        key = (len(bad), -width)
        if best is None or key < best[0]:
            best = (key, (lo, hi), bad)
    _, (lo, hi), bad = best
    return BetaFit((lo, hi), _pick_beta(lo, hi), tuple(constraints), bad)


# ---------------------------------------------------------------------------
# Monte-Carlo construction
# ---------------------------------------------------------------------------

def mc_construct(
    field: FieldSpec,
    kernel: RSKernel,
    N: int,
    channel: AwgnChannel,
    T: int,
    rng: np.random.Generator,
    chunk: int = 512,
) -> GenieStats:
    """Genie-aided SC error statistics: per-index first-decision error rates."""
    q = field.q
    m = 0
    while q ** m < N:
        m += 1
    if q ** m != N:
        raise ValueError(f"N={N} is not a power of q={q}")
    spec = CodeSpec(field, kernel, m, np.arange(N), crc_width=0, list_size=1)
    wrong = np.zeros(N, dtype=np.int64)
    done = 0
    while done < T:
        b = min(chunk, T - done)
        s = rng.integers(0, q, size=(b, N)).astype(np.uint8)
        bits = unpack_symbols(encode_batch(s, kernel, m), field)
        y = transmit(bits, channel, rng)
        post = block_posteriors(y, channel, field)
        wrong += genie_decode_batch(post, spec, s).sum(axis=0)
        done += b
    return GenieStats(T, wrong, channel.eb_n0_db)


# ---------------------------------------------------------------------------
# sequence assembly
# ---------------------------------------------------------------------------

def _order_by_weight(weights: np.ndarray, q: int, m: int) -> np.ndarray:
    """Indices sorted by decreasing weight; ties broken by domination, then index."""
    n = weights.shape[0]
    order = np.argsort(-weights, kind="stable")
    out = []
    pos = 0
    reach = None
    while pos < n:
        grp = [int(order[pos])]
        while pos + len(grp) < n and weights[order[pos + len(grp)]] == weights[grp[0]]:
            grp.append(int(order[pos + len(grp)]))
        if len(grp) > 1:
            if reach is None:
                reach = comparable_matrix(q, m)
            grp.sort(reverse=True)
            ordered: list[int] = []
            remaining = grp[:]
            while remaining:
                # Dominators first; among maximal elements pick the largest index.
                for cand in remaining:
                    if not any(reach[cand, other] for other in remaining if other != cand):
                        ordered.append(cand)
                        remaining.remove(cand)
                        break
            grp = ordered
        out.extend(grp)
        pos += len(grp)
    return np.asarray(out, dtype=np.int64)


def build_sequence(
    method: str,
    N: int,
    config: PdpwConfig | None = None,
    stats: GenieStats | None = None,
    seed: int | None = None,
) -> ReliabilitySequence:
    """Reliability sequence for a length-N code, by PDPW weights or MC rates."""
    if method == "pdpw":
        if config is None:
            raise ValueError("pdpw construction needs a PdpwConfig")
        q = config.field.q
        m = round(math.log(N, q))
        if q ** m != N:
            raise ValueError(f"N={N} is not a power of q={q}")
        weights = pdpw_weights(config, m)
        order = _order_by_weight(weights, q, m)
        return ReliabilitySequence(
            q=q, m=m, method="pdpw", weights=weights, order=order,
            beta=config.beta, zeta=config.zeta.values,
            design_eb_n0_db=config.zeta.design_eb_n0_db, seed=seed)
    if method == "mc":
        if stats is None:
            raise ValueError("mc construction needs GenieStats")
        rates = stats.error_rate()
        if rates.shape[0] != N:
            raise ValueError(f"stats cover {rates.shape[0]} indices, need {N}")
        q_guess = _infer_q(N, rates)
        weights = -rates
        m = round(math.log(N, q_guess))
        order = _order_by_weight(weights, q_guess, m)
        return ReliabilitySequence(
            q=q_guess, m=m, method="mc", weights=weights, order=order,
            design_eb_n0_db=stats.eb_n0_db, seed=stats.seed)
    raise ValueError(f"unknown construction method {method!r}")


def _infer_q(N: int, rates) -> int:
    for q in (4, 8, 16, 2):
        m = round(math.log(N, q)) if N > 1 else 1
        if q ** m == N:
            return q
    raise ValueError(f"cannot infer q from N={N}")


def select_info_set(seq: ReliabilitySequence, K: int) -> np.ndarray:
    """The K most reliable indices (sorted ascending)."""
    if not 0 < K <= seq.N:
        raise ValueError(f"K={K} out of range (0, {seq.N}]")
    return np.sort(seq.order[:K])


def verify_po_consistency(weights: np.ndarray, q: int, m: int) -> int:
    """Number of dominating pairs whose weights are out of order (should be 0)."""
    reach = comparable_matrix(q, m)
    ii, jj = np.nonzero(reach & ~np.eye(reach.shape[0], dtype=bool))
    return int(np.count_nonzero(weights[jj] < weights[ii]))


def design_channel(eb_n0_db: float = -1.8) -> AwgnChannel:
    """Construction-time channel: Eb/N0 referenced to uncoded BPSK (R = 1).

    At this convention the Monte-Carlo reference at -1.8 dB resolves the
    incomparable-pair directions that yield the documented (1.437, 1.55)
    beta interval for GF(4).
    """
    return AwgnChannel(eb_n0_db, 1.0)


def default_gf4_config(beta: float = DEFAULT_BETA,
                       zeta_values=DEFAULT_ZETA_GF4,
                       design_eb_n0_db: float = -1.8) -> PdpwConfig:
    """GF(4) PDPW configuration with the back-derived default corrections."""
    field = build_field(2)
    kernel = build_rs_kernel(field)
    zeta = ZetaTable(tuple(zeta_values), design_eb_n0_db, 0)
    return PdpwConfig(beta, zeta, field, kernel)
