"""End-to-end BLER simulation: config, deterministic trial engine, CSV/JSON output.

Every trial owns a generator seeded by (master_seed, grid_index, trial_index),
so results are bit-identical for any worker count or batching; workers only
change how trial indices are chunked.  Early stop truncates at the first
trial index where the cumulative block-error count reaches the limit, which
is likewise schedule-independent.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from .channel import AwgnChannel
from .codec import CodeSpec, ca_scl_decode_batch, crc_remainder_batch, encode_codeword_batch
from .construct import (GenieStats, PdpwConfig, ReliabilitySequence, ZetaTable,
                        build_sequence, design_channel, mc_construct,
                        select_info_set, DEFAULT_BETA, DEFAULT_ZETA_GF4)
from .errors import ConfigurationError
from .galois import build_field
from .kernel import build_rs_kernel
from .ratematch import PuncturePattern, apply_puncture, mpwp_pattern, pad_posteriors, sip_pattern


@dataclass
class SimConfig:
    q: int = 4
    m: int = 4
    k_info_bits: int = 256                  # K_b, CRC included
    crc_width: int = 8
    list_size: int = 2
    construction: str = "pdpw"              # "pdpw" or "mc"
    beta: float = DEFAULT_BETA
    zeta: tuple[float, ...] | None = None   # defaults per field
    design_eb_n0_db: float = -1.8
    mc_trials: int = 20000
    construction_seed: int = 0
    ratematch: str = "none"                 # "none", "mpwp", "sip"
    m_bits: int | None = None               # M_b; None means N_b
    eb_n0_grid: tuple[float, ...] = (2.0, 2.5, 3.0)
    max_trials: int = 100000
    max_block_errors: int = 100
    master_seed: int = 0
    worker_count: int = 1

    def __post_init__(self):
        grid = tuple(float(x) for x in self.eb_n0_grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigurationError("Eb/N0 grid must be strictly increasing")
        self.eb_n0_grid = grid

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SimConfig":
        d = json.loads(text)
        if d.get("zeta") is not None:
            d["zeta"] = tuple(d["zeta"])
        d["eb_n0_grid"] = tuple(d["eb_n0_grid"])
        return cls(**d)


@dataclass
class PointResult:
    eb_n0_db: float
    trials: int
    block_errors: int
    bler: float
    wall_time: float


@dataclass
class SimResult:
    config: dict
    points: list[PointResult]
    code_rate: float
    seed: int
    version: str = "rspolar-0.1.0"

    def to_json(self) -> str:
        return json.dumps({
            "version": self.version,
            "seed": self.seed,
            "code_rate": self.code_rate,
            "config": self.config,
            "points": [asdict(p) for p in self.points],
        }, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SimResult":
        d = json.loads(text)
        return cls(config=d["config"], seed=d["seed"], code_rate=d["code_rate"],
                   version=d["version"],
                   points=[PointResult(**p) for p in d["points"]])

    def counts_equal(self, other: "SimResult") -> bool:
        return all(a.trials == b.trials and a.block_errors == b.block_errors
                   for a, b in zip(self.points, other.points)) \
            and len(self.points) == len(other.points)


def build_code(config: SimConfig) -> tuple[CodeSpec, PuncturePattern, ReliabilitySequence]:
    """Instantiate the code, reliability sequence and puncture pattern for a config."""
    field = build_field({2: 1, 4: 2, 8: 3, 16: 4}.get(config.q) or _bad_q(config.q))
    kernel = build_rs_kernel(field)
    n = config.q ** config.m
    n_b = n * field.t
    if config.k_info_bits % field.t:
        raise ConfigurationError(f"K_b={config.k_info_bits} not a multiple of t={field.t}")
    k_sym = config.k_info_bits // field.t
    if not 0 < k_sym <= n:
        raise ConfigurationError(f"K_b={config.k_info_bits} infeasible for N_b={n_b}")

    if config.construction == "pdpw":
        zeta_vals = config.zeta
        if zeta_vals is None:
            if config.q != 4:
                raise ConfigurationError("default zeta table only ships for q=4; pass zeta")
            zeta_vals = DEFAULT_ZETA_GF4
        zeta = ZetaTable(tuple(zeta_vals), config.design_eb_n0_db, 0)
        seq = build_sequence("pdpw", n, config=PdpwConfig(config.beta, zeta, field, kernel),
                             seed=config.construction_seed)
    elif config.construction == "mc":
        rng = np.random.default_rng((config.construction_seed, 0x4D43))
        stats = mc_construct(field, kernel, n, design_channel(config.design_eb_n0_db),
                             config.mc_trials, rng)
        stats = GenieStats(stats.trials, stats.wrong, stats.eb_n0_db, config.construction_seed)
        seq = build_sequence("mc", n, stats=stats)
    else:
        raise ConfigurationError(f"unknown construction {config.construction!r}")

    info = select_info_set(seq, k_sym)
    spec = CodeSpec(field, kernel, config.m, info,
                    crc_width=config.crc_width, list_size=config.list_size)

    m_b = n_b if config.m_bits is None else config.m_bits
    try:
        if config.ratematch == "none":
            if m_b != n_b:
                raise ConfigurationError("M_b < N_b requires a rate-matching scheme")
            pattern = PuncturePattern(n_b, (), None, (), ())
        elif config.ratematch == "mpwp":
            pattern = mpwp_pattern(seq, info, n_b, m_b, field.t)
        elif config.ratematch == "sip":
            pattern = sip_pattern(info, n_b, m_b, field.t)
        else:
            raise ConfigurationError(f"unknown rate-matching scheme {config.ratematch!r}")
    except ConfigurationError:
        raise
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc
    if config.k_info_bits > pattern.m_bits:
        raise ConfigurationError(
            f"K_b={config.k_info_bits} exceeds transmitted bits M_b={pattern.m_bits}")
    return spec, pattern, seq


def _bad_q(q):
    raise ConfigurationError(f"unsupported field order q={q}")


def _run_point(spec: CodeSpec, pattern: PuncturePattern, channel: AwgnChannel,
               config: SimConfig, grid_index: int) -> PointResult:
    t0 = time.perf_counter()
    payload_bits = spec.payload_bits
    batch = max(1, config.worker_count) * 64
    trials = 0
    errors = 0
    while trials < config.max_trials and errors < config.max_block_errors:
        b = min(batch, config.max_trials - trials)
        payload = np.zeros((b, payload_bits), dtype=np.uint8)
        noise = np.zeros((b, pattern.m_bits))
        for r in range(b):
            rng = np.random.default_rng((config.master_seed, grid_index, trials + r))
            payload[r] = rng.integers(0, 2, payload_bits)
            noise[r] = rng.normal(0.0, 1.0, pattern.m_bits)
        if spec.crc_width:
            stream = np.concatenate(
                [payload, crc_remainder_batch(payload, spec.crc_width, spec.crc_poly)], axis=1)
        else:
            stream = payload
        code = encode_codeword_batch(stream, spec)
        tx = apply_puncture(code, pattern)
        y = (1.0 - 2.0 * tx) + noise * math.sqrt(channel.sigma2)
        post = pad_posteriors(y, pattern, channel, spec.field)
        bits, crc_ok, _, _ = ca_scl_decode_batch(post, spec)
        bad = (~crc_ok) | (bits[:, :payload_bits] != payload).any(axis=1)
        cum = errors + np.cumsum(bad)
        hit = np.nonzero(cum >= config.max_block_errors)[0]
        if hit.size:
            take = int(hit[0]) + 1
            trials += take
            errors = int(cum[take - 1])
            break
        trials += b
        errors = int(cum[-1]) if b else errors
    bler = errors / trials if trials else math.nan
    return PointResult(channel.eb_n0_db, trials, errors, bler, time.perf_counter() - t0)


def run_bler(config: SimConfig) -> SimResult:
    """Simulate the configured pipeline over the Eb/N0 grid."""
    spec, pattern, _ = build_code(config)
    rate = config.k_info_bits / pattern.m_bits
    points = []
    for gi, ebn0 in enumerate(config.eb_n0_grid):
        channel = AwgnChannel(ebn0, rate)
        points.append(_run_point(spec, pattern, channel, config, gi))
    return SimResult(config=json.loads(config.to_json()), points=points,
                     code_rate=rate, seed=config.master_seed)


def required_eb_n0(result: SimResult, target_bler: float) -> float:
    """Eb/N0 achieving the target BLER, by linear interpolation on log10(BLER)."""
    pts = [(p.eb_n0_db, p.bler) for p in result.points if p.bler > 0]
    for (x1, b1), (x2, b2) in zip(pts, pts[1:]):
        if b1 >= target_bler >= b2:
            if b1 == b2:
                return x1
            lt, l1, l2 = math.log10(target_bler), math.log10(b1), math.log10(b2)
            return x1 + (x2 - x1) * (l1 - lt) / (l1 - l2)
    raise ValueError(f"target BLER {target_bler} not bracketed by the simulated grid")


def compare_constructions(config: SimConfig, methods: list[str],
                          target_bler: float | None = None) -> dict:
    """Paired-seed BLER per method, plus interpolated required Eb/N0 at a target."""
    if len(methods) < 2:
        raise ValueError("need at least two methods to compare")
    report: dict = {"eb_n0_grid": list(config.eb_n0_grid), "methods": []}
    for method in methods:
        cfg = SimConfig(**{**json.loads(config.to_json()), "construction": method})
        res = run_bler(cfg)
        entry = {"method": method,
                 "bler": [p.bler for p in res.points],
                 "trials": [p.trials for p in res.points],
                 "block_errors": [p.block_errors for p in res.points]}
        if target_bler is not None:
            try:
                entry["required_eb_n0_db"] = required_eb_n0(res, target_bler)
            except ValueError:
                entry["required_eb_n0_db"] = math.inf
        report["methods"].append(entry)
    return report


def emit(result: SimResult, fmt: str, path: str) -> None:
    """Write a result as CSV (one row per grid point) or JSON (full mirror)."""
    try:
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["eb_n0_db", "trials", "block_errors", "bler"])
                for p in result.points:
                    w.writerow([p.eb_n0_db, p.trials, p.block_errors, p.bler])
        elif fmt == "json":
            with open(path, "w") as fh:
                fh.write(result.to_json())
        else:
            raise ValueError(f"unknown format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write {fmt} result to {path}: {exc}") from exc
