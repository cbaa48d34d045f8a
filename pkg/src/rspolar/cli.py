"""Command-line interface: construct, encode, decode, ratematch, po-check, simulate."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .channel import AwgnChannel
from .codec import CodeSpec, ca_scl_decode, crc_attach, encode_codeword
from .construct import (PdpwConfig, ReliabilitySequence, ZetaTable, build_sequence,
                        design_channel, mc_construct, select_info_set,
                        DEFAULT_BETA, DEFAULT_ZETA_GF4)
from .errors import ConfigurationError
from .galois import build_field
from .harness import SimConfig, emit, run_bler
from .kernel import build_rs_kernel
from .porder import po_dominates, po_pairs
from .ratematch import mpwp_pattern, sip_pattern


def _bits_from_hex(text: str, nbits: int) -> np.ndarray:
    value = int(text, 16)
    if value >> nbits:
        raise ValueError(f"hex string carries more than {nbits} bits")
    return np.array([(value >> (nbits - 1 - i)) & 1 for i in range(nbits)], dtype=np.uint8)


def _hex_from_bits(bits) -> str:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    width = (len(bits) + 3) // 4
    return f"{value:0{width}x}"


def _load_sequence(path: str) -> ReliabilitySequence:
    with open(path) as fh:
        return ReliabilitySequence.from_json(fh.read())


def _code_from_args(args) -> CodeSpec:
    seq = _load_sequence(args.seq)
    field = build_field({4: 2, 8: 3}[seq.q])
    kernel = build_rs_kernel(field)
    if args.k_bits % field.t:
        raise ConfigurationError(f"--k-bits must be a multiple of t={field.t}")
    info = select_info_set(seq, args.k_bits // field.t)
    return CodeSpec(field, kernel, seq.m, info,
                    crc_width=args.crc_width, list_size=args.list_size)


def _cmd_construct(args) -> int:
    field = build_field({4: 2, 8: 3}[args.q])
    kernel = build_rs_kernel(field)
    n = args.q ** args.m
    if args.method == "pdpw":
        zeta_vals = tuple(float(x) for x in args.zeta.split(",")) if args.zeta else None
        if zeta_vals is None:
            if args.q != 4:
                print("error: pass --zeta for q != 4", file=sys.stderr)
                return 2
            zeta_vals = DEFAULT_ZETA_GF4
        zeta = ZetaTable(zeta_vals, args.design_ebn0, 0)
        seq = build_sequence("pdpw", n, config=PdpwConfig(args.beta, zeta, field, kernel),
                             seed=args.seed)
    else:
        rng = np.random.default_rng(args.seed)
        stats = mc_construct(field, kernel, n, design_channel(args.design_ebn0),
                             args.trials, rng)
        seq = build_sequence("mc", n, stats=stats, seed=args.seed)
    out = seq.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        print(out)
    return 0


def _cmd_encode(args) -> int:
    spec = _code_from_args(args)
    payload = _bits_from_hex(args.info, spec.payload_bits)
    stream = crc_attach(payload, spec.crc_width, spec.crc_poly) if spec.crc_width else payload
    print(_hex_from_bits(encode_codeword(stream, spec)))
    return 0


def _cmd_decode(args) -> int:
    spec = _code_from_args(args)
    from .channel import block_posteriors

    hard = _bits_from_hex(args.received, spec.N_b)
    channel = AwgnChannel(args.ebn0, spec.K_b / spec.N_b)
    post = block_posteriors(1.0 - 2.0 * hard.astype(float), channel, spec.field)
    res = ca_scl_decode(post, spec)
    print(json.dumps({
        "payload_hex": _hex_from_bits(res.info_bits[:spec.payload_bits]),
        "crc_ok": bool(res.crc_ok),
        "metric": res.metric,
    }))
    return 0 if res.crc_ok else 1


def _cmd_ratematch(args) -> int:
    seq = _load_sequence(args.seq)
    field = build_field({4: 2, 8: 3}[seq.q])
    if args.k_bits % field.t:
        raise ConfigurationError(f"--k-bits must be a multiple of t={field.t}")
    info = select_info_set(seq, args.k_bits // field.t)
    if args.scheme == "mpwp":
        pattern = mpwp_pattern(seq, info, args.nb, args.mb, field.t)
    else:
        pattern = sip_pattern(info, args.nb, args.mb, field.t)
    print(json.dumps(pattern.to_dict()))
    return 0


def _cmd_po_check(args) -> int:
    if args.list:
        print("i,j")
        for i, j in sorted(po_pairs(args.q, args.m)):
            print(f"{i},{j}")
        return 0
    if args.i is None or args.j is None:
        print("error: need --i and --j (or --list)", file=sys.stderr)
        return 2
    fwd = po_dominates(args.j, args.i, args.q, args.m)
    bwd = po_dominates(args.i, args.j, args.q, args.m)
    if fwd and bwd:
        rel = "equal"
    elif fwd:
        rel = f"{args.j} dominates {args.i}"
    elif bwd:
        rel = f"{args.i} dominates {args.j}"
    else:
        rel = "incomparable"
    print(rel)
    return 0


def _cmd_simulate(args) -> int:
    with open(args.config) as fh:
        config = SimConfig.from_json(fh.read())
    result = run_bler(config)
    emit(result, "csv", args.out)
    if args.json:
        emit(result, "json", args.json)
    for p in result.points:
        print(f"Eb/N0 {p.eb_n0_db:+.2f} dB: {p.block_errors}/{p.trials} bler={p.bler:.3e}")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="rspolar",
                                 description="RS-kernel polar code workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a reliability sequence")
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--method", choices=["pdpw", "mc"], default="pdpw")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--zeta", help="comma-separated zeta values")
    p.add_argument("--design-ebn0", type=float, default=-1.8)
    p.add_argument("--trials", type=int, default=20000, help="MC construction trials")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_construct)

    for name, fn in (("encode", _cmd_encode), ("decode", _cmd_decode)):
        p = sub.add_parser(name, help=f"{name} one block (hex bit-strings)")
        p.add_argument("--seq", required=True, help="reliability sequence JSON")
        p.add_argument("--k-bits", type=int, required=True, help="K_b incl. CRC")
        p.add_argument("--crc-width", type=int, default=8)
        p.add_argument("--list-size", type=int, default=2)
        if name == "encode":
            p.add_argument("--info", required=True, help="payload bits as hex")
        else:
            p.add_argument("--received", required=True, help="hard-decision bits as hex")
            p.add_argument("--ebn0", type=float, default=4.0,
                           help="assumed Eb/N0 for posterior scaling")
        p.set_defaults(fn=fn)

    p = sub.add_parser("ratematch", help="emit a puncture pattern as JSON")
    p.add_argument("--scheme", choices=["mpwp", "sip"], required=True)
    p.add_argument("--seq", required=True)
    p.add_argument("--k-bits", type=int, required=True)
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--mb", type=int, required=True)
    p.set_defaults(fn=_cmd_ratematch)

    p = sub.add_parser("po-check", help="query the index partial order")
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--i", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--list", action="store_true", help="dump all pairs as CSV")
    p.set_defaults(fn=_cmd_po_check)

    p = sub.add_parser("simulate", help="run a BLER sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--json", help="optional JSON mirror")
    p.set_defaults(fn=_cmd_simulate)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigurationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
