import numpy as np
import pytest

from rspolar.channel import AwgnChannel, block_posteriors, transmit
from rspolar.codec import CodeSpec, ca_scl_decode, crc_attach, encode_codeword
from rspolar.construct import build_sequence, default_gf4_config, select_info_set
from rspolar.galois import build_field
from rspolar.kernel import build_rs_kernel
from rspolar.ratematch import (PuncturePattern, apply_puncture, mpwp_pattern,
                               pad_posteriors, sip_pattern)


@pytest.fixture(scope="module")
def gf4():
    return build_field(2)


@pytest.fixture(scope="module")
def seq16():
    return build_sequence("pdpw", 16, config=default_gf4_config())


@pytest.fixture(scope="module")
def info8(seq16):
    return select_info_set(seq16, 8)


def test_empty_pattern(seq16, info8):
    p = mpwp_pattern(seq16, info8, 32, 32, 2)
    assert p.punctured_bits == () and p.full_symbols == () and p.partial_symbol is None
    bits = np.arange(32)
    assert np.array_equal(apply_puncture(bits, p), bits)


def test_partial_symbol_arithmetic(seq16, info8):
    # N_b=32, M_b=27: l=3, sigma=1 -> two full symbols and one single bit
    p = mpwp_pattern(seq16, info8, 32, 27, 2)
    assert len(p.full_symbols) == 2
    assert p.partial_symbol is not None and p.partial_symbol[1] == 1
    assert len(p.punctured_bits) == 5


def test_whole_symbol_arithmetic(seq16, info8):
    # N_b=32, M_b=26: l=3, sigma=0 -> three whole symbols
    p = mpwp_pattern(seq16, info8, 32, 26, 2)
    assert len(p.full_symbols) == 3 and p.partial_symbol is None
    assert len(p.punctured_bits) == 6


def test_mpwp_picks_smallest_weights(seq16, info8):
    p = mpwp_pattern(seq16, info8, 32, 26, 2)
    frozen = np.setdiff1d(np.arange(16), info8)
    w = np.asarray(seq16.weights)
    chosen = set(p.frozen_additions)
    for s in chosen:
        assert s not in set(info8.tolist())
    unpunctured = [f for f in frozen if f not in chosen]
    assert max(w[sorted(chosen)]) <= min(w[unpunctured])
    # ascending weight order
    assert (np.diff(w[list(p.frozen_additions)]) >= 0).all()


def test_sip_picks_smallest_indices(info8):
    p = sip_pattern(info8, 32, 26, 2)
    frozen = np.sort(np.setdiff1d(np.arange(16), info8))
    assert p.frozen_additions == tuple(frozen[:3].tolist())


def test_mpwp_differs_from_sip_when_weight_order_differs(seq16, info8):
    pm = mpwp_pattern(seq16, info8, 32, 26, 2)
    ps = sip_pattern(info8, 32, 26, 2)
    w = np.asarray(seq16.weights)
    frozen = np.sort(np.setdiff1d(np.arange(16), info8))
    index_order = frozen[:3]
    weight_order = pm.frozen_additions
    if not np.array_equal(np.sort(index_order), np.sort(weight_order)):
        assert pm.punctured_bits != ps.punctured_bits


def test_bit_conservation_exhaustive_small_blocks():
    cfg = default_gf4_config()
    for n in (4, 16, 64):
        n_b = 2 * n
        seq = build_sequence("pdpw", n, config=cfg)
        info = select_info_set(seq, n // 2)
        n_frozen_bits = 2 * (n - n // 2)
        for m_b in range(n_b - n_frozen_bits, n_b + 1):
            for maker in (lambda: mpwp_pattern(seq, info, n_b, m_b, 2),
                          lambda: sip_pattern(info, n_b, m_b, 2)):
                p = maker()
                assert len(p.punctured_bits) == n_b - m_b
                assert p.m_bits == m_b
                assert len(set(p.punctured_bits)) == len(p.punctured_bits)
                assert not (set(p.frozen_additions) & set(info.tolist()))


def test_infeasible_patterns_rejected(seq16, info8):
    with pytest.raises(ValueError):
        mpwp_pattern(seq16, info8, 32, 0, 2)
    with pytest.raises(ValueError):
        mpwp_pattern(seq16, info8, 32, 10, 2)     # needs 22 > 16 frozen bits
    with pytest.raises(ValueError):
        sip_pattern(info8, 30, 22, 2)             # N_b mismatch


def test_apply_puncture_orders_and_lengths(seq16, info8):
    p = mpwp_pattern(seq16, info8, 32, 27, 2)
    bits = np.arange(32)
    out = apply_puncture(bits, p)
    assert out.shape == (27,)
    assert (np.diff(out) > 0).all()
    with pytest.raises(ValueError):
        apply_puncture(np.arange(30), p)


def test_fully_punctured_symbol_uniform_posterior(gf4, seq16, info8):
    p = mpwp_pattern(seq16, info8, 32, 26, 2)
    ch = AwgnChannel(4.0, 0.5)
    rng = np.random.default_rng(0)
    y = rng.normal(0, 1, 26)
    post = pad_posteriors(y, p, ch, gf4)
    assert post.shape == (16, 4)
    for s in p.full_symbols:
        assert np.allclose(post[s], 0.25)
    assert np.allclose(post.sum(axis=-1), 1.0)


def test_partial_symbol_posterior_splits(gf4, seq16, info8):
    p = mpwp_pattern(seq16, info8, 32, 27, 2)
    sym, sigma = p.partial_symbol
    assert sigma == 1
    ch = AwgnChannel(30.0, 0.5)       # nearly noiseless surviving bit
    y = np.zeros(27)
    keep = np.ones(32, dtype=bool)
    keep[list(p.punctured_bits)] = False
    surviving = np.nonzero(keep)[0]
    y[:] = 1.0                        # all received bits say 0
    post = pad_posteriors(y, p, ch, gf4)
    # surviving first bit = 0: mass split over the two symbols with bit0 = 0
    half = [s for s in range(4) if gf4.bits_of_sym[s][0] == 0]
    assert abs(post[sym][half].sum() - 1.0) < 1e-6
    assert abs(post[sym][half[0]] - 0.5) < 1e-6


def test_padded_pipeline_equals_unpunctured(gf4):
    # decode with the empty pattern must be bit-identical to the plain path
    cfg = default_gf4_config()
    seq = build_sequence("pdpw", 16, config=cfg)
    info = select_info_set(seq, 8)
    spec = CodeSpec(gf4, build_rs_kernel(gf4), 2, info, crc_width=8, list_size=2)
    empty = PuncturePattern(32, (), None, (), ())
    ch = AwgnChannel(2.0, 0.5)
    rng = np.random.default_rng(1)
    for _ in range(20):
        payload = rng.integers(0, 2, spec.payload_bits)
        cw = encode_codeword(crc_attach(payload), spec)
        y = transmit(apply_puncture(cw, empty), ch, rng)
        via_pad = pad_posteriors(y, empty, ch, gf4)
        direct = block_posteriors(y, ch, gf4)
        assert np.array_equal(via_pad, direct)
        r1 = ca_scl_decode(via_pad, spec)
        r2 = ca_scl_decode(direct, spec)
        assert np.array_equal(r1.symbols, r2.symbols)


def test_puncturing_never_helps_on_paired_seeds():
    # same Eb/N0 bookkeeping (rate-adjusted), same per-trial seeds: the
    # punctured code cannot beat the mother code beyond statistical slack
    from rspolar.harness import SimConfig, run_bler
    base = dict(q=4, m=2, k_info_bits=16, crc_width=8, list_size=2,
                eb_n0_grid=(3.0,), max_trials=1200, max_block_errors=1200,
                master_seed=21)
    full = run_bler(SimConfig(**base)).points[0]
    punct = run_bler(SimConfig(**base, ratematch="mpwp", m_bits=26)).points[0]
    slack = 2 * (full.bler * (1 - full.bler) / full.trials) ** 0.5
    assert punct.bler >= full.bler - slack


def test_pad_posteriors_length_check(gf4, seq16, info8):
    p = mpwp_pattern(seq16, info8, 32, 27, 2)
    with pytest.raises(ValueError):
        pad_posteriors(np.zeros(26), p, AwgnChannel(2.0, 0.5), gf4)


def test_pattern_dict_schema(seq16, info8):
    p = mpwp_pattern(seq16, info8, 32, 27, 2)
    d = p.to_dict()
    assert set(d) == {"full_symbols", "partial", "bits"}
    assert d["partial"] == {"index": p.partial_symbol[0], "sigma": 1}
    assert d["bits"] == list(p.punctured_bits)
