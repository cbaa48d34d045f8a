"""Polar codes with Reed-Solomon kernels over GF(2^t).

Construction (PDPW and Monte-Carlo), partial orders on sub-channel indices,
CA-SCL encoding/decoding, MPWP/SIP rate matching, and a BLER simulation
harness over BPSK/AWGN.
"""

from .channel import AwgnChannel, estimate_I, estimate_Z, estimate_Z_pairs, pe_bound
from .codec import CodeSpec, ca_scl_decode, crc_attach, crc_check, encode_codeword, \
    kernel_marginal, sc_decode
from .construct import (GenieStats, PdpwConfig, ReliabilitySequence, ZetaTable,
                        beta_threshold, build_sequence, default_gf4_config,
                        design_channel, estimate_zeta, fit_beta, mc_construct,
                        pdpw_weight, select_info_set)
from .errors import ConfigurationError, EstimationError
from .galois import FieldSpec, bits_to_symbol, build_field, gf_add, gf_inv, gf_mul, \
    symbol_to_bits
from .harness import SimConfig, SimResult, compare_constructions, emit, run_bler
from .kernel import RSKernel, build_rs_kernel, encode, kernel_exponent, partial_distance
from .porder import addition_op, left_swap_op, po_dominates, po_pairs, quasi_nested_embed
from .ratematch import PuncturePattern, apply_puncture, mpwp_pattern, pad_posteriors, \
    sip_pattern

__version__ = "0.1.0"
