"""Reed-Solomon kernel construction, partial-distance oracle, and Kronecker-power encoding.

The q x q kernel is built from evaluations of monomials at the nonzero field
points x_j = alpha^(q-2-j) (so the rightmost point is 1), with a final column
that is zero except for a configurable nonzero gamma in the last row.  For
q = 4, gamma = alpha this is exactly

        1      1      1      0
        a      a^2    1      0
        a^2    a      1      0
        1      1      1      a
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ConfigurationError
from .galois import FieldSpec


@dataclass(frozen=True)
class RSKernel:
    field: FieldSpec
    matrix: np.ndarray          # (q, q) uint8, rows g_0 .. g_{q-1}
    gamma: int
    partial_distances: tuple[int, ...]
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    @property
    def q(self) -> int:
        return self.field.q

    def __hash__(self):
        return hash((self.field, self.gamma))


_KERNEL_CACHE: dict[tuple, RSKernel] = {}


def build_rs_kernel(field: FieldSpec, gamma: int | None = None) -> RSKernel:
    """Construct the RS kernel over the given field; gamma defaults to alpha.

    The matrix is checked to be invertible and the per-row partial distances
    are computed by exhaustive enumeration (they must come out as i + 1).
    """
    if gamma is None:
        gamma = field.alpha
    if not 0 < gamma < field.q:
        raise ConfigurationError(f"gamma={gamma} must be a nonzero field element")
    key = (field.t, field.prim_poly, gamma)
    cached = _KERNEL_CACHE.get(key)
    if cached is not None:
        return cached

    q = field.q
    mat = np.zeros((q, q), dtype=np.uint8)
    points = field.exp[(q - 2 - np.arange(q - 1)) % (q - 1)]   # x_j = alpha^(q-2-j)
    logs = field.log[points]
    for r in range(q):
        e = (q - 1 - r) % (q - 1)
        mat[r, : q - 1] = field.exp[(logs * e) % (q - 1)]
    mat[q - 1, q - 1] = gamma

    if _gf_rank(mat, field) != q:
        raise ConfigurationError("RS kernel matrix is singular")

    pd = tuple(_partial_distance(mat, field, i) for i in range(q))
    kern = RSKernel(field, mat, int(gamma), pd)
    _KERNEL_CACHE[key] = kern
    return kern


def _gf_rank(mat: np.ndarray, field: FieldSpec) -> int:
    a = mat.copy()
    n = a.shape[0]
    rank = 0
    for col in range(a.shape[1]):
        piv = next((r for r in range(rank, n) if a[r, col]), None)
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        a[rank] = field.mul_table[field.inv_table[a[rank, col]], a[rank]]
        for r in range(n):
            if r != rank and a[r, col]:
                a[r] ^= field.mul_table[a[r, col], a[rank]]
        rank += 1
    return rank


def _span(rows: np.ndarray, field: FieldSpec) -> np.ndarray:
    """All q^k linear combinations of the given rows, as a (q^k, width) array."""
    out = np.zeros((1, rows.shape[1]), dtype=np.uint8)
    for row in rows[::-1]:
        scaled = field.mul_table[np.arange(field.q)[:, None], row[None, :]]
        out = (out[None, :, :] ^ scaled[:, None, :]).reshape(-1, rows.shape[1])
    return out


def _partial_distance(mat: np.ndarray, field: FieldSpec, i: int) -> int:
    # Min Hamming weight of a*g_i + u over nonzero a and u in span(g_{i+1..q-1}).
    tails = _span(mat[i + 1:], field)
    best = mat.shape[1] + 1
    for a in range(1, field.q):
        vecs = tails ^ field.mul_table[a, mat[i]][None, :]
        best = min(best, int(np.count_nonzero(vecs, axis=1).min()))
    return best


def partial_distance(kernel: RSKernel, i: int) -> int:
    """Brute-force partial distance of kernel row i (exhaustive over all tails)."""
    if not 0 <= i < kernel.q:
        raise ValueError(f"row index {i} out of range [0, {kernel.q})")
    return _partial_distance(kernel.matrix, kernel.field, i)


def kernel_exponent(q: int) -> float:
    """Polarization exponent ln(q!)/(q ln q)."""
    if q < 2:
        raise ValueError("q must be >= 2")
    return float(sum(np.log(np.arange(2, q + 1))) / (q * np.log(q)))


def encode(s: np.ndarray, kernel: RSKernel, m: int) -> np.ndarray:
    """Kronecker-power encoding c = s G^(x)m via the q-ary butterfly.

    Works stage by stage on symbol buffers; never materializes the N x N matrix.
    """
    s = np.asarray(s, dtype=np.uint8)
    if s.shape != (kernel.q ** m,):
        raise ValueError(f"input length {s.shape} != q^m = {kernel.q ** m}")
    return encode_batch(s[None, :], kernel, m)[0]


def encode_batch(s: np.ndarray, kernel: RSKernel, m: int) -> np.ndarray:
    """encode() over a batch: (B, q^m) -> (B, q^m)."""
    q = kernel.q
    mul = kernel.field.mul_table
    g = kernel.matrix
    c = np.asarray(s, dtype=np.uint8)
    B = c.shape[0]
    for r in range(1, m + 1):
        blk = q ** r
        sub = blk // q
        v = c.reshape(B, -1, q, sub)
        out = np.zeros_like(v)
        for col in range(q):
            acc = out[:, :, col, :]
            for a in range(q):
                if g[a, col]:
                    acc ^= mul[g[a, col], v[:, :, a, :]]
        c = out.reshape(B, -1)
    return c
