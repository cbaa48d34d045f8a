"""Partial orders on q-ary sub-channel indices.

Two digit-wise operators never decrease sub-channel reliability: incrementing
a digit (addition operator) and swapping a larger digit into a more
significant position (left-swap operator).  Domination is reachability under
any finite composition of the two; the closure is materialized per (q, m)
and cached.
"""

from __future__ import annotations

import numpy as np

_CLOSURE_CACHE: dict[tuple[int, int], np.ndarray] = {}

PO_SIZE_GUARD = 1 << 16


def digits_of(i: int, q: int, m: int) -> tuple[int, ...]:
    """q-ary digits (d_0 .. d_{m-1}), d_k the coefficient of q^k."""
    return tuple((i // q ** k) % q for k in range(m))


def value_of(digits, q: int) -> int:
    return sum(int(d) * q ** k for k, d in enumerate(digits))


def addition_op(i: int, k: int, q: int, m: int) -> int:
    """Increment digit k, unless it is already q - 1 (then identity)."""
    if not 0 <= k < m:
        raise ValueError(f"position k={k} out of range [0, {m})")
    d = (i // q ** k) % q
    return i if d == q - 1 else i + q ** k


def left_swap_op(i: int, k1: int, k2: int, q: int, m: int) -> int:
    """Swap digits k1 < k2 when digit k1 is the larger; identity otherwise."""
    if not 0 <= k1 < k2 < m:
        raise ValueError(f"need 0 <= k1 < k2 < m, got ({k1}, {k2}, m={m})")
    d1 = (i // q ** k1) % q
    d2 = (i // q ** k2) % q
    if d1 <= d2:
        return i
    return i + (d2 - d1) * q ** k1 + (d1 - d2) * q ** k2


def _closure(q: int, m: int) -> np.ndarray:
    """Boolean reachability matrix R with R[i, j] true iff j dominates i."""
    key = (q, m)
    cached = _CLOSURE_CACHE.get(key)
    if cached is not None:
        return cached
    n = q ** m
    if n > PO_SIZE_GUARD:
        raise ValueError(f"q^m = {n} exceeds the partial-order size guard {PO_SIZE_GUARD}")

    idx = np.arange(n)
    digits = np.stack([(idx // q ** k) % q for k in range(m)], axis=1)
    reach = np.eye(n, dtype=bool)
    targets = []
    for k in range(m):
        t = np.where(digits[:, k] == q - 1, idx, idx + q ** k)
        targets.append(t)
    for k1 in range(m):
        for k2 in range(k1 + 1, m):
            d1, d2 = digits[:, k1], digits[:, k2]
            swap = idx + (d2 - d1) * q ** k1 + (d1 - d2) * q ** k2
            targets.append(np.where(d1 <= d2, idx, swap))
    for t in targets:
        reach[idx, t] = True

    # BFS closure, level by level: R <- R or R @ R until stable.
    while True:
        nxt = reach @ reach
        if (nxt == reach).all():
            break
        reach = nxt
    _CLOSURE_CACHE[key] = reach
    return reach


def po_dominates(j: int, i: int, q: int, m: int) -> bool:
    """True iff j is reachable from i via addition/left-swap operators (reflexive)."""
    n = q ** m
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"indices must lie in [0, {n})")
    return bool(_closure(q, m)[i, j])


def po_pairs(q: int, m: int) -> set[tuple[int, int]]:
    """All ordered pairs (i, j), j != i, with j dominating i."""
    reach = _closure(q, m)
    ii, jj = np.nonzero(reach & ~np.eye(reach.shape[0], dtype=bool))
    return set(zip(ii.tolist(), jj.tolist()))


def comparable_matrix(q: int, m: int) -> np.ndarray:
    """R[i, j] true iff j dominates i (includes the diagonal)."""
    return _closure(q, m).copy()


def incomparable_pairs(q: int, m: int) -> list[tuple[int, int]]:
    """Unordered pairs (i < j) with no domination either way."""
    reach = _closure(q, m)
    und = ~(reach | reach.T)
    ii, jj = np.nonzero(np.triu(und, k=1))
    return list(zip(ii.tolist(), jj.tolist()))


def quasi_nested_embed(i: int, q: int, m: int) -> tuple[int, ...]:
    """Zero-extend the index to length m + 1 digits (value is unchanged)."""
    if not 0 <= i < q ** m:
        raise ValueError(f"index {i} out of range [0, {q ** m})")
    return digits_of(i, q, m) + (0,)
