import numpy as np
import pytest

from rspolar.porder import (addition_op, comparable_matrix, digits_of, incomparable_pairs,
                            left_swap_op, po_dominates, po_pairs, quasi_nested_embed,
                            value_of)


def test_digit_roundtrip():
    for i in range(64):
        assert value_of(digits_of(i, 4, 3), 4) == i


def test_addition_operator_published_example():
    # index 25 = (1,2,1) digit-wise; incrementing position 1 gives 29 = (1,3,1)
    assert digits_of(25, 4, 3) == (1, 2, 1)
    assert addition_op(25, 1, 4, 3) == 29
    assert digits_of(29, 4, 3) == (1, 3, 1)


def test_addition_operator_saturates():
    i = value_of((3, 2, 1), 4)
    assert addition_op(i, 0, 4, 3) == i
    assert addition_op(0, 0, 4, 3) == 1


def test_addition_operator_range_check():
    with pytest.raises(ValueError):
        addition_op(0, 3, 4, 3)


def test_left_swap_published_example():
    # index 27 has digits (3,2,1); swapping positions 0 and 2 gives 57 = (1,2,3)
    assert digits_of(27, 4, 3) == (3, 2, 1)
    assert left_swap_op(27, 0, 2, 4, 3) == 57
    assert digits_of(57, 4, 3) == (1, 2, 3)


def test_left_swap_identity_when_sorted():
    i = value_of((1, 2, 3), 4)      # digits ascending toward significance
    assert left_swap_op(i, 0, 2, 4, 3) == i


def test_left_swap_two_digits():
    # 6 = digits (2,1): digit0=2 > digit1=1, swap -> (1,2) = 9
    assert left_swap_op(6, 0, 1, 4, 2) == 9


def test_left_swap_argument_order():
    with pytest.raises(ValueError):
        left_swap_op(6, 1, 1, 4, 2)
    with pytest.raises(ValueError):
        left_swap_op(6, 1, 0, 4, 2)


def test_domination_published_examples():
    assert po_dominates(29, 25, 4, 3)
    assert po_dominates(57, 27, 4, 3)
    assert not po_dominates(25, 29, 4, 3)


def test_domination_reflexive():
    for i in (0, 13, 63):
        assert po_dominates(i, i, 4, 3)


def test_domination_range_check():
    with pytest.raises(ValueError):
        po_dominates(64, 0, 4, 3)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_partial_order_axioms_exhaustive(m):
    r = comparable_matrix(4, m)
    n = r.shape[0]
    assert r.diagonal().all()                                  # reflexive
    assert not (r @ r & ~r).any()                              # transitive
    assert np.array_equal(r & r.T, np.eye(n, dtype=bool))      # antisymmetric


def test_single_kernel_chain():
    assert po_pairs(4, 1) == {(i, j) for i in range(4) for j in range(4) if i < j}


def test_generator_edges_in_closure():
    for m in (2, 3):
        n = 4 ** m
        for i in range(n):
            for k in range(m):
                assert po_dominates(addition_op(i, k, 4, m), i, 4, m)
            for k1 in range(m):
                for k2 in range(k1 + 1, m):
                    assert po_dominates(left_swap_op(i, k1, k2, 4, m), i, 4, m)


def test_known_incomparable_pairs():
    assert not po_dominates(8, 3, 4, 2)
    assert not po_dominates(3, 8, 4, 2)
    for pair in ((3, 8), (7, 12), (10, 13)):
        assert tuple(sorted(pair)) in set(incomparable_pairs(4, 2))


def test_pairs_size_guard():
    with pytest.raises(ValueError):
        po_pairs(4, 9)


def test_quasi_nested_embedding():
    assert quasi_nested_embed(7, 4, 2) == (3, 1, 0)
    assert value_of(quasi_nested_embed(7, 4, 2), 4) == 7
    # relations at length N persist verbatim at length qN
    p2 = po_pairs(4, 2)
    p3 = {(i, j) for (i, j) in po_pairs(4, 3) if i < 16 and j < 16}
    assert p2 == p3
    assert po_dominates(29, 25, 4, 4)      # embedded example pair
