import numpy as np
import pytest

from mcrkit.errors import InvalidParams, InvalidSCP
from mcrkit.fixed import solve_fixed_baseline
from mcrkit.generate import random_scp
from mcrkit.reduction import reduce_scp_to_mcr, scp_brute_force


def count(A, B):
    P, r, S = reduce_scp_to_mcr(A, B)
    return solve_fixed_baseline(P, r, S).best_count


def test_examples():
    assert count([0.25], [[0.2, 0.3]]) == 1
    assert count([0, 1], [[-0.1, 0.1], [0.9, 1.1]]) == 2
    assert count([0, 1], [[0.4, 0.6]]) == 1


def test_overlapping_intervals_rejected():
    with pytest.raises(InvalidSCP):
        reduce_scp_to_mcr([0], [[0, 2], [1, 3]])
    with pytest.raises(InvalidSCP):
        reduce_scp_to_mcr([], [[0, 1]])


def test_gadget_is_simple_and_centred():
    P, r, S = reduce_scp_to_mcr([0, 3, 5], [[0, 1], [3, 4], [6, 6]])
    P.validate()
    assert tuple(r) == (0.0, 0.0) and len(S) == 3


def test_single_value_cannot_be_planted_no():
    with pytest.raises(InvalidParams):
        random_scp(np.random.default_rng(0), 1, 3, False)


def test_brute_force_shift():
    assert scp_brute_force([0, 2], [[5, 5], [7, 8]])
    assert not scp_brute_force([0, 3], [[5, 5], [7, 7]])


@pytest.mark.parametrize("seed", range(40))
def test_soundness_random(seed):
    rng = np.random.default_rng(seed)
    yes = bool(seed % 2)
    A, B = random_scp(rng, int(rng.integers(1 if yes else 2, 6)), int(rng.integers(1, 6)), yes)
    assert (count(A, B) == len(A)) == scp_brute_force(A, B)
