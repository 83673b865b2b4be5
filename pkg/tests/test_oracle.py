from fractions import Fraction

import pytest

from dghmap.core import COLLATZ, FIVE_X_PLUS_ONE, residue_set_E, validate_params
from dghmap.oracle import (
    brute_force_counts,
    brute_force_members,
    brute_force_path_probability,
    members_from_table,
    path_table,
)

D3G4 = validate_params(3, 4, {1: -1, 2: 1})


def test_members_examples():
    assert brute_force_members(COLLATZ, (2, 3), 5, 300) == [17, 209]
    assert brute_force_members(COLLATZ, (2, 3), 5, 16) == []
    # nothing with this path and class strictly between 17 and 209
    assert brute_force_members(COLLATZ, (2, 3), 5, 208) == [17]


@pytest.mark.parametrize("params", [COLLATZ, FIVE_X_PLUS_ONE, D3G4])
def test_table_agrees_with_scalar_scan(params):
    bound = 2000
    table = path_table(params, 2, 3, bound)
    for ks in [(1, 1), (1, 2), (2, 1), (3, 3), (2, 2)]:
        for eps in residue_set_E(params):
            assert members_from_table(table, ks, eps, bound) == brute_force_members(params, ks, eps, bound)


def test_table_drops_paths_beyond_k_max():
    table = path_table(COLLATZ, 1, 2, 500)
    assert {ks for ks, _eps in table} == {(1,), (2,)}


def test_path_probability_examples():
    assert brute_force_path_probability(COLLATZ, (2, 3)) == Fraction(1, 32)
    assert brute_force_path_probability(COLLATZ, (1,)) == Fraction(1, 2)
    assert brute_force_path_probability(D3G4, (1, 2)) == Fraction(4, 27)


def test_counts_match_single_path_scans():
    counts = brute_force_counts(D3G4, 2, 2)
    assert len(counts) == 4
    for ks, prob in counts.items():
        assert prob == brute_force_path_probability(D3G4, ks)


def test_overflow_guard():
    with pytest.raises(OverflowError):
        brute_force_path_probability(COLLATZ, (30, 30))
