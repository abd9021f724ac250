"""Tests for RXC3 instances, the exhaustive cover search and duplication."""

import pytest

from absent_votes.rxc3 import (
    Rxc3Error,
    Rxc3Instance,
    Rxc3Solution,
    copies_for,
    duplicate,
    lift_solution,
    preprocess_rxc3,
    solve_rxc3_bruteforce,
    validate_rxc3,
    validate_solution,
)
from absent_votes.wav import BudgetExceededError


class TestValidate:
    def test_valid(self, rxc3_yes, rxc3_no):
        assert validate_rxc3(rxc3_yes) is None
        assert validate_rxc3(rxc3_no) is None

    def test_q_not_multiple_of_three(self):
        assert "multiple of 3" in validate_rxc3(Rxc3Instance(4, ((1, 2, 3),) * 4))

    def test_wrong_number_of_sets(self):
        assert "expected 3 sets" in validate_rxc3(Rxc3Instance(3, ((1, 2, 3),) * 2))

    def test_repeated_element_in_set(self):
        inst = Rxc3Instance(3, ((1, 1, 2), (1, 2, 3), (2, 3, 3)))
        assert "distinct" in validate_rxc3(inst)

    def test_element_out_of_range(self):
        assert "outside" in validate_rxc3(Rxc3Instance(3, ((1, 2, 4),) * 3))

    def test_element_frequency(self):
        inst = Rxc3Instance(6, ((1, 2, 3),) * 4 + ((4, 5, 6),) * 2)
        assert "appears in 4 sets" in validate_rxc3(inst)

    def test_sets_are_sorted(self):
        assert Rxc3Instance(3, ((3, 1, 2),) * 3).members(1) == (1, 2, 3)

    def test_containing(self, rxc3_no):
        assert rxc3_no.containing(1) == [1, 2, 3]
        assert rxc3_no.containing(6) == [3, 5, 6]


class TestSolution:
    def test_valid_cover(self, rxc3_yes):
        assert validate_solution(rxc3_yes, Rxc3Solution((4, 1))) is None

    def test_overlap(self, rxc3_yes):
        assert "partition" in validate_solution(rxc3_yes, Rxc3Solution((1, 2)))

    def test_wrong_size(self, rxc3_yes):
        assert "2 sets" in validate_solution(rxc3_yes, Rxc3Solution((1,)))

    def test_index_out_of_range(self, rxc3_yes):
        assert "1..6" in validate_solution(rxc3_yes, Rxc3Solution((1, 7)))


class TestBruteforce:
    def test_first_cover(self, rxc3_yes):
        assert solve_rxc3_bruteforce(rxc3_yes) == Rxc3Solution((1, 4))

    def test_no_cover(self, rxc3_no):
        assert solve_rxc3_bruteforce(rxc3_no) is None

    def test_malformed(self):
        with pytest.raises(Rxc3Error, match="multiple of 3"):
            solve_rxc3_bruteforce(Rxc3Instance(2, ((1, 2, 3),) * 2))

    def test_budget(self, rxc3_yes):
        with pytest.raises(BudgetExceededError) as excinfo:
            solve_rxc3_bruteforce(rxc3_yes, budget=10)
        assert excinfo.value.needed == 15


class TestDuplicate:
    def test_shifts_elements(self, rxc3_yes):
        doubled = duplicate(rxc3_yes, 2)
        assert doubled.q == 12
        assert doubled.members(7) == (7, 8, 9)
        assert validate_rxc3(doubled) is None

    def test_copies_for(self):
        assert copies_for(6, 6) == 1
        assert copies_for(3, 6) == 2
        assert copies_for(9, 12) == 4
        assert copies_for(12, 6) == 1

    def test_preprocess_keeps_divisible_instance(self, rxc3_yes):
        assert preprocess_rxc3(rxc3_yes, 6) is rxc3_yes

    def test_preprocess_duplicates(self, rxc3_yes):
        assert preprocess_rxc3(rxc3_yes, 12).q == 12

    def test_preprocess_rejects_bad_divisor(self, rxc3_yes):
        with pytest.raises(Rxc3Error, match="positive"):
            preprocess_rxc3(rxc3_yes, 0)

    def test_lift_solution(self, rxc3_yes):
        lifted = lift_solution(Rxc3Solution((1, 4)), 6, 2)
        assert lifted == Rxc3Solution((1, 4, 7, 10))
        assert validate_solution(duplicate(rxc3_yes, 2), lifted) is None

    def test_duplicated_no_stays_no(self, rxc3_no):
        assert solve_rxc3_bruteforce(duplicate(rxc3_no, 2)) is None
