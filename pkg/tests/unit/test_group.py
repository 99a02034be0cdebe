#!/usr/bin/env python3
"""
Test suite for diagonal norms of cyclic group algebras.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from superops.config import BudgetExceededError, OptimizerConfig, SuperopsError, UnknownKindError
from superops.group import (
    CyclicGroupElement,
    delta_k_element,
    delta_k_norm,
    dft_norm,
    dual_involution,
    dual_involution_check,
    norm_sequence,
    regular_rep,
)
from superops.tensor import kron_matrix
from superops.utils import op_norm

QUICK = OptimizerConfig(restarts=4, iterations=200)
TILTED = CyclicGroupElement(2, [1.0, 1j])


class TestCyclicGroupElement:
    """Test group algebra elements"""

    def test_validation(self):
        with pytest.raises(SuperopsError):
            CyclicGroupElement(3, [1.0, 2.0])
        with pytest.raises(SuperopsError):
            CyclicGroupElement(0, [])
        with pytest.raises(SuperopsError):
            CyclicGroupElement(1, [np.nan])

    def test_generator(self):
        c = CyclicGroupElement.generator(4, 5)
        assert c.support == [1]
        assert c.l1_norm == 1.0

    def test_coefficients_are_frozen(self):
        c = CyclicGroupElement(2, [1.0, 2.0])
        with pytest.raises(ValueError):
            c.coeffs[0] = 3.0


class TestRepresentation:
    """Test the regular representation and the DFT norm"""

    def test_homomorphism(self):
        reps = regular_rep(3)
        for g in range(3):
            for h in range(3):
                assert_allclose(reps[g] @ reps[h], reps[(g + h) % 3], atol=1e-12)

    def test_dft_norm_is_spatial(self):
        c = CyclicGroupElement(4, [1.0, -2.0, 0.5j, 1.0])
        matrix = sum(c.coeffs[g] * u for g, u in enumerate(regular_rep(4)))
        assert dft_norm(c) == pytest.approx(op_norm(matrix))

    def test_dft_examples(self):
        assert dft_norm(CyclicGroupElement(2, [1.0, 1.0])) == pytest.approx(2.0)
        assert dft_norm(TILTED) == pytest.approx(np.sqrt(2.0))

    def test_two_fold_tensor(self):
        d = delta_k_element(TILTED, 2)
        assert_allclose(kron_matrix(d.as_tensor()), d.matrix())
        with pytest.raises(SuperopsError):
            delta_k_element(TILTED, 3).as_tensor()


class TestDiagonalNorms:
    """Test the k-fold diagonal norm brackets"""

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_generators_have_norm_one(self, n, k):
        bracket = delta_k_norm(CyclicGroupElement.generator(n, n - 1), k, config=QUICK)
        assert bracket.lower == pytest.approx(1.0)
        assert bracket.upper == pytest.approx(1.0)

    def test_first_power_is_dft(self):
        bracket = delta_k_norm(TILTED, 1)
        assert bracket.method == "dft"
        assert bracket.lower == bracket.upper == pytest.approx(np.sqrt(2.0))

    def test_positive_coefficients_are_exact(self):
        c = CyclicGroupElement(3, [1.0, 2.0, 0.5])
        for k in (2, 3):
            bracket = delta_k_norm(c, k, config=QUICK)
            assert bracket.lower == pytest.approx(3.5)
            assert bracket.upper == pytest.approx(3.5)

    @pytest.mark.parametrize("mode", ["haagerup", "projective"])
    def test_sequence_is_bracketed(self, mode):
        brackets = norm_sequence(TILTED, mode=mode, config=QUICK)
        assert len(brackets) == 3
        for bracket in brackets:
            assert bracket.lower == pytest.approx(np.sqrt(2.0))
            assert bracket.lower <= bracket.upper + 1e-9
            assert bracket.upper <= TILTED.l1_norm + 1e-12
        if mode == "haagerup":
            assert brackets[2].method == "haagerup-chain"
        else:
            assert brackets[2].method in ("projective-grouped-search", "projective-l1")

    def test_three_fold_projective_search(self):
        c = CyclicGroupElement(3, [1.0, 0.5j, -0.25])
        bracket = delta_k_norm(c, 3, "projective", QUICK)
        details = bracket.details
        assert details["diagonal_upper"] <= c.l1_norm + 1e-9
        assert details["search_upper"] == min(details[f"{name}_upper"]
                                              for name in ("diagonal", "columns", "rows", "column-diagonal"))
        assert bracket.upper == pytest.approx(min(details["search_upper"], c.l1_norm))
        assert bracket.lower == pytest.approx(dft_norm(c))
        assert bracket.lower <= bracket.upper + 1e-9

    def test_zero_element(self):
        bracket = delta_k_norm(CyclicGroupElement(2, [0.0, 0.0]), 3)
        assert bracket.upper == 0.0

    def test_budgets(self):
        with pytest.raises(BudgetExceededError):
            delta_k_norm(CyclicGroupElement.generator(5, 1), 1)
        with pytest.raises(BudgetExceededError):
            delta_k_norm(TILTED, 4)
        with pytest.raises(SuperopsError):
            delta_k_norm(TILTED, 0)
        with pytest.raises(UnknownKindError):
            delta_k_norm(TILTED, 2, mode="spatial")


class TestDualInvolution:
    """Test the antilinear involution g -> g^-1"""

    def test_generator_maps_to_inverse(self):
        image = dual_involution(CyclicGroupElement.generator(4, 1))
        assert image.support == [3]

    def test_conjugates_coefficients(self):
        c = CyclicGroupElement(3, [1j, 2.0, 3.0 - 1j])
        assert_allclose(dual_involution(c).coeffs, [-1j, 3.0 + 1j, 2.0])

    @pytest.mark.parametrize("k, coeffs", [(1, [1.0, 0.5j, -0.25]), (2, [1.0, 0.5, 0.25])])
    def test_check_passes(self, k, coeffs):
        c = CyclicGroupElement(3, coeffs)
        report = dual_involution_check(c, k, config=QUICK)
        assert report.involutive
        assert report.antilinear
        assert report.passed
