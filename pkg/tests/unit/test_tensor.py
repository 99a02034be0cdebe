#!/usr/bin/env python3
"""
Test suite for operator space tensor norms.
"""

import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from superops.config import (
    BudgetExceededError,
    DimensionMismatchError,
    GradingMetadataError,
    OptimizerConfig,
    SuperopsError,
    UnknownKindError,
)
from superops.core import GradedDim, cone_counterexample, random_graded
from superops.tensor import (
    NormBracket,
    TensorElement,
    _haagerup_sdp,
    dual_haagerup_upper,
    dual_symmetrized_haagerup,
    finite_dim_cstar_tensor,
    haagerup_norm,
    injective_norm,
    kron_matrix,
    minimal_decomposition,
    projective_norm,
    star_tensor,
    symmetrized_haagerup,
)
from superops.utils import op_norm, trace_norm

QUICK = OptimizerConfig(restarts=4, iterations=200, dual_samples=8)


def units_tensor(n, reverse=False):
    """sum_i e_i1 (x) e_1i, or sum_i e_1i (x) e_i1 when reversed."""
    def e(i, j):
        u = np.zeros((n, n))
        u[i, j] = 1.0
        return u
    pairs = [(e(0, i), e(i, 0)) if reverse else (e(i, 0), e(0, i)) for i in range(n)]
    return TensorElement(n, n, pairs, 1, GradedDim(n, 0), GradedDim(n, 0))


def random_tensor(seed, a=2, b=2, rank=2, **kwargs):
    rng = np.random.default_rng(seed)
    factors = [(rng.standard_normal((a, a)) + 1j * rng.standard_normal((a, a)),
                rng.standard_normal((b, b)) + 1j * rng.standard_normal((b, b))) for _ in range(rank)]
    return TensorElement(a, b, factors, **kwargs)


class TestTensorElement:
    """Test construction and the spatial matrix"""

    def test_shape_validation(self):
        with pytest.raises(DimensionMismatchError):
            TensorElement(2, 2, [(np.eye(2), np.eye(3))])
        with pytest.raises(DimensionMismatchError):
            TensorElement(2, 2, [(np.eye(2), np.eye(2))], level=2)

    def test_empty_and_grading_mismatch(self):
        with pytest.raises(SuperopsError):
            TensorElement(2, 2, [])
        with pytest.raises(DimensionMismatchError):
            TensorElement(2, 2, [(np.eye(2), np.eye(2))], a_grading=GradedDim(2, 1))

    def test_kron_of_elementary(self):
        rng = np.random.default_rng(0)
        a, b = rng.standard_normal((2, 2)), rng.standard_normal((3, 3))
        t = TensorElement.elementary(a, b)
        assert_allclose(kron_matrix(t), np.kron(a, b))
        assert injective_norm(t) == pytest.approx(op_norm(a) * op_norm(b))

    def test_level_two_blocks(self):
        a1, a2 = np.eye(2), 2 * np.eye(2)
        b1, b2 = np.eye(1), 3 * np.eye(1)
        t = TensorElement(2, 1, [(np.vstack([a1, a2]), np.hstack([b1, b2]))], level=2)
        m = kron_matrix(t)
        assert m.shape == (4, 4)
        assert_allclose(m[2:, :2], np.kron(a2, b1))
        assert_allclose(m[:2, 2:], np.kron(a1, b2))

    def test_minimal_decomposition(self):
        rng = np.random.default_rng(1)
        a, b = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
        t = TensorElement(2, 2, [(a, b), (a, b), (2 * a, b)])
        minimal = minimal_decomposition(t)
        assert minimal.rank == 1
        assert_allclose(kron_matrix(minimal), kron_matrix(t), atol=1e-12)

    def test_minimal_decomposition_of_zero(self):
        t = TensorElement(2, 2, [(np.eye(2), np.eye(2)), (-np.eye(2), np.eye(2))])
        minimal = minimal_decomposition(t, padding=2)
        assert minimal.rank == 3
        assert not np.any(kron_matrix(minimal))


class TestNormBracket:
    """Test the bracket helper"""

    def test_gap_and_contains(self):
        bracket = NormBracket(1.0, 1.5, "test")
        assert bracket.gap == pytest.approx(0.5)
        assert bracket.contains(1.2)
        assert not bracket.contains(1.6)
        assert bracket.contains(1.6, tol=0.2)


class TestHaagerup:
    """Test the Haagerup norm bracket"""

    def test_elementary_is_exact(self):
        rng = np.random.default_rng(2)
        a, b = rng.standard_normal((2, 2)), rng.standard_normal((3, 3))
        bracket = haagerup_norm(TensorElement.elementary(a, b), QUICK)
        expected = op_norm(a) * op_norm(b)
        assert bracket.lower == pytest.approx(expected, rel=1e-9)
        assert bracket.upper == pytest.approx(expected, rel=1e-6)

    @pytest.mark.parametrize("n", [2, 3])
    def test_row_column_units(self, n):
        assert haagerup_norm(units_tensor(n), QUICK).upper == pytest.approx(1.0, abs=1e-6)
        reverse = haagerup_norm(units_tensor(n, reverse=True), QUICK)
        assert reverse.upper == pytest.approx(n, abs=1e-6)
        assert reverse.lower == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("seed", range(3))
    def test_witness_reproduces_the_element(self, seed):
        t = random_tensor(seed)
        bracket = haagerup_norm(t, QUICK)
        assert bracket.lower <= bracket.upper + 1e-9
        witness = bracket.upper_witness
        assert_allclose(kron_matrix(witness), kron_matrix(t), atol=1e-8)
        v = np.hstack([a_k for a_k, _ in witness.factors])
        w = np.vstack([b_k for _, b_k in witness.factors])
        assert op_norm(v) * op_norm(w) == pytest.approx(bracket.upper, rel=1e-9)

    def test_sdp_start_is_clean(self):
        pytest.importorskip("cvxpy")
        rng = np.random.default_rng(9)
        a, b = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
        t = minimal_decomposition(TensorElement.elementary(a, b))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            solved = _haagerup_sdp(t)
        messages = [str(w.message).lower() for w in caught]
        assert not [msg for msg in messages if "bmat" in msg or "symmetric" in msg]
        assert solved is not None
        value, p = solved
        assert value == pytest.approx(op_norm(a) * op_norm(b), rel=1e-4)
        assert p.shape == (1, 1)

    def test_zero(self):
        t = TensorElement(2, 2, [(np.zeros((2, 2)), np.eye(2))])
        bracket = haagerup_norm(t, QUICK)
        assert bracket.method == "zero"
        assert bracket.upper == 0.0

    def test_level_two(self):
        t = random_tensor(4, rank=2, level=1)
        lifted = TensorElement(2, 2, [(np.vstack([a, 0 * a]), np.hstack([b, 0 * b])) for a, b in t.factors],
                               level=2)
        bracket = haagerup_norm(lifted, QUICK)
        assert bracket.lower == pytest.approx(injective_norm(t))
        assert bracket.upper == pytest.approx(haagerup_norm(t, QUICK).upper, rel=1e-3)


class TestStarInvolutions:
    """Test the three tensor involutions"""

    def test_product_on_elementary(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = rng.standard_normal((2, 2))
        t = TensorElement.elementary(a, b, GradedDim(2, 0), GradedDim(2, 0))
        assert_allclose(kron_matrix(star_tensor(t)), np.kron(a, b).conj().T)

    def test_adjoint_space_swaps_factors(self):
        rng = np.random.default_rng(4)
        a, b = rng.standard_normal((2, 2)), rng.standard_normal((3, 3))
        s = star_tensor(TensorElement.elementary(a, b), "adjoint_space")
        assert (s.a_dim, s.b_dim) == (3, 2)
        assert_allclose(kron_matrix(s), np.kron(b.T, a.T))

    @pytest.mark.parametrize("mode", ["product", "haagerup_flip", "adjoint_space"])
    @pytest.mark.parametrize("level", [1, 2])
    def test_involutive(self, mode, level):
        rng = np.random.default_rng(level)
        factors = [(rng.standard_normal((2 * level, 2)), rng.standard_normal((2, 2 * level)))
                   for _ in range(2)]
        t = TensorElement(2, 2, factors, level, GradedDim(1, 1), GradedDim.swap(1))
        assert_allclose(kron_matrix(star_tensor(star_tensor(t, mode), mode)), kron_matrix(t), atol=1e-12)

    def test_needs_gradings(self):
        t = TensorElement.elementary(np.eye(2), np.eye(2))
        with pytest.raises(GradingMetadataError):
            star_tensor(t, "product")
        with pytest.raises(UnknownKindError):
            star_tensor(t, "transpose")

    @pytest.mark.parametrize("n", [2, 3])
    def test_symmetrized_units(self, n):
        bracket = symmetrized_haagerup(units_tensor(n), QUICK)
        assert bracket.upper == pytest.approx(n, abs=1e-5)
        assert bracket.details["upper"] == pytest.approx(1.0, abs=1e-6)
        assert bracket.details["upper_star"] >= bracket.details["upper"]


class TestProjectiveAndDual:
    """Test the level-one brackets"""

    def test_projective_elementary(self):
        one = TensorElement.elementary(np.eye(2), np.eye(2))
        bracket = projective_norm(one, QUICK)
        assert bracket.lower == pytest.approx(1.0)
        assert bracket.upper == pytest.approx(1.0, abs=1e-9)

    def test_projective_witness(self):
        t = random_tensor(5, rank=3)
        bracket = projective_norm(t, QUICK)
        assert bracket.lower <= bracket.upper + 1e-9
        assert_allclose(kron_matrix(bracket.upper_witness), kron_matrix(t), atol=1e-8)
        factors = bracket.upper_witness.factors
        if bracket.method == "gauge-nuclear-sum":
            total = sum(op_norm(a) * op_norm(b) for a, b in factors)
        else:
            s = np.array([bracket.details[f"weight_{j}"] for j in range(len(factors))])
            stack = np.vstack if bracket.method == "grouped-columns" else np.hstack
            total = (np.linalg.norm(s) * op_norm(stack([a / s_j for s_j, (a, _) in zip(s, factors)]))
                     * op_norm(stack([b for _, b in factors])))
        assert total == pytest.approx(bracket.upper, rel=1e-9)
        assert bracket.upper <= bracket.details["nuclear_upper"] + 1e-12

    @pytest.mark.parametrize("n", [2, 3])
    def test_projective_row_of_units_uses_grouping(self, n):
        # sum_i e_1i (x) e_1i: nuclear sums give n, stacking the units gives sqrt(n)
        def e(i):
            u = np.zeros((n, n))
            u[0, i] = 1.0
            return u
        t = TensorElement(n, n, [(e(i), e(i)) for i in range(n)])
        bracket = projective_norm(t, QUICK)
        assert bracket.lower == pytest.approx(np.sqrt(n))
        assert bracket.upper == pytest.approx(np.sqrt(n), abs=1e-5)
        assert bracket.details["nuclear_upper"] == pytest.approx(n, abs=1e-6)
        assert bracket.method in ("grouped-columns", "grouped-rows")
        assert_allclose(kron_matrix(bracket.upper_witness), kron_matrix(t), atol=1e-8)

    def test_level_one_only(self):
        t = TensorElement(1, 1, [(np.ones((2, 1)), np.ones((1, 2)))], level=2)
        with pytest.raises(BudgetExceededError):
            projective_norm(t, QUICK)
        with pytest.raises(BudgetExceededError):
            dual_symmetrized_haagerup(t, QUICK)

    def test_dual_bracket(self):
        t = random_tensor(6, rank=2)
        bracket = dual_symmetrized_haagerup(t, QUICK)
        inj = injective_norm(t)
        assert bracket.method == "heuristic-dual-lower"
        assert bracket.lower >= inj - 1e-12
        assert bracket.details["dual_lower"] <= bracket.upper + 1e-9
        assert bracket.lower <= bracket.upper + 1e-9
        assert bracket.upper <= min(bracket.details["haagerup_upper"], bracket.details["projective_upper"])

    def test_dual_functional_beats_spatial(self):
        # sum_{i>1} e_1i (x) e_i1 + e_i1 (x) e_1i is a partial permutation, spatial norm 1,
        # while pairing with its own adjoint gives 4 against a dual norm of at most 3
        def e(i, j):
            u = np.zeros((3, 3))
            u[i, j] = 1.0
            return u
        pairs = [(e(0, i), e(i, 0)) for i in (1, 2)] + [(e(i, 0), e(0, i)) for i in (1, 2)]
        t = TensorElement(3, 3, pairs)
        assert injective_norm(t) == pytest.approx(1.0)
        bracket = dual_symmetrized_haagerup(t, QUICK)
        assert bracket.lower_witness == "dual-functional"
        assert bracket.lower >= 4.0 / 3.0 - 1e-9
        assert bracket.lower <= bracket.upper + 1e-9

    def test_dual_haagerup_upper_of_elementary(self):
        rng = np.random.default_rng(8)
        f, g = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
        phi = TensorElement.elementary(f, g)
        expected = trace_norm(f) * trace_norm(g)
        assert dual_haagerup_upper(phi) == pytest.approx(expected, rel=1e-9)

    def test_dual_budget(self):
        t = TensorElement.elementary(np.eye(5), np.eye(5))
        with pytest.raises(BudgetExceededError):
            dual_symmetrized_haagerup(t, QUICK)


class TestCStarTensor:
    """Test positivity in the graded C*-tensor product"""

    def test_unit(self):
        one = TensorElement(2, 1, [(np.eye(2), np.eye(1))], 1, GradedDim(1, 1), GradedDim(1, 0))
        assert finite_dim_cstar_tensor(one, "eps_positive")
        assert finite_dim_cstar_tensor(one, "superpositive")

    def test_cone_counterexample(self):
        x = cone_counterexample()
        t = TensorElement(2, 1, [(x.data, np.eye(1))], 1, GradedDim(1, 1), GradedDim(1, 0))
        assert finite_dim_cstar_tensor(t, "eps_positive")
        assert not finite_dim_cstar_tensor(t, "superpositive")

    def test_product_of_positives(self):
        pa = random_graded("eps_positive", GradedDim(2, 0), 1).data
        pb = random_graded("eps_positive", GradedDim(1, 1), 2).data
        t = TensorElement(2, 2, [(pa, pb)], 1, GradedDim(2, 0), GradedDim(1, 1))
        assert finite_dim_cstar_tensor(t)

    def test_errors(self):
        with pytest.raises(GradingMetadataError):
            finite_dim_cstar_tensor(TensorElement.elementary(np.eye(2), np.eye(2)))
        one = TensorElement(1, 1, [(np.eye(1), np.eye(1))], 1, GradedDim(1, 0), GradedDim(1, 0))
        with pytest.raises(UnknownKindError):
            finite_dim_cstar_tensor(one, "positive")
