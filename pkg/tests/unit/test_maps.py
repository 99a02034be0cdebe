#!/usr/bin/env python3
"""
Test suite for linear maps between matrix spaces.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from superops.config import DimensionMismatchError, SuperopsError
from superops.core import AmplifiedOperator, GradedDim, GradedOperator, is_hermitian, random_graded
from superops.maps import (
    LinearMapSpec,
    corner_projection,
    corner_projection_witnesses,
    diagonal_averaging,
    diagonal_averaging_witnesses,
    even_unitary_conjugation,
    grading_automorphism,
    identity_map,
    lower_triangular_basis,
    matrix_unit,
    matrix_units,
    scaling_map,
)
from superops.utils import op_norm


class TestLinearMapSpec:
    """Test construction and application of basis-defined maps"""

    def test_transpose_on_basis(self):
        dims = GradedDim(2, 0)
        basis = matrix_units(2)
        phi = LinearMapSpec(basis, [b.T for b in basis], dims, dims)
        x = np.array([[1, 2j], [3, 4]])
        assert_allclose(phi.apply(x), x.T)
        assert_allclose(phi(x), x.T)

    def test_mismatched_images(self):
        dims = GradedDim(2, 0)
        with pytest.raises(DimensionMismatchError):
            LinearMapSpec(matrix_units(2), matrix_units(2)[:3], dims, dims)

    def test_dependent_basis(self):
        dims = GradedDim(2, 0)
        e = matrix_unit(2, 0, 0)
        with pytest.raises(SuperopsError):
            LinearMapSpec([e, 2 * e], [e, e], dims, dims)

    def test_element_outside_domain(self):
        dims = GradedDim(2, 0)
        basis = lower_triangular_basis(2)
        phi = LinearMapSpec(basis, basis, dims, dims)
        assert not phi.is_full
        with pytest.raises(DimensionMismatchError):
            phi.apply(matrix_unit(2, 0, 1))

    def test_apply_level_is_blockwise(self):
        dims = GradedDim(1, 1)
        phi = scaling_map(dims, 3.0)
        x = random_graded("generic", dims, 4, level=2)
        y = phi.apply_level(x)
        assert isinstance(y, AmplifiedOperator) and y.level == 2
        assert_allclose(y.data, 3.0 * x.data)

    def test_apply_accepts_graded_operator(self):
        dims = GradedDim(2, 1)
        x = random_graded("generic", dims, 1)
        assert_allclose(identity_map(dims).apply(x), x.data)

    def test_random_hermitian(self):
        phi = identity_map(GradedDim(2, 1))
        x = phi.random_hermitian(np.random.default_rng(0), level=2)
        assert is_hermitian(x)


class TestBuilders:
    """Test the map builders"""

    def test_grading_automorphism(self):
        dims = GradedDim(1, 1)
        x = np.array([[1, 2], [3, 4]])
        assert_allclose(grading_automorphism(dims).apply(x), [[1, -2], [-3, 4]])

    def test_even_unitary_conjugation(self):
        u = random_graded("even_unitary", GradedDim(2, 1), 3)
        phi = even_unitary_conjugation(u)
        x = random_graded("generic", GradedDim(2, 1), 4).data
        assert_allclose(phi.apply(x), u.data @ x @ u.data.conj().T, atol=1e-12)

    def test_conjugation_needs_even_unitary(self):
        flip = GradedOperator(GradedDim(1, 1), [[0, 1], [1, 0]])
        with pytest.raises(SuperopsError):
            even_unitary_conjugation(flip)

    def test_corner_projection(self):
        phi = corner_projection(3)
        x = np.arange(9.0).reshape(3, 3)
        y = phi.apply(x)
        assert y[2, 2] == 0
        assert_allclose(y[:2, :], x[:2, :])
        assert len(phi.test_subspace()) == 6

    def test_diagonal_averaging(self):
        phi = diagonal_averaging(3)
        x = np.diag([1.0, 2.0, 6.0])
        assert_allclose(phi.apply(x), np.diag([1.0, 4.0, 4.0]))

    @pytest.mark.parametrize("builder", [corner_projection, diagonal_averaging])
    def test_projections_are_idempotent(self, builder):
        phi = builder(4)
        x = np.random.default_rng(1).standard_normal((4, 4))
        assert_allclose(phi.apply(phi.apply(x)), phi.apply(x))

    @pytest.mark.parametrize("builder", [corner_projection, diagonal_averaging])
    def test_needs_two_dimensions(self, builder):
        with pytest.raises(SuperopsError):
            builder(1)


class TestWitnesses:
    """Test the certified counterexamples to hermitian contractivity"""

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_corner_projection_reflection(self, m):
        w = corner_projection_witnesses(m)
        x = w.hermitian[1]
        assert op_norm(x.data) == pytest.approx(1.0)
        assert is_hermitian(x)
        image = corner_projection(m).apply_level(x)
        assert op_norm(image.data) == pytest.approx(1.1514, abs=1e-4)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_corner_projection_rsc_instance(self, m):
        (t, eta), = corner_projection_witnesses(m).rsc
        b = corner_projection(m).apply(t)
        beta = np.vdot(eta, b @ eta)
        assert beta.real == pytest.approx(0.5757, abs=1e-4)

    def test_diagonal_averaging_flip(self):
        w = diagonal_averaging_witnesses(2)
        assert w.rsc == []
        x = w.hermitian[2]
        assert op_norm(x.data) == pytest.approx(1.0)
        image = diagonal_averaging(2).apply_level(x)
        assert op_norm(image.data) == pytest.approx(1.5)

    @pytest.mark.parametrize("m", [3, 4])
    def test_diagonal_averaging_reflection(self, m):
        w = diagonal_averaging_witnesses(m)
        image = diagonal_averaging(m).apply_level(w.hermitian[1])
        assert op_norm(image.data) == pytest.approx(1.2808, abs=1e-4)
        (t, eta), = w.rsc
        beta = np.vdot(eta, diagonal_averaging(m).apply(t) @ eta)
        assert beta.real == pytest.approx(0.6404, abs=1e-4)
