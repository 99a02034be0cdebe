"""
Linear maps between matrix spaces.

A LinearMapSpec stores a map by its values on a basis of the domain and
extends it linearly. The builders below cover the maps used by the
contractivity checks, including the two codimension-one projections of
M_m and explicit witnesses for their failure of hermitian contractivity.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import DimensionMismatchError, SuperopsError
from .core import AmplifiedOperator, GradedDim, GradedMatrix, GradedOperator, superinvolve
from .utils import as_complex_matrix, dagger, hermitian_part

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8


def _vec(m: np.ndarray) -> np.ndarray:
    return np.asarray(m, dtype=complex).reshape(-1)


@dataclass(eq=False)
class LinearMapSpec:
    """
    A linear map given by its action on an explicit basis.

    Attributes:
        domain_basis: linearly independent matrices spanning the domain
        images: image of each basis element
        domain_dims: graded space the domain matrices act on
        codomain_dims: graded space the images act on
        subspace: optional spanning set of a subspace T of the domain on which
            the really-strongly-contractive condition is tested
        name: label used in reports
    """
    domain_basis: List[np.ndarray]
    images: List[np.ndarray]
    domain_dims: GradedDim
    codomain_dims: GradedDim
    subspace: Optional[List[np.ndarray]] = None
    name: str = "map"
    _coefficients: np.ndarray = field(init=False, repr=False)
    _basis: np.ndarray = field(init=False, repr=False)
    _image_matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.domain_basis:
            raise SuperopsError("domain basis is empty")
        if len(self.domain_basis) != len(self.images):
            raise DimensionMismatchError(
                f"{len(self.domain_basis)} basis elements but {len(self.images)} images"
            )
        d, c = self.domain_dims.total, self.codomain_dims.total
        self.domain_basis = [as_complex_matrix(b, "basis element") for b in self.domain_basis]
        self.images = [as_complex_matrix(m, "image") for m in self.images]
        for b in self.domain_basis:
            if b.shape != (d, d):
                raise DimensionMismatchError(f"basis element has shape {b.shape}, expected ({d}, {d})")
        for m in self.images:
            if m.shape != (c, c):
                raise DimensionMismatchError(f"image has shape {m.shape}, expected ({c}, {c})")
        basis = np.stack([_vec(b) for b in self.domain_basis], axis=1)
        if np.linalg.matrix_rank(basis) < basis.shape[1]:
            raise SuperopsError("domain basis is linearly dependent")
        self._basis = basis
        self._coefficients = np.linalg.pinv(basis)
        self._image_matrix = np.stack([_vec(m) for m in self.images], axis=1)
        if self.subspace is not None:
            self.subspace = [as_complex_matrix(s, "subspace element") for s in self.subspace]
            for s in self.subspace:
                self.coefficients(s)

    @property
    def is_full(self) -> bool:
        return len(self.domain_basis) == self.domain_dims.total ** 2

    def coefficients(self, x: np.ndarray) -> np.ndarray:
        v = _vec(x)
        coef = self._coefficients @ v
        residual = np.linalg.norm(self._basis @ coef - v)
        if residual > RESIDUAL_TOL * (1.0 + np.linalg.norm(v)):
            raise DimensionMismatchError(f"element is not in the domain (residual {residual:.3e})")
        return coef

    def apply(self, x) -> np.ndarray:
        """Image of a single domain matrix."""
        x = x.data if isinstance(x, GradedOperator) else np.asarray(x, dtype=complex)
        c = self.codomain_dims.total
        return (self._image_matrix @ self.coefficients(x)).reshape(c, c)

    def __call__(self, x) -> np.ndarray:
        return self.apply(x)

    def apply_level(self, x: GradedMatrix) -> AmplifiedOperator:
        """Blockwise application phi_n([x_ij]) = [phi(x_ij)]."""
        if x.base_dim.total != self.domain_dims.total:
            raise DimensionMismatchError(f"element lives on {x.base_dim}, map domain is {self.domain_dims}")
        d, n = self.domain_dims.total, x.level
        rows = [[self.apply(x.data[i * d:(i + 1) * d, j * d:(j + 1) * d]) for j in range(n)]
                for i in range(n)]
        return AmplifiedOperator(n, self.codomain_dims, np.block(rows))

    def test_subspace(self) -> List[np.ndarray]:
        return self.subspace if self.subspace is not None else self.domain_basis

    def random_element(self, rng: np.random.Generator, basis: Optional[Sequence[np.ndarray]] = None
                       ) -> np.ndarray:
        basis = self.domain_basis if basis is None else basis
        coef = (rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))) / np.sqrt(2.0)
        return sum(c * b for c, b in zip(coef, basis))

    def random_hermitian(self, rng: np.random.Generator, level: int = 1) -> AmplifiedOperator:
        """Hermitian part of a random level-n element; needs a *-closed domain."""
        rows = [[self.random_element(rng) for _ in range(level)] for _ in range(level)]
        z = AmplifiedOperator(level, self.domain_dims, np.block(rows))
        return z.with_data((z.data + superinvolve(z).data) / 2)


def matrix_unit(m: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((m, m), dtype=complex)
    e[i, j] = 1.0
    return e


def matrix_units(m: int) -> List[np.ndarray]:
    return [matrix_unit(m, i, j) for i in range(m) for j in range(m)]


def lower_triangular_basis(m: int) -> List[np.ndarray]:
    return [matrix_unit(m, i, j) for i in range(m) for j in range(i + 1)]


def _from_function(dims: GradedDim, func, name: str, codomain: Optional[GradedDim] = None,
                   subspace: Optional[List[np.ndarray]] = None) -> LinearMapSpec:
    basis = matrix_units(dims.total)
    return LinearMapSpec(basis, [func(b) for b in basis], dims, codomain or dims, subspace, name)


def identity_map(dims: GradedDim) -> LinearMapSpec:
    return _from_function(dims, lambda x: x, "identity")


def scaling_map(dims: GradedDim, factor: float = 2.0) -> LinearMapSpec:
    return _from_function(dims, lambda x: factor * x, f"scaling({factor:g})")


def grading_automorphism(dims: GradedDim) -> LinearMapSpec:
    eps = dims.epsilon()
    return _from_function(dims, lambda x: eps @ x @ eps, "grading-automorphism")


def even_unitary_conjugation(u: GradedOperator) -> LinearMapSpec:
    """x -> u x u^dagger for an even unitary u."""
    eps = u.epsilon
    if np.max(np.abs(u.data @ eps - eps @ u.data)) > 1e-9:
        raise SuperopsError("conjugating unitary must be even")
    return _from_function(u.dim, lambda x: u.data @ x @ dagger(u.data), "even-unitary-conjugation")


def corner_projection(m: int, dims: Optional[GradedDim] = None) -> LinearMapSpec:
    """
    Projection of M_m killing the lower right matrix unit.

    Its range consists of matrices with zero (m, m) entry; the test subspace
    is the lower triangular matrices.
    """
    if m < 2:
        raise SuperopsError("corner projection needs m >= 2")
    dims = dims or GradedDim(m, 0)

    def project(x):
        y = x.copy()
        y[m - 1, m - 1] = 0.0
        return y

    return _from_function(dims, project, f"corner-projection(m={m})",
                          subspace=lower_triangular_basis(m))


def diagonal_averaging(m: int, dims: Optional[GradedDim] = None) -> LinearMapSpec:
    """
    Projection of M_m with kernel e = e_{m-1,m-1} - e_{m,m} onto the matrices
    whose last two diagonal entries agree; both entries are replaced by their mean.
    """
    if m < 2:
        raise SuperopsError("diagonal averaging needs m >= 2")
    dims = dims or GradedDim(m, 0)

    def average(x):
        y = x.copy()
        mean = (x[m - 2, m - 2] + x[m - 1, m - 1]) / 2
        y[m - 2, m - 2] = y[m - 1, m - 1] = mean
        return y

    return _from_function(dims, average, f"diagonal-averaging(m={m})",
                          subspace=lower_triangular_basis(m))


def _embed_tail(m: int, block: np.ndarray) -> np.ndarray:
    out = np.zeros((m, m), dtype=complex)
    k = block.shape[0]
    out[m - k:, m - k:] = block
    return out


def _top_eigenvector(h: np.ndarray) -> np.ndarray:
    return np.linalg.eigh(hermitian_part(h))[1][:, -1]


@dataclass
class MapWitnesses:
    """
    Known certificates against contractivity of a map.

    hermitian: level -> hermitian element of norm one whose image has norm > 1
    rsc: (x, eta) pairs for which no unit xi satisfies the really strongly
        contractive inequalities
    """
    hermitian: Dict[int, AmplifiedOperator] = field(default_factory=dict)
    rsc: List[Tuple[np.ndarray, np.ndarray]] = field(default_factory=list)


def corner_projection_witnesses(m: int) -> MapWitnesses:
    """
    Witnesses for the corner projection on ungraded M_m, m >= 2.

    The reflection [[1/2, s], [s, -1/2]] (s = sqrt(3)/2) in the last two
    coordinates maps to a matrix of norm 1.1514. The lower triangular
    t = [[1/4, 0], [s, -1/4]] has |Re<t xi, xi>| <= 1/2 for every unit xi,
    while Re<phi(t) eta, eta> reaches 0.5757.
    """
    s = np.sqrt(3.0) / 2
    dims = GradedDim(m, 0)
    reflection = _embed_tail(m, np.array([[0.5, s], [s, -0.5]]))
    t = _embed_tail(m, np.array([[0.25, 0.0], [s, -0.25]]))
    eta = _top_eigenvector(corner_projection(m).apply(t))
    return MapWitnesses({1: AmplifiedOperator(1, dims, reflection)}, [(t, eta)])


def diagonal_averaging_witnesses(m: int) -> MapWitnesses:
    """
    Witnesses for the diagonal averaging projection on ungraded M_m.

    For m == 2 the map is hermitian contractive at level one; at level two the
    flip operator on C^2 (x) C^2 maps to a matrix of norm 3/2. For m >= 3 the
    reflection [[0, 0, -1], [0, 1, 0], [-1, 0, 0]] in the last three
    coordinates maps to a matrix of norm 1.2808, and t = [[0, 0, 0],
    [0, 1/2, 0], [-1, 0, 0]] breaks the real-part inequality.
    """
    dims = GradedDim(m, 0)
    if m == 2:
        flip = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                flip[2 * i + j, 2 * j + i] = 1.0
        return MapWitnesses({2: AmplifiedOperator(2, dims, flip)}, [])
    reflection = _embed_tail(m, np.array([[0, 0, -1], [0, 1, 0], [-1, 0, 0]], dtype=float))
    t = _embed_tail(m, np.array([[0, 0, 0], [0, 0.5, 0], [-1, 0, 0]], dtype=float))
    eta = _top_eigenvector(diagonal_averaging(m).apply(t))
    return MapWitnesses({1: AmplifiedOperator(1, dims, reflection)}, [(t, eta)])
