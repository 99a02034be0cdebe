"""
JSON models for inputs and results.

Matrices are row-major nested lists whose entries are [re, im] pairs; a bare
real number is accepted as an entry with zero imaginary part.
"""

import math
from typing import Dict, List, Optional, Type, TypeVar, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from .config import InputError, SuperopsError
from .core import GRADINGS, GradedDim, GradedMatrix, GradedOperator
from .group import CyclicGroupElement
from .maps import LinearMapSpec
from .norms import RadiusResult
from .tensor import NormBracket, TensorElement

Entry = Union[float, List[float]]
MatrixData = List[List[Entry]]

ModelT = TypeVar("ModelT", bound=BaseModel)


def _entry(value) -> complex:
    if isinstance(value, (int, float)):
        re, im = float(value), 0.0
    elif isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = float(value[0]), float(value[1])
    else:
        raise ValueError(f"matrix entries must be numbers or [re, im] pairs, got {value!r}")
    if not (math.isfinite(re) and math.isfinite(im)):
        raise ValueError("matrix entries must be finite")
    return complex(re, im)


def _check_matrix(rows: MatrixData) -> MatrixData:
    if not rows or not all(isinstance(row, list) for row in rows):
        raise ValueError("matrix must be a nonempty list of rows")
    width = len(rows[0])
    if width == 0 or any(len(row) != width for row in rows):
        raise ValueError("matrix rows must be nonempty and of equal length")
    for row in rows:
        for value in row:
            _entry(value)
    return rows


def to_array(rows: MatrixData) -> np.ndarray:
    return np.array([[_entry(v) for v in row] for row in rows], dtype=complex)


def from_array(m: np.ndarray) -> List[List[List[float]]]:
    """Encode a complex matrix as nested [re, im] pairs."""
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def vector_pairs(v: np.ndarray) -> List[List[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).ravel()]


class GradingModel(BaseModel):
    """Dimensions and type of a grading."""
    p: int = Field(..., ge=0, description="Dimension of the even part")
    q: int = Field(..., ge=0, description="Dimension of the odd part")
    grading: str = Field("diag", description="diag: diag(I_p, -I_q); swap: exchange of two copies of C^p")

    @field_validator('grading')
    @classmethod
    def validate_grading(cls, v):
        if v not in GRADINGS:
            raise ValueError(f"grading must be one of {', '.join(GRADINGS)}")
        return v

    def to_dim(self) -> GradedDim:
        return GradedDim(self.p, self.q, self.grading)

    @classmethod
    def from_dim(cls, dim: GradedDim) -> "GradingModel":
        return cls(p=dim.p, q=dim.q, grading=dim.grading)


class GradedOperatorModel(GradingModel):
    """A graded operator with its matrix."""
    data: MatrixData = Field(..., description="Row-major matrix of [re, im] pairs")

    @field_validator('data')
    @classmethod
    def validate_data(cls, v):
        return _check_matrix(v)

    def to_operator(self) -> GradedOperator:
        return GradedOperator(self.to_dim(), to_array(self.data))

    @classmethod
    def from_operator(cls, x: GradedMatrix) -> "GradedOperatorModel":
        dim = x.base_dim
        return cls(p=dim.p, q=dim.q, grading=dim.grading, data=from_array(x.data))


class FactorModel(BaseModel):
    a: MatrixData = Field(..., description="First tensor factor (block column at level n)")
    b: MatrixData = Field(..., description="Second tensor factor (block row at level n)")

    @field_validator('a', 'b')
    @classmethod
    def validate_factor(cls, v):
        return _check_matrix(v)


class TensorElementModel(BaseModel):
    """sum_k a_k (x) b_k."""
    a_dim: int = Field(..., ge=1, description="Size of the first factor algebra")
    b_dim: int = Field(..., ge=1, description="Size of the second factor algebra")
    level: int = Field(1, ge=1, description="Matrix level")
    a_grading: Optional[GradingModel] = Field(None, description="Grading of the first factor space")
    b_grading: Optional[GradingModel] = Field(None, description="Grading of the second factor space")
    factors: List[FactorModel] = Field(..., min_length=1, description="Elementary summands")

    def to_tensor(self) -> TensorElement:
        return TensorElement(
            self.a_dim, self.b_dim,
            [(to_array(f.a), to_array(f.b)) for f in self.factors],
            self.level,
            self.a_grading.to_dim() if self.a_grading else None,
            self.b_grading.to_dim() if self.b_grading else None,
        )

    @classmethod
    def from_tensor(cls, t: TensorElement) -> "TensorElementModel":
        return cls(
            a_dim=t.a_dim, b_dim=t.b_dim, level=t.level,
            a_grading=GradingModel.from_dim(t.a_grading) if t.a_grading else None,
            b_grading=GradingModel.from_dim(t.b_grading) if t.b_grading else None,
            factors=[FactorModel(a=from_array(a), b=from_array(b)) for a, b in t.factors],
        )


class CyclicGroupElementModel(BaseModel):
    """sum_g c_g g in the group algebra of Z/n."""
    n: int = Field(..., ge=1, description="Group order")
    coeffs: List[Entry] = Field(..., description="Coefficients c_0..c_{n-1} as [re, im] pairs")

    @field_validator('coeffs')
    @classmethod
    def validate_coeffs(cls, v):
        for value in v:
            _entry(value)
        return v

    def to_element(self) -> CyclicGroupElement:
        return CyclicGroupElement(self.n, np.array([_entry(c) for c in self.coeffs]))


class LinearMapModel(BaseModel):
    """A linear map given on a basis of its domain."""
    domain_basis: List[MatrixData] = Field(..., min_length=1, description="Basis of the domain")
    images: List[MatrixData] = Field(..., min_length=1, description="Image of each basis element")
    domain_dims: GradingModel = Field(..., description="Graded space of the domain")
    codomain_dims: GradingModel = Field(..., description="Graded space of the codomain")
    subspace: Optional[List[MatrixData]] = Field(None, description="Spanning set of the test subspace")
    name: str = Field("map", description="Label used in reports")

    @field_validator('domain_basis', 'images')
    @classmethod
    def validate_matrices(cls, v):
        return [_check_matrix(m) for m in v]

    def to_map(self) -> LinearMapSpec:
        return LinearMapSpec(
            [to_array(m) for m in self.domain_basis],
            [to_array(m) for m in self.images],
            self.domain_dims.to_dim(),
            self.codomain_dims.to_dim(),
            [to_array(m) for m in self.subspace] if self.subspace is not None else None,
            self.name,
        )


class RadiusResultModel(BaseModel):
    value: float = Field(..., description="Witnessed lower bound")
    upper: float = Field(..., description="Supporting-polygon upper bound")
    certified_error: float = Field(..., description="upper - value")
    maximizer_theta: float = Field(..., description="Supporting angle of the witness")
    maximizer_vector: List[List[float]] = Field(..., description="Witness unit vector")

    @classmethod
    def from_result(cls, r: RadiusResult) -> "RadiusResultModel":
        return cls(value=r.value, upper=r.upper, certified_error=r.certified_error,
                   maximizer_theta=r.maximizer_theta, maximizer_vector=vector_pairs(r.maximizer_vector))


class NormBracketModel(BaseModel):
    lower: float = Field(..., description="Certified lower bound")
    upper: float = Field(..., description="Upper bound attained by the witness decomposition")
    method: str = Field(..., description="How the bracket was obtained")
    lower_witness: str = Field("", description="Source of the lower bound")
    details: Dict[str, float] = Field(default_factory=dict, description="Auxiliary values")
    witness: Optional[TensorElementModel] = Field(None, description="Decomposition attaining the upper bound")

    @classmethod
    def from_bracket(cls, b: NormBracket, with_witness: bool = True) -> "NormBracketModel":
        witness = None
        if with_witness and b.upper_witness is not None:
            witness = TensorElementModel.from_tensor(b.upper_witness)
        return cls(lower=b.lower, upper=b.upper, method=b.method, lower_witness=b.lower_witness,
                   details=dict(sorted(b.details.items())), witness=witness)


INPUT_MODELS: Dict[str, Type[BaseModel]] = {
    "graded_operator": GradedOperatorModel,
    "tensor_element": TensorElementModel,
    "cyclic_group_element": CyclicGroupElementModel,
    "linear_map": LinearMapModel,
}


def schemas() -> Dict[str, dict]:
    """JSON schemas of every input model."""
    return {name: model.model_json_schema() for name, model in INPUT_MODELS.items()}


def parse_model(model: Type[ModelT], text: str) -> ModelT:
    """Validate JSON text against a model; all failures become InputError."""
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        raise InputError(f"invalid {model.__name__}: {e.errors()[0]['msg']}") from e


def parse_operator(text: str) -> GradedOperator:
    model = parse_model(GradedOperatorModel, text)
    try:
        return model.to_operator()
    except SuperopsError as e:
        raise InputError(str(e)) from e


def parse_tensor(text: str) -> TensorElement:
    model = parse_model(TensorElementModel, text)
    try:
        return model.to_tensor()
    except SuperopsError as e:
        raise InputError(str(e)) from e


def parse_group_element(text: str) -> CyclicGroupElement:
    model = parse_model(CyclicGroupElementModel, text)
    try:
        return model.to_element()
    except SuperopsError as e:
        raise InputError(str(e)) from e


def parse_map(text: str) -> LinearMapSpec:
    model = parse_model(LinearMapModel, text)
    try:
        return model.to_map()
    except SuperopsError as e:
        raise InputError(str(e)) from e
