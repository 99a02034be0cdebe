"""
Diagonal subspaces of tensor powers of C*(Z/n).

An element sum_g c_g g lifts to sum_g c_g g (x) ... (x) g in the k-fold
tensor power. Its Haagerup and projective norms increase with k; this module
brackets the first few terms of that sequence in the regular representation.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .config import (
    MAX_DIAGONAL_POWER,
    MAX_GROUP_ORDER,
    BudgetExceededError,
    OptimizerConfig,
    SuperopsError,
    UnknownKindError,
)
from .optimize import (
    ChainLink,
    chain_factors,
    chain_log_norm,
    gauge_objective,
    gauges_from,
    minimize_with_restarts,
    random_starts,
)
from .tensor import NormBracket, TensorElement, haagerup_norm, projective_norm
from .utils import derive_rng, direct_sum, op_norm

logger = logging.getLogger(__name__)

NORM_MODES = ("haagerup", "projective")
ANTILINEARITY_TOL = 1e-12
BRACKET_AGREEMENT_TOL = 1e-5
SEARCH_IMPROVEMENT = 1e-9
THREE_FOLD_STARTS = 2
THREE_FOLD_ITERATIONS = 60
THREE_FOLD_FAMILIES = {
    "diagonal": ((0, 1, 2), "columns"),
    "columns": ((), "columns"),
    "rows": ((), "rows"),
    "column-diagonal": ((1, 2), "columns"),
}


@dataclass(frozen=True, eq=False)
class CyclicGroupElement:
    """sum_g c_g g in the group algebra of Z/n."""
    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise SuperopsError("group order must be at least 1")
        coeffs = np.array(self.coeffs, dtype=complex).reshape(-1)
        if coeffs.shape != (self.n,):
            raise SuperopsError(f"expected {self.n} coefficients, got {coeffs.size}")
        if not np.all(np.isfinite(coeffs)):
            raise SuperopsError("coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def generator(cls, n: int, g: int) -> "CyclicGroupElement":
        c = np.zeros(n, dtype=complex)
        c[g % n] = 1.0
        return cls(n, c)

    @property
    def support(self) -> List[int]:
        return [g for g in range(self.n) if self.coeffs[g] != 0]

    @property
    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))


def regular_rep(n: int) -> List[np.ndarray]:
    """g -> diag(zeta^{g j}) for j = 0..n-1, zeta = exp(2 pi i / n)."""
    if n < 1:
        raise SuperopsError("group order must be at least 1")
    j = np.arange(n)
    return [np.diag(np.exp(2j * np.pi * g * j / n)) for g in range(n)]


@dataclass(eq=False)
class DiagonalTensor:
    """sum_g c_g U_g^{(x) k} in the regular representation."""
    element: CyclicGroupElement
    k: int

    def matrix(self) -> np.ndarray:
        reps = regular_rep(self.element.n)
        out = 0
        for g in range(self.element.n):
            term = reps[g]
            for _ in range(self.k - 1):
                term = np.kron(term, reps[g])
            out = out + self.element.coeffs[g] * term
        return np.asarray(out, dtype=complex)

    def as_tensor(self) -> TensorElement:
        """Two-fold element as a TensorElement over the nonzero coefficients."""
        if self.k != 2:
            raise SuperopsError("only two-fold diagonal elements are TensorElements")
        reps = regular_rep(self.element.n)
        support = self.element.support or [0]
        n = self.element.n
        return TensorElement(n, n, [(self.element.coeffs[g] * reps[g], reps[g]) for g in support])


def delta_k_element(c: CyclicGroupElement, k: int) -> DiagonalTensor:
    if k < 1:
        raise SuperopsError("tensor power must be at least 1")
    return DiagonalTensor(c, k)


def dft_norm(c: CyclicGroupElement) -> float:
    """max over characters chi of |sum_g c_g chi(g)|, the C*(Z/n) norm."""
    return float(np.max(np.abs(c.n * np.fft.ifft(c.coeffs))))


def _check_budget(c: CyclicGroupElement, k: int):
    if k < 1:
        raise SuperopsError("tensor power must be at least 1")
    if k > MAX_DIAGONAL_POWER or c.n > MAX_GROUP_ORDER:
        raise BudgetExceededError(
            f"k = {k}, n = {c.n} exceeds the caps k <= {MAX_DIAGONAL_POWER}, n <= {MAX_GROUP_ORDER}"
        )


def _three_fold_chain(c: CyclicGroupElement, config: OptimizerConfig) -> float:
    """
    Upper bound ||v_1|| ||v_2|| ||v_3|| over gauges of the factorization
    row[c_g U_g] . diag(U_g) . column[U_g].
    """
    reps = regular_rep(c.n)
    support = c.support
    n, r = c.n, len(support)
    links = [
        ChainLink(np.hstack([c.coeffs[g] * reps[g] for g in support]), n, n),
        ChainLink(direct_sum(*(reps[g] for g in support)), n, n),
        ChainLink(np.vstack([reps[g] for g in support]), n, n),
    ]
    sizes = [r, r]
    fun = gauge_objective(chain_log_norm(links), sizes)
    rng = derive_rng(config.seed, "diagonal-chain", n, r)
    starts = [np.zeros(4 * r * r)] + random_starts(rng, sizes, config.restarts - 1)
    result = minimize_with_restarts(fun, starts, config.iterations)
    if result is None:
        return np.inf
    factors = chain_factors(links, gauges_from(result.x, sizes))
    return float(np.prod([op_norm(f) for f in factors]))


def _family_value(coeffs: np.ndarray, factors: List[List[np.ndarray]], diagonal: Tuple[int, ...],
                  stacking: str) -> float:
    """
    Cost of alpha (v_1 (x) v_2 (x) v_3) beta for one grouping of three factor families.

    Families listed in `diagonal` enter block-diagonally and share their index
    between alpha and beta; the others are stacked as block columns or block
    rows. For each value of the shared indices the remaining coefficients form
    one vector, so the scalar cost is the sum of their 2-norms.
    """
    scale = 1.0
    for i, mats in enumerate(factors):
        if i in diagonal:
            scale *= max(op_norm(x) for x in mats)
        else:
            scale *= op_norm(np.vstack(mats) if stacking == "columns" else np.hstack(mats))
    moved = np.moveaxis(coeffs, list(diagonal), list(range(len(diagonal))))
    shared = int(np.prod([coeffs.shape[i] for i in diagonal]))
    return float(np.linalg.norm(moved.reshape(shared, -1), axis=1).sum()) * scale


def _three_fold_projective(c: CyclicGroupElement, config: OptimizerConfig) -> Dict[str, float]:
    """
    Upper bounds for the three-fold projective norm, one per grouping family.

    Each factor family x_j = sum_g U_g G_gj runs over gauges G = exp(Z) of the
    group basis, with coefficients c transformed by the inverse gauges. The
    identity gauge of the diagonal family is the l1 decomposition.
    """
    reps = regular_rep(c.n)
    support = c.support
    r = len(support)
    coeffs = c.coeffs[support]
    sizes = [r, r, r]
    rng = derive_rng(config.seed, "diagonal-projective", c.n, r)
    starts = [np.zeros(6 * r * r)] + random_starts(rng, sizes, min(config.restarts, THREE_FOLD_STARTS) - 1)
    iterations = min(config.iterations, THREE_FOLD_ITERATIONS)
    bounds = {}
    for name, (diagonal, stacking) in THREE_FOLD_FAMILIES.items():
        def fun(x, diagonal=diagonal, stacking=stacking):
            gauges = gauges_from(x, sizes)
            inverses = [np.linalg.inv(g) for g in gauges]
            transformed = np.einsum("g,jg,kg,lg->jkl", coeffs, *inverses)
            factors = [[sum(reps[h] * g[i, j] for i, h in enumerate(support)) for j in range(r)]
                       for g in gauges]
            return float(np.log(_family_value(transformed, factors, diagonal, stacking)))

        result = minimize_with_restarts(fun, starts, iterations, jac=False)
        bounds[name] = np.inf if result is None else float(np.exp(result.fun))
        logger.debug(f"three-fold projective {name}: {bounds[name]:.10g}")
    return bounds


def delta_k_norm(c: CyclicGroupElement, k: int, mode: str = "haagerup",
                 config: Optional[OptimizerConfig] = None) -> NormBracket:
    """
    Bracket for the k-fold diagonal norm of c.

    k = 1 is the DFT closed form. In Haagerup mode k = 2 uses the two-factor
    optimizer and k = 3 a three-factor chain; in projective mode k = 2 uses
    the projective optimizer and k = 3 the better of the grouped gauge search
    and the l1 bound. The lower bound is the
    spatial norm, which equals the DFT norm at every k.
    """
    if mode not in NORM_MODES:
        raise UnknownKindError(f"unknown mode {mode!r}; expected one of {', '.join(NORM_MODES)}")
    _check_budget(c, k)
    config = config or OptimizerConfig()
    dft = dft_norm(c)
    if k == 1 or c.l1_norm == 0.0:
        return NormBracket(dft, dft, "dft")
    l1 = c.l1_norm
    if len(c.support) == 1:
        return NormBracket(dft, l1, "generator")

    if k == 2:
        tensor = delta_k_element(c, 2).as_tensor()
        inner = haagerup_norm(tensor, config) if mode == "haagerup" else projective_norm(tensor, config)
        upper = min(inner.upper, l1)
        witness = inner.upper_witness if inner.upper <= l1 else None
        return NormBracket(max(inner.lower, dft), upper, f"{mode}-two-fold", witness, "spatial",
                           {"l1": l1, "optimizer_upper": inner.upper})
    if mode == "haagerup":
        chain = _three_fold_chain(c, config)
        return NormBracket(dft, min(chain, l1), "haagerup-chain", None, "spatial",
                           {"l1": l1, "chain_upper": chain})
    bounds = _three_fold_projective(c, config)
    search = min(bounds.values())
    details = {"l1": l1, "search_upper": search}
    details.update({f"{name}_upper": value for name, value in bounds.items()})
    if search < l1 * (1.0 - SEARCH_IMPROVEMENT):
        return NormBracket(dft, search, "projective-grouped-search", None, "spatial", details)
    return NormBracket(dft, l1, "projective-l1", None, "spatial", details)


def dual_involution(c: CyclicGroupElement) -> CyclicGroupElement:
    """(sum c_g g)* = sum conj(c_g) g^{-1}."""
    idx = (-np.arange(c.n)) % c.n
    return CyclicGroupElement(c.n, np.conj(c.coeffs[idx]))


@dataclass
class DualInvolutionReport:
    involutive: bool
    antilinear: bool
    bracket: NormBracket
    image_bracket: NormBracket
    lower_difference: float
    upper_difference: float
    tol: float

    @property
    def isometric(self) -> bool:
        return self.lower_difference <= self.tol and self.upper_difference <= self.tol

    @property
    def passed(self) -> bool:
        return self.involutive and self.antilinear and self.isometric


def dual_involution_check(c: CyclicGroupElement, k: int, mode: str = "haagerup",
                          config: Optional[OptimizerConfig] = None,
                          tol: float = BRACKET_AGREEMENT_TOL) -> DualInvolutionReport:
    """
    Check that g -> g^{-1} extended antilinearly is an isometric involution.

    Both brackets are computed with identical budgets and seeds.
    """
    _check_budget(c, k)
    image = dual_involution(c)
    involutive = bool(np.array_equal(dual_involution(image).coeffs, c.coeffs))

    rng = derive_rng(0 if config is None else config.seed, "antilinear", c.n)
    other = CyclicGroupElement(c.n, rng.standard_normal(c.n) + 1j * rng.standard_normal(c.n))
    lam = complex(rng.standard_normal(), rng.standard_normal())
    lhs = dual_involution(CyclicGroupElement(c.n, lam * c.coeffs + other.coeffs)).coeffs
    rhs = np.conj(lam) * image.coeffs + dual_involution(other).coeffs
    antilinear = bool(np.max(np.abs(lhs - rhs)) <= ANTILINEARITY_TOL * (1.0 + np.max(np.abs(lhs))))

    bracket = delta_k_norm(c, k, mode, config)
    image_bracket = delta_k_norm(image, k, mode, config)
    return DualInvolutionReport(
        involutive, antilinear, bracket, image_bracket,
        abs(bracket.lower - image_bracket.lower), abs(bracket.upper - image_bracket.upper), tol,
    )


def norm_sequence(c: CyclicGroupElement, kmax: int = MAX_DIAGONAL_POWER, mode: str = "haagerup",
                  config: Optional[OptimizerConfig] = None) -> List[NormBracket]:
    """Brackets for k = 1..kmax."""
    return [delta_k_norm(c, k, mode, config) for k in range(1, kmax + 1)]
