"""
Operator space tensor norms on M_a (x) M_b.

Elements are kept as finite sums of elementary tensors. At matrix level n a
summand pairs a block column a_k (n*a x a) with a block row b_k (b x n*b) and
represents the n x n matrix whose (i, j) entry is a_k[i] (x) b_k[j].

Norms other than the spatial one are returned as NormBracket intervals: an
upper bound witnessed by an explicit decomposition and a lower bound from the
spatial norm or a normalized dual functional.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import (
    MAX_DUAL_PRODUCT_DIM,
    BudgetExceededError,
    ComputationError,
    DimensionMismatchError,
    GradingMetadataError,
    OptimizerConfig,
    SuperopsError,
    UnknownKindError,
)
from .core import GradedDim, GradedOperator, is_epsilon_positive, is_superpositive, superinvolve
from .optimize import (
    ChainLink,
    chain_factors,
    chain_log_norm,
    gauge_objective,
    gauges_from,
    minimize_with_restarts,
    pack,
    random_starts,
)
from .utils import as_complex_matrix, complex_gaussian, dagger, derive_rng, log_pd, op_norm, trace_norm

logger = logging.getLogger(__name__)

STAR_MODES = ("product", "haagerup_flip", "adjoint_space")
CSTAR_CHECKS = ("eps_positive", "superpositive")
RANK_TOL = 1e-12
PROJECTIVE_GROUPINGS = ("columns", "rows")
GROUPED_STARTS = 2
GROUPED_ITERATIONS = 150
DUAL_ITERATIONS = 100


@dataclass(eq=False)
class TensorElement:
    """
    sum_k a_k (x) b_k in M_n(M_a (x) M_b).

    Attributes:
        a_dim: size of the first factor algebra
        b_dim: size of the second factor algebra
        factors: (a_k, b_k) pairs, a_k of shape (n*a, a) and b_k of shape (b, n*b)
        level: matrix level n
        a_grading: grading of the first factor space, needed for superinvolutions
        b_grading: grading of the second factor space
    """
    a_dim: int
    b_dim: int
    factors: List[Tuple[np.ndarray, np.ndarray]]
    level: int = 1
    a_grading: Optional[GradedDim] = None
    b_grading: Optional[GradedDim] = None

    def __post_init__(self):
        if self.a_dim < 1 or self.b_dim < 1 or self.level < 1:
            raise SuperopsError("tensor dimensions and level must be positive")
        if not self.factors:
            raise SuperopsError("tensor element needs at least one factor pair")
        n, a, b = self.level, self.a_dim, self.b_dim
        pairs = []
        for a_k, b_k in self.factors:
            a_k = as_complex_matrix(a_k, "a factor")
            b_k = as_complex_matrix(b_k, "b factor")
            if a_k.shape != (n * a, a) or b_k.shape != (b, n * b):
                raise DimensionMismatchError(
                    f"factor shapes {a_k.shape}, {b_k.shape} do not fit level {n} over M_{a} (x) M_{b}"
                )
            pairs.append((a_k, b_k))
        self.factors = pairs
        for name, grading, size in (("a", self.a_grading, a), ("b", self.b_grading, b)):
            if grading is not None and grading.total != size:
                raise DimensionMismatchError(f"{name} grading {grading} does not match dimension {size}")

    @classmethod
    def elementary(cls, a, b, a_grading: Optional[GradedDim] = None,
                   b_grading: Optional[GradedDim] = None) -> "TensorElement":
        a = as_complex_matrix(a, "a")
        b = as_complex_matrix(b, "b")
        return cls(a.shape[0], b.shape[0], [(a, b)], 1, a_grading, b_grading)

    @property
    def rank(self) -> int:
        return len(self.factors)

    def a_block(self, k: int, i: int) -> np.ndarray:
        a = self.a_dim
        return self.factors[k][0][i * a:(i + 1) * a]

    def b_block(self, k: int, j: int) -> np.ndarray:
        b = self.b_dim
        return self.factors[k][1][:, j * b:(j + 1) * b]

    def with_factors(self, factors, **changes) -> "TensorElement":
        fields = dict(a_dim=self.a_dim, b_dim=self.b_dim, level=self.level,
                      a_grading=self.a_grading, b_grading=self.b_grading)
        fields.update(changes)
        return TensorElement(factors=list(factors), **fields)


@dataclass
class NormBracket:
    """Certified interval [lower, upper] for a tensor norm."""
    lower: float
    upper: float
    method: str
    upper_witness: Optional[TensorElement] = None
    lower_witness: str = ""
    details: Dict[str, float] = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol


def kron_matrix(t: TensorElement) -> np.ndarray:
    """The element as an (n*a*b)-square matrix with (i, j) block sum_k a_k[i] (x) b_k[j]."""
    n, a, b = t.level, t.a_dim, t.b_dim
    out = np.zeros((n, a, b, n, a, b), dtype=complex)
    for a_k, b_k in t.factors:
        out += np.einsum("ixg,yjz->ixyjgz", a_k.reshape(n, a, a), b_k.reshape(b, n, b))
    return out.reshape(n * a * b, n * a * b)


def injective_norm(t: TensorElement) -> float:
    return op_norm(kron_matrix(t))


def minimal_decomposition(t: TensorElement, tol: float = RANK_TOL, padding: int = 0) -> TensorElement:
    """
    Shortest decomposition of t, from the SVD of sum_k vec(a_k) vec(b_k)^T.

    The singular values are split evenly between the two sides; `padding`
    appends zero pairs. A zero tensor comes back as one zero pair.
    """
    k_mat = sum(np.outer(a_k.ravel(), b_k.ravel()) for a_k, b_k in t.factors)
    u, s, vh = np.linalg.svd(k_mat, full_matrices=False)
    a_shape, b_shape = t.factors[0][0].shape, t.factors[0][1].shape
    keep = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    factors = [((u[:, j] * np.sqrt(s[j])).reshape(a_shape), (vh[j] * np.sqrt(s[j])).reshape(b_shape))
               for j in range(keep)]
    if not factors:
        factors = [(np.zeros(a_shape), np.zeros(b_shape))]
    factors += [(np.zeros(a_shape), np.zeros(b_shape)) for _ in range(padding)]
    return t.with_factors(factors)


def _row_and_column(t: TensorElement) -> Tuple[np.ndarray, np.ndarray]:
    """V = [a_1 ... a_r] and W = [b_1; ...; b_r]."""
    return np.hstack([a_k for a_k, _ in t.factors]), np.vstack([b_k for _, b_k in t.factors])


def _split(t: TensorElement, v: np.ndarray, w: np.ndarray) -> TensorElement:
    a, b, r = t.a_dim, t.b_dim, t.rank
    return t.with_factors([(v[:, j * a:(j + 1) * a], w[j * b:(j + 1) * b]) for j in range(r)])


def _haagerup_sdp(t: TensorElement) -> Optional[Tuple[float, np.ndarray]]:
    """
    Convex form of the Haagerup norm at fixed rank.

    Minimizes s subject to sum P_kl a_k a_l^dagger <= s, sum Q_kl b_k^dagger b_l <= s
    and [[P, I], [I, Q]] >= 0. Returns (s, P) or None if the solver fails.
    """
    try:
        import cvxpy as cp
    except ImportError:
        logger.debug("cvxpy unavailable; skipping the SDP start")
        return None
    r = t.rank
    block = cp.Variable((2 * r, 2 * r), hermitian=True)
    p = block[:r, :r]
    q = block[r:, r:]
    left_dim, right_dim = t.level * t.a_dim, t.level * t.b_dim
    x = cp.Variable((left_dim, left_dim), hermitian=True)
    y = cp.Variable((right_dim, right_dim), hermitian=True)
    x_expr = sum(p[k, l] * (t.factors[k][0] @ dagger(t.factors[l][0])) for k in range(r) for l in range(r))
    y_expr = sum(q[k, l] * (dagger(t.factors[k][1]) @ t.factors[l][1]) for k in range(r) for l in range(r))
    s = cp.Variable()
    constraints = [
        x == x_expr,
        y == y_expr,
        cp.lambda_max(x) <= s,
        cp.lambda_max(y) <= s,
        block[:r, r:] == np.eye(r),
        block >> 0,
    ]
    problem = cp.Problem(cp.Minimize(s), constraints)
    try:
        problem.solve()
    except cp.SolverError as e:
        logger.debug(f"Haagerup SDP failed: {e}")
        return None
    if problem.status not in ("optimal", "optimal_inaccurate") or block.value is None:
        logger.debug(f"Haagerup SDP status {problem.status}")
        return None
    return float(problem.value), np.asarray(block.value)[:r, :r]


def haagerup_norm(t: TensorElement, config: Optional[OptimizerConfig] = None) -> NormBracket:
    """
    Bracket for the Haagerup norm ||t||_{h,n}.

    The upper bound is ||v|| ||w|| for the best gauge-transformed minimal
    decomposition v . w found, starting from the identity gauge, the square
    root of the SDP solution and seeded random gauges. The lower bound is the
    spatial norm.

    Args:
        t: tensor element
        config: optimizer budgets

    Returns:
        NormBracket whose upper_witness is the decomposition attaining the upper bound
    """
    config = config or OptimizerConfig()
    lower = injective_norm(t)
    minimal = minimal_decomposition(t, padding=config.padding)
    if lower == 0.0:
        return NormBracket(0.0, 0.0, "zero", minimal, "spatial")
    v, w = _row_and_column(minimal)
    links = [ChainLink(v, t.level * t.a_dim, t.a_dim), ChainLink(w, t.b_dim, t.level * t.b_dim)]
    sizes = [minimal.rank]
    fun = gauge_objective(chain_log_norm(links), sizes)

    starts = [np.zeros(2 * minimal.rank ** 2)]
    details: Dict[str, float] = {}
    if config.sdp_warm_start and config.padding == 0:
        solved = _haagerup_sdp(minimal)
        if solved is not None:
            details["sdp_value"] = solved[0]
            starts.append(pack([0.5 * log_pd(solved[1])]))
    rng = derive_rng(config.seed, "haagerup", t.level, minimal.rank)
    starts += random_starts(rng, sizes, max(config.restarts - len(starts), 0))
    result = minimize_with_restarts(fun, starts, config.iterations)
    if result is None:
        raise ComputationError("every Haagerup restart hit a singular gauge")

    v_opt, w_opt = chain_factors(links, gauges_from(result.x, sizes))
    upper = op_norm(v_opt) * op_norm(w_opt)
    witness = _split(minimal, v_opt, w_opt)
    logger.info(f"haagerup_norm rank {minimal.rank}: [{lower:.8g}, {upper:.8g}]")
    return NormBracket(lower, upper, "gauge-lbfgs", witness, "spatial", details)


def star_tensor(t: TensorElement, mode: str = "product") -> TensorElement:
    """
    Involutions of a tensor element.

    product: (x*)_{ij} = sum_k a_k[j]* (x) b_k[i]*, superinvolution in each factor
    haagerup_flip: v . w -> w* . v*, factor spaces swapped
    adjoint_space: as haagerup_flip with ordinary adjoints
    """
    if mode not in STAR_MODES:
        raise UnknownKindError(f"unknown star mode {mode!r}; expected one of {', '.join(STAR_MODES)}")
    if mode in ("product", "haagerup_flip") and (t.a_grading is None or t.b_grading is None):
        raise GradingMetadataError(f"star mode {mode!r} needs gradings on both factor spaces")
    n = t.level

    def star_a(m):
        return superinvolve(GradedOperator(t.a_grading, m)).data

    def star_b(m):
        return superinvolve(GradedOperator(t.b_grading, m)).data

    if mode == "product":
        factors = []
        zero_a = np.zeros((t.a_dim, t.a_dim), dtype=complex)
        zero_b = np.zeros((t.b_dim, t.b_dim), dtype=complex)
        for k in range(t.rank):
            for i in range(n):
                for j in range(n):
                    col = [star_a(t.a_block(k, j)) if s == i else zero_a for s in range(n)]
                    row = [star_b(t.b_block(k, i)) if s == j else zero_b for s in range(n)]
                    factors.append((np.vstack(col), np.hstack(row)))
        return t.with_factors(factors)

    if mode == "haagerup_flip":
        first, second = star_b, star_a
    else:
        first, second = dagger, dagger
    factors = [(np.vstack([first(t.b_block(k, i)) for i in range(n)]),
                np.hstack([second(t.a_block(k, j)) for j in range(n)]))
               for k in range(t.rank)]
    return t.with_factors(factors, a_dim=t.b_dim, b_dim=t.a_dim,
                          a_grading=t.b_grading, b_grading=t.a_grading)


def symmetrized_haagerup(t: TensorElement, config: Optional[OptimizerConfig] = None) -> NormBracket:
    """max(||t||_h, ||t*||_h) with the product involution."""
    plain = haagerup_norm(t, config)
    starred = haagerup_norm(star_tensor(t, "product"), config)
    witness = plain.upper_witness if plain.upper >= starred.upper else starred.upper_witness
    details = {"upper": plain.upper, "upper_star": starred.upper,
               "lower": plain.lower, "lower_star": starred.lower}
    return NormBracket(max(plain.lower, starred.lower), max(plain.upper, starred.upper),
                       "symmetrized-gauge-lbfgs", witness, "spatial", details)


def _require_level_one(t: TensorElement, what: str):
    if t.level != 1:
        raise BudgetExceededError(f"{what} is computed at matrix level one only")


def _projective_value_and_grad(a_mats: Sequence[np.ndarray], b_mats: Sequence[np.ndarray]):
    """sum_i ||(aG)_i|| ||(G^{-1} b)_i|| and its gauge gradient."""
    r = len(a_mats)

    def value_and_grad(gs):
        g = gs[0]
        h = np.linalg.inv(g)
        a_new = [sum(a_mats[k] * g[k, i] for k in range(r)) for i in range(r)]
        b_new = [sum(b_mats[k] * h[i, k] for k in range(r)) for i in range(r)]
        value = 0.0
        grad_a = np.zeros((r, r), dtype=complex)
        weighted = np.zeros((r, r), dtype=complex)
        for i in range(r):
            ua, sa, vha = np.linalg.svd(a_new[i])
            ub, sb, vhb = np.linalg.svd(b_new[i])
            value += sa[0] * sb[0]
            ea = np.outer(ua[:, 0], vha[0])
            eb = np.outer(ub[:, 0], vhb[0])
            for k in range(r):
                grad_a[k, i] = sb[0] * np.vdot(a_mats[k], ea)
                weighted[i, k] = sa[0] * np.vdot(eb, b_mats[k])
        grad_b = -dagger(h @ weighted.T @ h)
        return np.log(value), [(grad_a + grad_b) / value]

    return value_and_grad


def projective_upper_decomposition(t: TensorElement, config: OptimizerConfig
                                   ) -> Tuple[float, TensorElement]:
    minimal = minimal_decomposition(t)
    a_mats = [a_k for a_k, _ in minimal.factors]
    b_mats = [b_k for _, b_k in minimal.factors]
    sizes = [minimal.rank]
    fun = gauge_objective(_projective_value_and_grad(a_mats, b_mats), sizes)
    rng = derive_rng(config.seed, "projective", minimal.rank)
    starts = [np.zeros(2 * minimal.rank ** 2)] + random_starts(rng, sizes, config.restarts - 1)
    result = minimize_with_restarts(fun, starts, config.iterations)
    if result is None:
        raise ComputationError("every projective restart hit a singular gauge")
    g = gauges_from(result.x, sizes)[0]
    h = np.linalg.inv(g)
    r = minimal.rank
    factors = [(sum(a_mats[k] * g[k, i] for k in range(r)), sum(b_mats[k] * h[i, k] for k in range(r)))
               for i in range(r)]
    upper = float(sum(op_norm(a) * op_norm(b) for a, b in factors))
    return upper, minimal.with_factors(factors)


def _stacked_norm(mats: Sequence[np.ndarray], grouping: str) -> float:
    """Norm of the block column (columns) or block row (rows) built from mats."""
    return op_norm(np.vstack(mats) if grouping == "columns" else np.hstack(mats))


def _grouped_factors(a_mats: Sequence[np.ndarray], b_mats: Sequence[np.ndarray], x: np.ndarray, m: int):
    """Weights s and factors x_j = sum_i a_i G_ij, y_j = sum_i b_i H_ij with G diag(s) H^T = I."""
    r = len(a_mats)
    g = (x[:r * m] + 1j * x[r * m:2 * r * m]).reshape(r, m)
    s = np.exp(x[2 * r * m:])
    h_t = np.linalg.pinv(g * s)
    a_new = [sum(a_mats[i] * g[i, j] for i in range(r)) for j in range(m)]
    b_new = [sum(b_mats[i] * h_t[j, i] for i in range(r)) for j in range(m)]
    return s, a_new, b_new


def _grouped_upper(witness: TensorElement, grouping: str, config: OptimizerConfig
                   ) -> Tuple[float, TensorElement, np.ndarray]:
    """
    ||s||_2 ||[x_j]|| ||[y_j]|| minimized over t = sum_j s_j x_j (x) y_j.

    The x_j and the y_j are stacked as block columns (or block rows); with the
    weights s on the matching pairs of the scalar coefficient matrix this is
    the cost of a factorization alpha (v (x) w) beta. The search starts from
    the normalized factors of `witness`, padded by config.padding.
    """
    a_mats = [a_k for a_k, _ in witness.factors]
    b_mats = [b_k for _, b_k in witness.factors]
    r = witness.rank
    m = r + config.padding
    a_norms = np.array([op_norm(a_k) for a_k in a_mats])
    b_norms = np.array([op_norm(b_k) for b_k in b_mats])
    g0 = np.zeros((r, m), dtype=complex)
    g0[:, :r] = np.diag(1.0 / a_norms)
    log_s0 = np.full(m, np.log(np.min(a_norms * b_norms)) - 6.0)
    log_s0[:r] = np.log(a_norms * b_norms)

    def encode(g):
        return np.concatenate([g.real.ravel(), g.imag.ravel(), log_s0])

    def fun(x):
        s, a_new, b_new = _grouped_factors(a_mats, b_mats, x, m)
        return float(np.log(np.linalg.norm(s) * _stacked_norm(a_new, grouping) * _stacked_norm(b_new, grouping)))

    rng = derive_rng(config.seed, "projective-grouped", grouping, r)
    starts = [encode(g0)]
    for _ in range(min(config.restarts, GROUPED_STARTS) - 1):
        starts.append(encode(g0 + 0.3 * complex_gaussian(rng, (r, m)) * np.mean(1.0 / a_norms)))
    result = minimize_with_restarts(fun, starts, min(config.iterations, GROUPED_ITERATIONS), jac=False)
    target = kron_matrix(witness)
    for x in ([] if result is None else [result.x]) + [starts[0]]:
        s, a_new, b_new = _grouped_factors(a_mats, b_mats, x, m)
        grouped = witness.with_factors([(s_j * x_j, y_j) for s_j, x_j, y_j in zip(s, a_new, b_new)])
        # a rank-deficient G diag(s) no longer reproduces t
        if np.max(np.abs(kron_matrix(grouped) - target)) <= 1e-9 * max(1.0, np.max(np.abs(target))):
            break
    value = float(np.linalg.norm(s) * _stacked_norm(a_new, grouping) * _stacked_norm(b_new, grouping))
    return value, grouped, s


def projective_norm(t: TensorElement, config: Optional[OptimizerConfig] = None) -> NormBracket:
    """
    Bracket for the operator space projective norm at level one.

    Upper bounds come from three families of factorizations alpha (v (x) w) beta
    of a gauge-optimized minimal decomposition: the nuclear sum
    sum_i ||a_i|| ||b_i||, and the grouped ones where the factors are stacked
    as one block column or one block row (see _grouped_upper). The smallest
    wins; grouped witnesses carry their weights as details weight_<j>, with
    witness factors (s_j x_j, y_j). The lower bound is the spatial norm.
    """
    config = config or OptimizerConfig()
    _require_level_one(t, "the projective norm")
    lower = injective_norm(t)
    if lower == 0.0:
        return NormBracket(0.0, 0.0, "zero", minimal_decomposition(t), "spatial")
    nuclear, nuclear_witness = projective_upper_decomposition(t, config)
    upper, witness, method, weights = nuclear, nuclear_witness, "gauge-nuclear-sum", None
    details: Dict[str, float] = {"nuclear_upper": nuclear}
    for grouping in PROJECTIVE_GROUPINGS:
        value, grouped, s = _grouped_upper(nuclear_witness, grouping, config)
        details[f"{grouping}_upper"] = value
        if value < upper:
            upper, witness, method, weights = value, grouped, f"grouped-{grouping}", s
    if weights is not None:
        details.update({f"weight_{j}": float(s_j) for j, s_j in enumerate(weights)})
    details["gap"] = upper - lower
    logger.info(f"projective_norm {method}: [{lower:.8g}, {upper:.8g}]")
    return NormBracket(lower, upper, method, witness, "spatial", details)


def pairing(t: TensorElement, phi: TensorElement) -> complex:
    """Trace duality <t, phi> = tr(T Phi) of the spatial matrices."""
    if (t.a_dim, t.b_dim, t.level) != (phi.a_dim, phi.b_dim, phi.level):
        raise DimensionMismatchError("pairing needs elements of the same tensor space")
    return complex(np.sum(kron_matrix(t) * kron_matrix(phi).T))


def nuclear_upper(phi: TensorElement) -> float:
    """
    sum_i s_i ||f_i||_1 ||g_i||_1 over the operator-Schmidt decomposition of phi.

    Bounds |<t, phi>| / ||t|| from above for the spatial norm, hence for every
    norm dominating it.
    """
    minimal = minimal_decomposition(phi)
    return float(sum(trace_norm(f) * trace_norm(g) for f, g in minimal.factors))


def _matrix_to_tensor(m: np.ndarray, a: int, b: int, a_grading: Optional[GradedDim] = None,
                      b_grading: Optional[GradedDim] = None) -> TensorElement:
    """Decompose an (a*b)-square matrix into matrix units of M_a times blocks."""
    blocks = m.reshape(a, b, a, b)
    factors = []
    for i in range(a):
        for j in range(a):
            e = np.zeros((a, a), dtype=complex)
            e[i, j] = 1.0
            factors.append((e, blocks[i, :, j, :]))
    return TensorElement(a, b, factors, 1, a_grading, b_grading)


def _weight_root(x: np.ndarray, n: int) -> Tuple[np.ndarray, float]:
    """(W^{-1/2}, tr W) for W = exp(Z), Z the Hermitian part of the packed complex matrix x."""
    z = x[:n * n].reshape(n, n) + 1j * x[n * n:].reshape(n, n)
    lam, vec = np.linalg.eigh((z + dagger(z)) / 2)
    return (vec * np.exp(-lam / 2)) @ dagger(vec), float(np.sum(np.exp(lam)))


def dual_haagerup_upper(phi: TensorElement, iterations: int = DUAL_ITERATIONS) -> float:
    """
    Upper bound for the Haagerup norm of phi = sum_k f_k (x) g_k as an element
    of the trace-class duals, where f(x) = tr(F x).

    For positive Q and R, sqrt(tr Q tr R) times the operator norm of
    sum_k vec(G_k^dagger R^{-1/2}) vec(F_k Q^{-1/2})^dagger dominates it. Q and R
    are searched as exponentials of Hermitian matrices from the identity and
    from Q = (sum F^dagger F)^{1/2}, R = (sum G G^dagger)^{1/2}. The result
    never exceeds nuclear_upper(phi).
    """
    bound = nuclear_upper(phi)
    if bound == 0.0:
        return 0.0
    minimal = minimal_decomposition(phi)
    fs = [f for f, _ in minimal.factors]
    gs = [g for _, g in minimal.factors]
    a, b = phi.a_dim, phi.b_dim

    def fun(x):
        q_root, q_trace = _weight_root(x[:2 * a * a], a)
        r_root, r_trace = _weight_root(x[2 * a * a:], b)
        left = np.array([(f @ q_root).ravel() for f in fs])
        right = np.array([(dagger(g) @ r_root).ravel() for g in gs])
        return float(0.5 * np.log(q_trace * r_trace) + np.log(op_norm(right.T @ left.conj())))

    q0 = 0.5 * log_pd(sum(dagger(f) @ f for f in fs), floor=1e-6)
    r0 = 0.5 * log_pd(sum(g @ dagger(g) for g in gs), floor=1e-6)
    starts = [np.zeros(2 * (a * a + b * b)), pack([q0, r0])]
    result = minimize_with_restarts(fun, starts, iterations, jac=False)
    if result is not None:
        bound = min(bound, float(np.exp(result.fun)))
    return bound


def _sharp(phi: TensorElement) -> TensorElement:
    """phi with each factor replaced by its superinvolution, or adjoint when ungraded."""
    def star(m, grading):
        return dagger(m) if grading is None else superinvolve(GradedOperator(grading, m)).data

    return phi.with_factors([(star(f, phi.a_grading), star(g, phi.b_grading)) for f, g in phi.factors])


def dual_symmetrized_haagerup(t: TensorElement, config: Optional[OptimizerConfig] = None) -> NormBracket:
    """
    Bracket for the dual symmetrized Haagerup norm.

    Upper bound: the smaller of the Haagerup and projective upper bounds.
    Lower bound: the spatial norm, or |<t, phi>| / max(U(phi), U(phi^#)) over
    candidate functionals phi when that is larger, where U is
    dual_haagerup_upper and phi^# applies the factor involutions. Candidates
    are the adjoint of the spatial matrix, the one aligned with its top
    singular pair and config.dual_samples random ones.
    """
    config = config or OptimizerConfig()
    _require_level_one(t, "the dual symmetrized Haagerup norm")
    a, b = t.a_dim, t.b_dim
    if a * b > MAX_DUAL_PRODUCT_DIM:
        raise BudgetExceededError(f"a_dim * b_dim = {a * b} exceeds {MAX_DUAL_PRODUCT_DIM}")
    hb = haagerup_norm(t, config)
    pb = projective_norm(t, config)
    upper = min(hb.upper, pb.upper)
    witness = hb.upper_witness if hb.upper <= pb.upper else pb.upper_witness

    spatial = kron_matrix(t)
    lower, lower_witness = injective_norm(t), "spatial"
    if lower == 0.0:
        return NormBracket(0.0, 0.0, "zero", witness, "spatial")
    u, _, vh = np.linalg.svd(spatial)
    candidates = [dagger(spatial), np.outer(vh[0].conj(), u[:, 0].conj())]
    rng = derive_rng(config.seed, "dual-functional", a, b)
    for _ in range(config.dual_samples):
        candidates.append(rng.standard_normal((a * b, a * b)) + 1j * rng.standard_normal((a * b, a * b)))
    iterations = min(config.iterations, DUAL_ITERATIONS)
    best_dual = 0.0
    for phi_matrix in candidates:
        phi = _matrix_to_tensor(phi_matrix, a, b, t.a_grading, t.b_grading)
        scale = max(dual_haagerup_upper(phi, iterations), dual_haagerup_upper(_sharp(phi), iterations))
        if scale > 0:
            best_dual = max(best_dual, abs(pairing(t, phi)) / scale)
    if best_dual > lower:
        lower, lower_witness = best_dual, "dual-functional"
    details = {"haagerup_upper": hb.upper, "projective_upper": pb.upper, "dual_lower": best_dual}
    return NormBracket(lower, upper, "heuristic-dual-lower", witness, lower_witness, details)


def _graded_spatial(t: TensorElement) -> GradedOperator:
    """kron_matrix(t) on H_A (x) H_B with grading eps_A (x) eps_B, rotated to sorted frame order."""
    if t.a_grading is None or t.b_grading is None:
        raise GradingMetadataError("C*-tensor checks need gradings on both factor spaces")
    _require_level_one(t, "the C*-tensor check")
    frame = np.kron(t.a_grading.frame(), t.b_grading.frame())
    signs = np.kron(t.a_grading.signs(), t.b_grading.signs())
    order = np.argsort(-signs, kind="stable")
    rotated = dagger(frame) @ kron_matrix(t) @ frame
    p = int(np.sum(signs > 0))
    return GradedOperator(GradedDim(p, len(signs) - p), rotated[np.ix_(order, order)])


def finite_dim_cstar_tensor(t: TensorElement, check: str = "eps_positive") -> bool:
    """Positivity of t in the graded C*-tensor product of two full matrix algebras."""
    if check not in CSTAR_CHECKS:
        raise UnknownKindError(f"unknown check {check!r}; expected one of {', '.join(CSTAR_CHECKS)}")
    x = _graded_spatial(t)
    if check == "eps_positive":
        return is_epsilon_positive(x)
    return is_superpositive(x)
