"""
Core graded-operator module.

Contains the graded Hilbert space types and the graded algebra on them:
superinvolution, parity parts, positivity cones, graded spectrum, the
iota map, twisted products and the graded functional calculus.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .config import (
    DEFAULT_TOL,
    UNIT_MODULUS_TOL,
    DimensionMismatchError,
    NotSelfAdjointError,
    SuperopsError,
    UnknownKindError,
)
from .utils import (
    as_complex_matrix,
    complex_gaussian,
    dagger,
    derive_rng,
    direct_sum,
    haar_unitary,
    hermitian_part,
    is_psd,
    max_entry_norm,
    op_norm,
    random_unit_vector,
    sort_eigenvalues,
    sqrt_psd,
)

logger = logging.getLogger(__name__)

GRADINGS = ("diag", "swap")
RANDOM_KINDS = (
    "generic",
    "hermitian",
    "eps_positive",
    "superpositive",
    "superunitary",
    "even_unitary",
    "twisted_unitary",
)
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class GradedDim:
    """
    Dimensions of a graded Hilbert space H = H_even + H_odd.

    With grading "diag" the grading operator is diag(I_p, -I_q). With
    grading "swap" (p == q == m) it exchanges two copies of C^m.
    """
    p: int
    q: int
    grading: str = "diag"

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise SuperopsError(f"graded dimensions must be nonnegative, got ({self.p}, {self.q})")
        if self.p + self.q < 1:
            raise SuperopsError("graded space must have positive total dimension")
        if self.grading not in GRADINGS:
            raise SuperopsError(f"unknown grading {self.grading!r}")
        if self.grading == "swap" and self.p != self.q:
            raise SuperopsError("swap grading needs p == q")

    @classmethod
    def swap(cls, m: int) -> "GradedDim":
        return cls(m, m, "swap")

    @property
    def total(self) -> int:
        return self.p + self.q

    def signs(self, level: int = 1) -> np.ndarray:
        """Eigenvalues of the grading in frame order, repeated for each level."""
        base = np.concatenate([np.ones(self.p), -np.ones(self.q)])
        return np.tile(base, level)

    def frame(self, level: int = 1) -> np.ndarray:
        """Unitary F with epsilon = F diag(signs) F^dagger."""
        if self.grading == "diag":
            base = np.eye(self.total, dtype=complex)
        else:
            eye = np.eye(self.p)
            base = np.block([[eye, eye], [eye, -eye]]).astype(complex) / np.sqrt(2.0)
        return np.kron(np.eye(level), base)

    def epsilon(self, level: int = 1) -> np.ndarray:
        if self.grading == "diag":
            return np.diag(self.signs(level)).astype(complex)
        eye = np.eye(self.p)
        base = np.block([[np.zeros_like(eye), eye], [eye, np.zeros_like(eye)]]).astype(complex)
        return np.kron(np.eye(level), base)

    def even_projection(self, level: int = 1) -> np.ndarray:
        return (np.eye(self.total * level) + self.epsilon(level)) / 2


@dataclass(frozen=True, eq=False)
class GradedOperator:
    """An operator on a graded Hilbert space, stored as a dense complex matrix."""
    dim: GradedDim
    data: np.ndarray

    def __post_init__(self):
        data = as_complex_matrix(self.data, "operator data")
        n = self.dim.total
        if data.shape != (n, n):
            raise DimensionMismatchError(
                f"operator data has shape {data.shape}, expected ({n}, {n}) for {self.dim}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def identity(cls, dim: GradedDim) -> "GradedOperator":
        return cls(dim, np.eye(dim.total))

    @classmethod
    def grading_operator(cls, dim: GradedDim) -> "GradedOperator":
        return cls(dim, dim.epsilon())

    @property
    def base_dim(self) -> GradedDim:
        return self.dim

    @property
    def level(self) -> int:
        return 1

    @property
    def epsilon(self) -> np.ndarray:
        return self.dim.epsilon()

    def with_data(self, data) -> "GradedOperator":
        return GradedOperator(self.dim, data)

    def amplify(self) -> "AmplifiedOperator":
        return AmplifiedOperator(1, self.dim, self.data)


@dataclass(frozen=True, eq=False)
class AmplifiedOperator:
    """An element of M_n(B(H)), viewed as n x n blocks with grading I_n (x) epsilon."""
    level: int
    base_dim: GradedDim
    data: np.ndarray

    def __post_init__(self):
        if self.level < 1:
            raise SuperopsError("amplification level must be positive")
        data = as_complex_matrix(self.data, "amplified data")
        n = self.level * self.base_dim.total
        if data.shape != (n, n):
            raise DimensionMismatchError(
                f"amplified data has shape {data.shape}, expected ({n}, {n}) at level {self.level}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_blocks(cls, base_dim: GradedDim, rows: Sequence[Sequence]) -> "AmplifiedOperator":
        """Assemble from a square grid of base-size blocks; None stands for a zero block."""
        d = base_dim.total
        grid = [[np.zeros((d, d), dtype=complex) if b is None else _raw(b) for b in row]
                for row in rows]
        return cls(len(grid), base_dim, np.block(grid))

    @property
    def epsilon(self) -> np.ndarray:
        return self.base_dim.epsilon(self.level)

    def with_data(self, data) -> "AmplifiedOperator":
        return AmplifiedOperator(self.level, self.base_dim, data)

    def block(self, i: int, j: int) -> GradedOperator:
        d = self.base_dim.total
        return GradedOperator(self.base_dim, self.data[i * d:(i + 1) * d, j * d:(j + 1) * d])


GradedMatrix = Union[GradedOperator, AmplifiedOperator]


@dataclass(frozen=True)
class OmegaUnitary:
    """
    A unitary of C*(1, epsilon): omega0 on the even part, omega1 on the odd part.
    """
    dim: GradedDim
    omega0: complex
    omega1: complex

    def __post_init__(self):
        for name in ("omega0", "omega1"):
            value = complex(getattr(self, name))
            if abs(abs(value) - 1.0) > UNIT_MODULUS_TOL:
                raise SuperopsError(f"{name} must have unit modulus, got |{value}| = {abs(value)}")
            object.__setattr__(self, name, value)

    @classmethod
    def identity(cls, dim: GradedDim) -> "OmegaUnitary":
        return cls(dim, 1.0, 1.0)

    @classmethod
    def grading(cls, dim: GradedDim) -> "OmegaUnitary":
        return cls(dim, 1.0, -1.0)

    def matrix(self, level: int = 1) -> np.ndarray:
        plus = self.dim.even_projection(level)
        return self.omega0 * plus + self.omega1 * (np.eye(plus.shape[0]) - plus)


def _raw(x) -> np.ndarray:
    if isinstance(x, (GradedOperator, AmplifiedOperator)):
        return x.data
    return np.asarray(x, dtype=complex)


def _check_same_space(x: GradedMatrix, y: GradedMatrix):
    if x.base_dim != y.base_dim or x.level != y.level:
        raise DimensionMismatchError(
            f"operands live on different spaces: {x.base_dim} level {x.level} vs "
            f"{y.base_dim} level {y.level}"
        )


def _check_unit(omega: complex, tol: float = 1e-9) -> complex:
    omega = complex(omega)
    if abs(abs(omega) - 1.0) > tol:
        raise SuperopsError(f"omega must have unit modulus, got {omega}")
    return omega


def _parity_split(x: GradedMatrix):
    signs = x.base_dim.signs(x.level)
    mask = np.outer(signs, signs) > 0
    if x.base_dim.grading == "diag":
        even = np.where(mask, x.data, 0)
        odd = np.where(mask, 0, x.data)
        return even, odd
    frame = x.base_dim.frame(x.level)
    inner = dagger(frame) @ x.data @ frame
    even = frame @ np.where(mask, inner, 0) @ dagger(frame)
    return even, x.data - even


def superinvolve(x: GradedMatrix) -> GradedMatrix:
    """
    Superinvolution x* = epsilon x^dagger epsilon.

    At matrix level n the amplified grading I_n (x) epsilon is used, so block
    (i, j) of the result is the superinvolution of block (j, i).
    """
    eps = x.epsilon
    return x.with_data(eps @ dagger(x.data) @ eps)


def omega_involve(x: GradedMatrix, w: OmegaUnitary) -> GradedMatrix:
    """Return omega x^dagger omega."""
    if w.dim != x.base_dim:
        raise DimensionMismatchError(f"omega lives on {w.dim}, operator on {x.base_dim}")
    om = w.matrix(x.level)
    return x.with_data(om @ dagger(x.data) @ om)


def even_part(x: GradedMatrix) -> GradedMatrix:
    return x.with_data(_parity_split(x)[0])


def odd_part(x: GradedMatrix) -> GradedMatrix:
    return x.with_data(_parity_split(x)[1])


def is_hermitian(x: GradedMatrix, tol: float = DEFAULT_TOL) -> bool:
    return max_entry_norm(x.data - superinvolve(x).data) <= tol


def is_omega_hermitian(x: GradedMatrix, w: OmegaUnitary, tol: float = DEFAULT_TOL) -> bool:
    return max_entry_norm(x.data - omega_involve(x, w).data) <= tol


def graded_spectrum(x: GradedMatrix, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    Values lambda with x - lambda*epsilon singular, i.e. the spectrum of epsilon x.

    Returned sorted by (real, imaginary) part. Hermitian input takes the
    self-adjoint solver so the values come back exactly real.
    """
    m = x.epsilon @ x.data
    if is_hermitian(x, tol):
        values = np.linalg.eigvalsh(hermitian_part(m)).astype(complex)
    else:
        values = np.linalg.eigvals(m)
    return sort_eigenvalues(values)


def _form_minimum(h: np.ndarray, rng: Optional[np.random.Generator], samples: int,
                  steps: int) -> float:
    """Minimum of <h xi, xi> over unit xi: sampled, then shifted power iteration."""
    rng = rng if rng is not None else derive_rng(0, "form-minimum")
    n = h.shape[0]
    best_val, best_vec = np.inf, None
    for _ in range(samples):
        v = random_unit_vector(rng, n)
        val = float(np.real(np.vdot(v, h @ v)))
        if val < best_val:
            best_val, best_vec = val, v
    shift = op_norm(h)
    v = best_vec
    for _ in range(steps):
        w = shift * v - h @ v
        nrm = np.linalg.norm(w)
        if nrm == 0:
            break
        v = w / nrm
        best_val = min(best_val, float(np.real(np.vdot(v, h @ v))))
    return best_val


def epsilon_form_minimum(x: GradedMatrix, rng: Optional[np.random.Generator] = None,
                         samples: int = 200, steps: int = 200) -> float:
    """Sampled minimum of Re <x xi, epsilon xi> over unit vectors."""
    return _form_minimum(hermitian_part(x.epsilon @ x.data), rng, samples, steps)


def sigma_matrix(x: GradedMatrix) -> np.ndarray:
    """x_0 + epsilon x_1; unitarily equivalent to iota(x) through kappa."""
    even, odd = _parity_split(x)
    return even + x.epsilon @ odd


def sigma_form_minimum(x: GradedMatrix, rng: Optional[np.random.Generator] = None,
                       samples: int = 200, steps: int = 200) -> float:
    """Sampled minimum of Re(<x_0 xi, xi> + <x_1 xi, epsilon xi>)."""
    return _form_minimum(hermitian_part(sigma_matrix(x)), rng, samples, steps)


def is_epsilon_positive(x: GradedMatrix, tol: float = DEFAULT_TOL, method: str = "psd",
                        rng: Optional[np.random.Generator] = None) -> bool:
    """
    Hermitian with epsilon x positive semidefinite.

    Args:
        x: graded operator
        tol: absolute tolerance, scaled by (1 + ||x||) for the order test
        method: "psd" (eigenvalues of epsilon x), "spectrum" (graded spectrum)
            or "form" (sampled sesquilinear form <x xi, epsilon xi>)
        rng: generator for the form test

    Returns:
        True if x is epsilon-positive within tol
    """
    if not is_hermitian(x, tol):
        return False
    threshold = -tol * (1.0 + op_norm(x.data))
    if method == "psd":
        return is_psd(x.epsilon @ x.data, tol)
    if method == "spectrum":
        return float(np.min(graded_spectrum(x, tol).real)) >= threshold
    if method == "form":
        return epsilon_form_minimum(x, rng) >= threshold
    raise UnknownKindError(f"unknown epsilon-positivity method {method!r}")


def iota(x: GradedMatrix) -> GradedMatrix:
    """x_0 + x_1 -> x_0 + i x_1."""
    even, odd = _parity_split(x)
    return x.with_data(even + 1j * odd)


def iota_inverse(y: GradedMatrix) -> GradedMatrix:
    even, odd = _parity_split(y)
    return y.with_data(even - 1j * odd)


def is_superpositive(x: GradedMatrix, tol: float = DEFAULT_TOL, method: str = "iota",
                     rng: Optional[np.random.Generator] = None) -> bool:
    """
    Hermitian with iota(x) positive semidefinite.

    method "sigma" tests x_0 + epsilon x_1 instead, "form" samples the
    sesquilinear form <x_0 xi, xi> + <x_1 xi, epsilon xi>.
    """
    if not is_hermitian(x, tol):
        return False
    if method == "iota":
        return is_psd(iota(x).data, tol)
    if method == "sigma":
        return is_psd(sigma_matrix(x), tol)
    if method == "form":
        return sigma_form_minimum(x, rng) >= -tol * (1.0 + op_norm(x.data))
    raise UnknownKindError(f"unknown superpositivity method {method!r}")


def graded_abs(x: GradedMatrix) -> GradedMatrix:
    """Superpositive square root of x* (twisted at -1) x."""
    y = iota(x).data
    return iota_inverse(x.with_data(sqrt_psd(dagger(y) @ y)))


def twisted_product(x: GradedMatrix, y: GradedMatrix, omega: complex) -> GradedMatrix:
    """x *_omega y = (x0 y0 + omega x1 y1) + (x0 y1 + x1 y0)."""
    _check_same_space(x, y)
    omega = _check_unit(omega)
    x0, x1 = _parity_split(x)
    y0, y1 = _parity_split(y)
    return x.with_data(x0 @ y0 + omega * (x1 @ y1) + x0 @ y1 + x1 @ y0)


def omega_angle(omega: complex) -> float:
    """Argument of omega in [0, 2 pi)."""
    theta = float(np.angle(_check_unit(omega))) % TWO_PI
    return 0.0 if theta >= TWO_PI else theta


def fiber_iso(x: GradedMatrix, omega: complex) -> GradedMatrix:
    """x_0 + sqrt(omega) x_1 with sqrt(e^{i theta}) = e^{i theta / 2}, theta in [0, 2 pi)."""
    root = np.exp(0.5j * omega_angle(omega))
    even, odd = _parity_split(x)
    return x.with_data(even + root * odd)


def standard_form_embed(a, b, tol: float = DEFAULT_TOL) -> GradedOperator:
    """The hermitian element [[a, i b], [i b, a]] on the (m, m) graded space."""
    a = as_complex_matrix(a, "a")
    b = as_complex_matrix(b, "b")
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"a and b must be square of equal size, got {a.shape}, {b.shape}")
    for name, m in (("a", a), ("b", b)):
        if max_entry_norm(m - dagger(m)) > tol:
            raise NotSelfAdjointError(f"{name} is not self-adjoint")
    m = a.shape[0]
    return GradedOperator(GradedDim(m, m), np.block([[a, 1j * b], [1j * b, a]]))


def swap_double(x, xstar) -> GradedOperator:
    """block-diag(x, xstar^dagger) on the swap-graded double of C^m."""
    x = as_complex_matrix(x, "x")
    xstar = as_complex_matrix(xstar, "xstar")
    if x.shape != xstar.shape or x.shape[0] != x.shape[1]:
        raise DimensionMismatchError(
            f"x and xstar must be square of equal size, got {x.shape}, {xstar.shape}"
        )
    return GradedOperator(GradedDim.swap(x.shape[0]), direct_sum(x, dagger(xstar)))


def kappa(dim: GradedDim, level: int = 1) -> np.ndarray:
    """Square root of the grading: P_+ + i P_-, so kappa^2 = epsilon."""
    plus = dim.even_projection(level)
    return plus + 1j * (np.eye(plus.shape[0]) - plus)


def kappa_conjugate(x: GradedMatrix) -> np.ndarray:
    """kappa x kappa; sends epsilon to the identity and is isometric."""
    k = kappa(x.base_dim, x.level)
    return k @ x.data @ k


def is_superunitary(x: GradedMatrix, tol: float = DEFAULT_TOL) -> bool:
    xs = superinvolve(x).data
    eye = np.eye(x.data.shape[0])
    return op_norm(x.data @ xs - eye) <= tol and op_norm(xs @ x.data - eye) <= tol


def is_pseudo_unitary(x: GradedMatrix, tol: float = DEFAULT_TOL) -> bool:
    """x^dagger epsilon x = epsilon and x epsilon x^dagger = epsilon."""
    eps = x.epsilon
    return (op_norm(dagger(x.data) @ eps @ x.data - eps) <= tol
            and op_norm(x.data @ eps @ dagger(x.data) - eps) <= tol)


@dataclass
class ContractionReport:
    """Outcome of scanning ||x - i t omega|| <= sqrt(1 + t^2) over a grid."""
    hermitian_contraction: bool
    grid_inequality: bool
    worst_t: float
    worst_margin: float

    @property
    def agrees(self) -> bool:
        return self.hermitian_contraction == self.grid_inequality


def contraction_report(x: GradedOperator, w: OmegaUnitary, t_grid: Iterable[float],
                       tol: float = DEFAULT_TOL) -> ContractionReport:
    t_values = [float(t) for t in t_grid]
    if not t_values:
        raise SuperopsError("t_grid must be nonempty")
    lhs = is_omega_hermitian(x, w, tol) and op_norm(x.data) <= 1.0 + tol
    om = w.matrix(x.level)
    worst_t, worst = t_values[0], np.inf
    for t in t_values:
        margin = np.sqrt(1.0 + t * t) - op_norm(x.data - 1j * t * om)
        if margin < worst:
            worst_t, worst = t, margin
    return ContractionReport(lhs, bool(worst >= -tol), worst_t, float(worst))


def contraction_criterion_check(x: GradedOperator, w: OmegaUnitary, t_grid: Iterable[float],
                                tol: float = DEFAULT_TOL) -> bool:
    """
    Agreement of "x is an omega-hermitian contraction" with the grid inequality
    ||x - i t omega|| <= sqrt(1 + t^2). A grid can refute but never prove the
    inequality for all t.
    """
    return contraction_report(x, w, t_grid, tol).agrees


def _frame_unitary(rng: np.random.Generator, signs: np.ndarray) -> np.ndarray:
    """Unitary commuting with diag(signs): independent Haar blocks per sign."""
    n = len(signs)
    u = np.zeros((n, n), dtype=complex)
    for sign in (1.0, -1.0):
        idx = np.flatnonzero(signs == sign)
        if len(idx):
            u[np.ix_(idx, idx)] = haar_unitary(rng, len(idx))
    return u


def _boosts(rng: np.random.Generator, signs: np.ndarray, max_rapidity: float) -> np.ndarray:
    plus = np.flatnonzero(signs > 0)
    minus = np.flatnonzero(signs < 0)
    b = np.eye(len(signs), dtype=complex)
    for i, j in zip(plus, minus):
        t = rng.uniform(-max_rapidity, max_rapidity)
        b[i, i] = b[j, j] = np.cosh(t)
        b[i, j] = b[j, i] = np.sinh(t)
    return b


def random_graded(kind: str, dim: GradedDim, seed: Union[int, np.random.Generator] = 0,
                  level: int = 1, max_rapidity: float = 1.5) -> GradedMatrix:
    """
    Deterministic pseudo-random graded operators of a given kind.

    Args:
        kind: one of generic, hermitian, eps_positive, superpositive,
            superunitary, even_unitary, twisted_unitary
        dim: graded space
        seed: integer seed or an existing generator
        level: amplification level; level 1 returns a GradedOperator
        max_rapidity: bound on the hyperbolic angles of superunitary samples

    Returns:
        A GradedOperator (level 1) or AmplifiedOperator
    """
    if kind not in RANDOM_KINDS:
        raise UnknownKindError(f"unknown random kind {kind!r}; expected one of {', '.join(RANDOM_KINDS)}")
    if isinstance(seed, np.random.Generator):
        rng = seed
    else:
        rng = derive_rng(seed, kind, dim.p, dim.q, dim.grading, level)
    shell = GradedOperator(dim, np.zeros((dim.total, dim.total))) if level == 1 else \
        AmplifiedOperator(level, dim, np.zeros((level * dim.total,) * 2))
    n = shell.data.shape[0]
    signs = dim.signs(level)
    frame = dim.frame(level)

    if kind == "generic":
        data = complex_gaussian(rng, (n, n))
    elif kind == "hermitian":
        z = shell.with_data(complex_gaussian(rng, (n, n)))
        data = (z.data + superinvolve(z).data) / 2
    elif kind == "eps_positive":
        b = complex_gaussian(rng, (n, n))
        data = shell.epsilon @ (b @ dagger(b)) / n
    elif kind == "superpositive":
        b = complex_gaussian(rng, (n, n))
        return iota_inverse(shell.with_data(b @ dagger(b) / n))
    elif kind == "even_unitary":
        data = frame @ _frame_unitary(rng, signs) @ dagger(frame)
    elif kind == "superunitary":
        core = _frame_unitary(rng, signs) @ _boosts(rng, signs, max_rapidity) @ _frame_unitary(rng, signs)
        data = frame @ core @ dagger(frame)
    else:
        return iota_inverse(shell.with_data(haar_unitary(rng, n)))
    return shell.with_data(data)


def direct_sum_graded(*xs: GradedMatrix) -> AmplifiedOperator:
    """Block-diagonal sum of amplified elements over the same base space."""
    base = xs[0].base_dim
    for x in xs[1:]:
        if x.base_dim != base:
            raise DimensionMismatchError("direct sum needs a common base space")
    return AmplifiedOperator(sum(x.level for x in xs), base, direct_sum(*(x.data for x in xs)))


def corner_embed(x: GradedMatrix) -> AmplifiedOperator:
    """[[0, x], [0, 0]] at twice the level of x."""
    zero = np.zeros_like(x.data)
    return AmplifiedOperator(2 * x.level, x.base_dim, np.block([[zero, x.data], [zero, zero]]))


def cross_embed(x: GradedMatrix) -> AmplifiedOperator:
    """[[0, x], [x, 0]] at twice the level of x."""
    zero = np.zeros_like(x.data)
    return AmplifiedOperator(2 * x.level, x.base_dim, np.block([[zero, x.data], [x.data, zero]]))


def scalar_compress(alpha: np.ndarray, x: GradedMatrix) -> AmplifiedOperator:
    """(alpha (x) I) x (alpha (x) I)^dagger for a scalar m x n matrix alpha."""
    alpha = np.asarray(alpha, dtype=complex)
    if alpha.ndim != 2 or alpha.shape[1] != x.level:
        raise DimensionMismatchError(f"scalar matrix {alpha.shape} does not act on level {x.level}")
    lift = np.kron(alpha, np.eye(x.base_dim.total))
    return AmplifiedOperator(alpha.shape[0], x.base_dim, lift @ x.data @ dagger(lift))


def cone_counterexample() -> GradedOperator:
    """[[1, 1], [-1, -1]] on (1, 1): epsilon-positive but not superpositive."""
    return GradedOperator(GradedDim(1, 1), [[1, 1], [-1, -1]])
