"""
Strong and sigma matrix norms.

Everything here reduces to the numerical radius w(M) = max over theta of
lambda_max((e^{i theta} M + e^{-i theta} M^dagger) / 2). The radius is
bracketed from below by an explicit witness vector and from above by the
polygon of supporting lines sampled so far.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eig
from scipy.optimize import minimize_scalar
from tqdm import tqdm

from .config import (
    DEFAULT_TOL,
    ConvergenceError,
    DimensionMismatchError,
    InputError,
    NormConfig,
    SearchConfig,
    UnknownKindError,
)
from .core import (
    TWO_PI,
    AmplifiedOperator,
    GradedMatrix,
    corner_embed,
    cross_embed,
    direct_sum_graded,
    iota,
    iota_inverse,
    is_hermitian,
    scalar_compress,
    sigma_matrix,
    superinvolve,
)
from .maps import LinearMapSpec
from .utils import (
    as_complex_matrix,
    dagger,
    derive_rng,
    haar_unitary,
    hermitian_part,
    op_norm,
    random_unit_vector,
)

logger = logging.getLogger(__name__)

ANGLE_SEPARATION = 1e-9
RADIUS_RESOLUTION = 1e3 * np.finfo(float).eps
NORMALITY_TOL = 1e-13
UNIMODULAR_TOL = 1e-7
LEVEL_ROUNDS = 8


@dataclass
class RadiusResult:
    """
    Numerical radius with its witness.

    `value` is |<M v, v>| for the returned unit vector v, so it is a certified
    lower bound; the true radius lies in [value, value + certified_error].
    """
    value: float
    maximizer_theta: float
    maximizer_vector: np.ndarray
    certified_error: float

    @property
    def upper(self) -> float:
        return self.value + self.certified_error


def _support(m: np.ndarray, theta: float) -> Tuple[float, np.ndarray]:
    h = (np.exp(1j * theta) * m + np.exp(-1j * theta) * dagger(m)) / 2
    lam, vec = np.linalg.eigh(h)
    return float(lam[-1]), vec[:, -1]


def _polygon_vertices(thetas: np.ndarray, heights: np.ndarray, points: np.ndarray) -> np.ndarray:
    """
    Moduli of the intersections of consecutive supporting lines Re(e^{i t} z) = h.

    Each line is anchored at its support point <Mv, v>, moved onto the line,
    and the intersection is reached by walking along the line.
    """
    rot = np.exp(1j * thetas)
    feet = points + (heights - np.real(rot * points)) * np.conj(rot)
    nxt_t = np.roll(thetas, -1)
    nxt_t[-1] += TWO_PI
    nxt_rot = np.exp(1j * nxt_t)
    nxt_h = np.roll(heights, -1)
    step = (nxt_h - np.real(nxt_rot * feet)) / -np.sin(nxt_t - thetas)
    return np.abs(feet + step * 1j * np.conj(rot))


def _spread(thetas: np.ndarray) -> np.ndarray:
    """Drop angles closer than ANGLE_SEPARATION to the previously kept one."""
    keep = [0]
    for k in range(1, len(thetas)):
        if thetas[k] - thetas[keep[-1]] >= ANGLE_SEPARATION:
            keep.append(k)
    while len(keep) > 1 and thetas[keep[0]] + TWO_PI - thetas[keep[-1]] < ANGLE_SEPARATION:
        keep.pop()
    return np.array(keep)


def _level_crossings(m: np.ndarray, level: float) -> np.ndarray:
    """
    Angles t with `level` an eigenvalue of (e^{it} M + e^{-it} M^dagger) / 2.

    These are the unimodular roots z = e^{it} of z^2 M - 2 level z I + M^dagger,
    found from its companion pencil. When some support value lies below `level`,
    no roots means the support function stays below `level` everywhere.
    """
    n = m.shape[0]
    eye = np.eye(n)
    zero = np.zeros((n, n))
    a = np.block([[zero, eye], [-dagger(m), 2 * level * eye]])
    b = np.block([[eye, zero], [zero, m]])
    z = eig(a, b, right=False)
    z = z[np.isfinite(z)]
    return np.sort(np.angle(z[np.abs(np.abs(z) - 1.0) < UNIMODULAR_TOL]) % TWO_PI)


def _normal_radius(m: np.ndarray) -> Optional[RadiusResult]:
    """Spectral radius shortcut for normal matrices."""
    scale = max(op_norm(m), 1.0)
    if op_norm(m @ dagger(m) - dagger(m) @ m) > NORMALITY_TOL * scale * scale:
        return None
    if op_norm(m - dagger(m)) <= NORMALITY_TOL * scale:
        lam, vec = np.linalg.eigh(hermitian_part(m))
        k = int(np.argmax(np.abs(lam)))
        v = vec[:, k]
    else:
        lam, vec = np.linalg.eig(m)
        k = int(np.argmax(np.abs(lam)))
        v = vec[:, k] / np.linalg.norm(vec[:, k])
    z = complex(np.vdot(v, m @ v))
    value = abs(z)
    return RadiusResult(value, float(-np.angle(z)) % TWO_PI if value else 0.0, v,
                        abs(float(np.max(np.abs(lam))) - value))


def numerical_radius(m, tol: float = 1e-10, config: Optional[NormConfig] = None) -> RadiusResult:
    """
    Numerical radius of a square complex matrix.

    A grid of supporting angles is refined by bounded Brent search around the
    three best grid points; then the angle at the outermost vertex of the
    supporting-line polygon is bisected until the polygon bound meets the
    witness value within tol. When the refinement budget runs out first (round
    fields of values do this), the level witness value + tol is certified
    directly by checking that no supporting angle reaches it.

    Tolerances finer than RADIUS_RESOLUTION * ||M|| cannot be certified in
    double precision and are raised to that floor.

    Args:
        m: square complex matrix
        tol: target gap between witness value and polygon bound
        config: grid and refinement budgets

    Returns:
        RadiusResult with certified_error <= tol

    Raises:
        ConvergenceError: the refinement budget ran out above tol
    """
    config = config or NormConfig()
    m = as_complex_matrix(m, "matrix")
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"numerical radius needs a square matrix, got {m.shape}")
    n = m.shape[0]
    if n == 0 or not np.any(m):
        vec = np.zeros(max(n, 1), dtype=complex)
        vec[0] = 1.0
        return RadiusResult(0.0, 0.0, vec[:n] if n else vec, 0.0)
    shortcut = _normal_radius(m)
    if shortcut is not None:
        return shortcut

    floor = RADIUS_RESOLUTION * op_norm(m)
    if tol < floor:
        logger.debug(f"numerical radius: tol {tol:.1e} raised to resolution floor {floor:.1e}")
        tol = floor

    samples: Dict[float, Tuple[float, complex, np.ndarray]] = {}
    best = {"value": -1.0, "theta": 0.0, "vec": None}

    def evaluate(theta: float) -> float:
        theta = float(theta) % TWO_PI
        if theta not in samples:
            h, v = _support(m, theta)
            point = complex(np.vdot(v, m @ v))
            samples[theta] = (h, point, v)
            if abs(point) > best["value"]:
                best.update(value=abs(point), theta=theta, vec=v)
        return samples[theta][0]

    grid = np.linspace(0.0, TWO_PI, config.radius_grid, endpoint=False)
    heights = np.array([evaluate(t) for t in grid])
    step = grid[1] - grid[0]
    for idx in np.argsort(-heights, kind="stable")[:3]:
        centre = grid[idx]
        res = minimize_scalar(lambda t: -evaluate(t), bounds=(centre - step, centre + step),
                              method="bounded", options={"xatol": 1e-12})
        evaluate(res.x)

    upper = np.inf
    for _ in range(config.radius_refinements + 1):
        thetas = np.array(sorted(samples))
        thetas = thetas[_spread(thetas)]
        hs = np.array([samples[t][0] for t in thetas])
        points = np.array([samples[t][1] for t in thetas])
        vertices = _polygon_vertices(thetas, hs, points)
        j = int(np.argmax(vertices))
        upper = float(vertices[j])
        if upper - best["value"] <= tol:
            break
        right = thetas[(j + 1) % len(thetas)] + (TWO_PI if j == len(thetas) - 1 else 0.0)
        if right - thetas[j] < 2 * ANGLE_SEPARATION:
            break
        evaluate((thetas[j] + right) / 2)
    gap = max(upper - best["value"], 0.0)
    for _ in range(LEVEL_ROUNDS):
        if gap <= tol:
            break
        level = best["value"] + tol
        crossings = _level_crossings(m, level)
        if not len(crossings):
            gap = tol
            break
        before = best["value"]
        for t in crossings:
            res = minimize_scalar(lambda s: -evaluate(s), bounds=(t - step, t + step),
                                  method="bounded", options={"xatol": 1e-12})
            evaluate(res.x)
        if best["value"] <= before:
            break
        gap = max(upper - best["value"], 0.0)
    if gap > tol:
        raise ConvergenceError(f"numerical radius gap {gap:.3e} above tol {tol:.1e} after "
                               f"{config.radius_refinements} refinements")
    return RadiusResult(float(best["value"]), float(best["theta"]), best["vec"], gap)


def operator_norm(x: GradedMatrix) -> float:
    return op_norm(x.data)


def strong_norm(x: GradedMatrix, tol: float = 1e-10, config: Optional[NormConfig] = None) -> RadiusResult:
    """sup |<x xi, epsilon xi>| = w(epsilon x)."""
    return numerical_radius(x.epsilon @ x.data, tol, config)


def sigma_strong_norm(x: GradedMatrix, tol: float = 1e-10,
                      config: Optional[NormConfig] = None) -> RadiusResult:
    """sup |<x_0 xi, xi> + <x_1 xi, epsilon xi>| = w(x_0 + epsilon x_1)."""
    return numerical_radius(sigma_matrix(x), tol, config)


def derived_matrix_norm(x: GradedMatrix, tol: float = 1e-10, config: Optional[NormConfig] = None) -> float:
    """2 * strong norm of [[0, x], [0, 0]]; agrees with the operator norm."""
    return 2.0 * strong_norm(corner_embed(x), tol, config).value


def derived_sigma_matrix_norm(x: GradedMatrix, tol: float = 1e-10,
                              config: Optional[NormConfig] = None) -> float:
    """2 * sigma-strong norm of [[0, x], [0, 0]]; agrees with ||iota(x)||."""
    return 2.0 * sigma_strong_norm(corner_embed(x), tol, config).value


def _omega_combination(x: GradedMatrix, omega: complex) -> GradedMatrix:
    return x.with_data(omega * x.data + np.conj(omega) * superinvolve(x).data)


def seminorm_p_omega(x: GradedMatrix, omega: complex, tol: float = 1e-10) -> float:
    """1/2 ||omega x + conj(omega) x*|| in the strong norm."""
    return 0.5 * strong_norm(_omega_combination(x, omega), tol).value


def seminorm_P_omega(x: GradedMatrix, omega: complex, tol: float = 1e-10) -> float:
    """1/2 ||omega x + conj(omega) x*|| in the operator norm."""
    return 0.5 * op_norm(_omega_combination(x, omega).data)


def _circle_sup(func, grid_size: int) -> float:
    if grid_size < 16:
        raise InputError("grid_size must be at least 16")
    grid = np.linspace(0.0, TWO_PI, grid_size, endpoint=False)
    values = np.array([func(np.exp(1j * t)) for t in grid])
    k = int(np.argmax(values))
    step = grid[1] - grid[0]
    res = minimize_scalar(lambda t: -func(np.exp(1j * t)), bounds=(grid[k] - step, grid[k] + step),
                          method="bounded", options={"xatol": 1e-12})
    return float(max(values[k], -res.fun))


def r_norm(x: GradedMatrix, grid_size: int = 128, tol: float = 1e-10) -> float:
    """
    sup over unimodular omega of p^omega(x).

    A grid lower bound refined locally; the grid error is at most ||x|| * delta / 2.
    """
    return _circle_sup(lambda w: seminorm_p_omega(x, w, tol), grid_size)


def R_norm(x: GradedMatrix, grid_size: int = 128, tol: float = 1e-10) -> float:
    """sup over unimodular omega of P^omega(x)."""
    return _circle_sup(lambda w: seminorm_P_omega(x, w, tol), grid_size)


@dataclass
class AxiomReport:
    """Worst margins per axiom; a margin below -tol is a failure."""
    margins: Dict[str, float]
    witnesses: Dict[str, int]
    tol: float
    checked: Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v >= -self.tol for v in self.margins.values())

    @property
    def worst_margin(self) -> float:
        return min(self.margins.values()) if self.margins else 0.0


def check_sigma_axioms(samples: Sequence[GradedMatrix], scalars: Sequence[np.ndarray],
                       tol: float = 1e-6, norm_tol: float = 1e-10,
                       hermitian_tol: float = DEFAULT_TOL) -> AxiomReport:
    """
    Check the strong-norm axioms on concrete samples.

    Covered: the direct-sum identity, the compression inequality
    ||alpha x alpha^*||^s <= ||alpha||^2 ||x||^s, the corner identity for
    hermitian x and the chain ||x||^s = ||diag(x, -x)||^s = ||[[0, x], [x, 0]]||^s <= ||x||.
    """
    margins: Dict[str, float] = {}
    witnesses: Dict[str, int] = {}
    checked: Dict[str, int] = {}

    def record(name: str, idx: int, margin: float):
        checked[name] = checked.get(name, 0) + 1
        if name not in margins or margin < margins[name]:
            margins[name] = float(margin)
            witnesses[name] = idx

    def s(y: GradedMatrix) -> float:
        return strong_norm(y, norm_tol).value

    strong = [s(x) for x in samples]
    for i, x in enumerate(samples):
        y_idx = (i + 1) % len(samples)
        y = samples[y_idx]
        if y.base_dim == x.base_dim:
            record("direct_sum", i, -abs(s(direct_sum_graded(x, y)) - max(strong[i], strong[y_idx])))
        minus = x.with_data(-x.data)
        diag = s(direct_sum_graded(x, minus))
        record("direct_sum", i, -abs(diag - strong[i]))
        for alpha in scalars:
            alpha = np.asarray(alpha, dtype=complex)
            if alpha.shape[1] != x.level:
                continue
            bound = op_norm(alpha) ** 2 * strong[i]
            record("compression", i, bound - s(scalar_compress(alpha, x)))
        corner = 2.0 * s(corner_embed(x))
        if is_hermitian(x, hermitian_tol):
            record("hermitian_corner", i, -abs(strong[i] - corner))
        record("chain_diagonal", i, -abs(diag - strong[i]))
        record("chain_cross", i, -abs(s(cross_embed(x)) - strong[i]))
        norm = op_norm(x.data)
        record("chain_bound", i, norm - strong[i])
        record("chain_corner", i, -abs(corner - norm))
    return AxiomReport(margins, witnesses, tol, checked)


@dataclass
class RscReport:
    """
    Outcome of a really-strongly-contractive search.

    The search can only refute: `proved` is always False and a passing report
    means no counterexample was found among the sampled instances.
    """
    instances: int
    witnessed: int
    worst_deficit: float
    worst_instance: int
    form: str
    signed: bool
    proved: bool = False

    @property
    def witnessed_fraction(self) -> float:
        return self.witnessed / self.instances if self.instances else 1.0

    @property
    def passed(self) -> bool:
        return self.witnessed == self.instances


def _form_matrix(x: np.ndarray, dims, form: str) -> np.ndarray:
    shell = AmplifiedOperator(1, dims, x)
    if form == "strong":
        return shell.epsilon @ x
    if form == "sigma":
        return sigma_matrix(shell)
    raise UnknownKindError(f"unknown form {form!r}; expected strong or sigma")


def _score(alpha: complex, beta: complex, signed: bool) -> Tuple[float, int]:
    terms = [abs(alpha) - abs(beta)]
    if signed:
        terms.append(np.sign(beta.real) * alpha.real - abs(beta.real))
    else:
        terms.append(abs(alpha.real) - abs(beta.real))
    k = int(np.argmin(terms))
    return float(terms[k]), k


def _search_xi(a: np.ndarray, beta: complex, eta: Optional[np.ndarray], budget: int, signed: bool,
               angles: int, step0: float, rng: np.random.Generator, tol: float) -> float:
    """Best score min(|alpha| - |beta|, |Re alpha| - |Re beta|) over unit xi."""
    candidates: List[np.ndarray] = []
    if eta is not None:
        candidates.append(eta)
    for theta in np.linspace(0.0, TWO_PI, angles, endpoint=False):
        candidates.append(_support(a, theta)[1])
    candidates.append(random_unit_vector(rng, a.shape[0]))
    evals = 0
    scored = []
    for v in candidates:
        sc, k = _score(complex(np.vdot(v, a @ v)), beta, signed)
        evals += 1
        scored.append((sc, k, v))
        if sc >= 0.0:
            return sc
    scored.sort(key=lambda item: -item[0])
    best = scored[0][0]
    for sc, k, v in scored[:3]:
        step = step0
        while evals < budget and step > 1e-10:
            alpha = complex(np.vdot(v, a @ v))
            if k == 0:
                c = np.conj(alpha) / abs(alpha) if abs(alpha) > 0 else 1.0
            elif signed:
                c = np.sign(beta.real) or 1.0
            else:
                c = np.sign(alpha.real) or 1.0
            grad = 2.0 * hermitian_part(c * a) @ v
            trial = v + step * grad
            trial /= np.linalg.norm(trial)
            new, new_k = _score(complex(np.vdot(trial, a @ trial)), beta, signed)
            evals += 1
            if new > sc:
                v, sc, k = trial, new, new_k
                step *= 1.5
            else:
                step *= 0.5
            if sc >= 0.0:
                return sc
        best = max(best, sc)
        if best >= -tol:
            break
    return best


def rsc_check(phi: LinearMapSpec, num_eta: int = 200, xi_budget: int = 200, seed: int = 0,
              tol: float = 1e-7, form: str = "strong", signed: bool = False,
              extra_instances: Sequence[Tuple[np.ndarray, np.ndarray]] = (),
              search: Optional[SearchConfig] = None) -> RscReport:
    """
    Search for counterexamples to the really strongly contractive condition.

    For each instance (x, eta) with x in the test subspace and eta a unit
    vector of the codomain, look for a unit xi with |alpha| >= |beta| and
    |Re alpha| >= |Re beta| (alpha = <x xi, eps xi>, beta = <phi(x) eta, eps eta>).
    form="sigma" uses the sigma forms instead; signed=True also demands that
    Re alpha and Re beta have the same sign.

    Args:
        phi: the map, with its test subspace
        num_eta: number of sampled (x, eta) instances
        xi_budget: form evaluations per instance
        seed: seed of the sampler
        tol: slack on the inequalities
        form: "strong" or "sigma"
        signed: check the signed variant
        extra_instances: (x, eta) pairs always evaluated before the sampled ones
        search: angle and step settings

    Returns:
        RscReport
    """
    search = search or SearchConfig(num_eta=max(num_eta, 1), xi_budget=max(xi_budget, 1))
    basis = phi.test_subspace()
    if not basis:
        raise InputError("empty domain basis")
    same_space = phi.domain_dims.total == phi.codomain_dims.total
    instances = list(extra_instances)
    for k in range(num_eta):
        rng = derive_rng(seed, "rsc-instance", k)
        x = phi.random_element(rng, basis)
        x = x / max(op_norm(x), 1e-300)
        instances.append((x, random_unit_vector(rng, phi.codomain_dims.total)))

    witnessed, worst, worst_idx = 0, np.inf, -1
    for idx, (x, eta) in enumerate(instances):
        a = _form_matrix(np.asarray(x, dtype=complex), phi.domain_dims, form)
        b = _form_matrix(phi.apply(x), phi.codomain_dims, form)
        beta = complex(np.vdot(eta, b @ eta))
        score = _search_xi(a, beta, eta if same_space else None, xi_budget, signed,
                           search.radius_angles, search.step, derive_rng(seed, "rsc-search", idx), tol)
        if score >= -tol:
            witnessed += 1
        if score < worst:
            worst, worst_idx = score, idx
    logger.info(f"rsc_check {phi.name}: {witnessed}/{len(instances)} witnessed, worst {worst:.4g}")
    return RscReport(len(instances), witnessed, float(min(worst, 0.0)), worst_idx, form, signed)


@dataclass
class ContractivityReport:
    """Sampled check of ||phi_n(x)|| <= 1 over hermitian x with ||x|| <= 1."""
    level: int
    samples: int
    violations: int
    worst_margin: float
    worst_sample: int
    form: str

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _reflection(rng: np.random.Generator, n: int) -> np.ndarray:
    """Self-adjoint unitary V diag(+-1) V^dagger."""
    v = haar_unitary(rng, n)
    signs = rng.choice([-1.0, 1.0], size=n)
    return (v * signs) @ dagger(v)


def hermitian_contractive_check(phi: LinearMapSpec, level: int = 1, num_samples: int = 1000,
                                seed: int = 0, tol: float = 1e-7,
                                extra_samples: Sequence[GradedMatrix] = (), form: str = "operator",
                                progress: bool = False) -> ContractivityReport:
    """
    Sample hermitian contractions and test that their images are contractions.

    With form="operator" samples are hermitian x with ||x|| <= 1 and the test is
    ||phi_n(x)|| <= 1 + tol. With form="sigma" the samples have ||iota(x)|| <= 1
    and the test is ||iota(phi_n(x))|| <= 1 + tol. Half of the samples are
    extreme points (epsilon times a self-adjoint unitary, or the iota preimage
    of one) when the domain is the full matrix space.
    """
    if level < 1 or level > 4:
        raise InputError("level must be between 1 and 4")
    if form not in ("operator", "sigma"):
        raise UnknownKindError(f"unknown form {form!r}; expected operator or sigma")

    def size(y: GradedMatrix) -> float:
        return op_norm(iota(y).data) if form == "sigma" else op_norm(y.data)

    samples: List[GradedMatrix] = list(extra_samples)
    n = level * phi.domain_dims.total
    for k in range(num_samples):
        rng = derive_rng(seed, "hermitian-sample", level, k)
        if phi.is_full and k % 2 == 0:
            shell = AmplifiedOperator(level, phi.domain_dims, np.zeros((n, n)))
            s = _reflection(rng, n)
            x = shell.with_data(shell.epsilon @ s) if form == "operator" else iota_inverse(shell.with_data(s))
        else:
            x = phi.random_hermitian(rng, level)
            x = x.with_data(x.data / max(size(x), 1e-300))
        samples.append(x)

    violations, worst, worst_idx = 0, np.inf, -1
    for idx, x in enumerate(tqdm(samples, desc=f"{phi.name} level {level}", disable=not progress)):
        image = phi.apply_level(x)
        margin = 1.0 - size(image)
        if margin < -tol:
            violations += 1
        if margin < worst:
            worst, worst_idx = margin, idx
    logger.info(f"hermitian_contractive_check {phi.name} level {level}: {violations} violations")
    return ContractivityReport(level, len(samples), violations, float(worst), worst_idx, form)

