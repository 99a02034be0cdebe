"""
Seeded verification suites.

Each property draws its samples from generators derived from
(seed, suite, property, index), so results do not depend on the order in
which properties run and `--jobs` never changes the output.
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from .config import SUITES, ComputationError, SearchConfig, SuiteConfig
from .core import (
    AmplifiedOperator,
    GradedDim,
    GradedOperator,
    OmegaUnitary,
    cone_counterexample,
    even_part,
    fiber_iso,
    graded_abs,
    graded_spectrum,
    iota,
    iota_inverse,
    is_epsilon_positive,
    is_hermitian,
    is_superpositive,
    is_superunitary,
    kappa_conjugate,
    contraction_report,
    odd_part,
    omega_involve,
    random_graded,
    standard_form_embed,
    superinvolve,
    swap_double,
    twisted_product,
)
from .group import (
    CyclicGroupElement,
    delta_k_element,
    delta_k_norm,
    dft_norm,
    dual_involution,
    dual_involution_check,
    norm_sequence,
    regular_rep,
)
from .maps import (
    corner_projection,
    corner_projection_witnesses,
    diagonal_averaging,
    diagonal_averaging_witnesses,
    identity_map,
    scaling_map,
)
from .norms import (
    R_norm,
    check_sigma_axioms,
    derived_matrix_norm,
    derived_sigma_matrix_norm,
    hermitian_contractive_check,
    numerical_radius,
    r_norm,
    rsc_check,
    seminorm_p_omega,
    sigma_strong_norm,
    strong_norm,
)
from .tensor import (
    STAR_MODES,
    TensorElement,
    dual_symmetrized_haagerup,
    finite_dim_cstar_tensor,
    haagerup_norm,
    injective_norm,
    kron_matrix,
    projective_norm,
    star_tensor,
    symmetrized_haagerup,
)
from .utils import (
    complex_gaussian,
    dagger,
    derive_rng,
    max_entry_norm,
    op_norm,
    random_self_adjoint,
)

logger = logging.getLogger(__name__)

CONTRACTION_T_GRID = np.linspace(-10.0, 10.0, 41)
SUPERUNITARY_RAPIDITY = 1.5


@dataclass
class PropertyResult:
    """Outcome of one property: pass/fail and the worst margin (negative means violated)."""
    suite: str
    name: str
    passed: bool
    checked: int
    worst_margin: Optional[float]
    detail: str = ""

    def to_dict(self) -> dict:
        margin = self.worst_margin
        if margin is not None and not math.isfinite(margin):
            margin = None
        return {"suite": self.suite, "property": self.name, "passed": self.passed,
                "checked": self.checked, "worst_margin": margin, "detail": self.detail}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class Margins:
    """Running minimum of margins; a property passes when every margin is >= 0."""

    def __init__(self, suite: str, name: str):
        self.suite = suite
        self.name = name
        self.worst = math.inf
        self.count = 0
        self.notes: List[str] = []

    def add(self, margin: float, note: str = ""):
        self.count += 1
        margin = float(margin)
        if margin < 0 and note and len(self.notes) < 3:
            self.notes.append(note)
        self.worst = min(self.worst, margin)

    def flag(self, ok: bool, note: str = ""):
        self.add(0.0 if ok else -1.0, note)

    def result(self, detail: str = "") -> PropertyResult:
        notes = "; ".join(self.notes)
        text = "; ".join(part for part in (detail, notes) if part)
        return PropertyResult(self.suite, self.name, self.worst >= 0.0, self.count,
                              self.worst if self.count else None, text)


def _random_dim(rng: np.random.Generator, max_each: int = 3, allow_swap: bool = True) -> GradedDim:
    while True:
        p, q = (int(v) for v in rng.integers(0, max_each + 1, size=2))
        if p + q:
            break
    if allow_swap and p == q and rng.random() < 0.5:
        return GradedDim.swap(p)
    return GradedDim(p, q)


def _op(p: int, q: int, rows) -> GradedOperator:
    return GradedOperator(GradedDim(p, q), rows)


# core

def core_iota_isomorphism(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("core", "iota_isomorphism")
    for i in range(cfg.samples):
        rng = derive_rng(cfg.seed, "core", "iota", i)
        dim = _random_dim(rng, 4)
        x = random_graded("generic", dim, rng)
        y = random_graded("generic", dim, rng)
        scale = 1.0 + op_norm(x.data) * op_norm(y.data)
        lhs = iota(twisted_product(x, y, -1.0)).data
        m.add(1e-12 * scale - max_entry_norm(lhs - iota(x).data @ iota(y).data), f"product sample {i}")
        star = iota(superinvolve(x)).data
        m.add(1e-12 * (1.0 + op_norm(x.data)) - max_entry_norm(star - dagger(iota(x).data)),
              f"involution sample {i}")
    return m.result()


def core_norm_estimate(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("core", "iota_norm_estimate")
    for i in range(cfg.samples):
        rng = derive_rng(cfg.seed, "core", "norm-estimate", i)
        x = random_graded("generic", _random_dim(rng, 4), rng)
        nx, ni = op_norm(x.data), op_norm(iota(x).data)
        m.add(ni - 0.5 * nx + 1e-10, f"sample {i}")
        m.add(2.0 * nx - ni + 1e-10, f"sample {i}")
    return m.result()


def core_contraction_criterion(cfg: SuiteConfig) -> PropertyResult:
    """Grid scan agrees with omega-hermitian contractivity on both sides."""
    m = Margins("core", "contraction_criterion")
    for i in range(cfg.samples):
        rng = derive_rng(cfg.seed, "core", "contraction", i)
        dim = _random_dim(rng, 3)
        w = OmegaUnitary(dim, np.exp(2j * np.pi * rng.random()), np.exp(2j * np.pi * rng.random()))
        om = w.matrix()
        h = random_self_adjoint(rng, dim.total)
        h = h / op_norm(h)
        contraction = GradedOperator(dim, om @ (h * rng.uniform(0.1, 1.0)))
        report = contraction_report(contraction, w, CONTRACTION_T_GRID)
        m.flag(report.hermitian_contraction and report.grid_inequality, f"contraction {i}")

        if i % 2 == 0:
            b = complex_gaussian(rng, (dim.total, dim.total))
            k = b @ dagger(b)
            k = k / op_norm(k)
            y = h + 1j * k
            bad = GradedOperator(dim, om @ (y / op_norm(y)))
        else:
            bad = GradedOperator(dim, 1.5 * (om @ h))
        report = contraction_report(bad, w, CONTRACTION_T_GRID)
        m.flag(not report.hermitian_contraction and not report.grid_inequality, f"non-example {i}")
    return m.result()


def core_cone_separation(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("core", "cone_separation")
    x = cone_counterexample()
    m.flag(is_epsilon_positive(x, cfg.tol), "eps-positivity")
    m.flag(not is_superpositive(x, cfg.tol), "superpositivity")
    m.add(1e-10 - np.max(np.abs(graded_spectrum(x) - np.array([0.0, 2.0]))), "graded spectrum")
    m.add(1e-9 - max_entry_norm(graded_abs(x).data - np.sqrt(2.0) * np.eye(2)), "graded abs")
    return m.result()


def core_superunitary(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("core", "superunitary_sampling")
    for i in range(cfg.samples):
        rng = derive_rng(cfg.seed, "core", "superunitary", i)
        dim = _random_dim(rng, 3)
        u = random_graded("superunitary", dim, rng, max_rapidity=SUPERUNITARY_RAPIDITY)
        m.flag(is_superunitary(u, cfg.tol * 10), f"superunitary {i}")
        norm = op_norm(u.data)
        m.add(norm - (1.0 - 1e-12), f"norm {i}")
        m.add(np.exp(SUPERUNITARY_RAPIDITY) + 1e-9 - norm, f"rapidity cap {i}")
        if dim.p and dim.q:
            # boosted samples are not unitary
            m.add(norm - 1.0 - 1e-9, f"boosted {i}")
        e = random_graded("even_unitary", dim, rng)
        m.flag(is_superunitary(e, cfg.tol), f"even unitary {i}")
        m.add(1e-9 - abs(op_norm(e.data) - 1.0), f"even norm {i}")
        t = random_graded("twisted_unitary", dim, rng)
        m.add(1e-9 - max_entry_norm(graded_abs(t).data - np.eye(dim.total)), f"twisted abs {i}")
    return m.result()


def core_positivity_agreement(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("core", "positivity_methods_agree")
    kinds = ("eps_positive", "hermitian", "superpositive")
    for i in range(cfg.samples):
        rng = derive_rng(cfg.seed, "core", "positivity", i)
        x = random_graded(kinds[i % 3], _random_dim(rng, 3), rng)
        eps = [is_epsilon_positive(x, cfg.tol, method) for method in ("psd", "spectrum")]
        eps.append(is_epsilon_positive(x, cfg.tol, "form", derive_rng(cfg.seed, "form", i)))
        sup = [is_superpositive(x, cfg.tol, method) for method in ("iota", "sigma")]
        sup.append(is_superpositive(x, cfg.tol, "form", derive_rng(cfg.seed, "form", i)))
        m.flag(len(set(eps)) == 1, f"eps sample {i}")
        m.flag(len(set(sup)) == 1, f"super sample {i}")
    return m.result()


def core_golden(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("core", "golden_examples")

    def close(a, b, tol=1e-12) -> bool:
        return max_entry_norm(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)) <= tol

    x = cone_counterexample()
    nil = _op(1, 1, [[0, 1], [0, 0]])
    flip = _op(1, 1, [[0, 1], [1, 0]])
    one = GradedOperator.identity(GradedDim(1, 1))
    eps = GradedOperator.grading_operator(GradedDim(1, 1))
    m.flag(close(superinvolve(one).data, np.eye(2)), "superinvolve identity")
    m.flag(close(superinvolve(x).data, x.data), "superinvolve counterexample")
    m.flag(close(superinvolve(nil).data, [[0, 0], [-1, 0]]), "superinvolve nilpotent")
    twisted = omega_involve(flip, OmegaUnitary(flip.dim, 1, 1j)).data
    m.flag(close(twisted, [[0, 1j], [1j, 0]]), "omega involve")
    m.flag(close(even_part(x).data, [[1, 0], [0, -1]]) and close(odd_part(x).data, [[0, 1], [-1, 0]]),
           "parity parts")
    m.flag(is_hermitian(x) and not is_hermitian(nil), "hermitian examples")
    m.flag(is_hermitian(standard_form_embed([[0.3]], [[0.7]])), "standard form hermitian")
    m.flag(close(graded_spectrum(eps), [1, 1]), "graded spectrum of epsilon")
    m.flag(close(graded_spectrum(_op(1, 1, [[0, 1j], [1j, 0]])), [-1, 1], 1e-12), "standard form spectrum")
    m.flag(is_epsilon_positive(eps) and not is_epsilon_positive(eps.with_data(-eps.data)), "eps positivity")
    m.flag(close(iota(x).data, [[1, 1j], [-1j, -1]]), "iota counterexample")
    m.flag(close(iota(_op(1, 1, [[0, -1j], [-1j, 0]])).data, [[0, 1], [1, 0]]), "iota odd")
    m.flag(is_superpositive(one) and is_superpositive(iota_inverse(_op(1, 1, [[2, 0], [0, 0.5]]))),
           "superpositive examples")
    m.flag(close(twisted_product(flip, flip, -1).data, -np.eye(2)), "twisted product")
    m.flag(close(fiber_iso(x, -1).data, iota(x).data, 1e-12), "fiber iso at -1")
    m.flag(close(fiber_iso(x, np.exp(-1e-9j)).data, x.data - 2 * odd_part(x).data, 1e-8), "holonomy")
    double = swap_double([[0, 1], [0, 0]], [[0, 0], [1, 0]])
    expected = swap_double([[0, 0], [1, 0]], [[0, 1], [0, 0]]).data
    m.flag(close(superinvolve(double).data, expected), "swap double")
    m.flag(close(kappa_conjugate(eps), np.eye(2)), "kappa conjugate")
    t = 0.7
    boost = _op(1, 1, [[np.cosh(t), np.sinh(t)], [np.sinh(t), np.cosh(t)]])
    m.flag(is_superunitary(boost) and abs(op_norm(boost.data) - np.exp(t)) < 1e-12, "boost")
    m.flag(not is_superunitary(flip), "flip is not superunitary")
    w = OmegaUnitary.grading(GradedDim(1, 1))
    m.flag(contraction_report(eps, w, CONTRACTION_T_GRID).agrees, "grading operator criterion")
    m.flag(is_hermitian(random_graded("hermitian", GradedDim(2, 2), 42)), "random hermitian")
    m.flag(is_superpositive(random_graded("superpositive", GradedDim(1, 1), 7)), "random superpositive")
    m.flag(close(random_graded("generic", GradedDim(2, 1), 3).data,
                 random_graded("generic", GradedDim(2, 1), 3).data, 0.0), "determinism")
    return m.result()


# norms

def _graded_sample(rng: np.random.Generator, kind: str, max_each: int = 3, level: int = 1):
    return random_graded(kind, _random_dim(rng, max_each), rng, level=level)


def norms_radius_invariants(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("norms", "numerical_radius_invariants")
    for i in range(cfg.samples):
        rng = derive_rng(cfg.seed, "norms", "radius", i)
        dim = _random_dim(rng, 3)
        mat = complex_gaussian(rng, (dim.total, dim.total))
        u = random_graded("even_unitary", dim, rng).data
        result = numerical_radius(mat)
        w = result.value
        norm = op_norm(mat)
        m.add(1e-10 - result.certified_error, f"certified {i}")
        slack = 1e-7 * (1.0 + norm)
        m.add(slack - abs(numerical_radius(u @ mat @ dagger(u)).value - w), f"conjugation {i}")
        m.add(slack - abs(numerical_radius(dagger(mat)).value - w), f"adjoint {i}")
        m.add(norm - w + 1e-12, f"upper {i}")
        m.add(2.0 * w - norm + slack, f"lower {i}")
    return m.result()


def norms_strong_hermitian(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("norms", "strong_norm_of_hermitian")
    for i in range(cfg.samples):
        x = _graded_sample(derive_rng(cfg.seed, "norms", "hermitian", i), "hermitian")
        m.add(1e-6 - abs(strong_norm(x).value - op_norm(x.data)), f"sample {i}")
    return m.result()


def norms_sigma_identity(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("norms", "sigma_identity")
    for i in range(cfg.samples):
        x = _graded_sample(derive_rng(cfg.seed, "norms", "sigma", i), "generic")
        m.add(1e-6 - abs(sigma_strong_norm(x).value - numerical_radius(iota(x).data).value), f"sample {i}")
    return m.result()


def norms_involution_isometry(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("norms", "involution_isometry")
    for i in range(cfg.samples):
        x = _graded_sample(derive_rng(cfg.seed, "norms", "isometry", i), "generic")
        xs = superinvolve(x)
        m.add(1e-7 - abs(strong_norm(xs).value - strong_norm(x).value), f"strong {i}")
        m.add(1e-7 - abs(sigma_strong_norm(xs).value - sigma_strong_norm(x).value), f"sigma {i}")
    return m.result()


def norms_derived(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("norms", "derived_matrix_norms")
    for i in range(cfg.samples):
        rng = derive_rng(cfg.seed, "norms", "derived", i)
        x = _graded_sample(rng, "generic", level=1 + i % 2)
        m.add(1e-5 - abs(derived_matrix_norm(x) - op_norm(x.data)), f"derived {i}")
        m.add(1e-5 - abs(derived_sigma_matrix_norm(x) - op_norm(iota(x).data)), f"derived sigma {i}")
    return m.result()


def norms_sigma_axioms(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("norms", "strong_norm_axioms")
    batches = max(1, cfg.samples // 4)
    for i in range(batches):
        rng = derive_rng(cfg.seed, "norms", "axioms", i)
        dim = _random_dim(rng, 3)
        samples = [random_graded(kind, dim, rng, level=level)
                   for level in (1, 2) for kind in ("hermitian", "generic")]
        row = complex_gaussian(rng, (1, 2))
        scalars = [np.array([[1.0]]), complex_gaussian(rng, (2, 1)),
                   row / np.linalg.norm(row), complex_gaussian(rng, (3, 2))]
        report = check_sigma_axioms(samples, scalars)
        for name, margin in report.margins.items():
            m.add(margin + report.tol, f"{name} batch {i}")
    return m.result()


def norms_omega_seminorms(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("norms", "omega_seminorms")
    for i in range(min(cfg.samples, 20)):
        rng = derive_rng(cfg.seed, "norms", "omega", i)
        x = _graded_sample(rng, "generic", 2)
        s = strong_norm(x).value
        m.add(1e-6 - abs(r_norm(x) - s), f"r sample {i}")
        m.add(1e-6 - abs(R_norm(x) - s), f"R sample {i}")
    nil = _op(1, 1, [[0, 1], [0, 0]])
    m.add(1e-6 - abs(R_norm(nil) - strong_norm(nil).value), "nilpotent")
    h = random_graded("hermitian", GradedDim(2, 1), cfg.seed)
    m.add(1e-9 - abs(seminorm_p_omega(h, 1.0) - op_norm(h.data)), "hermitian p")
    z = random_graded("generic", GradedDim(2, 1), cfg.seed)
    skew = z.with_data(z.data - superinvolve(z).data)
    m.add(1e-9 - seminorm_p_omega(skew, 1.0), "skew p")
    return m.result()


@dataclass
class ContractivityCase:
    """A map together with the contractivity verdicts it is expected to produce."""
    name: str
    build: Callable
    violation_levels: Tuple[int, ...]
    clean_levels: Tuple[int, ...]
    rsc_fails: Optional[bool]
    witnesses: Optional[Callable] = None


def _contractivity_cases() -> List[ContractivityCase]:
    cases = [
        ContractivityCase("identity_m3", lambda: identity_map(GradedDim(3, 0)), (), (1, 2), False),
        ContractivityCase("graded_identity_2_1", lambda: identity_map(GradedDim(2, 1)), (), (1, 2), False),
        ContractivityCase("scaling_m2", lambda: scaling_map(GradedDim(2, 0)), (1,), (), None),
    ]
    for m in (2, 3, 4):
        cases.append(ContractivityCase(f"corner_projection_m{m}", lambda m=m: corner_projection(m),
                                       (1, 2), (), True, lambda m=m: corner_projection_witnesses(m)))
    cases.append(ContractivityCase("diagonal_averaging_m2", lambda: diagonal_averaging(2), (2,), (1,), None,
                                   lambda: diagonal_averaging_witnesses(2)))
    for m in (3, 4):
        cases.append(ContractivityCase(f"diagonal_averaging_m{m}", lambda m=m: diagonal_averaging(m),
                                       (1, 2), (), True, lambda m=m: diagonal_averaging_witnesses(m)))
    return cases


def _lift(x: AmplifiedOperator, level: int) -> AmplifiedOperator:
    """Embed a level-k element as the top-left corner of level `level`."""
    if x.level == level:
        return x
    d = x.base_dim.total
    data = np.zeros((level * d, level * d), dtype=complex)
    data[:x.data.shape[0], :x.data.shape[1]] = x.data
    return AmplifiedOperator(level, x.base_dim, data)


def _contractivity_property(case: ContractivityCase, cfg: SuiteConfig) -> PropertyResult:
    """
    Reproduce the established verdicts for one map.

    A level listed in violation_levels must show a violation, a level in
    clean_levels must show none, and the really strongly contractive search
    must fail exactly when rsc_fails is True (None leaves it unasserted).
    """
    m = Margins("norms", f"contractivity_{case.name}")
    phi = case.build()
    witnesses = case.witnesses() if case.witnesses else None
    search = SearchConfig(num_eta=max(cfg.samples, 100), xi_budget=200)
    parts = []
    for level in sorted(set(case.violation_levels) | set(case.clean_levels)):
        extra = []
        if witnesses is not None:
            extra = [_lift(x, level) for lvl, x in witnesses.hermitian.items() if lvl <= level]
        report = hermitian_contractive_check(phi, level, 10 * cfg.samples, cfg.seed, 1e-7, extra,
                                             progress=cfg.progress)
        expect_violation = level in case.violation_levels
        m.flag(report.passed != expect_violation, f"level {level} violations {report.violations}")
        parts.append(f"level {level}: {report.violations}/{report.samples} violations, "
                     f"worst margin {report.worst_margin:.4f}")
    rsc = rsc_check(phi, search.num_eta, search.xi_budget, cfg.seed,
                    extra_instances=witnesses.rsc if witnesses else (), search=search)
    parts.append(f"rsc witnessed fraction {rsc.witnessed_fraction:.4f}")
    if case.rsc_fails is not None:
        m.flag(rsc.passed != case.rsc_fails, "rsc verdict")
    return m.result(", ".join(parts))


def norms_golden(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("norms", "golden_examples")
    x = cone_counterexample()
    m.add(1e-9 - abs(numerical_radius([[0, 1], [0, 0]]).value - 0.5), "nilpotent radius")
    m.add(1e-12 - abs(numerical_radius(np.eye(3)).value - 1.0), "identity radius")
    m.add(1e-12 - abs(numerical_radius(np.diag([3.0, -1.0])).value - 3.0), "diagonal radius")
    m.add(1e-6 - abs(strong_norm(x).value - 2.0), "strong counterexample")
    m.add(1e-9 - abs(strong_norm(_op(1, 1, [[0, 1], [1, 0]])).value - 1.0), "strong odd")
    m.add(1e-6 - abs(sigma_strong_norm(x).value - np.sqrt(2.0)), "sigma counterexample")
    m.add(1e-9 - abs(derived_matrix_norm(_op(1, 1, [[0, 1], [0, 0]])) - 1.0), "derived nilpotent")
    m.add(1e-6 - abs(derived_matrix_norm(x) - 2.0), "derived counterexample")
    even = _op(1, 1, [[2, 0], [0, -1j]])
    m.add(1e-9 - abs(strong_norm(even).value - 2.0), "strong even")
    m.add(1e-9 - abs(sigma_strong_norm(even).value - strong_norm(even).value), "sigma even")
    m.add(-sigma_strong_norm(_op(1, 1, np.zeros((2, 2)))).value, "sigma zero")
    m.add(1e-9 - abs(derived_matrix_norm(_op(1, 1, np.eye(2))) - 1.0), "derived identity")
    return m.result()


# tensor

def _random_tensor(rng: np.random.Generator, a: int = 2, b: int = 2, rank: int = 2,
                   level: int = 1, graded: bool = False) -> TensorElement:
    factors = [(complex_gaussian(rng, (level * a, a)), complex_gaussian(rng, (b, level * b)))
               for _ in range(rank)]
    if not graded:
        return TensorElement(a, b, factors, level)
    pa, pb = int(rng.integers(0, a + 1)), int(rng.integers(0, b + 1))
    return TensorElement(a, b, factors, level, GradedDim(pa, a - pa), GradedDim(pb, b - pb))


def _units_tensor(n: int, reverse: bool = False) -> TensorElement:
    def e(i, j):
        u = np.zeros((n, n))
        u[i, j] = 1.0
        return u
    pairs = [(e(0, i), e(i, 0)) if reverse else (e(i, 0), e(0, i)) for i in range(n)]
    return TensorElement(n, n, pairs, 1, GradedDim(n, 0), GradedDim(n, 0))


def tensor_norm_ordering(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("tensor", "norm_ordering")
    for i in range(min(cfg.samples, 100)):
        rng = derive_rng(cfg.seed, "tensor", "ordering", i)
        t = _random_tensor(rng, 2, 2, 2 + i % 2)
        inj = injective_norm(t)
        hb = haagerup_norm(t, cfg.optimizer)
        pb = projective_norm(t, cfg.optimizer)
        slack = 1e-5 * (1.0 + inj)
        m.add(hb.upper - inj + slack, f"injective {i}")
        m.add(hb.upper - hb.lower + 1e-12, f"bracket {i}")
        m.add(pb.upper - hb.upper + slack, f"projective {i}")
    return m.result()


def tensor_exact_instances(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("tensor", "exact_instances")
    rng = derive_rng(cfg.seed, "tensor", "exact")
    for i in range(3):
        a, b = complex_gaussian(rng, (2, 2)), complex_gaussian(rng, (3, 3))
        t = TensorElement.elementary(a, b)
        expected = op_norm(a) * op_norm(b)
        m.add(1e-9 * (1 + expected) - abs(injective_norm(t) - expected), f"injective elementary {i}")
        for name, fn in (("haagerup", haagerup_norm), ("projective", projective_norm)):
            bracket = fn(t, cfg.optimizer)
            m.add(1e-6 * (1 + expected) - max(abs(bracket.lower - expected), abs(bracket.upper - expected)),
                  f"{name} elementary {i}")
    for n in (2, 3):
        bracket = haagerup_norm(_units_tensor(n), cfg.optimizer)
        m.add(1e-6 - max(abs(bracket.lower - 1.0), abs(bracket.upper - 1.0)), f"row-column units n={n}")
    e11, e22 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    bracket = haagerup_norm(TensorElement(2, 2, [(e11, e11), (e22, e22)]), cfg.optimizer)
    m.add(1e-6 - max(abs(bracket.lower - 1.0), abs(bracket.upper - 1.0)), "diagonal units")
    one = TensorElement.elementary(np.eye(2), np.eye(2))
    m.add(1e-9 - abs(projective_norm(one, cfg.optimizer).upper - 1.0), "unit projective")
    ga, gb = GradedDim(1, 1), GradedDim(2, 1)
    x, y = complex_gaussian(rng, (2, 2)), complex_gaussian(rng, (3, 3))
    elementary = TensorElement(2, 3, [(x, y)], 1, ga, gb)
    expected = np.kron(superinvolve(GradedOperator(ga, x)).data, superinvolve(GradedOperator(gb, y)).data)
    m.add(1e-12 * (1 + op_norm(expected)) - max_entry_norm(kron_matrix(star_tensor(elementary, "product"))
                                                           - expected), "product star elementary")
    a, b = complex_gaussian(rng, (2, 2)), complex_gaussian(rng, (2, 2))
    m.flag(dual_symmetrized_haagerup(TensorElement.elementary(a, b), cfg.optimizer)
           .contains(op_norm(a) * op_norm(b), 1e-6), "dual elementary")
    return m.result()


def tensor_star_involutions(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("tensor", "star_involutions")
    for i in range(min(cfg.samples, 50)):
        rng = derive_rng(cfg.seed, "tensor", "star", i)
        t = _random_tensor(rng, 2, 2, 2, level=1 + i % 2, graded=True)
        spatial = kron_matrix(t)
        for mode in STAR_MODES:
            back = kron_matrix(star_tensor(star_tensor(t, mode), mode))
            m.add(1e-12 * (1 + op_norm(spatial)) - max_entry_norm(back - spatial), f"{mode} twice {i}")
        inj = injective_norm(t)
        m.add(1e-12 * (1 + inj) - abs(injective_norm(star_tensor(t, "product")) - inj), f"injective {i}")
    for i in range(min(cfg.samples, 20)):
        rng = derive_rng(cfg.seed, "tensor", "flip", i)
        t = _random_tensor(rng, 2, 2, 2, graded=True)
        h1 = haagerup_norm(t, cfg.optimizer)
        h2 = haagerup_norm(star_tensor(t, "haagerup_flip"), cfg.optimizer)
        m.add(1e-4 - max(abs(h1.upper - h2.upper), abs(h1.lower - h2.lower)), f"flip isometry {i}")
    return m.result()


def tensor_symmetrized(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("tensor", "symmetrized_haagerup")
    for n in (2, 3):
        bracket = symmetrized_haagerup(_units_tensor(n), cfg.optimizer)
        m.add(1e-5 - abs(bracket.upper - n), f"row-column units n={n}")
        m.add(1e-9 - abs(bracket.lower - 1.0), f"lower n={n}")
        m.add(bracket.details["upper_star"] - bracket.details["upper"], f"star larger n={n}")
    one = TensorElement(2, 2, [(np.eye(2), np.eye(2))], 1, GradedDim(1, 1), GradedDim(2, 0))
    bracket = symmetrized_haagerup(one, cfg.optimizer)
    m.add(1e-9 - max(abs(bracket.upper - 1.0), abs(bracket.lower - 1.0)), "unit")
    return m.result()


def tensor_dual_bracket(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("tensor", "dual_symmetrized_bracket")
    one = TensorElement.elementary(np.eye(2), np.eye(2))
    m.flag(dual_symmetrized_haagerup(one, cfg.optimizer).contains(1.0, 1e-9), "unit")
    for i in range(min(cfg.samples, 20)):
        rng = derive_rng(cfg.seed, "tensor", "dual", i)
        t = _random_tensor(rng, 2, 2, 2)
        bracket = dual_symmetrized_haagerup(t, cfg.optimizer)
        hb = haagerup_norm(t, cfg.optimizer)
        inj = injective_norm(t)
        m.add(bracket.upper - bracket.lower + 1e-12, f"order {i}")
        m.add(bracket.lower - inj + 1e-12, f"above injective {i}")
        m.add(hb.upper - bracket.upper + 1e-12, f"below haagerup {i}")
    return m.result()


def tensor_gauge_invariance(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("tensor", "gauge_invariance")
    for i in range(min(cfg.samples, 10)):
        rng = derive_rng(cfg.seed, "tensor", "gauge", i)
        t = _random_tensor(rng, 2, 2, 2)
        g = np.eye(2) + 0.5 * complex_gaussian(rng, (2, 2))
        h = np.linalg.inv(g)
        (a1, b1), (a2, b2) = t.factors
        moved = t.with_factors([(a1 * g[0, 0] + a2 * g[1, 0], b1 * h[0, 0] + b2 * h[0, 1]),
                                (a1 * g[0, 1] + a2 * g[1, 1], b1 * h[1, 0] + b2 * h[1, 1])])
        before = haagerup_norm(t, cfg.optimizer).upper
        m.add(1e-5 - abs(haagerup_norm(moved, cfg.optimizer).upper - before), f"sample {i}")
    return m.result()


def tensor_cstar(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("tensor", "cstar_tensor_positivity")
    one = TensorElement(2, 1, [(np.eye(2), np.eye(1))], 1, GradedDim(1, 1), GradedDim(1, 0))
    m.flag(finite_dim_cstar_tensor(one, "eps_positive") and finite_dim_cstar_tensor(one, "superpositive"),
           "unit")
    x = cone_counterexample()
    t = TensorElement(2, 1, [(x.data, np.eye(1))], 1, GradedDim(1, 1), GradedDim(1, 0))
    m.flag(finite_dim_cstar_tensor(t, "eps_positive") and not finite_dim_cstar_tensor(t, "superpositive"),
           "cone counterexample")
    rng = derive_rng(cfg.seed, "tensor", "cstar")
    for i in range(5):
        pa = random_graded("eps_positive", GradedDim(2, 0), rng).data
        pb = random_graded("eps_positive", GradedDim(1, 1), rng).data
        t = TensorElement(2, 2, [(pa, pb)], 1, GradedDim(2, 0), GradedDim(1, 1))
        m.flag(finite_dim_cstar_tensor(t, "eps_positive"), f"product of positives {i}")
    return m.result()


# group

def group_generators(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("group", "generator_norms")
    for n in range(1, 5):
        for g in range(n):
            c = CyclicGroupElement.generator(n, g)
            for k in (1, 2, 3):
                for mode in ("haagerup", "projective"):
                    b = delta_k_norm(c, k, mode, cfg.optimizer)
                    m.add(1e-6 - max(abs(b.lower - 1.0), abs(b.upper - 1.0)), f"n={n} g={g} k={k} {mode}")
    return m.result()


def group_dft(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("group", "dft_closed_form")
    for i in range(cfg.samples):
        rng = derive_rng(cfg.seed, "group", "dft", i)
        n = int(rng.integers(1, 5))
        c = CyclicGroupElement(n, complex_gaussian(rng, n))
        spatial = op_norm(delta_k_element(c, 1).matrix())
        explicit = max(abs(sum(c.coeffs[g] * np.exp(2j * np.pi * g * j / n) for g in range(n)))
                       for j in range(n))
        m.add(1e-10 - abs(delta_k_norm(c, 1).upper - explicit), f"closed form {i}")
        m.add(1e-10 - abs(spatial - explicit), f"spatial {i}")
    m.add(1e-12 - abs(dft_norm(CyclicGroupElement(2, [1, 1])) - 2.0), "(1, 1)")
    m.add(1e-12 - abs(dft_norm(CyclicGroupElement(2, [1, -1])) - 2.0), "(1, -1)")
    m.flag(np.allclose(regular_rep(2)[1], np.diag([1, -1])) and regular_rep(1)[0].shape == (1, 1),
           "regular representation")
    return m.result()


def group_monotone(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("group", "monotone_norm_sequence")
    for i in range(min(cfg.samples, 50)):
        rng = derive_rng(cfg.seed, "group", "monotone", i)
        n = int(rng.integers(2, 5))
        c = CyclicGroupElement(n, complex_gaussian(rng, n))
        for mode in ("haagerup", "projective"):
            seq = norm_sequence(c, 3, mode, cfg.optimizer)
            for k in range(1, len(seq)):
                m.add(seq[k].upper - seq[k - 1].lower + 1e-9, f"{mode} sample {i} k={k + 1}")
    c = CyclicGroupElement(2, [1, 1])
    m.add(delta_k_norm(c, 2, "haagerup", cfg.optimizer).upper - delta_k_norm(c, 1).lower + 1e-9, "(1, 1)")
    return m.result()


def group_dual_involution(cfg: SuiteConfig) -> PropertyResult:
    m = Margins("group", "dual_involution")
    for i in range(min(cfg.samples, 20)):
        rng = derive_rng(cfg.seed, "group", "involution", i)
        c = CyclicGroupElement(3, complex_gaussian(rng, 3))
        report = dual_involution_check(c, 2, "haagerup", cfg.optimizer)
        m.flag(report.involutive and report.antilinear, f"algebra {i}")
        m.add(report.tol - max(report.lower_difference, report.upper_difference), f"isometry {i}")
    symmetric = CyclicGroupElement(3, [0.5, 1.0, 1.0])
    m.flag(dual_involution_check(symmetric, 1).involutive, "real symmetric")
    m.flag(np.array_equal(dual_involution(symmetric).coeffs, symmetric.coeffs), "real symmetric fixed")
    return m.result()


PropertyFn = Callable[[SuiteConfig], PropertyResult]


def suite_properties(suite: str) -> List[PropertyFn]:
    registry: Dict[str, List[PropertyFn]] = {
        "core": [core_iota_isomorphism, core_norm_estimate, core_contraction_criterion, core_cone_separation,
                 core_superunitary, core_positivity_agreement, core_golden],
        "norms": [norms_radius_invariants, norms_strong_hermitian, norms_sigma_identity,
                  norms_involution_isometry, norms_derived, norms_sigma_axioms, norms_omega_seminorms,
                  norms_golden]
                 + [lambda cfg, case=case: _contractivity_property(case, cfg)
                    for case in _contractivity_cases()],
        "tensor": [tensor_norm_ordering, tensor_exact_instances, tensor_star_involutions, tensor_symmetrized,
                   tensor_dual_bracket, tensor_gauge_invariance, tensor_cstar],
        "group": [group_generators, group_dft, group_monotone, group_dual_involution],
    }
    if suite == "all":
        return [fn for name in SUITES if name != "all" for fn in registry[name]]
    return registry[suite]


def _guarded(fn: PropertyFn, cfg: SuiteConfig) -> PropertyResult:
    """Run one property; a numerical failure inside it fails that property only."""
    try:
        return fn(cfg)
    except ComputationError as e:
        suite, _, name = getattr(fn, "__name__", "").partition("_")
        logger.error(f"property {fn!r} raised: {e}")
        return PropertyResult(suite if name else cfg.suite, name or "property", False, 0, None, f"error: {e}")


def run_suite(cfg: SuiteConfig) -> List[PropertyResult]:
    """Run every property of the configured suite; results keep registry order."""
    properties = suite_properties(cfg.suite)
    logger.info(f"running {len(properties)} properties of suite {cfg.suite} with seed {cfg.seed}")
    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        results = list(tqdm(pool.map(lambda fn: _guarded(fn, cfg), properties), total=len(properties),
                            desc=f"verify {cfg.suite}", disable=not cfg.progress))
    for r in results:
        if not r.passed:
            logger.warning(f"{r.suite}.{r.name} failed: {r.detail}")
    return results
