"""
Gauge optimization for factorization norms.

A factorization x = v_1 . v_2 ... v_k of a tensor is unchanged when an
invertible scalar matrix G_j is inserted between neighbouring factors as
G_j G_j^{-1}. The functions here minimize a norm of the factors over such
gauges, parametrized as G_j = exp(Z_j) so that every iterate is invertible,
with analytic gradients pulled back through the exponential.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm, expm_frechet
from scipy.optimize import OptimizeResult, minimize

from .config import DimensionMismatchError
from .utils import dagger, partial_trace_blocks

logger = logging.getLogger(__name__)

GaugeFunction = Callable[[List[np.ndarray]], Tuple[float, List[np.ndarray]]]


def pack(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Flatten complex matrices into one real vector (real parts, then imaginary parts)."""
    return np.concatenate([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in mats])


def unpack(x: np.ndarray, sizes: Sequence[int]) -> List[np.ndarray]:
    out, pos = [], 0
    for r in sizes:
        n = r * r
        out.append((x[pos:pos + n] + 1j * x[pos + n:pos + 2 * n]).reshape(r, r))
        pos += 2 * n
    return out


def gauge_objective(value_and_grad: GaugeFunction, sizes: Sequence[int]):
    """
    Wrap a function of the gauges G_j into a function of real coordinates.

    value_and_grad receives the list of G_j and returns the value together
    with Gamma_j such that d value = sum_j Re tr(Gamma_j^dagger dG_j). The
    gradient in Z_j is the Frechet derivative of exp at Z_j^dagger applied
    to Gamma_j.
    """
    def fun(x: np.ndarray) -> Tuple[float, np.ndarray]:
        zs = unpack(x, sizes)
        gs = [expm(z) for z in zs]
        value, grads = value_and_grad(gs)
        pulled = [expm_frechet(dagger(z), g, compute_expm=False) for z, g in zip(zs, grads)]
        return float(value), pack(pulled)

    return fun


def gauges_from(x: np.ndarray, sizes: Sequence[int]) -> List[np.ndarray]:
    return [expm(z) for z in unpack(x, sizes)]


def random_starts(rng: np.random.Generator, sizes: Sequence[int], count: int,
                  scale: float = 0.5) -> List[np.ndarray]:
    """
    Real Gaussian generators Z_j.

    Real starting points make the search commute with complex conjugation of
    the input, so conjugate tensors get mirrored optimization runs.
    """
    dim = sum(2 * r * r for r in sizes)
    starts = []
    for _ in range(count):
        x = np.zeros(dim)
        pos = 0
        for r in sizes:
            x[pos:pos + r * r] = scale * rng.standard_normal(r * r)
            pos += 2 * r * r
        starts.append(x)
    return starts


def minimize_with_restarts(fun, starts: Iterable[np.ndarray], iterations: int = 500,
                           ftol: float = 1e-14, jac: bool = True) -> Optional[OptimizeResult]:
    """
    Run L-BFGS-B from every start and keep the best result.

    A run that hits a singular gauge or produces non-finite values is
    abandoned and the next start is tried.

    Args:
        fun: objective returning (value, gradient), or the value alone when jac is False
        starts: starting points in real coordinates
        iterations: iteration cap per run
        ftol: relative reduction stopping threshold
        jac: whether fun supplies its gradient; otherwise finite differences are used

    Returns:
        The best OptimizeResult, or None if every run failed
    """
    best = None
    for k, x0 in enumerate(starts):
        try:
            result = minimize(fun, x0, method="L-BFGS-B", jac=jac or None,
                              options={"maxiter": iterations, "ftol": ftol, "gtol": 1e-10})
        except (np.linalg.LinAlgError, FloatingPointError, ValueError) as e:
            logger.debug(f"restart {k} abandoned: {e}")
            continue
        if not np.isfinite(result.fun):
            continue
        logger.debug(f"restart {k}: value {result.fun:.10g} after {result.nit} iterations")
        if best is None or result.fun < best.fun:
            best = result
    return best


@dataclass
class ChainLink:
    """
    One factor V_j of a chain product, stored as a block matrix.

    The left gauge acts as G_{j-1}^{-1} (x) I_row_block, the right gauge as
    G_j (x) I_col_block.
    """
    matrix: np.ndarray
    row_block: int
    col_block: int


def chain_sizes(links: Sequence[ChainLink]) -> List[int]:
    """Gauge sizes r_j between consecutive links."""
    sizes = []
    for left, right in zip(links[:-1], links[1:]):
        r = left.matrix.shape[1] // left.col_block
        if left.matrix.shape[1] != r * left.col_block or right.matrix.shape[0] != r * right.row_block:
            raise DimensionMismatchError("chain links do not share a gauge dimension")
        sizes.append(r)
    return sizes


def chain_factors(links: Sequence[ChainLink], gs: Sequence[np.ndarray]) -> List[np.ndarray]:
    """Gauge-transformed factors M_j = (G_{j-1}^{-1} (x) I) V_j (G_j (x) I)."""
    out = []
    for j, link in enumerate(links):
        m = link.matrix
        if j > 0:
            m = np.kron(np.linalg.inv(gs[j - 1]), np.eye(link.row_block)) @ m
        if j < len(links) - 1:
            m = m @ np.kron(gs[j], np.eye(link.col_block))
        out.append(m)
    return out


def chain_log_norm(links: Sequence[ChainLink]) -> GaugeFunction:
    """
    sum_j log ||M_j|| and its gauge gradient.

    For two links this is the logarithm of the Haagerup factorization bound
    ||v|| ||w||; for three links the bound ||v_1|| ||v_2|| ||v_3||.
    """
    k = len(links)
    chain_sizes(links)

    def value_and_grad(gs: List[np.ndarray]) -> Tuple[float, List[np.ndarray]]:
        invs = [np.linalg.inv(g) for g in gs]
        grads = [np.zeros_like(g) for g in gs]
        value = 0.0
        for j, link in enumerate(links):
            left = link.matrix
            if j > 0:
                left = np.kron(invs[j - 1], np.eye(link.row_block)) @ left
            m = left @ np.kron(gs[j], np.eye(link.col_block)) if j < k - 1 else left
            u, s, vh = np.linalg.svd(m)
            value += np.log(s[0])
            e = np.outer(u[:, 0], vh[0]) / s[0]
            if j < k - 1:
                grads[j] += partial_trace_blocks(dagger(left) @ e, gs[j].shape[0], link.col_block)
            if j > 0:
                lift = np.kron(dagger(invs[j - 1]), np.eye(link.row_block))
                grads[j - 1] -= partial_trace_blocks(lift @ e @ dagger(m), gs[j - 1].shape[0],
                                                     link.row_block)
        return value, grads

    return value_and_grad
