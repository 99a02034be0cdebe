"""
Utility functions for dense complex linear algebra and seeded sampling.
"""

import zlib
from typing import Union

import numpy as np
from scipy.stats import unitary_group

from .config import InputError

SEED_MASK = (1 << 64) - 1


def derive_rng(seed: int, *keys: Union[int, str]) -> np.random.Generator:
    """
    Build an independent generator for a (seed, key...) path.

    Results derived this way do not depend on evaluation order, which keeps
    parallel sampling loops schedule-independent.

    Args:
        seed: 64-bit user seed
        keys: sample indices or labels; strings are hashed with crc32

    Returns:
        A numpy Generator
    """
    entropy = [int(seed) & SEED_MASK]
    for key in keys:
        if isinstance(key, str):
            entropy.append(zlib.crc32(key.encode("utf-8")))
        else:
            entropy.append(int(key) & SEED_MASK)
    return np.random.default_rng(np.random.SeedSequence(entropy))


def as_complex_matrix(data, name: str = "matrix") -> np.ndarray:
    """Convert input to a finite 2-D complex array."""
    arr = np.array(data, dtype=complex)
    if arr.ndim != 2:
        raise InputError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def max_entry_norm(m: np.ndarray) -> float:
    """Largest absolute entry; zero for empty input."""
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m)))


def op_norm(m: np.ndarray) -> float:
    """Operator norm (largest singular value)."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def trace_norm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def is_psd(m: np.ndarray, tol: float) -> bool:
    """
    Scale-aware positive semidefiniteness test.

    The hermitian part of `m` is tested with threshold
    lambda_min >= -tol * (1 + ||m||).
    """
    h = hermitian_part(m)
    lam_min = float(np.linalg.eigvalsh(h)[0])
    return lam_min >= -tol * (1.0 + op_norm(h))


def sort_eigenvalues(values) -> np.ndarray:
    """Sort complex values by (real, imaginary) part."""
    values = np.asarray(values, dtype=complex)
    order = np.lexsort((values.imag, values.real))
    return values[order]


def sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Principal square root of a PSD matrix; small negative eigenvalues are clipped."""
    lam, vec = np.linalg.eigh(hermitian_part(m))
    lam = np.sqrt(np.clip(lam, 0.0, None))
    return (vec * lam) @ vec.conj().T


def log_pd(m: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    """Hermitian logarithm of a positive definite matrix."""
    lam, vec = np.linalg.eigh(hermitian_part(m))
    lam = np.log(np.clip(lam, floor * max(1.0, float(lam[-1])), None))
    return (vec * lam) @ vec.conj().T


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = complex_gaussian(rng, dim)
    return v / np.linalg.norm(v)


def random_self_adjoint(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = complex_gaussian(rng, (dim, dim))
    return (z + z.conj().T) / 2


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary; scipy only samples dimensions above one."""
    if dim == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return np.asarray(unitary_group.rvs(dim, random_state=rng), dtype=complex)


def partial_trace_blocks(m: np.ndarray, outer: int, inner: int) -> np.ndarray:
    """
    Trace out the inner factor of an (outer*inner)-square matrix.

    Entry (i, j) of the result is the trace of block (i, j).
    """
    return np.einsum("iaja->ij", m.reshape(outer, inner, outer, inner))


def blocks(m: np.ndarray, size: int):
    """Split a matrix into its size-by-size blocks, returned as a nested list."""
    rows, cols = m.shape[0] // size, m.shape[1] // size
    return [[m[i * size:(i + 1) * size, j * size:(j + 1) * size] for j in range(cols)]
            for i in range(rows)]


def direct_sum(*mats: np.ndarray) -> np.ndarray:
    n = sum(m.shape[0] for m in mats)
    k = sum(m.shape[1] for m in mats)
    out = np.zeros((n, k), dtype=complex)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out
