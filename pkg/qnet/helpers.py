from __future__ import annotations

import numpy as np


def uniform_bounds(mean: float, sd: float) -> tuple[float, float]:
    """Bounds of the uniform distribution with the given mean and standard deviation."""
    half_width = np.sqrt(3.0) * sd
    return mean - half_width, mean + half_width


def is_unitary(matrix: np.ndarray, atol: float) -> bool:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.allclose(matrix @ matrix.conj().T, np.eye(matrix.shape[0]), rtol=0.0, atol=atol))


def hermitian_defect(matrix: np.ndarray) -> float:
    """Largest entry of |A - A^dagger|"""
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def bitstrings(n_bits: int) -> list[tuple[int, ...]]:
    """All bitstrings of the given length, in lexicographic order (first bit is the most significant)."""
    return [tuple((index >> (n_bits - 1 - k)) & 1 for k in range(n_bits)) for index in range(2**n_bits)]


def complex_pair(value: complex) -> list[float]:
    """Split a complex number into a JSON friendly [re, im] pair."""
    value = complex(value)
    return [value.real, value.imag]
