import numpy as np
import pytest

from qnet.helpers import bitstrings, complex_pair, hermitian_defect, is_unitary, uniform_bounds


def test_uniform_bounds_standard_deviation():
    low, high = uniform_bounds(1.0, 0.1)
    assert (low + high) / 2 == pytest.approx(1.0)
    assert (high - low) / np.sqrt(12) == pytest.approx(0.1)


def test_is_unitary():
    assert is_unitary(np.array([[1, 1], [1, -1]]) / np.sqrt(2), 1e-12)
    assert not is_unitary(np.array([[1, 1], [0, 1]]), 1e-12)
    assert not is_unitary(np.ones(3), 1e-12)


def test_hermitian_defect():
    assert hermitian_defect(np.array([[1, 1j], [-1j, 2]])) == 0.0
    assert hermitian_defect(np.array([[0, 1], [0, 0]])) == 1.0


def test_bitstrings_order():
    assert bitstrings(2) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_complex_pair():
    assert complex_pair(1 - 2j) == [1.0, -2.0]
