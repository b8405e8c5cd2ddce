import math

import numpy as np
import pytest
from hypothesis import given, settings

from o2hopf.fields import TWO_PI, FourierField

from conftest import seeds


def rand_real(seed, N=8):
    rng = np.random.default_rng(seed)
    half = rng.normal(size=(2, N + 1)) + 1j * rng.normal(size=(2, N + 1))
    return FourierField.from_half(half)


def test_mean_mode_rejected():
    c = np.zeros((2, 5), complex)
    c[0, 2] = 1
    with pytest.raises(ValueError):
        FourierField(c)
    with pytest.raises(ValueError):
        FourierField.single_mode(0, [1, 1])


@given(seeds)
def test_from_half_is_real(seed):
    U = rand_real(seed)
    assert U.is_real()
    assert np.max(np.abs(U.to_physical(32).imag if np.iscomplexobj(U.to_physical(32)) else 0)) == 0


@given(seeds)
def test_physical_roundtrip(seed):
    U = rand_real(seed)
    V = FourierField.from_physical(U.to_physical(40), U.N)
    assert U.allclose(V, 1e-12)


@given(seeds)
def test_parseval(seed):
    U = rand_real(seed)
    n = 64
    vals = U.to_physical(n)
    quad = TWO_PI / n * np.sum(np.abs(vals) ** 2)
    assert quad == pytest.approx(U.norm() ** 2, rel=1e-12)


def test_inner_single_modes():
    U = FourierField.single_mode(2, [1, 1j], 3)
    V = FourierField.single_mode(2, [2, 1], 2)
    assert U.inner(V) == pytest.approx(TWO_PI * (2 + 1j))
    assert U.inner(FourierField.single_mode(-2, [1, 1], 2)) == 0


def test_conj_and_evaluate():
    U = FourierField.single_mode(1, [1, 2j], 2)
    x = np.array([0.3, 1.1])
    assert np.allclose(U.conj().evaluate(x), np.conj(U.evaluate(x)))


def test_arithmetic_and_resize():
    U = FourierField.single_mode(1, [1, 0], 1)
    V = FourierField.single_mode(3, [0, 1], 3)
    W = 2 * U + V - U
    assert W.N == 3 and W.support() == [1, 3]
    assert W.resized(1).support() == [1]
    assert (-W).mode(3)[1] == -1
