import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from o2hopf.center import (
    GroupElement,
    apply_group,
    build_center_basis,
    project_center,
    project_half,
    synthesize,
)
from o2hopf.fields import FourierField
from o2hopf.spectral import check_admissible, mode_matrix

from conftest import random_config, seeds


def test_reference_basis():
    b = build_center_basis(check_admissible(1, 0, 1))
    assert np.allclose(b.xi0.mode(1), [1, 1])
    assert np.allclose(b.eta0.mode(1), np.array([1, 1]) / (4 * math.pi))
    assert b.xi0.inner(b.eta0) == pytest.approx(1)
    assert b.xi0.inner(b.eta1) == 0


def test_k0_2_oracle():
    # independent oracle: the rows of the inverse eigenvector matrix at mode k0 are the duals
    cfg = check_admissible(2, 0.1, 2.0)
    b = build_center_basis(cfg)
    assert np.max(np.abs(b.biorth - np.eye(4))) <= 1e-12
    M = mode_matrix(2, cfg.a_c, cfg.delta_c, cfg.sp1)
    lam, V = np.linalg.eig(M)
    i = int(np.argmax(lam.imag))
    W = np.linalg.inv(V)
    xi = b.xi0.mode(2)
    # left eigenvector row for +i omega, rescaled so that row @ xi = 1
    row = W[i] / (W[i] @ xi)
    eta_oracle = np.conj(row) / (2 * math.pi)
    assert np.allclose(b.eta0.mode(2), eta_oracle, atol=1e-12)


@settings(max_examples=60)
@given(seeds)
def test_basis_invariants_random(seed):
    rng = np.random.default_rng(seed)
    cfg = random_config(rng)
    b = build_center_basis(cfg)
    assert np.max(np.abs(b.biorth - np.eye(4))) <= 1e-12
    assert max(b.eigen_residuals().values()) <= 1e-12 * max(1.0, abs(cfg.k0) ** 4)
    q = cfg.omega_c / cfg.k0 - 1j * cfg.a_c * cfg.k0**3
    assert np.allclose(b.xi0.mode(cfg.k0), [1, q])
    assert np.allclose(b.xi1.mode(-cfg.k0), [1, -q])


def test_projection_examples():
    b = build_center_basis(check_admissible(1, 0, 1))
    assert np.allclose(project_center(b, b.xi0), (1, 0))
    assert np.allclose(project_center(b, 2 * b.xi1), (0, 2))
    U = b.xi0 + b.xi0.conj() + 0.5 * (b.xi1 + b.xi1.conj())
    assert np.allclose(project_center(b, U), (1, 0.5))
    assert np.allclose(project_half(b, U.half()), (1, 0.5))


@given(seeds, st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3))
def test_synthesize_project_roundtrip(seed, z1, z2):
    cfg = random_config(np.random.default_rng(seed))
    b = build_center_basis(cfg)
    U = synthesize(b, z1, z2, 2 * abs(cfg.k0))
    assert U.is_real(1e-14)
    w1, w2 = project_center(b, U)
    assert abs(w1 - z1) <= 1e-12 * (1 + abs(z1) + abs(z2)) and abs(w2 - z2) <= 1e-12 * (1 + abs(z1) + abs(z2))
    h1, h2 = project_half(b, U.half())
    assert abs(h1 - w1) <= 1e-13 * (1 + abs(w1)) and abs(h2 - w2) <= 1e-13 * (1 + abs(w2))


def test_group_examples():
    cfg = check_admissible(1, 0.2, 1.5)
    b = build_center_basis(cfg)
    S = GroupElement.reflection()
    assert apply_group(S, b.xi0).allclose(b.xi1, 1e-15)
    h = 0.37
    assert apply_group(GroupElement.translation(h), b.xi0).allclose(np.exp(1j * h) * b.xi0, 1e-15)


def test_translation_phase_is_mode_exact():
    cfg = check_admissible(3, 0.0, 2.0)
    b = build_center_basis(cfg)
    h = 0.2
    z = project_center(b, apply_group(GroupElement.translation(h), b.xi0))
    assert np.allclose(z, (np.exp(3j * h), 0), atol=1e-12)


def rand_field(rng, N=6):
    half = rng.normal(size=(2, N + 1)) + 1j * rng.normal(size=(2, N + 1))
    return FourierField.from_half(half)


@given(seeds, st.floats(-math.pi, math.pi))
def test_group_relations(seed, h):
    rng = np.random.default_rng(seed)
    U = rand_field(rng)
    S = GroupElement.reflection()
    T = GroupElement.translation
    lhs = apply_group(T(h), apply_group(S, U))
    rhs_ = apply_group(S, apply_group(T(-h), U))
    assert lhs.allclose(rhs_, 1e-12)
    assert np.array_equal(apply_group(S, apply_group(S, U)).coeffs, U.coeffs)
    for g in (T(h), S, T(h) @ S):
        assert apply_group(g, U).norm() == pytest.approx(U.norm(), rel=1e-12)


@given(st.floats(-3, 3), st.floats(-3, 3), st.booleans(), st.booleans(), seeds)
def test_composition_law(h1, h2, r1, r2, seed):
    U = rand_field(np.random.default_rng(seed))
    g1, g2 = GroupElement(h1, r1), GroupElement(h2, r2)
    lhs = apply_group(g1 @ g2, U)
    rhs_ = apply_group(g1, apply_group(g2, U))
    assert lhs.allclose(rhs_, 1e-11)
    assert apply_group(g1 @ g1.inverse(), U).allclose(U, 1e-11)


def test_reflection_swaps_center_coordinates():
    cfg = check_admissible(2, 0.05, 1.0)
    b = build_center_basis(cfg)
    U = synthesize(b, 0.3 + 0.1j, 0.0, 4)
    z = project_center(b, apply_group(GroupElement.reflection(), U))
    assert np.allclose(z, (0.0, 0.3 + 0.1j), atol=1e-12)
