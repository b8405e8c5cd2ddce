import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from o2hopf.spectral import (
    CriticalConfig,
    Rejection,
    SingularityError,
    check_admissible,
    critical_delta,
    mode_eigenvalues,
    mode_matrix,
    nonresonance_margins,
    resolvent_norm,
    spectrum_report,
)


def roots_numpy(k, a, d, s):
    # independent oracle: companion-matrix roots of the characteristic polynomial
    return np.roots([1.0, (a + 1) * k**4 - d * k**2, a * k**4 * (k**4 - d * k**2) + s * k**2])


def test_mode_matrix_entries():
    M = mode_matrix(2, 0.3, 1.5, 2.0)
    assert np.allclose(M, [[-0.3 * 16, 2j], [4j, 1.5 * 4 - 16]])
    assert np.trace(M) == pytest.approx(-0.3 * 16 + 6 - 16)


def test_eigenvalue_examples():
    l1, l2 = mode_eigenvalues(1, 0, 0, 1)
    assert l1 == pytest.approx(complex(-0.5, math.sqrt(3) / 2))
    assert l2 == pytest.approx(complex(-0.5, -math.sqrt(3) / 2))
    l1, l2 = mode_eigenvalues(1, 0, 1, 1)
    assert l1 == pytest.approx(1j) and l2 == pytest.approx(-1j)
    l1, l2 = mode_eigenvalues(2, 0, 1, 1)
    assert l1 == pytest.approx(-6 + 4 * math.sqrt(2), rel=1e-14)
    assert l2 == pytest.approx(-6 - 4 * math.sqrt(2), rel=1e-14)
    with pytest.raises(ValueError):
        mode_eigenvalues(0, 0, 1, 1)


@given(
    st.integers(1, 32).map(lambda k: k),
    st.floats(-0.5, 2.0),
    st.floats(0.0, 10.0),
    st.floats(1e-3, 10.0),
    st.booleans(),
)
def test_vieta_and_evenness(k, a, d, s, neg):
    kk = -k if neg else k
    l1, l2 = mode_eigenvalues(kk, a, d, s)
    b = (a + 1) * k**4 - d * k**2
    c = a * k**4 * (k**4 - d * k**2) + s * k**2
    assert abs(l1 + l2 + b) <= 1e-10 * max(abs(b), abs(l1), abs(l2), 1e-300)
    assert abs(l1 * l2 - c) <= 1e-10 * max(abs(c), abs(l1 * l2), 1e-300)
    m1, m2 = mode_eigenvalues(-kk, a, d, s)
    assert abs(m1 - l1) <= 1e-12 * max(1, abs(l1)) and abs(m2 - l2) <= 1e-12 * max(1, abs(l2))
    # ordering: descending real part, then imaginary part
    assert l1.real > l2.real or (abs(l1.real - l2.real) <= 1e-12 * max(1, abs(l1)) and l1.imag >= l2.imag)


@given(st.integers(1, 32), st.floats(-0.5, 2.0), st.floats(0.0, 10.0), st.floats(1e-3, 10.0))
def test_eigenvalues_against_numpy_roots(k, a, d, s):
    got = sorted(mode_eigenvalues(k, a, d, s), key=lambda z: (z.real, z.imag))
    want = sorted(roots_numpy(k, a, d, s), key=lambda z: (z.real, z.imag))
    scale = max(abs(want[0]), abs(want[1]), 1.0)
    for g, w in zip(got, want):
        assert abs(g - w) <= 1e-8 * scale


def test_critical_delta_examples():
    assert critical_delta(1, 0) == 1
    assert critical_delta(2, 0.25) == 5
    assert critical_delta(3, -0.5) == 4.5


def test_check_admissible_examples():
    cfg = check_admissible(1, 0, 1, 16)
    assert isinstance(cfg, CriticalConfig)
    assert cfg.delta_c == 1 and cfg.omega_c == 1 and cfg.tail_certified
    rej = check_admissible(1, 2, 1, 16)
    assert isinstance(rej, Rejection) and not rej
    assert "sp1" in rej.clause and rej.k == 1
    cfg = check_admissible(1, 0.1, 1, 64)
    assert cfg.delta_c == pytest.approx(1.1) and cfg.omega_c == pytest.approx(math.sqrt(0.99))
    assert cfg.nonresonance_checked_up_to == 64 and cfg.tail_certified
    with pytest.raises(ValueError):
        check_admissible(2, 0, 1, 4)


def test_default_scan_limit():
    assert check_admissible(1, 0, 1).nonresonance_checked_up_to == 64
    assert check_admissible(10, 0, 1).nonresonance_checked_up_to == 80


def test_zero_delta_rejected():
    rej = check_admissible(1, -1.0, 2.0)
    assert isinstance(rej, Rejection) and "delta_c" in rej.clause


def test_resonance_rejected():
    # choose sp1 so that mode k = 2 has a zero eigenvalue: a k^4 (k^2 - delta_c) = -sp1
    a_c, k0 = -0.1, 1
    d = (a_c + 1) * k0**2
    sp1 = -a_c * 16 * (4 - d)
    assert sp1 > a_c**2
    rej = check_admissible(k0, a_c, sp1)
    assert isinstance(rej, Rejection) and rej.k == 2
    margins = nonresonance_margins(k0, a_c, sp1, [2, 3])
    assert margins[2] == pytest.approx(0, abs=1e-12) and margins[3] != 0


def test_negative_ac_tail_not_certified():
    # a_c < 0: k^4 (k^2 - delta) grows so the margin eventually turns negative and stays so
    cfg = check_admissible(1, -0.01, 1.0, 4)
    assert isinstance(cfg, CriticalConfig)
    assert cfg.tail_certified is False or cfg.tail_certified is True
    g = -0.01 * 5**4 * (25 - 0.99)
    assert cfg.tail_certified == (g < -1.0)


def test_spectrum_report_examples():
    cfg = check_admissible(1, 0, 1, 16)
    rep = spectrum_report(cfg, 3)
    assert rep.center_modes == [-1, 1]
    m2 = [m for m in rep.modes if m.k == 2][0]
    assert m2.lam1 == pytest.approx(-6 + 4 * math.sqrt(2))
    # mode 3 decays slowest: lambda = (-72 + sqrt(72^2 - 36)) / 2
    assert rep.gap == pytest.approx((72 - math.sqrt(72**2 - 36)) / 2, rel=1e-10)
    rep8 = spectrum_report(cfg, 8)
    # fast branch ~ -k^4 falls monotonically; slow branch ~ -sp1/k^2 creeps back toward zero
    re_min = [min(m.lam1.real, m.lam2.real) for m in rep8.modes if m.k >= 2]
    re_max = [max(m.lam1.real, m.lam2.real) for m in rep8.modes if m.k >= 3]
    assert all(x > y for x, y in zip(re_min, re_min[1:]))
    assert all(x < y < 0 for x, y in zip(re_max, re_max[1:]))
    js = rep.to_json()
    assert set(js) == {"k0", "a_c", "delta_c", "omega_c", "modes", "gap"}
    assert set(js["modes"][0]) == {"k", "re1", "im1", "re2", "im2"}


def test_center_eigenvalues_at_criticality():
    rng = np.random.default_rng(1)
    for _ in range(50):
        k0 = int(rng.integers(1, 4))
        a_c = float(rng.uniform(-0.2, 0.5))
        sp1 = a_c**2 * k0**6 + float(rng.uniform(0.1, 4))
        cfg = check_admissible(k0, a_c, sp1)
        if isinstance(cfg, Rejection):
            continue
        l1, l2 = mode_eigenvalues(k0, a_c, cfg.delta_c, sp1)
        assert abs(l1 - 1j * cfg.omega_c) <= 1e-12 * max(1, cfg.omega_c) * 10
        assert abs(l2 + 1j * cfg.omega_c) <= 1e-12 * max(1, cfg.omega_c) * 10


def test_resolvent():
    cfg = check_admissible(1, 0, 1, 16)
    assert math.isfinite(resolvent_norm(cfg, 0.0, 8))
    with pytest.raises(SingularityError):
        resolvent_norm(cfg, 1.0, 8)
    with pytest.raises(SingularityError):
        resolvent_norm(cfg, -1.0, 8)
    ws = np.logspace(math.log10(2), 4, 50)
    v = np.array([w * resolvent_norm(cfg, w, 64) for w in ws])
    assert v.max() <= 10 * v[0]


def test_resolvent_matches_dense_inverse():
    cfg = check_admissible(2, 0.1, 2.0)
    w = 3.7
    K = 10
    best = 0.0
    for k in range(-K, K + 1):
        if k == 0:
            continue
        A = 1j * w * np.eye(2) - mode_matrix(k, cfg.a_c, cfg.delta_c, cfg.sp1)
        best = max(best, np.linalg.norm(np.linalg.inv(A), 2))
    assert resolvent_norm(cfg, w, K) == pytest.approx(best, rel=1e-12)
