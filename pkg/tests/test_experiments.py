import csv
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from o2hopf import experiments as ex
from o2hopf import normal_form as nfm
from o2hopf.pressure_law import PressureLaw
from o2hopf.spectral import check_admissible

FAST = ex.DNSSettings(N=16)


@pytest.fixture(scope="module")
def ref_nf():
    return nfm.build_normal_form(check_admissible(1, 0.0, 1.0), PressureLaw.polynomial([0, 1, 1]))


def synth(z1, z2, w=1.3, n=400, T=50.0):
    t = np.linspace(0, T, n)
    return t, np.stack([z1 * np.exp(1j * w * t), z2 * np.exp(1j * w * t)], axis=1)


def test_classify_rotating_and_standing():
    t, z = synth(0.1, 0.0)
    d = ex.classify_track(t, z)
    assert d.family_guess == "rotating_1" and abs(d.omega_fit - 1.3) <= 1e-6 and d.converged
    t, z = synth(0.0, 0.1)
    assert ex.classify_track(t, z).family_guess == "rotating_2"
    t, z = synth(0.1, 0.1)
    d = ex.classify_track(t, z)
    assert d.family_guess == "standing" and d.amplitude == pytest.approx(0.1)
    t, z = synth(0.1, 0.05)
    assert ex.classify_track(t, z).family_guess == "unclassified"
    t, z = synth(0.0, 0.0)
    assert ex.classify_track(t, z).family_guess == "equilibrium"


def test_classification_thresholds():
    assert ex.family_of(1.0, 0.951) == "standing"
    assert ex.family_of(1.0, 0.94) == "unclassified"
    assert ex.family_of(1.0, 0.05) == "rotating_1"
    assert ex.family_of(0.049, 1.0) == "rotating_2"


@given(st.floats(0.01, 1.0), st.floats(0.0, 1.0), st.floats(-3, 3))
def test_classification_swaps_under_reflection(r1, r2, h):
    # S swaps (z1, z2); T_h multiplies by opposite phases: labels swap or stay
    swap = {"rotating_1": "rotating_2", "rotating_2": "rotating_1"}
    t, z = synth(r1, r2 * 1j)
    a = ex.classify_track(t, z).family_guess
    zs = z[:, ::-1] * np.array([np.exp(1j * h), np.exp(-1j * h)])
    b = ex.classify_track(t, zs).family_guess
    assert b == swap.get(a, a)


def test_nonconverged_flag():
    t = np.linspace(0, 10, 200)
    r = 0.01 * np.exp(0.3 * t)
    z = np.stack([r * np.exp(1j * t), r * np.exp(1j * t)], axis=1)
    d = ex.classify_track(t, z)
    assert d.family_guess == "standing" and not d.converged


def test_plateau_defect():
    assert ex.plateau_defect(np.ones(10)) == 0
    assert ex.plateau_defect(np.array([1.0, 1.0, 1.1, 1.1])) == pytest.approx(0.1 / 1.1)


def test_dns_standing_reference(ref_nf):
    # the amplitude-vs-r_* comparison lives in the acceptance suite
    th = 0.012
    w = ex.predicted(ref_nf, 0, th, "standing")
    assert w.amplitude == pytest.approx(math.sqrt(3 * th))
    U0 = ex.initial_state(ref_nf, w.amplitude, w.amplitude, FAST.N, 0.1, 0)
    run = ex.run_to_plateau(ref_nf, 0, th, U0, FAST)
    d = run.diagnostics
    assert d.family_guess == "standing" and d.converged
    assert abs(d.r1_mean - d.r2_mean) <= 1e-3 * d.amplitude


def test_dns_resolution_independent(ref_nf):
    th = 0.024
    amps = []
    for N in (16, 32):
        s = ex.DNSSettings(N=N)
        U0 = ex.initial_state(ref_nf, 0.2, 0.2, N, 0.1, 0)
        amps.append(ex.run_to_plateau(ref_nf, 0, th, U0, s).diagnostics.amplitude)
    assert amps[0] == pytest.approx(amps[1], rel=1e-5)


def test_sweep_csv_and_equal_theta_pair(tmp_path):
    th = 0.012
    res = ex.amplitude_scaling_sweep([(0.0, th), (0.001, th + 0.001), (0.002, th + 0.002)], settings=FAST, jobs=3)
    assert res.check_theta() <= 1e-15
    assert [r.mu1 for r in res.rows] == [0.0, 0.001, 0.002]
    a, b, c = res.rows
    assert a.family == b.family == c.family == "standing"
    d1 = abs(b.amplitude - a.amplitude) / a.amplitude
    d2 = abs(c.amplitude - a.amplitude) / a.amplitude
    assert d1 <= 2 * th
    # the residual mu1 dependence is O(mu1)
    assert 1.3 <= d2 / d1 <= 2.7
    res.write_csv(tmp_path / "s.csv")
    rows = list(csv.reader(open(tmp_path / "s.csv")))
    assert rows[0] == ["mu1", "mu2", "theta", "amplitude", "r_star", "omega", "omega_pred", "family", "converged"]
    assert rows[1][7] == "standing" and rows[1][8] == "true"
    assert float(rows[1][2]) == th


def test_sweep_rejects_bad_points():
    with pytest.raises(ValueError):
        ex.amplitude_scaling_sweep([(0.0, 0.06)], settings=FAST)
    with pytest.raises(ValueError):
        ex.amplitude_scaling_sweep([(0.0, 0.01), (0.0, -0.01)], settings=FAST)
    with pytest.raises(ValueError):
        ex.amplitude_scaling_sweep([(0.01, 0.01)], settings=FAST)


def test_extrapolate_frequency_exact_on_polynomials():
    th = [0.003, 0.006, 0.012, 0.024]
    om = [1 - 2 * t + 5 * t * t for t in th]
    assert ex.extrapolate_frequency(th, om, 2) == pytest.approx(1.0, abs=1e-12)
    assert ex.extrapolate_frequency(th[:2], om[:2], 5) == pytest.approx(1 - 2 * 0.0 - 5 * 0.003 * 0.006, abs=1e-12)


def test_probes_small(ref_nf):
    p = ex.probe_equilibrium(ref_nf, 0.0, -0.03, settings=FAST)
    assert p.passed and isinstance(p.passed, bool)
    p = ex.probe_standing(ref_nf, 0.0, 0.024, settings=FAST)
    assert p.passed and p.detail["family_end"] == "standing"


def test_reduced_vs_full_linear_law():
    nf = nfm.build_normal_form(check_admissible(1, 0.0, 1.0), PressureLaw.polynomial([0, 1]))
    assert ex.center_defect(nf, 0.0, 0.0, 0.05, N=8) <= 1e-8


def test_reduced_vs_full_axis_invariant(ref_nf):
    import o2hopf.galerkin as g
    from o2hopf.center import synthesize

    cfg = g.SimConfig(N=16, dt=2 * math.pi / 128, T=20.0, law=ref_nf.law, store_states=False)

    def z2_max(a0):
        tr = g.integrate(cfg, synthesize(ref_nf.basis, a0, 0.0, 16), ref_nf.basis)
        zr = ex.reduced_track(ref_nf, 0, 0, (a0 + 0j, 0j), tr.times)
        assert np.max(np.abs(zr[:, 1])) == 0
        return float(np.max(np.abs(tr.center_track[:, 1])))

    # the full track leaks into z2 only through a non-resonant conj(z1)|z1|^2 term
    big, small = z2_max(0.02), z2_max(0.005)
    assert small <= 1e-6
    assert big / small == pytest.approx(64, rel=0.1)


def test_oracle_suite_reference():
    cfg = check_admissible(2, 0.1, 2.0)
    checks = ex.coefficient_oracle_suite(cfg, PressureLaw.polynomial([0, 2.0, 1.5, -0.3]), seed=4)
    bad = [c for c in checks if not c["pass"]]
    assert not bad, bad
    assert all(set(c) == {"name", "pass", "measured", "tolerance"} for c in checks)


def test_spectral_checks():
    cfg = check_admissible(1, 0.0, 1.0)
    assert ex.resolvent_decay(cfg)["pass"]
    assert ex.spectral_gap_check(cfg)["pass"]
