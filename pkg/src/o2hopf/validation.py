"""Check battery behind ``o2hopf validate``."""

from __future__ import annotations

import math

import numpy as np

from . import experiments as ex
from . import normal_form as nfm
from .center import GroupElement, apply_group, build_center_basis
from .fields import FourierField
from .galerkin import SimConfig, rhs
from .pressure_law import PressureLaw
from .spectral import Rejection, check_admissible

SWEEP_THETAS = (0.003, 0.006, 0.012, 0.024)


def random_smooth_state(rng: np.random.Generator, N: int, amp: float = 0.3, decay: float = 0.5) -> FourierField:
    k = np.arange(N + 1)
    half = (rng.normal(size=(2, N + 1)) + 1j * rng.normal(size=(2, N + 1))) * np.exp(-decay * k)
    half[:, 0] = 0
    U = FourierField.from_half(half)
    return U * (amp / max(np.max(np.abs(U.to_physical(4 * N + 4))), 1e-300))


def equivariance_defects(law: PressureLaw, a: float, delta: float, N: int = 64, n_states: int = 20,
                         seed: int = 0) -> tuple[float, float]:
    """Max relative commutator of rhs with grid shifts and with the reflection."""
    cfg = SimConfig(N=N, dt=0.01, T=0.01, a=a, delta=delta, law=law)
    rng = np.random.default_rng(seed)
    n = cfg.grid_size
    S = GroupElement.reflection()
    dT = dS = 0.0
    for _ in range(n_states):
        U = random_smooth_state(rng, N)
        g = GroupElement.translation(2 * math.pi * int(rng.integers(1, n)) / n)
        f = rhs(cfg, U)
        scale = max(f.norm(), 1e-300)
        dT = max(dT, (apply_group(g, f) - rhs(cfg, apply_group(g, U))).norm() / scale)
        dS = max(dS, (apply_group(S, f) - rhs(cfg, apply_group(S, U))).norm() / scale)
    return dT, dS


def run_validation(k0: int, a_c: float, law: PressureLaw, full: bool = False, seed: int = 0) -> dict:
    cfg = check_admissible(k0, a_c, law.sp1)
    if isinstance(cfg, Rejection):
        raise ValueError(f"inadmissible configuration: {cfg.clause}")
    checks = ex.coefficient_oracle_suite(cfg, law, seed)
    basis = build_center_basis(cfg)
    checks.append(ex._check("biorthogonality", float(np.max(np.abs(basis.biorth - np.eye(4)))), 1e-12))
    checks.append(ex._check("eigen_residuals", max(basis.eigen_residuals().values()), 1e-12))
    dT, dS = equivariance_defects(law, cfg.a_c, cfg.delta_c, seed=seed)
    checks.append(ex._check("equivariance_translation", dT, 1e-10))
    checks.append(ex._check("equivariance_reflection", dS, 1e-10))
    res = ex.resolvent_decay(cfg)
    checks.append(ex._check("resolvent_decay_ratio", res["max_ratio"], 10.0))
    checks.append(ex._check("spectral_gap_positive", 0.0 if ex.spectral_gap_check(cfg)["pass"] else 1.0, 0.0))
    nf = nfm.build_normal_form(cfg, law)
    for mu in ((0.0, 0.0), (0.0, 0.01)):
        r = ex.reduced_vs_full(nf, *mu)
        checks.append(ex._check(f"reduced_vs_full_ratio_theta={mu[1]}", r.ratio, math.inf, r.ratio >= 3.0))
    report = {"k0": k0, "a_c": a_c, "seed": seed, "full": full, "checks": checks}
    if full:
        sweep = ex.amplitude_scaling_sweep([(0.0, t) for t in SWEEP_THETAS], k0, a_c, law.coeffs, seed=seed)
        ratios = sweep.ratios()
        checks.append(ex._check("sweep_all_standing", 0.0, 0.0, all(r.family == "standing" for r in sweep.rows)))
        checks.append(ex._check("sweep_slope", abs(sweep.slope() - 0.5), 0.05))
        checks.append(ex._check("sweep_amplitude_vs_r_star", max(abs(q - 1) for q in ratios), 0.10))
        w0 = ex.extrapolate_frequency([r.theta for r in sweep.rows], [r.omega for r in sweep.rows], len(sweep.rows) - 1)
        checks.append(ex._check("frequency_intercept", abs(w0 - cfg.omega_c) / cfg.omega_c, 1e-3))
        p = ex.probe_equilibrium(nf, 0.0, -0.012, seed=seed)
        checks.append(ex._check("equilibrium_stable_theta<0", p.end / p.start, 0.1, p.passed))
        p = ex.probe_rotating(nf, 0.0, 0.024)
        checks.append(ex._check("rotating_unstable", p.end, math.inf, p.passed))
        p = ex.probe_standing(nf, 0.0, 0.024)
        checks.append(ex._check("standing_stable", p.end, math.inf, p.passed))
        report["sweep"] = [r.__dict__ for r in sweep.rows]
    return report
