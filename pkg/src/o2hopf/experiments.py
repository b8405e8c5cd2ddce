"""Validation campaigns: DNS sweeps, wave classification, frequency
extrapolation, stability probes, coefficient oracles and spectral checks."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from . import normal_form as nfm
from .center import build_center_basis, project_half, synthesize
from .fields import FourierField
from .galerkin import SimConfig, Trajectory, solver_for
from .pressure_law import PressureLaw
from .spectral import (
    CriticalConfig,
    Rejection,
    check_admissible,
    mode_eigenvalues,
    resolvent_norm,
    spectrum_report,
)

FAMILY_TOL = 0.05
PLATEAU_TOL = 0.01


# ------------------------------------------------------------ classification
@dataclass(frozen=True)
class WaveDiagnostics:
    r1_mean: float
    r2_mean: float
    omega_fit: float
    family_guess: str
    residual: float
    converged: bool

    @property
    def amplitude(self) -> float:
        """Plateau amplitude: the mean of r1 and r2 for standing waves, else the larger one."""
        if self.family_guess == "standing":
            return 0.5 * (self.r1_mean + self.r2_mean)
        return max(self.r1_mean, self.r2_mean)


def family_of(r1: float, r2: float, floor: float = 1e-6) -> str:
    big = max(r1, r2)
    if big <= floor:
        return "equilibrium"
    if abs(r1 - r2) <= FAMILY_TOL * big:
        return "standing"
    if r2 <= FAMILY_TOL * r1:
        return "rotating_1"
    if r1 <= FAMILY_TOL * r2:
        return "rotating_2"
    return "unclassified"


def plateau_defect(r: np.ndarray) -> float:
    """Relative change between the means of the two halves of a window."""
    h = len(r) // 2
    if h == 0:
        return math.inf
    m1, m2 = float(np.mean(r[:h])), float(np.mean(r[h:]))
    scale = max(m1, m2)
    return abs(m2 - m1) / scale if scale > 0 else 0.0


def classify_track(times: np.ndarray, track: np.ndarray, tail_fraction: float = 0.25,
                   floor: float = 1e-6) -> WaveDiagnostics:
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    n = len(times)
    m = max(4, int(round(n * tail_fraction)))
    t = np.asarray(times[-m:], float)
    z = np.asarray(track[-m:], complex)
    r1, r2 = np.abs(z[:, 0]), np.abs(z[:, 1])
    r1m, r2m = float(r1.mean()), float(r2.mean())
    fam = family_of(r1m, r2m, floor)
    if fam == "equilibrium":
        # converged once the tail is tiny and not growing
        conv = bool(np.max(np.maximum(r1[-m // 2 :], r2[-m // 2 :])) <= max(np.max(np.maximum(r1, r2)), floor))
        return WaveDiagnostics(r1m, r2m, math.nan, fam, 0.0, conv)
    zz = z[:, 0] if r1m >= FAMILY_TOL * r2m else z[:, 1]
    ph = np.unwrap(np.angle(zz))
    coef, res, *_ = np.polyfit(t, ph, 1, full=True)
    resid = math.sqrt(float(res[0]) / m) if len(res) else 0.0
    conv = max(plateau_defect(r1), plateau_defect(r2)) < PLATEAU_TOL
    return WaveDiagnostics(r1m, r2m, float(coef[0]), fam, resid, bool(conv))


def classify_trajectory(traj: Trajectory, tail_fraction: float = 0.25) -> WaveDiagnostics:
    return classify_track(traj.times, traj.center_track, tail_fraction)


# ------------------------------------------------------------ DNS runner
@dataclass(frozen=True)
class DNSSettings:
    N: int = 64
    steps_per_period: int = 128
    samples_per_period: int = 64
    T_max: float = 1e4
    horizon_factor: float = 50.0
    min_periods: float = 40.0
    chunk_periods: float = 40.0

    def dt(self, omega: float) -> float:
        return 2 * math.pi / omega / self.steps_per_period


@dataclass
class DNSRun:
    times: np.ndarray
    track: np.ndarray
    diagnostics: WaveDiagnostics
    final_half: np.ndarray
    mu: tuple[float, float]
    seed: Optional[int] = None


def sim_config(nf: nfm.NormalForm, mu1: float, mu2: float, settings: DNSSettings, T: float) -> SimConfig:
    cfg = nf.cfg
    dt = settings.dt(cfg.omega_c)
    stride = max(1, settings.steps_per_period // settings.samples_per_period)
    return SimConfig(
        N=settings.N, dt=dt, T=T, a=cfg.a_c + mu1, delta=cfg.delta_c + mu2, law=nf.law,
        record_stride=stride, store_states=False,
    )


def run_to_plateau(nf: nfm.NormalForm, mu1: float, mu2: float, U0: np.ndarray,
                   settings: DNSSettings = DNSSettings(), T_max: Optional[float] = None,
                   tail_fraction: float = 0.25) -> DNSRun:
    """Integrate in chunks until the center amplitudes plateau or T_max is reached.

    T_max defaults to horizon_factor / |a_r| capped at settings.T_max.
    """
    a_r = abs(nf.a_lin(mu1, mu2).real)
    if T_max is None:
        T_max = settings.T_max if a_r == 0 else min(settings.horizon_factor / a_r, settings.T_max)
    period = 2 * math.pi / nf.omega_c
    chunk = settings.chunk_periods * period
    cfg = sim_config(nf, mu1, mu2, settings, chunk)
    solver = solver_for(cfg)
    basis = nf.basis
    U = np.array(U0, complex)
    times = [np.array([0.0])]
    track = [np.array([project_half(basis, U)], complex)]
    t = 0.0
    diag = None
    while t < T_max - 1e-9:
        tr = solver.run(U, basis, t0=t)
        U = tr.final_half
        times.append(tr.times[1:])
        track.append(tr.center_track[1:])
        t = float(tr.times[-1])
        if t >= settings.min_periods * period:
            T = np.concatenate(times)
            Z = np.concatenate(track)
            diag = classify_track(T, Z, tail_fraction)
            if diag.converged:
                break
    T = np.concatenate(times)
    Z = np.concatenate(track)
    diag = classify_track(T, Z, tail_fraction)
    return DNSRun(T, Z, diag, U, (mu1, mu2))


def initial_state(nf: nfm.NormalForm, z1: complex, z2: complex, N: int, rel: float = 0.1,
                  seed: Optional[int] = 0) -> np.ndarray:
    """Center-space state plus a random perturbation of relative size ``rel`` on modes 1..3."""
    U = synthesize(nf.basis, z1, z2, N).half()
    if rel and seed is not None:
        rng = np.random.default_rng(seed)
        P = np.zeros_like(U)
        P[:, 1:4] = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
        scale = np.linalg.norm(U) if np.linalg.norm(U) > 0 else 1.0
        U = U + rel * scale * P / np.linalg.norm(P)
    return U


def predicted(nf: nfm.NormalForm, mu1: float, mu2: float, family: str) -> Optional[nfm.WavePrediction]:
    for w in nfm.predict_waves(nf, mu1, mu2):
        if w.family == family:
            return w
    return None


# ------------------------------------------------------------ sweeps
@dataclass(frozen=True)
class SweepRow:
    mu1: float
    mu2: float
    theta: float
    amplitude: float
    r_star: float
    omega: float
    omega_pred: float
    family: str
    converged: bool


@dataclass
class SweepResult:
    k0: int
    rows: list[SweepRow]
    seed: Optional[int] = None

    def check_theta(self) -> float:
        return max((abs(r.theta - nfm.theta_param(self.k0, r.mu1, r.mu2)) for r in self.rows), default=0.0)

    def slope(self) -> float:
        """Least-squares slope of log amplitude against log |theta|."""
        rows = [r for r in self.rows if r.amplitude > 0]
        x = np.log([abs(r.theta) for r in rows])
        y = np.log([r.amplitude for r in rows])
        return float(np.polyfit(x, y, 1)[0])

    def ratios(self) -> list[float]:
        return [r.amplitude / r.r_star if r.r_star > 0 else math.nan for r in self.rows]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["mu1", "mu2", "theta", "amplitude", "r_star", "omega", "omega_pred", "family", "converged"])
            for r in self.rows:
                w.writerow(["%.17g" % r.mu1, "%.17g" % r.mu2, "%.17g" % r.theta, "%.17g" % r.amplitude,
                            "%.17g" % r.r_star, "%.17g" % r.omega, "%.17g" % r.omega_pred, r.family,
                            str(r.converged).lower()])


def _sweep_point(args) -> SweepRow:
    k0, a_c, law_coeffs, mu1, mu2, settings, seed = args
    cfg = check_admissible(k0, a_c, law_coeffs[1])
    nf = nfm.build_normal_form(cfg, PressureLaw.polynomial(law_coeffs))
    th = nfm.theta_param(k0, mu1, mu2)
    std = predicted(nf, mu1, mu2, "standing")
    if std is not None:
        U0 = initial_state(nf, std.amplitude, std.amplitude, settings.N, 0.1, seed)
        r_pred, w_pred = std.amplitude, std.omega_star
    else:
        eq = predicted(nf, mu1, mu2, "equilibrium")
        r0 = math.sqrt(abs(nf.k0**2 * th / (2 * nf.b0.real)))
        U0 = initial_state(nf, r0, r0, settings.N, 0.1, seed)
        r_pred, w_pred = 0.0, eq.omega_star
    run = run_to_plateau(nf, mu1, mu2, U0, settings)
    d = run.diagnostics
    return SweepRow(mu1, mu2, th, d.amplitude if d.family_guess != "equilibrium" else 0.0, r_pred,
                    d.omega_fit, w_pred, d.family_guess, d.converged)


def amplitude_scaling_sweep(points: Sequence[tuple[float, float]], k0: int = 1, a_c: float = 0.0,
                            law_coeffs: Sequence[float] = (0.0, 1.0, 1.0),
                            settings: DNSSettings = DNSSettings(), jobs: int = 1,
                            seed: int = 0) -> SweepResult:
    """DNS at each (mu1, mu2); rows sorted by theta then mu1."""
    ths = [nfm.theta_param(k0, m1, m2) for m1, m2 in points]
    if any(abs(t) > 0.05 for t in ths):
        raise ValueError("|theta| must not exceed 0.05")
    if len({np.sign(t) for t in ths}) > 1 or 0 in ths:
        raise ValueError("sweep points must lie strictly on one side of the degeneracy line")
    cfg = check_admissible(k0, a_c, law_coeffs[1])
    if isinstance(cfg, Rejection):
        raise ValueError(f"inadmissible configuration: {cfg.clause}")
    tasks = [(k0, a_c, tuple(law_coeffs), m1, m2, settings, seed) for m1, m2 in points]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    rows.sort(key=lambda r: (r.theta, r.mu1))
    return SweepResult(k0, rows, seed)


def extrapolate_frequency(thetas: Sequence[float], omegas: Sequence[float], degree: int = 2) -> float:
    """Intercept at theta = 0 of a least-squares polynomial fit of omega(theta)."""
    th = np.asarray(thetas, float)
    om = np.asarray(omegas, float)
    deg = min(degree, len(th) - 1)
    return float(np.polynomial.polynomial.polyfit(th, om, deg)[0])


# ------------------------------------------------------------ stability probes
@dataclass
class ProbeResult:
    name: str
    passed: bool
    start: float
    end: float
    detail: dict = field(default_factory=dict)


def probe_equilibrium(nf: nfm.NormalForm, mu1: float, mu2: float, amp: float = 0.05,
                      settings: DNSSettings = DNSSettings(), T: Optional[float] = None, seed: int = 0) -> ProbeResult:
    """Small generic data at theta < 0 must decay."""
    U0 = initial_state(nf, amp, 0.6 * amp, settings.N, 0.1, seed)
    a_r = abs(nf.a_lin(mu1, mu2).real)
    T = T if T is not None else min(10.0 / a_r, settings.T_max)
    cfg = sim_config(nf, mu1, mu2, settings, T)
    tr = solver_for(cfg).run(U0, nf.basis)
    n0, n1 = float(np.linalg.norm(U0)), float(np.linalg.norm(tr.final_half))
    return ProbeResult("equilibrium_decays", n1 < 0.1 * n0, n0, n1, {"T": T})


def probe_rotating(nf: nfm.NormalForm, mu1: float, mu2: float, kick: float = 0.01,
                   settings: DNSSettings = DNSSettings(), T: Optional[float] = None) -> ProbeResult:
    """Start on rotating_1 with z2 = kick * r_*; the orbit must leave toward r1 = r2."""
    w = predicted(nf, mu1, mu2, "rotating_1")
    if w is None:
        raise ValueError("no rotating family at these parameters")
    U0 = initial_state(nf, w.amplitude, kick * w.amplitude, settings.N, 0.0, None)
    a_r = abs(nf.a_lin(mu1, mu2).real)
    T = T if T is not None else min(3 * math.log(1 / kick) / a_r, settings.T_max)
    run = run_to_plateau(nf, mu1, mu2, U0, settings, T_max=T)
    z = run.track
    q0 = abs(z[0, 1]) / abs(z[0, 0])
    d = classify_track(run.times, z, 0.1)
    q1 = d.r2_mean / d.r1_mean
    return ProbeResult("rotating_departs", bool(q1 > 0.5 and q1 > 10 * q0), float(q0), float(q1), {"family_end": d.family_guess, "T": float(run.times[-1])})


def probe_standing(nf: nfm.NormalForm, mu1: float, mu2: float, kick: float = 0.1,
                   settings: DNSSettings = DNSSettings(), T: Optional[float] = None) -> ProbeResult:
    """Start off the standing orbit (r1, r2) = r_* (1 + kick, 1 - kick); the asymmetry must shrink."""
    w = predicted(nf, mu1, mu2, "standing")
    if w is None:
        raise ValueError("no standing family at these parameters")
    U0 = initial_state(nf, w.amplitude * (1 + kick), w.amplitude * (1 - kick), settings.N, 0.0, None)
    a_r = abs(nf.a_lin(mu1, mu2).real)
    T = T if T is not None else min(5.0 / a_r, settings.T_max)
    run = run_to_plateau(nf, mu1, mu2, U0, settings, T_max=T)
    z = run.track
    asym0 = abs(abs(z[0, 0]) - abs(z[0, 1])) / max(abs(z[0, 0]), abs(z[0, 1]))
    d = classify_track(run.times, z, 0.1)
    asym1 = abs(d.r1_mean - d.r2_mean) / max(d.r1_mean, d.r2_mean)
    return ProbeResult("standing_returns", bool(d.family_guess == "standing" and asym1 < 0.25 * asym0), float(asym0), float(asym1),
                       {"family_end": d.family_guess})


# ------------------------------------------------------------ reduced vs full
@dataclass
class ReducedVsFull:
    mu: tuple[float, float]
    amplitudes: tuple[float, float]
    defects: tuple[float, float]
    ratio: float
    T: float

    @property
    def passed(self) -> bool:
        return self.ratio >= 3.0


def reduced_track(nf: nfm.NormalForm, mu1: float, mu2: float, z0: tuple[complex, complex], times: np.ndarray) -> np.ndarray:
    def f(t, y):
        z = y[:2] + 1j * y[2:]
        dz = nfm.reduced_flow_complex(nf, mu1, mu2, z)
        return np.concatenate([dz.real, dz.imag])

    y0 = np.array([z0[0].real, z0[1].real, z0[0].imag, z0[1].imag])
    sol = solve_ivp(f, (times[0], times[-1]), y0, t_eval=times, method="DOP853", rtol=1e-12, atol=1e-15)
    return (sol.y[:2] + 1j * sol.y[2:]).T


def center_defect(nf: nfm.NormalForm, mu1: float, mu2: float, a0: float, N: int = 32,
                  steps_per_period: int = 256, T: Optional[float] = None) -> float:
    """max_t |z_reduced - z_full| from U0 = a0 (xi0 + xi0* + xi1 + xi1*)."""
    T = 20.0 / nf.omega_c if T is None else T
    dt = 2 * math.pi / nf.omega_c / steps_per_period
    cfg = SimConfig(N=N, dt=dt, T=T, a=nf.cfg.a_c + mu1, delta=nf.cfg.delta_c + mu2, law=nf.law,
                    record_stride=1, store_states=False)
    U0 = synthesize(nf.basis, a0, a0, N).half()
    tr = solver_for(cfg).run(U0, nf.basis)
    zf = tr.center_track
    zr = reduced_track(nf, mu1, mu2, (complex(zf[0, 0]), complex(zf[0, 1])), tr.times)
    return float(np.max(np.abs(zr - zf)))


def reduced_vs_full(nf: nfm.NormalForm, mu1: float, mu2: float, a0: float = 0.05, **kw) -> ReducedVsFull:
    if a0 > 0.05:
        raise ValueError("a0 must be at most 0.05")
    d1 = center_defect(nf, mu1, mu2, a0, **kw)
    d2 = center_defect(nf, mu1, mu2, a0 / 2, **kw)
    return ReducedVsFull((mu1, mu2), (a0, a0 / 2), (d1, d2), d1 / d2 if d2 > 0 else math.inf,
                         kw.get("T") or 20.0 / nf.omega_c)


# ------------------------------------------------------------ oracle suite
def _check(name: str, measured: float, tolerance: float, passed: Optional[bool] = None) -> dict:
    ok = bool(measured <= tolerance) if passed is None else bool(passed)
    return {"name": name, "pass": ok, "measured": float(measured), "tolerance": float(tolerance)}


def a_oracle_errors(cfg: CriticalConfig, direction: tuple[float, float],
                    scales: Sequence[float] = (1e-2, 5e-3, 2.5e-3)) -> list[float]:
    """|lambda_+(M_k0(a_c + mu1, delta_c + mu2)) - i omega_c - a(mu)| along a scaled ray.

    mu = s omega_c (d1 / k0^4, d2 / k0^2), so the entries of M_k0 move by
    s omega_c (d1, d2) whatever k0 is; the ratio test then sits in its
    asymptotic range for every configuration.
    """
    k0 = abs(cfg.k0)
    out = []
    for s in scales:
        m1 = s * cfg.omega_c * direction[0] / k0**4
        m2 = s * cfg.omega_c * direction[1] / k0**2
        lam = mode_eigenvalues(cfg.k0, cfg.a_c + m1, cfg.delta_c + m2, cfg.sp1)[0]
        out.append(abs(lam - 1j * cfg.omega_c - nfm.coeff_a(cfg, m1, m2)))
    return out


def richardson_ratios(errs: Sequence[float]) -> list[float]:
    return [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]


def rel_err(x: complex, y: complex) -> float:
    return abs(x - y) / max(abs(y), 1e-300)


def coefficient_oracle_suite(cfg: CriticalConfig, law: PressureLaw, seed: int = 0) -> list[dict]:
    checks = []
    nf = nfm.build_normal_form(cfg, law)
    tensors = nfm.NonlinearityTensors(law)
    rng = np.random.default_rng(seed)
    d = rng.normal(size=2)
    d /= np.linalg.norm(d)
    rat = richardson_ratios(a_oracle_errors(cfg, (d[0], d[1])))
    checks.append(_check("a_eigenvalue_shift_ratio", max(abs(r - 4) / 4 for r in rat), 0.25))
    checks.append(_check("a_projection_vs_closed_form",
                         rel_err(nfm.coeff_a_projected(nf.basis, tensors, d[0], d[1]), nfm.coeff_a(cfg, d[0], d[1])),
                         1e-12))
    checks.append(_check("b0_vs_closed_form", rel_err(nf.b0, nfm.b0_closed_form(cfg, law)), 1e-12))
    if law.sp2 != 0:
        checks.append(_check("b0r_alpha_identity", rel_err(nf.b0.real, nfm.b0r_closed_form(cfg, law)), 1e-12))
        quad, _ = nfm.coeff_b0_parts(nf.basis, tensors, nf.psi200000)
        checks.append(_check("b0i_quadratic_identity", rel_err(quad.imag, nfm.b0i_quadratic_closed_form(cfg, law)), 1e-12))
    checks.append(_check("c0_vs_closed_form", rel_err(nf.c0, nfm.c0_closed_form(cfg, law)), 1e-12))
    checks.append(_check("c0_real_part_zero", abs(nf.c0.real), 1e-14 * max(1.0, abs(nf.c0))))
    A, rhs = nfm.psi200000_system(cfg, law)
    v = nf.psi200000.field.mode(2 * cfg.k0)
    checks.append(_check("psi200000_residual", float(np.linalg.norm(A @ v - rhs)), 1e-12))
    checks.append(_check("psi200000_closed_form", float(np.max(np.abs(v - nfm.psi200000_closed_form(cfg, law)))), 1e-12))
    A, rhs = nfm.psi100100_system(cfg, law)
    w = nf.psi100100.field.mode(2 * cfg.k0)
    checks.append(_check("psi100100_residual", float(np.linalg.norm(A @ w - rhs)), 1e-12))
    checks.append(_check("psi100100_closed_form", float(np.max(np.abs(w - nfm.psi100100_closed_form(cfg, law)))), 1e-12))
    # Yao regression at k0 = 1, sigma = 1 + c^2 tau + tau^2
    for a in (0.0, 0.1, 0.2, 0.3, 0.4):
        c = 1.0
        ycfg = check_admissible(1, a, c * c)
        ynf = nfm.build_normal_form(ycfg, PressureLaw.yao(c))
        checks.append(_check(f"yao_regression_a={a}", rel_err(ynf.b0, nfm.yao_b(a, ycfg.omega_c)), 1e-12))
    return checks


# ------------------------------------------------------------ spectral checks
def resolvent_decay(cfg: CriticalConfig, K: int = 64, n: int = 50, omega_max: float = 1e4) -> dict:
    ws = np.logspace(math.log10(2 * cfg.omega_c), math.log10(omega_max), n)
    vals = np.array([w * resolvent_norm(cfg, w, K) for w in ws])
    bound = 10 * vals[0]
    return {"omegas": ws.tolist(), "scaled": vals.tolist(), "max_ratio": float(vals.max() / vals[0]),
            "pass": bool(np.all(vals <= bound))}


def spectral_gap_check(cfg: CriticalConfig, K: int = 64) -> dict:
    rep = spectrum_report(cfg, K)
    return {"gap": rep.gap, "pass": rep.gap > 0}
