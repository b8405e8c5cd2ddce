"""Fourier-Galerkin integration of the canonical system with exact per-mode
linear propagation (exponential time differencing)."""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .center import CenterBasis, project_half
from .fields import FourierField
from .pressure_law import DomainError, PressureLaw
from .spectral import mode_matrix


class NumericalInstabilityError(ArithmeticError):
    """State blew up (non-finite or coefficient norm above the guard)."""

    def __init__(self, msg: str, t: Optional[float] = None):
        super().__init__(msg if t is None else f"{msg} at t = {t:.6g}")
        self.t = t


BLOWUP = 1e6
SCHEMES = ("etdrk4", "etdrk2")


@dataclass(frozen=True)
class SimConfig:
    N: int = 64
    dt: float = 1e-3 * 2 * math.pi
    T: float = 2 * math.pi
    a: float = 0.0
    delta: float = 1.0
    law: PressureLaw = field(default_factory=lambda: PressureLaw.polynomial([0.0, 1.0, 1.0]))
    dealias: bool = True
    record_stride: int = 1
    scheme: str = "etdrk4"
    store_states: bool = True

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError("T must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")

    @property
    def grid_size(self) -> int:
        # 4N + 4 points keep cubic products alias-free on |k| <= N
        return 4 * self.N + 4 if self.dealias else 2 * self.N + 2

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.T / self.dt - 1e-9))

    @property
    def step_size(self) -> float:
        """dt shrunk (if needed) so an integer number of steps lands on T."""
        return self.T / self.n_steps


# ------------------------------------------------------------ phi functions
_FACT = np.array([math.factorial(m) for m in range(40)], float)


def phi_scalar(z) -> np.ndarray:
    """exp(z), phi1(z), phi2(z), phi3(z) stacked along axis 0."""
    z = np.asarray(z, complex)
    out = np.empty((4,) + z.shape, complex)
    small = np.abs(z) < 1.0
    zs = np.where(small, z, 0.0)
    zb = np.where(small, 1.0, z)
    with np.errstate(over="ignore", invalid="ignore"):
        e = np.exp(z)
        big = [e, (e - 1) / zb, (e - 1 - zb) / zb**2, (e - 1 - zb - zb**2 / 2) / zb**3]
    for j in range(4):
        acc = np.zeros_like(zs)
        for m in range(30, -1, -1):
            acc = acc * zs + 1.0 / _FACT[m + j]
        out[j] = np.where(small, acc, big[j])
    out[0] = e
    return out


def _eig2(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    tr = A[:, 0, 0] + A[:, 1, 1]
    det = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
    s = np.sqrt(tr * tr / 4 - det + 0j)
    qp, qm = tr / 2 + s, tr / 2 - s
    q = np.where(np.abs(qp) >= np.abs(qm), qp, qm)
    safe = np.where(q == 0, 1.0, q)
    l2 = np.where(q == 0, 0.0, det / safe)
    return q, l2


def _phi_expm(A: np.ndarray) -> np.ndarray:
    # exp and phi_1..3 from the exponential of an augmented block matrix
    Z = np.zeros((8, 8), complex)
    Z[:2, :2] = A
    Z[:2, 2:4] = np.eye(2)
    Z[2:4, 4:6] = np.eye(2)
    Z[4:6, 6:8] = np.eye(2)
    F = expm(Z)
    return np.stack([F[:2, :2], F[:2, 2:4], F[:2, 4:6], F[:2, 6:8]])


def phi_matrices(A: np.ndarray) -> np.ndarray:
    """exp, phi1, phi2, phi3 of each 2x2 block in A (shape (K, 2, 2)); returns (4, K, 2, 2).

    Well-separated eigenvalues use the two-point interpolation
    f(A) = f(l2) I + (f(l1) - f(l2)) / (l1 - l2) (A - l2 I); nearly
    coincident ones fall back to an augmented matrix exponential.
    """
    A = np.asarray(A, complex)
    K = A.shape[0]
    l1, l2 = _eig2(A)
    f1, f2 = phi_scalar(l1), phi_scalar(l2)
    nrm = np.linalg.norm(A, axis=(1, 2))
    sep = np.abs(l1 - l2)
    ok = sep > 1e-2 * np.maximum(nrm, 1e-300)
    I = np.eye(2)
    out = np.empty((4, K, 2, 2), complex)
    d = np.where(ok, l1 - l2, 1.0)
    B = A - l2[:, None, None] * I
    # a_c < 0 leaves growing modes whose exponentials overflow; the step guard reports that
    with np.errstate(invalid="ignore", over="ignore"):
        for j in range(4):
            dd = np.where(ok, (f1[j] - f2[j]) / d, 0.0)
            out[j] = f2[j][:, None, None] * I + dd[:, None, None] * B
    for i in np.flatnonzero(~ok):
        out[:, i] = _phi_expm(A[i])
    return out


# ------------------------------------------------------------ solver
@dataclass
class Trajectory:
    times: np.ndarray
    center_track: np.ndarray
    half_states: Optional[np.ndarray]
    N: int
    final_half: Optional[np.ndarray] = None

    @property
    def states(self) -> list[FourierField]:
        if self.half_states is None:
            raise ValueError("states were not stored (store_states=False)")
        return [FourierField.from_half(h) for h in self.half_states]

    def state(self, i: int) -> FourierField:
        if self.half_states is None:
            raise ValueError("states were not stored (store_states=False)")
        return FourierField.from_half(self.half_states[i])

    @property
    def final(self) -> FourierField:
        return FourierField.from_half(self.final_half)

    def write_csv(self, path) -> None:
        if self.half_states is None:
            raise ValueError("states were not stored (store_states=False)")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "k", "re_tau", "im_tau", "re_u", "im_u"])
            for t, h in zip(self.times, self.half_states):
                for k in range(1, self.N + 1):
                    w.writerow([_g(t), k, _g(h[0, k].real), _g(h[0, k].imag), _g(h[1, k].real), _g(h[1, k].imag)])

    def write_center_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "re_z1", "im_z1", "re_z2", "im_z2"])
            for t, (z1, z2) in zip(self.times, self.center_track):
                w.writerow([_g(t), _g(z1.real), _g(z1.imag), _g(z2.real), _g(z2.imag)])


def _g(x: float) -> str:
    return "%.17g" % x


class GalerkinSolver:
    """Time stepper for one SimConfig; build through :func:`solver_for`."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        N = cfg.N
        self.k = np.arange(0, N + 1, dtype=float)
        h = cfg.step_size
        self.h = h
        M = mode_matrix(self.k[1:], cfg.a, cfg.delta, cfg.law.sp1)
        self.M = M
        full = phi_matrices(h * M)
        half = phi_matrices(0.5 * h * M)
        self.E = full[0]
        self.E2 = half[0]
        self.Q = 0.5 * h * half[1]
        self.f1 = h * (full[1] - 3 * full[2] + 4 * full[3])
        self.f2 = h * (full[2] - 2 * full[3])
        self.f3 = h * (-full[2] + 4 * full[3])
        self.p1 = h * full[1]
        self.p2 = h * full[2]
        self.n = cfg.grid_size

    # -- operators on half-spectrum arrays (2, N+1) --------------------
    @staticmethod
    def _apply(Ms: np.ndarray, U: np.ndarray) -> np.ndarray:
        out = np.zeros_like(U)
        out[:, 1:] = np.einsum("kij,jk->ik", Ms, U[:, 1:])
        return out

    def linear(self, U: np.ndarray) -> np.ndarray:
        return self._apply(self.M, U)

    def nonlinear(self, U: np.ndarray) -> np.ndarray:
        cfg = self.cfg
        out = np.zeros_like(U)
        if cfg.law.is_polynomial and len(cfg.law.coeffs) <= 2:
            return out
        n, N = self.n, cfg.N
        spec = np.zeros(n // 2 + 1, complex)
        spec[: N + 1] = U[0]
        spec[0] = 0.0
        tau = np.fft.irfft(spec, n) * n
        if np.max(np.abs(tau)) > cfg.law.validity_radius:
            raise DomainError(
                f"|tau| = {np.max(np.abs(tau)):g} exceeds validity radius {cfg.law.validity_radius:g}"
            )
        g = cfg.law.perturbation(tau, check=False)
        G = np.fft.rfft(g)[: N + 1] / n
        out[1] = 1j * self.k * G
        out[1, 0] = 0.0
        return out

    def rhs_half(self, U: np.ndarray) -> np.ndarray:
        return self.linear(U) + self.nonlinear(U)

    def step_half(self, U: np.ndarray) -> np.ndarray:
        ap = self._apply
        Nu = self.nonlinear(U)
        if self.cfg.scheme == "etdrk2":
            a = ap(self.E, U) + ap(self.p1, Nu)
            Na = self.nonlinear(a)
            return a + ap(self.p2, Na - Nu)
        EU = ap(self.E2, U)
        a = EU + ap(self.Q, Nu)
        Na = self.nonlinear(a)
        b = EU + ap(self.Q, Na)
        Nb = self.nonlinear(b)
        c = ap(self.E2, a) + ap(self.Q, 2 * Nb - Nu)
        Nc = self.nonlinear(c)
        return ap(self.E, U) + ap(self.f1, Nu) + 2 * ap(self.f2, Na + Nb) + ap(self.f3, Nc)

    def _guard(self, U: np.ndarray, t: float) -> None:
        m = np.max(np.abs(U))
        if not np.isfinite(m):
            raise NumericalInstabilityError("non-finite state", t)
        if m > BLOWUP:
            raise NumericalInstabilityError(f"coefficient magnitude {m:.3g} exceeds {BLOWUP:g}", t)

    def run(self, U0: np.ndarray, basis: Optional[CenterBasis] = None, n_steps: Optional[int] = None,
            t0: float = 0.0) -> Trajectory:
        cfg = self.cfg
        n_steps = cfg.n_steps if n_steps is None else n_steps
        U = np.array(U0, complex)
        U[:, 0] = 0.0
        stride = cfg.record_stride
        times, track, states = [], [], []

        def record(i, U):
            times.append(t0 + i * self.h)
            track.append(project_half(basis, U) if basis is not None else (np.nan, np.nan))
            if cfg.store_states:
                states.append(U.copy())

        record(0, U)
        for i in range(1, n_steps + 1):
            t = t0 + i * self.h
            try:
                U = self.step_half(U)
            except DomainError as e:
                raise DomainError(f"{e} at t = {t:.6g}") from e
            self._guard(U, t)
            if i % stride == 0 or i == n_steps:
                record(i, U)
        return Trajectory(
            np.array(times),
            np.array(track, complex),
            np.array(states) if cfg.store_states else None,
            cfg.N,
            U,
        )


@functools.lru_cache(maxsize=32)
def solver_for(cfg: SimConfig) -> GalerkinSolver:
    return GalerkinSolver(cfg)


def _half_of(cfg: SimConfig, U: FourierField) -> np.ndarray:
    if U.N > cfg.N:
        raise ValueError(f"field has N = {U.N} > simulation N = {cfg.N}")
    return U.resized(cfg.N).half()


def rhs(cfg: SimConfig, U: FourierField) -> FourierField:
    """L(a, delta) U + N(U), N(U) = (0, d_x sigma_pert(tau)) evaluated pseudo-spectrally."""
    s = solver_for(cfg)
    return FourierField.from_half(s.rhs_half(_half_of(cfg, U)))


def step(cfg: SimConfig, U: FourierField, dt: Optional[float] = None) -> FourierField:
    """One exponential step of size dt (default cfg.step_size)."""
    if dt is not None and dt != cfg.step_size:
        from dataclasses import replace

        cfg = replace(cfg, dt=dt, T=dt)
    s = solver_for(cfg)
    out = s.step_half(_half_of(cfg, U))
    s._guard(out, s.h)
    return FourierField.from_half(out)


def integrate(cfg: SimConfig, U0: FourierField, basis: Optional[CenterBasis] = None) -> Trajectory:
    return solver_for(cfg).run(_half_of(cfg, U0), basis)
