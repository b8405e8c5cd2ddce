"""Cubic normal form of the O(2) Hopf bifurcation at an admissible
critical configuration: nonlinearity tensors, quadratic center-manifold
coefficients, the coefficients a(mu), b0, c0, the polar reduced flow and
the predicted bifurcated waves."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .center import CenterBasis, GroupElement, build_center_basis, synthesize
from .fields import FourierField
from .pressure_law import PressureLaw
from .spectral import CriticalConfig, mode_matrix


class SingularSolveError(ArithmeticError):
    pass


class DegenerateParameterError(ValueError):
    """(mu1, mu2) lies on a line of degeneracy, or b0r = 0."""


def theta_param(k0: int, mu1: float, mu2: float) -> float:
    return -mu1 * k0 * k0 + mu2


# ---------------------------------------------------------------- tensors
def _product(*fields: FourierField) -> np.ndarray:
    """Full-length coefficients of the pointwise product of the tau components."""
    c = fields[0].coeffs[0]
    for f in fields[1:]:
        c = np.convolve(c, f.coeffs[0])
    return c


def _flux_field(scale: float, prod: np.ndarray) -> FourierField:
    n = prod.size // 2
    k = np.arange(-n, n + 1)
    out = np.zeros((2, prod.size), complex)
    out[1] = scale * 1j * k * prod
    return FourierField(out)


@dataclass(frozen=True)
class NonlinearityTensors:
    """R11(U; mu1, mu2), R20(U, V), R30(U, V, W) acting on Fourier fields.

    R20(U, V) = (0, sigma''/2 d_x(U1 V1)), R30(U, V, W) = (0, sigma'''/6 d_x(U1 V1 W1)),
    R11(U; mu) = (-mu1 d_x^4 U1, -mu2 d_x^2 U2).
    """

    law: PressureLaw

    def r11(self, U: FourierField, mu1: float, mu2: float) -> FourierField:
        k = U.wavenumbers.astype(float)
        c = np.empty_like(U.coeffs)
        c[0] = -mu1 * k**4 * U.coeffs[0]
        c[1] = mu2 * k**2 * U.coeffs[1]
        return FourierField(c)

    def r20(self, U: FourierField, V: FourierField) -> FourierField:
        return _flux_field(0.5 * self.law.sp2, _product(U, V))

    def r30(self, U: FourierField, V: FourierField, W: FourierField) -> FourierField:
        return _flux_field(self.law.sp3 / 6.0, _product(U, V, W))


@dataclass(frozen=True)
class PsiCoefficient:
    index: tuple[int, int, int, int, int, int]
    field: FourierField
    residual: float = 0.0

    def vector(self, k: int) -> np.ndarray:
        return self.field.mode(k)


def _solve2(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    if abs(np.linalg.det(A)) <= 1e-14 * np.linalg.norm(A) ** 2:
        raise SingularSolveError("2x2 homological system is singular")
    return np.linalg.solve(A, b)


def psi200000_system(cfg: CriticalConfig, law: PressureLaw):
    """(A, rhs) with A = 2i omega_c - M_{2k0} and rhs the mode-2k0 part of R20(xi0, xi0)."""
    k0 = cfg.k0
    A = 2j * cfg.omega_c * np.eye(2) - mode_matrix(2 * k0, cfg.a_c, cfg.delta_c, cfg.sp1)
    return A, np.array([0.0, 1j * k0 * law.sp2])


def psi100100_system(cfg: CriticalConfig, law: PressureLaw):
    """(M_{2k0}, rhs) with rhs the mode-2k0 part of -2 R20(xi0, xi1*)."""
    k0 = cfg.k0
    A = mode_matrix(2 * k0, cfg.a_c, cfg.delta_c, cfg.sp1)
    return A, np.array([0.0, -2j * k0 * law.sp2])


def solve_psi_200000(cfg: CriticalConfig, tensors: NonlinearityTensors,
                     basis: Optional[CenterBasis] = None) -> PsiCoefficient:
    basis = basis or build_center_basis(cfg)
    k0 = cfg.k0
    A = 2j * cfg.omega_c * np.eye(2) - mode_matrix(2 * k0, cfg.a_c, cfg.delta_c, cfg.sp1)
    rhs = tensors.r20(basis.xi0, basis.xi0).mode(2 * k0)
    v = _solve2(A, rhs)
    res = float(np.linalg.norm(A @ v - rhs))
    return PsiCoefficient((2, 0, 0, 0, 0, 0), FourierField.single_mode(2 * k0, v), res)


def solve_psi_100100(cfg: CriticalConfig, tensors: NonlinearityTensors,
                     basis: Optional[CenterBasis] = None) -> PsiCoefficient:
    basis = basis or build_center_basis(cfg)
    k0 = cfg.k0
    A = mode_matrix(2 * k0, cfg.a_c, cfg.delta_c, cfg.sp1)
    rhs = -2.0 * tensors.r20(basis.xi0, basis.xi1.conj()).mode(2 * k0)
    w = _solve2(A, rhs)
    res = float(np.linalg.norm(A @ w - rhs))
    return PsiCoefficient((1, 0, 0, 1, 0, 0), FourierField.single_mode(2 * k0, w), res)


# ------------------------------------------------------ closed-form ledger
def denom_D(cfg: CriticalConfig) -> complex:
    k0, a, d, w, s1 = cfg.k0, cfg.a_c, cfg.delta_c, cfg.omega_c, cfg.sp1
    return -2 * s1 * k0 + (2j * w - 4 * d * k0**2 + 16 * k0**4) * (-1j * w / k0 - 8 * a * k0**3)


def denom_E(cfg: CriticalConfig) -> float:
    k0, a, d = cfg.k0, cfg.a_c, cfg.delta_c
    return cfg.sp1 - 16 * a * k0**4 * (d - 4 * k0**2)


def psi200000_closed_form(cfg: CriticalConfig, law: PressureLaw) -> np.ndarray:
    D = denom_D(cfg)
    k0 = cfg.k0
    return np.array([law.sp2 * k0 / D, law.sp2 * (cfg.omega_c - 8j * cfg.a_c * k0**4) / D])


def psi100100_closed_form(cfg: CriticalConfig, law: PressureLaw) -> np.ndarray:
    E = denom_E(cfg)
    return np.array([-law.sp2 / E, 8j * cfg.a_c * law.sp2 * cfg.k0**3 / E])


def alpha(cfg: CriticalConfig) -> float:
    k0, a, d, w, s1 = cfg.k0, cfg.a_c, cfg.delta_c, cfg.omega_c, cfg.sp1
    P = -2 * s1 * k0**2 + 2 * w * w - 32 * k0**8 * a * (3 - a)
    return P * P + 144 * k0**4 * w * w * d * d


def b0_closed_form(cfg: CriticalConfig, law: PressureLaw) -> complex:
    k0, w = cfg.k0, cfg.omega_c
    D = denom_D(cfg)
    return 1j * k0**3 * law.sp2**2 / (2 * w * D) + 1j * law.sp3 * k0**2 / (4 * w)


def b0r_closed_form(cfg: CriticalConfig, law: PressureLaw) -> float:
    return -6 * cfg.k0**6 * law.sp2**2 * cfg.delta_c / alpha(cfg)


def b0i_quadratic_closed_form(cfg: CriticalConfig, law: PressureLaw) -> float:
    """Quadratic-in-sigma'' part of Im b0 in rationalized form (no sigma''' term)."""
    k0, a, w, s1 = cfg.k0, cfg.a_c, cfg.omega_c, cfg.sp1
    return k0**4 * law.sp2**2 * (-s1 * k0**2 / w + w - 16 * k0**8 * a * (3 - a) / w) / alpha(cfg)


def b0i_cubic_part(cfg: CriticalConfig, law: PressureLaw) -> float:
    return law.sp3 * cfg.k0**2 / (4 * cfg.omega_c)


def c0_closed_form(cfg: CriticalConfig, law: PressureLaw) -> complex:
    k0, w = cfg.k0, cfg.omega_c
    return -1j * k0**2 * law.sp2**2 / (2 * w * denom_E(cfg)) + 1j * law.sp3 * k0**2 / (2 * w)


def yao_b(a: float, omega: float) -> complex:
    """Corrected coefficient for sigma = 1 + c^2 tau + tau^2 at k0 = 1."""
    q = 48 * a - 15 * a * a
    return (-6 * (a + 1) - 1j * q / omega) / (q * q + 36 * (a + 1) ** 2 * omega**2)


# --------------------------------------------------------- coefficients
def coeff_a(cfg: CriticalConfig, mu1: float, mu2: float) -> complex:
    """First-order eigenvalue shift <R11(xi0; mu), eta0> in closed form.

    Real part is k0^2 theta / 2.  The imaginary part is
    -a_c k0^6 (mu1 k0^2 + mu2) / (2 omega_c), which is not a function of
    theta alone unless a_c = 0 or mu1 = 0.
    """
    k0, a, w = cfg.k0, cfg.a_c, cfg.omega_c
    return k0**2 / (2 * w) * (-mu1 * k0**2 * (w + 1j * a * k0**4) + mu2 * (w - 1j * a * k0**4))


def coeff_a_projected(basis: CenterBasis, tensors: NonlinearityTensors, mu1: float, mu2: float) -> complex:
    return tensors.r11(basis.xi0, mu1, mu2).inner(basis.eta0)


def coeff_a_theta_form(cfg: CriticalConfig, mu1: float, mu2: float) -> complex:
    """(k0^2 / (2 omega_c)) (omega_c - i a_c k0^4) theta; agrees with coeff_a when mu1 = 0."""
    k0, a, w = cfg.k0, cfg.a_c, cfg.omega_c
    return k0**2 / (2 * w) * (w - 1j * a * k0**4) * theta_param(k0, mu1, mu2)


def coeff_b0(cfg: CriticalConfig, tensors: NonlinearityTensors,
             basis: Optional[CenterBasis] = None, psi200: Optional[PsiCoefficient] = None) -> complex:
    basis = basis or build_center_basis(cfg)
    psi200 = psi200 or solve_psi_200000(cfg, tensors, basis)
    quad, cub = coeff_b0_parts(basis, tensors, psi200)
    return quad + cub


def coeff_b0_parts(basis: CenterBasis, tensors: NonlinearityTensors, psi200: PsiCoefficient) -> tuple[complex, complex]:
    """(<2 R20(xi0*, Psi200000), eta0>, <3 R30(xi0, xi0, xi0*), eta0>)."""
    x0 = basis.xi0
    x0c = x0.conj()
    quad = (2.0 * tensors.r20(x0c, psi200.field)).inner(basis.eta0)
    cub = (3.0 * tensors.r30(x0, x0, x0c)).inner(basis.eta0)
    return quad, cub


def coeff_c0(cfg: CriticalConfig, tensors: NonlinearityTensors,
             basis: Optional[CenterBasis] = None, psi100100: Optional[PsiCoefficient] = None) -> complex:
    basis = basis or build_center_basis(cfg)
    psi = psi100100 or solve_psi_100100(cfg, tensors, basis)
    x0, x1 = basis.xi0, basis.xi1
    f = 2.0 * tensors.r20(x1, psi.field) + 6.0 * tensors.r30(x0, x1, x1.conj())
    return f.inner(basis.eta0)


# ------------------------------------------------------------ normal form
@dataclass(frozen=True)
class NormalForm:
    cfg: CriticalConfig
    law: PressureLaw
    basis: CenterBasis
    b0: complex
    c0: complex
    alpha: float
    psi200000: PsiCoefficient
    psi100100: PsiCoefficient

    @property
    def k0(self) -> int:
        return self.cfg.k0

    @property
    def omega_c(self) -> float:
        return self.cfg.omega_c

    def a_lin(self, mu1: float, mu2: float) -> complex:
        return coeff_a(self.cfg, mu1, mu2)

    def theta(self, mu1: float, mu2: float) -> float:
        return theta_param(self.k0, mu1, mu2)

    def to_json(self) -> dict:
        k0, a, w = self.k0, self.cfg.a_c, self.omega_c

        def cplx(z):
            return {"re": float(np.real(z)), "im": float(np.imag(z))}

        def psi(p: PsiCoefficient):
            m = 2 * k0
            v = p.field.mode(m)
            return {"k": m, "v1": cplx(v[0]), "v2": cplx(v[1]), "residual": p.residual}

        return {
            "k0": k0,
            "a_c": a,
            "delta_c": self.cfg.delta_c,
            "omega_c": w,
            "a_r_per_theta": k0**2 / 2.0,
            # imaginary part of a along mu2 (mu1 = 0), per unit theta
            "a_i_per_theta": -a * k0**6 / (2 * w) + 0.0,
            "a_i_per_mu1": -a * k0**8 / (2 * w) + 0.0,
            "a_i_per_mu2": -a * k0**6 / (2 * w) + 0.0,
            "b0": cplx(self.b0),
            "c0": cplx(self.c0),
            "alpha": self.alpha,
            "psi200000": psi(self.psi200000),
            "psi100100": psi(self.psi100100),
        }


def build_normal_form(cfg: CriticalConfig, law: PressureLaw) -> NormalForm:
    if abs(law.sp1 - cfg.sp1) > 1e-12 * max(1.0, abs(cfg.sp1)):
        raise ValueError("law's sigma'(0) does not match the critical configuration")
    tensors = NonlinearityTensors(law)
    basis = build_center_basis(cfg)
    p200 = solve_psi_200000(cfg, tensors, basis)
    p1001 = solve_psi_100100(cfg, tensors, basis)
    b0 = coeff_b0(cfg, tensors, basis, p200)
    c0 = coeff_c0(cfg, tensors, basis, p1001)
    return NormalForm(cfg, law, basis, b0, c0, alpha(cfg), p200, p1001)


# ------------------------------------------------------------ reduced flow
@dataclass(frozen=True)
class ReducedState:
    r1: float
    r2: float
    theta1: float = 0.0
    theta2: float = 0.0

    def __post_init__(self):
        if self.r1 < 0 or self.r2 < 0:
            raise ValueError("amplitudes must be nonnegative")

    @classmethod
    def from_complex(cls, z1: complex, z2: complex) -> "ReducedState":
        return cls(abs(z1), abs(z2), float(np.angle(z1)), float(np.angle(z2)))

    def to_complex(self) -> tuple[complex, complex]:
        return self.r1 * np.exp(1j * self.theta1), self.r2 * np.exp(1j * self.theta2)


def reduced_flow_rhs(nf: NormalForm, mu1: float, mu2: float, s: ReducedState) -> tuple[float, float, float, float]:
    """(dr1, dr2, dtheta1, dtheta2) of the cubic truncation (O(mu) corrections to b, c dropped)."""
    a = nf.a_lin(mu1, mu2)
    b, c = nf.b0, nf.c0
    q1, q2 = s.r1 * s.r1, s.r2 * s.r2
    dr1 = s.r1 * (a.real + b.real * q1 + c.real * q2)
    dr2 = s.r2 * (a.real + b.real * q2 + c.real * q1)
    dt1 = nf.omega_c + a.imag + b.imag * q1 + c.imag * q2
    dt2 = nf.omega_c + a.imag + b.imag * q2 + c.imag * q1
    return dr1, dr2, dt1, dt2


def reduced_flow_complex(nf: NormalForm, mu1: float, mu2: float, z: np.ndarray) -> np.ndarray:
    """Same flow in complex coordinates; z = (z1, z2)."""
    a = nf.a_lin(mu1, mu2)
    w = 1j * nf.omega_c + a
    q1, q2 = abs(z[0]) ** 2, abs(z[1]) ** 2
    return np.array([z[0] * (w + nf.b0 * q1 + nf.c0 * q2), z[1] * (w + nf.b0 * q2 + nf.c0 * q1)])


@dataclass(frozen=True)
class WavePrediction:
    family: str
    amplitude: float
    omega_star: float
    stability: str
    phases: tuple[float, float] = (0.0, 0.0)

    FAMILIES = ("equilibrium", "rotating_1", "rotating_2", "standing")

    def __post_init__(self):
        if self.family not in self.FAMILIES:
            raise ValueError(f"unknown family {self.family}")
        if (self.amplitude == 0) != (self.family == "equilibrium"):
            raise ValueError("amplitude must vanish exactly for the equilibrium")

    def center_coords(self, t: float = 0.0) -> tuple[complex, complex]:
        ph = np.exp(1j * self.omega_star * t)
        r1 = self.amplitude if self.family in ("rotating_1", "standing") else 0.0
        r2 = self.amplitude if self.family in ("rotating_2", "standing") else 0.0
        return r1 * ph * np.exp(1j * self.phases[0]), r2 * ph * np.exp(1j * self.phases[1])

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "amplitude": self.amplitude,
            "omega_star": self.omega_star,
            "stability": self.stability,
            "phases": list(self.phases),
        }


def r_star(nf: NormalForm, mu1: float, mu2: float) -> float:
    th = nf.theta(mu1, mu2)
    v = -nf.k0**2 * th / (2 * nf.b0.real)
    if not v > 0:
        raise DegenerateParameterError("no bifurcated branch on this side of the degeneracy line")
    return math.sqrt(v)


def predict_waves(nf: NormalForm, mu1: float, mu2: float, bound: float = 0.1,
                  phases: tuple[float, float] = (0.0, 0.0)) -> list[WavePrediction]:
    """Equilibrium plus, when theta * b0r < 0, the two rotating families and the standing family."""
    if abs(mu1) + abs(mu2) > bound:
        raise ValueError(f"|mu1| + |mu2| exceeds the small-parameter bound {bound}")
    th = nf.theta(mu1, mu2)
    br = nf.b0.real
    if th == 0:
        raise DegenerateParameterError("theta = 0: on a line of degeneracy")
    if br == 0:
        raise DegenerateParameterError("b0r = 0: cubic coefficient degenerate")
    a = nf.a_lin(mu1, mu2)
    w0 = nf.omega_c + a.imag
    eq_stable = th < 0
    out = [WavePrediction("equilibrium", 0.0, w0, "stable" if eq_stable else "unstable")]
    if th * br < 0:
        r = r_star(nf, mu1, mu2)
        rot_w = w0 + nf.b0.imag * r * r
        std_w = w0 + (nf.b0.imag + nf.c0.imag) * r * r
        std_stab = "stable" if br < 0 else "unstable"
        out.append(WavePrediction("rotating_1", r, rot_w, "unstable"))
        out.append(WavePrediction("rotating_2", r, rot_w, "unstable"))
        out.append(WavePrediction("standing", r, std_w, std_stab, tuple(phases)))
    return out


def standing_wave_orbit(nf: NormalForm, mu1: float, mu2: float, delta0: float, delta1: float,
                        t: float, N: Optional[int] = None) -> FourierField:
    waves = {w.family: w for w in predict_waves(nf, mu1, mu2)}
    if "standing" not in waves:
        raise DegenerateParameterError("no standing family at these parameters")
    w = waves["standing"]
    ph = w.omega_star * t
    z1 = w.amplitude * np.exp(1j * (ph + delta0))
    z2 = w.amplitude * np.exp(1j * (ph + delta1))
    return synthesize(nf.basis, z1, z2, N)


def standing_symmetry(k0: int, delta0: float, delta1: float) -> GroupElement:
    """Group element fixing the standing orbit with phases (delta0, delta1)."""
    return GroupElement((delta0 - delta1) / k0, True)
