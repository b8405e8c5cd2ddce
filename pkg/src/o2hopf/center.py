"""Center eigenfunctions, their duals, center coordinates and the O(2) action."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import TWO_PI, FourierField
from .spectral import CriticalConfig, mode_matrix


def eigvec_xi(cfg: CriticalConfig) -> np.ndarray:
    """Component vector of xi0 at mode k0: (1, omega/k0 - i a k0^3)."""
    k0 = cfg.k0
    return np.array([1.0, cfg.omega_c / k0 - 1j * cfg.a_c * k0**3])


def eigvec_eta(cfg: CriticalConfig) -> np.ndarray:
    """Component vector of eta0 at mode k0."""
    k0 = cfg.k0
    c = k0 / (2.0 * TWO_PI * cfg.omega_c)
    return c * np.array([-1j * cfg.a_c * k0**3 + cfg.omega_c / k0, 1.0])


def _kernel_vector(B: np.ndarray) -> np.ndarray:
    # null vector of a rank-one 2x2 matrix, taken from its larger row
    r = B[0] if np.linalg.norm(B[0]) >= np.linalg.norm(B[1]) else B[1]
    v = np.array([r[1], -r[0]])
    return v / np.linalg.norm(v)


def dual_vector(k: int, lam: complex, xi: np.ndarray, a: float, delta: float, sp1: float) -> np.ndarray:
    """eta with (lam - M_k)^H eta = 0 and 2 pi xi . conj(eta) = 1."""
    B = (lam * np.eye(2) - mode_matrix(k, a, delta, sp1)).conj().T
    w = _kernel_vector(B)
    pair = TWO_PI * np.dot(xi, np.conj(w))
    if abs(pair) < 1e-12:
        raise ArithmeticError("eigenvalue is not simple: eigenvector orthogonal to adjoint kernel")
    return w * np.conj(1.0 / pair)


@dataclass(frozen=True)
class CenterBasis:
    cfg: CriticalConfig
    xi0: FourierField
    xi1: FourierField
    eta0: FourierField
    eta1: FourierField
    biorth: np.ndarray

    @property
    def k0(self) -> int:
        return self.cfg.k0

    @property
    def vectors(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Mode vectors (xi0 at k0, xi1 at -k0, eta0 at k0, eta1 at -k0)."""
        k0 = self.k0
        return self.xi0.mode(k0), self.xi1.mode(-k0), self.eta0.mode(k0), self.eta1.mode(-k0)

    def primal(self) -> list[FourierField]:
        return [self.xi0, self.xi0.conj(), self.xi1, self.xi1.conj()]

    def dual(self) -> list[FourierField]:
        return [self.eta0, self.eta0.conj(), self.eta1, self.eta1.conj()]

    def eigen_residuals(self) -> dict[str, float]:
        """Per-mode 2-norm residuals of the eigen and adjoint-eigen relations."""
        c, k0, w = self.cfg, self.k0, self.cfg.omega_c
        xi0, xi1, eta0, eta1 = self.vectors
        A = lambda k: 1j * w * np.eye(2) - mode_matrix(k, c.a_c, c.delta_c, c.sp1)
        return {
            "xi0": float(np.linalg.norm(A(k0) @ xi0)),
            "xi1": float(np.linalg.norm(A(-k0) @ xi1)),
            "eta0": float(np.linalg.norm(A(k0).conj().T @ eta0)),
            "eta1": float(np.linalg.norm(A(-k0).conj().T @ eta1)),
        }

    def to_json(self) -> dict:
        return {
            "k0": self.k0,
            "xi0": self.xi0.to_json(),
            "xi1": self.xi1.to_json(),
            "eta0": self.eta0.to_json(),
            "eta1": self.eta1.to_json(),
        }


def build_center_basis(cfg: CriticalConfig) -> CenterBasis:
    k0 = cfg.k0
    N = abs(k0)
    v = eigvec_xi(cfg)
    xi0 = FourierField.single_mode(k0, v, N)
    xi1 = FourierField.single_mode(-k0, np.array([v[0], -v[1]]), N)
    eta0 = FourierField.single_mode(k0, eigvec_eta(cfg), N)
    e1 = dual_vector(-k0, 1j * cfg.omega_c, xi1.mode(-k0), cfg.a_c, cfg.delta_c, cfg.sp1)
    eta1 = FourierField.single_mode(-k0, e1, N)
    P = [xi0, xi0.conj(), xi1, xi1.conj()]
    D = [eta0, eta0.conj(), eta1, eta1.conj()]
    gram = np.array([[p.inner(d) for d in D] for p in P])
    return CenterBasis(cfg, xi0, xi1, eta0, eta1, gram)


def project_center(basis: CenterBasis, U: FourierField) -> tuple[complex, complex]:
    return U.inner(basis.eta0), U.inner(basis.eta1)


def project_half(basis: CenterBasis, half: np.ndarray) -> tuple[complex, complex]:
    """Center coordinates of a real field given by its k >= 0 coefficients."""
    k0 = basis.k0
    _, _, e0, e1 = basis.vectors
    kk = abs(k0)
    if kk >= half.shape[-1]:
        return 0j, 0j
    cp = half[..., kk]
    # mode -kk of a real field is conj of mode +kk
    c_k0 = cp if k0 > 0 else np.conj(cp)
    c_mk0 = np.conj(c_k0)
    z1 = TWO_PI * np.sum(c_k0 * np.conj(e0), axis=-1)
    z2 = TWO_PI * np.sum(c_mk0 * np.conj(e1), axis=-1)
    return z1, z2


def synthesize(basis: CenterBasis, z1: complex, z2: complex, N: int | None = None) -> FourierField:
    """Real center-space field z1 xi0 + z2 xi1 + c.c."""
    N = abs(basis.k0) if N is None else N
    U = z1 * basis.xi0 + z2 * basis.xi1
    U = U + U.conj()
    return U.resized(N)


@dataclass(frozen=True)
class GroupElement:
    """g = T_h S^reflect, acting on U by first reflecting (if set), then translating."""

    h: float = 0.0
    reflect: bool = False

    def __post_init__(self):
        object.__setattr__(self, "h", _wrap(self.h))

    @classmethod
    def translation(cls, h: float) -> "GroupElement":
        return cls(h, False)

    @classmethod
    def reflection(cls) -> "GroupElement":
        return cls(0.0, True)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        # T_a S^r T_b S^s = T_{a + (-1)^r b} S^{r xor s}
        sign = -1.0 if self.reflect else 1.0
        return GroupElement(self.h + sign * other.h, self.reflect ^ other.reflect)

    def inverse(self) -> "GroupElement":
        if self.reflect:
            return self
        return GroupElement(-self.h, False)


def _wrap(h: float) -> float:
    return (h + math.pi) % TWO_PI - math.pi


def reflect(U: FourierField) -> FourierField:
    c = U.coeffs[:, ::-1].copy()
    c[1] = -c[1]
    return FourierField(c)


def translate(U: FourierField, h: float) -> FourierField:
    return FourierField(U.coeffs * np.exp(1j * U.wavenumbers * h))


def apply_group(g: GroupElement, U: FourierField) -> FourierField:
    V = reflect(U) if g.reflect else U
    return translate(V, g.h) if g.h != 0.0 else V
