"""Mode-wise linear operator, its eigenvalues, admissibility of critical
configurations, spectral gap and resolvent norms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class SingularityError(ArithmeticError):
    """i*omega lies on the spectrum."""


def mode_matrix(k, a: float, delta: float, sp1: float) -> np.ndarray:
    """Fourier symbol M_k of L(a, delta); shape (2, 2) or (len(k), 2, 2)."""
    k = np.asarray(k, dtype=float)
    m = np.empty(k.shape + (2, 2), complex)
    k2 = k * k
    k4 = k2 * k2
    m[..., 0, 0] = -a * k4
    m[..., 0, 1] = 1j * k
    m[..., 1, 0] = 1j * sp1 * k
    m[..., 1, 1] = delta * k2 - k4
    return m


def char_coeffs(k, a, delta, sp1):
    """(b, c) in lambda^2 + b lambda + c = det(lambda - M_k)."""
    k2 = np.asarray(k, float) ** 2
    k4 = k2 * k2
    b = (a + 1.0) * k4 - delta * k2
    c = a * k4 * (k4 - delta * k2) + sp1 * k2
    return b, c


def _quadratic_roots(b: float, c: float) -> tuple[complex, complex]:
    disc = b * b - 4.0 * c
    if disc >= 0:
        s = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(s, b))
        if q == 0.0:
            return 0j, 0j
        r = (complex(q), complex(c / q))
    else:
        im = 0.5 * math.sqrt(-disc)
        re = -0.5 * b
        r = (complex(re, im), complex(re, -im))
    return r


def _order(r1: complex, r2: complex) -> tuple[complex, complex]:
    scale = max(abs(r1), abs(r2), 1.0)
    if abs(r1.real - r2.real) <= 1e-14 * scale:
        return (r1, r2) if r1.imag >= r2.imag else (r2, r1)
    return (r1, r2) if r1.real > r2.real else (r2, r1)


def mode_eigenvalues(k: int, a: float, delta: float, sp1: float) -> tuple[complex, complex]:
    """Both eigenvalues of M_k, descending real part then imaginary part."""
    if k == 0:
        raise ValueError("k must be nonzero")
    b, c = char_coeffs(k, a, delta, sp1)
    return _order(*_quadratic_roots(float(b), float(c)))


def critical_delta(k0: int, a_c: float) -> float:
    if k0 == 0:
        raise ValueError("k0 must be nonzero")
    return (a_c + 1.0) * k0 * k0


def critical_omega(k0: int, a_c: float, sp1: float) -> float:
    w2 = sp1 * k0**2 - a_c**2 * k0**8
    if w2 <= 0:
        raise ValueError("sp1 <= a_c^2 k0^6: no imaginary pair at k0")
    return math.sqrt(w2)


def resonance_function(k, a_c: float, delta_c: float):
    """a_c k^4 (k^2 - delta_c); a zero eigenvalue at k iff this equals -sp1."""
    k2 = np.asarray(k, float) ** 2
    return a_c * k2 * k2 * (k2 - delta_c)


@dataclass(frozen=True)
class CriticalConfig:
    k0: int
    a_c: float
    delta_c: float
    sp1: float
    omega_c: float
    nonresonance_checked_up_to: int
    tail_certified: bool

    def __post_init__(self):
        if self.k0 == 0:
            raise ValueError("k0 must be nonzero")

    @property
    def kk(self) -> int:
        return abs(self.k0)

    def with_k0_sign(self, k0: int) -> "CriticalConfig":
        return CriticalConfig(k0, self.a_c, self.delta_c, self.sp1, self.omega_c,
                              self.nonresonance_checked_up_to, self.tail_certified)

    def to_json(self) -> dict:
        return {
            "k0": self.k0,
            "a_c": self.a_c,
            "delta_c": self.delta_c,
            "sp1": self.sp1,
            "omega_c": self.omega_c,
            "nonresonance_checked_up_to": self.nonresonance_checked_up_to,
            "tail_certified": self.tail_certified,
        }


@dataclass(frozen=True)
class Rejection:
    """Why (k0, a_c, sp1) is not an admissible critical configuration."""

    clause: str
    k: Optional[int] = None
    detail: str = ""

    def __bool__(self):
        return False

    def to_json(self) -> dict:
        return {"clause": self.clause, "k": self.k, "detail": self.detail}


def default_scan_limit(k0: int) -> int:
    return max(64, 8 * abs(k0))


def nonresonance_margins(k0: int, a_c: float, sp1: float, ks) -> dict[int, float]:
    """g(k) + sp1 for each k; admissibility needs every margin nonzero."""
    delta_c = critical_delta(k0, a_c)
    ks = [int(k) for k in ks]
    g = resonance_function(np.array(ks, float), a_c, delta_c)
    return {k: float(gk + sp1) for k, gk in zip(ks, g)}


def check_admissible(k0: int, a_c: float, sp1: float, K: Optional[int] = None, rtol: float = 1e-12):
    """Build a :class:`CriticalConfig` or return a :class:`Rejection`.

    Modes 1 <= |k| <= K are checked explicitly; the tail |k| > K is
    certified only from monotonicity of a_c k^4 (k^2 - delta_c).  An
    uncertifiable tail is flagged on the config, not rejected.
    """
    if k0 == 0:
        return Rejection("k0 must be nonzero")
    K = default_scan_limit(k0) if K is None else int(K)
    if K < 4 * abs(k0):
        raise ValueError("scan limit K must be at least 4|k0|")
    delta_c = critical_delta(k0, a_c)
    if delta_c == 0:
        return Rejection("delta_c must be nonzero", detail="a_c = -1 gives delta_c = 0")
    if not sp1 > a_c * a_c * k0**6:
        return Rejection("sp1 <= a_c^2 k0^6", k=k0, detail=f"{sp1:g} <= {a_c * a_c * k0**6:g}")
    ks = np.arange(1, K + 1)
    ks = ks[ks != abs(k0)]
    g = resonance_function(ks, a_c, delta_c)
    margin = g + sp1
    bad = np.abs(margin) <= rtol * np.maximum(np.abs(g), abs(sp1))
    if np.any(bad):
        kb = int(ks[np.argmax(bad)])
        return Rejection("a_c k^4 (k^2 - delta_c) = -sp1", k=kb,
                         detail="zero eigenvalue at this mode")
    # tail: g is monotone in k for k^2 > 2 delta_c / 3
    monotone = (K + 1) ** 2 > 2.0 * delta_c / 3.0
    g_next = float(resonance_function(K + 1, a_c, delta_c))
    if a_c == 0:
        certified = True
    elif a_c > 0:
        certified = monotone and g_next > -sp1
    else:
        certified = monotone and g_next < -sp1
    omega_c = critical_omega(k0, a_c, sp1)
    return CriticalConfig(int(k0), float(a_c), float(delta_c), float(sp1), omega_c, K, bool(certified))


@dataclass
class ModeRecord:
    k: int
    lam1: complex
    lam2: complex


@dataclass
class SpectrumReport:
    cfg: CriticalConfig
    modes: list[ModeRecord]
    gap: float
    center_modes: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "k0": self.cfg.k0,
            "a_c": self.cfg.a_c,
            "delta_c": self.cfg.delta_c,
            "omega_c": self.cfg.omega_c,
            "modes": [
                {"k": m.k, "re1": m.lam1.real, "im1": m.lam1.imag, "re2": m.lam2.real, "im2": m.lam2.imag}
                for m in self.modes
            ],
            "gap": self.gap,
        }


def spectrum_report(cfg: CriticalConfig, K: int) -> SpectrumReport:
    if K < cfg.kk:
        raise ValueError("K must be at least |k0|")
    modes = []
    gap = math.inf
    for k in list(range(-K, 0)) + list(range(1, K + 1)):
        l1, l2 = mode_eigenvalues(k, cfg.a_c, cfg.delta_c, cfg.sp1)
        modes.append(ModeRecord(k, l1, l2))
        if abs(k) != cfg.kk:
            gap = min(gap, abs(l1.real), abs(l2.real))
    if not gap > 0:
        raise ArithmeticError("non-center eigenvalue on the imaginary axis")
    return SpectrumReport(cfg, modes, gap, [-cfg.kk, cfg.kk])


def resolvent_norm(cfg: CriticalConfig, omega: float, K: int, a=None, delta=None) -> float:
    """max over 1 <= |k| <= K of ||(i omega - M_k)^{-1}||_2.

    Modes k and -k have unitarily similar symbols, so only k > 0 is scanned.
    """
    a = cfg.a_c if a is None else a
    delta = cfg.delta_c if delta is None else delta
    if a == cfg.a_c and delta == cfg.delta_c and abs(abs(omega) - cfg.omega_c) <= 1e-12 * cfg.omega_c:
        raise SingularityError(f"i*omega = {omega}i is an eigenvalue")
    ks = np.arange(1, K + 1)
    m = 1j * omega * np.eye(2) - mode_matrix(ks, a, delta, cfg.sp1)
    smin = np.linalg.svd(m, compute_uv=False)[:, -1]
    if np.any(smin <= 1e-14 * np.linalg.norm(m, axis=(1, 2))):
        raise SingularityError(f"i*omega = {omega}i is (numerically) an eigenvalue")
    return float(np.max(1.0 / smin))
