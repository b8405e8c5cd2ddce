"""Pressure laws sigma(tau), their jets at the origin, and the rescalings
that bring the system to canonical form (half-period pi, eps = 1)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial


class DomainError(ValueError):
    """Raised when sigma is evaluated outside its validity radius."""


_EPS = np.finfo(float).eps


def _fd_jet(f: Callable, x0: float, radius: float) -> tuple[float, float, float]:
    # fourth-order central stencils; step per derivative order p is eps**(1/(p+4)),
    # which balances truncation h**4 against round-off eps/h**p
    h1 = _EPS ** (1 / 5) * radius
    h2 = _EPS ** (1 / 6) * radius
    h3 = _EPS ** (1 / 7) * radius

    def g(x):
        return float(f(x0 + x))

    d1 = (-g(2 * h1) + 8 * g(h1) - 8 * g(-h1) + g(-2 * h1)) / (12 * h1)
    d2 = (-g(2 * h2) + 16 * g(h2) - 30 * g(0.0) + 16 * g(-h2) - g(-2 * h2)) / (12 * h2**2)
    d3 = (
        -g(3 * h3) + 8 * g(2 * h3) - 13 * g(h3) + 13 * g(-h3) - 8 * g(-2 * h3) + g(-3 * h3)
    ) / (8 * h3**3)
    return d1, d2, d3


@dataclass(frozen=True)
class PressureLaw:
    """Flux function sigma with its jet (sigma'(0), sigma''(0), sigma'''(0)).

    Build with :meth:`polynomial`, :meth:`yao` or :meth:`from_callable`.
    ``coeffs`` is set only for polynomial laws and lets recentering and
    rescaling stay exact.
    """

    sigma: Callable = field(compare=False)
    jet: tuple[float, float, float]
    validity_radius: float = 1.0
    coeffs: Optional[tuple[float, ...]] = None
    name: str = "custom"

    def __post_init__(self):
        if not self.validity_radius > 0:
            raise ValueError("validity_radius must be positive")

    # -- constructors -------------------------------------------------
    @classmethod
    def polynomial(cls, coeffs: Sequence[float], validity_radius: float = math.inf, name="poly"):
        c = tuple(float(x) for x in coeffs)
        if not c:
            raise ValueError("polynomial law needs at least one coefficient")
        p = Polynomial(c)
        jet = tuple(float(p.deriv(m)(0.0)) if len(c) > m else 0.0 for m in (1, 2, 3))
        return cls(sigma=p, jet=jet, validity_radius=validity_radius, coeffs=c, name=name)

    @classmethod
    def yao(cls, c: float, validity_radius: float = math.inf):
        """sigma(tau) = 1 + c^2 tau + tau^2."""
        return cls.polynomial([1.0, c * c, 1.0], validity_radius=validity_radius, name="yao")

    @classmethod
    def from_callable(cls, sigma: Callable, jet=None, validity_radius: float = 1.0, name="custom"):
        """Wrap a closure; the jet is taken from ``jet`` if given, else finite differences."""
        if jet is None:
            jet = _fd_jet(sigma, 0.0, validity_radius)
        return cls(sigma=sigma, jet=tuple(float(x) for x in jet), validity_radius=validity_radius, name=name)

    # -- evaluation ---------------------------------------------------
    @property
    def sp1(self) -> float:
        return self.jet[0]

    @property
    def sp2(self) -> float:
        return self.jet[1]

    @property
    def sp3(self) -> float:
        return self.jet[2]

    @property
    def is_polynomial(self) -> bool:
        return self.coeffs is not None

    def _check(self, tau):
        m = np.max(np.abs(tau))
        if m > self.validity_radius:
            raise DomainError(f"|tau| = {m:g} exceeds validity radius {self.validity_radius:g}")

    def __call__(self, tau):
        self._check(tau)
        return self.sigma(tau)

    def fd_jet(self) -> tuple[float, float, float]:
        return _fd_jet(self.sigma, 0.0, self.validity_radius)

    def perturbation(self, tau, check: bool = True):
        """sigma(tau) - sigma(0) - sigma'(0) tau: the part of the flux feeding N(U)."""
        if check:
            self._check(tau)
        if self.coeffs is not None:
            c = self.coeffs
            if len(c) <= 2:
                return np.zeros_like(tau)
            # Horner on tau^2 * (c2 + c3 tau + ...)
            acc = c[-1]
            for cj in c[-2:1:-1]:
                acc = acc * tau + cj
            return acc * tau * tau
        return self.sigma(tau) - self.sigma(0.0) - self.sp1 * tau

    def recentered(self, tau0: float) -> "PressureLaw":
        return recenter(self, tau0)


def remainder_gamma(law: PressureLaw, tau):
    """Taylor remainder beyond the cubic term, O(tau^4) near 0.

    The linear term is subtracted as well as the quadratic and cubic ones
    (the linear part already sits in the linear operator).
    """
    tau_arr = np.asarray(tau, dtype=float)
    law._check(tau_arr)
    sp1, sp2, sp3 = law.jet
    if law.coeffs is not None:
        c = law.coeffs
        out = np.zeros_like(tau_arr)
        # only degree >= 4 survives; sum high terms directly to avoid cancellation
        for j in range(len(c) - 1, 3, -1):
            out = out + c[j] * tau_arr**j
        return out if np.ndim(tau) else float(out)
    val = law.sigma(tau_arr) - law.sigma(0.0) - sp1 * tau_arr - 0.5 * sp2 * tau_arr**2 - sp3 / 6.0 * tau_arr**3
    return val if np.ndim(tau) else float(val)


def recenter(law: PressureLaw, tau0: float) -> PressureLaw:
    """The law tau -> sigma(tau0 + tau), jet recomputed at the new origin."""
    if abs(tau0) >= law.validity_radius:
        raise DomainError(f"|tau0| = {abs(tau0):g} is not inside the validity radius")
    radius = law.validity_radius - abs(tau0)
    if law.coeffs is not None:
        p = Polynomial(law.coeffs)
        shifted = p(Polynomial([tau0, 1.0]))
        return PressureLaw.polynomial(shifted.coef, validity_radius=radius, name=law.name)
    f = law.sigma
    return PressureLaw.from_callable(lambda t: f(tau0 + t), validity_radius=radius, name=law.name)


@dataclass(frozen=True)
class DomainScaling:
    M: float
    eps: float
    a: float
    delta: float

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError("M must be positive")
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    @property
    def eps_bar(self) -> float:
        """Fourth-order coefficient after mapping the half-period to pi."""
        return (math.pi / self.M) ** 3 * self.eps


def canonicalize_domain(s: DomainScaling) -> tuple[float, float]:
    """Map half-period M to pi: returns (a_bar, delta_bar)."""
    r = math.pi / s.M
    return r**3 * s.a, r * s.delta


def canonicalize_epsilon(eps: float, a: float, delta: float, law: PressureLaw):
    """Rescale t and tau by eps so that the fourth-order u-diffusion is 1.

    Returns (a_tilde, delta_tilde, law_tilde) with
    law_tilde(tt) = sigma(tt / eps) / eps.
    """
    if eps == 0:
        raise ValueError("eps must be nonzero")
    if not eps > 0:
        raise ValueError("eps must be positive")
    inv = 1.0 / eps
    radius = law.validity_radius * eps
    if law.coeffs is not None:
        c = [cj * inv ** (j + 1) for j, cj in enumerate(law.coeffs)]
        new = PressureLaw.polynomial(c, validity_radius=radius, name=law.name)
    else:
        f = law.sigma
        sp1, sp2, sp3 = law.jet
        new = PressureLaw.from_callable(
            lambda t: inv * f(inv * t),
            jet=(sp1 * inv**2, sp2 * inv**3, sp3 * inv**4),
            validity_radius=radius,
            name=law.name,
        )
    return a * inv, delta * inv, new


def parse_law(value, validity_radius: float = math.inf) -> PressureLaw:
    """Law from a config value: coefficient list, ``"poly:c0,c1,.."``,
    ``"yao:c"`` or ``{"name": "yao", "c": ...}`` / ``{"poly": [...]}``.

    These are all polynomials, trusted everywhere unless a radius is given.
    """
    if isinstance(value, PressureLaw):
        return value
    if isinstance(value, (list, tuple)):
        return PressureLaw.polynomial(value, validity_radius=validity_radius)
    if isinstance(value, str):
        kind, _, rest = value.partition(":")
        kind = kind.strip().lower()
        if kind == "poly":
            vals = [float(x) for x in rest.split(",") if x.strip()]
            return PressureLaw.polynomial(vals, validity_radius=validity_radius)
        if kind == "yao":
            return PressureLaw.yao(float(rest), validity_radius=validity_radius)
        raise ValueError(f"unknown law {value!r}")
    if isinstance(value, dict):
        if value.get("name") == "yao":
            extra = set(value) - {"name", "c"}
            if extra or "c" not in value:
                raise ValueError("yao law takes exactly the key 'c'")
            return PressureLaw.yao(float(value["c"]), validity_radius=validity_radius)
        if set(value) == {"poly"}:
            return PressureLaw.polynomial(value["poly"], validity_radius=validity_radius)
        raise ValueError(f"unknown law {value!r}")
    raise ValueError(f"unknown law {value!r}")

