"""Two-component mean-zero periodic fields on [-pi, pi) in Fourier form."""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


class FourierField:
    """Field U(x) = sum_k c_k exp(ikx), |k| <= N, with c_0 = 0.

    ``coeffs`` has shape (2, 2N+1); row 0 is tau, row 1 is u, and column
    ``N + k`` holds wave number k.  Inner products follow
    <U, V> = int (u1 v1* + u2 v2*) dx = 2 pi sum_k c_k . conj(d_k).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[0] != 2 or c.shape[1] % 2 != 1:
            raise ValueError(f"coefficients must have shape (2, 2N+1), got {c.shape}")
        n = c.shape[1] // 2
        if np.any(c[:, n] != 0):
            raise ValueError("field must be mean-zero (k = 0 coefficient nonzero)")
        self.coeffs = c

    # -- construction -------------------------------------------------
    @classmethod
    def zeros(cls, N: int) -> "FourierField":
        return cls(np.zeros((2, 2 * N + 1), complex))

    @classmethod
    def single_mode(cls, k: int, vec, N: int | None = None) -> "FourierField":
        if k == 0:
            raise ValueError("mode 0 is excluded")
        N = abs(k) if N is None else N
        if abs(k) > N:
            raise ValueError(f"mode {k} does not fit in N = {N}")
        c = np.zeros((2, 2 * N + 1), complex)
        c[:, N + k] = vec
        return cls(c)

    @classmethod
    def from_half(cls, half) -> "FourierField":
        """Real field from its k >= 0 coefficients (shape (2, N+1))."""
        half = np.asarray(half, complex)
        N = half.shape[1] - 1
        c = np.zeros((2, 2 * N + 1), complex)
        c[:, N + 1 :] = half[:, 1:]
        c[:, :N] = np.conj(half[:, :0:-1])
        return cls(c)

    @classmethod
    def from_physical(cls, values, N: int) -> "FourierField":
        """Project grid values on x_j = 2 pi j / n onto |k| <= N, dropping the mean."""
        values = np.asarray(values)
        n = values.shape[-1]
        if n < 2 * N + 1:
            raise ValueError("grid too coarse for requested N")
        f = np.fft.fft(values, axis=-1) / n
        c = np.zeros((2, 2 * N + 1), complex)
        c[:, N + 1 :] = f[:, 1 : N + 1]
        c[:, :N] = f[:, n - N :]
        return cls(c)

    # -- basic properties ----------------------------------------------
    @property
    def N(self) -> int:
        return self.coeffs.shape[1] // 2

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def mode(self, k: int) -> np.ndarray:
        if abs(k) > self.N:
            return np.zeros(2, complex)
        return self.coeffs[:, self.N + k].copy()

    def support(self, tol: float = 0.0) -> list[int]:
        mags = np.abs(self.coeffs).max(axis=0)
        return [int(k) for k, m in zip(self.wavenumbers, mags) if m > tol]

    def half(self) -> np.ndarray:
        """k >= 0 coefficients (shape (2, N+1)); meaningful for real fields."""
        return self.coeffs[:, self.N :].copy()

    def resized(self, N: int) -> "FourierField":
        """Zero-pad or truncate to |k| <= N."""
        c = np.zeros((2, 2 * N + 1), complex)
        m = min(N, self.N)
        c[:, N - m : N + m + 1] = self.coeffs[:, self.N - m : self.N + m + 1]
        return FourierField(c)

    def conj(self) -> "FourierField":
        """Pointwise complex conjugate U*(x): c_k -> conj(c_{-k})."""
        return FourierField(np.conj(self.coeffs[:, ::-1]))

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.coeffs - np.conj(self.coeffs[:, ::-1])), initial=0.0) <= tol)

    def reality_defect(self) -> float:
        return float(np.max(np.abs(self.coeffs - np.conj(self.coeffs[:, ::-1])), initial=0.0))

    def inner(self, other: "FourierField") -> complex:
        n = max(self.N, other.N)
        a, b = self.resized(n).coeffs, other.resized(n).coeffs
        return complex(TWO_PI * np.sum(a * np.conj(b)))

    def norm(self) -> float:
        return math.sqrt(TWO_PI * float(np.sum(np.abs(self.coeffs) ** 2)))

    def to_physical(self, n: int) -> np.ndarray:
        """Values on x_j = 2 pi j / n, shape (2, n); complex unless the field is real."""
        if n < 2 * self.N + 1:
            raise ValueError("grid too coarse")
        f = np.zeros((2, n), complex)
        N = self.N
        f[:, : N + 1] = self.coeffs[:, N:]
        f[:, n - N :] = self.coeffs[:, :N]
        vals = np.fft.ifft(f, axis=-1) * n
        return vals.real if self.is_real(1e-14 * (1 + self.norm())) else vals

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        phase = np.exp(1j * np.multiply.outer(x, self.wavenumbers))
        return self.coeffs @ phase.T

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if not isinstance(other, FourierField):
            return NotImplemented
        n = max(self.N, other.N)
        return self.resized(n).coeffs, other.resized(n).coeffs

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        return FourierField(pair[0] + pair[1])

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        return FourierField(pair[0] - pair[1])

    def __mul__(self, s):
        if isinstance(s, FourierField):
            return NotImplemented
        return FourierField(self.coeffs * complex(s))

    __rmul__ = __mul__

    def __neg__(self):
        return FourierField(-self.coeffs)

    def __repr__(self):
        return f"FourierField(N={self.N}, support={self.support(1e-300)})"

    def allclose(self, other: "FourierField", atol: float = 1e-12) -> bool:
        return float(np.max(np.abs((self - other).coeffs), initial=0.0)) <= atol

    def to_json(self) -> dict:
        sup = self.support()
        return {
            "modes": [
                {
                    "k": k,
                    "re_tau": self.coeffs[0, self.N + k].real,
                    "im_tau": self.coeffs[0, self.N + k].imag,
                    "re_u": self.coeffs[1, self.N + k].real,
                    "im_u": self.coeffs[1, self.N + k].imag,
                }
                for k in sup
            ]
        }
