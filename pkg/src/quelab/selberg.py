"""Selberg transform of the normalized characteristic ball kernel.

The averaging operator over a geodesic R-ball in H^n acts on a Laplace
eigenfunction with spectral parameter t as multiplication by

    h(t) = I(t) / I(t0),    I(t) = integral_0^R (cosh R - cosh u)^{(n-1)/2} cos(tu) du,

with t0 = i(n-1)/2 the parameter of the constant eigenfunction, so h(t0) = 1
by construction.  Three routes: direct quadrature (with a Filon-type scheme
once Rt is large), the H^3 closed form, and the small-R Bessel asymptotic.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._quad import gauss_legendre, gl_nodes
from .geometry import GeodesicBall, ball_quadrature, ball_volume
from .specfun import bessel_J

__all__ = [
    "BallKernel",
    "SpectralParameter",
    "h_char",
    "h_closed_h3",
    "h_bessel_asym",
    "mean_value_apply",
]


@dataclass(frozen=True)
class BallKernel:
    n: int
    R: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("dimension must be >= 2")
        if not self.R > 0.0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class SpectralParameter:
    """t with eigenvalue ((n-1)/2)^2 + t^2; constants sit at t = i(n-1)/2."""

    t: complex

    def __post_init__(self) -> None:
        t = complex(self.t)
        if t.imag < -1e-12 or t.imag > 4.0 + 1e-12:
            raise ValueError("Im t must lie in the strip [0, (n-1)/2], n <= 9")


def _as_t(t) -> complex:
    return complex(t.t) if isinstance(t, SpectralParameter) else complex(t)


# ----------------------------------------------------------------------------
# Direct quadrature of I(t).  The substitution u = R(1 - x^2) makes the
# integrand analytic: (cosh R - cosh u)^m = x^{2m} g(x^2)^m with g > 0.


def _amplitude_integral_smooth(R: float, m: float, t: complex) -> complex:
    freq = abs(t.real) * R
    nodes = int(1.4 * freq) + 48
    x, w = gauss_legendre(nodes)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    u = R * (1.0 - x * x)
    amp = np.power(math.cosh(R) - np.cosh(u), m) * (2.0 * R * x)
    if t.imag == 0.0 and t.real >= 0.0:
        return float(np.dot(amp * np.cos(t.real * u), w))
    phase = np.cos(t * u.astype(complex))
    return complex(np.dot(amp * phase, w))


# Filon panels: degree-7 interpolation at Chebyshev points, exact moments.
_FILON_SIGMA = 0.5 * (1.0 - np.cos(np.arange(8) * math.pi / 7.0))
_FILON_VINV = np.linalg.inv(np.vander(_FILON_SIGMA, 8, increasing=True))


def _filon_moments(theta: float, phi: float) -> np.ndarray:
    """C_k = integral_0^1 sigma^k cos(theta sigma + phi) d sigma, k = 0..7."""
    C = np.empty(8)
    S = np.empty(8)
    sin_top = math.sin(theta + phi)
    cos_top = math.cos(theta + phi)
    C[0] = (sin_top - math.sin(phi)) / theta
    S[0] = (math.cos(phi) - cos_top) / theta
    for k in range(1, 8):
        C[k] = sin_top / theta - k * S[k - 1] / theta
        S[k] = -cos_top / theta + k * C[k - 1] / theta
    return C


def _amplitude_integral_filon(R: float, m: float, t: float) -> float:
    # oscillatory main piece on [0, R - delta], square-root tail on the rest
    delta = min(0.5 * R, 4.0 * math.pi / t)
    right = R - delta
    h = math.pi / t
    npanels = max(1, math.ceil(right / h))
    h = right / npanels
    cosh_R = math.cosh(R)
    total = 0.0
    for j in range(npanels):
        a = j * h
        u = a + h * _FILON_SIGMA
        amp = np.power(cosh_R - np.cosh(u), m)
        coeffs = _FILON_VINV @ amp
        total += h * float(np.dot(coeffs, _filon_moments(t * h, t * a)))
    # v = R - u = w^2 removes the (R - u)^m endpoint behavior for all m
    wmax = math.sqrt(delta)
    x, wq = gl_nodes(0.0, wmax, 48)
    amp = np.power(cosh_R - np.cosh(R - x * x), m) * (2.0 * x)
    total += float(np.dot(amp * np.cos(t * (R - x * x)), wq))
    return total


def _amplitude_integral(R: float, m: float, t: complex) -> complex:
    if t.imag == 0.0 and abs(t.real) * R > 50.0:
        return _amplitude_integral_filon(R, m, abs(t.real))
    return _amplitude_integral_smooth(R, m, t)


def h_char(kernel: BallKernel, t) -> complex:
    """Selberg transform of the ball kernel, normalized so h(i(n-1)/2) = 1."""
    tv = _as_t(t)
    half = 0.5 * (kernel.n - 1)
    if tv.imag > half + 1e-9:
        raise ValueError("spectral parameter outside the admitted strip")
    m = half  # exponent (n-1)/2 of the amplitude
    denom = _amplitude_integral(kernel.R, m, complex(0.0, half))
    num = _amplitude_integral(kernel.R, m, tv)
    return num / denom


def h_closed_h3(R: float, t) -> complex:
    """Closed form of h_char for n = 3; exact up to rounding.

    h = 4 pi (cosh R sin(tR) - t sinh R cos(tR)) / ((1 + t^2) t vol(B_R)),
    with series fallbacks at the removable points t = 0 and t = i.
    """
    if not R > 0.0:
        raise ValueError("radius must be positive")
    tv = complex(t)
    vol = math.pi * (math.sinh(2.0 * R) - 2.0 * R)
    cosh_R, sinh_R = math.cosh(R), math.sinh(R)
    if abs(tv) < 1e-3:
        c0 = R * cosh_R - sinh_R
        c1 = -(R**3) * cosh_R / 6.0 + R * R * sinh_R / 2.0
        c2 = (R**5) * cosh_R / 120.0 - (R**4) * sinh_R / 24.0
        t2 = tv * tv
        val = 4.0 * math.pi * (c0 + c1 * t2 + c2 * t2 * t2) / ((1.0 + t2) * vol)
        return val.real if tv.imag == 0.0 else val
    if abs(tv - 1j) < 1e-3:
        eps = tv - 1j
        d1 = -vol / (2.0 * math.pi)
        d2 = 2j * R * sinh_R * sinh_R
        d3 = -(R**3) + 1.5 * R * R * math.sinh(2.0 * R)
        num = d1 + eps * d2 / 2.0 + eps * eps * d3 / 6.0
        return 4.0 * math.pi * num / (vol * (-2.0 + 3j * eps + eps * eps))
    if tv.imag == 0.0:
        x = tv.real * R
        num = cosh_R * math.sin(x) - tv.real * sinh_R * math.cos(x)
        return 4.0 * math.pi * num / ((1.0 + tv.real**2) * tv.real * vol)
    num = cosh_R * cmath.sin(tv * R) - tv * sinh_R * cmath.cos(tv * R)
    return 4.0 * math.pi * num / ((1.0 + tv * tv) * tv * vol)


def h_bessel_asym(kernel: BallKernel, t: float) -> float:
    """Small-R asymptotic Gamma(n/2+1) (2/(Rt))^{n/2} J_{n/2}(Rt).

    This is the R -> 0 limit of h_char's ratio; accurate to O(R^2) plus the
    Bessel envelope (Rt)^{-(n+1)/2}.
    """
    x = kernel.R * t
    if x < 5.0 or kernel.R > 0.2:
        raise ValueError("asymptotic regime needs R*t >= 5 and R <= 0.2")
    nu = 0.5 * kernel.n
    return math.gamma(nu + 1.0) * (2.0 / x) ** nu * bessel_J(nu, x)


def mean_value_apply(n: int, ball: GeodesicBall, eigenfunction, t,
                     order: int = 32) -> tuple[complex, complex]:
    """Ball average of an eigenfunction next to its predicted value.

    Returns (avg, predicted) where avg is the quadrature mean over the ball
    and predicted = h_char(t) * eigenfunction(center).
    """
    if n != ball.dimension:
        raise ValueError("dimension mismatch with the ball")
    vol = ball_volume(n, ball.radius)
    avg = ball_quadrature(ball, eigenfunction, order=order) / vol
    kernel = BallKernel(n, ball.radius)
    predicted = h_char(kernel, t) * eigenfunction(ball.center)
    return avg, predicted
