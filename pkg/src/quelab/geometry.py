"""Upper-half-space models of H^2, H^3 and H^n.

Points carry dimensionless hyperbolic coordinates with positive height.
Balls are geodesic; integration uses geodesic polar coordinates with the
radial weight sinh^{n-1}, sampling uses exact inverse-CDF in the radius.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from ._quad import gauss_legendre, gl_nodes

__all__ = [
    "PointH2",
    "PointH3",
    "Mobius3",
    "GeodesicBall",
    "HeegnerPoint",
    "distance",
    "ball_volume",
    "apply_mobius",
    "sample_ball",
    "ball_quadrature",
]

_MIN_RADIUS = 1e-8  # degenerate balls are rejected rather than approximated


@dataclass(frozen=True)
class PointH2:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not self.y > 0.0:
            raise ValueError("PointH2 needs positive height y")

    @property
    def as_complex(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class PointH3:
    z: complex
    r: float

    def __post_init__(self) -> None:
        if not self.r > 0.0:
            raise ValueError("PointH3 needs positive height r")


Point = Union[PointH2, PointH3]


@dataclass(frozen=True)
class Mobius3:
    """PSL2(C) element; a matrix and its negation act identically."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self) -> None:
        det = self.a * self.d - self.b * self.c
        if abs(det - 1.0) > 1e-12:
            raise ValueError(f"determinant must be 1, got {det}")

    def equivalent(self, other: "Mobius3") -> bool:
        same = all(
            abs(x - y) <= 1e-12
            for x, y in zip((self.a, self.b, self.c, self.d), (other.a, other.b, other.c, other.d))
        )
        neg = all(
            abs(x + y) <= 1e-12
            for x, y in zip((self.a, self.b, self.c, self.d), (other.a, other.b, other.c, other.d))
        )
        return same or neg


@dataclass(frozen=True)
class GeodesicBall:
    dimension: int
    center: Point | None
    radius: float

    def __post_init__(self) -> None:
        if self.dimension < 2:
            raise ValueError("dimension must be >= 2")
        if self.radius < _MIN_RADIUS:
            raise ValueError(f"degenerate ball: radius < {_MIN_RADIUS}")
        if self.dimension == 2 and not isinstance(self.center, PointH2):
            raise ValueError("dimension-2 ball needs a PointH2 center")
        if self.dimension == 3 and not isinstance(self.center, PointH3):
            raise ValueError("dimension-3 ball needs a PointH3 center")
        # n >= 4: only radial integration is ever needed; center stays None.


@dataclass(frozen=True)
class HeegnerPoint:
    """Root of a positive definite integral binary quadratic form in H^2."""

    a: int
    b: int
    c: int
    d: int = field(init=False)
    z: PointH2 = field(init=False)

    def __post_init__(self) -> None:
        if self.a <= 0:
            raise ValueError("form must be positive definite (a > 0)")
        disc = self.b * self.b - 4 * self.a * self.c
        if disc >= 0:
            raise ValueError("form must be positive definite (b^2 - 4ac < 0)")
        object.__setattr__(self, "d", disc)
        object.__setattr__(
            self,
            "z",
            PointH2(-self.b / (2.0 * self.a), math.sqrt(-disc) / (2.0 * self.a)),
        )


def _acosh_clamped(v: float) -> float:
    return math.acosh(v) if v > 1.0 else 0.0


def distance(n: int, P: Point, Q: Point) -> float:
    """Hyperbolic distance; n in {2, 3}."""
    if n == 2:
        if not (isinstance(P, PointH2) and isinstance(Q, PointH2)):
            raise ValueError("dimension mismatch: expected PointH2 operands")
        dz2 = (P.x - Q.x) ** 2 + (P.y - Q.y) ** 2
        return _acosh_clamped(1.0 + dz2 / (2.0 * P.y * Q.y))
    if n == 3:
        if not (isinstance(P, PointH3) and isinstance(Q, PointH3)):
            raise ValueError("dimension mismatch: expected PointH3 operands")
        delta = (abs(P.z - Q.z) ** 2 + P.r * P.r + Q.r * Q.r) / (2.0 * P.r * Q.r)
        return _acosh_clamped(delta)
    raise ValueError("distance defined for n in {2, 3} only")


def _sphere_area(n: int) -> float:
    # Area of S^{n-1}.
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def ball_volume(n: int, R: float) -> float:
    """Volume of a geodesic R-ball in H^n."""
    if R <= 0.0:
        raise ValueError("radius must be positive")
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if n == 2:
        return 2.0 * math.pi * (math.cosh(R) - 1.0)
    if n == 3:
        return math.pi * (math.sinh(2.0 * R) - 2.0 * R)
    u, w = gl_nodes(0.0, R, 64)
    return _sphere_area(n) * float(np.sinh(u) ** (n - 1) @ w)


def apply_mobius(M: Mobius3, P: PointH3) -> PointH3:
    """Action (aP+b)(cP+d)^{-1} on P = z + rj, in closed form."""
    w = M.c * P.z + M.d
    den = abs(w) ** 2 + abs(M.c) ** 2 * P.r * P.r
    if den <= 0.0:
        raise ArithmeticError("degenerate Mobius denominator")
    z_new = ((M.a * P.z + M.b) * w.conjugate() + M.a * M.c.conjugate() * P.r * P.r) / den
    return PointH3(z_new, P.r / den)


# ----------------------------------------------------------------------------
# Geodesic polar coordinates about a center.


def _disk_to_h2(w: complex) -> complex:
    # Poincare disk -> upper half-plane, 0 -> i.
    return 1j * (1.0 + w) / (1.0 - w)


def _ball_to_h3(v: np.ndarray) -> tuple[complex, float]:
    # Poincare ball -> upper half-space, 0 -> j: inversion about S((0,0,-1), sqrt 2).
    s1, s2, s3 = v[0], v[1], v[2] + 1.0
    den = s1 * s1 + s2 * s2 + s3 * s3
    return complex(2.0 * s1 / den, 2.0 * s2 / den), -1.0 + 2.0 * s3 / den


def _polar_point_h2(center: PointH2, rho: float, phi: float) -> PointH2:
    w = math.tanh(0.5 * rho) * complex(math.cos(phi), math.sin(phi))
    z0 = _disk_to_h2(w)
    z = complex(center.x, 0.0) + center.y * z0
    return PointH2(z.real, z.imag)


def _polar_point_h3(center: PointH3, rho: float, nx: float, ny: float, nz: float) -> PointH3:
    tau = math.tanh(0.5 * rho)
    z0, r0 = _ball_to_h3(np.array([tau * nx, tau * ny, tau * nz]))
    return PointH3(center.z + center.r * z0, center.r * r0)


def _radius_from_cdf(n: int, R: float, u: np.ndarray) -> np.ndarray:
    """Invert the normalized radial volume CDF; exact for n=2, bisection for n=3."""
    if n == 2:
        return np.arccosh(1.0 + u * (math.cosh(R) - 1.0))
    total = math.sinh(2.0 * R) - 2.0 * R
    target = u * total
    lo = np.zeros_like(u)
    hi = np.full_like(u, R)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        val = np.sinh(2.0 * mid) - 2.0 * mid
        smaller = val < target
        lo = np.where(smaller, mid, lo)
        hi = np.where(smaller, hi, mid)
    return 0.5 * (lo + hi)


def sample_ball(ball: GeodesicBall, seed: int, count: int) -> list[Point]:
    """i.i.d. points uniform w.r.t. hyperbolic volume in the ball; deterministic."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if ball.dimension not in (2, 3):
        raise ValueError("sampling implemented for n in {2, 3}")
    if count == 0:
        return []
    rng = np.random.default_rng(seed)
    if ball.dimension == 2:
        rho = _radius_from_cdf(2, ball.radius, rng.random(count))
        phi = rng.random(count) * 2.0 * math.pi
        return [_polar_point_h2(ball.center, float(r), float(p)) for r, p in zip(rho, phi)]
    rho = _radius_from_cdf(3, ball.radius, rng.random(count))
    vec = rng.normal(size=(count, 3))
    vec /= np.linalg.norm(vec, axis=1)[:, None]
    return [
        _polar_point_h3(ball.center, float(r), float(v[0]), float(v[1]), float(v[2]))
        for r, v in zip(rho, vec)
    ]


def ball_quadrature(ball: GeodesicBall, f: Callable[[Point], complex], order: int = 32) -> complex:
    """Tensor Gauss-Legendre integral of f over the ball w.r.t. hyperbolic volume."""
    if ball.dimension not in (2, 3):
        raise ValueError("quadrature implemented for n in {2, 3}")
    if order < 2:
        raise ValueError("order must be >= 2")
    R = ball.radius
    rho, w_rho = gl_nodes(0.0, R, order)
    if ball.dimension == 2:
        phi, w_phi = gl_nodes(0.0, 2.0 * math.pi, order)
        acc = 0.0 + 0.0j
        for rk, wk in zip(rho, w_rho):
            ring = sum(
                wp * f(_polar_point_h2(ball.center, float(rk), float(p)))
                for p, wp in zip(phi, w_phi)
            )
            acc += wk * math.sinh(rk) * ring
        return acc
    theta, w_theta = gl_nodes(0.0, math.pi, order)
    phi, w_phi = gl_nodes(0.0, 2.0 * math.pi, order)
    sin_t = np.sin(theta)
    cos_t = np.cos(theta)
    acc = 0.0 + 0.0j
    for rk, wk in zip(rho, w_rho):
        shell = 0.0 + 0.0j
        for st, ct, wt in zip(sin_t, cos_t, w_theta):
            ring = sum(
                wp
                * f(
                    _polar_point_h3(
                        ball.center, float(rk), st * math.cos(p), st * math.sin(p), ct
                    )
                )
                for p, wp in zip(phi, w_phi)
            )
            shell += wt * st * ring
        acc += wk * math.sinh(rk) ** 2 * shell
    return acc
