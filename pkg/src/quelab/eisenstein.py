"""Eisenstein series on the modular surface and on Bianchi 3-manifolds.

Each surface gets two independent evaluation routes.  On H^2 the Fourier
expansion (constant term plus a K-Bessel cosine series) is cross-checked
against the binary-quadratic-form zeta value at a Heegner point, where

    E(z_Q, s) = (a y)^s Z(s, Q~) / (2 zeta(2s)),   Q~ = (c, -b, a),

with Z the two-variable Epstein sum of the form.  On H^3 the Fourier
expansion over a class-number-one ring of integers is cross-checked against
the literal Poincare series over coprime pairs and against a quaternary
Epstein lattice sum.  The module also provides the archimedean gamma-factor
quotients with their exponential-over-polynomial surrogates, and the
regularized Eisenstein triple products (overall constants pinned to 1).

Critical-line evaluation balances the e^{pi t / 2} decay of the K-Bessel
factor against the matching growth of the reciprocal completed-zeta and
reciprocal gamma prefactors, so both surfaces stay in float64 range up to
spectral parameters of a few hundred.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._quad import gl_nodes, panel_nodes
from .geometry import HeegnerPoint, PointH2, PointH3
from .lattice import (
    AlgebraicInt,
    BinaryQuadraticForm,
    ImagQuadField,
    divisor_sigma,
    enumerate_by_norm,
)
from .lattice import _factor_int, _prime_above
from .selberg import BallKernel, h_char
from .specfun import DEFAULT_POLICY, bessel_K_many, log_gamma
from .zeta import (
    EpsteinForm,
    ZetaBackend,
    default_backend,
    dedekind_zeta,
    dirichlet_L,
    epstein_Z,
    epstein_lattice_sum,
    scattering_phi_K,
)

__all__ = [
    "EisensteinH2",
    "EisensteinH3",
    "GammaFactorReport",
    "eis_h2",
    "eis_h2_heegner",
    "eis_h3",
    "eis_h3_coset",
    "eis_h3_lattice",
    "gamma_factors",
    "reg_triple",
    "lower_bound_avg",
]

# discriminant -> number of units w_d, for the nine one-class discriminants
_CLASS_ONE_UNITS = {-3: 6, -4: 4, -7: 2, -8: 2, -11: 2,
                    -19: 2, -43: 2, -67: 2, -163: 2}

_IMAG_ORDER_SWITCH = 8.0  # |Im nu| above which the balanced K route is used


# ----------------------------------------------------------------------------
# Scaled K-Bessel for imaginary order.


def _k_scaled_batch(nu: complex, xs: np.ndarray) -> np.ndarray:
    """e^{pi |Im nu| / 2} K_nu(x) for an array of x > 0, |Re nu| < 1.

    Uses the cosine-transform representation

        K_nu(x) = sec(nu pi/2) int_0^inf cos(x v) cosh(nu asinh v) (1+v^2)^{-1/2} dv

    with a Gauss-Legendre core on [0, v0] containing every stationary point
    and the four oscillatory tail pieces e^{+-ixv} w^{+-nu} pushed onto
    vertical contours, where they decay at least like e^{-x u / 2}.  The
    sec factor carries the entire e^{-pi|Im nu|/2} smallness, so the returned
    values are free of exponential cancellation.
    """
    nu = complex(nu)
    if nu.imag < 0.0:
        return np.conj(_k_scaled_batch(nu.conjugate(), xs))
    sig, tau = nu.real, nu.imag
    if not abs(sig) < 1.0:
        raise ValueError("balanced K route requires |Re nu| < 1")
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        return np.zeros(0, dtype=complex)
    x_min = float(xs.min())
    x_max = float(xs.max())
    if x_min <= 0.0:
        raise ValueError("arguments must be positive")

    v0 = 2.0 * max(1.0, tau / x_min)
    total_phase = x_max * v0 + tau * math.asinh(v0)
    if total_phase > 60000.0:
        raise ValueError("argument range too wide for the balanced K route")
    panels = int(total_phase / 8.0) + 2  # <= 1.3 cycles per 24-point panel
    v, wv = panel_nodes(0.0, v0, panels, 24)
    lw = np.arcsinh(v)
    g = 0.5 * (np.exp(nu * lw) + np.exp(-nu * lw)) / np.sqrt(1.0 + v * v)
    vals = np.cos(np.outer(xs, v)) @ (wv * g)

    # tail: |integrand| <= e^{-x u / 2} since tau / v0 <= x_min / 2; panel
    # lengths track both the steepest decay still visible at each u and the
    # slow residual phase tau * log|w|
    u_end = 84.0 / x_min
    edges = [0.0]
    while edges[-1] < u_end:
        u_here = edges[-1]
        len_decay = max(10.0 / x_max, 0.2 * u_here)
        len_phase = 1.2 * (v0 * v0 + u_here * u_here) / (tau * v0) if tau > 0.0 else u_end
        edges.append(u_here + min(len_decay, len_phase, 2.0))
        if len(edges) > 500:
            raise ValueError("tail panelling did not converge")
    u_parts = [gl_nodes(a, b, 20) for a, b in zip(edges, edges[1:])]
    u = np.concatenate([p[0] for p in u_parts])
    wu = np.concatenate([p[1] for p in u_parts])
    decay = np.exp(-np.outer(xs, u))
    for eps in (1.0, -1.0):
        ve = v0 + 1j * eps * u
        root = np.sqrt(1.0 + ve * ve)
        logw = np.log(ve + root)
        swing = np.exp(1j * eps * v0 * xs) * (1j * eps)
        for delta in (1.0, -1.0):
            f = np.exp(delta * nu * logw) / (4.0 * root)
            vals = vals + swing * (decay @ (wu * f))

    sec_scaled = 2.0 / (cmath.exp(-0.5j * math.pi * sig)
                        + cmath.exp(0.5j * math.pi * sig) * math.exp(-math.pi * tau))
    return sec_scaled * vals


def _use_balanced(nu: complex) -> bool:
    return abs(nu.imag) >= _IMAG_ORDER_SWITCH and abs(nu.real) < 1.0


# ----------------------------------------------------------------------------
# Modular surface.


def _reduce_h2(zc: complex) -> complex:
    """Flip-translate reduction into |x| <= 1/2, |z| >= 1."""
    if not zc.imag > 0.0:
        raise ValueError("point must lie in the upper half-plane")
    for _ in range(1000):
        zc = complex(zc.real - round(zc.real), zc.imag)
        if abs(zc) < 1.0 - 1e-15:
            zc = -1.0 / zc
        else:
            return zc
    raise ValueError("fundamental-domain reduction did not terminate")


def _int_divisor_power(n: int, a: complex) -> complex:
    """sum of d^a over positive divisors d of n."""
    total = 0.0 + 0.0j
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += cmath.exp(a * math.log(d))
            q = n // d
            if q != d:
                total += cmath.exp(a * math.log(q))
        d += 1
    return total


def _h2_guard(s: complex) -> None:
    if abs(s - 1.0) < 1e-12:
        raise ValueError("pole of the series at s = 1")
    if abs(s - 0.5) < 1e-12 or abs(s) < 1e-12:
        raise ValueError("completed-zeta pole line; s = 0, 1/2 unsupported")


def _phi_h2(s: complex, be: ZetaBackend) -> complex:
    # xi(2s-1)/xi(2s) assembled from log-gamma so the critical line is safe
    return (math.sqrt(math.pi)
            * cmath.exp(log_gamma(s - 0.5) - log_gamma(s))
            * be.zeta(2.0 * s - 1.0) / be.zeta(2.0 * s))


@dataclass(frozen=True)
class EisensteinH2:
    """Fourier-expansion evaluator for the level-one series on H^2.

    `truncation` is a floor on the number of Fourier terms; evaluation raises
    it automatically when Im s is large, where the reciprocal completed zeta
    amplifies the tail by e^{pi |Im s| / 2}.
    """

    truncation: int | None = None
    backend: ZetaBackend | None = None
    height_floor: float = 0.8
    abs_tol: float = 1e-10

    def __post_init__(self) -> None:
        if not 0.0 < self.height_floor:
            raise ValueError("height floor must be positive")
        if not 0.0 < self.abs_tol < 1.0:
            raise ValueError("abs_tol must lie in (0, 1)")
        if self.truncation is not None:
            if self.truncation < 1:
                raise ValueError("truncation must be >= 1")
            if math.exp(-2.0 * math.pi * self.truncation * self.height_floor) > self.abs_tol:
                raise ValueError("truncation too small for the configured height floor")

    def base_truncation(self) -> int:
        n = math.ceil(math.log(1.0 / self.abs_tol) / (2.0 * math.pi * self.height_floor))
        return max(self.truncation or 0, n, 1)

    def terms_for(self, y: float, t: float = 0.0) -> int:
        need = (0.5 * math.pi * abs(t) + math.log(1.0 / self.abs_tol)) / (2.0 * math.pi * y)
        return max(self.base_truncation(), math.ceil(need) + 4)

    def tail_bound(self, y: float, t: float = 0.0, n_terms: int | None = None) -> float:
        """Crude majorant of the dropped Fourier tail at height y.

        Includes a float64 rounding allowance: once the analytic tail drops
        below the noise of summing the retained terms, that noise is what a
        truncation-doubling experiment actually measures.
        """
        n = n_terms if n_terms is not None else self.terms_for(y, t)
        x = 2.0 * math.pi * (n + 1) * y
        amp = 0.5 * math.pi * abs(t) - x
        geo = 1.0 / (1.0 - math.exp(-2.0 * math.pi * y))
        analytic = 40.0 * math.sqrt(y) * (n + 1) ** 2 * math.exp(amp) * geo
        noise = 2e-13 * (1.0 + abs(t)) * max(n, 1)
        return analytic + noise

    def value(self, z: PointH2 | complex, s: complex) -> complex:
        s = complex(s)
        _h2_guard(s)
        be = self.backend or default_backend()
        zc = z.as_complex if isinstance(z, PointH2) else complex(z)
        zc = _reduce_h2(zc)
        x, y = zc.real, zc.imag
        if y < self.height_floor - 1e-12:
            raise ValueError("reduced point sits below the height floor")
        logy = math.log(y)
        const = cmath.exp(s * logy) + _phi_h2(s, be) * cmath.exp((1.0 - s) * logy)

        nu = s - 0.5
        n_terms = self.terms_for(y, s.imag)
        ns = np.arange(1, n_terms + 1, dtype=float)
        xvals = 2.0 * math.pi * ns * y
        if _use_balanced(nu):
            kvals = _k_scaled_batch(nu, xvals)
            shift = 0.5 * math.pi * abs(nu.imag)
        else:
            kvals = bessel_K_many(nu, xvals, DEFAULT_POLICY)
            shift = 0.0
        pref = (4.0 * math.sqrt(y)
                * cmath.exp(s * math.log(math.pi) - log_gamma(s) - shift)
                / be.zeta(2.0 * s))
        sig = np.array([_int_divisor_power(int(n), 1.0 - 2.0 * s) for n in range(1, n_terms + 1)])
        npow = np.exp(nu * np.log(ns))
        series = pref * complex(np.sum(npow * sig * kvals * np.cos(2.0 * math.pi * ns * x)))
        return const + series


def eis_h2(z: PointH2 | complex, s: complex, evaluator: EisensteinH2 | None = None) -> complex:
    """Level-one Eisenstein series on H^2 through its Fourier expansion."""
    return (evaluator or EisensteinH2()).value(z, s)


def eis_h2_heegner(point: HeegnerPoint, s: complex,
                   backend: ZetaBackend | None = None) -> complex:
    """Same series at the root of a form, through the form's zeta function.

    For the nine one-class fundamental discriminants the two-variable form
    zeta factors as w_d zeta(s) L(s, chi_d), which keeps the whole critical
    strip in reach; other discriminants fall back to the incomplete-gamma
    Epstein evaluator and inherit its |Im s| range.
    """
    s = complex(s)
    _h2_guard(s)
    be = backend or default_backend()
    units = _CLASS_ONE_UNITS.get(point.d)
    if units is not None:
        form_zeta = units * be.zeta(s) * dirichlet_L(s, point.d)
    else:
        form_zeta = epstein_Z(EpsteinForm(BinaryQuadraticForm(point.c, -point.b, point.a)), s)
    ay = point.a * point.z.y  # = sqrt(|d|) / 2
    return cmath.exp(s * math.log(ay)) * form_zeta / (2.0 * be.zeta(2.0 * s))


# ----------------------------------------------------------------------------
# Bianchi manifolds.


def _reduce_h3(field_: ImagQuadField, P: PointH3) -> PointH3:
    om = field_.omega
    z, r = complex(P.z), float(P.r)
    for _ in range(1000):
        v = z.imag / om.imag
        u = z.real - v * om.real
        z = z - round(u) - round(v) * om
        n2 = z.real * z.real + z.imag * z.imag + r * r
        if n2 < 1.0 - 1e-15:
            z = -z.conjugate() / n2
            r = r / n2
        else:
            return PointH3(z, r)
    raise ValueError("fundamental-domain reduction did not terminate")


def _in_sector(w: AlgebraicInt) -> bool:
    """One representative per unit class: the sector [0, 2 pi / w_units)."""
    units = w.field.unit_count
    if units == 2:
        return w.v > 0 or (w.v == 0 and w.u > 0)
    # both Z[i] and the Eisenstein order: u > 0, v >= 0 picks the sector
    return w.u > 0 and w.v >= 0


def _canonical_key(w: AlgebraicInt) -> tuple[int, int]:
    for unit in w.field.units():
        rep = w * unit
        if _in_sector(rep):
            return rep.u, rep.v
    raise ArithmeticError("no associate in the fundamental sector")


@lru_cache(maxsize=64)
def _h3_term_table(field_: ImagQuadField, s_key: tuple[float, float], cap: int):
    """Per-element coefficients |omega|^s sigma_{-s}(omega), grouped data."""
    s = complex(*s_key)
    els = enumerate_by_norm(field_, cap)
    norms = np.array([e.norm() for e in els], dtype=float)
    zvals = np.array([e.to_complex() for e in els], dtype=complex)
    cache: dict[tuple[int, int], complex] = {}
    coeff = np.empty(len(els), dtype=complex)
    for i, e in enumerate(els):
        key = _canonical_key(e)
        got = cache.get(key)
        if got is None:
            got = cache[key] = divisor_sigma(field_, -s, e)
        coeff[i] = got
    moduli = np.sqrt(norms)
    coeff = coeff * np.exp(s * np.log(moduli))
    uniq, inverse = np.unique(norms, return_inverse=True)
    return zvals, coeff, np.sqrt(uniq), inverse


@dataclass(frozen=True)
class EisensteinH3:
    """Fourier-expansion evaluator for the cusp-at-infinity series on H^3.

    Arguments are passed in the convention where the critical line is
    Re S = 1; internally the expansion runs in s = S - 1.  The normalization
    flag selects the full series E = (w/2) E_inf or the bare cusp series.
    """

    field: ImagQuadField
    norm_cap: int | None = None
    backend: ZetaBackend | None = None
    height_floor: float = 0.5
    abs_tol: float = 1e-10
    normalization: str = "E"

    def __post_init__(self) -> None:
        if self.normalization not in ("E", "E_inf"):
            raise ValueError("normalization must be 'E' or 'E_inf'")
        if not 0.0 < self.height_floor:
            raise ValueError("height floor must be positive")
        if not 0.0 < self.abs_tol < 1.0:
            raise ValueError("abs_tol must lie in (0, 1)")
        if self.norm_cap is not None:
            if self.norm_cap < 1:
                raise ValueError("norm cap must be >= 1")
            dk = abs(self.field.discriminant)
            decay = 4.0 * math.pi * math.sqrt(self.norm_cap) * self.height_floor / math.sqrt(dk)
            if math.exp(-decay) > self.abs_tol:
                raise ValueError("norm cap too small for the configured height floor")

    def cap_for(self, r: float, tau: float = 0.0) -> int:
        if self.norm_cap is not None:
            return self.norm_cap
        dk = abs(self.field.discriminant)
        need = 0.5 * math.pi * abs(tau) + math.log(1.0 / self.abs_tol) + 5.0
        m = need * math.sqrt(dk) / (4.0 * math.pi * r)
        return max(int(math.ceil(m)) ** 2, 2)

    def tail_bound(self, r: float, tau: float = 0.0, cap: int | None = None) -> float:
        """Majorant of the dropped K-Bessel tail plus a float64 noise allowance."""
        cap = cap if cap is not None else self.cap_for(r, tau)
        dk = abs(self.field.discriminant)
        x = 4.0 * math.pi * math.sqrt(cap) * r / math.sqrt(dk)
        amp = 0.5 * math.pi * abs(tau) - x
        analytic = 60.0 * r * cap ** 1.5 * math.exp(amp)
        noise = 2e-13 * (1.0 + abs(tau)) * max(cap, 1)
        return analytic + noise

    def value(self, P: PointH3, S: complex) -> complex:
        S = complex(S)
        if abs(S - 2.0) < 1e-12:
            raise ValueError("pole of the series at S = 2")
        if abs(S - 1.0) < 1e-12 or abs(S) < 1e-12:
            raise ValueError("scattering-term pole line; S = 0, 1 unsupported")
        be = self.backend or default_backend()
        P = _reduce_h3(self.field, P)
        z, r = complex(P.z), float(P.r)
        if r < self.height_floor - 1e-12:
            raise ValueError("reduced point sits below the height floor "
                             "(flip-translate reduction is incomplete for this ring)")
        s = S - 1.0
        dk = abs(self.field.discriminant)
        logr = math.log(r)
        const = cmath.exp((1.0 + s) * logr) + (scattering_phi_K(self.field, s)
                                               * cmath.exp((1.0 - s) * logr))

        cap = self.cap_for(r, s.imag)
        zvals, coeff, uniq_mod, inverse = _h3_term_table(
            self.field, (s.real, s.imag), cap)
        xvals = 4.0 * math.pi * uniq_mod * r / math.sqrt(dk)
        if _use_balanced(s):
            kvals = _k_scaled_batch(s, xvals)
            shift = 0.5 * math.pi * abs(s.imag)
        else:
            kvals = bessel_K_many(s, xvals, DEFAULT_POLICY)
            shift = 0.0
        pref = 2.0 * cmath.exp((1.0 + s) * math.log(2.0 * math.pi)
                               - 0.5 * (1.0 + s) * math.log(dk)
                               - log_gamma(1.0 + s) - shift)
        pref = pref / dedekind_zeta(self.field, 1.0 + s)
        theta = (-4.0 * math.pi / math.sqrt(dk)) * (zvals.real * z.imag + zvals.imag * z.real)
        series = pref * r * complex(np.sum(coeff * kvals[inverse] * np.exp(1j * theta)))
        out = const + series
        if self.normalization == "E":
            out = out * (self.field.unit_count / 2.0)
        return out


def eis_h3(P: PointH3, S: complex, evaluator: EisensteinH3) -> complex:
    """Bianchi Eisenstein series through its Fourier expansion."""
    return evaluator.value(P, S)


def _not_divisible(du: np.ndarray, dv: np.ndarray, p: AlgebraicInt) -> np.ndarray:
    """Mask of grid elements d = du + dv*omega with p not dividing d."""
    f = p.field
    pc = p.conj()
    n = p.norm()
    if f.half_basis:
        num_u = du * pc.u + dv * pc.v * ((f.D - 1) // 4)
        num_v = du * pc.v + dv * pc.u + dv * pc.v
    else:
        num_u = du * pc.u + f.D * dv * pc.v
        num_v = du * pc.v + dv * pc.u
    return (num_u % n != 0) | (num_v % n != 0)


def _prime_divisors(c: AlgebraicInt) -> list[AlgebraicInt]:
    """Distinct prime elements dividing c, one per prime ideal."""
    field_ = c.field
    out: list[AlgebraicInt] = []
    for p, _ in _factor_int(c.norm()):
        chi = field_.chi(p)
        if chi == -1:
            out.append(field_.element(p, 0))
        elif chi == 0:
            out.append(_prime_above(field_, p))
        else:
            pi = _prime_above(field_, p)
            for cand in (pi, pi.conj()):
                if c.divide_exact(cand) is not None:
                    out.append(cand)
    return out


def eis_h3_coset(P: PointH3, S: complex, field_: ImagQuadField, cap: int = 40) -> complex:
    """Literal truncated Poincare sum over coprime pairs modulo units.

    Absolutely convergent for Re S > 2; the truncation keeps |c|, |d| <= cap.
    Slow by design: this is the oracle the Fourier route is checked against.
    """
    S = complex(S)
    if S.real <= 2.0:
        raise ValueError("direct sum requires Re S > 2")
    if cap < 2:
        raise ValueError("cap must be >= 2")
    z, r = complex(P.z), float(P.r)
    om = field_.omega
    els = enumerate_by_norm(field_, cap * cap)
    du = np.array([e.u for e in els] + [0], dtype=np.int64)
    dv = np.array([e.v for e in els] + [0], dtype=np.int64)
    dz = du + dv * om
    real_S = S.imag == 0.0
    pieces = [r ** S.real if real_S else cmath.exp(S * math.log(r))]  # class (0, 1)
    for c in els:
        if not _in_sector(c):
            continue
        mask = np.ones(du.shape, dtype=bool)
        for p in _prime_divisors(c):
            mask &= _not_divisible(du, dv, p)
        w = c.to_complex() * z + dz[mask]
        base = r / (w.real * w.real + w.imag * w.imag + c.norm() * r * r)
        if real_S:
            pieces.append(float(np.sum(base ** S.real)))
        else:
            pieces.append(complex(np.sum(np.exp(S * np.log(base)))))
    if real_S:
        return complex(math.fsum(pieces))
    return complex(math.fsum(p.real for p in pieces), math.fsum(p.imag for p in pieces))


def eis_h3_lattice(P: PointH3, S: complex, field_: ImagQuadField,
                   backend: ZetaBackend | None = None) -> complex:
    """Cusp series through the quaternary Epstein sum r^S Z_4(S) / (w zeta_K(S)).

    Writing c = c1 + c2 w, d = d1 + d2 w, the denominator |cz+d|^2 + |c|^2 r^2
    is a positive quaternary form in (c1, c2, d1, d2); summing it over the
    full lattice overcounts each coprime class by w zeta_K(S).
    """
    S = complex(S)
    if abs(S - 1.0) < 1e-12:
        raise ValueError("zeta_K pole at S = 1")
    z, r = complex(P.z), float(P.r)
    om = field_.omega
    basis = np.array([z, om * z, 1.0, om], dtype=complex)
    gram = np.real(np.outer(basis, basis.conjugate()))
    gram[:2, :2] += r * r * np.real(np.outer(np.array([1.0, om]),
                                             np.array([1.0, om]).conjugate()))
    total = epstein_lattice_sum(gram, S)
    return (cmath.exp(S * math.log(r)) * total
            / (field_.unit_count * dedekind_zeta(field_, S)))


# ----------------------------------------------------------------------------
# Gamma-factor quotients and regularized triple products.


@dataclass(frozen=True)
class GammaFactorReport:
    """Exact archimedean quotient next to its exp-over-polynomial surrogate."""

    Q: float
    P: float
    gamma_exact: float
    gamma_asym: float


def _log_abs_gamma(a: float, b: float) -> float:
    return log_gamma(complex(a, b)).real


def gamma_factors(dim: int, t_j: float, t: float) -> GammaFactorReport:
    """Growth data of the triple-product gamma quotient in dimension 2 or 3."""
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    t_j, t = float(t_j), float(t)
    if t_j < 0.0 or t < 0.0:
        raise ValueError("t_j, t must be nonnegative")
    Q = 4.0 * abs(t_j) - abs(2.0 * t_j + t) - abs(2.0 * t_j - t)
    if dim == 2:
        P = (1.0 + abs(t)) * math.sqrt((1.0 + abs(2.0 * t_j + t)) * (1.0 + abs(2.0 * t_j - t)))
        log_exact = (4.0 * _log_abs_gamma(0.25, 0.5 * t)
                     + 2.0 * _log_abs_gamma(0.25, t_j + 0.5 * t)
                     + 2.0 * _log_abs_gamma(0.25, t_j - 0.5 * t)
                     - 4.0 * _log_abs_gamma(0.5, t_j)
                     - 2.0 * _log_abs_gamma(0.5, t))
    else:
        P = (1.0 + abs(t)) * (1.0 + abs(t_j)) ** 2
        log_exact = (4.0 * _log_abs_gamma(0.5, 0.5 * t)
                     + 2.0 * _log_abs_gamma(0.5, t_j + 0.5 * t)
                     + 2.0 * _log_abs_gamma(0.5, t_j - 0.5 * t)
                     - 4.0 * _log_abs_gamma(1.0, t_j)
                     - 2.0 * _log_abs_gamma(1.0, t))
    return GammaFactorReport(
        Q=Q,
        P=P,
        gamma_exact=math.exp(log_exact),
        gamma_asym=math.exp(0.5 * math.pi * Q) / P,
    )


def _log_lambda(w: complex, be: ZetaBackend) -> complex:
    # log of pi^{-w/2} Gamma(w/2) zeta(w); keeps tiny completed values in range
    return (-0.5 * w * math.log(math.pi) + log_gamma(0.5 * w)
            + cmath.log(be.zeta(w)))


def reg_triple(dim: int, t: float, tprime: float,
               field_: ImagQuadField | None = None,
               backend: ZetaBackend | None = None) -> complex:
    """Regularized triple product of critical-line series, constant set to 1.

    Only the growth of the modulus is meaningful; the omitted normalizing
    constant is independent of t and t'.
    """
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    t, tp = float(t), float(tprime)
    if abs(t) < 1e-9 or abs(tp) < 1e-9:
        raise ValueError("t = 0 or t' = 0 lands on a zeta pole of the ratio")
    be = backend or default_backend()
    if dim == 2:
        log_num = (2.0 * _log_lambda(complex(0.5, -tp), be)
                   + _log_lambda(complex(0.5, 2.0 * t - tp), be)
                   + _log_lambda(complex(0.5, -(2.0 * t + tp)), be))
        log_den = (2.0 * _log_lambda(complex(1.0, 2.0 * t), be).real
                   + _log_lambda(complex(1.0, -2.0 * tp), be))
        return cmath.exp(log_num - log_den)
    fld = field_ or ImagQuadField(-1)
    u = complex(0.5, 0.5 * tp)
    log_gamma_part = (2.0 * log_gamma(u)
                      + log_gamma(u - 1j * t) + log_gamma(u + 1j * t)
                      - log_gamma(complex(1.0, tp))
                      - 2.0 * log_gamma(complex(1.0, t)).real)
    zeta_part = (dedekind_zeta(fld, u) ** 2
                 * dedekind_zeta(fld, u - 1j * t)
                 * dedekind_zeta(fld, u + 1j * t)
                 / (dedekind_zeta(fld, complex(1.0, tp))
                    * abs(dedekind_zeta(fld, complex(1.0, t))) ** 2))
    return cmath.exp(log_gamma_part) * zeta_part


# ----------------------------------------------------------------------------
# Cauchy-Schwarz lower bound for the normalized ball mass.


def lower_bound_avg(w: HeegnerPoint, R: float, t: float,
                    backend: ZetaBackend | None = None) -> float:
    """|h_R(t)|^2 |E(w, 1/2+it)|^2 / log(1/4+t^2): the ball-average bound.

    Cauchy-Schwarz turns the squared ball average of the series into a lower
    bound for the normalized mass, and the average itself is h_R(t) E(w).
    """
    if not R > 0.0:
        raise ValueError("R must be positive")
    if t < 2.0:
        raise ValueError("t must be >= 2")
    h = h_char(BallKernel(2, R), t)
    center = eis_h2_heegner(w, complex(0.5, t), backend)
    return (abs(h) ** 2) * (abs(center) ** 2) / math.log(0.25 + t * t)
