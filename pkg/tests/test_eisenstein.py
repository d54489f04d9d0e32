from __future__ import annotations

import math

import numpy as np
import pytest

from quelab.geometry import HeegnerPoint, PointH2, PointH3
from quelab.eisenstein import (
    EisensteinH2,
    EisensteinH3,
    GammaFactorReport,
    eis_h2,
    eis_h2_heegner,
    eis_h3,
    eis_h3_coset,
    eis_h3_lattice,
    gamma_factors,
    lower_bound_avg,
    reg_triple,
)
from quelab.lattice import ImagQuadField
from quelab.zeta import dirichlet_L, riemann_zeta

QI = ImagQuadField(-1)

# frozen regression values
E_AT_I_2 = 2.7842015453307912
H3_QI_25 = 4.812375013155018          # E_inf at P = (0.3+0.2i, 1.1), S = 2.5
H3_D7_25 = 4.253899794713765          # P = (0.25+0.3i, 1.0), S = 2.5, D = -7
LOWER_BOUND_I = 0.13654285031362218   # w = i form, R = 0.4, t = 5
REG3_5_3 = complex(-0.1211158426388119, 0.04615732470255178)
REG2_5_3 = complex(-0.22505315438256485, -0.07285073925695065)

HEEGNER_POINTS = (
    HeegnerPoint(1, 0, 1),    # z = i, d = -4
    HeegnerPoint(1, -1, 1),   # z = (1 + i sqrt 3)/2, d = -3
    HeegnerPoint(1, -1, 2),   # z = (1 + i sqrt 7)/2, d = -7
)


def test_h2_value_at_i_s2():
    got = eis_h2(PointH2(0.0, 1.0), 2.0)
    assert got.real == pytest.approx(E_AT_I_2, abs=1e-10)
    assert abs(got.imag) < 1e-12
    # the same number out of the zeta factorization at the d = -4 point
    composed = (2.0 * riemann_zeta(2.0) * dirichlet_L(2.0, -4) / riemann_zeta(4.0)).real
    assert got.real == pytest.approx(composed, abs=1e-10)
    assert eis_h2_heegner(HeegnerPoint(1, 0, 1), 2.0).real == pytest.approx(composed, abs=1e-10)


def test_h2_two_routes_on_critical_line():
    """Fourier expansion against the form-zeta route at quadratic points."""
    ts = (-15.0, -12.5, -7.5, -2.5, 2.5, 7.5, 12.5)
    for hp in HEEGNER_POINTS:
        for t in ts:
            s = complex(0.5, t)
            a = eis_h2(hp.z, s)
            b = eis_h2_heegner(hp, s)
            assert abs(a - b) <= 1e-6, (hp.d, t, abs(a - b))


def test_h2_heegner_fallback_discriminant():
    # class number of d = -20 is 2, so the one-class factorization does not
    # apply and the generic continuation route must take over
    hp = HeegnerPoint(1, 0, 5)
    assert hp.d == -20
    for t in (3.0, 8.0):
        s = complex(0.5, t)
        assert abs(eis_h2(hp.z, s) - eis_h2_heegner(hp, s)) <= 1e-9


def test_h2_truncation_doubling_below_tail_bound():
    for (x, y, t) in ((0.13, 0.92, 9.0), (0.0, 1.0, 21.0), (0.37, 1.4, 3.0)):
        z = PointH2(x, y)
        s = complex(0.5, t)
        base = EisensteinH2()
        n1 = base.terms_for(y, t)
        v1 = EisensteinH2(truncation=n1).value(z, s)
        v2 = EisensteinH2(truncation=2 * n1).value(z, s)
        assert abs(v1 - v2) < base.tail_bound(y, t, n1)


def test_h2_guards():
    ev = EisensteinH2()
    for bad in (1.0, 0.5, 0.0):
        with pytest.raises(ValueError):
            ev.value(PointH2(0.0, 1.0), bad)
    with pytest.raises(ValueError):
        EisensteinH2(height_floor=2.0).value(PointH2(0.0, 1.0), 0.5 + 3j)
    with pytest.raises(ValueError):
        EisensteinH2(truncation=1, height_floor=0.1)
    with pytest.raises(ValueError):
        EisensteinH2(abs_tol=2.0)


def test_h3_frozen_value_and_lattice_route():
    P = PointH3(0.3 + 0.2j, 1.1)
    ev = EisensteinH3(field=QI, normalization="E_inf")
    got = ev.value(P, 2.5)
    assert got.real == pytest.approx(H3_QI_25, abs=1e-9)
    assert abs(got.imag) < 1e-12
    for S in (2.5, 1.0 + 4.0j):
        f = ev.value(P, S)
        l = eis_h3_lattice(P, S, QI)
        assert abs(f - l) <= 1e-10 * max(1.0, abs(f))


def test_h3_second_field_two_routes():
    fld = ImagQuadField(-7)
    P = PointH3(0.25 + 0.3j, 1.0)
    ev = EisensteinH3(field=fld)
    got = ev.value(P, 2.5)
    assert got.real == pytest.approx(H3_D7_25, abs=1e-9)
    assert abs(got - eis_h3_lattice(P, 2.5, fld)) <= 1e-10 * abs(got)


def test_h3_fourier_vs_coset_real_s():
    """Two-route agreement on the real axis where the sum converges.

    The coset sum truncated at |c|, |d| <= cap carries a tail proportional
    to cap^{4-2S}; one extrapolation step with the known exponent removes it.
    """
    P = PointH3(0.3 + 0.2j, 1.1)
    ev = EisensteinH3(field=QI, normalization="E_inf")
    for S in (2.2, 3.0):
        fourier = ev.value(P, S).real
        c40 = eis_h3_coset(P, S, QI, cap=40).real
        c80 = eis_h3_coset(P, S, QI, cap=80).real
        alpha = 2.0 * S - 4.0
        accel = c80 + (c80 - c40) / (2.0**alpha - 1.0)
        assert abs(accel - fourier) <= 1e-4, (S, abs(accel - fourier))


def test_h3_normalization_ratio():
    P = PointH3(0.2 + 0.1j, 1.0)
    S = 1.0 + 6.0j
    for D, ratio in ((-1, 2.0), (-3, 3.0)):
        fld = ImagQuadField(D)
        full = EisensteinH3(field=fld, normalization="E").value(P, S)
        bare = EisensteinH3(field=fld, normalization="E_inf").value(P, S)
        assert abs(full - ratio * bare) <= 1e-12 * abs(full)


def test_h3_cap_doubling_below_tail_bound():
    for (z, r, tau) in ((0.2 + 0.3j, 0.9, 7.0), (0.1 + 0.05j, 1.2, 12.0)):
        P = PointH3(z, r)
        S = complex(1.0, tau)
        ev = EisensteinH3(field=QI, height_floor=0.8)
        c1 = ev.cap_for(0.9, tau)
        v1 = EisensteinH3(field=QI, norm_cap=c1, height_floor=0.8).value(P, S)
        v2 = EisensteinH3(field=QI, norm_cap=2 * c1, height_floor=0.8).value(P, S)
        assert abs(v1 - v2) < ev.tail_bound(0.9, tau, c1)


def test_h3_guards():
    ev = EisensteinH3(field=QI)
    P = PointH3(0.4 + 0.4j, 0.9)
    for bad in (2.0, 1.0, 0.0):
        with pytest.raises(ValueError):
            ev.value(P, bad)
    with pytest.raises(ValueError):
        EisensteinH3(field=QI, height_floor=1.5).value(P, 2.5)
    with pytest.raises(ValueError):
        EisensteinH3(field=QI, normalization="full")
    with pytest.raises(ValueError):
        EisensteinH3(field=QI, norm_cap=2)
    with pytest.raises(ValueError):
        eis_h3(P, 2.0, ev)


def test_gamma_factors_report_shape():
    rep = gamma_factors(3, 30.0, 50.0)
    assert isinstance(rep, GammaFactorReport)
    assert rep.Q == pytest.approx(4.0 * 30 - abs(2 * 30 + 50) - abs(2 * 30 - 50), abs=1e-12)
    assert rep.P == pytest.approx((1 + 50.0) * (1 + 30.0) ** 2, rel=1e-12)
    assert rep.gamma_asym == pytest.approx(math.exp(0.5 * math.pi * rep.Q) / rep.P, rel=1e-12)

    rep2 = gamma_factors(2, 30.0, 50.0)
    assert rep2.P == pytest.approx((1 + 50.0) * math.sqrt((1 + 110.0) * (1 + 10.0)), rel=1e-12)

    with pytest.raises(ValueError):
        gamma_factors(4, 10.0, 10.0)
    with pytest.raises(ValueError):
        gamma_factors(3, -1.0, 10.0)


def test_gamma_surrogate_bounded_dim3():
    for t_j in (20.0, 50.0, 100.0):
        for t in (20.0, 60.0, 100.0):
            rep = gamma_factors(3, t_j, t)
            ratio = rep.gamma_exact / rep.gamma_asym
            assert 0.1 <= ratio <= 10.0


def test_reg_triple_frozen_values():
    got3 = reg_triple(3, 5.0, 3.0)
    assert got3.real == pytest.approx(REG3_5_3.real, rel=1e-10)
    assert got3.imag == pytest.approx(REG3_5_3.imag, rel=1e-10)
    got2 = reg_triple(2, 5.0, 3.0)
    assert got2.real == pytest.approx(REG2_5_3.real, rel=1e-10)
    assert got2.imag == pytest.approx(REG2_5_3.imag, rel=1e-10)


def test_reg_triple_finite_on_grid():
    for dim in (2, 3):
        for t in (10.0, 35.0, 60.0):
            for tp in (10.0, 35.0, 60.0):
                v = reg_triple(dim, t, tp)
                assert math.isfinite(v.real) and math.isfinite(v.imag)
                assert abs(v) > 0.0


def test_reg_triple_guards():
    with pytest.raises(ValueError):
        reg_triple(2, 0.0, 3.0)
    with pytest.raises(ValueError):
        reg_triple(3, 5.0, 0.0)
    with pytest.raises(ValueError):
        reg_triple(5, 5.0, 3.0)


def test_lower_bound_avg_frozen():
    got = lower_bound_avg(HeegnerPoint(1, 0, 1), 0.4, 5.0)
    assert got == pytest.approx(LOWER_BOUND_I, rel=1e-10)
    with pytest.raises(ValueError):
        lower_bound_avg(HeegnerPoint(1, 0, 1), 0.0, 5.0)
    with pytest.raises(ValueError):
        lower_bound_avg(HeegnerPoint(1, 0, 1), 0.4, 1.0)
