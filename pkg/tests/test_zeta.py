from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from quelab.lattice import BinaryQuadraticForm, ImagQuadField
from quelab.specfun import log_gamma
from quelab.zeta import (
    EpsteinForm,
    ZetaBackend,
    dedekind_fourth_moment,
    dedekind_zeta,
    default_backend,
    dirichlet_L,
    epstein_Z,
    epstein_lattice_sum,
    hurwitz_zeta,
    riemann_zeta,
    scattering_phi_K,
    scattering_phi_Q,
    zeta_moment,
)

ALL_D = (-1, -2, -3, -7, -11, -19, -43, -67, -163)

ZETA_HALF = -1.4603545088095866      # eta-series oracle
CATALAN = 0.9159655941772190          # alternating-series oracle
ZETA_K_QI_AT_2 = 1.5067030099229850   # zeta(2) * Catalan


def test_riemann_zeta_classics():
    assert riemann_zeta(2.0).real == pytest.approx(math.pi**2 / 6.0, rel=1e-12)
    assert riemann_zeta(0.5).real == pytest.approx(ZETA_HALF, abs=1e-9)
    assert abs(riemann_zeta(0.5 + 14.134725j)) <= 1e-5


def test_riemann_zeta_pole():
    with pytest.raises(ValueError):
        riemann_zeta(1.0)


def test_backend_methods_agree():
    em = ZetaBackend(method="euler_maclaurin")
    rs = ZetaBackend(method="riemann_siegel")
    rng = np.random.default_rng(3)
    for _ in range(60):
        s = complex(rng.uniform(0.05, 0.95), rng.uniform(-100, 100))
        assert abs(em.zeta(s) - rs.zeta(s)) <= 1e-9


def test_backend_cache_is_pure_optimization():
    cached = ZetaBackend()
    raw = ZetaBackend(use_cache=False)
    s = 0.5 + 37.25j
    assert cached.zeta(s) == raw.zeta(s)
    assert cached.zeta(s) == cached.zeta(s)
    assert cached.cache_size() >= 1
    cached.clear_cache()
    assert cached.cache_size() == 0
    with pytest.raises(ValueError):
        ZetaBackend(method="mystery")


def test_hurwitz_domain():
    with pytest.raises(ValueError):
        hurwitz_zeta(2.0, 0.0)
    # a = 1 reduces to the plain zeta value
    assert hurwitz_zeta(3.0, 1.0).real == pytest.approx(riemann_zeta(3.0).real, rel=1e-12)


def test_dirichlet_l_examples():
    assert dirichlet_L(2.0, -4).real == pytest.approx(CATALAN, abs=1e-10)
    assert dirichlet_L(1.0, -4).real == pytest.approx(math.pi / 4.0, abs=1e-10)
    s = 0.7 + 3.2j
    assert dirichlet_L(s.conjugate(), -4) == pytest.approx(dirichlet_L(s, -4).conjugate(), abs=1e-12)
    with pytest.raises(ValueError):
        dirichlet_L(2.0, -5)


def test_dedekind_zeta_value_and_symmetry():
    qi = ImagQuadField(-1)
    assert dedekind_zeta(qi, 2.0).real == pytest.approx(ZETA_K_QI_AT_2, abs=1e-10)
    s = 1.3 + 2.0j
    assert dedekind_zeta(qi, s.conjugate()) == pytest.approx(dedekind_zeta(qi, s).conjugate(), abs=1e-12)
    with pytest.raises(ValueError):
        dedekind_zeta(qi, 1.0)


def test_dedekind_zeta_vs_principal_ideal_sum():
    # (1/4) sum over nonzero Gaussian integers of N^{-2}, truncated at N <= 1e6;
    # the dropped tail is below pi/1e6
    u, v = np.meshgrid(np.arange(-1000, 1001), np.arange(-1000, 1001))
    norms = u * u + v * v
    mask = (norms > 0) & (norms <= 10**6)
    direct = 0.25 * np.sum(norms[mask].astype(float) ** -2.0)
    assert abs(direct - dedekind_zeta(ImagQuadField(-1), 2.0).real) < 1e-5


def test_dedekind_residue_all_fields():
    eps = 1e-7
    for D in ALL_D:
        fld = ImagQuadField(D)
        got = eps * dedekind_zeta(fld, 1.0 + eps).real
        want = 2.0 * math.pi / (fld.unit_count * math.sqrt(abs(fld.discriminant)))
        assert abs(got - want) / want < 1e-5


def test_epstein_square_form_value():
    F = EpsteinForm(BinaryQuadraticForm(1, 0, 1))
    got = epstein_Z(F, 2.0)
    assert got.real == pytest.approx(6.02681203969193, abs=1e-10)
    composed = 4.0 * riemann_zeta(2.0) * dirichlet_L(2.0, -4)
    assert abs(got - composed) < 1e-10


def test_epstein_matches_direct_sum():
    # brute-force lattice sums in the convergent half-plane, tail < 1e-6
    m, n = np.meshgrid(np.arange(-800, 801), np.arange(-800, 801))
    for (a, b, c, s) in ((1, 0, 1, 2.3), (2, 1, 3, 2.5)):
        q = (a * m * m + b * m * n + c * n * n).astype(float)
        mask = q > 0
        direct = np.sum(q[mask] ** -s)
        got = epstein_Z(EpsteinForm(BinaryQuadraticForm(a, b, c)), s)
        assert abs(got - direct) < 1e-6


def test_epstein_functional_equation():
    def completed(form: EpsteinForm, s: complex) -> complex:
        a, b, c = form.Q.a, form.Q.b, form.Q.c
        delta = (4 * a * c - b * b) / 4.0
        return cmath.exp(0.5 * s * math.log(delta) - s * math.log(math.pi)
                         + log_gamma(s)) * epstein_Z(form, s)

    s = 0.3 + 5.0j
    for (a, b, c) in ((1, 0, 1), (2, 1, 3)):
        F = EpsteinForm(BinaryQuadraticForm(a, b, c))
        lhs, rhs = completed(F, s), completed(F, 1.0 - s)
        assert abs(lhs - rhs) <= 1e-8 * abs(rhs)


def test_epstein_domain():
    F = EpsteinForm(BinaryQuadraticForm(1, 0, 1))
    for bad in (0.0, 1.0):
        with pytest.raises(ValueError):
            epstein_Z(F, bad)


def test_epstein_lattice_sum_rank4_identity():
    # r_4(n) = 8 sigma(n) - 32 sigma(n/4) gives
    # Z_{Z^4}(s) = 8 (1 - 4^{1-s}) zeta(s) zeta(s-1)
    got = epstein_lattice_sum(np.eye(4), 3.0)
    want = 8.0 * (1.0 - 4.0 ** -2.0) * riemann_zeta(3.0) * riemann_zeta(2.0)
    assert abs(got - want) < 1e-8 * abs(want)


def test_epstein_lattice_sum_rank2_consistency():
    got = epstein_lattice_sum(np.eye(2), 1.7)
    want = epstein_Z(EpsteinForm(BinaryQuadraticForm(1, 0, 1)), 1.7)
    assert abs(got - want) < 1e-9 * abs(want)
    with pytest.raises(ValueError):
        epstein_lattice_sum(np.eye(4), 2.0)
    with pytest.raises(ValueError):
        epstein_lattice_sum(np.eye(4), 0.0)


def test_scattering_phi_q_unitary():
    for t in (3.0, 7.0, 11.0):
        assert abs(abs(scattering_phi_Q(0.5 + 1j * t)) - 1.0) <= 1e-9
    val = scattering_phi_Q(0.75)
    assert abs(val.imag) < 1e-12


def test_scattering_phi_q_functional_equation():
    rng = np.random.default_rng(5)
    for _ in range(50):
        s = complex(rng.uniform(-1.5, 2.5), rng.uniform(-20, 20))
        if min(abs(s - 1.0), abs(s), abs(s - 0.5)) < 0.15:
            continue
        assert abs(scattering_phi_Q(s) * scattering_phi_Q(1.0 - s) - 1.0) <= 5e-9


def test_scattering_phi_k_composed_value():
    qi = ImagQuadField(-1)
    got = scattering_phi_K(qi, 2.0)
    want = (2.0 * math.pi / (2.0 * 2.0)) * dedekind_zeta(qi, 2.0) / dedekind_zeta(qi, 3.0)
    assert abs(got - want) < 1e-12
    assert abs(got.imag) < 1e-12


def test_scattering_phi_k_inverse_pairing():
    fld = ImagQuadField(-7)
    for s in (0.3 + 2j, 1.4 - 5j, 0.8 + 11j):
        assert abs(scattering_phi_K(fld, s) * scattering_phi_K(fld, -s) - 1.0) <= 1e-9


def test_zeta_moment_basics():
    assert zeta_moment(2, 0.0) == 0.0
    assert zeta_moment(2, 200.0) > zeta_moment(2, 100.0) > 0.0
    with pytest.raises(ValueError):
        zeta_moment(3, 10.0)
    with pytest.raises(ValueError):
        zeta_moment(2, -1.0)


def test_zeta_moment_accepts_backend():
    be = ZetaBackend()
    assert zeta_moment(2, 20.0, be) == pytest.approx(zeta_moment(2, 20.0), rel=1e-12)


def test_dedekind_fourth_moment_holder():
    qi = ImagQuadField(-1)
    zero = dedekind_fourth_moment(qi, 0.0)
    assert zero.value == 0.0 and zero.holder_bound == 0.0
    for T in (50.0, 100.0):
        res = dedekind_fourth_moment(qi, T)
        assert 0.0 < res.value <= res.holder_bound


def test_dedekind_fourth_moment_vs_riemann_sum():
    qi = ImagQuadField(-1)
    res = dedekind_fourth_moment(qi, 100.0)
    be = default_backend()
    step = 0.05
    ts = np.arange(0.5 * step, 100.0, step)
    coarse = sum(abs(be.zeta(0.5 + 1j * t) * dirichlet_L(0.5 + 1j * t, -4)) ** 4
                 for t in ts) * step
    assert abs(res.value - coarse) / coarse < 0.02
