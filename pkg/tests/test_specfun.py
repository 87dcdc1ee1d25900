import math

import numpy as np
import pytest

from platekit import specfun
from platekit.errors import DomainError, UnsupportedOrderError

# frozen reference values (30-digit arbitrary-precision evaluation)
Y_REF = [
    (0.05, -1.97931100081720964, -12.7898551711749697),
    (0.5, -0.444518733506706557, -1.47147239267024307),
    (3.7, 0.10607431532035411, 0.416674372683807493),
    (12.9, -0.0988703702414984059, -0.202816974323664685),
    (13.1, -0.0569252567812938352, -0.215211506005002211),
    (40.0, 0.125936417058260929, -0.00579350582154963294),
]
K_REF = [
    (0.05, 3.11423402947198984, 19.9096743258825054),
    (1.0, 0.421024438240708333, 0.601907230197234575),
    (4.9, 0.00411893623551588718, 0.00452116917729983672),
    (7.3, 0.000308362213060931804, 0.000328841996784326317),
    (12.4, 1.45172000031312187e-6, 1.5091617711449302e-6),
    (12.6, 1.17927220985177211e-6, 1.22520603503354182e-6),
    (30.0, 2.13247749646305637e-14, 2.16773200189154942e-14),
]
J_REF = [
    (0.5, 1.3, 0.674289396750289736),
    (5.5, 7.7, 0.324176773850287484),
    (12.0, 9.0, 0.0273928886705596811),
    (50.0, 60.0, -0.13798273148535212),
    (99.5, 101.0, 0.123495673221816444),
]
I_SCALED_REF = [
    (0.0, 10.0, 0.127833337163428607),
    (1.0, 0.3, 0.112377560639838795),
    (7.5, 20.0, 0.0215920530301742601),
    (3.0, 80.0, 0.0422150269690563231),
]


@pytest.mark.parametrize("x,y0,y1", Y_REF)
def test_bessel_y_reference(x, y0, y1):
    assert abs(specfun.bessel_y(0, x) - y0) <= 5e-10 * abs(y0)
    assert abs(specfun.bessel_y(1, x) - y1) <= 5e-10 * abs(y1)


@pytest.mark.parametrize("x,k0,k1", K_REF)
def test_bessel_k_reference(x, k0, k1):
    assert abs(specfun.bessel_k(0, x) - k0) <= 1e-10 * abs(k0)
    assert abs(specfun.bessel_k(1, x) - k1) <= 1e-10 * abs(k1)


@pytest.mark.parametrize("nu,x,val", J_REF)
def test_bessel_j_reference(nu, x, val):
    assert abs(specfun.bessel_j(nu, x) - val) <= 1e-12 * abs(val)


@pytest.mark.parametrize("nu,x,val", I_SCALED_REF)
def test_bessel_i_scaled_reference(nu, x, val):
    got = specfun.bessel_i(nu, x, scaled=True)
    assert abs(got - val) <= 1e-12 * abs(val)


def test_jy_wronskian():
    # J_{n+1} Y_n - J_n Y_{n+1} = 2 / (pi x), the cylinder Wronskian
    x = np.linspace(0.02, 55.0, 373)
    for n in (0,):
        w = (specfun.bessel_j(n + 1, x) * specfun.bessel_y(n, x)
             - specfun.bessel_j(n, x) * specfun.bessel_y(n + 1, x))
        assert np.max(np.abs(w * (np.pi * x) / 2.0 - 1.0)) <= 2e-9


def test_ik_wronskian():
    # I_n(x) K_{n+1}(x) + I_{n+1}(x) K_n(x) = 1 / x
    x = np.linspace(0.05, 40.0, 239)
    w = (specfun.bessel_i(0, x) * specfun.bessel_k(1, x)
         + specfun.bessel_i(1, x) * specfun.bessel_k(0, x))
    assert np.max(np.abs(w * x - 1.0)) <= 2e-10


def test_j_recurrence_half_orders():
    # J_{nu-1} + J_{nu+1} = (2 nu / x) J_nu across the supported orders
    rng = np.random.default_rng(7)
    for _ in range(60):
        nu = 0.5 * rng.integers(2, 198)
        x = float(rng.uniform(0.5, 80.0))
        lhs = specfun.bessel_j(nu - 1, x) + specfun.bessel_j(nu + 1, x)
        rhs = 2.0 * nu / x * specfun.bessel_j(nu, x)
        # residual scale: near a root the terms sit far below the
        # oscillation envelope, so measure against both
        scale = max(abs(specfun.bessel_j(nu - 1, x)), abs(rhs),
                    math.sqrt(2.0 / (math.pi * x)))
        assert abs(lhs - rhs) <= 1e-9 * scale


def test_zero_values_and_interlacing():
    for nu in (0.0, 0.5, 1.0, 3.5, 10.0):
        z = [specfun.bessel_zero(nu, m) for m in range(1, 11)]
        zn = [specfun.bessel_zero(nu + 1.0, m) for m in range(1, 11)]
        # roots actually vanish
        for r in z:
            assert abs(specfun.bessel_j(nu, r)) <= 1e-10
        # interlacing j_{nu,m} < j_{nu+1,m} < j_{nu,m+1}
        for m in range(9):
            assert z[m] < zn[m] < z[m + 1]


def test_first_zero_reference():
    assert abs(specfun.bessel_zero(0, 1) - 2.40482555769577277) <= 1e-12
    assert abs(specfun.bessel_zero(1, 1) - 3.83170597020751232) <= 1e-12


def test_zeros_below_matches_bessel_zero():
    hits = specfun.zeros_below(0.0, 30.0)
    for nu, m, z in hits:
        assert z < 30.0
        assert abs(z - specfun.bessel_zero(nu, m)) <= 1e-10
    # every zero of J_0 and J_1 below the cap is present
    z01 = sorted(z for nu, m, z in hits if nu in (0.0, 1.0))
    direct = []
    for nu in (0.0, 1.0):
        m = 1
        while True:
            r = specfun.bessel_zero(nu, m)
            if r >= 30.0:
                break
            direct.append(r)
            m += 1
    assert np.allclose(z01, sorted(direct), rtol=0, atol=1e-10)


def test_domain_errors():
    with pytest.raises(DomainError):
        specfun.bessel_y(0, -1.0)
    with pytest.raises(DomainError):
        specfun.bessel_k(1, 0.0)
    with pytest.raises(UnsupportedOrderError):
        specfun.bessel_y(2, 1.0)
    with pytest.raises(UnsupportedOrderError):
        specfun.bessel_j(0.3, 1.0)
    with pytest.raises(UnsupportedOrderError):
        specfun.bessel_j(101.0, 1.0)
