import math

import numpy as np
import pytest

from platekit import ball, bridge, specfun
from platekit.errors import (BranchJumpError, DegeneratePairError,
                             DomainError)

from conftest import assert_close

# mpmath roots of the Robin equations, 40-digit working precision
ROBIN_REF = {
    # (R, N, k, beta): first three sigmas
    (1.0, 2, 0, -2.0): [-6.6791214262572075, 11.055977266661634,
                        45.3280354662423],
    (1.5, 3, 2, 0.5): [6.2741786290209274, 24.372120988236224,
                       50.77353254284529],
}


@pytest.mark.parametrize("key", sorted(ROBIN_REF))
def test_robin_reference_values(key):
    R, N, k, beta = key
    evs = bridge.robin_eigs_ball(R, N, k, beta, 3)
    for ev, ref in zip(evs, ROBIN_REF[key]):
        assert_close(ev.sigma, ref, 1e-12, f"sigma {key}")
        assert bridge.robin_residual(R, N, ev) <= 1e-12


def test_robin_k1_beta1_reduces_to_j0_zeros():
    # a = k/R + beta = 2 turns the equation into z J_0(z) = 0 exactly
    evs = bridge.robin_eigs_ball(1.0, 2, 1, 1.0, 4)
    for m, ev in enumerate(evs, start=1):
        assert_close(ev.sigma, specfun.bessel_zero(0.0, m) ** 2, 1e-12,
                     f"m={m}")


def test_robin_categories():
    neg = bridge.robin_eigs_ball(1.0, 2, 0, -2.0, 2)
    assert neg[0].category == "exponential" and neg[0].sigma < 0.0
    assert neg[1].category == "oscillatory" and neg[1].sigma > 0.0
    harm = bridge.robin_eigs_ball(2.0, 2, 1, -0.5, 2)  # a = 1/2 - 1/2 = 0
    assert harm[0].category == "harmonic" and harm[0].sigma == 0.0
    pos = bridge.robin_eigs_ball(1.0, 2, 0, 0.7, 3)
    assert all(e.category == "oscillatory" and e.sigma > 0.0 for e in pos)


def test_oscillatory_sigmas_interlace_dirichlet():
    # Robin z-roots sit strictly between consecutive J_nu zeros when a > 0
    evs = bridge.robin_eigs_ball(1.0, 2, 0, 3.0, 5)
    zeros = [specfun.bessel_zero(0.0, m) for m in range(1, 7)]
    for m, ev in enumerate(evs):
        z = math.sqrt(ev.sigma)
        assert (zeros[m - 1] if m >= 1 else 0.0) < z < zeros[m]


def test_dirichlet_limit_large_beta():
    # beta -> +inf recovers the Dirichlet values at O(1/beta)
    for k in (0, 1):
        evs = bridge.robin_eigs_ball(1.0, 2, k, 1e7, 2)
        for m, ev in enumerate(evs, start=1):
            assert_close(ev.sigma, specfun.bessel_zero(float(k), m) ** 2,
                         1e-5, f"k={k} m={m}")


def test_pair_to_clamped_identities():
    rng = np.random.default_rng(3)
    for _ in range(100):
        s1, s2 = rng.uniform(-30.0, 300.0, size=2)
        alpha, lam = bridge.pair_to_clamped(s1, s2)
        assert alpha == s1 + s2 and lam == -s1 * s2
        # quadratic-formula identity; scale against alpha^2/4, which is what
        # the subtraction cancels when the sigmas nearly coincide
        scale = max(0.25 * alpha * alpha, abs(lam), 1.0)
        assert abs((lam + 0.25 * alpha * alpha) - (0.5 * (s1 - s2)) ** 2) \
            <= 1e-12 * scale


def test_paired_robin_hits_clamped_determinant():
    # criterion pattern at one point: same-degree same-beta Robin pairs land
    # on zeros of the clamped determinant
    for beta in (-2.0, 1.0):
        for k in (0, 1):
            evs = bridge.robin_eigs_ball(1.0, 2, k, beta, 3)
            a12 = bridge.pair_to_clamped(evs[0].sigma, evs[1].sigma)
            a13 = bridge.pair_to_clamped(evs[0].sigma, evs[2].sigma)
            for alpha, lam in (a12, a13):
                prob = ball.BallProblem(1.0, 2, alpha)
                assert abs(ball.clamped_det(prob, k, lam)) <= 1e-8


def test_clamped_profile_from_pair():
    evs = bridge.robin_eigs_ball(1.0, 2, 0, 1.0, 2)
    u = bridge.clamped_eigenfunction_from_pair(1.0, 2, evs[0], evs[1])
    grid = np.linspace(0.0, 1.0, 401)
    vals = u(grid)
    assert np.max(np.abs(vals)) == pytest.approx(1.0)
    assert abs(vals[-1]) <= 1e-12
    h = 1e-4
    assert abs(u(1.0) - u(1.0 - h)) / h <= 1e-2  # clamped derivative
    with pytest.raises(DegeneratePairError):
        bridge.clamped_eigenfunction_from_pair(1.0, 2, evs[0], evs[0])


def test_trace_branch_smooth_and_endpoint():
    branch = bridge.BranchId(0, 1)
    rows = bridge.trace_branch(1.0, 2, branch, np.linspace(-1.0, 50.0, 120))
    betas = [r[0] for r in rows]
    assert betas == sorted(betas)
    # lambda decreases toward the Dirichlet endpoint value along this branch
    a_inf, lam_inf = bridge.dirichlet_limit_pair(1.0, 2, 0, 1)
    assert abs(rows[-1][2] - lam_inf) / abs(lam_inf) <= 0.1
    with pytest.raises(DomainError):
        bridge.trace_branch(1.0, 2, branch, [0.0, 0.0, 1.0])


def test_trace_branch_jump_guard(monkeypatch):
    # genuine branches of this family are smooth with flattening slope, so
    # the continuity guard is exercised with an injected discontinuity
    def fake_eigs(R, N, k, beta, count):
        s2 = 300.0 if beta >= 2.5 else 2.0
        return [bridge.RobinEigenvalue(1.0, k, "oscillatory", beta),
                bridge.RobinEigenvalue(s2, k, "oscillatory", beta)]

    monkeypatch.setattr(bridge, "robin_eigs_ball", fake_eigs)
    with pytest.raises(BranchJumpError):
        bridge.trace_branch(1.0, 2, bridge.BranchId(0, 1),
                            [0.0, 1.0, 2.0, 3.0])


def test_dirichlet_limit_pair_values():
    g1 = specfun.bessel_zero(0.0, 1) ** 2
    g3 = specfun.bessel_zero(0.0, 3) ** 2
    alpha, lam = bridge.dirichlet_limit_pair(1.0, 2, 0, 2)
    assert_close(alpha, g1 + g3, 1e-13, "alpha endpoint")
    assert_close(lam, -g1 * g3, 1e-13, "lambda endpoint")


def test_branch_asymptote_formula():
    branch = bridge.BranchId(1, 2, N=3)
    R = 1.3
    f = bridge.branch_asymptote(R, 3, branch)
    nu = 1 + 0.5 * 3 - 1.0
    t2p2 = (2 * math.pi) ** 2
    for alpha in (50.0, 4e3):
        ref = (-0.25 * alpha * alpha + alpha * t2p2 / (2 * R * R)
               + t2p2 * (4 * nu * nu - 1 - t2p2) / (4 * R ** 4))
        assert_close(f(alpha), ref, 1e-14, f"alpha={alpha}")


def test_frank_asymptote_disk():
    gamma1 = specfun.bessel_zero(0.0, 1) ** 2
    val = bridge.frank_asymptote_disk(1.0, 1, -100.0)
    assert_close(val, 100.0 * gamma1 + 10.0 * 2.0 * gamma1, 1e-13, "k=1")
    with pytest.raises(DomainError):
        bridge.frank_asymptote_disk(1.0, 1, 5.0)
