"""Shape calculus and descent: gradient identities, descent runs, field
diagnostics.  Gradient checks lean on disk symmetries, which pin every
component to a closed form or to zero."""
import dataclasses
import math
import warnings

import numpy as np
import pytest

from platekit import geometry, mfs, shapeopt
from platekit.errors import (DegenerateEigenvalueError, NoSignChangeError,
                             SolverError)
from platekit.geometry import FourierShape

from conftest import ACC_OFFSET, DISK_R, acc_config, assert_close

LAM1_DISK_A0 = 1030.0227680       # unit-area disk, alpha = 0
LAM1_R1_A0 = 104.36310555877536   # radius-1 disk, alpha = 0


@pytest.fixture(scope="module")
def ellipse_grad():
    """Raw gradient on a unit-area 3:2 ellipse at alpha = 50."""
    ell = geometry.rescale_to_unit_area(FourierShape.ellipse(1.2, 0.8, P=8))
    g = shapeopt.shape_gradient(ell, 50.0, acc_config(m=160))
    return ell, g


def test_default_seeds_structure():
    seeds = shapeopt.default_seeds(16)
    assert len(seeds) == 5
    for s in seeds:
        assert s.P == 16
        assert abs(geometry.area(s) - 1.0) <= 1e-12
    c = seeds[0].coeffs()
    disk = np.zeros_like(c)
    disk[1] = disk[3 * 16 + 2] = DISK_R
    assert np.max(np.abs(c - disk)) <= 1e-12
    again = shapeopt.default_seeds(16)
    for s, s2 in zip(seeds, again):
        assert np.array_equal(s.coeffs(), s2.coeffs())


def test_disk_gradient_is_stationary():
    # dilation-corrected gradient of the area-constrained problem
    disk = FourierShape.circle(DISK_R, P=8)
    g = shapeopt.shape_gradient(disk, 0.0, acc_config(m=160),
                                project_area=True)
    assert np.max(np.abs(g)) <= 1e-6 * LAM1_DISK_A0


def test_dilation_derivative_is_minus_four_lambda():
    # lambda scales as R^-4, so d/ds lambda((1+s) disk) = -4 lambda
    disk = FourierShape.circle(DISK_R, P=8)
    g = shapeopt.shape_gradient(disk, 0.0, acc_config(m=160))
    P = 8
    deriv = DISK_R * (g[1] + g[3 * P + 2])
    assert_close(deriv, -4.0 * LAM1_DISK_A0, 1e-4, "dilation derivative")


def test_translation_components_vanish(ellipse_grad):
    _, g = ellipse_grad
    P = 8
    scale = np.max(np.abs(g))
    assert abs(g[0]) <= 1e-6 * scale
    assert abs(g[2 * P + 1]) <= 1e-6 * scale


def test_gradient_rotation_equivariance(ellipse_grad):
    ell, g = ellipse_grad
    th = 0.7
    rot = geometry.rotate(ell, th)
    gr = shapeopt.shape_gradient(rot, 50.0, acc_config(m=160))
    P = 8
    n1 = P + 1
    a1, b1 = g[:n1], g[n1:n1 + P]
    a2, b2 = g[n1 + P:2 * n1 + P], g[2 * n1 + P:]
    c, s = math.cos(th), math.sin(th)
    mapped = np.concatenate([c * a1 - s * a2, c * b1 - s * b2,
                             s * a1 + c * a2, s * b1 + c * b2])
    assert np.max(np.abs(gr - mapped)) <= 1e-9 * np.max(np.abs(g))


def test_optimize_alpha0_returns_to_disk():
    """At alpha = 0 the disk minimizes, so descent must undo the seed."""
    seed = geometry.rescale_to_unit_area(
        geometry.perturbed_circle(DISK_R, 2, 0.05, 8))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        traj = shapeopt.optimize(0.0, seed, acc_config(m=120),
                                 shapeopt.OptimizeOptions(max_iter=15,
                                                          step0=2e-4))
    lams = [st.lambda1 for st in traj]
    for prev, cur in zip(lams, lams[1:]):
        assert cur <= prev + 1e-9 * abs(prev)
    for st in traj:
        assert abs(geometry.area(st.shape) - 1.0) <= 1e-9
    g0 = np.linalg.norm(traj[0].gradient)
    gF = np.linalg.norm(traj[-1].gradient)
    assert gF <= g0 / 10.0
    assert_close(traj[-1].lambda1, LAM1_DISK_A0, 1e-4, "final lambda1")
    c = traj[-1].shape.coeffs()
    c[1] -= DISK_R
    c[3 * 8 + 2] -= DISK_R
    assert np.max(np.abs(c)) <= 2e-2  # close to a centered disk


def test_optimize_alpha110_gradient_contracts(opt110):
    traj = opt110["traj"]
    g0 = np.linalg.norm(traj[0].gradient)
    gF = np.linalg.norm(traj[-1].gradient)
    assert gF <= g0 / 10.0


def test_optimize_alpha110_monotone_unit_area(opt110):
    traj = opt110["traj"]
    lams = [st.lambda1 for st in traj]
    for prev, cur in zip(lams, lams[1:]):
        assert cur <= prev + 1e-9 * abs(prev)
    for st in traj:
        assert abs(geometry.area(st.shape) - 1.0) <= 1e-9
    assert traj[-1].lambda1 < -1622.1661301904064  # beats the disk


def test_nodal_count_disk_modes(disk_locator):
    model, locs = disk_locator
    assert shapeopt.nodal_count(model.shape, locs[0]) == 1
    assert shapeopt.nodal_count(model.shape, locs[1]) == 2


def test_nodal_count_coarse_grid_warns(disk_locator):
    model, locs = disk_locator
    with pytest.warns(RuntimeWarning, match="too coarse"):
        n = shapeopt.nodal_count(model.shape, locs[0], resolution=3)
    assert n >= 1


def test_nodal_count_requires_model(disk_locator):
    model, locs = disk_locator
    orphan = dataclasses.replace(locs[0], model=None)
    with pytest.raises(SolverError):
        shapeopt.nodal_count(model.shape, orphan)


def test_serrin_defect_separates_disk_from_ellipse(disk_locator):
    model, locs = disk_locator
    assert shapeopt.serrin_defect(model.shape, locs[0]) <= 1e-5
    ell = geometry.rescale_to_unit_area(FourierShape.ellipse(1.2, 0.8, P=8))
    _, loc, _ = shapeopt.lambda1_with_eigenfunction(
        ell, 0.0, acc_config(m=160), want_gap=False)
    assert shapeopt.serrin_defect(ell, loc) > 1e-2


def test_polish_sharpens_lambda1():
    loc = shapeopt.polish_lambda1(FourierShape.circle(1.0, P=4), 0.0, 240,
                                  hint=104.35, offset_factor=ACC_OFFSET)
    assert_close(loc.lam, LAM1_R1_A0, 1e-5, "polished lambda1")
    assert loc.sigma1 <= 1e-6


def test_boundary_lap_richardson_matches_direct(disk_locator):
    model, locs = disk_locator
    t = np.linspace(0.0, 2.0 * np.pi, 40, endpoint=False)
    rich = shapeopt.boundary_lap_richardson(model, locs[0], t)
    pts = geometry.boundary(model.shape, t)[0]
    direct = mfs.evaluate(model, locs[0].coefficients, pts, locs[0].lam,
                          check=False)[2]
    rel = np.max(np.abs(rich - direct)) / np.max(np.abs(direct))
    assert rel <= 1e-4


def test_gradient_rejects_degenerate_lambda1(disk_locator, monkeypatch):
    _, locs = disk_locator
    double = dataclasses.replace(locs[0], multiplicity=2)

    def fake(shape, alpha, config, **kw):
        return double.lam, double, 0.0

    monkeypatch.setattr(shapeopt, "lambda1_with_eigenfunction", fake)
    with pytest.raises(DegenerateEigenvalueError):
        shapeopt.shape_gradient(FourierShape.circle(1.0, P=4), 0.0,
                                acc_config(m=64))


def test_critical_alpha_rejects_empty_interval():
    with pytest.raises(NoSignChangeError):
        shapeopt.critical_alpha((50.0, 50.0), acc_config(m=64),
                                shapeopt.OptimizeOptions(max_iter=2))
