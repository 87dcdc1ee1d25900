"""Method of fundamental solutions for the clamped plate on Fourier shapes.

The operator (Delta + a_plus)(Delta + a_minus) factors the plate equation
Delta^2 u + alpha Delta u = lambda u with a_plus + a_minus = alpha and
a_plus a_minus = -lambda.  Trial functions combine free-space kernels of
Delta + mu placed at exterior source points (a monopole and a source-normal
dipole per source).  An eigenvalue is detected where the smallest singular
value of the orthonormalized boundary trace drops: sigma1(lambda) measures
the sine of the angle between the trial space and the space of functions
with vanishing boundary data, so sigma1 is dimensionless in [0, 1].
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import geometry, specfun
from .ball import split
from .errors import (DomainError, RegimeError, SelfIntersectionError,
                     SolverError, SourcePlacementError)


@dataclass(frozen=True)
class MfsConfig:
    m: int = 200                      # boundary collocation points
    p: int | None = None              # interior points, default m // 4
    offset_factor: float = 1.0        # source offset in units of L / m
    rng_seed: int = 0
    sigma_tol: float = 1e-5
    scan_step: float | None = None

    def __post_init__(self):
        if self.m < 32:
            raise DomainError("need at least 32 boundary points")
        p = self.m // 4 if self.p is None else self.p
        if p < max(1, self.m // 10):
            raise DomainError("interior point count below m / 10")
        object.__setattr__(self, "p", p)
        if not 0.0 < self.offset_factor <= 2.0:
            raise DomainError("offset_factor must lie in (0, 2]")
        if self.sigma_tol <= 0.0:
            raise DomainError("sigma_tol must be positive")


@dataclass(frozen=True)
class MfsModel:
    shape: geometry.FourierShape
    config: MfsConfig
    alpha: float
    bx: np.ndarray      # (m, 2) boundary collocation points
    bnu: np.ndarray     # (m, 2) outward unit normals there
    src: np.ndarray     # (m, 2) exterior source points
    snu: np.ndarray     # (m, 2) dipole directions (normal at the parent)
    ipts: np.ndarray    # (p, 2) interior sample points
    perimeter: float

    @property
    def guard(self) -> float:
        """Half-width of the excluded bands around the regime boundaries."""
        return 1e-6 * max(1.0, self.alpha * self.alpha)

    @property
    def lam_floor(self) -> float:
        return -0.25 * self.alpha * self.alpha + self.guard


@dataclass(frozen=True)
class EigenLocation:
    lam: float
    sigma1: float
    sigma2: float
    multiplicity: int
    bracket: tuple[float, float]
    coefficients: np.ndarray
    coefficients2: np.ndarray | None = field(default=None, repr=False)
    model: "MfsModel | None" = field(default=None, repr=False)


def _equal_arclength(shape: geometry.FourierShape, m: int):
    """Parameter values of m equal-arclength boundary points, plus length."""
    n = max(4096, 16 * m)
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    speed = geometry.boundary(shape, t)[3]
    dt = 2.0 * np.pi / n
    # midpoint cumulative arclength: s[k] = length of [0, t_k]
    mid = 0.5 * (speed + np.roll(speed, -1))
    s = np.concatenate([[0.0], np.cumsum(mid * dt)])
    length = s[-1]
    knots = np.concatenate([t, [2.0 * np.pi]])
    targets = np.arange(m) * (length / m)
    return np.interp(targets, s, knots), length


def place_points(shape: geometry.FourierShape, alpha: float,
                 config: MfsConfig) -> MfsModel:
    """Collocation, source, and interior points for one shape.

    Sources sit outside the domain at offset_factor * (L/m) along the
    outward normal; the offset halves on failure before giving up.
    """
    m = config.m
    # resolution cap keeps the O(n^2) segment test affordable at large m
    if not geometry.is_simple(shape, n=min(4 * m, 2048)):
        raise SelfIntersectionError("boundary sample polygon self-intersects")
    tvals, length = _equal_arclength(shape, m)
    bx, _, bnu, _ = geometry.boundary(shape, tvals)

    offset = config.offset_factor * length / m
    for _ in range(7):
        src = bx + offset * bnu
        inside = geometry.point_in_shape(shape, src, n=4 * m)
        d2 = np.sum((src[:, None, :] - bx[None, :, :]) ** 2, axis=2)
        too_close = np.sqrt(d2.min()) < 0.1 * offset
        if not inside.any() and not too_close:
            break
        offset *= 0.5
    else:
        raise SourcePlacementError(
            "could not place exterior sources; boundary too concave")

    rng = np.random.default_rng(config.rng_seed)
    lo = bx.min(axis=0)
    hi = bx.max(axis=0)
    pts = []
    for _ in range(2000):
        cand = lo + (hi - lo) * rng.random((4 * config.p, 2))
        keep = geometry.point_in_shape(shape, cand, n=4 * m)
        pts.extend(cand[keep])
        if len(pts) >= config.p:
            break
    else:
        raise SourcePlacementError("interior rejection sampling failed")
    ipts = np.array(pts[:config.p])
    return MfsModel(shape, config, float(alpha), bx, bnu, src, bnu.copy(),
                    ipts, length)


class _Kernel:
    """Free-space kernel bundle of (Delta + a_plus)(Delta + a_minus).

    phi(r) combines the Delta + mu kernels -Y0(sqrt(mu) r)/4 (mu > 0) and
    K0(sqrt(-mu) r)/(2 pi) (mu < 0); second derivatives come from the
    radial ODE phi_mu'' = -phi_mu'/r - mu phi_mu.
    """

    def __init__(self, alpha: float, lam: float, guard: float):
        if lam < -0.25 * alpha * alpha + guard:
            raise RegimeError("lambda below the spectral floor band")
        if abs(lam) < guard:
            raise RegimeError("lambda inside the band around zero")
        pair = split(alpha, lam)
        self.mu = (pair.alpha_plus, pair.alpha_minus)
        self.den = pair.alpha_plus - pair.alpha_minus

    def _parts(self, r: np.ndarray, mu: float):
        """(value, radial derivative) of the Delta + mu kernel."""
        if mu > 0.0:
            s = math.sqrt(mu)
            return (-0.25 * specfun.bessel_y(0.0, s * r),
                    0.25 * s * specfun.bessel_y(1.0, s * r))
        tau = math.sqrt(-mu)
        c = 1.0 / (2.0 * math.pi)
        return (c * specfun.bessel_k(0.0, tau * r),
                -c * tau * specfun.bessel_k(1.0, tau * r))

    def tables(self, r: np.ndarray):
        """phi, phi', phi'', lap phi, (lap phi)' at distances r > 0."""
        vp, dp = self._parts(r, self.mu[0])
        vm, dm = self._parts(r, self.mu[1])
        phi = (vp - vm) / self.den
        dphi = (dp - dm) / self.den
        ddphi = -dphi / r - (self.mu[0] * vp - self.mu[1] * vm) / self.den
        lap = (-self.mu[0] * vp + self.mu[1] * vm) / self.den
        dlap = (-self.mu[0] * dp + self.mu[1] * dm) / self.den
        return phi, dphi, ddphi, lap, dlap


def _geometry_tables(pts: np.ndarray, model: MfsModel):
    d = pts[:, None, :] - model.src[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    dhat = d / r[..., None]
    tj = np.einsum("nmx,mx->nm", dhat, model.snu)  # source normal . dhat
    return r, dhat, tj


def assemble(model: MfsModel, lam: float) -> np.ndarray:
    """Stacked (2m + p) x 2m collocation matrix.

    Rows: boundary values, boundary normal derivatives, interior values.
    Columns: monopoles then source-normal dipoles.
    """
    kern = _Kernel(model.alpha, lam, model.guard)

    r, dhat, tj = _geometry_tables(model.bx, model)
    phi, dphi, ddphi, _, _ = kern.tables(r)
    ti = np.einsum("nmx,nx->nm", dhat, model.bnu)
    ninj = model.bnu @ model.snu.T
    top = np.concatenate([phi, dphi * tj], axis=1)
    mid = np.concatenate(
        [dphi * ti,
         ddphi * ti * tj + dphi / r * (ninj - ti * tj)], axis=1)

    ri, _, tji = _geometry_tables(model.ipts, model)
    phii, dphii, _, _, _ = kern.tables(ri)
    bot = np.concatenate([phii, dphii * tji], axis=1)
    return np.concatenate([top, mid, bot], axis=0)


def sigma1(model: MfsModel, lam: float) -> float:
    return _analyze(model, lam, want_vectors=False)[0]


def _analyze(model: MfsModel, lam: float, want_vectors: bool):
    mat = assemble(model, lam)
    norms = np.linalg.norm(mat, axis=0)
    bad = norms < 1e-290
    if bad.any():
        warnings.warn("rank-deficient collocation matrix", RuntimeWarning)
        norms = np.where(bad, 1.0, norms)
    q, rfac = np.linalg.qr(mat / norms)
    nb = 2 * model.config.m
    if not want_vectors:
        svals = np.linalg.svd(q[:nb], compute_uv=False)
        return float(svals[-1]), float(svals[-2]), None, None
    _, svals, vt = np.linalg.svd(q[:nb])

    def coeffs(v):
        try:
            c = np.linalg.solve(rfac, v)
        except np.linalg.LinAlgError:
            c = np.linalg.lstsq(rfac, v, rcond=None)[0]
        c = c / norms
        return c / np.linalg.norm(c)

    return (float(svals[-1]), float(svals[-2]),
            coeffs(vt[-1]), coeffs(vt[-2]))


def solve_at(model: MfsModel, lam: float,
             bracket: tuple[float, float] | None = None) -> EigenLocation:
    """Package the trial-space solution at a located eigenvalue."""
    s1, s2, c1, c2 = _analyze(model, lam, want_vectors=True)
    tol = model.config.sigma_tol
    mult = 2 if s2 <= tol else 1
    return EigenLocation(float(lam), s1, s2, mult,
                         bracket if bracket is not None else (lam, lam),
                         c1, c2 if mult == 2 else None, model)


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, a: float, b: float, tol: float):
    """Golden-section minimum of f on [a, b] to interval width tol."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def locate_eigenvalues(model: MfsModel, window: tuple[float, float],
                       count: int | None = None,
                       first_only: bool = False) -> list[EigenLocation]:
    """Scan sigma1 over the window and refine its dips.

    Every strict local minimum of the coarse scan is refined by golden
    section; a refined point counts as an eigenvalue when sigma1 falls at
    or below config.sigma_tol (multiplicity 2 when sigma2 does as well).
    """
    lo, hi = window
    lo = max(lo, model.lam_floor)
    if hi <= lo:
        raise DomainError("empty scan window")
    g = model.guard
    segments = []
    for a, b in ((lo, min(hi, -g)), (max(lo, g), hi)):
        if b > a:
            segments.append((a, b))
    found: list[EigenLocation] = []
    tol = model.config.sigma_tol
    for a, b in segments:
        step = model.config.scan_step or max((b - a) / 400.0, 1e-7)
        n = max(int(math.ceil((b - a) / step)) + 1, 8)
        grid = np.linspace(a, b, n)
        vals = np.array([sigma1(model, x) for x in grid])
        for i in range(1, n - 1):
            if not (vals[i] < vals[i - 1] and vals[i] <= vals[i + 1]):
                continue
            span_tol = 1e-9 * max(1.0, abs(grid[i]))
            x, s = _golden_min(lambda y: sigma1(model, y),
                               grid[i - 1], grid[i + 1], span_tol)
            if s <= tol:
                loc = solve_at(model, x, (x - span_tol, x + span_tol))
                found.append(loc)
                if first_only or (count is not None and len(found) >= count):
                    return found
    return found


def _evaluate_block(model: MfsModel, kern: _Kernel,
                    coefficients: np.ndarray, pts: np.ndarray):
    r, dhat, tj = _geometry_tables(pts, model)
    phi, dphi, ddphi, lap, dlap = kern.tables(r)
    m = model.config.m
    cm, cd = coefficients[:m], coefficients[m:]

    u = phi @ cm + (dphi * tj) @ cd
    lap_u = lap @ cm + (dlap * tj) @ cd
    # monopole gradient phi' dhat; dipole gradient from the product rule
    gm = np.einsum("nm,nmx,m->nx", dphi, dhat, cm)
    gd1 = np.einsum("nm,nm,nmx,m->nx", ddphi, tj, dhat, cd)
    rest = model.snu[None, :, :] - tj[..., None] * dhat
    gd2 = np.einsum("nm,nmx,m->nx", dphi / r, rest, cd)
    return u, gm + gd1 + gd2, lap_u


def evaluate(model: MfsModel, coefficients: np.ndarray, pts, lam: float,
             check: bool = True):
    """(u, grad u, lap u) of the trial function at the given points.

    With check=True every point must lie inside the shape; pass
    check=False for points sitting on the boundary itself.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if check:
        ok = geometry.point_in_shape(model.shape, pts,
                                     n=4 * model.config.m)
        if not ok.all():
            raise DomainError("evaluation point outside the domain")
    kern = _Kernel(model.alpha, lam, model.guard)
    # block the point set: the kernel tables hold ~14 (n, m) panels at once
    block = max(1, 2_000_000 // model.config.m)
    if len(pts) <= block:
        return _evaluate_block(model, kern, coefficients, pts)
    parts = [_evaluate_block(model, kern, coefficients, pts[i:i + block])
             for i in range(0, len(pts), block)]
    return (np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]),
            np.concatenate([p[2] for p in parts]))


def boundary_residual(model: MfsModel, loc: EigenLocation,
                      n: int | None = None) -> float:
    """RMS clamped-condition violation on fresh boundary points, relative
    to the interior amplitude of the trial function."""
    n = n if n is not None else 4 * model.config.m
    t = (np.arange(n) + 0.37) * (2.0 * math.pi / n)  # avoid collocation t's
    pt, _, nu, _ = geometry.boundary(model.shape, t)
    u, grad, _ = evaluate(model, loc.coefficients, pt, loc.lam, check=False)
    dn = np.einsum("nx,nx->n", grad, nu)
    scale = model.perimeter / (2.0 * math.pi)
    res = math.sqrt(float(np.mean(u * u + (scale * dn) ** 2)))
    ui = evaluate(model, loc.coefficients, model.ipts, loc.lam,
                  check=False)[0]
    amp = float(np.max(np.abs(ui)))
    if amp == 0.0:
        raise SolverError("trial function vanishes at interior points")
    return res / amp
