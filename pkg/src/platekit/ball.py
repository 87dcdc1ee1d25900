"""Exact clamped-plate spectra on balls via radial determinants.

For Delta^2 u + alpha Delta u = lambda u on a ball of radius R in R^N with
clamped boundary, separation into spherical degree k reduces each degree to a
2x2 boundary determinant of two radial solutions of
(Delta + alpha_plus)(Delta + alpha_minus) u = 0 with
alpha_pm = alpha/2 +- sqrt(alpha^2/4 + lambda).  The radial building block is
r^{1-N/2} C_nu(r sqrt(mu)) with nu = k + N/2 - 1, where C is J for mu > 0 and
I for mu < 0 (and r^k when mu = 0).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import (DiscriminantError, DomainError, NotAnEigenvalueError,
                     RegimeError, SolverError)


@dataclass(frozen=True)
class BallProblem:
    """Clamped plate on the ball of radius R in R^N at parameter alpha."""
    R: float
    N: int
    alpha: float

    def __post_init__(self):
        if not self.R > 0.0:
            raise DomainError("radius must be positive")
        if int(self.N) != self.N or self.N < 2:
            raise DomainError("dimension must be an integer >= 2")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "R", float(self.R))
        object.__setattr__(self, "alpha", float(self.alpha))

    def nu(self, k: int) -> float:
        return k + 0.5 * self.N - 1.0

    def guard(self) -> float:
        """Half-width of the excluded bands at lambda = 0 and -alpha^2/4."""
        return 1e-9 * max(1.0, self.alpha * self.alpha)


@dataclass(frozen=True)
class SplitPair:
    alpha_plus: float
    alpha_minus: float

    @property
    def alpha(self) -> float:
        return self.alpha_plus + self.alpha_minus

    @property
    def lam(self) -> float:
        return -self.alpha_plus * self.alpha_minus


@dataclass(frozen=True)
class BallEigenvalue:
    lam: float
    k: int
    multiplicity: int
    regime: str  # 'positive' | 'negative' | 'buckling'
    residual: float


def split(alpha: float, lam: float) -> SplitPair:
    """Factor lambda into alpha_plus, alpha_minus with sum alpha, product -lambda."""
    alpha = float(alpha)
    lam = float(lam)
    disc = 0.25 * alpha * alpha + lam
    tol = 1e-12 * max(1.0, 0.25 * alpha * alpha)
    if disc < -tol:
        raise DiscriminantError(
            f"lambda = {lam!r} below -alpha^2/4 = {-0.25 * alpha * alpha!r}")
    root = math.sqrt(max(disc, 0.0))
    return SplitPair(0.5 * alpha + root, 0.5 * alpha - root)


def spherical_multiplicity(k: int, N: int) -> int:
    """Dimension of degree-k spherical harmonics on S^{N-1}."""
    if k == 0:
        return 1
    if N == 2:
        return 2
    lower = math.comb(N + k - 3, k - 2) if k >= 2 else 0
    return math.comb(N + k - 1, k) - lower


def _amp(nu: float, x: np.ndarray) -> np.ndarray:
    """Oscillation-amplitude envelope of J_nu, clamped at the turning point.

    Strictly positive, so it can normalize determinant terms whose J factors
    vanish (several can vanish at once at Dirichlet-pair points).
    """
    return np.sqrt(2.0 / (np.pi * np.maximum(x, nu + 1.0)))


def _det_arrays(problem: BallProblem, k: int, lam: np.ndarray):
    """Signed determinant parts (p1, p2) and envelope magnitude for lambda.

    The determinant (up to the positive factor R^{2-N} and, where scaled I
    functions appear, the analytically cancelled exponential e^{R tau}) is
    p1 + p2.  The third return value bounds the terms' oscillation amplitude
    and never vanishes, so (p1 + p2)/norm stays O(1) with detectable signs.
    """
    R, alpha = problem.R, problem.alpha
    nu = problem.nu(k)
    disc = 0.25 * alpha * alpha + lam
    if np.any(disc < 0.0):
        raise DiscriminantError("lambda below -alpha^2/4")
    root = np.sqrt(disc)
    ap = 0.5 * alpha + root
    am = 0.5 * alpha - root
    p1 = np.empty_like(lam)
    p2 = np.empty_like(lam)
    norm = np.empty_like(lam)

    pos = lam > 0.0
    if np.any(pos):
        s = np.sqrt(ap[pos])
        tau = np.sqrt(-am[pos])
        i_lo = specfun.bessel_i(nu, R * tau, scaled=True)
        i_hi = specfun.bessel_i(nu + 1.0, R * tau, scaled=True)
        p1[pos] = tau * specfun.bessel_j(nu, R * s) * i_hi
        p2[pos] = s * specfun.bessel_j(nu + 1.0, R * s) * i_lo
        norm[pos] = tau * _amp(nu, R * s) * i_hi + \
            s * _amp(nu + 1.0, R * s) * i_lo

    neg = ~pos
    if np.any(neg):
        if np.any(am[neg] <= 0.0) or np.any(ap[neg] <= 0.0):
            # alpha <= 0 side: both factors modified, no roots exist there
            t1 = np.sqrt(-ap[neg])
            t2 = np.sqrt(-am[neg])
            i1n = specfun.bessel_i(nu, R * t1, scaled=True)
            i1p = specfun.bessel_i(nu + 1.0, R * t1, scaled=True)
            i2n = specfun.bessel_i(nu, R * t2, scaled=True)
            i2p = specfun.bessel_i(nu + 1.0, R * t2, scaled=True)
            p1[neg] = t1 * i1p * i2n
            p2[neg] = -t2 * i1n * i2p
            norm[neg] = np.abs(p1[neg]) + np.abs(p2[neg]) + 1e-300
        else:
            s1 = np.sqrt(ap[neg])
            s2 = np.sqrt(am[neg])
            p1[neg] = s1 * specfun.bessel_j(nu + 1.0, R * s1) * \
                specfun.bessel_j(nu, R * s2)
            p2[neg] = -s2 * specfun.bessel_j(nu, R * s1) * \
                specfun.bessel_j(nu + 1.0, R * s2)
            norm[neg] = s1 * _amp(nu + 1.0, R * s1) * _amp(nu, R * s2) + \
                s2 * _amp(nu, R * s1) * _amp(nu + 1.0, R * s2)
    return p1, p2, norm


def clamped_det(problem: BallProblem, k: int, lam, normalized: bool = True):
    """Boundary determinant whose roots are the degree-k eigenvalues.

    Guard bands of half-width problem.guard() around lambda = 0 and around
    -alpha^2/4 are excluded (the two radial solutions degenerate there).
    With normalized=True the value is divided by a strictly positive
    oscillation-amplitude envelope of its two products, keeping it O(1) and
    vanishing exactly at eigenvalues.
    """
    arr = np.atleast_1d(np.asarray(lam, dtype=float))
    scalar = np.asarray(lam).ndim == 0
    g = problem.guard()
    if np.any(np.abs(arr) < g):
        raise RegimeError("lambda inside the guard band at 0; "
                          "buckling eigenvalues are handled separately")
    if np.any(arr < -0.25 * problem.alpha ** 2 + g):
        raise RegimeError("lambda inside the guard band at -alpha^2/4")
    p1, p2, norm = _det_arrays(problem, k, arr)
    val = p1 + p2
    if normalized:
        val = val / norm
    return float(val[0]) if scalar else val


def _first_root_bound(problem: BallProblem, k: int) -> float:
    """lambda below which degree k provably has no eigenvalue.

    Roots require R sqrt(alpha_plus) >= j_{nu,1}.  With q = (j_{nu,1}/R)^2
    this restricts lambda only when q > alpha/2 (alpha_plus starts at alpha/2
    on the admissible range); then lambda >= q^2 - alpha q.  Above the
    supported Bessel-order range the crude bound j_{nu,1} > nu is used.
    """
    nu = problem.nu(k)
    j1 = specfun.bessel_zero(nu, 1) if nu <= 99.0 else nu
    q = (j1 / problem.R) ** 2
    if q <= 0.5 * problem.alpha:
        return -0.25 * problem.alpha ** 2
    return q * q - problem.alpha * q


def _scan_degree(problem: BallProblem, k: int, lo: float, hi: float,
                 pts: int = 2001) -> list[tuple[float, float]]:
    """Roots (lambda, residual) of the degree-k determinant in [lo, hi]."""
    g = problem.guard()
    lo = max(lo, -0.25 * problem.alpha ** 2 + g)
    lo = max(lo, _first_root_bound(problem, k) - 2.0 * abs(hi - lo) / pts)
    if hi <= lo:
        return []
    segments = []
    if lo < -g:
        segments.append((lo, min(hi, -g)))
    if hi > g:
        segments.append((max(lo, g), hi))
    roots = []
    for a, b in segments:
        if b <= a:
            continue
        n = max(64, int(pts * (b - a) / max(hi - lo, 1e-300)))
        grid = np.linspace(a, b, n)
        p1, p2, norm = _det_arrays(problem, k, grid)
        vals = (p1 + p2) / norm
        sign = np.sign(vals)
        flips = np.nonzero(sign[:-1] * sign[1:] < 0.0)[0]
        if flips.size:
            roots.extend(_bisect_many(problem, k, grid[flips],
                                      grid[flips + 1], vals[flips]))
    return roots


def _bisect_many(problem, k, a, b, fa) -> list[tuple[float, float]]:
    """Bisect a batch of sign-change brackets to 1e-11 relative width."""
    a, b, fa = a.copy(), b.copy(), fa.copy()
    for _ in range(80):
        mid = 0.5 * (a + b)
        open_ = (b - a) > 1e-11 * np.maximum(1.0, np.abs(mid))
        if not np.any(open_):
            break
        fm = clamped_det(problem, k, mid)
        left = (fa * fm < 0.0) & open_
        right = ~(fa * fm < 0.0) & open_
        b = np.where(left, mid, b)
        a = np.where(right, mid, a)
        fa = np.where(right, fm, fa)
    mid = 0.5 * (a + b)
    res = np.abs(clamped_det(problem, k, mid))
    return list(zip(mid.tolist(), res.tolist()))


def _buckling_hits(problem: BallProblem) -> tuple[list[tuple[int, float]], bool]:
    """Degrees k whose buckling condition J_{k+N/2}(R sqrt(alpha)) = 0 holds.

    Second return value flags truncation at the supported order range.
    """
    if problem.alpha <= 0.0:
        return [], False
    z = problem.R * math.sqrt(problem.alpha)
    hits = []
    k = 0
    while True:
        order = k + 0.5 * problem.N
        if order + 1.8 * order ** (1.0 / 3.0) > z + 1e-8 * max(1.0, z):
            # classical bound j_{order,1} > order + 1.85 order^{1/3}:
            # no zero of this or any higher order can sit near z
            return hits, False
        if order > 99.0:
            return hits, True
        m = 1
        while True:
            j = specfun.bessel_zero(order, m)
            if abs(j - z) <= 1e-8 * max(1.0, z):
                hits.append((k, abs(j - z)))
                break
            if j > z + 1.0:
                break
            m += 1
        k += 1


def clamped_eigs(problem: BallProblem, count: int) -> list[BallEigenvalue]:
    """The count smallest clamped eigenvalues, multiplicities resolved."""
    if not 1 <= count <= 200:
        raise DomainError("count must be in [1, 200]")
    g = problem.guard()
    alpha = problem.alpha
    lo = -0.25 * alpha * alpha + g
    span = max(100.0, 200.0 / problem.R ** 4,
               25.0 * abs(alpha) / problem.R ** 2)
    simple: list[tuple[float, int, float]] = []  # (lambda, k, residual)
    complete = True
    for _ in range(40):
        hi = lo + span
        simple = []
        complete = True
        k = 0
        while True:
            if _first_root_bound(problem, k) > hi and k >= 1:
                break
            if problem.nu(k) + 1.0 > 100.0:
                complete = False  # order range exhausted before the bound
                break
            for lam, res in _scan_degree(problem, k, lo, hi):
                simple.append((lam, k, res))
            k += 1
        hits, truncated = _buckling_hits(problem)
        complete = complete and not truncated
        for kb, res in hits:
            simple.append((0.0, kb, res))
        total = sum(spherical_multiplicity(kk, problem.N) for _, kk, _ in simple)
        if total >= count or not complete:
            break
        span *= 2.0
    else:  # pragma: no cover
        raise SolverError("eigenvalue window expansion did not terminate")

    simple.sort(key=lambda t: t[0])
    merged: list[BallEigenvalue] = []
    for lam, k, res in simple:
        mult = spherical_multiplicity(k, problem.N)
        regime = "buckling" if lam == 0.0 else (
            "positive" if lam > 0.0 else "negative")
        if merged and abs(lam - merged[-1].lam) <= 1e-8 * max(1.0, abs(lam)):
            prev = merged[-1]
            merged[-1] = BallEigenvalue(prev.lam, prev.k,
                                        prev.multiplicity + mult,
                                        prev.regime, max(prev.residual, res))
        else:
            merged.append(BallEigenvalue(lam, k, mult, regime, res))

    out: list[BallEigenvalue] = []
    total = 0
    for ev in merged:
        out.append(ev)
        total += ev.multiplicity
        if total >= count:
            break
    if not complete:
        warnings.warn("spectrum may be incomplete: scan stopped at the "
                      "largest supported spherical degree", RuntimeWarning)
    return out


def buckling_eigs(R: float, N: int, count: int) -> list[BallEigenvalue]:
    """The count smallest buckling values Lambda = j_{k+N/2,m}^2 / R^2."""
    if not 1 <= count <= 200:
        raise DomainError("count must be in [1, 200]")
    if R <= 0.0 or N < 2:
        raise DomainError("need R > 0 and N >= 2")
    z2 = 5.2 * count + 60.0  # Weyl overshoot of the count-th zero squared
    cands: list[tuple[float, int]] = []
    for _ in range(8):
        entries = specfun.zeros_below(0.5 * N, math.sqrt(z2))
        cands = [((z / R) ** 2, k) for k, _m, z in entries]
        if sum(spherical_multiplicity(k, N) for _, k in cands) >= count:
            break
        z2 *= 1.4
    cands.sort()
    out: list[BallEigenvalue] = []
    total = 0
    for val, k in cands:
        mult = spherical_multiplicity(k, N)
        out.append(BallEigenvalue(val, k, mult, "buckling", 0.0))
        total += mult
        if total >= count:
            break
    return out


def _block(kind: str, nu: float, scale: float, expo_ref: float):
    """Radial factor r^{1-N/2} C_nu(scale r) and its derivative.

    kind 'j' uses J, 'i' uses the scaled I with the overall e^{scale*expo_ref}
    removed (so values stay bounded for r <= expo_ref).
    Returns (value, derivative) as functions of a radius array.
    """
    def pair(r, k, N):
        r = np.asarray(r, dtype=float)
        rp = np.where(r > 0.0, r ** (1.0 - 0.5 * N), 0.0)
        z = scale * r
        if kind == "j":
            cn = specfun.bessel_j(nu, z)
            cn1 = specfun.bessel_j(nu + 1.0, z)
            sgn = -1.0
            damp = np.ones_like(r)
        else:
            cn = specfun.bessel_i(nu, z, scaled=True)
            cn1 = specfun.bessel_i(nu + 1.0, z, scaled=True)
            sgn = 1.0
            damp = np.exp(scale * (r - expo_ref))
        with np.errstate(invalid="ignore", divide="ignore"):
            val = rp * cn * damp
            der = rp * (np.where(r > 0.0, k / r, 0.0) * cn + sgn * scale * cn1) * damp
        if np.any(r == 0.0):
            at0 = (scale / 2.0) ** nu / math.gamma(nu + 1.0) if k == 0 else 0.0
            at0 *= math.exp(-scale * expo_ref) if kind == "i" else 1.0
            val = np.where(r == 0.0, at0, val)
            der = np.where(r == 0.0, 0.0, der)
        return val, der

    return pair


def radial_profile(problem: BallProblem, k: int, lam: float):
    """Radial eigenfunction profile at an eigenvalue found by clamped_eigs.

    Returns a callable u(r) on [0, R], normalized to max |u| = 1; u and u'
    vanish at R up to the determinant residual.
    """
    R, N, alpha = problem.R, problem.N, problem.alpha
    nu = problem.nu(k)
    if lam == 0.0:
        z = R * math.sqrt(alpha)
        order = k + 0.5 * N
        if abs(specfun.bessel_j(order, z)) > 1e-6:
            raise NotAnEigenvalueError("alpha is not a buckling eigenvalue")
        s = math.sqrt(alpha)
        fpair = _block("j", nu, s, R)

        def raw(r):
            r = np.asarray(r, dtype=float)
            f, _ = fpair(r, k, N)
            fR, _ = fpair(np.array([R]), k, N)
            return f * R ** k - fR[0] * r ** k
    else:
        if abs(clamped_det(problem, k, lam)) > 1e-6:
            raise NotAnEigenvalueError(
                "determinant not small: lambda is not a degree-k eigenvalue")
        pair = split(alpha, lam)
        if lam > 0.0:
            fpair = _block("j", nu, math.sqrt(pair.alpha_plus), R)
            gpair = _block("i", nu, math.sqrt(-pair.alpha_minus), R)
        else:
            fpair = _block("j", nu, math.sqrt(pair.alpha_plus), R)
            gpair = _block("j", nu, math.sqrt(pair.alpha_minus), R)

        rR = np.array([R])
        fR, dfR = (v[0] for v in fpair(rR, k, N))
        gR, dgR = (v[0] for v in gpair(rR, k, N))
        # kernel of [[fR, gR], [dfR, dgR]]; take the better-conditioned row
        if math.hypot(fR, gR) >= math.hypot(dfR, dgR):
            A, B = gR, -fR
        else:
            A, B = dgR, -dfR

        def raw(r):
            r = np.asarray(r, dtype=float)
            f, _ = fpair(r, k, N)
            g, _ = gpair(r, k, N)
            return A * f + B * g

    grid = np.linspace(0.0, R, 1025)
    vals = raw(grid)
    idx = int(np.argmax(np.abs(vals)))
    peak = vals[idx]
    if peak == 0.0:
        raise NotAnEigenvalueError("degenerate kernel vector")

    def profile(r):
        r = np.asarray(r, dtype=float)
        if np.any((r < -1e-12) | (r > R * (1.0 + 1e-12))):
            raise DomainError("radius outside [0, R]")
        out = raw(np.clip(r, 0.0, R)) / peak
        return float(out) if np.asarray(r).ndim == 0 else out

    return profile
