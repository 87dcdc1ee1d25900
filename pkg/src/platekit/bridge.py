"""Robin-Laplacian bridge to the clamped plate on balls.

Every clamped eigenpair on a ball arises from two Robin-Laplacian
eigenvalues sigma_1, sigma_2 of the same spherical degree and the same Robin
parameter beta, via alpha = sigma_1 + sigma_2 and lambda = -sigma_1 sigma_2.
This module finds Robin eigenvalues (oscillatory sigma > 0, at most one
exponential sigma < 0, harmonic sigma = 0 at beta = -k/R), pairs them,
traces analytic branches over beta grids, and evaluates the two closed-form
asymptotics (large-alpha branch expansion, alpha -> -infinity tension
expansion on disks).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import navier, specfun
from .errors import (BranchJumpError, DegeneratePairError, DomainError,
                     SolverError)


@dataclass(frozen=True)
class RobinEigenvalue:
    sigma: float
    k: int
    category: str  # 'oscillatory' | 'exponential' | 'harmonic'
    beta: float


@dataclass(frozen=True)
class BranchId:
    """Analytic-branch label: spherical degree k, pair offset t."""
    k: int
    t: int
    N: int = 2

    def __post_init__(self):
        if self.k < 0 or self.t < 1 or self.N < 2:
            raise DomainError("need k >= 0, t >= 1, N >= 2")

    @property
    def nu(self) -> float:
        return self.k + 0.5 * self.N - 1.0


def _amp(nu: float, x: float) -> float:
    return math.sqrt(2.0 / (math.pi * max(x, nu + 1.0)))


def _osc_eq(R: float, nu: float, a: float, z: float) -> float:
    """(k/R + beta) J_nu(z) - (z/R) J_{nu+1}(z) at z = R sqrt(sigma)."""
    return a * specfun.bessel_j(nu, z) - (z / R) * specfun.bessel_j(nu + 1.0, z)


def _osc_root(R: float, nu: float, a: float, lo: float, hi: float) -> float:
    flo = _osc_eq(R, nu, a, lo)
    fhi = _osc_eq(R, nu, a, hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:  # pragma: no cover
        raise SolverError("oscillatory Robin bracket lost")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-13 * max(1.0, mid):
            break
        fm = _osc_eq(R, nu, a, mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _exp_eq(R: float, nu: float, a: float, tau: float) -> float:
    """a + tau I_{nu+1}(R tau)/I_nu(R tau), increasing in tau from a < 0."""
    num = specfun.bessel_i(nu + 1.0, R * tau, scaled=True)
    den = specfun.bessel_i(nu, R * tau, scaled=True)
    return a + tau * num / den


def robin_eigs_ball(R: float, N: int, k: int, beta: float,
                    count: int) -> list[RobinEigenvalue]:
    """The count smallest Robin-Laplacian eigenvalues of spherical degree k.

    The boundary condition couples through a = k/R + beta: one negative
    (exponential) eigenvalue exists iff a < 0, sigma = 0 (harmonic) iff
    a = 0, and the oscillatory ones interlace the zeros of J_nu.
    """
    if not 1 <= count <= 100:
        raise DomainError("count must be in [1, 100]")
    if R <= 0.0 or N < 2 or k < 0:
        raise DomainError("need R > 0, N >= 2, k >= 0")
    nu = k + 0.5 * N - 1.0
    a = k / R + beta
    out: list[RobinEigenvalue] = []

    if a < 0.0:
        tau = 1.0
        for _ in range(200):
            if _exp_eq(R, nu, a, tau) > 0.0:
                break
            tau *= 2.0
        else:  # pragma: no cover
            raise SolverError("exponential Robin root not bracketed")
        lo, hi = 0.0, tau
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            if hi - lo <= 1e-14 * max(1.0, mid):
                break
            if _exp_eq(R, nu, a, mid) > 0.0:
                hi = mid
            else:
                lo = mid
        tau = 0.5 * (lo + hi)
        out.append(RobinEigenvalue(-tau * tau, k, "exponential", beta))
    elif a == 0.0:
        out.append(RobinEigenvalue(0.0, k, "harmonic", beta))

    m = 0
    while len(out) < count:
        left = specfun.bessel_zero(nu, m) if m >= 1 else 1e-9
        right = specfun.bessel_zero(nu, m + 1)
        if a > 0.0 or m >= 1:  # for a <= 0 the first interval has no root
            z = _osc_root(R, nu, a, left, right)
            out.append(RobinEigenvalue((z / R) ** 2, k, "oscillatory", beta))
        m += 1
    return out[:count]


def robin_residual(R: float, N: int, ev: RobinEigenvalue) -> float:
    """Normalized residual of the category's transcendental equation."""
    nu = ev.k + 0.5 * N - 1.0
    a = ev.k / R + ev.beta
    if ev.sigma > 0.0:
        z = R * math.sqrt(ev.sigma)
        scale = abs(a) * _amp(nu, z) + (z / R) * _amp(nu + 1.0, z) + 1e-300
        return abs(_osc_eq(R, nu, a, z)) / scale
    if ev.sigma < 0.0:
        tau = math.sqrt(-ev.sigma)
        return abs(_exp_eq(R, nu, a, tau)) / (abs(a) + tau + 1e-300)
    return abs(a)


def pair_to_clamped(sigma1: float, sigma2: float) -> tuple[float, float]:
    """(alpha, lambda) = (sigma1 + sigma2, -sigma1*sigma2)."""
    return sigma1 + sigma2, -sigma1 * sigma2


def robin_radial_profile(R: float, N: int, ev: RobinEigenvalue):
    """Radial factor of the Robin eigenfunction, value and derivative.

    Returns f(r) -> (value, derivative) arrays; scaled-I profiles carry the
    bounded normalization e^{-R tau} so values stay finite at any sigma.
    """
    nu = ev.k + 0.5 * N - 1.0
    k = ev.k

    def shape(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            rp = np.where(r > 0.0, r ** (1.0 - 0.5 * N), 0.0)
            kr = np.where(r > 0.0, k / np.maximum(r, 1e-300), 0.0)
        if ev.sigma > 0.0:
            s = math.sqrt(ev.sigma)
            cn = specfun.bessel_j(nu, s * r)
            cn1 = specfun.bessel_j(nu + 1.0, s * r)
            val = rp * cn
            der = rp * (kr * cn - s * cn1)
            lim0 = (s / 2.0) ** nu / math.gamma(nu + 1.0)
        elif ev.sigma < 0.0:
            tau = math.sqrt(-ev.sigma)
            cn = specfun.bessel_i(nu, tau * r, scaled=True)
            cn1 = specfun.bessel_i(nu + 1.0, tau * r, scaled=True)
            damp = np.exp(tau * (r - R))
            val = rp * cn * damp
            der = rp * (kr * cn + tau * cn1) * damp
            lim0 = (tau / 2.0) ** nu / math.gamma(nu + 1.0) * math.exp(-tau * R)
        else:
            val = r ** k
            der = k * r ** np.maximum(k - 1, 0) if k >= 1 else np.zeros_like(r)
            lim0 = 1.0 if k == 0 else 0.0
        if ev.sigma != 0.0 and np.any(r == 0.0):
            val = np.where(r == 0.0, lim0 if k == 0 else 0.0, val)
            der = np.where(r == 0.0, 0.0, der)
        return val, der

    return shape


def clamped_eigenfunction_from_pair(R: float, N: int, ev1: RobinEigenvalue,
                                    ev2: RobinEigenvalue):
    """Radial clamped-plate profile u = v1(R) v2 - v2(R) v1, max |u| = 1.

    The shared Robin condition makes u'(R) vanish along with u(R).
    """
    if ev1.k != ev2.k:
        raise DegeneratePairError("pair must share the spherical degree")
    if ev1.sigma == ev2.sigma:
        raise DegeneratePairError("pair must have distinct sigmas")
    v1 = robin_radial_profile(R, N, ev1)
    v2 = robin_radial_profile(R, N, ev2)
    v1R = float(v1(np.array([R]))[0][0])
    v2R = float(v2(np.array([R]))[0][0])

    def raw(r):
        return v1R * v2(r)[0] - v2R * v1(r)[0]

    grid = np.linspace(0.0, R, 1025)
    vals = raw(grid)
    idx = int(np.argmax(np.abs(vals)))
    peak = vals[idx]
    if peak == 0.0:  # pragma: no cover
        raise DegeneratePairError("pair produced the zero profile")

    def profile(r):
        r = np.asarray(r, dtype=float)
        out = raw(r) / peak
        return float(out) if r.ndim == 0 else out

    return profile


def dirichlet_limit_pair(R: float, N: int, k: int, t: int,
                         m: int = 1) -> tuple[float, float]:
    """(alpha, lambda) at the beta -> infinity endpoint of branch (k, t, m)."""
    nu = k + 0.5 * N - 1.0
    g1 = (specfun.bessel_zero(nu, m) / R) ** 2
    g2 = (specfun.bessel_zero(nu, m + t) / R) ** 2
    return pair_to_clamped(g1, g2)


def trace_branch(R: float, N: int, branch: BranchId,
                 beta_grid) -> list[tuple[float, float, float]]:
    """(beta, alpha, lambda) along the branch pairing the 1st and (1+t)-th
    Robin eigenvalues of degree k over an ascending beta grid.

    Raises a branch-jump error when consecutive lambda steps exceed 10x the
    local slope estimate, which indicates the grid is too coarse to certify
    continuity.
    """
    betas = [float(b) for b in beta_grid]
    if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise DomainError("beta_grid must be strictly ascending")
    out = []
    for b in betas:
        evs = robin_eigs_ball(R, N, branch.k, b, 1 + branch.t)
        alpha, lam = pair_to_clamped(evs[0].sigma, evs[branch.t].sigma)
        out.append((b, alpha, lam))
    slope = None
    for (b0, _, l0), (b1, _, l1) in zip(out, out[1:]):
        cur = abs(l1 - l0) / (b1 - b0)
        if slope is not None:
            allowed = 10.0 * max(slope, 1e-6 * (1.0 + abs(l0)))
            if cur > allowed:
                raise BranchJumpError(
                    f"lambda jump near beta = {b1:g}: slope {cur:g} exceeds "
                    f"10x the local estimate {slope:g}; refine the grid")
        slope = cur
    return out


def branch_asymptote(R: float, N: int, branch: BranchId):
    """Large-alpha expansion of branch (k, t) at its Dirichlet endpoints.

    alpha -> -alpha^2/4 + alpha t^2 pi^2/(2R^2)
                + t^2 pi^2 (4 nu^2 - 1 - t^2 pi^2)/(4 R^4).
    """
    t2p2 = (branch.t * math.pi) ** 2
    nu = branch.nu
    c1 = t2p2 / (2.0 * R * R)
    c2 = t2p2 * (4.0 * nu * nu - 1.0 - t2p2) / (4.0 * R ** 4)

    def value(alpha: float) -> float:
        return -0.25 * alpha * alpha + alpha * c1 + c2

    return value


def frank_asymptote_disk(R: float, k: int, alpha: float) -> float:
    """Tension expansion -alpha gamma_k + sqrt(-alpha) * 2 gamma_k / R.

    The boundary integral of |grad u_k|^2 for the L2-normalized disk
    eigenfunction collapses to 2 gamma_k / R for every index k (Rellich).
    """
    if alpha >= 0.0:
        raise DomainError("tension expansion needs alpha < 0")
    if k < 1:
        raise DomainError("k is a 1-based spectrum index")
    gamma = float(navier.dirichlet_disk_spectrum(R, k).gammas[k - 1])
    return -alpha * gamma + math.sqrt(-alpha) * 2.0 * gamma / R
