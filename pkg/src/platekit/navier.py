"""Navier companion spectra built on Dirichlet-Laplacian eigenvalues.

With hinged (Navier) conditions the plate spectrum is the image of the
Dirichlet-Laplacian spectrum {gamma_k} under p(g) = g^2 - alpha*g, so all
operations here are combinatorics on a gamma list: minima of the parabola
family, the polygonal first-eigenvalue curve in alpha, and Weyl-law gap
diagnostics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import DomainError, InsufficientSpectrumError


@dataclass(frozen=True)
class DirichletSpectrum:
    """Ascending Dirichlet-Laplacian eigenvalues with provenance labels."""
    gammas: np.ndarray
    domain_label: str
    area: float
    N: int

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise DomainError("gammas must be a nonempty 1-d array")
        if not (np.all(g > 0.0) and np.all(np.diff(g) >= 0.0)):
            raise DomainError("gammas must be positive and non-decreasing")
        object.__setattr__(self, "gammas", g)

    @property
    def gamma_max(self) -> float:
        return float(self.gammas[-1])


def dirichlet_disk_spectrum(R: float, count: int) -> DirichletSpectrum:
    """The count smallest disk eigenvalues j_{k,m}^2/R^2, degree k>=1 doubled."""
    if not 1 <= count <= 500:
        raise DomainError("count must be in [1, 500]")
    if R <= 0.0:
        raise DomainError("radius must be positive")
    z2 = 5.2 * count + 60.0  # Weyl overshoot of the count-th zero squared
    for _ in range(8):
        vals: list[float] = []
        for k, _m, z in specfun.zeros_below(0.0, math.sqrt(z2)):
            g = (z / R) ** 2
            vals.append(g)
            if k >= 1:
                vals.append(g)  # sin and cos angular factors
        if len(vals) >= count:
            break
        z2 *= 1.4
    vals.sort()
    return DirichletSpectrum(np.array(vals[:count]), f"disk R={R:g}",
                             np.pi * R * R, 2)


def _check_complete(spec: DirichletSpectrum, alpha: float, needed_max: float):
    gmax = spec.gamma_max
    if gmax < alpha or gmax * gmax - alpha * gmax <= needed_max:
        raise InsufficientSpectrumError(
            "supplied Dirichlet spectrum too short: values beyond its top "
            f"gamma {gmax:g} could still fall below {needed_max:g}")


def navier_spectrum(spec: DirichletSpectrum, alpha: float, count: int) -> list[float]:
    """The count smallest values of gamma^2 - alpha*gamma, completeness-guarded."""
    if count < 1 or count > spec.gammas.size:
        raise DomainError("count must be in [1, len(gammas)]")
    p = spec.gammas * (spec.gammas - alpha)
    out = np.sort(p)[:count]
    _check_complete(spec, alpha, float(out[-1]))
    return [float(v) for v in out]


def navier_lambda1_curve(spec: DirichletSpectrum, alpha_range: tuple[float, float],
                         samples: int) -> list[tuple[float, float, int]]:
    """(alpha, lambda_1, active_k) samples of the polygonal first-eigenvalue curve.

    active_k is the 1-based index of the gamma attaining the minimum (first
    of a tied multiplicity group).  Between breakpoints alpha = gamma_k +
    gamma_{k+1} the curve is exactly linear in alpha.
    """
    lo, hi = float(alpha_range[0]), float(alpha_range[1])
    if not (hi >= lo and samples >= 2):
        raise DomainError("need hi >= lo and samples >= 2")
    alphas = np.linspace(lo, hi, samples)
    g = spec.gammas
    out = []
    for a in alphas:
        p = g * (g - a)
        i = int(np.argmin(p))
        _check_complete(spec, a, float(p[i]))
        out.append((float(a), float(p[i]), i + 1))
    return out


def weyl_gap_ratio(spec: DirichletSpectrum, k: int) -> float:
    """(gamma_{k+1} - gamma_k)^2 / (gamma_{k+1} + gamma_k), 1-based k."""
    if not 1 <= k < spec.gammas.size:
        raise DomainError("k+1 must lie within the spectrum")
    a, b = float(spec.gammas[k - 1]), float(spec.gammas[k])
    return (b - a) ** 2 / (b + a)
