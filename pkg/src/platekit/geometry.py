"""Fourier-parameterized planar shapes and polygon quadrature.

A shape is a closed curve t in [0, 2pi) -> (gamma1(t), gamma2(t)) given by
truncated Fourier sums.  This module owns the boundary frame (tangent,
outward normal, speed), exact area/centroid via trapezoid rules (exact for
trigonometric polynomials), unit-area rescaling, simplicity and membership
tests, ear-clipping triangulation with a degree-4 rule for interior
integrals, and the plain-text shape file format.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateShapeError, DomainError, OrientationError,
                     SelfIntersectionError)


@dataclass(frozen=True)
class FourierShape:
    """Closed curve with coordinates a0 + sum_j a_j cos(jt) + b_j sin(jt)."""
    P: int
    a1: np.ndarray  # length P+1, cosine coefficients of gamma1 (j = 0..P)
    b1: np.ndarray  # length P, sine coefficients of gamma1 (j = 1..P)
    a2: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        if not 1 <= self.P <= 64:
            raise DomainError("truncation order P must be in [1, 64]")
        for name, want in (("a1", self.P + 1), ("b1", self.P),
                           ("a2", self.P + 1), ("b2", self.P)):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (want,):
                raise DomainError(f"{name} must have length {want}")
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"{name} has non-finite entries")
            object.__setattr__(self, name, arr)
        sp = boundary(self, np.linspace(0.0, 2.0 * np.pi, 4096,
                                        endpoint=False), _check=False)[3]
        if np.min(sp) <= 1e-8:
            raise DegenerateShapeError(
                "parameterization speed vanishes on the boundary")

    def coeffs(self) -> np.ndarray:
        """Flat coefficient vector [a1, b1, a2, b2] (optimizer layout)."""
        return np.concatenate([self.a1, self.b1, self.a2, self.b2])

    @staticmethod
    def from_coeffs(P: int, c: np.ndarray) -> "FourierShape":
        c = np.asarray(c, dtype=float)
        n = P + 1
        return FourierShape(P, c[:n], c[n:n + P],
                            c[n + P:2 * n + P], c[2 * n + P:])

    @staticmethod
    def circle(R: float, center=(0.0, 0.0), P: int = 1) -> "FourierShape":
        a1 = np.zeros(P + 1)
        b1 = np.zeros(P)
        a2 = np.zeros(P + 1)
        b2 = np.zeros(P)
        a1[0], a2[0] = center
        a1[1] = R
        b2[0] = R
        return FourierShape(P, a1, b1, a2, b2)

    @staticmethod
    def ellipse(ax_a: float, ax_b: float, P: int = 1) -> "FourierShape":
        a1 = np.zeros(P + 1)
        b1 = np.zeros(P)
        a2 = np.zeros(P + 1)
        b2 = np.zeros(P)
        a1[1] = ax_a
        b2[0] = ax_b
        return FourierShape(P, a1, b1, a2, b2)

    @staticmethod
    def from_samples(x: np.ndarray, y: np.ndarray, P: int) -> "FourierShape":
        """Least-squares-free exact fit when samples are band-limited."""
        n = len(x)
        if len(y) != n or n < 2 * P + 2:
            raise DomainError("need >= 2P+2 uniformly spaced samples")
        fx = np.fft.rfft(np.asarray(x, dtype=float)) / n
        fy = np.fft.rfft(np.asarray(y, dtype=float)) / n
        a1 = np.zeros(P + 1)
        b1 = np.zeros(P)
        a2 = np.zeros(P + 1)
        b2 = np.zeros(P)
        a1[0], a2[0] = fx[0].real, fy[0].real
        for j in range(1, P + 1):
            a1[j], b1[j - 1] = 2.0 * fx[j].real, -2.0 * fx[j].imag
            a2[j], b2[j - 1] = 2.0 * fy[j].real, -2.0 * fy[j].imag
        return FourierShape(P, a1, b1, a2, b2)


def perturbed_circle(R: float, mode: int, amp: float,
                     P: int) -> FourierShape:
    """Radial perturbation r(t) = R (1 + amp cos(mode t)), exact for
    mode + 1 <= P."""
    if mode + 1 > P:
        raise DomainError("perturbation mode exceeds the truncation order")
    n = 4 * P + 4
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    r = R * (1.0 + amp * np.cos(mode * t))
    return FourierShape.from_samples(r * np.cos(t), r * np.sin(t), P)


def _series(t: np.ndarray, a: np.ndarray, b: np.ndarray, deriv: int):
    j = np.arange(1, len(a))
    jt = np.outer(t, j)
    cos, sin = np.cos(jt), np.sin(jt)
    if deriv == 0:
        return a[0] + cos @ a[1:] + sin @ b
    if deriv == 1:
        return -sin @ (j * a[1:]) + cos @ (j * b)
    return -cos @ (j * j * a[1:]) - sin @ (j * j * b)


def boundary(shape: FourierShape, t, _check: bool = True):
    """(point, unit tangent, outward unit normal, speed) at parameter t.

    Outward orientation assumes the curve is positively oriented
    (counterclockwise); then the normal is the clockwise-rotated tangent.
    """
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    x = _series(arr, shape.a1, shape.b1, 0)
    y = _series(arr, shape.a2, shape.b2, 0)
    dx = _series(arr, shape.a1, shape.b1, 1)
    dy = _series(arr, shape.a2, shape.b2, 1)
    speed = np.hypot(dx, dy)
    if _check and np.any(speed <= 1e-8):
        raise DegenerateShapeError("parameterization speed vanishes")
    safe = np.where(speed > 0.0, speed, 1.0)  # unchecked callers see NaN-free frames
    tx, ty = dx / safe, dy / safe
    point = np.stack([x, y], axis=-1)
    tangent = np.stack([tx, ty], axis=-1)
    normal = np.stack([ty, -tx], axis=-1)
    if np.asarray(t).ndim == 0:
        return point[0], tangent[0], normal[0], float(speed[0])
    return point, tangent, normal, speed


def _quad_t(shape: FourierShape, n: int | None = None) -> np.ndarray:
    n = n if n is not None else 4 * shape.P + 4
    return np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)


def signed_area(shape: FourierShape) -> float:
    """Exact ∮ gamma1 gamma2' dt by the periodic trapezoid rule."""
    t = _quad_t(shape)
    x = _series(t, shape.a1, shape.b1, 0)
    dy = _series(t, shape.a2, shape.b2, 1)
    return float(np.mean(x * dy) * 2.0 * np.pi)


def area(shape: FourierShape) -> float:
    a = signed_area(shape)
    if a <= 0.0:
        raise OrientationError(
            "nonpositive signed area: reverse the curve orientation")
    return a


def centroid(shape: FourierShape) -> np.ndarray:
    a = area(shape)
    t = _quad_t(shape, 8 * shape.P + 8)  # exact for the degree-3P integrand
    x = _series(t, shape.a1, shape.b1, 0)
    y = _series(t, shape.a2, shape.b2, 0)
    dx = _series(t, shape.a1, shape.b1, 1)
    dy = _series(t, shape.a2, shape.b2, 1)
    cx = np.mean(0.5 * x * x * dy) * 2.0 * np.pi / a
    cy = np.mean(-0.5 * y * y * dx) * 2.0 * np.pi / a
    return np.array([cx, cy])


def rescale_to_unit_area(shape: FourierShape) -> FourierShape:
    """Scale about the centroid so the enclosed area becomes exactly 1."""
    s = 1.0 / math.sqrt(area(shape))
    c = centroid(shape)
    a1 = shape.a1 * s
    a2 = shape.a2 * s
    a1[0] = c[0] + (shape.a1[0] - c[0]) * s
    a2[0] = c[1] + (shape.a2[0] - c[1]) * s
    return FourierShape(shape.P, a1, shape.b1 * s, a2, shape.b2 * s)


def translate(shape: FourierShape, vec) -> FourierShape:
    a1 = shape.a1.copy()
    a2 = shape.a2.copy()
    a1[0] += vec[0]
    a2[0] += vec[1]
    return FourierShape(shape.P, a1, shape.b1, a2, shape.b2)


def rotate(shape: FourierShape, angle: float) -> FourierShape:
    """Rigid rotation about the origin (coefficients rotate pairwise)."""
    c, s = math.cos(angle), math.sin(angle)
    return FourierShape(shape.P,
                        c * shape.a1 - s * shape.a2,
                        c * shape.b1 - s * shape.b2,
                        s * shape.a1 + c * shape.a2,
                        s * shape.b1 + c * shape.b2)


def polygon(shape: FourierShape, n: int) -> np.ndarray:
    """n boundary samples at uniform parameter values, as an (n, 2) array."""
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return boundary(shape, t)[0]


def is_simple(shape: FourierShape, n: int = 512) -> bool:
    """Segment-crossing test on an n-gon sample of the boundary."""
    pts = polygon(shape, n)
    a = pts
    b = np.roll(pts, -1, axis=0)
    d = b - a
    # proper intersection of segments i and j via orientation signs
    ij = np.triu_indices(n, k=2)
    i, j = ij
    keep = ~((i == 0) & (j == n - 1))  # wrap-around adjacency
    i, j = i[keep], j[keep]

    def cross(o, p, q):
        return (p[:, 0] - o[:, 0]) * (q[:, 1] - o[:, 1]) - \
               (p[:, 1] - o[:, 1]) * (q[:, 0] - o[:, 0])

    d1 = cross(a[i], b[i], a[j])
    d2 = cross(a[i], b[i], b[j])
    d3 = cross(a[j], b[j], a[i])
    d4 = cross(a[j], b[j], b[i])
    hit = (d1 * d2 < 0.0) & (d3 * d4 < 0.0)
    return not bool(np.any(hit))


def point_in_shape(shape: FourierShape, pts, n: int = 1024) -> np.ndarray:
    """Even-odd membership of query points against an n-gon sample."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    poly = polygon(shape, n)
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    straddle = (y0 > py) != (y1 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
    crossings = np.sum(straddle & (px < xs), axis=1)
    return (crossings % 2) == 1


def _cross2(u, v):
    """z-component of the cross product of planar vectors."""
    u = np.asarray(u)
    v = np.asarray(v)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _ear_clip(pts: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangulate a simple positively oriented polygon by ear clipping."""
    n = len(pts)
    idx = list(range(n))
    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 4 * n * n:  # pragma: no cover
            raise DegenerateShapeError("ear clipping failed to make progress")
        m = len(idx)
        clipped = False
        for at in range(m):
            i0, i1, i2 = idx[at - 1], idx[at], idx[(at + 1) % m]
            p0, p1, p2 = pts[i0], pts[i1], pts[i2]
            if _cross2(p1 - p0, p2 - p1) <= 0.0:
                continue  # reflex corner, not an ear
            others = [k for k in idx if k not in (i0, i1, i2)]
            q = pts[others]
            s1 = _cross2(p1 - p0, q - p0)
            s2 = _cross2(p2 - p1, q - p1)
            s3 = _cross2(p0 - p2, q - p2)
            if np.any((s1 > 0) & (s2 > 0) & (s3 > 0)):
                continue  # another vertex inside the candidate ear
            tris.append((i0, i1, i2))
            idx.pop(at)
            clipped = True
            break
        if not clipped:  # pragma: no cover
            raise DegenerateShapeError("no ear found: polygon not simple?")
    tris.append(tuple(idx))
    return tris


# degree-4 6-point triangle rule (barycentric points, weights sum to 1)
_T4_W = np.array([0.223381589678011] * 3 + [0.109951743655322] * 3)
_T4_B = np.array([
    [0.108103018168070, 0.445948490915965, 0.445948490915965],
    [0.445948490915965, 0.108103018168070, 0.445948490915965],
    [0.445948490915965, 0.445948490915965, 0.108103018168070],
    [0.816847572980459, 0.091576213509771, 0.091576213509771],
    [0.091576213509771, 0.816847572980459, 0.091576213509771],
    [0.091576213509771, 0.091576213509771, 0.816847572980459],
])


def interior_quadrature(shape: FourierShape, n_boundary: int | None = None,
                        refine: int = 1):
    """(points, weights) integrating over the shape's interior polygon.

    Ear-clip the n_boundary-gon, fan every ear from its centroid, midpoint-
    subdivide `refine` times, then apply a degree-4 rule per triangle.
    """
    n_boundary = n_boundary if n_boundary is not None else 8 * shape.P + 16
    pts = polygon(shape, n_boundary)
    tris = []
    for i0, i1, i2 in _ear_clip(pts):
        p0, p1, p2 = pts[i0], pts[i1], pts[i2]
        c = (p0 + p1 + p2) / 3.0
        tris.extend([(p0, p1, c), (p1, p2, c), (p2, p0, c)])
    for _ in range(refine):
        finer = []
        for p0, p1, p2 in tris:
            m01, m12, m20 = (p0 + p1) / 2, (p1 + p2) / 2, (p2 + p0) / 2
            finer.extend([(p0, m01, m20), (m01, p1, m12),
                          (m20, m12, p2), (m01, m12, m20)])
        tris = finer
    corners = np.array(tris)  # (T, 3, 2)
    nodes = np.einsum("qb,tbx->tqx", _T4_B, corners).reshape(-1, 2)
    areas = 0.5 * np.abs(_cross2(corners[:, 1] - corners[:, 0],
                                 corners[:, 2] - corners[:, 0]))
    weights = (areas[:, None] * _T4_W[None, :]).reshape(-1)
    return nodes, weights


def save_shape(shape: FourierShape, path: str):
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(f"P {shape.P}\n")
        for name in ("a1", "b1", "a2", "b2"):
            # 17 significant digits: exact float64 round-trip
            vals = " ".join(f"{v:.17g}" for v in getattr(shape, name))
            f.write(f"{name} {vals}\n")


def load_shape(path: str) -> FourierShape:
    fields: dict[str, np.ndarray] = {}
    P = None
    with open(path, "r", encoding="ascii") as f:
        for line in f:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "P":
                P = int(parts[1])
            elif parts[0] in ("a1", "b1", "a2", "b2"):
                fields[parts[0]] = np.array([float(v) for v in parts[1:]])
            else:
                raise DomainError(f"unknown shape-file key {parts[0]!r}")
    if P is None or set(fields) != {"a1", "b1", "a2", "b2"}:
        raise DomainError("shape file must provide P, a1, b1, a2, b2")
    return FourierShape(P, fields["a1"], fields["b1"],
                        fields["a2"], fields["b2"])
