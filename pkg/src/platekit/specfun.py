"""Bessel-family evaluation: J, I for integer and half-integer order, Y, K
for order 0 and 1, and zeros of J.

Everything here is self-contained (no special-function library underneath) so
the rest of the package has one auditable transcendental layer.  Evaluation
strategy per function:

  J_nu : ascending series for x <= max(9, nu); Hankel large-argument
         asymptotics where their optimal-truncation floor ~e^{-2x} is beyond
         double precision (x >= 25, small nu); Miller backward recurrence in
         between (normalized by the even-order sum for integer nu, by the
         closed-form J_{1/2}, J_{3/2} for half-integer).
  Y_n  : log-series for x < 13, Hankel asymptotics beyond (n in {0, 1}).
  I_nu : ascending series (all terms positive, no cancellation) up to the
         overflow edge; exponential asymptotics for large x.  A scaled
         variant e^{-x} I_nu(x) avoids overflow.
  K_n  : log-series for x <= 5; trapezoid rule on the cosh integral
         representation for 5 < x < 12.5 (neither the series nor the
         asymptotics holds 1e-10 there); exponential asymptotics beyond.
         Scaled variant e^{x} K_n(x).

All evaluators accept scalars or numpy arrays in x and vectorize
elementwise; the order is a scalar per call.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, SolverError, UnsupportedOrderError

EULER_GAMMA = 0.5772156649015328606065

_SERIES_EPS = 1e-17


def _check_order(nu, max_nu=100.0):
    nu = float(nu)
    if not (0.0 <= nu <= max_nu) or abs(2.0 * nu - round(2.0 * nu)) > 1e-12:
        raise UnsupportedOrderError(
            f"order must be a half-integer in [0, {max_nu:g}], got {nu!r}")
    return round(2.0 * nu) / 2.0


def _prep(x, positive=False):
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(~np.isfinite(arr)):
        raise DomainError("argument must be finite")
    if positive:
        if np.any(arr <= 0.0):
            raise DomainError("argument must be positive")
    elif np.any(arr < 0.0):
        raise DomainError("argument must be non-negative")
    return arr, scalar


def _ret(values, scalar):
    return float(values[0]) if scalar else values


# ---------------------------------------------------------------------------
# ascending series

def _lead_term(nu, x):
    """(x/2)^nu / Gamma(nu+1), safe against overflow of the power alone."""
    if nu == 0.0:
        return np.ones_like(x)
    out = np.zeros_like(x)
    pos = x > 0.0
    out[pos] = np.exp(nu * np.log(0.5 * x[pos]) - math.lgamma(nu + 1.0))
    return out


def _j_series(nu, x):
    term = _lead_term(nu, x)
    acc = term.copy()
    peak = np.abs(term)
    q = 0.25 * x * x
    for m in range(1, 700):
        term = -term * q / (m * (m + nu))
        acc += term
        np.maximum(peak, np.abs(term), out=peak)
        if np.all(np.abs(term) <= _SERIES_EPS * (peak + 1e-300)):
            return acc
    raise SolverError("J series did not converge")  # pragma: no cover


def _i_series(nu, x):
    term = _lead_term(nu, x)
    acc = term.copy()
    q = 0.25 * x * x
    for m in range(1, 1200):
        term = term * q / (m * (m + nu))
        acc += term
        if np.all(term <= _SERIES_EPS * (acc + 1e-300)):
            return acc
    raise SolverError("I series did not converge")  # pragma: no cover


# ---------------------------------------------------------------------------
# Hankel-type asymptotics

def _pq(nu, x):
    """P, Q factors of the large-argument expansion, optimally truncated."""
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    inv8x = 0.125 / x
    for k in range(0, 34):
        term = term * (mu - (2 * k + 1) ** 2) * inv8x / (k + 1.0)
        if k % 4 == 0:
            q += term
        elif k % 4 == 1:
            p -= term
        elif k % 4 == 2:
            q -= term
        else:
            p += term
        if np.all(np.abs(term) < 1e-18):
            break
    return p, q


def _hankel_jy(nu, x):
    p, q = _pq(nu, x)
    omega = x - (0.5 * nu + 0.25) * math.pi
    amp = np.sqrt(2.0 / (math.pi * x))
    c, s = np.cos(omega), np.sin(omega)
    return amp * (c * p - s * q), amp * (s * p + c * q)


def _i_asymptotic(nu, x):
    """e^{-x} I_nu(x) for x >= 30 with 8x comfortably above 4 nu^2."""
    mu = 4.0 * nu * nu
    acc = np.ones_like(x)
    term = np.ones_like(x)
    inv8x = 0.125 / x
    for k in range(0, 40):
        term = -term * (mu - (2 * k + 1) ** 2) * inv8x / (k + 1.0)
        acc += term
        if np.all(np.abs(term) < 1e-18):
            break
    return acc / np.sqrt(2.0 * math.pi * x)


def _k_asymptotic_scaled(nu, x):
    """e^{x} K_nu(x) for x >= 12.5, truncated at the minimal term."""
    mu = 4.0 * nu * nu
    acc = np.ones_like(x)
    term = np.ones_like(x)
    inv8x = 0.125 / x
    prev = np.inf
    for k in range(0, 40):
        term = term * (mu - (2 * k + 1) ** 2) * inv8x / (k + 1.0)
        mag = float(np.max(np.abs(term)))
        if mag >= prev:  # divergent tail reached
            break
        acc += term
        prev = mag
        if mag < 1e-18:
            break
    return np.sqrt(0.5 * math.pi / x) * acc


# ---------------------------------------------------------------------------
# Miller backward recurrence for mid-range J

def _miller_j_chunk(nu, x):
    """J_nu over a chunk with bounded max/min ratio of x, all x > 9."""
    frac = nu - math.floor(nu)
    n = int(round(nu - frac))
    xm = float(np.max(x))
    delta = (43.0 * math.sqrt(xm)) ** (2.0 / 3.0) + 12.0
    m_start = max(int(xm + delta), n + 12)
    if frac == 0.0 and m_start % 2 == 1:
        m_start += 1

    above = np.zeros_like(x)
    cur = np.full_like(x, 1e-250)
    target = np.zeros_like(x)
    even_sum = np.zeros_like(x)
    low0 = np.zeros_like(x)
    low1 = np.zeros_like(x)
    if n == m_start:  # pragma: no cover - m_start always exceeds n
        target = cur.copy()
    inv_x = 1.0 / x
    for k in range(m_start, 0, -1):
        below = (2.0 * (k + frac)) * inv_x * cur - above
        above = cur
        cur = below
        k1 = k - 1
        if k1 == n:
            target = cur.copy()
        if frac == 0.0:
            if k1 >= 2 and k1 % 2 == 0:
                even_sum += cur
        else:
            if k1 == 0:
                low0 = cur
            elif k1 == 1:
                low1 = cur
    if frac == 0.0:
        scale = cur + 2.0 * even_sum  # cur is the order-0 value
        return target / scale
    amp = np.sqrt(2.0 / (math.pi * x))
    sx, cx = np.sin(x), np.cos(x)
    j_half = amp * sx
    j_3half = amp * (sx / x - cx)
    use0 = np.abs(j_half) >= np.abs(j_3half)
    scale = np.where(use0, j_half / low0, j_3half / low1)
    return target * scale


def _miller_j(nu, x):
    out = np.empty_like(x)
    order = np.argsort(x)
    xs = x[order]
    start = 0
    while start < xs.size:
        lo = xs[start]
        stop = int(np.searchsorted(xs, lo * 1.3, side="right"))
        stop = max(stop, start + 1)
        idx = order[start:stop]
        out[idx] = _miller_j_chunk(nu, x[idx])
        start = stop
    return out


# ---------------------------------------------------------------------------
# public evaluators

def bessel_j(nu, x):
    """J_nu(x) for half-integer nu in [0, 100], x >= 0."""
    nu = _check_order(nu)
    arr, scalar = _prep(x)
    out = np.empty_like(arr)

    zero = arr == 0.0
    if np.any(zero):
        out[zero] = 1.0 if nu == 0.0 else 0.0

    # series only while its terms decay from the start (x^2/4 <= nu+1):
    # further out the alternating sum cancels catastrophically at large nu
    series_cut = max(9.0, 2.0 * math.sqrt(nu + 1.0))
    ser = (~zero) & (arr <= series_cut)
    if np.any(ser):
        out[ser] = _j_series(nu, arr[ser])

    rest = (~zero) & (~ser)
    if np.any(rest):
        xr = arr[rest]
        # Hankel floor ~e^{-2x}; require decaying terms from the start
        asym = (xr >= 25.0) & (8.0 * xr >= 5.0 * max(1.0, 4.0 * nu * nu))
        vals = np.empty_like(xr)
        if np.any(asym):
            vals[asym] = _hankel_jy(nu, xr[asym])[0]
        if np.any(~asym):
            vals[~asym] = _miller_j(nu, xr[~asym])
        out[rest] = vals
    return _ret(out, scalar)


def _y_series(n, x):
    j = bessel_j(n, x)
    c = np.log(0.5 * x) + EULER_GAMMA
    q = 0.25 * x * x
    if n == 0:
        acc = np.zeros_like(x)
        t = np.ones_like(x)
        h = 0.0
        for m in range(1, 80):
            t = t * q / (m * m)
            h += 1.0 / m
            term = (-1.0) ** (m + 1) * h * t
            acc += term
            if np.all(np.abs(term) <= _SERIES_EPS * np.max(np.abs(acc) + 1e-300)):
                break
        return (2.0 / math.pi) * (c * j + acc)
    acc = np.ones_like(x)  # m = 0 term: (H_0 + H_1) t_0 = 1
    t = np.ones_like(x)
    h0, h1 = 0.0, 1.0
    for m in range(1, 80):
        t = t * q / (m * (m + 1))
        h0 += 1.0 / m
        h1 += 1.0 / (m + 1)
        term = (-1.0) ** m * (h0 + h1) * t
        acc += term
        if np.all(np.abs(term) <= _SERIES_EPS * np.max(np.abs(acc) + 1e-300)):
            break
    return (2.0 / math.pi) * (c * j - 1.0 / x) - (0.5 / math.pi) * x * acc


def bessel_y(nu, x):
    """Y_nu(x) for nu in {0, 1}, x > 0."""
    nu = _check_order(nu)
    if nu not in (0.0, 1.0):
        raise UnsupportedOrderError("Y is implemented for orders 0 and 1 only")
    arr, scalar = _prep(x, positive=True)
    out = np.empty_like(arr)
    ser = arr < 13.0
    if np.any(ser):
        out[ser] = _y_series(int(nu), arr[ser])
    if np.any(~ser):
        out[~ser] = _hankel_jy(nu, arr[~ser])[1]
    return _ret(out, scalar)


def bessel_i(nu, x, scaled=False):
    """I_nu(x), or e^{-x} I_nu(x) when scaled.

    Unscaled overflows past x ~ 705 and raises; the scaled form is good to
    x = 1e6 and beyond.
    """
    nu = _check_order(nu)
    arr, scalar = _prep(x)
    if not scaled and np.any(arr > 705.0):
        raise DomainError("I overflows for x > 705; use scaled=True")
    out = np.empty_like(arr)
    asym = (arr >= 30.0) & (8.0 * arr >= 5.0 * max(1.0, 4.0 * nu * nu))
    if np.any(~asym):
        xs = arr[~asym]
        if scaled and np.any(xs > 705.0):
            raise DomainError(
                "scaled I for x > 705 needs 8x >= 5*(4 nu^2); order too large")
        v = _i_series(nu, xs)
        out[~asym] = v * np.exp(-xs) if scaled else v
    if np.any(asym):
        xa = arr[asym]
        v = _i_asymptotic(nu, xa)
        out[asym] = v if scaled else v * np.exp(xa)
    return _ret(out, scalar)


def _k_series(n, x):
    q = 0.25 * x * x
    c = np.log(0.5 * x) + EULER_GAMMA
    if n == 0:
        i0 = _i_series(0.0, x)
        acc = np.zeros_like(x)
        t = np.ones_like(x)
        h = 0.0
        for m in range(1, 80):
            t = t * q / (m * m)
            h += 1.0 / m
            acc += h * t
            if np.all(h * t <= _SERIES_EPS * (acc + 1e-300)):
                break
        return -c * i0 + acc
    i1 = _i_series(1.0, x)
    acc = np.ones_like(x)
    t = np.ones_like(x)
    h0, h1 = 0.0, 1.0
    for m in range(1, 80):
        t = t * q / (m * (m + 1))
        h0 += 1.0 / m
        h1 += 1.0 / (m + 1)
        term = (h0 + h1) * t
        acc += term
        if np.all(term <= _SERIES_EPS * (acc + 1e-300)):
            break
    return 1.0 / x + c * i1 - 0.25 * x * acc


_K_QUAD_H = 0.15
_K_QUAD_NODES = np.arange(0, 26) * _K_QUAD_H
_K_QUAD_COSH = np.cosh(_K_QUAD_NODES)
_K_QUAD_W = np.full(26, _K_QUAD_H)
_K_QUAD_W[0] = 0.5 * _K_QUAD_H


def _k_quadrature(n, x, scaled):
    """Trapezoid rule on K_n(x) = int_0^inf e^{-x cosh t} cosh(n t) dt.

    The integrand decays doubly exponentially and extends to an even entire
    function, so the trapezoid rule converges geometrically; h = 0.15 on
    [0, 3.75] is beyond double precision for x >= 5.
    """
    shift = 1.0 if scaled else 0.0
    vals = np.exp(-np.outer(x, _K_QUAD_COSH - shift))
    if n == 1:
        vals = vals * _K_QUAD_COSH
    return vals @ _K_QUAD_W


def bessel_k(nu, x, scaled=False):
    """K_nu(x) for nu in {0, 1}, x > 0, or e^{x} K_nu(x) when scaled."""
    nu = _check_order(nu)
    if nu not in (0.0, 1.0):
        raise UnsupportedOrderError("K is implemented for orders 0 and 1 only")
    n = int(nu)
    arr, scalar = _prep(x, positive=True)
    out = np.empty_like(arr)
    ser = arr <= 5.0
    mid = (arr > 5.0) & (arr < 12.5)
    big = arr >= 12.5
    if np.any(ser):
        v = _k_series(n, arr[ser])
        out[ser] = v * np.exp(arr[ser]) if scaled else v
    if np.any(mid):
        out[mid] = _k_quadrature(n, arr[mid], scaled)
    if np.any(big):
        v = _k_asymptotic_scaled(nu, arr[big])
        out[big] = v if scaled else v * np.exp(-arr[big])
    return _ret(out, scalar)


# ---------------------------------------------------------------------------
# zeros of J

def bessel_zero_asymptotic(nu, m):
    """McMahon two-term estimate of the m-th positive zero of J_nu."""
    nu = _check_order(nu)
    m = int(m)
    if m < 1:
        raise DomainError("zero index starts at 1")
    b = (m + 0.5 * nu - 0.25) * math.pi
    return b - (4.0 * nu * nu - 1.0) / (8.0 * b)


_zero_cache: dict[float, list[float]] = {}


def _j_scalar(nu, x):
    return bessel_j(nu, float(x))


def _jprime(nu, x):
    return nu / x * _j_scalar(nu, x) - _j_scalar(nu + 1.0, x)


def _refine_zero(nu, lo, hi):
    flo = _j_scalar(nu, lo)
    fhi = _j_scalar(nu, hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise SolverError("zero bracket lost")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = _j_scalar(nu, mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
        if hi - lo <= 1e-3 * hi:
            break
    root = 0.5 * (lo + hi)
    for _ in range(8):  # Newton from a short bracket, kept inside it
        step = _j_scalar(nu, root) / _jprime(nu, root)
        cand = root - step
        if not lo < cand < hi:
            break
        root = cand
        if abs(step) <= 1e-14 * root:
            break
    return root


def zeros_below(order_base, z_max, order_limit=99.0):
    """All (k, m, j_{order_base+k,m}) with the zero <= z_max, k = 0, 1, ...

    Uses j_{nu,1} > nu to stop the order loop without extra evaluations;
    raises if z_max would require orders beyond the supported range.
    """
    out = []
    k = 0
    while True:
        order = order_base + k
        if order > z_max:  # j_{order,1} > order: no zeros left at any order
            return out
        if order > order_limit:
            raise UnsupportedOrderError(
                f"zero family up to {z_max:g} needs orders beyond {order_limit:g}")
        if bessel_zero(order, 1) > z_max:
            return out
        m = 1
        while True:
            z = bessel_zero(order, m)
            if z > z_max:
                break
            out.append((k, m, z))
            m += 1
        k += 1


def bessel_zero(nu, m):
    """m-th positive zero of J_nu to ~1e-12 absolute accuracy."""
    nu = _check_order(nu)
    m = int(m)
    if m < 1:
        raise DomainError("zero index starts at 1")
    zeros = _zero_cache.setdefault(nu, [])
    while len(zeros) < m:
        k = len(zeros) + 1
        if k == 1:
            # J_nu > 0 on (0, j_{nu,1}); walk out from the order line
            step = max(0.8, 0.7 * nu ** (1.0 / 3.0))
            lo = max(nu, 1e-3)
        else:
            step = 0.25 * math.pi  # below the minimal spacing of the zeros
            lo = zeros[-1] + 1e-9 + 0.05 * step
        flo = _j_scalar(nu, lo)
        hint = bessel_zero_asymptotic(nu, k)
        if k > 1 and hint - 2.0 > lo and _j_scalar(nu, hint - 2.0) * flo > 0.0:
            lo, flo = hint - 2.0, _j_scalar(nu, hint - 2.0)
        found = False
        for _ in range(4000):
            hi = lo + step
            fhi = _j_scalar(nu, hi)
            if flo * fhi <= 0.0:
                zeros.append(_refine_zero(nu, lo, hi))
                found = True
                break
            lo, flo = hi, fhi
        if not found:  # pragma: no cover
            raise SolverError(f"could not bracket zero {k} of J_{nu}")
    return zeros[m - 1]
