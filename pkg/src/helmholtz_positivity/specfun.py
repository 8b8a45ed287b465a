"""Bessel-family special functions and the planar outgoing fundamental solution.

Integer orders serve the planar pipelines; half-integer orders cover the
radial three-dimensional cross-checks. Function values come from
scipy.special; positive zeros are located here by a bracketing scan
refined with Brent's method and a Newton polish.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy import optimize, special

__all__ = [
    "bessel_j",
    "bessel_jp",
    "bessel_y",
    "bessel_yp",
    "hankel1",
    "bessel_zero",
    "fundamental_solution",
]

# Orders with 2*nu above this are outside the supported contract.
MAX_TWICE_ORDER = 120


def _as_order(order) -> float:
    """Validate an order: nonnegative multiple of 1/2, 2*nu <= 120."""
    nu = float(order)
    if not math.isfinite(nu) or nu < 0.0:
        raise ValueError(f"order must be finite and nonnegative, got {order!r}")
    twice = 2.0 * nu
    if abs(twice - round(twice)) > 1e-12:
        raise ValueError(f"order must be a multiple of 1/2, got {order!r}")
    if round(twice) > MAX_TWICE_ORDER:
        raise ValueError(f"order {order!r} exceeds the supported range (2*nu <= {MAX_TWICE_ORDER})")
    return nu


def _match(x, out):
    """Return a scalar when the input argument was scalar."""
    if np.ndim(x) == 0:
        return out[()] if isinstance(out, np.ndarray) else out
    return out


def bessel_j(order, x):
    """J_nu(x) for x >= 0."""
    nu = _as_order(order)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0):
        raise ValueError("bessel_j requires x >= 0")
    return _match(x, special.jv(nu, xa))


def bessel_jp(order, x):
    """First derivative J_nu'(x)."""
    nu = _as_order(order)
    return _match(x, special.jvp(nu, np.asarray(x, dtype=float)))


def bessel_y(order, x):
    """Y_nu(x) for x > 0 (logarithmic/power singularity at 0)."""
    nu = _as_order(order)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0.0):
        raise ValueError("bessel_y requires x > 0")
    return _match(x, special.yv(nu, xa))


def bessel_yp(order, x):
    """First derivative Y_nu'(x) for x > 0."""
    nu = _as_order(order)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0.0):
        raise ValueError("bessel_yp requires x > 0")
    return _match(x, special.yvp(nu, xa))


def hankel1(order, x):
    """H^(1)_nu(x) = J_nu(x) + i Y_nu(x) for x > 0."""
    nu = _as_order(order)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0.0):
        raise ValueError("hankel1 requires x > 0")
    return _match(x, special.hankel1(nu, xa))


@functools.lru_cache(maxsize=None)
def _zeros_cached(twice_nu: int, count: int) -> tuple:
    """First `count` positive zeros of J_nu, nu = twice_nu / 2.

    Scans rightward from x = max(nu, 0.5), where J_nu is strictly positive
    (the first zero exceeds the order), with step pi/4, well below the
    minimal zero spacing. Each bracket is resolved by Brent's method and
    polished with two Newton steps.
    """
    nu = twice_nu / 2.0
    f = lambda t: special.jv(nu, t)
    zeros = []
    x = max(nu, 0.5)
    fx = f(x)
    step = 0.25 * math.pi
    # Safety horizon: zeros of J_nu are spaced < pi beyond the first one.
    limit = max(nu, 0.5) + (count + 3) * math.pi + 2.0 * max(nu, 1.0) ** (1.0 / 3.0) + 10.0
    while len(zeros) < count:
        x2 = x + step
        if x2 > limit:
            raise RuntimeError(f"zero scan for nu={nu} exceeded horizon; wanted {count} zeros")
        f2 = f(x2)
        if f2 == 0.0:
            zeros.append(x2)
        elif fx * f2 < 0.0:
            root = optimize.brentq(f, x, x2, xtol=1e-14, rtol=8.9e-16)
            for _ in range(2):
                deriv = special.jvp(nu, root)
                if deriv != 0.0:
                    root -= special.jv(nu, root) / deriv
            zeros.append(root)
        x, fx = x2, f2
    return tuple(zeros)


def bessel_zero(order, m: int) -> float:
    """m-th positive zero j_{nu,m} of J_nu (m >= 1), strictly increasing in m."""
    nu = _as_order(order)
    m = int(m)
    if m < 1:
        raise ValueError("zero index m must be >= 1")
    return _zeros_cached(int(round(2.0 * nu)), m)[m - 1]


def fundamental_solution(k: float, x):
    """Outgoing planar fundamental solution (i/4) H^(1)_0(k |x|).

    `x` is a 2-vector or an (..., 2) array of nonzero points; the value
    depends on x only through |x| and solves the homogeneous Helmholtz
    equation away from the origin.
    """
    if not (k > 0.0):
        raise ValueError("wavenumber k must be positive")
    xa = np.asarray(x, dtype=float)
    if xa.shape[-1] != 2:
        raise ValueError("x must have a trailing dimension of 2")
    r = np.hypot(xa[..., 0], xa[..., 1])
    if np.any(r == 0.0):
        raise ValueError("fundamental_solution is singular at x = 0")
    out = 0.25j * special.hankel1(0, k * r)
    if xa.ndim == 1:
        return complex(out)
    return out
