"""Quadrature over disk-shaped supports cut by rays through the origin.

A self-similar density g(x/t) is constant along every ray from the origin, so
integrals over {disk} ∩ {wedge} are taken in polar coordinates centred at the
origin: the radial integral of the (entire) test-function integrand is done by
fixed Gauss-Legendre along the chord, and the angular integral adaptively.
When the origin lies outside the disk the angle is reparametrised as
alpha = alpha_c + asin(k sin psi), k = r/|c|, which turns the square-root
behaviour of the chord endpoints at tangency into an analytic function of psi.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .gas_state import NumericalError

HALF_PI = 0.5 * math.pi


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def adaptive_gauss(f, a: float, b: float, tol: float = 1e-10, order: int = 16, max_intervals: int = 4000):
    """Integrate a vectorised ``f`` over [a, b].

    Each interval is estimated with ``order`` and ``2*order`` Gauss points and
    bisected until the difference falls below its share of ``tol``.
    Returns ``(value, error_estimate)``.
    """
    if not b > a:
        return 0.0, 0.0
    xs, ws = gauss_legendre(order)
    xl, wl = gauss_legendre(2 * order)
    total_len = b - a
    todo = [(a, b)]
    value = 0.0
    err_total = 0.0
    n_done = 0
    while todo:
        lo, hi = todo.pop()
        half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
        nodes = np.concatenate([mid + half * xs, mid + half * xl])
        vals = f(nodes)
        coarse = half * np.dot(ws, vals[: order])
        fine = half * np.dot(wl, vals[order:])
        err = abs(fine - coarse)
        n_done += 1
        if err <= tol * (hi - lo) / total_len or hi - lo < 1e-14 * max(1.0, abs(mid)):
            value += fine
            err_total += err
        elif n_done + len(todo) > max_intervals:
            raise NumericalError(
                f"adaptive quadrature on [{a}, {b}] did not converge: "
                f"local error {err:.3e} on [{lo:.6g}, {hi:.6g}], requested {tol:.1e}"
            )
        else:
            todo.append((lo, mid))
            todo.append((mid, hi))
    return value, err_total


def chord(center_t: float, center_x: float, radius: float, speed: float):
    """Parameter interval of t where the line x = speed*t lies inside the disk."""
    # |(t, speed t) - c|^2 = r^2, quadratic in t
    a = 1.0 + speed * speed
    b = -2.0 * (center_t + speed * center_x)
    c = center_t * center_t + center_x * center_x - radius * radius
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        return None
    root = math.sqrt(disc)
    return (-b - root) / (2.0 * a), (-b + root) / (2.0 * a)


def disk_wedge_integral(func, center_t: float, center_x: float, radius: float,
                        alpha_lo: float, alpha_hi: float, density=None,
                        tol: float = 1e-10, n_radial: int = 40):
    """Integral of density(x/t) * func(t, x) over disk ∩ {alpha_lo <= atan2(x, t) <= alpha_hi}.

    ``func`` must be smooth (entire) inside the disk; ``density`` is any
    vectorised function of eta = x/t that is smooth on the wedge.
    """
    if not alpha_hi > alpha_lo:
        return 0.0
    d = math.hypot(center_t, center_x)
    alpha_c = math.atan2(center_x, center_t)
    xr, wr = gauss_legendre(n_radial)

    def radial(alpha, r_lo, r_hi):
        half = 0.5 * (r_hi - r_lo)
        R = (r_lo + half)[:, None] + half[:, None] * xr[None, :]
        t = R * np.cos(alpha)[:, None]
        x = R * np.sin(alpha)[:, None]
        return half * ((func(t, x) * R) @ wr)

    def with_density(alpha, h):
        if density is None:
            return h
        return h * density(np.tan(alpha))

    if d < radius:
        def outer(alpha):
            s = np.sin(alpha - alpha_c)
            r_hi = d * np.cos(alpha - alpha_c) + np.sqrt(radius * radius - d * d * s * s)
            return with_density(alpha, radial(alpha, np.zeros_like(alpha), r_hi))

        return adaptive_gauss(outer, alpha_lo, alpha_hi, tol)[0]

    k = radius / d
    beta = math.asin(min(k, 1.0))
    total = 0.0
    for shift in (-2.0 * math.pi, 0.0, 2.0 * math.pi):
        a0 = alpha_c + shift
        lo, hi = max(alpha_lo, a0 - beta), min(alpha_hi, a0 + beta)
        if not hi > lo:
            continue
        psi_lo = math.asin(max(-1.0, min(1.0, math.sin(lo - a0) / k)))
        psi_hi = math.asin(max(-1.0, min(1.0, math.sin(hi - a0) / k)))

        def outer(psi, a0=a0):
            sp = np.sin(psi)
            cos_delta = np.sqrt(np.maximum(1.0 - k * k * sp * sp, 0.0))
            cp = np.cos(psi)
            alpha = a0 + np.arcsin(k * sp)
            jac = k * cp / np.where(cos_delta > 0.0, cos_delta, 1.0)
            mid = d * cos_delta
            h = radial(alpha, mid - radius * cp, mid + radius * cp)
            return with_density(alpha, h) * jac

        total += adaptive_gauss(outer, psi_lo, psi_hi, tol)[0]
    return total


def eta_to_alpha(eta: float) -> float:
    if eta == -math.inf:
        return -HALF_PI
    return math.atan(eta)
