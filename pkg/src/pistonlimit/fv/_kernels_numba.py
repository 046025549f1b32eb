"""Loop kernels for the Godunov/HLLC scheme, compiled with numba."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _hllc(rl, ml, el, rr, mr, er, gamma, out):
    ul = ml / rl
    ur = mr / rr
    pl = (gamma - 1.0) * (el - 0.5 * rl * ul * ul)
    pr = (gamma - 1.0) * (er - 0.5 * rr * ur * ur)
    cl = math.sqrt(gamma * pl / rl)
    cr = math.sqrt(gamma * pr / rr)
    # Einfeldt wave speeds from Roe averages
    sl_ = math.sqrt(rl)
    sr_ = math.sqrt(rr)
    ut = (sl_ * ul + sr_ * ur) / (sl_ + sr_)
    hl = (el + pl) / rl
    hr = (er + pr) / rr
    ht = (sl_ * hl + sr_ * hr) / (sl_ + sr_)
    ct = math.sqrt(max((gamma - 1.0) * (ht - 0.5 * ut * ut), 0.0))
    sL = min(ul - cl, ut - ct)
    sR = max(ur + cr, ut + ct)
    fl0, fl1, fl2 = ml, ml * ul + pl, ul * (el + pl)
    fr0, fr1, fr2 = mr, mr * ur + pr, ur * (er + pr)
    if sL >= 0.0:
        out[0], out[1], out[2] = fl0, fl1, fl2
        return
    if sR <= 0.0:
        out[0], out[1], out[2] = fr0, fr1, fr2
        return
    ql = rl * (sL - ul)
    qr = rr * (sR - ur)
    sm = (pr - pl + ml * (sL - ul) - mr * (sR - ur)) / (ql - qr)
    plr = 0.5 * (pl + pr + ql * (sm - ul) + qr * (sm - ur))
    if sm >= 0.0:
        d = sL - sm
        out[0] = sm * (sL * rl - fl0) / d
        out[1] = (sm * (sL * ml - fl1) + sL * plr) / d
        out[2] = (sm * (sL * el - fl2) + sL * plr * sm) / d
    else:
        d = sR - sm
        out[0] = sm * (sR * rr - fr0) / d
        out[1] = (sm * (sR * mr - fr1) + sR * plr) / d
        out[2] = (sm * (sR * er - fr2) + sR * plr * sm) / d


@njit(cache=True)
def evolve(U, gamma, dx, T, cfl, left, avg_start):
    N = U.shape[0]
    W = np.empty((N + 4, 3))
    F = np.empty((N + 1, 3))
    f = np.empty(3)
    bflux = np.zeros((2, 3))
    imbalance = 0.0
    wall_int = 0.0
    wall_time = 0.0
    t = 0.0
    steps = 0
    while t < T:
        for k in range(3):
            W[0, k] = left[k]
            W[1, k] = left[k]
        for i in range(N):
            for k in range(3):
                W[i + 2, k] = U[i, k]
        for j in range(2):
            W[N + 2 + j, 0] = U[N - 1 - j, 0]
            W[N + 2 + j, 1] = -U[N - 1 - j, 1]
            W[N + 2 + j, 2] = U[N - 1 - j, 2]
        smax = 0.0
        for i in range(N):
            r = U[i, 0]
            u = U[i, 1] / r
            p = (gamma - 1.0) * (U[i, 2] - 0.5 * r * u * u)
            s = abs(u) + math.sqrt(gamma * p / r)
            if s > smax:
                smax = s
        dt = cfl * dx / smax
        if dt >= T - t:
            dt = T - t
        for i in range(N + 1):
            _hllc(W[i + 1, 0], W[i + 1, 1], W[i + 1, 2], W[i + 2, 0], W[i + 2, 1], W[i + 2, 2], gamma, f)
            F[i, 0] = f[0]
            F[i, 1] = f[1]
            F[i, 2] = f[2]
        lam = dt / dx
        for k in range(3):
            before = 0.0
            for i in range(N):
                before += U[i, k]
            after = 0.0
            for i in range(N):
                U[i, k] -= lam * (F[i + 1, k] - F[i, k])
                after += U[i, k]
            change = (after - before) * dx + dt * (F[N, k] - F[0, k])
            scale = max(abs(before) * dx, 1e-300)
            if abs(change) / scale > imbalance:
                imbalance = abs(change) / scale
            bflux[0, k] += dt * F[0, k]
            bflux[1, k] += dt * F[N, k]
        lo = max(t, avg_start)
        if t + dt > lo:
            wall_int += F[N, 1] * (t + dt - lo)
            wall_time += t + dt - lo
        t += dt
        steps += 1
        for i in range(N):
            r = U[i, 0]
            if not r > 0.0:
                return t, steps, bflux, wall_int, wall_time, imbalance, 1, i
            e = U[i, 2] - 0.5 * U[i, 1] * U[i, 1] / r
            if not e > 0.0:
                return t, steps, bflux, wall_int, wall_time, imbalance, 2, i
        if dt == 0.0:
            break
    return t, steps, bflux, wall_int, wall_time, imbalance, 0, -1
