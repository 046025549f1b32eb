"""Vectorised numpy implementation of the Godunov/HLLC scheme."""

import numpy as np


def hllc(WL, WR, gamma):
    rl, ml, el = WL[:, 0], WL[:, 1], WL[:, 2]
    rr, mr, er = WR[:, 0], WR[:, 1], WR[:, 2]
    ul, ur = ml / rl, mr / rr
    pl = (gamma - 1.0) * (el - 0.5 * rl * ul * ul)
    pr = (gamma - 1.0) * (er - 0.5 * rr * ur * ur)
    cl, cr = np.sqrt(gamma * pl / rl), np.sqrt(gamma * pr / rr)
    sl_, sr_ = np.sqrt(rl), np.sqrt(rr)
    ut = (sl_ * ul + sr_ * ur) / (sl_ + sr_)
    ht = (sl_ * (el + pl) / rl + sr_ * (er + pr) / rr) / (sl_ + sr_)
    ct = np.sqrt(np.maximum((gamma - 1.0) * (ht - 0.5 * ut * ut), 0.0))
    sL = np.minimum(ul - cl, ut - ct)
    sR = np.maximum(ur + cr, ut + ct)
    FL = np.stack([ml, ml * ul + pl, ul * (el + pl)], axis=1)
    FR = np.stack([mr, mr * ur + pr, ur * (er + pr)], axis=1)
    ql, qr = rl * (sL - ul), rr * (sR - ur)
    with np.errstate(divide="ignore", invalid="ignore"):
        sm = (pr - pl + ml * (sL - ul) - mr * (sR - ur)) / (ql - qr)
        plr = 0.5 * (pl + pr + ql * (sm - ul) + qr * (sm - ur))
        left = sm >= 0.0
        sK = np.where(left, sL, sR)
        UK = np.where(left[:, None], WL, WR)
        FK = np.where(left[:, None], FL, FR)
        d = sK - sm
        Fs = np.empty_like(FL)
        Fs[:, 0] = sm * (sK * UK[:, 0] - FK[:, 0]) / d
        Fs[:, 1] = (sm * (sK * UK[:, 1] - FK[:, 1]) + sK * plr) / d
        Fs[:, 2] = (sm * (sK * UK[:, 2] - FK[:, 2]) + sK * plr * sm) / d
    F = np.where((sL >= 0.0)[:, None], FL, np.where((sR <= 0.0)[:, None], FR, Fs))
    return F


def evolve(U, gamma, dx, T, cfl, left, avg_start):
    N = U.shape[0]
    bflux = np.zeros((2, 3))
    imbalance = 0.0
    wall_int = wall_time = 0.0
    t, steps = 0.0, 0
    mirror = np.array([1.0, -1.0, 1.0])
    while t < T:
        W = np.concatenate([np.stack([left, left]), U, U[N - 1:N - 3:-1] * mirror])
        r = U[:, 0]
        u = U[:, 1] / r
        p = (gamma - 1.0) * (U[:, 2] - 0.5 * r * u * u)
        smax = np.max(np.abs(u) + np.sqrt(gamma * p / r))
        dt = cfl * dx / smax
        if dt >= T - t:
            dt = T - t
        F = hllc(W[1:N + 2], W[2:N + 3], gamma)
        before = U.sum(axis=0)
        U -= dt / dx * (F[1:] - F[:-1])
        after = U.sum(axis=0)
        change = (after - before) * dx + dt * (F[N] - F[0])
        scale = np.maximum(np.abs(before) * dx, 1e-300)
        imbalance = max(imbalance, float(np.max(np.abs(change) / scale)))
        bflux[0] += dt * F[0]
        bflux[1] += dt * F[N]
        lo = max(t, avg_start)
        if t + dt > lo:
            wall_int += F[N, 1] * (t + dt - lo)
            wall_time += t + dt - lo
        t += dt
        steps += 1
        r = U[:, 0]
        bad = np.flatnonzero(~(r > 0.0))
        if bad.size:
            return t, steps, bflux, wall_int, wall_time, imbalance, 1, int(bad[0])
        e = U[:, 2] - 0.5 * U[:, 1] ** 2 / r
        bad = np.flatnonzero(~(e > 0.0))
        if bad.size:
            return t, steps, bflux, wall_int, wall_time, imbalance, 2, int(bad[0])
        if dt == 0.0:
            break
    return t, steps, bflux, wall_int, wall_time, imbalance, 0, -1
