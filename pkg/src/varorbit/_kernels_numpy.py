"""Vectorized numpy kernels, same signatures as ``_kernels_numba``."""
import numpy as np


def _cutoff(r, delta):
    half = 0.5 * delta
    x = np.clip((r - half) / half, 0.0, 1.0)
    phi = 1.0 - x * x * (3.0 - 2.0 * x)
    dphi = -6.0 * x * (1.0 - x) / half
    return phi, dphi


def pair_terms(r, mi, ml, alpha, delta, g):
    r = np.asarray(r, dtype=float)
    inv = 1.0 / r if alpha == 1.0 else r ** (-alpha)
    u = -g * mi * ml * inv
    du = alpha * g * mi * ml * inv / r
    if delta > 0.0:
        phi, dphi = _cutoff(r, delta)
        r2 = r * r
        u = u - phi / r2
        du = du - dphi / r2 + 2.0 * phi / (r2 * r)
    return u, du


def potential_sweep(q, m, alpha, delta, g, want_grad):
    k, n, d = q.shape
    diff = q[:, :, None, :] - q[:, None, :, :]
    r2 = np.einsum("sild,sild->sil", diff, diff)
    iu, lu = np.triu_indices(n, 1)
    pair_r2 = r2[:, iu, lu]
    hits = np.argwhere(pair_r2 == 0.0)
    if hits.size:
        s, p = hits[0]
        return np.zeros(k), np.zeros((k, n, d)), int(s * n * n + iu[p] * n + lu[p])
    r = np.sqrt(pair_r2)
    u, du = pair_terms(r, m[iu], m[lu], alpha, delta, g)
    u_nodes = u.sum(axis=1)
    if not want_grad:
        return u_nodes, np.zeros((k, n, d)), -1
    coef = np.zeros((k, n, n))
    coef[:, iu, lu] = du / r
    coef[:, lu, iu] = du / r
    grad = np.einsum("sil,sild->sid", coef, diff)
    return u_nodes, grad, -1


def kinetic(q, m, h):
    fwd = np.roll(q, -1, axis=0)
    bwd = np.roll(q, 1, axis=0)
    w = m[None, :, None]
    kin = 0.5 / h * np.sum(w * (fwd - q) ** 2)
    grad = w / h * (2.0 * q - fwd - bwd)
    return kin, grad


def action(q, m, alpha, delta, g, h):
    u_nodes, pgrad, bad = potential_sweep(q, m, alpha, delta, g, True)
    kin, kgrad = kinetic(q, m, h)
    if bad >= 0:
        return np.nan, kin, np.nan, kgrad, bad
    u_hat = float(np.sum(u_nodes))
    return kin - u_hat * h, kin, u_hat, kgrad - h * pgrad, -1


def segment_kinetic(q, m, h):
    v = (np.roll(q, -1, axis=0) - q) / h
    return 0.5 * np.einsum("i,sid->s", m, v * v)


def action_delta(q, dq, m, alpha, delta, g, h):
    a = np.roll(q, -1, axis=0) - q
    b = np.roll(dq, -1, axis=0) - dq
    dkin = 0.5 / h * float(np.sum(m[None, :, None] * b * (2.0 * a + b)))
    n = q.shape[1]
    iu, lu = np.triu_indices(n, 1)
    dd = q[:, iu, :] - q[:, lu, :]
    ee = dq[:, iu, :] - dq[:, lu, :]
    r2 = np.sum(dd * dd, axis=-1)
    w = np.divide(2.0 * np.sum(dd * ee, axis=-1) + np.sum(ee * ee, axis=-1), r2,
                  out=np.full_like(r2, -1.0), where=r2 > 0)
    hits = np.argwhere(w <= -1.0)
    if hits.size:
        s, p = hits[0]
        return np.nan, int(s * n * n + iu[p] * n + lu[p])
    mm = m[iu] * m[lu]
    du_pairs = -g * mm * r2 ** (-0.5 * alpha) * np.expm1(-0.5 * alpha * np.log1p(w))
    if delta > 0.0:
        r = np.sqrt(r2)
        rn = r * np.sqrt(1.0 + w)
        near = (r < delta) | (rn < delta)
        if np.any(near):
            mm_near = np.broadcast_to(mm, r.shape)[near]
            u_new, _ = pair_terms(rn[near], mm_near, 1.0, alpha, delta, g)
            u_old, _ = pair_terms(r[near], mm_near, 1.0, alpha, delta, g)
            du_pairs[near] = u_new - u_old
    return dkin - h * float(np.sum(du_pairs)), -1
