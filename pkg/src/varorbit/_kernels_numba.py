"""numba kernels for the action sweep.

Loop order is fixed (node ascending, then body ``i``, then partner ``l > i``)
so sums are reproducible bit for bit across runs.
"""
import math

import numpy as np
from numba import njit


@njit(cache=True)
def pair_terms(r, mi, ml, alpha, delta, g):
    """Value and radial derivative of the (optionally regularized) pair potential."""
    if alpha == 1.0:
        inv = 1.0 / r
    else:
        inv = r ** (-alpha)
    u = -g * mi * ml * inv
    du = alpha * g * mi * ml * inv / r
    if delta > 0.0:
        half = 0.5 * delta
        if r <= half:
            phi = 1.0
            dphi = 0.0
        elif r >= delta:
            phi = 0.0
            dphi = 0.0
        else:
            x = (r - half) / half
            phi = 1.0 - x * x * (3.0 - 2.0 * x)
            dphi = -6.0 * x * (1.0 - x) / half
        if phi != 0.0 or dphi != 0.0:
            r2 = r * r
            u -= phi / r2
            du += -dphi / r2 + 2.0 * phi / (r2 * r)
    return u, du


@njit(cache=True)
def potential_sweep(q, m, alpha, delta, g, want_grad):
    """Per-node potential values and (optionally) the position gradient.

    Returns ``(u_nodes, grad, bad)``; ``bad`` is ``s*N*N + i*N + l`` for the
    first coincident pair, or -1.
    """
    k, n, d = q.shape
    u_nodes = np.zeros(k)
    grad = np.zeros((k, n, d))
    for s in range(k):
        acc = 0.0
        for i in range(n):
            for l in range(i + 1, n):
                r2 = 0.0
                for c in range(d):
                    diff = q[s, i, c] - q[s, l, c]
                    r2 += diff * diff
                if r2 == 0.0:
                    return u_nodes, grad, s * n * n + i * n + l
                r = math.sqrt(r2)
                u, du = pair_terms(r, m[i], m[l], alpha, delta, g)
                acc += u
                if want_grad:
                    coef = du / r
                    for c in range(d):
                        f = coef * (q[s, i, c] - q[s, l, c])
                        grad[s, i, c] += f
                        grad[s, l, c] -= f
        u_nodes[s] = acc
    return u_nodes, grad, -1


@njit(cache=True)
def kinetic(q, m, h):
    """Periodic kinetic form (1/2h) sum m_i |q_i(s+1) - q_i(s)|^2 and its gradient."""
    k, n, d = q.shape
    grad = np.empty((k, n, d))
    total = 0.0
    inv_h = 1.0 / h
    for s in range(k):
        sp = s + 1 if s + 1 < k else 0
        sm = s - 1 if s > 0 else k - 1
        for i in range(n):
            acc = 0.0
            for c in range(d):
                dq = q[sp, i, c] - q[s, i, c]
                acc += dq * dq
                grad[s, i, c] = m[i] * inv_h * (2.0 * q[s, i, c] - q[sp, i, c] - q[sm, i, c])
            total += m[i] * acc
    return 0.5 * inv_h * total, grad


@njit(cache=True)
def action(q, m, alpha, delta, g, h):
    """Returns ``(j, kin, u_hat, grad, bad)`` for the discrete action."""
    u_nodes, pgrad, bad = potential_sweep(q, m, alpha, delta, g, True)
    kin, kgrad = kinetic(q, m, h)
    if bad >= 0:
        return np.nan, kin, np.nan, kgrad, bad
    u_hat = 0.0
    for s in range(u_nodes.shape[0]):
        u_hat += u_nodes[s]
    grad = kgrad - h * pgrad
    return kin - u_hat * h, kin, u_hat, grad, -1


@njit(cache=True)
def segment_kinetic(q, m, h):
    """Kinetic energy on each segment s -> s+1 from the segment slope."""
    k, n, d = q.shape
    out = np.zeros(k)
    for s in range(k):
        sp = s + 1 if s + 1 < k else 0
        acc = 0.0
        for i in range(n):
            v2 = 0.0
            for c in range(d):
                v = (q[sp, i, c] - q[s, i, c]) / h
                v2 += v * v
            acc += 0.5 * m[i] * v2
        out[s] = acc
    return out


@njit(cache=True)
def _pair_value(r, mi, ml, alpha, delta, g):
    u, _ = pair_terms(r, mi, ml, alpha, delta, g)
    return u


@njit(cache=True)
def action_delta(q, dq, m, alpha, delta, g, h):
    """``J(q + dq) - J(q)`` without cancellation against the magnitude of J.

    The kinetic change is expanded exactly; each pair term uses
    ``r'^-a - r^-a = r^-a * expm1(-a/2 * log1p(w))`` with
    ``w = (2<d,e> + |e|^2) / r^2``. Returns ``(dJ, bad)``.
    """
    k, n, d = q.shape
    dkin = 0.0
    for s in range(k):
        sp = s + 1 if s + 1 < k else 0
        for i in range(n):
            acc = 0.0
            for c in range(d):
                a = q[sp, i, c] - q[s, i, c]
                b = dq[sp, i, c] - dq[s, i, c]
                acc += b * (2.0 * a + b)
            dkin += m[i] * acc
    dkin *= 0.5 / h
    du = 0.0
    for s in range(k):
        for i in range(n):
            for l in range(i + 1, n):
                r2 = 0.0
                cross = 0.0
                e2 = 0.0
                for c in range(d):
                    dd = q[s, i, c] - q[s, l, c]
                    ee = dq[s, i, c] - dq[s, l, c]
                    r2 += dd * dd
                    cross += dd * ee
                    e2 += ee * ee
                if r2 == 0.0:
                    return np.nan, s * n * n + i * n + l
                w = (2.0 * cross + e2) / r2
                if w <= -1.0:
                    return np.nan, s * n * n + i * n + l
                if delta > 0.0:
                    r = math.sqrt(r2)
                    rn = r * math.sqrt(1.0 + w)
                    if r < delta or rn < delta:
                        # cutoff active: direct difference, values are O(1/delta^2) anyway
                        du += (_pair_value(rn, m[i], m[l], alpha, delta, g)
                               - _pair_value(r, m[i], m[l], alpha, delta, g))
                        continue
                base = -g * m[i] * m[l] * r2 ** (-0.5 * alpha)
                du += base * math.expm1(-0.5 * alpha * math.log1p(w))
    return dkin - h * du, -1
