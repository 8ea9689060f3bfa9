"""numba kernels; same contracts as ``_numpy`` but looping one start at a time."""

import numpy as np
from numba import njit


@njit(cache=True)
def grid_values(T, Q1, Q2):
    n1 = Q1.shape[0]
    n2 = Q2.shape[0]
    out = np.empty((n1, n2))
    for a in range(n1):
        x0 = np.conj(Q1[a, 0])
        x1 = np.conj(Q1[a, 1])
        # partial contraction over qubit A, shape (2, 2) in (B, C)
        m00 = x0 * T[0, 0, 0] + x1 * T[1, 0, 0]
        m01 = x0 * T[0, 0, 1] + x1 * T[1, 0, 1]
        m10 = x0 * T[0, 1, 0] + x1 * T[1, 1, 0]
        m11 = x0 * T[0, 1, 1] + x1 * T[1, 1, 1]
        for b in range(n2):
            y0 = np.conj(Q2[b, 0])
            y1 = np.conj(Q2[b, 1])
            v0 = y0 * m00 + y1 * m10
            v1 = y0 * m01 + y1 * m11
            out[a, b] = v0.real**2 + v0.imag**2 + v1.real**2 + v1.imag**2
    return out


@njit(cache=True)
def _contract(T, u, w, slot):
    # contract T with conj(u), conj(w) on every axis except ``slot``
    v = np.zeros(2, dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                if slot == 0:
                    v[i] += np.conj(u[j]) * np.conj(w[k]) * T[i, j, k]
                elif slot == 1:
                    v[j] += np.conj(u[i]) * np.conj(w[k]) * T[i, j, k]
                else:
                    v[k] += np.conj(u[i]) * np.conj(w[j]) * T[i, j, k]
    return v


@njit(cache=True)
def _update(T, u, w, slot, q):
    v = _contract(T, u, w, slot)
    nv = np.sqrt(v[0].real**2 + v[0].imag**2 + v[1].real**2 + v[1].imag**2)
    if nv > 0.0:
        q[0] = v[0] / nv
        q[1] = v[1] / nv
    return nv * nv


@njit(cache=True)
def als_sweeps(T, Q1, Q2, Q3, max_iter, tol):
    n = Q1.shape[0]
    Q1 = Q1.astype(np.complex128).copy()
    Q2 = Q2.astype(np.complex128).copy()
    Q3 = Q3.astype(np.complex128).copy()
    vals = np.empty(n)
    iters = np.zeros(n, dtype=np.int64)
    worst = np.full(n, np.inf)
    for s in range(n):
        q1 = Q1[s]
        q2 = Q2[s]
        q3 = Q3[s]
        ov = 0j
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    ov += np.conj(q1[i]) * np.conj(q2[j]) * np.conj(q3[k]) * T[i, j, k]
        prev = ov.real**2 + ov.imag**2
        for it in range(max_iter):
            start = prev
            cur = _update(T, q2, q3, 0, q1)
            worst[s] = min(worst[s], cur - prev)
            prev = cur
            cur = _update(T, q1, q3, 1, q2)
            worst[s] = min(worst[s], cur - prev)
            prev = cur
            cur = _update(T, q1, q2, 2, q3)
            worst[s] = min(worst[s], cur - prev)
            prev = cur
            iters[s] = it + 1
            if cur - start < tol:
                break
        vals[s] = prev
    return vals, Q1, Q2, Q3, iters, worst


@njit(cache=True)
def _solve3(A, b):
    # Cramer's rule; returns (x, det)
    c00 = A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1]
    c01 = A[1, 2] * A[2, 0] - A[1, 0] * A[2, 2]
    c02 = A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0]
    det = A[0, 0] * c00 + A[0, 1] * c01 + A[0, 2] * c02
    x = np.empty(3)
    if det == 0.0 or not np.isfinite(det):
        x[:] = np.nan
        return x, det
    c10 = A[0, 2] * A[2, 1] - A[0, 1] * A[2, 2]
    c11 = A[0, 0] * A[2, 2] - A[0, 2] * A[2, 0]
    c12 = A[0, 1] * A[2, 0] - A[0, 0] * A[2, 1]
    c20 = A[0, 1] * A[1, 2] - A[0, 2] * A[1, 1]
    c21 = A[0, 2] * A[1, 0] - A[0, 0] * A[1, 2]
    c22 = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    x[0] = (c00 * b[0] + c10 * b[1] + c20 * b[2]) / det
    x[1] = (c01 * b[0] + c11 * b[1] + c21 * b[2]) / det
    x[2] = (c02 * b[0] + c12 * b[1] + c22 * b[2]) / det
    return x, det


@njit(cache=True)
def _residual(l1, l2, r1, r2, g, ggt, gtg, gr2, gtr1):
    p = l1 * l2
    A1 = -ggt.copy()
    A2 = -gtg.copy()
    for i in range(3):
        A1[i, i] += p
        A2[i, i] += p
    s1, d1 = _solve3(A1, l2 * r1 + gr2)
    s2, d2 = _solve3(A2, l1 * r2 + gtr1)
    f0 = s1[0] ** 2 + s1[1] ** 2 + s1[2] ** 2 - 1.0
    f1 = s2[0] ** 2 + s2[1] ** 2 + s2[2] ** 2 - 1.0
    if not (np.isfinite(f0) and np.isfinite(f1)):
        return np.inf, np.inf
    return f0, f1


@njit(cache=True)
def newton_multistart(r1, r2, g, starts, max_iter, fd_step, ftol):
    n = starts.shape[0]
    lam = starts.astype(np.float64).copy()
    fnorm = np.empty(n)
    conv = np.zeros(n, dtype=np.bool_)
    ggt = g @ g.T
    gtg = g.T @ g
    gr2 = g @ r2
    gtr1 = g.T @ r1
    for s in range(n):
        l1 = lam[s, 0]
        l2 = lam[s, 1]
        f0, f1 = _residual(l1, l2, r1, r2, g, ggt, gtg, gr2, gtr1)
        fn = np.sqrt(f0 * f0 + f1 * f1)
        if fn < ftol:
            conv[s] = True
        elif np.isfinite(fn):
            for _ in range(max_iter):
                h1 = fd_step * max(1.0, abs(l1))
                h2 = fd_step * max(1.0, abs(l2))
                a0, a1 = _residual(l1 + h1, l2, r1, r2, g, ggt, gtg, gr2, gtr1)
                b0, b1 = _residual(l1 - h1, l2, r1, r2, g, ggt, gtg, gr2, gtr1)
                c0, c1 = _residual(l1, l2 + h2, r1, r2, g, ggt, gtg, gr2, gtr1)
                e0, e1 = _residual(l1, l2 - h2, r1, r2, g, ggt, gtg, gr2, gtr1)
                j00 = (a0 - b0) / (2.0 * h1)
                j10 = (a1 - b1) / (2.0 * h1)
                j01 = (c0 - e0) / (2.0 * h2)
                j11 = (c1 - e1) / (2.0 * h2)
                if not (np.isfinite(j00) and np.isfinite(j01) and np.isfinite(j10) and np.isfinite(j11)):
                    break
                det = j00 * j11 - j01 * j10
                if det == 0.0:
                    break
                d1 = -(j11 * f0 - j01 * f1) / det
                d2 = -(-j10 * f0 + j00 * f1) / det
                t = 1.0
                accepted = False
                for _ls in range(31):
                    t0, t1 = _residual(l1 + t * d1, l2 + t * d2, r1, r2, g, ggt, gtg, gr2, gtr1)
                    tn = np.sqrt(t0 * t0 + t1 * t1)
                    if tn < fn:
                        l1 = l1 + t * d1
                        l2 = l2 + t * d2
                        f0 = t0
                        f1 = t1
                        fn = tn
                        accepted = True
                        break
                    t *= 0.5
                if not accepted or fn < ftol:
                    break
            conv[s] = fn < ftol
        lam[s, 0] = l1
        lam[s, 1] = l2
        fnorm[s] = fn
    return lam, fnorm, conv
