"""Pure-numpy kernels. Every start is processed in lockstep as a batch."""

import numpy as np

_INF = np.inf


def grid_values(T, Q1, Q2):
    """``out[a, b] = || <Q1[a], Q2[b] | psi> ||^2`` with the third qubit left open."""
    v = np.einsum("ai,bj,ijk->abk", Q1.conj(), Q2.conj(), T, optimize=True)
    return (v.real**2 + v.imag**2).sum(axis=-1)


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def als_sweeps(T, Q1, Q2, Q3, max_iter, tol):
    """Alternating single-qubit updates A -> B -> C from a batch of starts.

    Returns ``(values, Q1, Q2, Q3, iters, worst_step)`` where ``worst_step`` is
    the most negative change of the overlap seen after any single update.
    """
    Q1 = Q1.astype(np.complex128, copy=True)
    Q2 = Q2.astype(np.complex128, copy=True)
    Q3 = Q3.astype(np.complex128, copy=True)
    n = Q1.shape[0]
    Tc = T
    vals = np.abs(np.einsum("ni,nj,nk,ijk->n", Q1.conj(), Q2.conj(), Q3.conj(), Tc)) ** 2
    iters = np.zeros(n, dtype=np.int64)
    worst = np.full(n, np.inf)
    active = np.ones(n, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        q1, q2, q3 = Q1[idx], Q2[idx], Q3[idx]
        prev = vals[idx]
        start = prev

        v = np.einsum("nj,nk,ijk->ni", q2.conj(), q3.conj(), Tc)
        nv = np.linalg.norm(v, axis=1)
        q1 = np.where(nv[:, None] > 0, v / np.where(nv > 0, nv, 1.0)[:, None], q1)
        cur = nv**2
        worst[idx] = np.minimum(worst[idx], cur - prev)
        prev = cur

        v = np.einsum("ni,nk,ijk->nj", q1.conj(), q3.conj(), Tc)
        nv = np.linalg.norm(v, axis=1)
        q2 = np.where(nv[:, None] > 0, v / np.where(nv > 0, nv, 1.0)[:, None], q2)
        cur = nv**2
        worst[idx] = np.minimum(worst[idx], cur - prev)
        prev = cur

        v = np.einsum("ni,nj,ijk->nk", q1.conj(), q2.conj(), Tc)
        nv = np.linalg.norm(v, axis=1)
        q3 = np.where(nv[:, None] > 0, v / np.where(nv > 0, nv, 1.0)[:, None], q3)
        cur = nv**2
        worst[idx] = np.minimum(worst[idx], cur - prev)

        Q1[idx], Q2[idx], Q3[idx] = q1, q2, q3
        vals[idx] = cur
        iters[idx] += 1
        active[idx] = cur - start >= tol
    return vals, Q1, Q2, Q3, iters, worst


def _closed_form(lam, r1, r2, g):
    """Batched closed-form Bloch candidates; ``ok`` is False where a matrix is singular."""
    l1, l2 = lam[:, 0], lam[:, 1]
    p = l1 * l2
    eye = np.eye(3)
    ggt = g @ g.T
    gtg = g.T @ g
    A1 = p[:, None, None] * eye - ggt
    A2 = p[:, None, None] * eye - gtg
    b1 = l2[:, None] * r1 + (g @ r2)[None, :]
    b2 = l1[:, None] * r2 + (g.T @ r1)[None, :]
    d1 = np.linalg.det(A1)
    d2 = np.linalg.det(A2)
    ok = (d1 != 0.0) & (d2 != 0.0) & np.isfinite(d1) & np.isfinite(d2)
    s1 = np.full((lam.shape[0], 3), np.nan)
    s2 = np.full((lam.shape[0], 3), np.nan)
    if ok.any():
        s1[ok] = np.linalg.solve(A1[ok], b1[ok][..., None])[..., 0]
        s2[ok] = np.linalg.solve(A2[ok], b2[ok][..., None])[..., 0]
    return s1, s2, ok


def _residual(lam, r1, r2, g):
    s1, s2, ok = _closed_form(lam, r1, r2, g)
    F = np.stack([(s1 * s1).sum(1) - 1.0, (s2 * s2).sum(1) - 1.0], axis=1)
    F[~ok] = _INF
    F[~np.isfinite(F).all(1)] = _INF
    return F


def _fnorm(F):
    with np.errstate(invalid="ignore"):
        out = np.sqrt((F * F).sum(1))
    out[~np.isfinite(out)] = _INF
    return out


def newton_multistart(r1, r2, g, starts, max_iter, fd_step, ftol):
    """Newton search for ``| s1(lam) | = | s2(lam) | = 1`` from each start.

    Jacobians use central differences; a step that does not reduce ``|F|``
    is halved up to 30 times. Returns ``(lam, fnorm, converged)``.
    """
    lam = np.array(starts, dtype=np.float64, copy=True)
    n = lam.shape[0]
    F = _residual(lam, r1, r2, g)
    fn = _fnorm(F)
    conv = fn < ftol
    active = np.isfinite(fn) & ~conv
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        la = lam[idx]
        h = fd_step * np.maximum(1.0, np.abs(la))
        J = np.empty((idx.size, 2, 2))
        bad = np.zeros(idx.size, dtype=bool)
        for k in range(2):
            e = np.zeros_like(la)
            e[:, k] = h[:, k]
            Fp = _residual(la + e, r1, r2, g)
            Fm = _residual(la - e, r1, r2, g)
            col = (Fp - Fm) / (2.0 * h[:, k])[:, None]
            bad |= ~np.isfinite(col).all(1)
            J[:, :, k] = np.where(np.isfinite(col), col, 0.0)
        detJ = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        bad |= detJ == 0.0
        Fa = F[idx]
        step = np.zeros_like(la)
        good = ~bad
        step[good, 0] = -(J[good, 1, 1] * Fa[good, 0] - J[good, 0, 1] * Fa[good, 1]) / detJ[good]
        step[good, 1] = -(-J[good, 1, 0] * Fa[good, 0] + J[good, 0, 0] * Fa[good, 1]) / detJ[good]

        f0 = fn[idx]
        accepted = np.zeros(idx.size, dtype=bool)
        new_lam = la.copy()
        new_F = Fa.copy()
        new_fn = f0.copy()
        t = 1.0
        for _ in range(31):
            todo = good & ~accepted
            if not todo.any():
                break
            trial = la[todo] + t * step[todo]
            Ft = _residual(trial, r1, r2, g)
            ft = _fnorm(Ft)
            ok = ft < f0[todo]
            sel = np.flatnonzero(todo)[ok]
            new_lam[sel] = trial[ok]
            new_F[sel] = Ft[ok]
            new_fn[sel] = ft[ok]
            accepted[sel] = True
            t *= 0.5
        lam[idx] = new_lam
        F[idx] = new_F
        fn[idx] = new_fn
        done = new_fn < ftol
        conv[idx] |= done
        active[idx] = accepted & ~done
    return lam, fn, conv
