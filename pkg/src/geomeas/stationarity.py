"""
Stationary points of the two-qubit overlap form on a pair of unit spheres.

At a critical point of ``(1 + s1.r1 + s2.r2 + s1.g.s2) / 4`` under
``|s1| = |s2| = 1`` there are multipliers with

    r1 + g s2 = lambda1 s1,    r2 + g^T s1 = lambda2 s2.

When ``lambda1 * lambda2`` is not a squared singular value of ``g``, both
vectors follow in closed form from the multipliers, and the unit-norm
conditions leave two equations in two unknowns. These are solved by
multi-start Newton iteration. On the singular curves the closed form breaks
down. Those branches are enumerated separately in singular-vector
coordinates, where the remaining freedom is explicit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .states import PairReduction

__all__ = [
    "LagrangePair",
    "StationaryPoint",
    "DegenerateSystem",
    "NoStationaryPoint",
    "closed_form_s",
    "detect_degenerate",
    "stationarity_residual",
    "solve_stationary",
]

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
DEDUP_TOL = 1e-7
FD_STEP = 1e-6
LAMBDA_BOX = 2.0
_HYPERBOLA_U = np.linspace(-0.6, 0.6, 7)
_HYPERBOLA_OFFSETS = (0.97, 0.995, 1.005, 1.03)


class DegenerateSystem(ArithmeticError):
    """``lambda1 * lambda2`` hits a squared singular value of ``g``; the closed form does not apply."""


class NoStationaryPoint(RuntimeError):
    pass


@dataclass(frozen=True)
class LagrangePair:
    lambda1: float
    lambda2: float


@dataclass(frozen=True, eq=False)
class StationaryPoint:
    s1: np.ndarray
    s2: np.ndarray
    lagrange: LagrangePair
    value: float
    degenerate: bool
    residual: float = 0.0


def _threshold(g: np.ndarray) -> float:
    return 1e-9 * max(1.0, float(np.sum(g * g)))


def detect_degenerate(red: PairReduction, lag: LagrangePair) -> bool:
    """True when ``det(lambda1 lambda2 I - g g^T)`` is numerically zero."""
    p = lag.lambda1 * lag.lambda2
    det = np.linalg.det(p * np.eye(3) - red.g @ red.g.T)
    return bool(abs(det) < _threshold(red.g))


def _closed_form_raw(red, l1, l2):
    p = l1 * l2
    g = red.g
    s1 = np.linalg.solve(p * np.eye(3) - g @ g.T, l2 * red.r1 + g @ red.r2)
    s2 = np.linalg.solve(p * np.eye(3) - g.T @ g, l1 * red.r2 + g.T @ red.r1)
    return s1, s2


def closed_form_s(red: PairReduction, lag: LagrangePair) -> tuple[np.ndarray, np.ndarray]:
    """Bloch-vector candidates for given multipliers.

    The returned vectors are not normalized; their norms equal one only at a
    root of the unit-norm conditions. Raises :class:`DegenerateSystem` when
    the linear systems are singular.
    """
    if detect_degenerate(red, lag):
        raise DegenerateSystem(f"lambda1*lambda2 = {lag.lambda1 * lag.lambda2!r} is singular for this g")
    return _closed_form_raw(red, lag.lambda1, lag.lambda2)


def stationarity_residual(red: PairReduction, s1, s2, lag: LagrangePair) -> float:
    """``|r1 + g s2 - lambda1 s1| + |r2 + g^T s1 - lambda2 s2|``."""
    e1 = red.r1 + red.g @ s2 - lag.lambda1 * s1
    e2 = red.r2 + red.g.T @ s1 - lag.lambda2 * s2
    return float(np.linalg.norm(e1) + np.linalg.norm(e2))


def _value(red, s1, s2):
    return 0.25 * (1.0 + s1 @ red.r1 + s2 @ red.r2 + s1 @ red.g @ s2)


def _make_point(red, s1, s2, l1, l2):
    """Validate a candidate; returns a StationaryPoint or None."""
    if not (np.all(np.isfinite(s1)) and np.all(np.isfinite(s2))):
        return None
    n1, n2 = np.linalg.norm(s1), np.linalg.norm(s2)
    if abs(n1 - 1.0) > RESIDUAL_TOL or abs(n2 - 1.0) > RESIDUAL_TOL:
        return None
    s1, s2 = s1 / n1, s2 / n2
    lag = LagrangePair(float(l1), float(l2))
    res = stationarity_residual(red, s1, s2, lag)
    if res >= RESIDUAL_TOL:
        return None
    return StationaryPoint(s1, s2, lag, float(_value(red, s1, s2)), detect_degenerate(red, lag), res)


def _groups(sig, tol):
    groups, cur = [], [0]
    for k in range(1, len(sig)):
        if abs(sig[k] - sig[cur[-1]]) <= tol:
            cur.append(k)
        else:
            groups.append(cur)
            cur = [k]
    groups.append(cur)
    return groups


def _degenerate_points(red: PairReduction):
    """Stationary points with ``lambda1 * lambda2`` equal to a squared singular value.

    In coordinates ``a = U^T s1``, ``b = V^T s2`` (``g = U diag(sig) V^T``) the
    equations decouple per singular direction. On a singular group ``K`` the
    2x2 block is rank one, and its null direction carries a free vector ``c``.
    Components outside ``K`` follow from the multipliers.
    """
    U, sig, Vt = np.linalg.svd(red.g)
    V = Vt.T
    rho1 = U.T @ red.r1
    rho2 = Vt @ red.r2
    gtol = 1e-9 * max(1.0, sig[0])
    points = []
    for K in _groups(sig, gtol):
        sk = float(np.mean(sig[K]))
        if sk <= gtol:
            continue
        J = [j for j in range(3) if j not in K]
        sj = sig[J]
        dj = sk**2 - sj**2
        p1, p2 = rho1[K], rho2[K]
        q1, q2 = rho1[J], rho2[J]

        def outside(l1):
            l2 = sk**2 / l1
            return (l2 * q1 + sj * q2) / dj, (l1 * q2 + sj * q1) / dj

        candidates = []  # (lambda1, a_K particular part)
        if np.linalg.norm(p1) < 1e-10 and np.linalg.norm(p2) < 1e-10:
            # lambda1^2 * (1 - |a_J|^2) = sk^2 * (1 - |b_J|^2); the linear term cancels
            A = 1.0 - np.sum(sj**2 * q2**2 / dj**2) + sk**2 * np.sum(q2**2 / dj**2)
            C = -(sk**2) - np.sum(sk**4 * q1**2 / dj**2) + sk**2 * np.sum(sj**2 * q1**2 / dj**2)
            if A != 0.0 and -C / A > 0.0:
                root = np.sqrt(-C / A)
                candidates = [(root, np.zeros(len(K))), (-root, np.zeros(len(K)))]
        elif np.linalg.norm(p2) >= 1e-10:
            # consistency sk * rho1_K + lambda1 * rho2_K = 0 fixes lambda1
            l1 = -sk * float(p1 @ p2) / float(p2 @ p2)
            if l1 != 0.0 and np.linalg.norm(sk * p1 + l1 * p2) < 1e-10:
                candidates = [(l1, p1 / l1)]

        for l1, part in candidates:
            aJ, bJ = outside(l1)
            c_sq = (1.0 - bJ @ bJ) / l1**2
            if c_sq < -1e-12:
                continue
            c_sq = max(c_sq, 0.0)
            m = len(K)
            basis = np.eye(m)
            dirs = []
            if not part.any():
                c = np.sqrt(c_sq) * basis[0]
                dirs = [c, -c] if m == 1 else [c]
            else:
                # |a_J|^2 + |part + sk c|^2 = 1 pins the component of c along part
                kappa = (1.0 - aJ @ aJ - sk**2 * c_sq - part @ part) / (2.0 * sk)
                pn = part / np.linalg.norm(part)
                along = kappa / np.linalg.norm(part)
                perp_sq = c_sq - along**2
                if perp_sq < -1e-10:
                    continue
                perp_sq = max(perp_sq, 0.0)
                if m == 1 or perp_sq == 0.0:
                    dirs = [along * pn]
                else:
                    u = basis[0] - (basis[0] @ pn) * pn
                    if np.linalg.norm(u) < 1e-6:
                        u = basis[1] - (basis[1] @ pn) * pn
                    u /= np.linalg.norm(u)
                    w = np.sqrt(perp_sq) * u
                    dirs = [along * pn + w, along * pn - w]
            for c in dirs:
                a = np.empty(3)
                b = np.empty(3)
                a[J], b[J] = aJ, bJ
                a[K] = part + sk * c
                b[K] = l1 * c
                pt = _make_point(red, U @ a, V @ b, l1, sk**2 / l1)
                if pt is not None:
                    points.append(pt)
    return points


def _seeds(red: PairReduction, n: int) -> np.ndarray:
    grid = np.linspace(-LAMBDA_BOX, LAMBDA_BOX, n)
    l1, l2 = np.meshgrid(grid, grid, indexing="ij")
    seeds = [np.column_stack([l1.ravel(), l2.ravel()])]
    # start just off each singular curve lambda1 * lambda2 = mu, spread along it
    mu = np.linalg.eigvalsh(red.g @ red.g.T)
    extra = []
    for m in mu:
        if m <= 1e-12:
            continue
        root = np.sqrt(m)
        for sign in (1.0, -1.0):
            for u in _HYPERBOLA_U:
                for d in _HYPERBOLA_OFFSETS:
                    extra.append((sign * root * np.exp(u) * d, sign * root * np.exp(-u)))
    if extra:
        seeds.append(np.array(extra))
    return np.concatenate(seeds)


def _dedup(points):
    kept = []
    for pt in points:
        for k, q in enumerate(kept):
            if np.max(np.abs(pt.s1 - q.s1)) < DEDUP_TOL and np.max(np.abs(pt.s2 - q.s2)) < DEDUP_TOL:
                if pt.residual < q.residual:
                    kept[k] = pt
                break
        else:
            kept.append(pt)
    return kept


def _solve(red, n):
    seeds = _seeds(red, n)
    lam, fn, _ = _kernels.newton_multistart(
        np.ascontiguousarray(red.r1), np.ascontiguousarray(red.r2), np.ascontiguousarray(red.g),
        seeds, 100, FD_STEP, 1e-15,
    )
    points = []
    for (l1, l2), f in zip(lam, fn):
        if not f < 1e-9 or l1 == 0.0 or l2 == 0.0:
            continue
        try:
            s1, s2 = _closed_form_raw(red, l1, l2)
        except np.linalg.LinAlgError:
            continue
        pt = _make_point(red, s1, s2, l1, l2)
        if pt is not None:
            points.append(pt)
    points.extend(_degenerate_points(red))
    return points


def solve_stationary(red: PairReduction, starts: int = 8) -> list[StationaryPoint]:
    """All stationary points found from a ``starts x starts`` multiplier grid.

    The result is deduplicated and sorted by value, best first. If no start
    converges, the grid is doubled once before :class:`NoStationaryPoint`
    is raised.
    """
    points = _solve(red, starts)
    if not points:
        points = _solve(red, 2 * starts)
    if not points:
        raise NoStationaryPoint("no stationary point")
    points = _dedup(points)
    points.sort(key=lambda p: -p.value)
    best = points[0].value
    close = [p for p in points[1:] if best - p.value < 1e-8]
    if close:
        log.debug("%d further stationary point(s) within 1e-8 of the best value", len(close))
    return points
