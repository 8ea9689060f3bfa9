"""
Brute-force maximization of the overlap with product states.

The search never touches the Bloch-vector reduction used by the analytic and
stationarity solvers. It works on the state tensor directly. For a fixed
pair of factors on qubits A and B, the best factor on qubit C is the
normalized partial contraction ``<q1 q2|psi>``, so the search runs over the
two remaining Bloch spheres only. A coarse grid over both spheres, together
with seeded random restarts, feeds alternating single-qubit updates. The
best candidate then gets a short second-order polish.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .states import (
    PureState3,
    ProductState,
    bloch_to_state,
    state_to_bloch,
    _require_normalized,
)

__all__ = [
    "OracleConfig",
    "OracleResult",
    "oracle_maximize",
    "oracle_scan_family",
    "projected_third_matrix",
    "eliminate_third",
    "sphere_grid",
]

log = logging.getLogger(__name__)

DEFAULT_SEED = 0x5EED
MONOTONE_TOL = 1e-13


@dataclass(frozen=True)
class OracleConfig:
    """Search budget for :func:`oracle_maximize`.

    ``coarse_grid`` is the number of points per polar/azimuthal angle on each
    of the two Bloch spheres. ``grid_seeds`` is how many of the best grid
    cells get refined besides the ``restarts`` random starting points.
    """

    coarse_grid: int = 24
    refine_iters: int = 200
    restarts: int = 32
    tol: float = 1e-12
    seed: int = DEFAULT_SEED
    grid_seeds: int = 4
    polish: bool = True

    def __post_init__(self):
        for name in ("coarse_grid", "refine_iters", "restarts", "grid_seeds"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class OracleResult:
    lambda_sq: float
    product: ProductState
    multimodal: bool = False
    restart_values: np.ndarray = field(default=None, repr=False)

    def __iter__(self):
        # allows ``lam, prod = oracle_maximize(...)``
        return iter((self.lambda_sq, self.product))


def sphere_grid(n: int) -> np.ndarray:
    """``n * n`` qubit spinors on a polar x azimuthal grid, poles included."""
    theta = np.linspace(0.0, np.pi, n)
    phi = 2.0 * np.pi * np.arange(n) / n
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    q = np.empty((n * n, 2), dtype=np.complex128)
    q[:, 0] = np.cos(th.ravel() / 2)
    q[:, 1] = np.exp(1j * ph.ravel()) * np.sin(th.ravel() / 2)
    return q


def projected_third_matrix(state: PureState3, q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """``tr_AB(rho (|q1><q1| (x) |q2><q2| (x) 1))`` built from density matrices.

    The result is a 2x2 Hermitian matrix on qubit C of rank at most one.
    """
    psi = state.amp
    rho = np.outer(psi, psi.conj()).reshape(2, 2, 2, 2, 2, 2)
    p1 = np.outer(q1, q1.conj())
    p2 = np.outer(q2, q2.conj())
    # tr_AB[(P1 (x) P2 (x) 1) rho] -> indices (k, k') on qubit C
    return np.einsum("ai,bj,ijkabl->kl", p1, p2, rho)


def eliminate_third(state: PureState3, q1: np.ndarray, q2: np.ndarray) -> tuple[float, np.ndarray]:
    """Maximum over the third factor, by diagonalizing the projected matrix.

    Returns the nonzero eigenvalue and its eigenvector. The other eigenvalue
    must vanish; a magnitude above ``1e-12`` raises ``RuntimeError``.
    """
    m = projected_third_matrix(state, q1, q2)
    w, v = np.linalg.eigh(m)
    if abs(w[0]) >= 1e-12:
        raise RuntimeError(f"projected third-qubit matrix has rank 2 (eigenvalue {w[0]:.3e})")
    return float(w[1]), v[:, 1]


def _contract_third(T, q1, q2):
    return np.einsum("...i,...j,ijk->...k", q1.conj(), q2.conj(), T)


def _unit_rows(v):
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return np.where(n > 0, v / np.where(n > 0, n, 1.0), np.array([1.0, 0.0]))


def _perp(q):
    return np.array([-np.conj(q[1]), np.conj(q[0])])


def _chart(q, z):
    # exp-map style chart around q: z complex offsets, shape (m,)
    r = np.abs(z)
    sinc = np.where(r > 0, np.sin(r) / np.where(r > 0, r, 1.0), 1.0)
    return np.cos(r)[:, None] * q[None, :] + (sinc * z)[:, None] * _perp(q)[None, :]


_H = 1e-4
_OFFSETS = [np.zeros(4)]
for _i in range(4):
    for _s in (1.0, -1.0):
        e = np.zeros(4)
        e[_i] = _s * _H
        _OFFSETS.append(e)
for _i in range(4):
    for _j in range(_i + 1, 4):
        for _si in (1.0, -1.0):
            for _sj in (1.0, -1.0):
                e = np.zeros(4)
                e[_i], e[_j] = _si * _H, _sj * _H
                _OFFSETS.append(e)
_OFFSETS = np.array(_OFFSETS)


def _chart_values(T, q1, q2, x):
    z1 = x[:, 0] + 1j * x[:, 1]
    z2 = x[:, 2] + 1j * x[:, 3]
    v = _contract_third(T, _chart(q1, z1), _chart(q2, z2))
    return (v.real**2 + v.imag**2).sum(-1)


def _derivatives(T, q1, q2):
    f = _chart_values(T, q1, q2, _OFFSETS)
    f0 = f[0]
    grad = np.empty(4)
    hess = np.empty((4, 4))
    for i in range(4):
        fp, fm = f[1 + 2 * i], f[2 + 2 * i]
        grad[i] = (fp - fm) / (2 * _H)
        hess[i, i] = (fp - 2 * f0 + fm) / _H**2
    k = 9
    for i in range(4):
        for j in range(i + 1, 4):
            fpp, fpm, fmp, fmm = f[k : k + 4]
            hess[i, j] = hess[j, i] = (fpp - fpm - fmp + fmm) / (4 * _H**2)
            k += 4
    return f0, grad, hess


def _try_move(T, q1, q2, f0, step):
    """Move to ``step`` in the chart if the value does not drop; returns ``(moved, f, q1, q2)``."""
    x = step[None, :]
    ft = float(_chart_values(T, q1, q2, x)[0])
    if ft < f0:
        return False, f0, q1, q2
    q1 = _chart(q1, np.array([step[0] + 1j * step[1]]))[0]
    q2 = _chart(q2, np.array([step[2] + 1j * step[3]]))[0]
    return True, ft, q1 / np.linalg.norm(q1), q2 / np.linalg.norm(q2)


def _escape(T, q1, q2, f0, direction):
    # saddle escape along an ascent-curvature direction, largest step first
    alpha = 0.5
    while alpha > 1e-4:
        for sign in (1.0, -1.0):
            step = sign * alpha * direction
            if float(_chart_values(T, q1, q2, step[None, :])[0]) > f0:
                return _try_move(T, q1, q2, f0, step)
        alpha *= 0.5
    return False, f0, q1, q2


def _polish(T, q1, q2, max_iter=40):
    """Eigen-filtered Newton ascent in a chart around ``(q1, q2)``; never decreases.

    Newton steps use only the negative-curvature eigendirections. When none
    is left but some curvature is positive, the point is a saddle and a
    line probe along that direction is tried instead.
    """
    f0 = float(_chart_values(T, q1, q2, np.zeros((1, 4)))[0])
    escapes = 0
    for _ in range(max_iter):
        _, grad, hess = _derivatives(T, q1, q2)
        w, v = np.linalg.eigh(hess)
        thr = 1e-6 * max(1.0, np.abs(w).max())
        coef = v.T @ grad
        step = np.zeros(4)
        for k in range(4):
            if w[k] < -thr:
                step -= coef[k] / w[k] * v[:, k]
        norm = np.linalg.norm(step)
        if norm < 1e-10:
            if w[-1] > thr and escapes < 4:
                escapes += 1
                moved, f0, q1, q2 = _escape(T, q1, q2, f0, v[:, -1])
                if moved:
                    continue
            break
        if norm > 0.5:
            step *= 0.5 / norm
        t = 1.0
        moved = False
        for _ls in range(12):
            before = f0
            moved, f0, q1, q2 = _try_move(T, q1, q2, f0, t * step)
            if moved:
                break
            t *= 0.5
        if not moved or (t * norm < 1e-10 and f0 - before < 1e-15):
            break
    return f0, q1, q2


def _canonical_product(T, q1, q2) -> ProductState:
    q1 = bloch_to_state(_clip_unit(state_to_bloch(q1)))
    q2 = bloch_to_state(_clip_unit(state_to_bloch(q2)))
    v = _contract_third(T, q1, q2)
    q3 = bloch_to_state(_clip_unit(state_to_bloch(v / np.linalg.norm(v))))
    return ProductState(q1, q2, q3)


def _clip_unit(s):
    return s / np.linalg.norm(s)


def _top_cells(flat, k):
    # k largest entries; the lowest cell index wins ties
    k = min(k, flat.size)
    kth = np.partition(flat, flat.size - k)[flat.size - k]
    cand = np.flatnonzero(flat >= kth)
    order = np.lexsort((cand, -flat[cand]))
    return cand[order[:k]]


def _random_qubits(rng, n):
    z = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def oracle_maximize(state: PureState3, cfg: OracleConfig | None = None) -> OracleResult:
    """Maximal squared overlap of ``state`` with any product state, by search.

    The result unpacks as ``(lambda_sq, product)``. ``multimodal`` is set when
    the random restarts ended on values more than ``1e-9`` apart.
    """
    cfg = cfg or OracleConfig()
    _require_normalized(state)
    T = np.ascontiguousarray(state.tensor)

    grid = sphere_grid(cfg.coarse_grid)
    vals = _kernels.grid_values(T, grid, grid)
    ia, ib = np.unravel_index(_top_cells(vals.ravel(), cfg.grid_seeds), vals.shape)

    rng = np.random.default_rng(cfg.seed)
    rq1 = _random_qubits(rng, cfg.restarts)
    rq2 = _random_qubits(rng, cfg.restarts)

    Q1 = np.concatenate([grid[ia], rq1])
    Q2 = np.concatenate([grid[ib], rq2])
    Q3 = _unit_rows(_contract_third(T, Q1, Q2))

    out, Q1, Q2, Q3, _, worst = _kernels.als_sweeps(T, Q1, Q2, Q3, cfg.refine_iters, cfg.tol)
    if worst.min() < -MONOTONE_TOL:
        raise AssertionError(f"alternating refinement decreased the overlap by {-worst.min():.3e}")

    best = int(np.argmax(out))
    value, q1, q2 = float(out[best]), Q1[best], Q2[best]
    if cfg.polish:
        polished, p1, p2 = _polish(T, q1, q2)
        if polished < value - MONOTONE_TOL:
            raise AssertionError("polish decreased the overlap")
        if polished >= value:
            value, q1, q2 = polished, p1, p2

    restart_vals = out[cfg.grid_seeds :]
    multimodal = bool(restart_vals.max() - restart_vals.min() > 1e-9)
    if multimodal:
        log.debug("oracle restarts disagree: spread %.3e", restart_vals.max() - restart_vals.min())
    product = _canonical_product(T, q1, q2)
    return OracleResult(min(value, 1.0), product, multimodal, restart_vals)


def oracle_scan_family(family: str, params, cfg: OracleConfig | None = None):
    """Oracle values over a list of family parameter tuples.

    ``family`` is one of ``"wtype"``, ``"symmetric"``, ``"ww"``. Returns a list
    of ``(params, lambda_sq)`` rows in input order.
    """
    from .states import wtype_state, symmetric_state, ww_state

    ctors = {"wtype": wtype_state, "symmetric": symmetric_state, "ww": ww_state}
    if family not in ctors:
        raise ValueError(f"unknown family {family!r}")
    ctor = ctors[family]
    rows = []
    for p in params:
        p = tuple(np.atleast_1d(p).tolist())
        rows.append((p, oracle_maximize(ctor(*p), cfg).lambda_sq))
    return rows
