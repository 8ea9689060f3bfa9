"""
Nearest product states and the geometric measure ``E_g = 1 - lambda_sq``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .families import (
    SymmetricParams,
    WTypeParams,
    lambda_symmetric,
    lambda_ww,
    lambda_wtype,
    symmetric_bloch,
    ww_bloch,
    wtype_bloch,
    _reduce_theta,
)
from .oracle import OracleConfig, oracle_maximize
from .stationarity import NoStationaryPoint, solve_stationary
from .states import (
    ProductState,
    PureState3,
    bloch_to_state,
    overlap_sq,
    pair_reduction,
    state_to_bloch,
)

__all__ = ["MeasureResult", "third_qubit", "detect_family", "measure", "POLICIES", "METHODS"]

POLICIES = ("auto", "analytic_only", "stationary", "oracle")
METHODS = ("analytic_wtype", "analytic_symmetric", "analytic_ww", "stationary", "oracle")
SUPPORT_TOL = 1e-12
AGREEMENT_TOL = 1e-6

_WTYPE = (0b100, 0b010, 0b001)
_SYMMETRIC = (0b000, 0b111, 0b001, 0b110)
_WTILDE = (0b011, 0b101, 0b110)


@dataclass
class MeasureResult:
    lambda_sq: float
    nearest: list[ProductState]
    method: str
    degenerate: bool = False
    family_param: dict | None = None
    flags: list[str] = field(default_factory=list)

    @property
    def e_g(self) -> float:
        return 1.0 - self.lambda_sq

    def to_dict(self) -> dict:
        def qubit(q):
            return [[float(z.real), float(z.imag)] for z in q]

        return {
            "lambda_sq": float(self.lambda_sq),
            "e_g": float(self.e_g),
            "method": self.method,
            "degenerate": bool(self.degenerate),
            "family_param": self.family_param,
            "nearest": [
                {
                    "q1": qubit(p.q1),
                    "q2": qubit(p.q2),
                    "q3": qubit(p.q3),
                    "bloch": [[float(x) for x in s] for s in p.bloch()],
                }
                for p in self.nearest
            ],
            "flags": list(self.flags),
        }


def third_qubit(state: PureState3, q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Best third factor for fixed ``q1, q2``: the normalized contraction ``<q1 q2|psi>``."""
    v = np.einsum("i,j,ijk->k", np.conj(q1), np.conj(q2), state.tensor)
    n = np.linalg.norm(v)
    if n < 1e-14:
        raise ValueError("orthogonal pair")
    s = state_to_bloch(v / n)
    return bloch_to_state(s / np.linalg.norm(s))


def _product_from_bloch(state, s1, s2) -> ProductState:
    q1 = bloch_to_state(s1 / np.linalg.norm(s1))
    q2 = bloch_to_state(s2 / np.linalg.norm(s2))
    return ProductState(q1, q2, third_qubit(state, q1, q2))


def detect_family(state: PureState3):
    """Recognize the analytically solved families.

    Returns ``(name, params)`` with ``name`` in ``{"wtype", "symmetric", "ww"}``
    or ``None``. The global phase is fixed by rotating the largest amplitude
    to the positive real axis; amplitudes below ``1e-12`` count as absent.
    """
    amp = state.amp
    k = int(np.argmax(np.abs(amp)))
    a = amp * (abs(amp[k]) / amp[k])
    support = set(np.flatnonzero(np.abs(a) > SUPPORT_TOL).tolist())
    real = bool(np.all(np.abs(a.imag) <= SUPPORT_TOL))

    if support <= set(_WTYPE) and real and np.all(a.real[list(_WTYPE)] >= -SUPPORT_TOL):
        return "wtype", WTypeParams.normalized(*(max(a.real[i], 0.0) for i in _WTYPE))
    if support <= set(_SYMMETRIC):
        return "symmetric", SymmetricParams.normalized(*(abs(a[i]) for i in _SYMMETRIC))
    if support <= set(_WTYPE) | set(_WTILDE) and real:
        w, v = a.real[list(_WTYPE)], a.real[list(_WTILDE)]
        if np.ptp(w) <= 1e-10 and np.ptp(v) <= 1e-10:
            return "ww", math.atan2(float(v.mean()), float(w.mean()))
    return None


def _azimuth_family(n):
    return {
        "qubits": "AB",
        "axis": [0.0, 0.0, 1.0],
        "azimuth_range": [0.0, 2.0 * math.pi],
        "samples": n,
    }


def _rotate_z(s, phi):
    c, si = math.cos(phi), math.sin(phi)
    return np.array([c * s[0] - si * s[1], si * s[0] + c * s[1], s[2]])


def _analytic(state, fam, samples) -> MeasureResult:
    name, params = fam
    if name == "wtype":
        lam, cls = lambda_wtype(params)
        s1, s2, _ = wtype_bloch(params, 0.0)
        # the family collapses to a point on the z axis for right triangles
        spread = cls.acute and max(np.hypot(s1[0], s1[1]), np.hypot(s2[0], s2[1])) > 1e-9
        if spread:
            phis = 2.0 * math.pi * np.arange(samples) / samples
            nearest = [_product_from_bloch(state, *wtype_bloch(params, p)[:2]) for p in phis]
            return MeasureResult(lam, nearest, "analytic_wtype", True, _azimuth_family(samples))
        return MeasureResult(lam, [_product_from_bloch(state, s1, s2)], "analytic_wtype")
    if name == "symmetric":
        lam = lambda_symmetric(params)
        nearest = [_product_from_bloch(state, s1, s2) for s1, s2 in symmetric_bloch(params)]
        return MeasureResult(lam, nearest, "analytic_symmetric")
    theta = params
    lam, _ = lambda_ww(theta)
    s = ww_bloch(theta)
    reduced, _ = _reduce_theta(theta)
    if abs(math.sin(2.0 * reduced)) < 1e-12 and np.hypot(s[0], s[1]) > 1e-9:
        phis = 2.0 * math.pi * np.arange(samples) / samples
        nearest = [_product_from_bloch(state, _rotate_z(s, p), _rotate_z(s, p)) for p in phis]
        return MeasureResult(lam, nearest, "analytic_ww", True, _azimuth_family(samples))
    return MeasureResult(lam, [_product_from_bloch(state, s, s)], "analytic_ww")


def _stationary(state) -> MeasureResult:
    points = solve_stationary(pair_reduction(state, "AB"))
    best = points[0]
    tied = [p for p in points if best.value - p.value < 1e-9]
    nearest = [_product_from_bloch(state, p.s1, p.s2) for p in tied]
    return MeasureResult(best.value, nearest, "stationary", best.degenerate)


def _oracle(state, cfg) -> MeasureResult:
    res = oracle_maximize(state, cfg)
    flags = ["oracle_multimodal"] if res.multimodal else []
    return MeasureResult(res.lambda_sq, [res.product], "oracle", flags=flags)


def measure(
    state: PureState3,
    policy: str = "auto",
    family_samples: int = 12,
    oracle_cfg: OracleConfig | None = None,
) -> MeasureResult:
    """Geometric measure of ``state`` together with its nearest product state(s).

    ``policy`` is one of ``auto`` (closed form when the state belongs to a
    solved family, else the stationarity solver cross-checked against the
    oracle), ``analytic_only`` (alias ``analytic``), ``stationary`` or
    ``oracle``. A stationarity failure falls back to the oracle. If the two
    disagree by more than ``1e-6`` the result carries a
    ``method_disagreement`` flag and the oracle value is reported.
    """
    if policy == "analytic":
        policy = "analytic_only"
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}, got {policy!r}")
    if not state.is_normalized():
        raise ValueError(f"state is not normalized (norm^2 = {state.norm**2!r})")
    if family_samples < 1:
        raise ValueError("family_samples must be >= 1")

    if policy == "oracle":
        result = _oracle(state, oracle_cfg)
    elif policy in ("auto", "analytic_only") and (fam := detect_family(state)) is not None:
        result = _analytic(state, fam, family_samples)
    elif policy == "analytic_only":
        raise ValueError("state is not in an analytically solved family")
    else:
        try:
            result = _stationary(state)
        except NoStationaryPoint:
            result = _oracle(state, oracle_cfg)
            result.flags.append("stationary_failed")
        else:
            if policy == "auto":
                check = _oracle(state, oracle_cfg)
                if abs(check.lambda_sq - result.lambda_sq) > AGREEMENT_TOL:
                    check.flags.append("method_disagreement")
                    result = check
    result.lambda_sq = min(float(result.lambda_sq), 1.0)
    return result
