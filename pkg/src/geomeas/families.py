"""
Closed forms for the families with an explicit maximal overlap.

* W-type ``a|100> + b|010> + c|001>``: read ``a, b, c`` as triangle sides.
  If no squared coefficient exceeds 1/2 the value is ``4 R^2``, with ``R`` the
  circumradius, and the maximizers form a one-parameter family. Otherwise
  the value is the largest squared coefficient.
* ``a|000> + b|111> + c|001> + d|110>``: the value is ``(1 + |r|) / 2`` with
  ``r = a^2 + c^2 - b^2 - d^2``.
* ``cos(theta)|W> + sin(theta)|W~>``: a cubic in ``t = tan(phi)`` fixes the
  maximizing Bloch vector ``(sin 2phi, 0, cos 2phi)``, shared by both qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .stationarity import LagrangePair

__all__ = [
    "WTypeParams",
    "SymmetricParams",
    "TriangleClass",
    "heron16",
    "circumradius_sq4",
    "lambda_wtype",
    "wtype_bloch",
    "lambda_symmetric",
    "symmetric_bloch",
    "lambda_ww",
    "ww_bloch",
    "ww_reduction",
    "real_cubic_roots",
]

PARAM_TOL = 1e-12
RIGHT_TOL = 1e-12  # squared-coefficient margin that still counts as a right triangle
ROOT_EXCLUDE_TOL = 1e-9
NORTH = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class WTypeParams:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 0:
            raise ValueError("W-type coefficients must be non-negative")
        sq = self.a**2 + self.b**2 + self.c**2
        if abs(sq - 1.0) > PARAM_TOL:
            raise ValueError(f"a^2 + b^2 + c^2 = {sq!r}, expected 1")

    @classmethod
    def normalized(cls, a, b, c):
        n = math.sqrt(a * a + b * b + c * c)
        return cls(a / n, b / n, c / n)


@dataclass(frozen=True)
class SymmetricParams:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        sq = self.a**2 + self.b**2 + self.c**2 + self.d**2
        if abs(sq - 1.0) > PARAM_TOL:
            raise ValueError(f"a^2 + b^2 + c^2 + d^2 = {sq!r}, expected 1")

    @classmethod
    def normalized(cls, a, b, c, d):
        n = math.sqrt(a * a + b * b + c * c + d * d)
        return cls(a / n, b / n, c / n, d / n)


@dataclass(frozen=True)
class TriangleClass:
    """``kind`` is ``"acute_or_right"`` or ``"obtuse_or_flat"``.

    For the obtuse/flat class ``max_index`` (0, 1, 2 for a, b, c) names the
    dominant coefficient; it is ``None`` otherwise.
    """

    kind: str
    max_index: int | None = None

    @property
    def acute(self) -> bool:
        return self.kind == "acute_or_right"


# ---------------------------------------------------------------- W-type


def heron16(a: float, b: float, c: float) -> float:
    """Sixteen times the squared area of the triangle with sides a, b, c.

    Evaluated in Kahan's ordering (sides sorted descending, parentheses
    kept) so that near-flat triangles lose no precision and the result does
    not depend on the order of the arguments.
    """
    a, b, c = sorted((a, b, c), reverse=True)
    return (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))


def circumradius_sq4(a: float, b: float, c: float) -> float:
    """``4 R^2`` for the triangle with sides ``a, b, c``."""
    a, b, c = sorted((a, b, c), reverse=True)
    return 4.0 * a * a * b * b * c * c / heron16(a, b, c)


def classify_triangle(p: WTypeParams) -> TriangleClass:
    sq = (p.a**2, p.b**2, p.c**2)
    k = int(np.argmax(sq))
    if sq[k] > 0.5 + RIGHT_TOL or heron16(p.a, p.b, p.c) <= 0.0:
        return TriangleClass("obtuse_or_flat", k)
    return TriangleClass("acute_or_right")


def lambda_wtype(p: WTypeParams) -> tuple[float, TriangleClass]:
    cls = classify_triangle(p)
    if cls.acute:
        return circumradius_sq4(p.a, p.b, p.c), cls
    return max(p.a**2, p.b**2, p.c**2), cls


def _wtype_reduction_scalars(p):
    a2, b2, c2 = p.a**2, p.b**2, p.c**2
    return b2 + c2 - a2, a2 + c2 - b2, a2 + b2 - c2, 2.0 * p.a * p.b


def wtype_bloch(p: WTypeParams, phi: float = 0.0):
    """Optimal ``(s1, s2, LagrangePair)`` for qubits A, B of a W-type state.

    In the acute/right class the optimum is a one-parameter family; ``phi`` is
    the azimuth of its component perpendicular to the z axis. In the
    obtuse/flat class ``phi`` is ignored and both vectors sit on the z axis,
    pointing at the basis ket of the dominant coefficient.
    """
    r1, r2, r3, w = _wtype_reduction_scalars(p)
    cls = classify_triangle(p)
    if not cls.acute:
        z1 = -1.0 if cls.max_index == 0 else 1.0
        z2 = -1.0 if cls.max_index == 1 else 1.0
        lag = LagrangePair(z1 * (r1 - r3 * z2), z2 * (r2 - r3 * z1))
        return z1 * NORTH, z2 * NORTH, lag

    den = w * w - r3 * r3
    l1 = w * math.sqrt((w * w + r1 * r1 - r3 * r3) / (w * w + r2 * r2 - r3 * r3))
    l2 = w * w / l1
    cos_a = (l2 * r1 - r2 * r3) / den
    cos_b = (l1 * r2 - r1 * r3) / den
    for cv in (cos_a, cos_b):
        if abs(cv) > 1.0 + 1e-9:
            raise ValueError(f"inconsistent W-type parameters: cosine {cv!r} out of range")
    cos_a = min(1.0, max(-1.0, cos_a))
    cos_b = min(1.0, max(-1.0, cos_b))
    sin_a = math.sqrt(1.0 - cos_a * cos_a)
    sin_b = math.sqrt(1.0 - cos_b * cos_b)
    m = np.array([math.cos(phi), math.sin(phi), 0.0])
    s1 = cos_a * NORTH + sin_a * m
    s2 = cos_b * NORTH + sin_b * m
    return s1, s2, LagrangePair(l1, l2)


# ---------------------------------------------------------------- symmetric


def _sym_r(p: SymmetricParams) -> float:
    return p.a**2 + p.c**2 - p.b**2 - p.d**2


def lambda_symmetric(p: SymmetricParams) -> float:
    return 0.5 * (1.0 + abs(_sym_r(p)))


def symmetric_bloch(p: SymmetricParams) -> list[tuple[np.ndarray, np.ndarray]]:
    """Optimal ``(s1, s2)`` pairs; both sign choices are returned when ``r`` vanishes."""
    r = _sym_r(p)
    if abs(r) < PARAM_TOL:
        return [(NORTH.copy(), NORTH.copy()), (-NORTH, -NORTH)]
    s = NORTH if r > 0 else -NORTH
    return [(s.copy(), s.copy())]


# ---------------------------------------------------------------- W / W~


def real_cubic_roots(a: float, b: float, c: float, d: float) -> np.ndarray:
    """Real roots of ``a t^3 + b t^2 + c t + d``, ascending.

    Uses the trigonometric form when there are three real roots and Cardano's
    formula otherwise, followed by a few Newton steps on the original
    polynomial. Falls back to the quadratic when ``a`` is negligible.
    """
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if scale == 0.0:
        raise ValueError("zero polynomial")
    if abs(a) <= 1e-14 * scale:
        roots = _real_quadratic_roots(b, c, d)
    else:
        B, C, D = b / a, c / a, d / a
        p = C - B * B / 3.0
        q = 2.0 * B**3 / 27.0 - B * C / 3.0 + D
        disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
        shift = -B / 3.0
        if disc < 0.0:
            m = 2.0 * math.sqrt(-p / 3.0)
            arg = 3.0 * q / (p * m)
            theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
            roots = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) + shift for k in range(3)]
        else:
            sq = math.sqrt(disc)
            roots = [float(np.cbrt(-q / 2.0 + sq) + np.cbrt(-q / 2.0 - sq)) + shift]
        roots = [_newton_polish(a, b, c, d, t) for t in roots]
    return np.sort(np.array(roots, dtype=np.float64))


def _real_quadratic_roots(a, b, c):
    if a == 0.0:
        return [] if b == 0.0 else [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    qq = -0.5 * (b + math.copysign(sq, b)) if b != 0.0 else -0.5 * sq
    if qq == 0.0:
        return [0.0, 0.0]
    return [qq / a, c / qq]


def _newton_polish(a, b, c, d, t, steps=3):
    for _ in range(steps):
        f = ((a * t + b) * t + c) * t + d
        df = (3.0 * a * t + 2.0 * b) * t + c
        if df == 0.0:
            break
        nt = t - f / df
        if abs(((a * nt + b) * nt + c) * nt + d) > abs(f):
            break
        t = nt
    return t


def _reduce_theta(theta):
    """Map ``theta`` into ``[0, pi/2]``; returns ``(theta', reflected)``.

    ``theta`` and ``theta + pi`` differ by a global sign. For
    ``theta in (pi/2, pi)`` the state equals ``Z(x)Z(x)Z`` applied to the
    state at ``pi - theta``.
    """
    t = math.fmod(theta, math.pi)
    if t < 0.0:
        t += math.pi
    if t > math.pi / 2:
        return math.pi - t, True
    return t, False


def ww_reduction(theta: float):
    """``(r, g)`` of the A-B reduction at ``theta``; both qubits share ``r``."""
    r = np.array([2.0 * math.sin(2 * theta), 0.0, math.cos(2 * theta)]) / 3.0
    g = np.diag([2.0, 2.0, -1.0]) / 3.0
    return r, g


def _ww_candidates(theta):
    th, _ = _reduce_theta(theta)
    st, ct = math.sin(th), math.cos(th)
    roots = real_cubic_roots(st, 2.0 * ct, -2.0 * st, -ct)
    excl = -math.tan(th) if ct != 0.0 else math.inf
    r, g = ww_reduction(th)
    out = []
    for t in roots:
        if math.isfinite(excl) and abs(t - excl) < ROOT_EXCLUDE_TOL * max(1.0, abs(excl)):
            continue
        s = np.array([2.0 * t, 0.0, 1.0 - t * t]) / (1.0 + t * t)
        val = 0.25 * (1.0 + 2.0 * s @ r + s @ g @ s)
        out.append((val, float(t), s))
    return out


def lambda_ww(theta: float) -> tuple[float, float]:
    """Maximal squared overlap for ``cos(theta)|W> + sin(theta)|W~>``.

    Returns ``(lambda_sq, t)`` where ``t = tan(phi)`` is the maximizing root of
    the cubic, taken at ``theta`` reduced into ``[0, pi/2]``. Roots whose values
    tie within ``1e-12`` are resolved towards the larger ``t``.
    """
    cands = _ww_candidates(theta)
    best = max(v for v, _, _ in cands)
    t = max(t for v, t, _ in cands if v >= best - 1e-12)
    return float(best), t


def ww_bloch(theta: float) -> np.ndarray:
    """Shared optimal Bloch vector of qubits A and B at ``theta`` itself."""
    _, reflected = _reduce_theta(theta)
    _, t = lambda_ww(theta)
    s = np.array([2.0 * t, 0.0, 1.0 - t * t]) / (1.0 + t * t)
    if reflected:
        s[0] = -s[0]
    return s
