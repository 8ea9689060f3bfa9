"""
Three-qubit pure states, single-qubit Bloch algebra and two-qubit reductions.

Basis ket ``|q1 q2 q3>`` lives at index ``4*q1 + 2*q2 + q3`` so qubit A is the
most significant bit. Single-qubit states are complex arrays of shape ``(2,)``
and Bloch vectors are real arrays of shape ``(3,)``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "PAULI",
    "NullStateError",
    "NotNormalizedError",
    "PureState3",
    "PairReduction",
    "ProductState",
    "normalize",
    "overlap_sq",
    "pair_reduction",
    "overlap_form",
    "bloch_to_state",
    "state_to_bloch",
    "w_state",
    "wtilde_state",
    "ghz_state",
    "wtype_state",
    "symmetric_state",
    "ww_state",
    "parse_state_literal",
    "load_state",
    "state_to_json",
    "state_from_json",
    "random_state",
    "random_qubit",
]

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)

IMAG_TOL = 1e-12
NORM_TOL = 1e-12
BLOCH_TOL = 1e-10

# which tensor axes are kept (in order) and which one is traced out
_PAIR_AXES = {"AB": (0, 1, 2), "AC": (0, 2, 1), "BC": (1, 2, 0)}


class NullStateError(ValueError):
    """Raised when a state vector has zero norm."""


class NotNormalizedError(ValueError):
    """Raised in strict mode for inputs that are not unit vectors."""


@dataclass(frozen=True, eq=False)
class PureState3:
    """Eight complex amplitudes of a three-qubit pure state."""

    amp: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amp, dtype=np.complex128).reshape(-1)
        if amp.shape != (8,):
            raise ValueError(f"expected 8 amplitudes, got {amp.size}")
        if not np.all(np.isfinite(amp)):
            raise ValueError("amplitudes must be finite")
        amp.setflags(write=False)
        object.__setattr__(self, "amp", amp)

    @property
    def tensor(self) -> np.ndarray:
        """Amplitudes as a ``(2, 2, 2)`` tensor indexed ``[qA, qB, qC]``."""
        return self.amp.reshape(2, 2, 2)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm**2 - 1.0) <= tol

    def __repr__(self):
        return f"PureState3({np.array2string(self.amp, precision=6)})"


class ProductState(NamedTuple):
    """Product state ``|q1> (x) |q2> (x) |q3>``; each factor has shape ``(2,)``."""

    q1: np.ndarray
    q2: np.ndarray
    q3: np.ndarray

    def vector(self) -> np.ndarray:
        return np.kron(np.kron(self.q1, self.q2), self.q3)

    def bloch(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return state_to_bloch(self.q1), state_to_bloch(self.q2), state_to_bloch(self.q3)


@dataclass(frozen=True, eq=False)
class PairReduction:
    """Bloch data of a two-qubit reduced density matrix.

    ``r1`` and ``r2`` are the Bloch vectors of the two kept qubits and
    ``g[i, j] = tr(rho sigma_i (x) sigma_j)`` is their correlation matrix; the
    row index belongs to the first kept qubit.
    """

    r1: np.ndarray
    r2: np.ndarray
    g: np.ndarray
    pair: str = "AB"


def normalize(state: PureState3) -> PureState3:
    """Rescale to unit norm by a positive real factor; the global phase is kept."""
    n = state.norm
    if n == 0.0:
        raise NullStateError("null state")
    return PureState3(state.amp / n)


def _require_normalized(state: PureState3):
    if not state.is_normalized():
        raise ValueError(f"state is not normalized (norm^2 = {state.norm**2!r})")


def overlap_sq(state: PureState3, prod: ProductState) -> float:
    """Squared overlap ``|<q1 q2 q3|psi>|^2``; all inputs must be normalized."""
    _require_normalized(state)
    for q in prod:
        if abs(np.vdot(q, q).real - 1.0) > NORM_TOL:
            raise ValueError("product factors must be normalized")
    amp = np.einsum("i,j,k,ijk->", prod.q1.conj(), prod.q2.conj(), prod.q3.conj(), state.tensor)
    return float(abs(amp) ** 2)


def _strip_imag(x: np.ndarray, what: str) -> np.ndarray:
    residue = float(np.max(np.abs(x.imag))) if x.size else 0.0
    if residue >= IMAG_TOL:
        raise RuntimeError(f"{what} has imaginary residue {residue:.3e}")
    return np.ascontiguousarray(x.real)


def reduced_density_matrix(state: PureState3, pair: str = "AB") -> np.ndarray:
    """Two-qubit reduced density matrix of ``pair`` as a 4x4 array."""
    try:
        axes = _PAIR_AXES[pair]
    except KeyError:
        raise ValueError(f"pair must be one of {sorted(_PAIR_AXES)}, got {pair!r}") from None
    m = state.tensor.transpose(axes).reshape(4, 2)
    return m @ m.conj().T


def pair_reduction(state: PureState3, pair: str = "AB") -> PairReduction:
    """Extract ``(r1, r2, g)`` from the reduced density matrix of ``pair``.

    Imaginary parts of the defining traces are checked against ``1e-12``
    and dropped.
    """
    _require_normalized(state)
    rho = reduced_density_matrix(state, pair).reshape(2, 2, 2, 2)
    rho_x = np.einsum("ijkj->ik", rho)
    rho_y = np.einsum("ijil->jl", rho)
    r1 = np.einsum("ik,aki->a", rho_x, PAULI)
    r2 = np.einsum("jl,blj->b", rho_y, PAULI)
    g = np.einsum("ijkl,aki,blj->ab", rho, PAULI, PAULI)
    return PairReduction(
        r1=_strip_imag(r1, "r1"),
        r2=_strip_imag(r2, "r2"),
        g=_strip_imag(g, "g"),
        pair=pair,
    )


def _check_unit(s: np.ndarray, name: str) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    if abs(float(s @ s) - 1.0) > BLOCH_TOL:
        raise ValueError(f"{name} is not a unit Bloch vector (|s| = {np.linalg.norm(s)!r})")
    return s


def overlap_form(red: PairReduction, s1: np.ndarray, s2: np.ndarray) -> float:
    """``(1 + s1.r1 + s2.r2 + s1.g.s2) / 4`` for unit Bloch vectors ``s1, s2``."""
    s1 = _check_unit(s1, "s1")
    s2 = _check_unit(s2, "s2")
    return 0.25 * (1.0 + s1 @ red.r1 + s2 @ red.r2 + s1 @ red.g @ s2)


def bloch_to_state(s: np.ndarray) -> np.ndarray:
    """Pure qubit state with Bloch vector ``s``.

    The ``|0>`` amplitude is real and non-negative; at the south pole the
    result is exactly ``|1>``.
    """
    x, y, z = _check_unit(s, "s")
    if z >= 0.0:
        a0 = math.sqrt((1.0 + z) / 2.0)
        a1 = complex(x, y) / (2.0 * a0)
    else:
        m1 = math.sqrt((1.0 - z) / 2.0)
        a0 = math.hypot(x, y) / (2.0 * m1)
        a1 = m1 * np.exp(1j * math.atan2(y, x)) if a0 > 0.0 else complex(m1)
    q = np.array([a0, a1], dtype=np.complex128)
    return q / np.linalg.norm(q)


def state_to_bloch(q: np.ndarray) -> np.ndarray:
    """Bloch vector ``tr(|q><q| sigma)`` of a normalized qubit state."""
    a0, a1 = np.asarray(q, dtype=np.complex128)
    c = np.conj(a0) * a1
    return np.array([2.0 * c.real, 2.0 * c.imag, abs(a0) ** 2 - abs(a1) ** 2])


# ---------------------------------------------------------------- families


def _from_support(values: dict[int, complex]) -> PureState3:
    amp = np.zeros(8, dtype=np.complex128)
    for idx, v in values.items():
        amp[idx] = v
    return PureState3(amp)


def w_state() -> PureState3:
    return wtype_state(1.0, 1.0, 1.0)


def wtilde_state() -> PureState3:
    return normalize(_from_support({0b011: 1.0, 0b101: 1.0, 0b110: 1.0}))


def ghz_state() -> PureState3:
    return symmetric_state(1.0, 1.0, 0.0, 0.0)


def wtype_state(a: float, b: float, c: float) -> PureState3:
    """``a|100> + b|010> + c|001>``, rescaled to unit norm."""
    return normalize(_from_support({0b100: a, 0b010: b, 0b001: c}))


def symmetric_state(a: float, b: float, c: float, d: float) -> PureState3:
    """``a|000> + b|111> + c|001> + d|110>``, rescaled to unit norm."""
    return normalize(_from_support({0b000: a, 0b111: b, 0b001: c, 0b110: d}))


def ww_state(theta: float) -> PureState3:
    """``cos(theta)|W> + sin(theta)|W~>``."""
    w = math.cos(theta) / math.sqrt(3.0)
    v = math.sin(theta) / math.sqrt(3.0)
    return PureState3(np.array([0, w, w, v, w, v, v, 0], dtype=np.complex128))


_LITERAL = re.compile(r"^\s*([A-Za-z_]+)\s*(?:\((.*)\))?\s*$")
_FAMILIES = {
    "w": (w_state, 0),
    "wtilde": (wtilde_state, 0),
    "ghz": (ghz_state, 0),
    "wtype": (wtype_state, 3),
    "symmetric": (symmetric_state, 4),
    "ww": (ww_state, 1),
}


def parse_state_literal(text: str, strict: bool = False) -> PureState3:
    """Build a state from a family literal such as ``"wtype(1,2,3)"`` or ``"GHZ"``.

    Coefficients are rescaled to unit norm unless ``strict`` is set, in which
    case coefficient vectors whose squared norm differs from 1 by more than
    ``1e-12`` are rejected.
    """
    m = _LITERAL.match(text)
    if m is None:
        raise ValueError(f"cannot parse state literal {text!r}")
    name, args = m.group(1).lower(), m.group(2)
    if name not in _FAMILIES:
        raise ValueError(f"unknown family {m.group(1)!r}; expected one of {sorted(_FAMILIES)}")
    ctor, nargs = _FAMILIES[name]
    values = [] if args is None or not args.strip() else [float(v) for v in args.split(",")]
    if len(values) != nargs:
        raise ValueError(f"{name} takes {nargs} parameter(s), got {len(values)}")
    if strict and name in ("wtype", "symmetric"):
        sq = sum(v * v for v in values)
        if abs(sq - 1.0) > NORM_TOL:
            raise NotNormalizedError(f"coefficients of {text!r} are not normalized (sum of squares {sq!r})")
    return ctor(*values)


def state_to_json(state: PureState3) -> str:
    return json.dumps({"amps": [[float(z.real), float(z.imag)] for z in state.amp]})


def state_from_json(text: str) -> PureState3:
    """Parse ``{"amps": [[re, im], ... x8]}``."""
    data = json.loads(text)
    if not isinstance(data, dict) or "amps" not in data:
        raise ValueError('state JSON must be an object with an "amps" key')
    amps = data["amps"]
    if not isinstance(amps, list) or len(amps) != 8:
        raise ValueError('"amps" must hold exactly 8 [re, im] pairs')
    out = []
    for pair in amps:
        if not isinstance(pair, list) or len(pair) != 2:
            raise ValueError('each amplitude must be a [re, im] pair')
        re_, im_ = pair
        if isinstance(re_, bool) or isinstance(im_, bool):
            raise ValueError("amplitude entries must be numbers")
        out.append(complex(float(re_), float(im_)))
    return PureState3(np.array(out))


def load_state(source: str, strict: bool = False) -> PureState3:
    """Load a state from a JSON file path, or parse it as a family literal."""
    import os

    if os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            return state_from_json(fh.read())
    return parse_state_literal(source, strict=strict)


def random_state(rng: np.random.Generator) -> PureState3:
    """Haar-random three-qubit state."""
    z = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    return PureState3(z / np.linalg.norm(z))


def random_qubit(rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return z / np.linalg.norm(z)
