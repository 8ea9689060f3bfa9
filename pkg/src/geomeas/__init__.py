"""Geometric measure of entanglement for three-qubit pure states."""

from ._kernels import BACKEND_NAME
from .families import (
    SymmetricParams,
    WTypeParams,
    lambda_symmetric,
    lambda_ww,
    lambda_wtype,
    wtype_bloch,
)
from .nearest import MeasureResult, measure, third_qubit
from .oracle import OracleConfig, oracle_maximize
from .stationarity import LagrangePair, StationaryPoint, closed_form_s, detect_degenerate, solve_stationary
from .states import (
    PairReduction,
    ProductState,
    PureState3,
    bloch_to_state,
    ghz_state,
    normalize,
    overlap_form,
    overlap_sq,
    pair_reduction,
    parse_state_literal,
    symmetric_state,
    w_state,
    wtilde_state,
    wtype_state,
    ww_state,
)

__version__ = "0.1.0"
