"""Balance-sheet calibration and distress-propagation weights.

Per node: balance B = beta * max(borrowed, lent), reserve E = eta * B,
rescue-fund contribution F = alpha * E. A loan from lender j to
borrower i induces a propagation edge i -> j (a distressed borrower
damages its lenders) with weight A[j, i] / E[j].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError, ParameterError
from .network import FinancialNetwork, node_strengths

ETA_PRACTICAL_MAX = 0.05  # customary upper end of reserve requirements
BETA_PRACTICAL_RANGE = (4.0, 20.0)


@dataclass(frozen=True)
class CalibrationParams:
    """Scalar knobs: balance multiplier, reserve fraction, fund tax rate."""

    beta: float
    eta: float
    alpha: float

    def __post_init__(self):
        if not np.isfinite(self.beta) or self.beta <= 0:
            raise ParameterError(f"beta must be positive, got {self.beta}")
        if not np.isfinite(self.eta) or self.eta < 0:
            raise ParameterError(f"eta must be nonnegative, got {self.eta}")
        if not np.isfinite(self.alpha) or not 0.0 <= self.alpha <= 1.0:
            raise ParameterError(f"alpha must be in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class CalibratedNetwork:
    """Network plus derived per-node balance, reserve and fund vectors."""

    net: FinancialNetwork
    balance: np.ndarray
    reserve: np.ndarray
    fund_contribution: np.ndarray
    params: CalibrationParams

    @property
    def total_fund(self) -> float:
        return float(np.sum(self.fund_contribution))

    def external_assets(self) -> np.ndarray:
        """Assets held outside the money market: D = B - lent - E."""
        out_strength = node_strengths(self.net).out_strength
        return self.balance - out_strength - self.reserve


@dataclass(frozen=True)
class PropagationWeights:
    """Distress-propagation edges in canonical (src, dst) order.

    ``loss[k]`` is the underlying exposure A[dst, src]; ``weight[k]`` is
    loss / reserve[dst], with the zero-reserve convention below.
    """

    src: np.ndarray  # distressed borrower
    dst: np.ndarray  # its lender
    loss: np.ndarray
    weight: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.src)


def edge_weight(loss: float, reserve: float) -> float:
    """Weight of one propagation edge.

    A zero reserve means any positive loss defaults the lender, so the
    weight is +inf (the distress update caps it at 1). A zero loss
    (fully compensated exposure) propagates nothing.
    """
    if loss <= 0.0:
        return 0.0
    if reserve == 0.0:
        return np.inf
    return loss / reserve


def calibrate(net: FinancialNetwork, params: CalibrationParams) -> CalibratedNetwork:
    """Derive balances, reserves and fund contributions from strengths.

    Fails when any node would end up with negative external assets,
    i.e. beta is too small for that node's money-market concentration.
    """
    strengths = node_strengths(net)
    balance = params.beta * np.maximum(strengths.in_strength, strengths.out_strength)
    reserve = params.eta * balance
    fund = params.alpha * reserve
    external = balance - strengths.out_strength - reserve
    bad = np.flatnonzero(external < 0)
    if bad.size:
        node = net.nodes[bad[0]]
        raise CalibrationError(
            f"node {node!r} has negative external assets "
            f"(D={external[bad[0]]:.6g}); beta={params.beta} is too small "
            "for its money-market concentration"
        )
    return CalibratedNetwork(net, balance, reserve, fund, params)


def propagation_weights(cal: CalibratedNetwork) -> PropagationWeights:
    """One propagation edge per loan, reversed relative to the loan."""
    edges = sorted((j, i, amount) for (i, j), amount in cal.net.loans.items())
    src = np.array([e[0] for e in edges], dtype=np.int64)
    dst = np.array([e[1] for e in edges], dtype=np.int64)
    loss = np.array([e[2] for e in edges], dtype=np.float64)
    weight = np.array(
        [edge_weight(e[2], float(cal.reserve[e[1]])) for e in edges],
        dtype=np.float64,
    )
    return PropagationWeights(src, dst, loss, weight)
