"""Networked LTI systems: node transfer functions coupled through ``f(s) L``.

The closed loop is ``y = G(s) (u - f(s) L y)`` with ``G = diag(g_i)``, so the
input-output map is ``T_yu(s) = (G^{-1}(s) + f(s) L)^{-1}``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidConfig, PoleAtPoint, SingularAtPoint, ZeroFunction
from .graph import check_laplacian, graph_from_json, graph_to_json
from .polyrat import RationalFunction, rf_add, rf_eval, rf_reciprocal

log = logging.getLogger(__name__)

COND_WARN = 1e12


@dataclass(frozen=True)
class GeneratorParams:
    """Inertia ``m``, damping ``d``, droop ``r`` (enters as ``1/r``) and turbine constant ``tau``."""

    m: float
    d: float
    r: float
    tau: float

    def __post_init__(self):
        for name in ("m", "d", "r", "tau"):
            if not getattr(self, name) > 0:
                raise InvalidConfig(f"generator parameter {name} must be positive")

    def to_json(self) -> dict:
        return {"m": self.m, "d": self.d, "r": self.r, "tau": self.tau}


def generator_tf(p: GeneratorParams) -> RationalFunction:
    """``1 / (m s + d + (1/r) / (tau s + 1))`` with the inner fraction cleared."""
    num = [1.0, p.tau]
    den = [p.d + 1.0 / p.r, p.m + p.d * p.tau, p.m * p.tau]
    return RationalFunction.from_coeffs(num, den)


def aggregate_dynamics(gs: Sequence[RationalFunction]) -> RationalFunction:
    """Coherent-group dynamics ``(sum_i g_i^{-1})^{-1}``, kept at full order."""
    if not gs:
        raise ValueError("need at least one node transfer function")
    acc = rf_reciprocal(gs[0])
    for g in gs[1:]:
        acc = rf_add(acc, rf_reciprocal(g))
    return rf_reciprocal(acc)


@dataclass(frozen=True)
class NetworkModel:
    nodes: tuple[RationalFunction, ...]
    coupling: RationalFunction
    laplacian: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        L = check_laplacian(self.laplacian)
        if len(self.nodes) != L.shape[0]:
            raise InvalidConfig(f"{len(self.nodes)} node models for a {L.shape[0]}-node Laplacian")
        for i, g in enumerate(self.nodes):
            if g.is_zero():
                raise ZeroFunction(f"node {i} has the zero transfer function")
        L = L.copy()
        L.flags.writeable = False
        object.__setattr__(self, "laplacian", L)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def with_laplacian(self, L: np.ndarray) -> NetworkModel:
        return NetworkModel(self.nodes, self.coupling, L)


def node_inverses(nodes: Sequence[RationalFunction], s0: complex) -> np.ndarray:
    """``g_i^{-1}(s0)`` evaluated pointwise as ``den_i(s0) / num_i(s0)``."""
    out = np.empty(len(nodes), dtype=complex)
    for i, g in enumerate(nodes):
        try:
            out[i] = rf_eval(RationalFunction(g.den, g.num), s0)
        except PoleAtPoint:
            raise PoleAtPoint(f"s0={s0!r} is a zero of node {i}") from None
    return out


def evaluate_tyu(net: NetworkModel, s0: complex) -> np.ndarray:
    """Closed-loop transfer matrix at one complex frequency."""
    ginv = node_inverses(net.nodes, s0)
    f0 = rf_eval(net.coupling, s0)
    M = np.diag(ginv) + f0 * net.laplacian
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > 1e15:
        raise SingularAtPoint(f"G^-1 + f L is singular at s0={s0!r} (cond={cond:.2e})")
    if cond > COND_WARN:
        log.warning("ill-conditioned return difference at s0=%r: cond=%.2e", s0, cond)
    return np.linalg.solve(M, np.eye(net.n, dtype=complex))


# ---------------------------------------------------------------------------
# file format


def network_to_json(net: NetworkModel, generators: Sequence[GeneratorParams] | None = None,
                    meta: dict | None = None) -> dict:
    """Serialise; with ``generators`` each node is written in the ``{"gen": ...}`` shorthand."""
    if generators is not None:
        nodes = [{"gen": g.to_json()} for g in generators]
    else:
        nodes = [g.to_json() for g in net.nodes]
    out = {"f": net.coupling.to_json(), "nodes": nodes, "laplacian": graph_to_json(net.laplacian)}
    if meta:
        out["meta"] = meta
    return out


def _node_from_json(obj, k: int) -> RationalFunction:
    if not isinstance(obj, dict):
        raise InvalidConfig(f"node #{k}: expected an object, got {type(obj).__name__}")
    if "gen" in obj:
        g = obj["gen"]
        try:
            return generator_tf(GeneratorParams(float(g["m"]), float(g["d"]), float(g["r"]), float(g["tau"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidConfig(f"node #{k}: bad generator shorthand ({exc})") from None
    try:
        return RationalFunction.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidConfig(f"node #{k}: bad rational function ({exc})") from None


def network_from_json(obj: dict) -> NetworkModel:
    try:
        f = RationalFunction.from_json(obj["f"])
        raw_nodes = obj["nodes"]
        lap = obj["laplacian"]
    except KeyError as exc:
        raise InvalidConfig(f"network JSON is missing key {exc}") from None
    nodes = [_node_from_json(o, k) for k, o in enumerate(raw_nodes)]
    L = graph_from_json(lap)
    return NetworkModel(tuple(nodes), f, L)
