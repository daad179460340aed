"""Rank-two approximation of the network transfer matrix and the two-node
reduced model built from a spectral partition.

With ``V2 = [1/sqrt(n), v2]`` the approximant is ``T2(s) = V2 H2(s)^{-1} V2^T``
where ``H2 = V2^T G^{-1} V2 + f diag(0, lambda2)``. The reduced model replaces
each group by its aggregate dynamics and couples the two aggregates through
``k_hat * [[1, -1], [-1, 1]]`` with ``k_hat = lambda2 n_a n_b / n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import NetworkModel, aggregate_dynamics, evaluate_tyu, node_inverses
from .errors import DegeneratePartition, SingularH2
from .polyrat import RationalFunction, rf_eval
from .spectral import EigenPairs, Partition, laplacian_eig, spectral_cluster

H2_COND_MAX = 1e14


def fiedler_pair(eig: EigenPairs) -> tuple[float, np.ndarray]:
    return eig.lambda2, eig.v2


def build_h2(net: NetworkModel, eig: tuple[float, np.ndarray], s0: complex) -> np.ndarray:
    """The 2x2 complex-symmetric matrix ``H2(s0)``."""
    lam2, v2 = eig
    v2 = np.asarray(v2, dtype=float)
    n = net.n
    ginv = node_inverses(net.nodes, s0)
    f0 = rf_eval(net.coupling, s0)
    h11 = ginv.sum() / n
    h12 = (ginv @ v2) / math.sqrt(n)
    h22 = ginv @ (v2 * v2) + lam2 * f0
    return np.array([[h11, h12], [h12, h22]], dtype=complex)


def _basis(v2: np.ndarray) -> np.ndarray:
    n = v2.size
    return np.column_stack([np.full(n, 1.0 / math.sqrt(n)), v2])


def evaluate_t2(net: NetworkModel, eig: tuple[float, np.ndarray], s0: complex) -> np.ndarray:
    h = build_h2(net, eig, s0)
    if not np.isfinite(np.linalg.cond(h)) or np.linalg.cond(h) > H2_COND_MAX:
        raise SingularH2(f"H2 is singular at s0={s0!r}")
    V2 = _basis(np.asarray(eig[1], dtype=float))
    return V2 @ np.linalg.solve(h, V2.T.astype(complex))


@dataclass(frozen=True)
class Theorem1Check:
    lhs: float
    rhs: float  # inf when the bound's denominator is not positive
    applicable: bool
    m1: float
    m2: float
    f_lambda3: float


def theorem1_bound(net: NetworkModel, s0: complex, eig: EigenPairs | None = None) -> Theorem1Check:
    """Compare ``||T_yu(s0) - T2(s0)||`` with the rank-two error bound.

    ``M1 = ||T2(s0)||`` and ``M2 = max_i |g_i^{-1}(s0)|``; the bound
    ``(M1 M2 + 1)^2 / (|f(s0)| lambda3 - M2 - M1 M2^2)`` applies whenever
    ``|f(s0)| lambda3 >= M2 + M1 M2^2``.
    """
    eig = eig or laplacian_eig(net.laplacian)
    pair = fiedler_pair(eig)
    t2 = evaluate_t2(net, pair, s0)
    tyu = evaluate_tyu(net, s0)
    lhs = float(np.linalg.norm(tyu - t2, 2))
    m1 = float(np.linalg.norm(t2, 2))
    m2 = float(np.max(np.abs(node_inverses(net.nodes, s0))))
    x = abs(rf_eval(net.coupling, s0)) * eig.lambda3
    margin = x - m2 - m1 * m2 * m2
    rhs = (m1 * m2 + 1.0) ** 2 / margin if margin > 0 else math.inf
    return Theorem1Check(lhs, rhs, bool(margin >= 0), m1, m2, float(x))


@dataclass(frozen=True)
class ReducedModel:
    partition: Partition
    g_hat_a: RationalFunction
    g_hat_b: RationalFunction
    l_hat_weight: float
    f: RationalFunction

    @property
    def l_hat(self) -> np.ndarray:
        return self.l_hat_weight * np.array([[1.0, -1.0], [-1.0, 1.0]])

    def as_network(self) -> NetworkModel:
        """The two aggregate nodes as an ordinary network model."""
        return NetworkModel((self.g_hat_a, self.g_hat_b), self.f, self.l_hat)

    def to_json(self) -> dict:
        return {
            "partition": self.partition.to_json(),
            "g_hat_a": self.g_hat_a.to_json(),
            "g_hat_b": self.g_hat_b.to_json(),
            "l_hat_weight": self.l_hat_weight,
            "f": self.f.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> ReducedModel:
        return cls(
            Partition.from_json(obj["partition"]),
            RationalFunction.from_json(obj["g_hat_a"]),
            RationalFunction.from_json(obj["g_hat_b"]),
            float(obj["l_hat_weight"]),
            RationalFunction.from_json(obj["f"]),
        )


def reduce_network(net: NetworkModel, partition: Partition | None = None) -> ReducedModel:
    """Cluster, aggregate each group, and couple the two aggregates."""
    if net.n < 2:
        raise ValueError("reduction needs at least two nodes")
    part = partition or spectral_cluster(net.laplacian)
    if not part.group_a or not part.group_b:
        raise DegeneratePartition("spectral clustering left one group empty")
    na, nb = len(part.group_a), len(part.group_b)
    g_a = aggregate_dynamics([net.nodes[i] for i in part.group_a])
    g_b = aggregate_dynamics([net.nodes[i] for i in part.group_b])
    k_hat = max(part.lambda2, 0.0) * na * nb / (na + nb)
    return ReducedModel(part, g_a, g_b, float(k_hat), net.coupling)


def evaluate_reduced(rm: ReducedModel, s0: complex) -> np.ndarray:
    """``T2_hat(s0) = (G_hat^{-1}(s0) + f(s0) L_hat)^{-1}``, a 2x2 matrix."""
    return evaluate_tyu(rm.as_network(), s0)


def lift_reduced(rm: ReducedModel, s0: complex) -> np.ndarray:
    """Spread the 2x2 reduced response over the member nodes of each group."""
    t_hat = evaluate_reduced(rm, s0)
    lab = rm.partition.labels()
    return t_hat[np.ix_(lab, lab)]


def rank_one_gap(net: NetworkModel, s0: complex) -> float:
    """``||T_yu(s0) - g_hat(s0) 1 1^T||``: distance from the fully coherent response."""
    ginv = node_inverses(net.nodes, s0)
    g_hat = 1.0 / ginv.sum()
    tyu = evaluate_tyu(net, s0)
    return float(np.linalg.norm(tyu - g_hat * np.ones((net.n, net.n)), 2))

