"""Laplacian eigendecomposition, two-way spectral clustering, and the
random-graph spectral bounds evaluated against it."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateRegime, NotSymmetric, NotUnit, SizeMismatch
from .graph import WsbmParams

FIEDLER_GAP_TOL = 1e-9
# Fiedler entries this small (v2 is unit norm) are roundoff of an exact zero
SIGN_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class EigenPairs:
    values: np.ndarray  # ascending
    vectors: np.ndarray  # column i pairs with values[i]

    @property
    def lambda2(self) -> float:
        return float(self.values[1])

    @property
    def lambda3(self) -> float:
        return float(self.values[2])

    @property
    def v2(self) -> np.ndarray:
        return self.vectors[:, 1]


def _fix_signs(V: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each column made nonnegative; argmax picks
    # the lowest index on ties
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def symmetric_eig(M: np.ndarray, sym_tol: float = 1e-10) -> EigenPairs:
    """Full eigendecomposition of a real symmetric matrix, ascending order."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if np.max(np.abs(M - M.T), initial=0.0) > sym_tol * scale:
        raise NotSymmetric("matrix is not symmetric")
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    return EigenPairs(w, _fix_signs(V))


def laplacian_eig(L: np.ndarray, null_tol: float = FIEDLER_GAP_TOL) -> EigenPairs:
    """``symmetric_eig`` for a Laplacian, with the null space put in canonical form.

    When the graph is disconnected the zero eigenvalue repeats and the solver
    may return any basis of its eigenspace. Here the first vector is always
    ``1/sqrt(n)`` and the remaining null vectors are orthogonal to it, so
    ``v2`` contrasts components instead of indicating one of them.
    """
    eig = symmetric_eig(L)
    n = eig.values.size
    if n < 2:
        return eig
    scale = max(1.0, abs(float(eig.values[-1])))
    k = int(np.sum(eig.values <= null_tol * scale))
    if k < 2:
        return eig
    ones = np.full(n, 1.0 / np.sqrt(n))
    null = eig.vectors[:, :k]
    rest = null - np.outer(ones, ones @ null)
    U, _, _ = np.linalg.svd(rest, full_matrices=False)
    V = eig.vectors.copy()
    V[:, 0] = ones
    V[:, 1:k] = U[:, : k - 1]
    vals = eig.values.copy()
    vals[:k] = 0.0
    return EigenPairs(vals, _fix_signs(V))


@dataclass(frozen=True)
class Partition:
    group_a: tuple[int, ...]
    group_b: tuple[int, ...]
    lambda2: float
    fiedler: np.ndarray | None = field(default=None, repr=False, compare=False)
    isolated: bool = True  # False when lambda2 and lambda3 coincide

    @property
    def n(self) -> int:
        return len(self.group_a) + len(self.group_b)

    def labels(self) -> np.ndarray:
        lab = np.zeros(self.n, dtype=int)
        lab[list(self.group_b)] = 1
        return lab

    def to_json(self) -> dict:
        return {"group_a": list(self.group_a), "group_b": list(self.group_b), "lambda2": self.lambda2}

    @classmethod
    def from_json(cls, obj: dict) -> Partition:
        return cls(tuple(obj["group_a"]), tuple(obj["group_b"]), float(obj["lambda2"]))


def partition_from_vector(v2: np.ndarray, lambda2: float, isolated: bool = True,
                          zero_tol: float = SIGN_ZERO_TOL) -> Partition:
    """Nonnegative entries (including numerically zero ones) go to group a."""
    v2 = np.asarray(v2, dtype=float)
    neg = v2 < -zero_tol
    a = tuple(int(i) for i in np.flatnonzero(~neg))
    b = tuple(int(i) for i in np.flatnonzero(neg))
    return Partition(a, b, float(lambda2), np.array(v2), isolated)


def spectral_cluster(L: np.ndarray, eig: EigenPairs | None = None) -> Partition:
    """Split nodes by the sign of the Fiedler vector; zero entries join group a."""
    L = np.asarray(L, dtype=float)
    if L.shape[0] < 2:
        raise ValueError("spectral clustering needs at least two nodes")
    eig = eig or laplacian_eig(L)
    isolated = True
    if L.shape[0] > 2:
        scale = max(1.0, abs(eig.values[-1]))
        isolated = bool(eig.values[2] - eig.values[1] > FIEDLER_GAP_TOL * scale)
    return partition_from_vector(eig.v2, eig.lambda2, isolated)


def sin_theta(u: np.ndarray, v: np.ndarray, unit_tol: float = 1e-9) -> float:
    """Sine of the angle between two unit vectors, sign-insensitive."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(u) - 1) > unit_tol or abs(np.linalg.norm(v) - 1) > unit_tol:
        raise NotUnit("sin_theta expects unit vectors")
    # norm of the component of v orthogonal to u; equals sqrt(1 - (u.v)^2)
    # but keeps full precision for nearly parallel vectors
    c = float(u @ v)
    return min(1.0, float(np.linalg.norm(v - c * u)))


@dataclass(frozen=True)
class Theorem4Bounds:
    lambda3_lower: float
    sintheta_upper: float
    # same expression with the w_p in the numerator dropped; reported for comparison only
    sintheta_upper_uncancelled: float
    gamma: float


def thm4_bounds(w: WsbmParams, delta: float) -> Theorem4Bounds:
    """High-probability lower bound on ``lambda_3(L_A)`` and upper bound on the
    Fiedler-vector angle for a two-community weighted stochastic block model."""
    if not w.p > w.q:
        raise DegenerateRegime(f"bounds need p > q (got p={w.p}, q={w.q})")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    gamma = w.gamma
    n, n_min = w.n, w.n_min
    root = math.sqrt(n * w.p * math.log(4 * n / delta))
    lam3 = w.w_p * (w.p + gamma * w.q) * n_min - 8.0 * w.w_p * root
    # w_p cancels between the perturbation radius and the eigengap
    sin_up = (16.0 * math.sqrt(2.0) / (w.w_p * (w.p - gamma * w.q))) * w.w_p * root / n_min
    literal = 16.0 * math.sqrt(2.0) / (w.w_p * (w.p - gamma * w.q)) * root / n_min
    return Theorem4Bounds(lam3, sin_up, literal, gamma)


def partition_mismatch(found: Partition, planted: tuple[Sequence, Sequence] | Partition) -> int:
    """Misassigned nodes, minimised over the two ways of matching labels."""
    if isinstance(planted, Partition):
        pa, pb = planted.group_a, planted.group_b
    else:
        pa, pb = planted
    n = len(pa) + len(pb)
    if found.n != n:
        raise SizeMismatch(f"partition sizes differ: {found.n} vs {n}")
    truth = np.zeros(n, dtype=int)
    truth[list(pb)] = 1
    lab = found.labels()
    wrong = int(np.sum(lab != truth))
    return min(wrong, n - wrong)

