"""Weighted undirected graphs, Laplacians and random two-community graphs.

Laplacians are plain dense ``numpy`` arrays; :func:`check_laplacian` enforces
the symmetric / zero-row-sum / nonpositive off-diagonal contract where a
function needs it.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AsymmetricInput, InvalidConfig, OrderingViolated, SingularInterior

SYM_TOL = 1e-12
ROW_TOL = 1e-9


def check_laplacian(L: np.ndarray, sym_tol: float = SYM_TOL, row_tol: float = ROW_TOL) -> np.ndarray:
    """Validate and return ``L`` as a float array; raise ``ValueError`` otherwise."""
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError(f"Laplacian must be square, got shape {L.shape}")
    scale = max(1.0, float(np.max(np.abs(L))) if L.size else 1.0)
    if np.max(np.abs(L - L.T), initial=0.0) > sym_tol * scale:
        raise ValueError("Laplacian is not symmetric")
    if np.max(np.abs(L.sum(axis=1)), initial=0.0) > row_tol * scale:
        raise ValueError("Laplacian rows do not sum to zero")
    off = L - np.diag(np.diag(L))
    if np.max(off, initial=0.0) > sym_tol * scale:
        raise ValueError("Laplacian has positive off-diagonal entries")
    return L


def laplacian_from_adjacency(A: np.ndarray) -> np.ndarray:
    """``diag(A 1) - A``; self-loops cancel."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise AsymmetricInput(f"adjacency must be square, got shape {A.shape}")
    if np.max(np.abs(A - A.T), initial=0.0) > SYM_TOL:
        raise AsymmetricInput("adjacency matrix is not symmetric")
    if np.min(A, initial=0.0) < 0:
        raise ValueError("adjacency weights must be nonnegative")
    off = A - np.diag(np.diag(A))
    return np.diag(off.sum(axis=1)) - off


@dataclass(frozen=True)
class BlockModelParams:
    """Two dense blocks: weight ``alpha`` inside each group, ``beta`` across."""

    n_a: int
    n_b: int
    alpha: float
    beta: float

    def __post_init__(self):
        if self.n_a < 1 or self.n_b < 1:
            raise ValueError("both groups need at least one node")
        if self.beta < 0 or self.alpha < 0:
            raise ValueError("block weights must be nonnegative")

    @property
    def n(self) -> int:
        return self.n_a + self.n_b

    def labels(self) -> np.ndarray:
        return np.r_[np.zeros(self.n_a, dtype=int), np.ones(self.n_b, dtype=int)]


def block_adjacency(p: BlockModelParams) -> np.ndarray:
    lab = p.labels()
    same = lab[:, None] == lab[None, :]
    return np.where(same, p.alpha, p.beta).astype(float)


def build_block_laplacian(p: BlockModelParams) -> np.ndarray:
    return laplacian_from_adjacency(block_adjacency(p))


@dataclass(frozen=True)
class BlockSpectrum:
    lambda1: float
    lambda2: float
    lambda3: float | None  # None when n == 2
    v2: np.ndarray = field(repr=False)


def block_spectrum_closed_form(p: BlockModelParams) -> BlockSpectrum:
    """Second and third Laplacian eigenvalues and the Fiedler vector of the block model.

    The two "within-group" eigenvalues ``n_a*alpha + n_b*beta`` and
    ``n_b*alpha + n_a*beta`` have multiplicities ``n_a - 1`` and ``n_b - 1``;
    only those that actually occur compete for the third slot, so a singleton
    group does not contribute one.
    """
    if p.alpha < p.beta:
        raise OrderingViolated(f"alpha={p.alpha} < beta={p.beta}")
    n = p.n
    lam2 = n * p.beta
    candidates = []
    if p.n_a > 1:
        candidates.append(p.n_a * p.alpha + p.n_b * p.beta)
    if p.n_b > 1:
        candidates.append(p.n_b * p.alpha + p.n_a * p.beta)
    lam3 = min(candidates) if candidates else None
    v2 = np.r_[
        np.full(p.n_a, math.sqrt(p.n_b / p.n_a)),
        np.full(p.n_b, -math.sqrt(p.n_a / p.n_b)),
    ] / math.sqrt(n)
    return BlockSpectrum(0.0, lam2, lam3, v2)


@dataclass(frozen=True)
class WsbmParams:
    """Weighted stochastic block model with two communities.

    Intra-group pairs are connected with probability ``p`` and weight ``w_p``;
    inter-group pairs with probability ``q`` and weight ``w_q``.
    """

    part_a: tuple[int, ...]
    part_b: tuple[int, ...]
    p: float
    q: float
    w_p: float
    w_q: float
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "part_a", tuple(int(i) for i in self.part_a))
        object.__setattr__(self, "part_b", tuple(int(i) for i in self.part_b))
        a, b = set(self.part_a), set(self.part_b)
        n = len(self.part_a) + len(self.part_b)
        if a & b or len(a) != len(self.part_a) or len(b) != len(self.part_b):
            raise InvalidConfig("part_a and part_b must be disjoint index sets without repeats")
        if a | b != set(range(n)):
            raise InvalidConfig("part_a and part_b must cover 0..n-1")
        if not (0.0 <= self.q <= 1.0 and 0.0 <= self.p <= 1.0):
            raise InvalidConfig("p and q must be probabilities")
        if self.w_p <= 0 or self.w_q < 0:
            raise InvalidConfig("w_p must be positive and w_q nonnegative")

    @classmethod
    def contiguous(cls, n_a: int, n_b: int, p: float, q: float, w_p: float, w_q: float,
                   seed: int | None = None) -> WsbmParams:
        """First ``n_a`` nodes form group a, the remaining ``n_b`` group b."""
        return cls(tuple(range(n_a)), tuple(range(n_a, n_a + n_b)), p, q, w_p, w_q, seed)

    @property
    def n(self) -> int:
        return len(self.part_a) + len(self.part_b)

    @property
    def n_min(self) -> int:
        return min(len(self.part_a), len(self.part_b))

    @property
    def gamma(self) -> float:
        return self.w_q / self.w_p

    def labels(self) -> np.ndarray:
        lab = np.zeros(self.n, dtype=int)
        lab[list(self.part_b)] = 1
        return lab

    def probability_weight(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge-probability and edge-weight matrices ``(P, W)``."""
        lab = self.labels()
        same = lab[:, None] == lab[None, :]
        P = np.where(same, self.p, self.q).astype(float)
        W = np.where(same, self.w_p, self.w_q).astype(float)
        return P, W

    def expected_adjacency(self) -> np.ndarray:
        P, W = self.probability_weight()
        return P * W

    def with_seed(self, seed: int) -> WsbmParams:
        return WsbmParams(self.part_a, self.part_b, self.p, self.q, self.w_p, self.w_q, seed)


def sample_independent_edges(P: np.ndarray, W: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Symmetric adjacency with ``A_ij = W_ij`` w.p. ``P_ij`` independently for ``i <= j``.

    The diagonal is drawn as well; it carries self-loops that cancel in the
    Laplacian.
    """
    n = P.shape[0]
    U = rng.random((n, n))
    upper = np.triu(np.where(U < P, W, 0.0))
    return upper + np.triu(upper, 1).T


def sample_wsbm(w: WsbmParams, rng: np.random.Generator | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``(A, L_A)``; uses ``w.seed`` unless a generator is passed in."""
    if rng is None:
        rng = np.random.default_rng(w.seed)
    P, W = w.probability_weight()
    A = sample_independent_edges(P, W, rng)
    return A, laplacian_from_adjacency(A)


def child_seeds(seed: int, count: int) -> list[int]:
    """One reproducible integer seed per trial index, derived via ``SeedSequence.spawn``."""
    return [int(s.generate_state(1, dtype=np.uint64)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def kron_reduce(L: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Schur complement of ``L`` onto the ``keep`` nodes (order preserved)."""
    L = np.asarray(L, dtype=float)
    n = L.shape[0]
    keep = [int(i) for i in keep]
    if len(set(keep)) != len(keep) or any(i < 0 or i >= n for i in keep):
        raise ValueError("keep must be distinct indices into L")
    elim = [i for i in range(n) if i not in set(keep)]
    Lkk = L[np.ix_(keep, keep)]
    if not elim:
        return Lkk.copy()
    Lke = L[np.ix_(keep, elim)]
    Lee = L[np.ix_(elim, elim)]
    if np.linalg.cond(Lee) > 1e12:
        raise SingularInterior("eliminated block is singular; part of it is disconnected from the kept nodes")
    red = Lkk - Lke @ np.linalg.solve(Lee, Lke.T)
    return 0.5 * (red + red.T)


@dataclass(frozen=True)
class ConcentrationBound:
    delta_value: float  # max_i sum_j P_ij W_ij^2
    rhs: float  # 8 sqrt(Delta log(4n/delta))
    c: float  # exponent implied by delta = 4 n^{-c}
    applicable: bool  # Delta >= 16 (c + 1) log n
    scale: float  # factor W was divided by (1.0 without rescaling)


def concentration_bound(params: WsbmParams | tuple[np.ndarray, np.ndarray], delta: float,
                        rescale: bool = False) -> ConcentrationBound:
    """Laplacian concentration radius for an independent-edge random graph.

    ``Delta`` is the exact maximum row sum of ``P_ij W_ij^2``. With
    ``rescale`` the weights are first divided by ``max |W_ij|`` so they lie in
    ``[0, 1]``; the returned ``rhs`` then applies to the rescaled Laplacian.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if isinstance(params, WsbmParams):
        P, W = params.probability_weight()
    else:
        P, W = (np.asarray(x, dtype=float) for x in params)
    scale = 1.0
    if rescale:
        scale = float(np.max(np.abs(W)))
        if scale > 0:
            W = W / scale
    n = P.shape[0]
    Delta = float(np.max(np.sum(P * W**2, axis=1)))
    rhs = 8.0 * math.sqrt(Delta * math.log(4 * n / delta))
    c = math.log(4.0 / delta) / math.log(n) if n > 1 else math.inf
    applicable = Delta >= 16.0 * (c + 1.0) * math.log(n) if n > 1 else False
    return ConcentrationBound(Delta, rhs, c, applicable, scale)


def spectral_norm_sym(M: np.ndarray) -> float:
    """Spectral norm of a symmetric matrix (largest absolute eigenvalue)."""
    return float(np.max(np.abs(np.linalg.eigvalsh(M))))


# ---------------------------------------------------------------------------
# file formats


def graph_to_json(L: np.ndarray) -> dict:
    """Edge-list form ``{"n", "edges": [[i, j, w], ...]}`` of a Laplacian (0-based, i < j)."""
    L = np.asarray(L, dtype=float)
    n = L.shape[0]
    iu, ju = np.triu_indices(n, 1)
    w = -L[iu, ju]
    keep = w != 0.0
    edges = [[int(i), int(j), float(x)] for i, j, x in zip(iu[keep], ju[keep], w[keep])]
    return {"n": int(n), "edges": edges}


def graph_from_json(obj: dict) -> np.ndarray:
    """Laplacian from the edge-list form; repeated edges add up."""
    try:
        n = int(obj["n"])
        edges = obj["edges"]
    except (KeyError, TypeError) as exc:
        raise InvalidConfig(f"graph JSON needs 'n' and 'edges': {exc}") from None
    A = np.zeros((n, n))
    for k, e in enumerate(edges):
        if len(e) != 3:
            raise InvalidConfig(f"edge #{k} must be [i, j, w], got {e!r}")
        i, j, w = int(e[0]), int(e[1]), float(e[2])
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidConfig(f"edge #{k} index out of range for n={n}: {e!r}")
        if w < 0:
            raise InvalidConfig(f"edge #{k} has negative weight {w}")
        if i == j:
            continue
        A[i, j] += w
        A[j, i] += w
    return laplacian_from_adjacency(A)


def write_dense_csv(M: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in np.asarray(M, dtype=float):
            writer.writerow([repr(float(x)) for x in row])
