"""Time-domain simulation of the full and reduced networks.

Transfer functions are realized in controllable canonical form, the feedback
interconnection is assembled into one state-space model, and step responses
are integrated with fixed-step classical RK4 from zero initial state.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .dynamics import NetworkModel
from .errors import AlgebraicLoop, ImproperTransferFunction, UnstableDivergence
from .polyrat import RationalFunction
from .reduction import ReducedModel

DT = 0.005
T_FINAL = 30.0
DIVERGENCE_LIMIT = 1e9


@dataclass(frozen=True)
class StateSpace:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A, B, C, D = (np.atleast_2d(np.asarray(m, dtype=float)) for m in (self.A, self.B, self.C, self.D))
        nx = self.A.shape[0] if np.size(self.A) else 0
        A = A.reshape(nx, nx)
        B = B.reshape(nx, -1) if nx else np.zeros((0, D.shape[1]))
        C = C.reshape(-1, nx) if nx else np.zeros((D.shape[0], 0))
        if B.shape[1] != D.shape[1] or C.shape[0] != D.shape[0]:
            raise ValueError("inconsistent state-space dimensions")
        for m in (A, B, C, D):
            if not np.all(np.isfinite(m)):
                raise ValueError("state-space matrices must be finite")
        for name, m in zip("ABCD", (A, B, C, D)):
            object.__setattr__(self, name, m)

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    def transfer_at(self, s0: complex) -> np.ndarray:
        """``C (s0 I - A)^{-1} B + D``."""
        if self.n_states == 0:
            return self.D.astype(complex)
        M = s0 * np.eye(self.n_states) - self.A
        return self.C @ np.linalg.solve(M, self.B.astype(complex)) + self.D


def realize_statespace(r: RationalFunction) -> StateSpace:
    """Controllable canonical realization of a proper SISO transfer function."""
    if not r.is_proper():
        raise ImproperTransferFunction(f"numerator degree {r.num.degree} exceeds denominator degree {r.den.degree}")
    den = r.den.c / r.den.lead
    num = np.zeros(den.size)
    num[: r.num.degree + 1] = r.num.c / r.den.lead
    n = den.size - 1
    d = num[n] if r.num.degree == n else 0.0
    rem = num[:n] - d * den[:n]
    if n == 0:
        return StateSpace(np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), [[d]])
    A = np.zeros((n, n))
    A[:-1, 1:] = np.eye(n - 1)
    A[-1, :] = -den[:n]
    B = np.zeros((n, 1))
    B[-1, 0] = 1.0
    C = rem.reshape(1, n)
    return StateSpace(A, B, C, [[d]])


def assemble_closed_loop(net: NetworkModel) -> StateSpace:
    """State-space model of ``y = G (u - L f y)`` from ``u`` to ``y``.

    Each node is realized separately; the coupling ``f`` is realized once per
    node and driven by that node's output, and its outputs are mixed by ``L``
    before being subtracted at the node inputs. State order: node states, then
    coupling states.
    """
    n = net.n
    parts = [realize_statespace(g) for g in net.nodes]
    fr = realize_statespace(net.coupling)
    L = np.asarray(net.laplacian, dtype=float)

    Ag = block_diag(*[p.A for p in parts]) if any(p.n_states for p in parts) else np.zeros((0, 0))
    Bg = block_diag(*[p.B for p in parts])
    Cg = block_diag(*[p.C for p in parts])
    Dg = np.diag([p.D[0, 0] for p in parts])
    Ag = Ag.reshape(Bg.shape[0], Bg.shape[0])
    Bg = Bg.reshape(-1, n)
    Cg = Cg.reshape(n, -1)

    I = np.eye(n)
    Aff = np.kron(I, fr.A)
    Bff = np.kron(I, fr.B)
    Cff = np.kron(I, fr.C)
    df = fr.D[0, 0]

    M = I + df * Dg @ L
    if np.linalg.cond(M) > 1e12:
        raise AlgebraicLoop("I + D_G f(inf) L is singular; the interconnection is ill-posed")
    Minv = np.linalg.inv(M)
    nx, nf = Ag.shape[0], Aff.shape[0]
    Cy = Minv @ np.hstack([Cg, -Dg @ L @ Cff])
    Dy = Minv @ Dg
    Ce = np.hstack([np.zeros((n, nx)), -L @ Cff]) - df * L @ Cy
    De = I - df * L @ Dy
    A = block_diag(Ag, Aff) + np.vstack([Bg @ Ce, Bff @ Cy])
    B = np.vstack([Bg @ De, Bff @ Dy])
    return StateSpace(A.reshape(nx + nf, nx + nf), B, Cy, Dy)


@dataclass(frozen=True)
class DisturbanceSpec:
    """Step of size ``magnitude`` entering at ``node`` from ``start_time`` on."""

    node: int
    magnitude: float = 1.0
    start_time: float = 0.0
    kind: str = "step"

    def __post_init__(self):
        if self.kind != "step":
            raise ValueError(f"unsupported disturbance kind {self.kind!r}")
        if not np.isfinite(self.magnitude):
            raise ValueError("disturbance magnitude must be finite")


@dataclass(frozen=True)
class StepResult:
    times: np.ndarray
    outputs: np.ndarray  # shape (len(times), n_outputs)


def step_response(ss: StateSpace, dist: DisturbanceSpec, t_final: float = T_FINAL, dt: float = DT) -> StepResult:
    """Integrate ``x' = A x + B u`` with RK4 on a uniform grid.

    The input is held constant across each step, so a step starting on a grid
    point enters exactly there.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_final <= dist.start_time:
        raise ValueError("t_final must exceed the disturbance start time")
    n_u = ss.B.shape[1]
    if not 0 <= dist.node < n_u:
        raise ValueError(f"disturbance node {dist.node} out of range for {n_u} inputs")
    steps = int(round(t_final / dt))
    times = dt * np.arange(steps + 1)
    u_on = np.zeros(n_u)
    u_on[dist.node] = dist.magnitude
    bu_on = ss.B @ u_on
    du_on = ss.D @ u_on
    zero_x = np.zeros(ss.n_states)

    A = ss.A
    x = np.zeros(ss.n_states)
    out = np.empty((steps + 1, ss.C.shape[0]))
    h = dt
    for k in range(steps + 1):
        t = times[k]
        y = ss.C @ x + (du_on if t >= dist.start_time else 0.0)
        out[k] = y
        if not np.all(np.abs(y) <= DIVERGENCE_LIMIT):
            raise UnstableDivergence(f"|y| exceeded {DIVERGENCE_LIMIT:g} at t={t:.3f}")
        if k == steps:
            break
        # zero-order hold: the input seen over [t, t + h) is its value at t
        b = bu_on if t >= dist.start_time else zero_x
        k1 = A @ x + b
        k2 = A @ (x + 0.5 * h * k1) + b
        k3 = A @ (x + 0.5 * h * k2) + b
        k4 = A @ (x + h * k3) + b
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return StepResult(times, out)


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(x))))


@dataclass(frozen=True)
class ResponseRecord:
    times: np.ndarray
    full_outputs: np.ndarray  # (T, n)
    reduced_outputs: np.ndarray  # (T, 2): yhat_a, yhat_b
    group_means: np.ndarray  # (T, 2)
    labels: np.ndarray = field(repr=False)
    rms_to_members: tuple[np.ndarray, np.ndarray] = field(repr=False)
    rms_to_mean: tuple[float, float] = (0.0, 0.0)

    def steady_state(self) -> dict:
        return {
            "full": [float(v) for v in self.full_outputs[-1]],
            "reduced": [float(v) for v in self.reduced_outputs[-1]],
        }

    def write_csv(self, path) -> None:
        n = self.full_outputs.shape[1]
        header = ["t", *[f"y_{i}" for i in range(n)], "yhat_a", "yhat_b", "mean_a", "mean_b"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for k, t in enumerate(self.times):
                row = [t, *self.full_outputs[k], *self.reduced_outputs[k], *self.group_means[k]]
                w.writerow([repr(float(v)) for v in row])


def response_report(net: NetworkModel, rm: ReducedModel, dist: DisturbanceSpec,
                    t_final: float = T_FINAL, dt: float = DT) -> ResponseRecord:
    """Simulate full and reduced networks under the same step and compare per group."""
    full = step_response(assemble_closed_loop(net), dist, t_final, dt)
    lab = rm.partition.labels()
    red_dist = DisturbanceSpec(int(lab[dist.node]), dist.magnitude, dist.start_time)
    red = step_response(assemble_closed_loop(rm.as_network()), red_dist, t_final, dt)
    y = full.outputs
    means = np.column_stack([y[:, lab == g].mean(axis=1) for g in (0, 1)])
    to_members = tuple(
        np.array([_rms(red.outputs[:, g] - y[:, i]) for i in np.flatnonzero(lab == g)]) for g in (0, 1)
    )
    to_mean = tuple(_rms(red.outputs[:, g] - means[:, g]) for g in (0, 1))
    return ResponseRecord(full.times, y, red.outputs, means, lab, to_members, to_mean)
