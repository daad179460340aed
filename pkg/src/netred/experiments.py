"""Experiment configuration and synthetic power-network generation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import GeneratorParams, NetworkModel, generator_tf
from .errors import InvalidConfig
from .graph import WsbmParams, sample_wsbm
from .polyrat import RationalFunction, integrator
from .sim import DT, T_FINAL, DisturbanceSpec

DEFAULT_RANGES = {"m": (0.05, 0.5), "d": (0.2, 0.5), "r": (5.0, 10.0), "tau": (2.0, 10.0)}
DEFAULT_WSBM = {"n_a": 30, "n_b": 20, "p": 0.6, "q": 0.1, "w_p": 5.0, "w_q": 0.5}


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    wsbm: dict = field(default_factory=lambda: dict(DEFAULT_WSBM))
    generator_ranges: dict = field(default_factory=lambda: dict(DEFAULT_RANGES))
    coupling: RationalFunction = field(default_factory=integrator)
    disturbance: DisturbanceSpec = field(default_factory=lambda: DisturbanceSpec(node=1))
    t_final: float = T_FINAL
    dt: float = DT
    delta: float = 0.1
    trials: int = 1

    def __post_init__(self):
        missing = {"n_a", "n_b", "p", "q", "w_p", "w_q"} - set(self.wsbm)
        if missing:
            raise InvalidConfig(f"wsbm: missing fields {sorted(missing)}")
        for key in ("n_a", "n_b"):
            if int(self.wsbm[key]) < 1:
                raise InvalidConfig(f"wsbm.{key}: must be >= 1")
        for key in ("p", "q"):
            if not 0.0 <= float(self.wsbm[key]) <= 1.0:
                raise InvalidConfig(f"wsbm.{key}: must be a probability")
        if float(self.wsbm["w_p"]) <= 0 or float(self.wsbm["w_q"]) < 0:
            raise InvalidConfig("wsbm.w_p must be > 0 and wsbm.w_q >= 0")
        for name in ("m", "d", "r", "tau"):
            if name not in self.generator_ranges:
                raise InvalidConfig(f"generator_ranges.{name}: missing")
            lo, hi = self.generator_ranges[name]
            if not 0 < lo <= hi:
                raise InvalidConfig(f"generator_ranges.{name}: need 0 < lo <= hi, got [{lo}, {hi}]")
        if self.trials < 1:
            raise InvalidConfig("trials: must be >= 1")
        if not 0 < self.delta < 1:
            raise InvalidConfig("delta: must lie in (0, 1)")
        if self.dt <= 0 or self.t_final <= self.disturbance.start_time:
            raise InvalidConfig("sim: need dt > 0 and t_final > disturbance start time")
        n = int(self.wsbm["n_a"]) + int(self.wsbm["n_b"])
        if not 0 <= self.disturbance.node < n:
            raise InvalidConfig(f"disturbance.node: {self.disturbance.node} out of range for n={n}")

    def wsbm_params(self) -> WsbmParams:
        w = self.wsbm
        return WsbmParams.contiguous(int(w["n_a"]), int(w["n_b"]), float(w["p"]), float(w["q"]),
                                     float(w["w_p"]), float(w["w_q"]), self.seed)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "wsbm": dict(self.wsbm),
            "generator_ranges": {k: list(v) for k, v in self.generator_ranges.items()},
            "coupling": self.coupling.to_json(),
            "disturbance": {"node": self.disturbance.node, "kind": self.disturbance.kind,
                            "magnitude": self.disturbance.magnitude, "start_time": self.disturbance.start_time},
            "sim": {"t_final": self.t_final, "dt": self.dt},
            "delta": self.delta,
            "trials": self.trials,
        }

    @classmethod
    def from_json(cls, obj: dict) -> ExperimentConfig:
        kw = {}
        try:
            if "seed" in obj:
                kw["seed"] = int(obj["seed"])
            if "wsbm" in obj:
                kw["wsbm"] = {**DEFAULT_WSBM, **obj["wsbm"]}
            if "generator_ranges" in obj:
                kw["generator_ranges"] = {**DEFAULT_RANGES,
                                          **{k: tuple(map(float, v)) for k, v in obj["generator_ranges"].items()}}
            if "coupling" in obj:
                kw["coupling"] = RationalFunction.from_json(obj["coupling"])
            if "disturbance" in obj:
                d = obj["disturbance"]
                kw["disturbance"] = DisturbanceSpec(int(d.get("node", 1)), float(d.get("magnitude", 1.0)),
                                                    float(d.get("start_time", 0.0)), d.get("kind", "step"))
            if "sim" in obj:
                kw["t_final"] = float(obj["sim"].get("t_final", T_FINAL))
                kw["dt"] = float(obj["sim"].get("dt", DT))
            if "delta" in obj:
                kw["delta"] = float(obj["delta"])
            if "trials" in obj:
                kw["trials"] = int(obj["trials"])
        except (TypeError, ValueError, KeyError) as exc:
            raise InvalidConfig(f"config: {exc}") from None
        return cls(**kw)


def sample_generators(ranges: dict, n: int, rng: np.random.Generator) -> list[GeneratorParams]:
    """Independent uniform draws of (m, d, r, tau) for ``n`` generators, node by node."""
    out = []
    for _ in range(n):
        m, d, r, tau = (rng.uniform(*ranges[k]) for k in ("m", "d", "r", "tau"))
        out.append(GeneratorParams(float(m), float(d), float(r), float(tau)))
    return out


def experiment_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent generators for the graph and for the node parameters.

    Keeping them separate means two configs that differ only in graph
    parameters (say p=0.6 vs p=0.9) share the same generator fleet.
    """
    g, n = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(g), np.random.default_rng(n)


def generate_network(config: ExperimentConfig) -> tuple[NetworkModel, list[GeneratorParams], WsbmParams]:
    w = config.wsbm_params()
    graph_rng, node_rng = experiment_streams(config.seed)
    _, L = sample_wsbm(w, graph_rng)
    gens = sample_generators(config.generator_ranges, w.n, node_rng)
    net = NetworkModel(tuple(generator_tf(g) for g in gens), config.coupling, L)
    return net, gens, w


def steady_state_frequency(gens: list[GeneratorParams], magnitude: float = 1.0) -> float:
    """Common frequency deviation after a step: ``magnitude / sum(d_i + 1/r_i)``."""
    return magnitude / math.fsum(g.d + 1.0 / g.r for g in gens)
