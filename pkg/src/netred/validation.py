"""Seeded Monte Carlo suites that check the library's guarantees numerically.

Each suite runs ``trials`` independent trials, every one driven by its own
child seed, and folds the outcomes into a JSON-ready report. Failures are
data: a suite never raises because an inequality was violated.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dynamics import GeneratorParams, NetworkModel, generator_tf
from .errors import NetredError
from .experiments import DEFAULT_RANGES, ExperimentConfig, generate_network, sample_generators, steady_state_frequency
from .graph import (BlockModelParams, WsbmParams, block_spectrum_closed_form, build_block_laplacian, child_seeds,
                    concentration_bound, sample_wsbm, spectral_norm_sym)
from .polyrat import integrator
from .reduction import evaluate_t2, fiedler_pair, lift_reduced, rank_one_gap, reduce_network, theorem1_bound
from .sim import response_report
from .spectral import partition_mismatch, sin_theta, laplacian_eig, spectral_cluster, symmetric_eig, thm4_bounds

SCHEMA_VERSION = 1
DEFAULT_S0_GRID = tuple(1j * w for w in np.logspace(-2, 2, 12))

SPECTRUM_TOL = 1e-9
SPECTRUM_SIN_TOL = 1e-8
THM2_REL_TOL = 1e-8
THM1_TOL = 1e-9
TREND_REL_SLACK = 1e-12
STEADY_STATE_TOL = 5e-3

# midpoints of the generator ranges; used where every node must share dynamics
MIDPOINT_GENERATOR = GeneratorParams(
    *(0.5 * (DEFAULT_RANGES[k][0] + DEFAULT_RANGES[k][1]) for k in ("m", "d", "r", "tau"))
)
TREND_ALPHAS = (1.0, 2.0, 4.0, 8.0, 16.0)
TREND_BETA = 0.5
PROP1_SIZES = (120, 80)


@dataclass
class Trial:
    failures: int = 0
    checks: int = 0
    slacks: list[float] = field(default_factory=list)
    info: dict = field(default_factory=dict)


def max_workers() -> int:
    env = os.environ.get("NETRED_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(4, os.cpu_count() or 1))


def run_trials(fn: Callable[[int, int], Trial], seed: int, trials: int) -> list[Trial]:
    """Run ``fn(index, child_seed)`` for every trial; results come back in index order."""
    seeds = child_seeds(seed, trials)
    workers = min(max_workers(), trials)
    if workers <= 1:
        return [fn(k, s) for k, s in enumerate(seeds)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials), seeds))


def _slack_stats(slacks: list[float]) -> dict:
    finite = [s for s in slacks if math.isfinite(s)]
    if not finite:
        return {"min": None, "median": None, "max": None, "count": len(slacks)}
    return {"min": float(np.min(finite)), "median": float(np.median(finite)),
            "max": float(np.max(finite)), "count": len(slacks)}


def _report(suite: str, seed: int, results: list[Trial], passed: bool, **extra) -> dict:
    failures = sum(r.failures for r in results)
    checks = sum(r.checks for r in results)
    failed_trials = sum(1 for r in results if r.failures)
    out = {
        "schema_version": SCHEMA_VERSION,
        "suite": suite,
        "seed": seed,
        "trials": len(results),
        "checks": checks,
        "failures": failures,
        "failed_trials": failed_trials,
        "violation_rate": failed_trials / len(results) if results else 0.0,
        "slack": _slack_stats([s for r in results for s in r.slacks]),
        "passed": bool(passed),
    }
    out.update(extra)
    return out


def _heterogeneous_nodes(n: int, rng: np.random.Generator) -> tuple:
    return tuple(generator_tf(g) for g in sample_generators(DEFAULT_RANGES, n, rng))


def _random_block(rng: np.random.Generator, n_max: int = 60, n_min: int = 2) -> BlockModelParams:
    n = int(rng.integers(n_min, n_max + 1))
    n_a = int(rng.integers(1, n))
    alpha = float(rng.uniform(0.5, 10.0))
    beta = float(alpha * rng.uniform(0.05, 0.9))
    return BlockModelParams(n_a, n - n_a, alpha, beta)


# ---------------------------------------------------------------------------
# suites


def suite_spectrum(seed: int = 0, trials: int = 200) -> dict:
    """Numeric block-model spectrum against the closed forms."""

    def trial(_k, s):
        rng = np.random.default_rng(s)
        p = _random_block(rng)
        cf = block_spectrum_closed_form(p)
        eig = symmetric_eig(build_block_laplacian(p))
        t = Trial()
        errs = [(abs(eig.lambda2 - cf.lambda2), SPECTRUM_TOL),
                (sin_theta(eig.v2, cf.v2), SPECTRUM_SIN_TOL)]
        if cf.lambda3 is not None:
            errs.append((abs(eig.lambda3 - cf.lambda3), SPECTRUM_TOL))
        for err, tol in errs:
            t.checks += 1
            t.failures += err > tol
            t.slacks.append(tol - err)
        return t

    res = run_trials(trial, seed, trials)
    return _report("spectrum", seed, res, passed=all(r.failures == 0 for r in res),
                   tolerance={"eigenvalue_abs": SPECTRUM_TOL, "sin_theta": SPECTRUM_SIN_TOL})


def suite_thm2(seed: int = 0, trials: int = 50, points: int = 20) -> dict:
    """Lifted two-node model against the rank-two approximant on block-model networks."""

    def trial(_k, s):
        rng = np.random.default_rng(s)
        p = _random_block(rng, n_max=40, n_min=3)
        net = NetworkModel(_heterogeneous_nodes(p.n, rng), integrator(), build_block_laplacian(p))
        eig = laplacian_eig(net.laplacian)
        rm = reduce_network(net, spectral_cluster(net.laplacian, eig))
        t = Trial()
        worst = 0.0
        for _ in range(points):
            s0 = complex(rng.uniform(0.05, 2.0), rng.uniform(-10.0, 10.0))
            t2 = evaluate_t2(net, fiedler_pair(eig), s0)
            rel = float(np.linalg.norm(t2 - lift_reduced(rm, s0), 2) / np.linalg.norm(t2, 2))
            worst = max(worst, rel)
            t.checks += 1
            t.failures += rel > THM2_REL_TOL
            t.slacks.append(THM2_REL_TOL - rel)
        t.info["worst_rel"] = worst
        return t

    res = run_trials(trial, seed, trials)
    return _report("thm2", seed, res, passed=all(r.failures == 0 for r in res),
                   worst_relative_residual=max(r.info["worst_rel"] for r in res), tolerance=THM2_REL_TOL)


def suite_thm1(seed: int = 0, trials: int = 100, s0_grid=DEFAULT_S0_GRID) -> dict:
    """Rank-two error bound on a mix of block-model and random block-model networks."""

    def trial(k, s):
        rng = np.random.default_rng(s)
        if k % 2 == 0:
            p = _random_block(rng, n_max=50, n_min=4)
            L = build_block_laplacian(p)
        else:
            w = WsbmParams.contiguous(int(rng.integers(10, 31)), int(rng.integers(10, 31)),
                                      float(rng.uniform(0.5, 0.9)), float(rng.uniform(0.02, 0.2)), 5.0, 0.5)
            L = sample_wsbm(w, rng)[1]
        net = NetworkModel(_heterogeneous_nodes(L.shape[0], rng), integrator(), L)
        eig = laplacian_eig(L)
        t = Trial(info={"applicable": 0, "skipped": 0})
        for s0 in s0_grid:
            try:
                chk = theorem1_bound(net, s0, eig)
            except NetredError:
                t.info["skipped"] += 1
                continue
            if not chk.applicable:
                continue
            t.info["applicable"] += 1
            t.checks += 1
            t.failures += chk.lhs > chk.rhs + THM1_TOL
            t.slacks.append(chk.rhs - chk.lhs)
        return t

    res = run_trials(trial, seed, trials)
    return _report("thm1", seed, res, passed=all(r.failures == 0 for r in res),
                   applicable_points=sum(r.info["applicable"] for r in res),
                   skipped_points=sum(r.info["skipped"] for r in res),
                   s0_grid=[[z.real, z.imag] for z in map(complex, s0_grid)])


def _prop1_params(sizes=PROP1_SIZES) -> WsbmParams:
    return WsbmParams.contiguous(sizes[0], sizes[1], 0.6, 0.1, 5.0, 0.5)


def suite_prop1(seed: int = 0, trials: int = 100, delta: float = 0.1, sizes=PROP1_SIZES) -> dict:
    """Laplacian concentration for the random block model with weights rescaled into [0, 1]."""
    w = _prop1_params(sizes)
    bound = concentration_bound(w, delta, rescale=True)
    L_exp = build_expected_laplacian(w) / bound.scale

    def trial(_k, s):
        L = sample_wsbm(w, np.random.default_rng(s))[1] / bound.scale
        dev = spectral_norm_sym(L - L_exp)
        return Trial(failures=int(dev > bound.rhs), checks=1, slacks=[bound.rhs - dev])

    res = run_trials(trial, seed, trials)
    rate = sum(r.failures for r in res) / trials
    return _report("prop1", seed, res, passed=rate <= delta, delta=delta, n=w.n, rhs=bound.rhs,
                   max_degree_variance=bound.delta_value, weight_scale=bound.scale,
                   regime_c=bound.c, regime_condition_holds=bound.applicable)


def build_expected_laplacian(w: WsbmParams) -> np.ndarray:
    EA = w.expected_adjacency()
    return np.diag(EA.sum(axis=1)) - EA


def suite_thm4(seed: int = 0, trials: int = 100, delta: float = 0.1, sizes=PROP1_SIZES) -> dict:
    """Lower bound on the third eigenvalue and the Fiedler-angle bound, plus the
    Weyl and Davis-Kahan steps they are built from (the latter must never fail)."""
    w = _prop1_params(sizes)
    b = thm4_bounds(w, delta)
    exp_eig = symmetric_eig(build_expected_laplacian(w))
    gap = exp_eig.lambda3 - exp_eig.lambda2

    def trial(_k, s):
        L = sample_wsbm(w, np.random.default_rng(s))[1]
        eig = symmetric_eig(L)
        E = spectral_norm_sym(L - build_expected_laplacian(w))
        sin = sin_theta(eig.v2, exp_eig.v2)
        t = Trial(checks=1)
        bound_ok = eig.lambda3 >= b.lambda3_lower and sin <= b.sintheta_upper
        t.info["bound_ok"] = bound_ok
        t.slacks.append(min(eig.lambda3 - b.lambda3_lower, b.sintheta_upper - sin))
        weyl = abs(eig.lambda3 - exp_eig.lambda3) <= E + 1e-9 * max(1.0, E)
        dk = gap <= 0 or sin <= 2 * math.sqrt(2) * E / gap + 1e-12
        t.info["weyl_ok"], t.info["dk_ok"] = bool(weyl), bool(dk)
        t.failures = int(not (weyl and dk))
        return t

    res = run_trials(trial, seed, trials)
    hold_rate = sum(r.info["bound_ok"] for r in res) / trials
    return _report("thm4", seed, res, passed=hold_rate >= 1 - delta and all(r.failures == 0 for r in res),
                   delta=delta, n=w.n, bound_hold_rate=hold_rate,
                   weyl_failures=sum(not r.info["weyl_ok"] for r in res),
                   davis_kahan_failures=sum(not r.info["dk_ok"] for r in res),
                   lambda3_lower=b.lambda3_lower, sintheta_upper=b.sintheta_upper,
                   sintheta_upper_uncancelled=b.sintheta_upper_uncancelled, gamma=b.gamma)


def rank_one_gaps(nodes: tuple, n_a: int, n_b: int, alphas=TREND_ALPHAS, beta: float = TREND_BETA,
                  s0: complex = 1j) -> list[float]:
    out = []
    for a in alphas:
        L = build_block_laplacian(BlockModelParams(n_a, n_b, a, beta))
        out.append(rank_one_gap(NetworkModel(nodes, integrator(), L), s0))
    return out


def is_non_increasing(values: list[float], rel_slack: float = TREND_REL_SLACK) -> bool:
    return all(b <= a + rel_slack * max(abs(a), 1.0) for a, b in zip(values, values[1:]))


def suite_coherence(seed: int = 0, trials: int = 20) -> dict:
    """Distance from the fully coherent response as within-group weight grows.

    The asserted check uses identical node dynamics, where the trend holds
    exactly; the heterogeneous rate is reported for information only.
    """
    homog = generator_tf(MIDPOINT_GENERATOR)

    def trial(k, s):
        rng = np.random.default_rng(s)
        n_a, n_b = (30, 20) if k == 0 else (int(rng.integers(2, 31)), int(rng.integers(2, 31)))
        gaps = rank_one_gaps((homog,) * (n_a + n_b), n_a, n_b)
        ok = is_non_increasing(gaps)
        het = rank_one_gaps(_heterogeneous_nodes(n_a + n_b, rng), n_a, n_b)
        steps = np.diff(gaps)
        return Trial(failures=int(not ok), checks=1,
                     slacks=[float(np.min(-steps + TREND_REL_SLACK * max(gaps[0], 1.0)))],
                     info={"het_ok": is_non_increasing(het), "gaps": gaps})

    res = run_trials(trial, seed, trials)
    return _report("coherence", seed, res, passed=all(r.failures == 0 for r in res),
                   alphas=list(TREND_ALPHAS), beta=TREND_BETA, s0=[0.0, 1.0],
                   gaps_first_trial=res[0].info["gaps"],
                   heterogeneous_nonincreasing_rate=sum(r.info["het_ok"] for r in res) / trials)


def suite_clustering(seed: int = 0, trials: int = 100, config: ExperimentConfig | None = None) -> dict:
    """Spectral clustering against the planted groups of the random block model."""
    w = (config or ExperimentConfig()).wsbm_params()
    planted = (tuple(np.flatnonzero(w.labels() == 0)), tuple(np.flatnonzero(w.labels() == 1)))

    def trial(_k, s):
        L = sample_wsbm(w, np.random.default_rng(s))[1]
        mm = partition_mismatch(spectral_cluster(L), planted)
        return Trial(failures=int(mm > 0), checks=1, slacks=[-float(mm)])

    res = run_trials(trial, seed, trials)
    return _report("clustering", seed, res, passed=all(r.failures == 0 for r in res),
                   perfect_trials=sum(r.failures == 0 for r in res))


def _planted_group_rms(cfg: ExperimentConfig) -> tuple[np.ndarray, float, dict]:
    """Per planted group RMS(yhat - group mean), plus steady-state errors."""
    net, gens, w = generate_network(cfg)
    rm = reduce_network(net)
    rec = response_report(net, rm, cfg.disturbance, cfg.t_final, cfg.dt)
    planted = w.labels()
    found = rm.partition.labels()
    # spectral group g corresponds to the planted group holding most of its members
    rms = np.full(2, np.nan)
    for g in (0, 1):
        members = planted[found == g]
        rms[int(round(members.mean()))] = rec.rms_to_mean[g]
    target = steady_state_frequency(gens, cfg.disturbance.magnitude)
    ss = rec.steady_state()
    err_full = max(abs(v - target) for v in ss["full"]) / abs(target)
    err_red = max(abs(v - target) for v in ss["reduced"]) / abs(target)
    mismatch = partition_mismatch(rm.partition, (np.flatnonzero(planted == 0), np.flatnonzero(planted == 1)))
    return rms, target, {"full_rel_err": err_full, "reduced_rel_err": err_red, "mismatch": mismatch}


def suite_response(seed: int = 0, trials: int = 10, p_low: float = 0.6, p_high: float = 0.9,
                   base: ExperimentConfig | None = None, min_win_fraction: float = 0.8) -> dict:
    """Paired low/high intra-group density step responses at the synthetic power-network setup."""
    base = base or ExperimentConfig()

    def trial(_k, s):
        runs = {}
        for p in (p_low, p_high):
            cfg = ExperimentConfig.from_json({**base.to_json(), "seed": s, "wsbm": {**base.wsbm, "p": p}})
            runs[p] = _planted_group_rms(cfg)
        lo, hi = runs[p_low][0], runs[p_high][0]
        wins = [bool(hi[g] < lo[g]) for g in (0, 1)]
        ss_errs = [runs[p][2][k] for p in runs for k in ("full_rel_err", "reduced_rel_err")]
        ss_fail = sum(e > STEADY_STATE_TOL for e in ss_errs)
        return Trial(failures=ss_fail, checks=len(ss_errs), slacks=[STEADY_STATE_TOL - e for e in ss_errs],
                     info={"wins": wins, "rms_low": lo.tolist(), "rms_high": hi.tolist(),
                           "max_ss_err": max(ss_errs)})

    res = run_trials(trial, seed, trials)
    wins = [sum(r.info["wins"][g] for r in res) for g in (0, 1)]
    need = math.ceil(min_win_fraction * trials)
    return _report("response", seed, res,
                   passed=all(r.failures == 0 for r in res) and all(w_ >= need for w_ in wins),
                   p_low=p_low, p_high=p_high, group_wins=wins, wins_required=need,
                   steady_state_tol=STEADY_STATE_TOL, max_steady_state_rel_err=max(r.info["max_ss_err"] for r in res),
                   rms_low=[r.info["rms_low"] for r in res], rms_high=[r.info["rms_high"] for r in res])


SUITES = {
    "spectrum": (suite_spectrum, 200),
    "thm1": (suite_thm1, 100),
    "thm2": (suite_thm2, 50),
    "prop1": (suite_prop1, 100),
    "thm4": (suite_thm4, 100),
    "coherence": (suite_coherence, 20),
    "clustering": (suite_clustering, 100),
    "response": (suite_response, 10),
}


def run_suite(name: str, seed: int = 0, trials: int | None = None, delta: float = 0.1, s0_grid=None) -> dict:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    fn, default_trials = SUITES[name]
    kw = {"seed": seed, "trials": trials or default_trials}
    if name in ("prop1", "thm4"):
        kw["delta"] = delta
    if name == "thm1" and s0_grid is not None:
        kw["s0_grid"] = tuple(s0_grid)
    return fn(**kw)

