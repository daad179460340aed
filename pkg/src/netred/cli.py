"""``netred`` command-line interface.

Every command is a pure function of its input files, flags and seed; JSON is
written with sorted keys so reruns reproduce files byte for byte.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .dynamics import NetworkModel, network_from_json, network_to_json
from .errors import InvalidConfig, NetredError
from .experiments import ExperimentConfig, generate_network
from .reduction import ReducedModel, evaluate_t2, fiedler_pair, lift_reduced, reduce_network, theorem1_bound
from .sim import DT, T_FINAL, DisturbanceSpec, response_report
from .spectral import Partition, laplacian_eig, partition_mismatch, spectral_cluster
from .validation import DEFAULT_S0_GRID, SCHEMA_VERSION, SUITES, run_suite

EXIT_OK, EXIT_INVALID, EXIT_SUITE_FAILED = 0, 2, 3

log = logging.getLogger("netred")


# ---------------------------------------------------------------------------
# I/O helpers


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(obj, path: str | Path | None) -> None:
    text = dumps(obj)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def read_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidConfig(f"{path}: cannot read ({exc.strerror})") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        line = text.splitlines()[exc.lineno - 1] if exc.lineno <= len(text.splitlines()) else ""
        raise InvalidConfig(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line.strip()}") from None
    if not isinstance(obj, dict):
        raise InvalidConfig(f"{path}: top-level JSON value must be an object")
    return obj


def load_network(path) -> tuple[NetworkModel, dict]:
    obj = read_json(path)
    try:
        return network_from_json(obj), obj.get("meta", {})
    except InvalidConfig as exc:
        raise InvalidConfig(f"{path}: {exc}") from None


def parse_s0_grid(text: str | None) -> tuple[complex, ...]:
    if text is None:
        return DEFAULT_S0_GRID
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            out.append(complex(tok))
        except ValueError:
            raise InvalidConfig(f"--s0-grid: cannot parse {tok!r} as a complex number like '0+1j'") from None
    if not out:
        raise InvalidConfig("--s0-grid: empty list")
    return tuple(out)


def _planted(meta: dict):
    p = meta.get("planted") if isinstance(meta, dict) else None
    if not p:
        return None
    return tuple(p["group_a"]), tuple(p["group_b"])


def _disturbance(args, n: int) -> DisturbanceSpec:
    node = args.node if args.node is not None else (1 if n > 1 else 0)
    if not 0 <= node < n:
        raise InvalidConfig(f"--node {node} out of range for a {n}-node network")
    return DisturbanceSpec(node, args.magnitude)


def _out_path(args, explicit, default_name: str) -> Path:
    if explicit:
        return Path(explicit)
    return Path(args.out_dir) / default_name


# ---------------------------------------------------------------------------
# commands


def cmd_generate(args) -> int:
    obj = read_json(args.config) if args.config else {}
    if args.seed is not None:
        obj["seed"] = args.seed
    if args.trials is not None:
        obj["trials"] = args.trials
    if args.delta is not None:
        obj["delta"] = args.delta
    sim = dict(obj.get("sim", {}))
    if args.t_final is not None:
        sim["t_final"] = args.t_final
    if args.dt is not None:
        sim["dt"] = args.dt
    if sim:
        obj["sim"] = sim
    cfg = ExperimentConfig.from_json(obj)
    net, gens, w = generate_network(cfg)
    lab = w.labels()
    meta = {
        "config": cfg.to_json(),
        "planted": {"group_a": np.flatnonzero(lab == 0).tolist(), "group_b": np.flatnonzero(lab == 1).tolist()},
    }
    write_json(network_to_json(net, gens, meta), _out_path(args, args.output, "network.json"))
    return EXIT_OK


def cmd_cluster(args) -> int:
    net, _ = load_network(args.model)
    part = spectral_cluster(net.laplacian)
    if not part.isolated:
        log.warning("second and third Laplacian eigenvalues coincide; the partition is not unique")
    write_json(part.to_json(), args.output or "-")
    return EXIT_OK


def _load_partition(path) -> Partition:
    obj = read_json(path)
    try:
        return Partition.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidConfig(f"{path}: bad partition ({exc})") from None


def cmd_reduce(args) -> int:
    net, _ = load_network(args.model)
    part = _load_partition(args.partition) if args.partition else None
    write_json(reduce_network(net, part).to_json(), args.output or "-")
    return EXIT_OK


def _simulate(net, rm, args):
    dist = _disturbance(args, net.n)
    return response_report(net, rm, dist, args.t_final or T_FINAL, args.dt or DT)


def cmd_simulate(args) -> int:
    net, _ = load_network(args.model)
    if args.reduced:
        try:
            rm = ReducedModel.from_json(read_json(args.reduced))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidConfig(f"{args.reduced}: bad reduced model ({exc})") from None
    else:
        rm = reduce_network(net)
    rec = _simulate(net, rm, args)
    csv_path = _out_path(args, args.output, "response.csv")
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    rec.write_csv(csv_path)
    if args.plot:
        from .plotting import plot_response

        plot_response(rec, csv_path.with_suffix(".png"))
    return EXIT_OK


def pipeline_report(net: NetworkModel, rm: ReducedModel, rec, s0_grid, planted=None) -> dict:
    eig = laplacian_eig(net.laplacian)
    thm1, thm2 = [], []
    for s0 in s0_grid:
        s0 = complex(s0)
        entry = {"s0": [s0.real, s0.imag]}
        try:
            chk = theorem1_bound(net, s0, eig)
            entry.update(lhs=chk.lhs, rhs=chk.rhs, applicable=chk.applicable,
                         holds=bool(not chk.applicable or chk.lhs <= chk.rhs + 1e-9))
            t2 = evaluate_t2(net, fiedler_pair(eig), s0)
            thm2.append(float(np.linalg.norm(t2 - lift_reduced(rm, s0), 2) / np.linalg.norm(t2, 2)))
        except NetredError as exc:
            entry.update(error=f"{type(exc).__name__}: {exc}")
        thm1.append(entry)
    report = {
        "schema_version": SCHEMA_VERSION,
        "n": net.n,
        "lambda2": eig.lambda2,
        "lambda3": eig.lambda3 if net.n > 2 else None,
        "fiedler_isolated": rm.partition.isolated,
        "groups": {"a": len(rm.partition.group_a), "b": len(rm.partition.group_b)},
        "l_hat_weight": rm.l_hat_weight,
        "theorem1": thm1,
        "theorem2_max_relative_residual": max(thm2) if thm2 else None,
        "rms": {
            "to_group_mean": {"a": rec.rms_to_mean[0], "b": rec.rms_to_mean[1]},
            "to_members_max": {"a": float(np.max(rec.rms_to_members[0])),
                               "b": float(np.max(rec.rms_to_members[1]))},
        },
        "steady_state": rec.steady_state(),
    }
    if planted is not None:
        report["partition_mismatch"] = partition_mismatch(rm.partition, planted)
    return report


def cmd_pipeline(args) -> int:
    net, meta = load_network(args.model)
    grid = parse_s0_grid(args.s0_grid)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    part = spectral_cluster(net.laplacian)
    rm = reduce_network(net, part)
    rec = _simulate(net, rm, args)
    write_json(part.to_json(), out / "partition.json")
    write_json(rm.to_json(), out / "reduced.json")
    rec.write_csv(out / "response.csv")
    write_json(pipeline_report(net, rm, rec, grid, _planted(meta)), out / "report.json")
    if not args.no_plot:
        from .plotting import plot_response

        plot_response(rec, out / "response.png")
    return EXIT_OK


def cmd_validate(args) -> int:
    grid = parse_s0_grid(args.s0_grid) if args.s0_grid else None
    if args.trials is not None and args.trials < 1:
        raise InvalidConfig("--trials must be >= 1")
    if not 0 < args.delta < 1:
        raise InvalidConfig("--delta must lie in (0, 1)")
    report = run_suite(args.suite, seed=args.seed, trials=args.trials, delta=args.delta, s0_grid=grid)
    write_json(report, args.output or "-")
    return EXIT_OK if report["passed"] else EXIT_SUITE_FAILED


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="netred", description="Two-group reduction of networked LTI systems.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed_default=None):
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--out-dir", default=".", help="directory for default output files")

    def sim_flags(p):
        p.add_argument("--t-final", type=float, default=None, help=f"horizon in seconds (default {T_FINAL})")
        p.add_argument("--dt", type=float, default=None, help=f"RK4 step (default {DT})")
        p.add_argument("--node", type=int, default=None, help="disturbed node (default 1)")
        p.add_argument("--magnitude", type=float, default=1.0, help="step size")

    p = sub.add_parser("generate", help="sample a random block-model power network")
    common(p)
    p.add_argument("--config", help="ExperimentConfig JSON; omitted fields take the synthetic defaults")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--t-final", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("-o", "--output", help="network file (default OUT_DIR/network.json; '-' for stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("cluster", help="spectral two-way partition of a network's Laplacian")
    p.add_argument("model")
    p.add_argument("-o", "--output", help="partition JSON (default stdout)")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("reduce", help="build the two-node reduced model")
    p.add_argument("model")
    p.add_argument("--partition", help="use this partition instead of clustering")
    p.add_argument("-o", "--output", help="reduced model JSON (default stdout)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("simulate", help="step responses of the full and reduced networks")
    p.add_argument("model")
    p.add_argument("--reduced", help="reduced model JSON (default: reduce the model)")
    p.add_argument("--out-dir", default=".")
    p.add_argument("-o", "--output", help="response CSV (default OUT_DIR/response.csv)")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to the CSV")
    sim_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pipeline", help="cluster, reduce, simulate and report")
    p.add_argument("model")
    p.add_argument("--out-dir", default="netred_out")
    p.add_argument("--s0-grid", help="comma-separated complex points, e.g. '0+0.1j,0+1j'")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG figure")
    sim_flags(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("validate", help="run a seeded property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None, help="default depends on the suite")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--s0-grid", help="frequency points for thm1")
    p.add_argument("-o", "--output", help="report JSON (default stdout)")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (NetredError, ValueError, OSError) as exc:
        print(f"netred {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
