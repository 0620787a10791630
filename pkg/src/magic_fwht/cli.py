"""Command-line interface: ``magic-fwht exact|mc|mh|bench|experiment <id>``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import statevector as sv
from .clifford import apply_circuit, build_brickwall, random_stabilizer_product_state
from .experiments import (
    EXPERIMENTS,
    WORKERS_ENV,
    EstimatorSpec,
    ExperimentConfig,
    run_experiment,
    run_runtime_scaling,
    scaling_ratios,
    t_product_state,
)
from .measures import DEFAULT_ALPHA, DEFAULT_EPS, exact_magic
from .metropolis import MhConfig, mh_magic
from .montecarlo import McConfig, mc_magic

STATES = ("haar", "tproduct", "zero", "stabilizer", "scrambled-tproduct")


def parse_int_list(text: str) -> list[int]:
    """``"10"``, ``"8,10,12"`` or ``"8-12"`` (inclusive)."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty integer list {text!r}")
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--qubits", type=parse_int_list, default=[10], help="qubit count(s): 10, 8,10 or 8-12 (default 10)")
    p.add_argument("--seed", type=int, default=0, help="root RNG seed (default 0)")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="Renyi order, > 0 and != 1 (default 2)")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS, help="nullity tolerance on ||c_P| - 1| (default 1e-7)")
    p.add_argument("--out", help="write the result to this path instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="output format (default json)")


def _add_state(p: argparse.ArgumentParser) -> None:
    p.add_argument("--state", choices=STATES, default="haar", help="input state when --load-state is not given (default haar)")
    p.add_argument("--load-state", help="read the input state from an MFW1 binary dump")
    p.add_argument("--dump-state", help="write the input state to an MFW1 binary dump")
    p.add_argument("--state-depth", type=int, default=None,
                   help="Clifford depth used to build the 'scrambled-tproduct' state (default 2N)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magic-fwht",
        description="Stabilizer Renyi entropy and stabilizer nullity via fast Walsh-Hadamard Pauli enumeration.",
        epilog=f"Set {WORKERS_ENV}=k to run experiment realizations in k worker processes (default 1).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact M_alpha and nullity by a full x sweep")
    _add_common(p)
    _add_state(p)

    p = sub.add_parser("mc", help="Monte-Carlo estimate over sampled x families")
    _add_common(p)
    _add_state(p)
    p.add_argument("--samples", type=int, default=64, help="number of distinct x masks (default 64)")
    p.add_argument("--precondition-depth", "--depth", dest="precondition_depth", type=int, default=0,
                   help="random brick-wall Clifford layers applied before sampling (default 0)")
    p.add_argument("--no-zero-family", action="store_true", help="sample x = 0 like any other mask")
    p.add_argument("--jackknife", action="store_true", help="also report a jackknife error estimate")

    p = sub.add_parser("mh", help="Metropolis-Hastings sampling of Pauli strings (alpha = 2)")
    _add_common(p)
    _add_state(p)
    p.add_argument("--samples", type=int, default=100_000, help="chain length including burn-in (default 100000)")
    p.add_argument("--burn-in", type=int, default=None, help="discarded initial steps (default 10%% of samples)")

    p = sub.add_parser("bench", help="runtime of brute-force versus FWHT enumeration")
    _add_common(p)
    p.add_argument("--repetitions", type=int, default=5, help="timed repetitions per N, median reported (default 5)")

    p = sub.add_parser("experiment", help="run one of the Clifford+T experiments")
    p.add_argument("id", choices=EXPERIMENTS)
    _add_common(p)
    p.add_argument("--depth", type=parse_int_list, default=[0], help="Clifford depth(s) N_C (default 0)")
    p.add_argument("--block-size", type=parse_int_list, default=[1], help="T block size(s) N_B (default 1)")
    p.add_argument("--cycles", type=int, default=1, help="injection cycles (default 1)")
    p.add_argument("--total-t", type=int, default=None, help="T budget for doping-blocks (default lcm(N_B) * cycles)")
    p.add_argument("--realizations", type=int, default=80, help="random circuit instances per point (default 80)")
    p.add_argument("--repetitions", type=int, default=5, help="timed repetitions for runtime-scaling (default 5)")
    p.add_argument("--estimator", choices=("exact", "mc", "mh"), default="exact", help="estimator (default exact)")
    p.add_argument("--samples", type=int, default=None, help="sample count for mc/mh estimators")
    p.add_argument("--boundary", choices=("open", "periodic"), default="open", help="brick-wall boundary (default open)")
    return parser


def _input_state(args) -> sv.StateVector:
    if args.load_state:
        state = sv.load_state(args.load_state)
    else:
        n = args.qubits[0]
        if args.state == "haar":
            state = sv.make_haar_random_state(n, args.seed)
        elif args.state == "tproduct":
            state = t_product_state(n)
        elif args.state == "zero":
            state = sv.make_basis_state(n, 0)
        elif args.state == "stabilizer":
            state = random_stabilizer_product_state(n, args.seed)
            apply_circuit(state, build_brickwall(n, 4 * n, rng=args.seed + 1))
        else:
            depth = 2 * n if args.state_depth is None else args.state_depth
            state = apply_circuit(t_product_state(n), build_brickwall(n, depth, rng=args.seed + 1))
    if args.dump_state:
        sv.dump_state(state, args.dump_state)
    return state


def _render(data, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"
    rows = data if isinstance(data, list) else [data]
    keys: list[str] = []
    for row in rows:
        keys.extend(k for k in row if k not in keys)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n", restval="")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "exact":
            result = exact_magic(_input_state(args), args.alpha, args.eps).to_dict()
        elif args.command == "mc":
            cfg = McConfig(
                args.samples, args.alpha, args.seed,
                include_zero_family=not args.no_zero_family,
                precondition_depth=args.precondition_depth,
                jackknife=args.jackknife,
            )
            result = mc_magic(_input_state(args), cfg).to_dict()
        elif args.command == "mh":
            if args.alpha != 2.0:
                raise ValueError("mh only estimates alpha = 2")
            result = mh_magic(_input_state(args), MhConfig(args.samples, args.burn_in, seed=args.seed)).to_dict()
        elif args.command == "bench":
            record = run_runtime_scaling(args.qubits, args.repetitions, args.seed)
            if args.format == "csv":
                _emit(record.to_csv(), args.out)
                return 0
            result = {
                "timings": record.timings,
                "exact_ratios": scaling_ratios(record, "exact"),
                "brute_ratios": scaling_ratios(record, "brute"),
                "summary": record.summaries(),
            }
        else:
            spec = EstimatorSpec(args.estimator, args.samples, alpha=args.alpha, eps=args.eps)
            cfg = ExperimentConfig(
                args.id, args.qubits, args.depth, args.block_size, args.cycles, args.total_t,
                args.realizations, args.repetitions, spec, args.seed, args.boundary,
            )
            record = run_experiment(cfg)
            if args.format == "csv":
                _emit(record.to_csv(), args.out)
            else:
                _emit(record.to_json(indent=2) + "\n", args.out)
            return 0
    except ValueError as exc:
        print(f"magic-fwht: error: {exc}", file=sys.stderr)
        return 2
    _emit(_render(result, args.format), args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
