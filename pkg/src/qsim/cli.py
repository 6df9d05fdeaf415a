"""Command-line front end.

    qsim run [options] FILE      simulate a circuit file ('-' for stdin)
    qsim gen {random|ghz|bv} N   emit a benchmark circuit on stdout
    qsim check [options]         differential test against the dense oracle

Exit codes: 0 success, 1 failure/internal error, 2 parse or usage error,
3 node budget exceeded (memory-out analog), 4 time limit hit (timeout
analog).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import resource
import sys
import time

from . import __version__
from .algebra import RootTwoRational
from .bdd import DEFAULT_NODE_BUDGET, NodeBudgetExceeded
from .circuit import Circuit, ParseError, gen_bv, gen_ghz, gen_random, parse, serialize
from .gates import SimulationTimeout, run_circuit
from .measure import build_hyperfunction
from .oracle import compare, simulate_dense
from .state import DEFAULT_ENUM_LIMIT
from .util import run_with_large_stack

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_NODE_BUDGET = 3
EXIT_TIME_LIMIT = 4

SCHEMA_VERSION = 1

#: joint-outcome distributions larger than this are truncated in reports.
OUTCOME_CAP = 4096


def _prob_json(p: RootTwoRational) -> dict:
    return {"exact": p.exact_str(), "float": float(p)}


def _env_node_budget() -> int:
    raw = os.environ.get("QSIM_NODE_BUDGET")
    if raw is None:
        return DEFAULT_NODE_BUDGET
    try:
        value = int(raw)
        if value < 1:
            raise ValueError
    except ValueError:
        raise SystemExit(f"invalid QSIM_NODE_BUDGET value {raw!r}")
    return value


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="qsim", description=__doc__,
                                  formatter_class=argparse.RawDescriptionHelpFormatter)
    top.add_argument("--version", action="version", version=f"qsim {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a circuit file")
    run.add_argument("file", help="circuit path, or '-' for stdin")
    run.add_argument("--r-init", type=int, default=32,
                     help="initial slice width in bits (default 32)")
    run.add_argument("--reorder", action="store_true",
                     help="enable sifting when the node count doubles")
    run.add_argument("--node-budget", type=int, default=None,
                     help="max live BDD nodes (default QSIM_NODE_BUDGET or 2^26)")
    run.add_argument("--time-limit", type=float, default=None, metavar="SEC",
                     help="abort simulation after SEC seconds")
    run.add_argument("--shots", type=int, default=0,
                     help="number of measurement samples (default 0)")
    run.add_argument("--seed", type=int, default=0, help="sampling seed")
    run.add_argument("--dump-amplitudes", action="store_true",
                     help="list nonzero amplitudes (small n only)")
    run.add_argument("--format", choices=("json", "text"), default="text")
    run.add_argument("--enum-limit", type=int, default=DEFAULT_ENUM_LIMIT,
                     help="qubit cap for amplitude enumeration (default 16)")
    run.add_argument("--no-norm-check", action="store_true",
                     help="skip the exact total-probability report")

    gen = sub.add_parser("gen", help="emit a benchmark circuit")
    gen.add_argument("family", choices=("random", "ghz", "bv"))
    gen.add_argument("n", type=int, help="qubit count")
    gen.add_argument("--seed", type=int, default=0,
                     help="seed for the random family")
    gen.add_argument("--hidden", default=None,
                     help="hidden bitstring for the bv family (default all ones)")

    check = sub.add_parser("check", help="cross-check against the dense oracle")
    check.add_argument("--n-max", type=int, default=10)
    check.add_argument("--cases", type=int, default=20,
                       help="random circuits per qubit count (default 20)")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--r-init", type=int, default=32)
    check.add_argument("--format", choices=("json", "text"), default="text")
    return top


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "gen":
        return _cmd_gen(args)
    return _cmd_check(args)


# ----------------------------------------------------------------------
# run


def _cmd_run(args) -> int:
    if args.r_init < 1:
        print("error: --r-init must be at least 1", file=sys.stderr)
        return EXIT_PARSE
    if args.shots < 0:
        print("error: --shots must be non-negative", file=sys.stderr)
        return EXIT_PARSE
    try:
        text = sys.stdin.read() if args.file == "-" else _read_file(args.file)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    try:
        circuit = parse(text)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    budget = args.node_budget if args.node_budget is not None else _env_node_budget()
    started = time.monotonic()
    deadline = None if args.time_limit is None else started + args.time_limit
    try:
        report = run_with_large_stack(_simulate, circuit, args, budget, deadline)
    except NodeBudgetExceeded as exc:
        print(f"node budget exceeded: {exc}", file=sys.stderr)
        return EXIT_NODE_BUDGET
    except SimulationTimeout as exc:
        print(f"time limit exceeded: {exc}", file=sys.stderr)
        return EXIT_TIME_LIMIT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report["timing"] = {
        "wall_time_s": round(time.monotonic() - started, 6),
        "max_rss_mb": round(
            resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0, 3),
    }
    _emit_run_report(report, args.format)
    return EXIT_OK


def _read_file(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _simulate(circuit: Circuit, args, budget: int, deadline) -> dict:
    state, gate_stats = run_circuit(circuit, r_init=args.r_init,
                                    node_budget=budget, deadline=deadline,
                                    reorder=args.reorder)
    report: dict = {
        "schema": SCHEMA_VERSION,
        "status": "ok",
        "circuit": {
            "qubits": circuit.n,
            "gates": len(circuit.gates),
            "measured": list(circuit.measure),
        },
        "config": {
            "r_init": args.r_init,
            "node_budget": budget,
            "reorder": bool(args.reorder),
            "seed": args.seed,
            "shots": args.shots,
        },
        "result": {
            "r": state.r,
            "k": state.k,
            "width_growths": sum(s.grew for s in gate_stats),
        },
    }

    if args.dump_amplitudes:
        if circuit.n > args.enum_limit:
            raise ValueError(
                f"--dump-amplitudes needs n <= {args.enum_limit} (have {circuit.n})")
        report["result"]["amplitude_dump"] = state.dump_amplitudes(args.enum_limit)

    hyper = None
    if circuit.measure:
        hyper = build_hyperfunction(state, circuit.measure)
        if not args.no_norm_check:
            report["result"]["normalization"] = _prob_json(hyper.total_probability())
        p0, p1 = hyper.outcome_probabilities()
        report["result"]["marginal"] = {
            "qubit": circuit.measure[0],
            "p0": _prob_json(p0),
            "p1": _prob_json(p1),
        }
        probs = {}
        truncated = False
        for bits, p in hyper.iter_outcomes():
            if len(probs) >= OUTCOME_CAP:
                truncated = True
                break
            probs[bits] = _prob_json(p)
        report["result"]["probabilities"] = probs
        report["result"]["probabilities_truncated"] = truncated
        if args.shots > 0:
            hist = hyper.sample(args.shots, args.seed)
            sampled = {bits: {"count": count,
                              **_prob_json(hyper.joint_probability(bits))}
                       for bits, count in sorted(hist.items())}
            report["result"]["samples"] = {
                "shots": args.shots,
                "seed": args.seed,
                "histogram": sampled,
            }
    elif not args.no_norm_check:
        hyper = build_hyperfunction(state, ())
        report["result"]["normalization"] = _prob_json(hyper.total_probability())

    stats = state.engine.stats()
    stats["state_nodes"] = state.node_count()
    stats["cache_hit_rate"] = round(stats["cache_hit_rate"], 6)
    report["stats"] = stats
    return report


def _emit_run_report(report: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, sort_keys=True))
        return
    res = report["result"]
    circ = report["circuit"]
    print(f"qubits {circ['qubits']}  gates {circ['gates']}  "
          f"r {res['r']}  k {res['k']}  growths {res['width_growths']}")
    if "normalization" in res:
        norm = res["normalization"]
        print(f"total probability: {norm['exact']}  (~{norm['float']:.6g})")
    if "marginal" in res:
        m = res["marginal"]
        print(f"qubit {m['qubit']} marginal: p0 = {m['p0']['exact']} "
              f"(~{m['p0']['float']:.6g}), p1 = {m['p1']['exact']} "
              f"(~{m['p1']['float']:.6g})")
    for bits, p in res.get("probabilities", {}).items():
        print(f"Pr[{bits}] = {p['exact']}  (~{p['float']:.6g})")
    if res.get("probabilities_truncated"):
        print(f"(outcome list truncated at {OUTCOME_CAP})")
    samples = res.get("samples")
    if samples:
        print(f"samples: {samples['shots']} shots, seed {samples['seed']}")
        for bits, entry in samples["histogram"].items():
            print(f"  {bits}: {entry['count']}  p = {entry['exact']}")
    for line in res.get("amplitude_dump", []):
        print(line)
    stats = report["stats"]
    timing = report["timing"]
    print(f"nodes: live {stats['live_nodes']}  peak {stats['peak_nodes']}  "
          f"state {stats['state_nodes']}")
    print(f"time: {timing['wall_time_s']:.3f} s  rss {timing['max_rss_mb']:.1f} MB")


# ----------------------------------------------------------------------
# gen


def _cmd_gen(args) -> int:
    try:
        if args.family == "random":
            circuit = gen_random(args.n, args.seed)
        elif args.family == "ghz":
            circuit = gen_ghz(args.n)
        else:
            circuit = gen_bv(args.n, hidden=args.hidden)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    sys.stdout.write(serialize(circuit))
    return EXIT_OK


# ----------------------------------------------------------------------
# check


def _cmd_check(args) -> int:
    if args.n_max > 16:
        print("error: --n-max is limited to 16", file=sys.stderr)
        return EXIT_PARSE
    summary = run_with_large_stack(_run_check, args)
    if args.format == "json":
        print(json.dumps(summary, sort_keys=True))
    else:
        print(f"checked {summary['cases_run']} circuits "
              f"(n = 2..{args.n_max}, {args.cases} per size): {summary['status']}")
        if summary["status"] == "fail":
            print(json.dumps(summary["first_divergence"], sort_keys=True))
    return EXIT_OK if summary["status"] == "pass" else EXIT_FAIL


def _run_check(args) -> dict:
    rng = random.Random(args.seed)
    cases_run = 0
    for n in range(2, args.n_max + 1):
        for case in range(args.cases):
            circuit_seed = rng.getrandbits(32)
            circuit = gen_random(n, circuit_seed)
            state, _ = run_circuit(circuit, r_init=args.r_init)
            dense = simulate_dense(circuit)
            report = compare(state, dense)
            cases_run += 1
            if not report.equal:
                detail = report.to_dict()
                detail.update({"n": n, "case": case, "circuit_seed": circuit_seed})
                return {"schema": SCHEMA_VERSION, "status": "fail",
                        "cases_run": cases_run, "first_divergence": detail}
    return {"schema": SCHEMA_VERSION, "status": "pass", "cases_run": cases_run}


if __name__ == "__main__":
    sys.exit(main())
