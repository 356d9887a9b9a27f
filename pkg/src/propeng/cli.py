"""Command-line front end: validate problem files, run goals or explicit
reducer lists, and emit reduced problems, traces and statistics.

Exit status: 0 converged (or stopped early on an emptied component), 1 input
or configuration error, 2 step cap exceeded, 3 equivalence check failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import consistency, csp as csp_mod, engine, reducers, textio
from .errors import PropagationError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="propeng",
        description="Constraint propagation by generic fixpoint iteration.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="reduce a problem file")
    run_p.add_argument("input", help="problem file")
    run_p.add_argument("--goal", help="arc | path | dir-arc:<order> | "
                                      "dir-path:<order> | rel:<m>")
    run_p.add_argument("--reducers", help="comma-separated reducer names, "
                       "e.g. pi1@c1,lineq@c2,rho@c1,c2")
    run_p.add_argument("--mode", choices=list(engine.MODES), default="ci")
    run_p.add_argument("--strategy", default="det",
                       choices=["det", "seeded", "lifo", "roundrobin", "block"])
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--max-steps", type=int, default=engine.DEFAULT_STEP_CAP)
    run_p.add_argument("--early-exit", action="store_true",
                       help="stop as soon as a component becomes empty")
    run_p.add_argument("--trace", action="store_true", help="print the step log")
    run_p.add_argument("--check-equivalence", action="store_true",
                       help="verify solutions are preserved (brute force)")
    run_p.add_argument("--format", choices=["text", "json"], default="text")

    val_p = sub.add_parser("validate", help="check a problem file")
    val_p.add_argument("input", help="problem file")
    return parser


def _load(path: str) -> csp_mod.CSP:
    with open(path, "r", encoding="utf-8") as fh:
        problem = textio.parse_csp(fh.read())
    issues = csp_mod.validate(problem)
    if issues:
        raise PropagationError("invalid problem:\n  " + "\n  ".join(issues))
    return problem


def _trace_lines(trace: engine.RunTrace) -> list[str]:
    return [
        f"step={k} fn={s.fid} changed={int(s.changed)} "
        f"comps={','.join(map(str, s.changed_components))}"
        for k, s in enumerate(trace.steps, start=1)
    ]


def cmd_run(args) -> int:
    if (args.goal is None) == (args.reducers is None):
        print("error: exactly one of --goal / --reducers is required", file=sys.stderr)
        return 1
    try:
        problem = _load(args.input)
        strategy = engine.make_strategy(args.strategy, args.seed)
        if args.goal is not None:
            goal = consistency.parse_goal(args.goal)
            reduced, trace = consistency.achieve(
                problem, goal, mode=args.mode, strategy=strategy,
                step_cap=args.max_steps, early_exit=args.early_exit)
        else:
            names = [s.strip() for s in args.reducers.split(",")]
            names = _regroup_reducer_names(names)
            setup = reducers.build_named_reducers(problem, names)
            result = engine.run(setup.functions, setup.start, mode=args.mode,
                                strategy=strategy, step_cap=args.max_steps,
                                early_exit=args.early_exit)
            reduced, trace = setup.rebuild(problem, result.value), result.trace
        equivalence = None
        if args.check_equivalence:
            equivalence = csp_mod.equivalent(problem, reduced)
    except PropagationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.format == "json":
        payload = {
            "outcome": trace.outcome.value,
            "applications": trace.total_applications,
            "csp": textio.csp_to_obj(reduced),
        }
        if args.trace:
            payload["trace"] = [
                {"step": k, "fn": s.fid, "changed": int(s.changed),
                 "comps": list(s.changed_components)}
                for k, s in enumerate(trace.steps, start=1)]
        if equivalence is not None:
            payload["equivalence"] = "PASS" if equivalence else "FAIL"
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        if args.trace:
            for line in _trace_lines(trace):
                print(line)
        sys.stdout.write(textio.serialize_csp(reduced))
        print(f"# outcome: {trace.outcome.value} applications={trace.total_applications}")
        if equivalence is not None:
            print(f"# equivalence: {'PASS' if equivalence else 'FAIL'}")

    if equivalence is False:
        return 3
    if trace.outcome is engine.Outcome.STEP_LIMIT:
        return 2
    return 0


def _regroup_reducer_names(names: list[str]) -> list[str]:
    """Reducer names themselves contain commas (rho@c1,c2), so rejoin the
    splits: a fragment without '@' belongs to the previous name."""
    out: list[str] = []
    for frag in names:
        if "@" in frag or not out:
            out.append(frag)
        else:
            out[-1] += "," + frag
    return [n for n in out if n]


def cmd_validate(args) -> int:
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            problem = textio.parse_csp(fh.read())
    except (PropagationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    issues = csp_mod.validate(problem)
    for issue in issues:
        print(issue, file=sys.stderr)
    if issues:
        return 1
    print(f"ok: {problem.arity} domains, {len(problem.constraints)} constraints")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    return cmd_validate(args)


if __name__ == "__main__":
    sys.exit(main())
