"""Command-line interface.

Exit codes of ``check``/``synth``: 0 realizable, 1 not boundedly
realizable, 2 unknown (iteration budget exhausted), 64 usage or parse
errors.  Report lines meant for machines are prefixed (``verdict:``,
``K:``, ``episodes-passed:``).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .arena import ArenaError, SPLIT_DEFAULT, SPLIT_FIG_STYLE, build_graph, export_dot
from .fragments import classify
from .parser import SpecError, SpecProblem, VarTable, parse_fo, parse_spec, fo_to_sexp
from .qe import QeError, TheoryBackend
from .semantics import Trace, evaluate, parse_number
from .strategy import (
    StrategyArtifact,
    StrategyError,
    init_play,
    load_artifact,
    respond,
    save_artifact,
    simulate,
    state_trace,
)
from .winning import NOT_BOUNDEDLY_REALIZABLE, REALIZABLE, UNKNOWN, WinTable, iterate_win

EXIT_REALIZABLE = 0
EXIT_NOT_REALIZABLE = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64

VERDICT_EXIT = {
    REALIZABLE: EXIT_REALIZABLE,
    NOT_BOUNDEDLY_REALIZABLE: EXIT_NOT_REALIZABLE,
    UNKNOWN: EXIT_UNKNOWN,
}


def _load_problem(path: str) -> SpecProblem:
    return parse_spec(Path(path).read_text())


def _run_check(problem: SpecProblem, max_iter: int, split: str):
    graph = build_graph(problem, split_mode=split)
    backend = TheoryBackend(problem.theory)
    table = iterate_win(graph, backend, max_iter)
    return graph, table


def _print_verdict(table: WinTable, graph) -> None:
    print(f"verdict: {table.verdict}")
    if table.verdict == REALIZABLE:
        print(f"K: {table.bound}")
    if table.verdict == UNKNOWN:
        print(f"iterations: {table.iterations_used}")
        print("note: the procedure decides bounded realizability only; an exhausted "
              "budget distinguishes neither realizable-but-unbounded instances nor "
              "divergence on unrealizable input")
        print(f"last-initial-win: {fo_to_sexp(table.last_initial)}")
    print(f"and-nodes: {len(graph.and_nodes)}")
    print(f"or-nodes: {len(graph.or_nodes)}")


def cmd_check(args) -> int:
    problem = _load_problem(args.spec)
    graph, table = _run_check(problem, args.max_iter, args.split)
    _print_verdict(table, graph)
    return VERDICT_EXIT[table.verdict]


def cmd_synth(args) -> int:
    problem = _load_problem(args.spec)
    graph, table = _run_check(problem, args.max_iter, args.split)
    _print_verdict(table, graph)
    if table.verdict != REALIZABLE:
        print("no strategy extracted", file=sys.stderr)
        return VERDICT_EXIT[table.verdict]
    artifact = StrategyArtifact.from_synthesis(problem, graph, table)
    Path(args.out).write_text(save_artifact(artifact))
    print(f"artifact: {args.out}")
    return EXIT_REALIZABLE


def cmd_play(args) -> int:
    artifact = load_artifact(Path(args.artifact).read_text())
    state = init_play(artifact)
    print(f"playing against the controller; K = {artifact.bound}")
    print("enter one value per environment variable when prompted (blank line quits)")
    while not state.done:
        beta = {}
        for name, sort in artifact.env_vars:
            while True:
                try:
                    raw = input(f"[step {state.k}] {name} ({sort}) = ")
                except EOFError:
                    print()
                    return EXIT_REALIZABLE
                if not raw.strip():
                    return EXIT_REALIZABLE
                try:
                    value = parse_number(raw)
                    if sort == "int" and value.denominator != 1:
                        raise ValueError("integer required")
                except (ValueError, ZeroDivisionError) as exc:
                    print(f"  cannot read {raw!r}: {exc}; try again")
                    continue
                beta[name] = value
                break
        gamma, state = respond(artifact, state, beta)
        shown = ", ".join(f"{n}={v}" for n, v in sorted(gamma.items()))
        node = artifact.graph.node(state.current)
        print(f"  agent: {shown}")
        print(f"  node: {node.label}" + ("  (accepting)" if node.is_final else ""))
    trace = state_trace(artifact, state)
    if trace is not None:
        verdict = evaluate(trace, artifact.effective)
        print(f"trace: {trace.to_json()}")
        print(f"satisfied: {'yes' if verdict else 'no'}")
    else:
        print("satisfied: yes (empty obligations)")
    return EXIT_REALIZABLE


def cmd_simulate(args) -> int:
    artifact = load_artifact(Path(args.artifact).read_text())
    report = simulate(artifact, episodes=args.episodes, seed=args.seed,
                      adversary=args.adversary)
    print(f"episodes-passed: {report.passed}/{report.episodes}")
    for failure in report.failures[:3]:
        print(f"counterexample: {failure.to_json()}")
    return EXIT_REALIZABLE if report.all_passed else 1


def cmd_trace_check(args) -> int:
    problem = _load_problem(args.spec)
    trace = Trace.from_json(Path(args.trace).read_text())
    if trace.theory != problem.theory:
        raise SpecError(f"trace theory {trace.theory} does not match the spec")
    expected = {n for n, _ in problem.env_vars + problem.agent_vars}
    got = set(trace.steps[0])
    if expected != got:
        raise SpecError(f"trace variables {sorted(got)} do not match {sorted(expected)}")
    ok = evaluate(trace, problem.effective)
    print("satisfied" if ok else "violated")
    return EXIT_REALIZABLE if ok else 1


def cmd_graph(args) -> int:
    problem = _load_problem(args.spec)
    graph = build_graph(problem, split_mode=args.split)
    dot = export_dot(graph)
    if args.dot:
        Path(args.dot).write_text(dot)
        print(f"dot: {args.dot}")
    else:
        print(dot, end="")
    return EXIT_REALIZABLE


def cmd_fragment(args) -> int:
    problem = _load_problem(args.spec)
    report = classify(problem, unroll_depth=args.unroll_depth)
    for line in report.lines():
        print(line)
    return EXIT_REALIZABLE


def cmd_qe(args) -> int:
    text = Path(args.formula).read_text()
    backend = TheoryBackend(args.theory)
    table = VarTable({}, args.theory)
    # free variables default to the theory sort and may appear undeclared
    for token in text.replace("(", " ( ").replace(")", " ) ").split():
        if token not in ("(", ")") and token[0].isalpha() and token not in (
                "and", "or", "not", "implies", "exists", "forall", "pre",
                "true", "false", "equiv", "real", "int", "distinct"):
            table.sorts.setdefault(token, backend.sort)
    formula = parse_fo(text, table)
    result = backend.qe(formula)
    print(fo_to_sexp(result))
    return EXIT_REALIZABLE


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(max_iter=args.max_iter, session_ttl=args.session_ttl)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_REALIZABLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lbsynth",
        description="Reactive synthesis for finite-trace temporal specifications "
                    "over linear arithmetic with lookback.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_split(p):
        p.add_argument("--split", choices=[SPLIT_DEFAULT, SPLIT_FIG_STYLE],
                       default=SPLIT_DEFAULT,
                       help="atom ownership rule for lookback values of agent variables")

    p = sub.add_parser("check", help="decide bounded realizability")
    p.add_argument("spec")
    p.add_argument("--max-iter", type=int, default=50)
    add_split(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("synth", help="synthesize and save a controller")
    p.add_argument("spec")
    p.add_argument("--out", required=True)
    p.add_argument("--max-iter", type=int, default=50)
    add_split(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("play", help="play the environment interactively")
    p.add_argument("artifact")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("simulate", help="run adversarial episodes and check traces")
    p.add_argument("artifact")
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--adversary", choices=["random", "boundary"], default="random")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("trace-check", help="evaluate a trace file against a spec")
    p.add_argument("spec")
    p.add_argument("trace")
    p.set_defaults(func=cmd_trace_check)

    p = sub.add_parser("graph", help="export the arena as Graphviz DOT")
    p.add_argument("spec")
    p.add_argument("--dot")
    add_split(p)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("fragment", help="classify the specification")
    p.add_argument("spec")
    p.add_argument("--unroll-depth", type=int, default=None)
    p.set_defaults(func=cmd_fragment)

    p = sub.add_parser("qe", help="eliminate quantifiers from a formula file")
    p.add_argument("formula")
    p.add_argument("--theory", choices=["lra", "lia"], required=True)
    p.set_defaults(func=cmd_qe)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=8735)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--session-ttl", type=float, default=3600.0)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, StrategyError, ArenaError, QeError, FileNotFoundError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
