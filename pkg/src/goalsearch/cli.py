"""Command-line interface: run benchmarks, compare runs, generate
corpora, and query the brute-force oracle.

Flags override values from an optional JSON config file, which in turn
overrides built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import (
    CorpusMismatchError,
    RunConfig,
    compare_runs,
    load_report,
    run_benchmark,
)
from .core import EstimationRecipe, RewardSpec
from .mcts import SearchConfig, UcbVariant
from .policies import PolicySpec
from .propcalc import (
    CorpusError,
    OracleBudgetError,
    Task,
    format_formula,
    generate_corpus,
    oracle_solve,
    parse_formula,
    read_corpus,
    write_corpus,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="goalsearch",
        description="Conjecture-aware proof search and benchmarking over a toy calculus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a benchmark over a task corpus")
    run.add_argument("--corpus", help="task corpus (JSON lines)")
    run.add_argument("--out", help="output directory for reports and traces")
    run.add_argument("--config", help="JSON config file; flags override it")
    run.add_argument("--policy", choices=("enumeration", "stochastic", "remote"))
    run.add_argument("--budget", type=int, help="policy-sample budget per repetition")
    run.add_argument("--iterations", type=int, help="search iteration cap")
    run.add_argument("--trials", type=int, help="max expansion trials per node")
    run.add_argument("--children", type=int, help="max children per node")
    run.add_argument("--exploration", type=float, help="UCB exploration constant")
    run.add_argument("--ucb-variant", choices=[v.value for v in UcbVariant])
    run.add_argument("--recipe", choices=[r.value for r in EstimationRecipe])
    run.add_argument("--subgoal-weight", type=float, help="top-of-stack reward weight")
    run.add_argument("--conjecture-weight", type=float)
    run.add_argument("--depth-weight", type=float)
    run.add_argument("--invalid-rate", type=float, help="stochastic policy bad-candidate rate")
    run.add_argument("--endpoint", action="append", default=None,
                     help="remote completion endpoint (repeatable for ensembles)")
    run.add_argument("--seed", type=int)
    run.add_argument("--reps", type=int, help="independent repetitions per task")
    run.add_argument("--workers", type=int, help="parallel task workers")
    run.add_argument("--no-figures", action="store_true")

    compare = sub.add_parser("compare", help="diff two run reports")
    compare.add_argument("--a", required=True, help="report.json of the first run")
    compare.add_argument("--b", required=True, help="report.json of the second run")
    compare.add_argument("--out", help="directory for the delta summary and figure")

    gen = sub.add_parser("gen-corpus", help="generate an oracle-certified corpus")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--min-depth", type=int, default=1)
    gen.add_argument("--max-depth", type=int, default=6)
    gen.add_argument("--out", required=True)

    oracle = sub.add_parser("oracle", help="brute-force a task")
    oracle.add_argument("--corpus", help="look the task up in this corpus")
    oracle.add_argument("--id", help="task id inside --corpus")
    oracle.add_argument("--hyp", action="append", default=[],
                        help='hypothesis as "label: formula" (repeatable)')
    oracle.add_argument("--target", help="target formula text")
    oracle.add_argument("--bound", type=int, default=6, help="proof depth bound")

    return parser


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _pick(cli_value, file_value, default):
    if cli_value is not None:
        return cli_value
    if file_value is not None:
        return file_value
    return default


def _run_config(args: argparse.Namespace) -> RunConfig:
    file_cfg = _load_config_file(args.config)
    defaults = RunConfig(corpus_path="unused")
    search_defaults = SearchConfig()
    reward_defaults = RewardSpec()

    corpus = _pick(args.corpus, file_cfg.get("corpus"), None)
    out = _pick(args.out, file_cfg.get("out"), None)
    if corpus is None:
        raise SystemExit("run: --corpus is required (flag or config file)")

    reward = RewardSpec(
        subgoal_weight=_pick(args.subgoal_weight, file_cfg.get("subgoal_weight"),
                             reward_defaults.subgoal_weight),
        recipe=EstimationRecipe(
            _pick(args.recipe, file_cfg.get("recipe"), reward_defaults.recipe.value)
        ),
        conjecture_weight=_pick(args.conjecture_weight, file_cfg.get("conjecture_weight"),
                                reward_defaults.conjecture_weight),
        depth_weight=_pick(args.depth_weight, file_cfg.get("depth_weight"),
                           reward_defaults.depth_weight),
    )
    search = SearchConfig(
        exploration_c=_pick(args.exploration, file_cfg.get("exploration"),
                            search_defaults.exploration_c),
        max_expansion_trials=_pick(args.trials, file_cfg.get("trials"),
                                   search_defaults.max_expansion_trials),
        max_children=_pick(args.children, file_cfg.get("children"),
                           search_defaults.max_children),
        max_iterations=_pick(args.iterations, file_cfg.get("iterations"),
                             search_defaults.max_iterations),
        ucb_variant=UcbVariant(
            _pick(args.ucb_variant, file_cfg.get("ucb_variant"),
                  search_defaults.ucb_variant.value)
        ),
        reward=reward,
    )
    policy = PolicySpec(
        name=_pick(args.policy, file_cfg.get("policy"), "enumeration"),
        invalid_rate=_pick(args.invalid_rate, file_cfg.get("invalid_rate"), 0.0),
        endpoints=tuple(_pick(args.endpoint, file_cfg.get("endpoints"), ())),
        remote=file_cfg.get("remote", {}),
    )
    return RunConfig(
        corpus_path=corpus,
        search=search,
        policy=policy,
        sample_budget=_pick(args.budget, file_cfg.get("budget"), defaults.sample_budget),
        repetitions=_pick(args.reps, file_cfg.get("reps"), defaults.repetitions),
        workers=_pick(args.workers, file_cfg.get("workers"), defaults.workers),
        output_dir=out,
        seed=_pick(args.seed, file_cfg.get("seed"), defaults.seed),
        figures=not args.no_figures and file_cfg.get("figures", True),
    )


def _cmd_run(args: argparse.Namespace) -> int:
    config = _run_config(args)
    try:
        report = run_benchmark(config)
    except CorpusError as exc:
        print(f"corpus error: {exc}", file=sys.stderr)
        return 2
    print(f"solved {report.pass_at_k} at pass@{report.sample_budget}")
    if config.output_dir:
        print(f"report written to {Path(config.output_dir) / 'report.json'}")
    errored = sum(1 for r in report.results if r.outcome == "Errored")
    if errored and errored == report.total_count:
        print("every task errored", file=sys.stderr)
        return 3
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    try:
        summary = compare_runs(load_report(args.a), load_report(args.b))
    except CorpusMismatchError as exc:
        print(f"compare error: {exc}", file=sys.stderr)
        return 2
    except CorpusError as exc:
        print(f"compare error: {exc}", file=sys.stderr)
        return 2
    record = summary.to_record()
    print(
        f"A solved {summary.solved_a}/{summary.total}, "
        f"B solved {summary.solved_b}/{summary.total} (delta {record['delta_rendered']})"
    )
    for side, ids in (("only A", summary.only_a), ("only B", summary.only_b)):
        if ids:
            print(f"{side}: {', '.join(ids)}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "compare.json").write_text(
            json.dumps(record, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
        from . import figures

        figures.render_compare_figure(summary, out)
        print(f"summary written to {out / 'compare.json'}")
    return 0


def _cmd_gen_corpus(args: argparse.Namespace) -> int:
    try:
        tasks = generate_corpus(
            seed=args.seed, count=args.count,
            min_depth=args.min_depth, max_depth=args.max_depth,
        )
    except CorpusError as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return 2
    write_corpus(tasks, args.out)
    print(f"wrote {len(tasks)} oracle-certified tasks to {args.out}")
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    if args.corpus and args.id:
        tasks = {t.id: t for t in read_corpus(args.corpus)}
        if args.id not in tasks:
            print(f"no task {args.id!r} in {args.corpus}", file=sys.stderr)
            return 2
        task = tasks[args.id]
    elif args.target:
        hyps = []
        for entry in args.hyp:
            label, _, text = entry.partition(":")
            hyps.append((label.strip(), parse_formula(text)))
        task = Task("cli", tuple(hyps), parse_formula(args.target))
    else:
        print("oracle: need --corpus/--id or --target", file=sys.stderr)
        return 2
    try:
        proof = oracle_solve(task, args.bound)
    except OracleBudgetError as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
        return 2
    print(f"task: {task.render()}")
    if proof is None:
        print(f"no proof within {args.bound} steps")
        return 1
    print(f"shortest proof ({len(proof)} steps): {'; '.join(proof)}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "compare": _cmd_compare,
        "gen-corpus": _cmd_gen_corpus,
        "oracle": _cmd_oracle,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
