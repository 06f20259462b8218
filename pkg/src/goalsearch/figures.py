"""Figure rendering for benchmark reports.

Written next to the delimited report output; purely diagnostic, so the
determinism guarantees cover the reports and traces, not these files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_PNG_METADATA = {"Software": "goalsearch"}


def render_run_figures(report, outdir: str | Path) -> list[Path]:
    """Outcome tallies and a samples-to-solve curve for one run."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    outcomes = {}
    for result in report.results:
        outcomes[result.outcome] = outcomes.get(result.outcome, 0) + 1
    fig, ax = plt.subplots(figsize=(5, 3.2))
    labels = sorted(outcomes)
    ax.bar(labels, [outcomes[k] for k in labels], color="#4878a8")
    ax.set_ylabel("tasks")
    ax.set_title(f"outcomes ({report.pass_at_k} solved at pass@{report.sample_budget})")
    fig.tight_layout()
    path = outdir / "outcomes.png"
    fig.savefig(path, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)
    written.append(path)

    samples = sorted(
        r.samples_used for r in report.results if r.outcome == "Proved"
    )
    fig, ax = plt.subplots(figsize=(5, 3.2))
    if samples:
        ax.step(samples, range(1, len(samples) + 1), where="post", color="#a84848")
    ax.set_xlabel("policy samples")
    ax.set_ylabel("tasks solved")
    ax.set_title("solves by sample budget")
    fig.tight_layout()
    path = outdir / "solve_curve.png"
    fig.savefig(path, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)
    written.append(path)

    depths = [
        (r.oracle_depth, r.samples_used)
        for r in report.results
        if r.outcome == "Proved" and r.oracle_depth is not None
    ]
    if depths:
        fig, ax = plt.subplots(figsize=(5, 3.2))
        ax.scatter([d for d, _ in depths], [s for _, s in depths], s=14, color="#48a868")
        ax.set_xlabel("oracle proof depth")
        ax.set_ylabel("policy samples to solve")
        ax.set_title("difficulty vs samples")
        fig.tight_layout()
        path = outdir / "depth_vs_samples.png"
        fig.savefig(path, dpi=150, metadata=_PNG_METADATA)
        plt.close(fig)
        written.append(path)
    return written


def render_compare_figure(summary, outdir: str | Path) -> Path:
    """Side-by-side solved counts for two runs."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    ax.bar(["run A", "run B"], [summary.solved_a, summary.solved_b], color=["#4878a8", "#a84848"])
    ax.set_ylabel(f"solved of {summary.total}")
    ax.set_title(f"delta {summary.delta:+d}")
    fig.tight_layout()
    path = outdir / "compare.png"
    fig.savefig(path, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)
    return path
