"""Command-line entry points.

Exit codes: 2 on usage errors (click's convention), 1 on operation
failures, 0 on success. Passing --mock-provider <dir> anywhere swaps in
the file-based mock provider so everything runs offline.
"""

from __future__ import annotations

import csv
import json
import os
import sys

import click

from .attack_kb import fetch_bundles, load_bundles
from .domain import ApplicationProfile, EvalProtocol, PipelineConfig, validate_profile
from .errors import AegisError
from .evalkit import (
    descriptive_stats,
    fk_grade,
    mapping_stats,
    pearson_correlation,
    similarity_analysis,
)
from .evalkit.similarity import HashingEmbedder, HttpEmbeddingProvider
from .gateway import Gateway, HttpChatProvider, MockChatProvider
from .intel import NvdClient, OtxClient
from .pipeline import run_batch, run_full
from .report import render_markdown, render_pdf
from .storage import load_batch, load_run, persist_run
from . import domain


def _load_profile(path: str) -> ApplicationProfile:
    with open(path, encoding="utf-8") as fh:
        return validate_profile(ApplicationProfile.from_doc(json.load(fh)))


def _load_config(path: str | None) -> PipelineConfig:
    if not path:
        return PipelineConfig()
    with open(path, encoding="utf-8") as fh:
        return PipelineConfig(**json.load(fh))


def _gateway(mock_provider: str | None, config: PipelineConfig) -> Gateway:
    if mock_provider:
        return Gateway(MockChatProvider(directory=mock_provider))
    return Gateway(HttpChatProvider(), retries=config.retries_per_stage)


def _kb(kb_dir: str | None):
    if not kb_dir:
        from .attack_kb import KnowledgeBase

        return KnowledgeBase()
    paths = [
        os.path.join(kb_dir, name)
        for name in sorted(os.listdir(kb_dir))
        if name.endswith(".json") and name != "manifest.json"
    ]
    return load_bundles(paths)


def _intel_clients(mock_provider: str | None):
    if mock_provider:
        return None, None
    nvd = NvdClient()
    otx_key = os.environ.get("AEGIS_OTX_API_KEY", "")
    otx = OtxClient() if otx_key else None
    return nvd, otx


@click.group()
def main():
    """AegisShield threat-modeling toolkit."""


@main.group()
def kb():
    """ATT&CK knowledge-base maintenance."""


@kb.command("fetch")
@click.option("--dest", required=True, type=click.Path(file_okay=False))
@click.option("--base-url", default=None, help="Override the bundle repository URL.")
def kb_fetch(dest, base_url):
    """Download and cache the public ATT&CK STIX bundles."""
    try:
        kwargs = {"base_url": base_url} if base_url else {}
        manifest = fetch_bundles(dest, **kwargs)
    except AegisError as exc:
        raise click.ClickException(str(exc))
    for dataset, info in manifest["bundles"].items():
        click.echo(f"{dataset}: {info['file']} (version {info['version'] or 'unknown'})")


@main.command()
@click.option("--profile", "profile_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--kb-dir", type=click.Path(exists=True, file_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--mock-provider", type=click.Path(exists=True, file_okay=False))
def run(profile_path, out_path, kb_dir, config_path, mock_provider):
    """Generate one full threat model and write it as JSON."""
    try:
        profile = _load_profile(profile_path)
        config = _load_config(config_path)
        nvd, otx = _intel_clients(mock_provider)
        result = run_full(
            profile, config, _gateway(mock_provider, config), _kb(kb_dir),
            nvd_client=nvd, otx_client=otx,
        )
        persist_run(result, out_path)
    except AegisError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"wrote {out_path} ({len(result.threats)} threats)")


@main.command()
@click.option("--profile", "profile_path", required=True, type=click.Path(exists=True))
@click.option("--n", default=30, show_default=True, type=int)
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--case-id", default=None)
@click.option("--kb-dir", type=click.Path(exists=True, file_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--mock-provider", type=click.Path(exists=True, file_okay=False))
@click.option("--continue-on-error", is_flag=True, default=False)
def batch(profile_path, n, out_dir, case_id, kb_dir, config_path, mock_provider,
          continue_on_error):
    """Run the pipeline n times, writing batch-<k>.json files and a manifest."""
    try:
        profile = _load_profile(profile_path)
        config = _load_config(config_path)
        nvd, otx = _intel_clients(mock_provider)
        manifest = run_batch(
            profile, n, out_dir, _gateway(mock_provider, config), _kb(kb_dir),
            config=config, nvd_client=nvd, otx_client=otx,
            case_id=case_id, continue_on_error=continue_on_error,
        )
    except AegisError as exc:
        raise click.ClickException(str(exc))
    click.echo(
        f"{manifest['successes']}/{manifest['total']} runs succeeded, "
        f"{manifest['threats_total']} threats total"
    )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--kb-dir", type=click.Path(exists=True, file_okay=False))
@click.option("--mock-provider", type=click.Path(exists=True, file_okay=False))
@click.option("--persist-dir", type=click.Path(file_okay=False), default=None,
              help="Also write generated runs to disk (sessions stay in memory).")
def serve(host, port, kb_dir, mock_provider, persist_dir):
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(kb=_kb(kb_dir), mock_provider_dir=mock_provider,
                     persist_dir=persist_dir)
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--run", "run_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def report(run_path, out_path):
    """Render a persisted run to markdown or PDF (by extension)."""
    try:
        result = load_run(run_path)
        markdown = render_markdown(result)
        if out_path.lower().endswith(".pdf"):
            with open(out_path, "wb") as fh:
                fh.write(render_pdf(markdown))
        else:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(markdown)
    except AegisError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"wrote {out_path}")


@main.group("eval")
def eval_group():
    """Evaluation-protocol operations over batch archives."""


def _load_runs(runs_dir: str):
    try:
        return load_batch(runs_dir)
    except AegisError as exc:
        raise click.ClickException(str(exc))


@eval_group.command("readability")
@click.option("--runs", "runs_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--csv-out", type=click.Path(), default=None,
              help="Write per-threat grades as plot-ready CSV.")
def eval_readability(runs_dir, csv_out):
    """Flesch-Kincaid grades for every threat scenario in a batch archive."""
    runs = _load_runs(runs_dir)
    grades = [fk_grade(threat.scenario).grade for run in runs for threat in run.threats]
    if not grades:
        raise click.ClickException("archive contains no threats")
    stats = descriptive_stats(grades)
    click.echo(f"n={stats.n} mean={stats.mean:.4f} median={stats.median:.4f} "
               f"stdev={stats.stdev:.4f} min={stats.minimum:.4f} max={stats.maximum:.4f}")
    if csv_out:
        with open(csv_out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["grade"])
            writer.writerows([[g] for g in grades])
        click.echo(f"wrote {csv_out}")


@eval_group.command("similarity")
@click.option("--runs", "runs_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--expert", "expert_path", required=True, type=click.Path(exists=True))
@click.option("--case-id", default="")
@click.option("--mock-embedder", is_flag=True, default=False,
              help="Use the deterministic hashing embedder instead of the HTTP provider.")
@click.option("--records-out", type=click.Path(), default=None)
@click.option("--summary-out", type=click.Path(), default=None,
              help="Write the batch and case verdicts as a JSON summary.")
def eval_similarity(runs_dir, expert_path, case_id, mock_embedder, records_out, summary_out):
    """Same-category cosine scoring and the batch/case verdicts."""
    runs = _load_runs(runs_dir)
    with open(expert_path, encoding="utf-8") as fh:
        expert = [
            domain.ExpertThreat(
                case_id=item.get("case_id", case_id),
                threat_type=domain.StrideCategory.parse(item["threat_type"]),
                text=item["text"],
            )
            for item in json.load(fh)
        ]
    provider = HashingEmbedder() if mock_embedder else HttpEmbeddingProvider()
    try:
        records, verdicts, case = similarity_analysis(
            runs, expert, EvalProtocol(), provider, case_id=case_id
        )
    except AegisError as exc:
        raise click.ClickException(str(exc))
    click.echo(
        f"case {case.case_id or '-'}: {case.successes}/{case.total_batches} batches "
        f"succeeded (sample p {case.sample_p:.1%}, one-proportion p {case.p_value:.4f}, "
        f"passes={case.passes})"
    )
    if records_out:
        with open(records_out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["case_id", "batch_index", "tool_threat_index",
                             "expert_threat_index", "category", "score"])
            for record in records:
                writer.writerow([record.case_id, record.batch_index,
                                 record.tool_threat_index, record.expert_threat_index,
                                 record.category.value, f"{record.score:.6f}"])
        click.echo(f"wrote {records_out}")
    if summary_out:
        summary = {
            "case": {
                "case_id": case.case_id, "successes": case.successes,
                "total_batches": case.total_batches, "sample_p": case.sample_p,
                "lower_bound_95": case.lower_bound_95, "p_value": case.p_value,
                "passes": case.passes,
            },
            "batches": [
                {"batch_index": v.batch_index, "success": v.success,
                 "best_score": v.best_score}
                for v in verdicts
            ],
        }
        with open(summary_out, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
        click.echo(f"wrote {summary_out}")


@eval_group.command("mapping")
@click.option("--runs", "runs_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--summary-out", type=click.Path(), default=None,
              help="Write the mapping statistics as a JSON summary.")
def eval_mapping(runs_dir, summary_out):
    """Mapping success counts and rates for a batch archive."""
    runs = _load_runs(runs_dir)
    stats = mapping_stats(runs)
    click.echo(f"mapped {stats.mapped}/{stats.total} ({stats.rate_percent}%), "
               f"hallucinations {stats.hallucination_count}")
    for category, cat_stats in stats.per_category.items():
        if cat_stats.total:
            click.echo(f"  {category.value}: {cat_stats.mapped}/{cat_stats.total} "
                       f"({float(cat_stats.rate) * 100:.1f}%)")
    if summary_out:
        summary = {
            "total": stats.total, "mapped": stats.mapped,
            "rate_percent": stats.rate_percent,
            "hallucination_count": stats.hallucination_count,
            "per_category": {
                category.value: {"total": c.total, "mapped": c.mapped,
                                 "rate_percent": round(float(c.rate) * 100, 1)}
                for category, c in stats.per_category.items() if c.total
            },
        }
        with open(summary_out, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
        click.echo(f"wrote {summary_out}")


@eval_group.command("correlate")
@click.option("--similarity-csv", "similarity_path", required=True,
              type=click.Path(exists=True))
@click.option("--rubric", "rubric_path", required=True, type=click.Path(exists=True))
def eval_correlate(similarity_path, rubric_path):
    """Pearson correlation between case-level mean similarity and each rubric
    criterion."""
    by_case: dict[str, list[float]] = {}
    with open(similarity_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            by_case.setdefault(row["case_id"], []).append(float(row["score"]))
    rubric_rows: dict[str, domain.RubricRecord] = {}
    with open(rubric_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            record = domain.RubricRecord(
                case_id=row["case_id"],
                criteria=tuple(int(row[f"crit{i}"]) for i in range(1, 10)),
                threat_count=int(row["threat_count"]),
            )
            rubric_rows[record.case_id] = record
    shared = sorted(set(by_case) & set(rubric_rows))
    if len(shared) < 3:
        raise click.ClickException("need at least 3 cases present in both files")
    means = [sum(by_case[c]) / len(by_case[c]) for c in shared]
    for i in range(9):
        values = [rubric_rows[c].criteria[i] for c in shared]
        try:
            r = pearson_correlation(means, values)
            click.echo(f"crit{i + 1}: r={r:+.4f}")
        except AegisError:
            click.echo(f"crit{i + 1}: degenerate (constant)")
    counts = [rubric_rows[c].threat_count for c in shared]
    try:
        click.echo(f"threat_count: r={pearson_correlation(means, counts):+.4f}")
    except AegisError:
        click.echo("threat_count: degenerate (constant)")


if __name__ == "__main__":
    main()
