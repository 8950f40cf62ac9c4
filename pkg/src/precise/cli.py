"""Command-line entry point wiring the pipeline stages.

Subcommands mirror the stage order: ingest, simplify, score, analyze, serve,
report. Each stage reads and writes only documented file formats, so stages
can be re-run independently. Exit codes: 0 success, 1 data error, 2 usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import secrets
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import grading, ingest, readability, report, simplify, stats

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_USAGE = 2

SCORE_FIELDS = (
    "report_id",
    "arm",
    "fre",
    "gfi",
    "ari",
    "fre_band",
    "gfi_grade",
    "ari_grade",
    "fre_out_of_range",
    "gfi_clamped",
    "ari_clamped",
)


class DataError(Exception):
    """Wraps stage failures that should exit 1 with a diagnostic."""


def _eprint(*args) -> None:
    print(*args, file=sys.stderr)


# ------------------------------------------------------------------ stages

def cmd_ingest(args: argparse.Namespace) -> int:
    reports = ingest.load_reports(args.input, format=args.format)
    outcome = ingest.filter_reports(reports, min_words=args.min_words)
    ingest.write_reports_csv(outcome.kept, args.out)
    if args.rejects:
        ingest.write_rejections(outcome.rejected, args.rejects)
    _eprint(
        f"ingest: {len(reports)} read, {len(outcome.kept)} kept, "
        f"{len(outcome.rejected)} rejected"
    )
    return EXIT_OK


def _build_backend(args: argparse.Namespace) -> simplify.Backend:
    if args.backend == "mock":
        return simplify.MockBackend()
    endpoint = os.environ.get(simplify.ENV_API_URL, "")
    model = os.environ.get(simplify.ENV_MODEL, "gpt-4")
    if not endpoint:
        raise DataError(
            f"http backend requires {simplify.ENV_API_URL} to be set"
        )
    config = simplify.BackendConfig(
        kind="http-chat",
        endpoint=endpoint,
        model=model,
        timeout=args.timeout,
        max_retries=args.max_retries,
        retry_backoff=args.retry_backoff,
        requests_per_minute=args.rpm,
    )
    return simplify.HttpChatBackend(config)


def cmd_simplify(args: argparse.Namespace) -> int:
    corpus = ingest.load_reports(args.corpus, format="auto")
    backend = _build_backend(args)
    summary = simplify.batch_simplify(
        corpus,
        backend,
        args.out,
        resume=args.resume,
        max_in_flight=args.max_in_flight,
    )
    _eprint(
        f"simplify: {summary.succeeded} succeeded, {summary.failed} failed, "
        f"{summary.skipped} skipped"
    )
    for report_id, message in summary.failures:
        _eprint(f"  failed {report_id}: {message}")
    return EXIT_OK if summary.failed == 0 else EXIT_DATA_ERROR


def _score_rows(pairs: Sequence[simplify.SimplifiedPair]) -> List[dict]:
    rows: List[dict] = []
    for pair in pairs:
        for arm, text in (("original", pair.original_text), ("generated", pair.generated_text)):
            try:
                scores = readability.score_text(text)
            except (readability.UndefinedMetricError, ValueError) as exc:
                raise DataError(f"report {pair.report_id} ({arm}): {exc}") from exc
            rows.append(
                {
                    "report_id": pair.report_id,
                    "arm": arm,
                    "fre": repr(scores.fre),
                    "gfi": repr(scores.gfi),
                    "ari": repr(scores.ari),
                    "fre_band": scores.fre_band.school_level,
                    "gfi_grade": scores.gfi_grade.label,
                    "ari_grade": scores.ari_grade.label,
                    "fre_out_of_range": str(scores.fre_band.out_of_range).lower(),
                    "gfi_clamped": str(scores.gfi_grade.clamped).lower(),
                    "ari_clamped": str(scores.ari_grade.clamped).lower(),
                }
            )
    return rows


def cmd_score(args: argparse.Namespace) -> int:
    pairs = simplify.load_pairs(args.pairs)
    if not pairs:
        raise DataError(f"{args.pairs}: no pairs to score")
    rows = _score_rows(pairs)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(SCORE_FIELDS), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    _eprint(f"score: {len(rows)} rows written to {args.out}")
    return EXIT_OK


def _load_score_samples(path: str) -> Dict[str, Dict[str, List[float]]]:
    samples: Dict[str, Dict[str, List[float]]] = {
        "original": {m: [] for m in stats.METRIC_KEYS},
        "generated": {m: [] for m in stats.METRIC_KEYS},
    }
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"arm", "fre", "gfi", "ari"}
        if reader.fieldnames is None or required - set(reader.fieldnames):
            raise DataError(f"{path}: not a scores csv (need columns {sorted(required)})")
        for row in reader:
            arm = row["arm"]
            if arm not in samples:
                raise DataError(f"{path}: unknown arm {arm!r}")
            for metric in stats.METRIC_KEYS:
                try:
                    samples[arm][metric].append(float(row[metric]))
                except ValueError as exc:
                    raise DataError(
                        f"{path}: non-numeric {metric} value {row[metric]!r}"
                    ) from exc
    return samples


def _grading_sections(events_path: str) -> Dict[str, dict]:
    states = grading.replay_log(events_path)
    sections: Dict[str, dict] = {}
    for state in states.values():  # later studies of a kind override earlier ones
        if state.state == "complete":
            sections[state.study.rubric.kind] = grading.study_results(state)
    return sections


def cmd_analyze(args: argparse.Namespace) -> int:
    samples = _load_score_samples(args.scores)
    for arm in ("original", "generated"):
        for metric in stats.METRIC_KEYS:
            if len(samples[arm][metric]) < 2:
                raise DataError(
                    f"{args.scores}: need at least 2 {arm}/{metric} scores for analysis"
                )
    descriptives = {
        arm: {m: stats.descriptive(vals).as_dict() for m, vals in per_arm.items()}
        for arm, per_arm in samples.items()
    }
    matrix = stats.pvalue_matrix(samples["original"], samples["generated"])
    bundle: dict = {
        "n_pairs": len(samples["original"]["fre"]),
        "scores": samples,
        "descriptives": descriptives,
        "tests": {
            metric: {test: result.as_dict() for test, result in per_metric.items()}
            for metric, per_metric in matrix.items()
        },
    }
    if args.grading_events:
        sections = _grading_sections(args.grading_events)
        if sections:
            bundle["grading"] = sections
        else:
            _eprint(f"analyze: no complete studies found in {args.grading_events}")
    Path(args.out).write_text(
        json.dumps(bundle, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _eprint(f"analyze: bundle written to {args.out}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    try:
        bundle = json.loads(Path(args.analysis).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{args.analysis}: invalid json ({exc.msg})") from exc
    figures = ["score_histograms", "pvalue_heatmap"]
    grading_section = bundle.get("grading", {})
    if "reliability" in grading_section:
        figures.append("reliability_scores")
    if "understandability" in grading_section:
        figures.append("understandability_scores")
    manifest = report.render_outputs(bundle, args.out_dir, figures=figures)
    _eprint(f"report: {len(manifest['files'])} files in {args.out_dir}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import create_app

    store = grading.GradingStore(args.log)
    if store.study_ids:
        _eprint(f"serve: resuming log with studies {', '.join(store.study_ids)}")
    elif args.pairs:
        pairs = simplify.load_pairs(args.pairs)
        rubric = grading.rubric_by_kind(args.rubric)
        if args.tokens:
            tokens = [t.strip() for t in args.tokens.split(",") if t.strip()]
        else:
            tokens = [secrets.token_urlsafe(6) for _ in range(args.graders)]
        study = store.create_study(pairs, rubric, tokens, args.seed)
        print(f"study_id: {study.study_id}")
        print(f"reveal_key: {study.reveal_key}")
        for i, token in enumerate(study.grader_tokens, start=1):
            print(f"grader_{i} token: {token}")
    app = create_app(store, static_dir=args.static)

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="precise",
        description="Filter radiology reports, simplify them, score readability, "
        "run blind grading studies, and compare the arms statistically.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="filter a report corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "jsonl", "auto"), default="auto")
    p.add_argument("--min-words", type=int, default=ingest.DEFAULT_MIN_WORDS)
    p.add_argument("--out", required=True)
    p.add_argument("--rejects", default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("simplify", help="generate patient-friendly texts")
    p.add_argument("--corpus", required=True)
    p.add_argument("--backend", choices=("http", "mock"), default="mock")
    p.add_argument("--out", required=True)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--rpm", type=int, default=None)
    p.add_argument("--max-retries", type=int, default=3)
    p.add_argument("--retry-backoff", type=float, default=1.0)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--max-in-flight", type=int, default=1)
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("score", help="score both arms of each pair")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("analyze", help="descriptives and the p-value matrix")
    p.add_argument("--scores", required=True)
    p.add_argument("--grading-events", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", help="run the grading service")
    p.add_argument("--pairs", default=None)
    p.add_argument("--rubric", choices=("reliability", "understandability"),
                   default="understandability")
    p.add_argument("--graders", type=int, default=2)
    p.add_argument("--tokens", default=None, help="comma-separated grader tokens")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--log", required=True)
    p.add_argument("--static", default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("report", help="emit figure data and svg renderings")
    p.add_argument("--analysis", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        _eprint(f"error: {exc}")
        return EXIT_DATA_ERROR
    except (ingest.CorpusFormatError, grading.GradingError) as exc:
        _eprint(f"error: {exc}")
        return EXIT_DATA_ERROR
    except (ValueError, OSError) as exc:
        _eprint(f"error: {exc}")
        return EXIT_DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
