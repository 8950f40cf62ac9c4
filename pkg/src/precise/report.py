"""Figure data files and diagnostic SVG renderings.

Four figure families: readability score histograms per arm, the metric-by-test
p-value heatmap, reliability score distribution plus grader agreement, and the
understandability item-by-grader grid with its kappa matrix. Every family
writes a data file (csv or json) and an svg drawn only from those same rows,
and a manifest records sha-256 digests so reruns can be compared byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

FIGURES = (
    "score_histograms",
    "pvalue_heatmap",
    "reliability_scores",
    "understandability_scores",
)

METRIC_LABELS = {"fre": "FRE", "gfi": "GFI", "ari": "ARI"}
TEST_LABELS = {"welch_t": "Welch t", "ols_slope": "OLS slope", "mann_whitney": "Mann-Whitney U"}

# heatmap ramp endpoints: p=1 maps to white, p<=1e-10 to deep red
_RAMP_LOW = (255, 255, 255)
_RAMP_HIGH = (139, 0, 0)
_NEGLOG_CLAMP = 10.0

DEFAULT_BIN_COUNT = 10


class MissingSectionError(ValueError):
    """The analysis bundle lacks a section a requested figure needs."""


@dataclass(frozen=True)
class HistogramSpec:
    metric: str
    arm: str
    bin_edges: Tuple[float, ...]
    counts: Tuple[int, ...]


def histogram(
    values: Sequence[float],
    bin_count: int = DEFAULT_BIN_COUNT,
    edges: Optional[Sequence[float]] = None,
    metric: str = "",
    arm: str = "",
) -> HistogramSpec:
    """Equal-width binning over [min, max]; bins are right-open except the last.

    A constant sample has zero range, which is widened by one unit so the
    single occupied bin is well defined.
    """
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("histogram requires nonempty values")
    if edges is not None:
        edge_list = [float(e) for e in edges]
        if len(edge_list) < 2 or any(b <= a for a, b in zip(edge_list, edge_list[1:])):
            raise ValueError("explicit edges must be strictly increasing with length >= 2")
    else:
        if bin_count < 1:
            raise ValueError(f"bin_count must be >= 1, got {bin_count}")
        lo, hi = min(vals), max(vals)
        if lo == hi:
            hi = lo + 1.0
        width = (hi - lo) / bin_count
        edge_list = [lo + i * width for i in range(bin_count)] + [hi]
    counts = [0] * (len(edge_list) - 1)
    last = len(counts) - 1
    for v in vals:
        if v < edge_list[0] or v > edge_list[-1]:
            continue
        if v == edge_list[-1]:
            counts[last] += 1
            continue
        # linear scan keeps the right-open rule obvious; bins are few
        for i in range(len(counts)):
            if edge_list[i] <= v < edge_list[i + 1]:
                counts[i] += 1
                break
    return HistogramSpec(
        metric=metric, arm=arm, bin_edges=tuple(edge_list), counts=tuple(counts)
    )


def _heat_color(p: float) -> str:
    neglog = _NEGLOG_CLAMP if p <= 0 else min(-math.log10(p), _NEGLOG_CLAMP)
    t = neglog / _NEGLOG_CLAMP
    rgb = tuple(
        round(lo + (hi - lo) * t) for lo, hi in zip(_RAMP_LOW, _RAMP_HIGH)
    )
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _svg(width: int, height: int, body: List[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="11">'
    )
    return "\n".join([head] + body + ["</svg>"]) + "\n"


def _rect(x: float, y: float, w: float, h: float, fill: str, stroke: str = "#333333") -> str:
    return (
        f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
        f'fill="{fill}" stroke="{stroke}" stroke-width="0.5"/>'
    )


def _text(x: float, y: float, s: str, anchor: str = "start", size: int = 11) -> str:
    safe = s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    return f'<text x="{x:.2f}" y="{y:.2f}" text-anchor="{anchor}" font-size="{size}">{safe}</text>'


def _require(bundle: dict, path: Tuple[str, ...], figure: str) -> object:
    node: object = bundle
    for key in path:
        if not isinstance(node, dict) or key not in node:
            raise MissingSectionError(
                f"figure {figure!r} requires bundle section {'.'.join(path)!r}"
            )
        node = node[key]
    return node


# ---------------------------------------------------------------- histograms

def _score_histogram_rows(bundle: dict) -> List[dict]:
    _require(bundle, ("scores",), "score_histograms")
    rows: List[dict] = []
    for metric in ("fre", "gfi", "ari"):
        for arm in ("original", "generated"):
            values = _require(bundle, ("scores", arm, metric), "score_histograms")
            spec = histogram(values, metric=metric, arm=arm)
            for i, count in enumerate(spec.counts):
                rows.append(
                    {
                        "metric": metric,
                        "arm": arm,
                        "bin_index": i,
                        "bin_start": spec.bin_edges[i],
                        "bin_end": spec.bin_edges[i + 1],
                        "count": count,
                    }
                )
    return rows


def _render_score_histograms(rows: List[dict]) -> str:
    panel_w, panel_h, pad = 300, 150, 40
    arms = ("original", "generated")
    body: List[str] = []
    for mi, metric in enumerate(("fre", "gfi", "ari")):
        for ai, arm in enumerate(arms):
            ox = pad + ai * (panel_w + pad)
            oy = pad + mi * (panel_h + pad)
            sub = [r for r in rows if r["metric"] == metric and r["arm"] == arm]
            peak = max((r["count"] for r in sub), default=1) or 1
            body.append(_text(ox, oy - 8, f"{METRIC_LABELS[metric]} / {arm}"))
            bar_w = panel_w / max(len(sub), 1)
            for r in sub:
                h = panel_h * r["count"] / peak
                x = ox + r["bin_index"] * bar_w
                body.append(_rect(x, oy + panel_h - h, bar_w, h, "#4477aa"))
                body.append(_text(x + 1, oy + panel_h + 12, str(r["count"]), size=8))
            lo, hi = (sub[0]["bin_start"], sub[-1]["bin_end"]) if sub else (0, 0)
            body.append(_text(ox, oy + panel_h + 26, f"[{lo!r}, {hi!r}]", size=8))
    width = pad + len(arms) * (panel_w + pad)
    height = pad + 3 * (panel_h + pad)
    return _svg(width, height, body)


# ------------------------------------------------------------------ heatmap

def _pvalue_rows(bundle: dict) -> List[dict]:
    _require(bundle, ("tests",), "pvalue_heatmap")
    rows: List[dict] = []
    for metric in ("fre", "gfi", "ari"):
        _require(bundle, ("tests", metric), "pvalue_heatmap")
        for test in ("welch_t", "ols_slope", "mann_whitney"):
            cell = _require(bundle, ("tests", metric, test), "pvalue_heatmap")
            rows.append(
                {
                    "metric": metric,
                    "test": test,
                    "p_value": cell["p_value"],
                    "statistic": cell["statistic"],
                    "method": cell["method"],
                }
            )
    return rows


def _render_pvalue_heatmap(rows: List[dict]) -> str:
    cell_w, cell_h, pad_l, pad_t = 170, 60, 120, 60
    body: List[str] = []
    tests = ("welch_t", "ols_slope", "mann_whitney")
    for ci, test in enumerate(tests):
        body.append(_text(pad_l + ci * cell_w + cell_w / 2, pad_t - 12, TEST_LABELS[test], "middle"))
    for ri, metric in enumerate(("fre", "gfi", "ari")):
        body.append(_text(pad_l - 10, pad_t + ri * cell_h + cell_h / 2 + 4, METRIC_LABELS[metric], "end"))
        for ci, test in enumerate(tests):
            row = next(r for r in rows if r["metric"] == metric and r["test"] == test)
            p = row["p_value"]
            x, y = pad_l + ci * cell_w, pad_t + ri * cell_h
            body.append(_rect(x, y, cell_w, cell_h, _heat_color(p)))
            dark = p < 1e-5  # printed value must stay readable on the ramp
            body.append(
                f'<text x="{x + cell_w / 2:.2f}" y="{y + cell_h / 2 + 4:.2f}" '
                f'text-anchor="middle" font-size="10" fill="{"#ffffff" if dark else "#000000"}">'
                f"p={p!r}</text>"
            )
    width = pad_l + len(tests) * cell_w + 40
    height = pad_t + 3 * cell_h + 40
    return _svg(width, height, body)


# ------------------------------------------------------- grading figures

def _grading_bundle(bundle: dict, kind: str, figure: str) -> dict:
    grading = _require(bundle, ("grading", kind), figure)
    if not isinstance(grading, dict):
        raise MissingSectionError(f"figure {figure!r} requires bundle section 'grading.{kind}'")
    return grading


def _reliability_data(results: dict) -> dict:
    labels = {
        str(entry["score"]): entry["label"] for entry in results["rubric"]["labels"]
    }
    arm = results["arms"].get("generated") or next(iter(results["arms"].values()))
    distribution = [
        {
            "score": score,
            "label": labels.get(score, score),
            "count": arm["counts"][score],
            "fraction": arm["fractions"][score],
        }
        for score in sorted(arm["counts"])
    ]
    pairs = []
    graders = results["graders"]
    percent = results["agreement"]["percent"]
    kappa = results["agreement"]["kappa"]
    for i in range(len(graders)):
        for j in range(i + 1, len(graders)):
            pairs.append(
                {
                    "pair": f"{graders[i]}|{graders[j]}",
                    "percent_agreement": percent[i][j],
                    "kappa": kappa[i][j],
                }
            )
    return {"distribution": distribution, "pair_agreement": pairs}


_SCORE_COLORS = {"0": "#cc3311", "1": "#ccbb44", "2": "#228833"}


def _render_reliability(data: dict) -> str:
    body: List[str] = []
    bar_x, bar_y, bar_w, bar_h = 60, 50, 420, 48
    body.append(_text(bar_x, bar_y - 12, "score distribution"))
    x = float(bar_x)
    for seg in data["distribution"]:
        w = bar_w * seg["fraction"]
        body.append(_rect(x, bar_y, w, bar_h, _SCORE_COLORS.get(seg["score"], "#888888")))
        if w > 2:
            body.append(_text(x + 2, bar_y + bar_h + 14, f"{seg['label']}={seg['count']}", size=9))
        x += w
    ay = bar_y + bar_h + 50
    body.append(_text(bar_x, ay - 10, "grader-pair percent agreement"))
    for i, pair in enumerate(data["pair_agreement"]):
        y = ay + i * 26
        w = 300 * pair["percent_agreement"]
        body.append(_rect(bar_x, y, w, 18, "#4477aa"))
        body.append(
            _text(bar_x + 306, y + 13, f"{pair['pair']} {pair['percent_agreement']!r}", size=9)
        )
    height = ay + max(len(data["pair_agreement"]), 1) * 26 + 40
    return _svg(560, height, body)


def _understandability_data(results: dict) -> dict:
    graders = results["graders"]
    rows = []
    for entry in results["grid"]:
        scores = [entry["scores"][g] for g in graders]
        known = [s for s in scores if s is not None]
        rows.append(
            {
                "item_id": entry["item_id"],
                "arm": entry["arm"],
                "mean": sum(known) / len(known) if known else None,
                "scores": {g: entry["scores"][g] for g in graders},
            }
        )
    # group by arm, then highest average first; ids break remaining ties
    rows.sort(
        key=lambda r: (r["arm"], -(r["mean"] if r["mean"] is not None else -1), r["item_id"])
    )
    return {
        "graders": graders,
        "items": rows,
        "kappa": results["agreement"]["kappa"],
        "mann_whitney": results.get("mann_whitney"),
    }


def _render_understandability(data: dict) -> str:
    graders = data["graders"]
    cell, pad_l, pad_t = 18, 150, 40
    body: List[str] = [_text(pad_l, pad_t - 16, "item x grader scores (by arm, best first)")]
    for gi, g in enumerate(graders):
        body.append(_text(pad_l + gi * cell + cell / 2, pad_t - 4, g[-2:], "middle", 8))
    for ri, row in enumerate(data["items"]):
        y = pad_t + ri * cell
        body.append(_text(pad_l - 6, y + cell - 5, f"{row['arm'][:4]}:{row['item_id'][:6]}", "end", 8))
        for gi, g in enumerate(graders):
            score = row["scores"][g]
            fill = _SCORE_COLORS.get(str(score), "#dddddd")
            body.append(_rect(pad_l + gi * cell, y, cell, cell, fill))
    ky = pad_t + len(data["items"]) * cell + 40
    body.append(_text(pad_l, ky - 10, "kappa matrix"))
    for i in range(len(graders)):
        for j in range(len(graders)):
            k = data["kappa"][i][j]
            x, y = pad_l + j * 70, ky + i * 24
            body.append(_rect(x, y, 70, 24, "#eeeeee"))
            body.append(_text(x + 35, y + 16, "n/a" if k is None else f"{k!r}"[:7], "middle", 9))
    width = max(pad_l + len(graders) * cell, pad_l + len(graders) * 70) + 60
    height = ky + len(graders) * 24 + 40
    return _svg(width, height, body)


# ---------------------------------------------------------------- emission

def _write_csv(path: Path, fieldnames: Sequence[str], rows: Sequence[dict]) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fieldnames), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    path.write_text(buf.getvalue(), encoding="utf-8")


def _write_json(path: Path, data: object) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def render_outputs(
    bundle: dict,
    out_dir: Union[str, Path],
    figures: Sequence[str] = FIGURES,
) -> dict:
    """Write the requested figure families and a digest manifest.

    Each family emits one data file and one svg built from the same rows.
    Returns the manifest (also written as manifest.json).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for figure in figures:
        if figure not in FIGURES:
            raise ValueError(f"unknown figure {figure!r}")
    written: List[Path] = []

    if "score_histograms" in figures:
        rows = _score_histogram_rows(bundle)
        path = out / "score_histograms.csv"
        _write_csv(path, ("metric", "arm", "bin_index", "bin_start", "bin_end", "count"), rows)
        svg = out / "score_histograms.svg"
        svg.write_text(_render_score_histograms(rows), encoding="utf-8")
        written += [path, svg]

    if "pvalue_heatmap" in figures:
        rows = _pvalue_rows(bundle)
        path = out / "pvalue_heatmap.csv"
        _write_csv(path, ("metric", "test", "p_value", "statistic", "method"), rows)
        svg = out / "pvalue_heatmap.svg"
        svg.write_text(_render_pvalue_heatmap(rows), encoding="utf-8")
        written += [path, svg]

    if "reliability_scores" in figures:
        data = _reliability_data(_grading_bundle(bundle, "reliability", "reliability_scores"))
        path = out / "reliability_scores.json"
        _write_json(path, data)
        svg = out / "reliability_scores.svg"
        svg.write_text(_render_reliability(data), encoding="utf-8")
        written += [path, svg]

    if "understandability_scores" in figures:
        data = _understandability_data(
            _grading_bundle(bundle, "understandability", "understandability_scores")
        )
        path = out / "understandability_scores.json"
        _write_json(path, data)
        svg = out / "understandability_scores.svg"
        svg.write_text(_render_understandability(data), encoding="utf-8")
        written += [path, svg]

    manifest = {
        "files": [
            {"path": p.name, "sha256": _sha256(p), "bytes": p.stat().st_size}
            for p in sorted(written, key=lambda p: p.name)
        ]
    }
    _write_json(out / "manifest.json", manifest)
    return manifest
