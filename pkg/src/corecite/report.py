"""Tabular exports, summary JSON and dependency-free SVG plots."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .citenet import CitationNetwork, CoreSet
from .community import PartitionEnsemble
from .coupling import CouplingNetwork
from .errors import CorecitError, EmptySummaryError
from .indicators import (
    INDICATORS,
    CorrelationMatrix,
    IndicatorRecord,
    indicator_summary,
    top_k,
)

INDICATOR_HEADER = ("source_id", "in_degree", "within", "between", "topicality", "bridging", "a_star", "defined_partitions")
DISTRIBUTION_HEADER = ("indicator", "source_id", "value")
TOPK_HEADER = ("rank", "source_id", "label", "year", "in_degree", "value")
HISTOGRAM_HEADER = ("indicator", "bin_left", "bin_right", "count")


class MissingArtifactError(CorecitError, FileNotFoundError):
    pass


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_json(obj, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_indicators_csv(records: Sequence[IndicatorRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        w.writerow(INDICATOR_HEADER)
        for r in records:
            w.writerow([_cell(x) for x in (
                r.source, r.in_degree, r.within, r.between, r.topicality, r.bridging, r.a_star, r.defined["within"],
            )])


def write_distributions_csv(records: Sequence[IndicatorRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        w.writerow(DISTRIBUTION_HEADER)
        for name in (*INDICATORS, "a_star"):
            for r in records:
                v = getattr(r, name)
                if v is not None:
                    w.writerow((name, r.source, repr(v)))


def write_topk_csv(records: Sequence[IndicatorRecord], indicator: str, path: str | Path, k: int = 5) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        w.writerow(TOPK_HEADER)
        for rank, r in enumerate(top_k(records, indicator, k), start=1):
            w.writerow([_cell(x) for x in (rank, r.source, r.label, r.year, r.in_degree, r.value(indicator))])


def write_correlations_csv(corr: CorrelationMatrix | None, path: str | Path, columns: Sequence[str]) -> None:
    """Pearson above the diagonal, Spearman below; empty cells are undefined."""
    cols = tuple(corr.columns) if corr is not None else tuple(columns)
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        w.writerow(("indicator", *cols))
        combined = corr.combined() if corr is not None else [[None] * len(cols) for _ in cols]
        for name, row in zip(cols, combined):
            w.writerow((name, *map(_cell, row)))


def build_summary(
    network: CitationNetwork,
    core: CoreSet,
    coupling: CouplingNetwork,
    ensemble: PartitionEnsemble,
    records: Sequence[IndicatorRecord],
) -> dict:
    try:
        ind = indicator_summary(records, ensemble.mean_modularity)["indicators"]
    except EmptySummaryError:
        ind = {name: {"mean": None, "median": None, "n": 0} for name in INDICATORS}
    q = ensemble.mean_modularity
    return {
        "citing": len(network.citing),
        "cited": len(network.cited),
        "edges": len(network.edges),
        "core_count": len(core),
        "core_threshold": core.threshold,
        "coupling": coupling.component_stats(),
        "modularity_mean": q if np.isfinite(q) else None,
        "indicators": ind,
    }


# -- reading run artifacts ----------------------------------------------------


def require(run_dir: Path, names: Iterable[str]) -> None:
    missing = [n for n in names if not (run_dir / n).is_file()]
    if missing:
        raise MissingArtifactError(f"{run_dir}: missing run artifacts: {', '.join(missing)}")


def read_indicator_rows(path: str | Path) -> list[dict[str, float | str | None]]:
    rows = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append({k: (v if k == "source_id" else (float(v) if v != "" else None)) for k, v in row.items()})
    return rows


def read_distributions(path: str | Path) -> dict[str, list[float]]:
    out: dict[str, list[float]] = {}
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(row["indicator"], []).append(float(row["value"]))
    return out


# -- SVG rendering ------------------------------------------------------------

_W, _H, _PAD = 480, 360, 48


def _axes(parts: list[str], xlabel: str, ylabel: str, title: str) -> None:
    parts.append(f'<rect x="{_PAD}" y="{_PAD // 2}" width="{_W - 1.5 * _PAD}" height="{_H - 1.5 * _PAD}" '
                 'fill="none" stroke="#444"/>')
    parts.append(f'<text x="{_W / 2}" y="{_H - 8}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>')
    parts.append(f'<text x="12" y="{_H / 2}" text-anchor="middle" font-size="12" '
                 f'transform="rotate(-90 12 {_H / 2})">{escape(ylabel)}</text>')
    parts.append(f'<text x="{_W / 2}" y="14" text-anchor="middle" font-size="13">{escape(title)}</text>')


def _frame(x0, x1, y0, y1):
    sx = (_W - 1.5 * _PAD) / ((x1 - x0) or 1.0)
    sy = (_H - 1.5 * _PAD) / ((y1 - y0) or 1.0)
    return (lambda x: _PAD + (x - x0) * sx), (lambda y: _H - _PAD + (y0 - y) * sy)


def svg_scatter(xs: Sequence[float], ys: Sequence[float], xlabel: str, ylabel: str, title: str = "") -> str:
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">']
    _axes(parts, xlabel, ylabel, title)
    fx, fy = _frame(-1.0, 1.0, -1.0, 1.0)
    for x, y in zip(xs, ys):
        parts.append(f'<circle cx="{fx(x):.2f}" cy="{fy(y):.2f}" r="3" fill="#1f77b4" fill-opacity="0.7"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def histogram(values: Sequence[float], bins: int = 20, value_range: tuple[float, float] = (-1.0, 1.0)):
    counts, edges = np.histogram(np.asarray(values, dtype=float), bins=bins, range=value_range)
    return counts, edges


def svg_histogram(counts: np.ndarray, edges: np.ndarray, xlabel: str, title: str = "") -> str:
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">']
    _axes(parts, xlabel, "count", title)
    top = max(int(counts.max()) if counts.size else 0, 1)
    fx, fy = _frame(float(edges[0]), float(edges[-1]), 0.0, float(top))
    for c, left, right in zip(counts.tolist(), edges[:-1].tolist(), edges[1:].tolist()):
        x, y = fx(left), fy(c)
        parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{fx(right) - x:.2f}" height="{fy(0) - y:.2f}" '
                     f'fill="#ff7f0e" stroke="#333"><title>{c}</title></rect>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_report(
    run_dir: str | Path,
    bins: int = 20,
    min_weight: float | None = None,
    min_community_size: int | None = None,
    plots: bool = True,
) -> list[Path]:
    """Render plots and derived tables of a finished run from its CSV files."""
    run = Path(run_dir)
    require(run, ("indicators.csv", "distributions.csv"))
    written: list[Path] = []
    rows = read_indicator_rows(run / "indicators.csv")
    pairs = [(r["between"], r["topicality"]) for r in rows if r["between"] is not None and r["topicality"] is not None]
    if plots:
        p = run / "scatter_topicality_between.svg"
        p.write_text(svg_scatter([b for b, _ in pairs], [t for _, t in pairs], "between", "topicality",
                                 "topicality vs between"), encoding="utf-8")
        written.append(p)

    dist = read_distributions(run / "distributions.csv")
    hist_path = run / "histograms.csv"
    with hist_path.open("w", encoding="utf-8", newline="") as fh:
        w = _writer(fh)
        w.writerow(HISTOGRAM_HEADER)
        for name in (*INDICATORS, "a_star"):
            counts, edges = histogram(dist.get(name, []), bins)
            for c, lo, hi in zip(counts.tolist(), edges[:-1].tolist(), edges[1:].tolist()):
                w.writerow((name, repr(lo), repr(hi), c))
            if plots:
                p = run / f"hist_{name}.svg"
                p.write_text(svg_histogram(counts, edges, name, f"{name} indicator"), encoding="utf-8")
                written.append(p)
    written.append(hist_path)

    if min_weight is not None:
        require(run, ("coupling.csv",))
        out = run / f"coupling_min{min_weight:g}.csv"
        with (run / "coupling.csv").open(encoding="utf-8", newline="") as src, \
                out.open("w", encoding="utf-8", newline="") as dst:
            reader = csv.reader(src)
            w = _writer(dst)
            w.writerow(next(reader))
            w.writerows(row for row in reader if float(row[2]) >= min_weight)
        written.append(out)

    if min_community_size is not None:
        require(run, ("partitions.csv",))
        sizes: dict[tuple[int, int], int] = {}
        with (run / "partitions.csv").open(encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                key = (int(row["partition_index"]), int(row["community_label"]))
                sizes[key] = sizes.get(key, 0) + 1
        out = run / "community_sizes.csv"
        with out.open("w", encoding="utf-8", newline="") as fh:
            w = _writer(fh)
            w.writerow(("partition_index", "community_label", "size"))
            for (p_idx, lab), size in sorted(sizes.items(), key=lambda kv: (kv[0][0], -kv[1], kv[0][1])):
                if size > min_community_size:
                    w.writerow((p_idx, lab, size))
        written.append(out)
    return written
