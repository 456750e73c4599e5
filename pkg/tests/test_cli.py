import csv
import json
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from corecite import PlantedCore, SynthSpec, generate
from corecite.citenet import write_edges
from corecite.cli import RunConfig, StageError, cmd_analyze, main
from corecite.report import MissingArtifactError

from conftest import two_triangle_citations

RUN_ARTIFACTS = {
    "coupling.csv", "partitions.csv", "indicators.csv", "distributions.csv", "correlations.csv", "summary.json",
    *(f"topk_{n}.csv" for n in ("within", "between", "topicality", "bridging", "a_star")),
}


def write_toy(path: Path) -> Path:
    write_edges([("p1", "s1"), ("p2", "s1"), ("p3", "s1"), ("p1", "s2")], path)
    return path


def analyze(tmp_path, edges_path, *extra):
    out = tmp_path / "run"
    assert main(["analyze", str(edges_path), "-o", str(out), "--seed", "7", *extra]) == 0
    return out


def test_ingest_toy(tmp_path, capsys):
    path = write_toy(tmp_path / "toy.csv")
    assert main(["ingest", str(path), "--quantile", "0.5", "--out", str(tmp_path / "stats.json")]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert (stats["citing"], stats["cited"], stats["edges"]) == (3, 2, 4)
    assert stats["core_count"] == 2 and stats["core_threshold"] == 1
    assert json.loads((tmp_path / "stats.json").read_text()) == stats


def test_ingest_default_quantile_takes_top_source(tmp_path, capsys):
    main(["ingest", str(write_toy(tmp_path / "toy.csv"))])
    stats = json.loads(capsys.readouterr().out)
    assert stats["core_count"] == 1 and stats["core_threshold"] == 3


def test_ingest_empty_file_fails(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_text("", encoding="utf-8")
    assert main(["ingest", str(path)]) == 1
    assert "error" in capsys.readouterr().err


def test_ingest_missing_file_fails(tmp_path):
    assert main(["ingest", str(tmp_path / "nope.csv")]) == 1


def test_invalid_config_fails(tmp_path):
    path = write_toy(tmp_path / "toy.csv")
    assert main(["ingest", str(path), "--quantile", "1.5"]) == 1


def test_two_triangle_summary(tmp_path):
    path = tmp_path / "tri.csv"
    write_edges(two_triangle_citations().edges, path)
    out = analyze(tmp_path, path, "--quantile", "0.5", "--null-samples", "20")
    summary = json.loads((out / "summary.json").read_text())
    assert summary["modularity_mean"] == pytest.approx(0.5, abs=1e-12)
    assert summary["coupling"]["vertices"] == 6 and summary["coupling"]["components"] == 2
    assert set(summary) >= {"citing", "cited", "edges", "core_count", "core_threshold", "coupling", "indicators"}
    assert set(summary["indicators"]) == {"within", "between", "topicality", "bridging"}
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "complete" and manifest["failed_stage"] is None
    assert set(manifest["artifacts"]) == RUN_ARTIFACTS
    assert RunConfig.from_dict(manifest["config"]).to_dict() == manifest["config"]


def test_csv_conventions(tmp_path):
    path = tmp_path / "tri.csv"
    write_edges(two_triangle_citations().edges, path)
    out = analyze(tmp_path, path, "--quantile", "0.5", "--null-samples", "5")
    for name in RUN_ARTIFACTS:
        data = (out / name).read_bytes()
        assert b"\r\n" not in data
        data.decode("utf-8")
    header = (out / "indicators.csv").read_text().splitlines()[0].split(",")
    assert header[:3] == ["source_id", "in_degree", "within"]


def test_analyze_is_deterministic(tmp_path):
    res = generate(SynthSpec(community_sizes=(20,) * 3, pool_size=30, refs_per_doc=5.0,
                             planted=(PlantedCore.local(0, 8),), seed=2))
    edges, _ = res.write(tmp_path / "data")
    out = tmp_path / "run"
    snapshots = []
    for _ in range(2):
        assert main(["analyze", str(edges), "-o", str(out), "--seed", "11", "--partitions", "3",
                     "--null-samples", "10", "--quantile", "0.9", "--dump-samples", "2"]) == 0
        snapshots.append({p.name: p.read_bytes() for p in out.iterdir()})
        for p in out.iterdir():
            p.unlink()
    assert "null_sample_001.csv" in snapshots[0]
    assert snapshots[0] == snapshots[1]


def test_stage_failure_marks_manifest(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("citing_id,cited_id\np1\n", encoding="utf-8")
    out = tmp_path / "run"
    with pytest.raises(StageError) as exc:
        cmd_analyze(RunConfig(input=str(path), output_dir=str(out)))
    assert exc.value.stage == "ingest"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "incomplete" and manifest["failed_stage"] == "ingest"
    assert main(["analyze", str(path), "-o", str(out)]) == 1


def test_dedup_writes_merge_report(tmp_path):
    path = tmp_path / "refs.csv"
    write_edges([("p1", "a"), ("p2", "b"), ("p3", "c"), ("p1", "c")], path)
    meta = tmp_path / "refs.metadata.csv"
    meta.write_text(
        "id,label,year,typology,raw_reference\n"
        "a,,,,Braudel The Mediterranean p. 12\n"
        "b,,,,braudel the mediterranean pp. 40\n"
        "c,,,,Lane Venice a maritime republic\n",
        encoding="utf-8",
    )
    out = analyze(tmp_path, path, "--format", "edge-csv-with-metadata", "--dedup", "--quantile", "0.5", "--null-samples", "5")
    assert "merge_report.csv" in json.loads((out / "manifest.json").read_text())["artifacts"]
    summary = json.loads((out / "summary.json").read_text())
    assert summary["cited"] == 2


def test_bridge_heads_between_ranking(tmp_path):
    res = generate(SynthSpec(planted=(PlantedCore.pair_bridge(0, 1),), seed=5))
    edges, _ = res.write(tmp_path / "data")
    out = analyze(tmp_path, edges, "--quantile", "0.95", "--partitions", "5", "--null-samples", "30")
    rows = list(csv.DictReader((out / "topk_between.csv").open(encoding="utf-8")))
    assert rows[0]["source_id"] == "core-pair-bridge-0-1-0"
    assert rows[0]["rank"] == "1"


def test_report_missing_indicators(tmp_path, capsys):
    (tmp_path / "distributions.csv").write_text("indicator,source_id,value\n", encoding="utf-8")
    with pytest.raises(MissingArtifactError, match="indicators.csv"):
        from corecite.cli import cmd_report
        cmd_report(tmp_path)
    assert main(["report", str(tmp_path)]) == 1
    assert "indicators.csv" in capsys.readouterr().err


def test_report_single_core_scatter(tmp_path):
    path = tmp_path / "tri.csv"
    write_edges(list(two_triangle_citations().edges) + [("a", "z"), ("b", "z"), ("d", "z")], path)
    out = analyze(tmp_path, path, "--null-samples", "20")
    assert len((out / "indicators.csv").read_text().splitlines()) == 2
    assert main(["report", str(out), "--min-weight", "2", "--min-community-size", "2"]) == 0
    root = ET.parse(out / "scatter_topicality_between.svg").getroot()
    circles = [e for e in root.iter() if e.tag.endswith("circle")]
    assert len(circles) == 1
    for name in ("within", "between", "topicality", "bridging", "a_star"):
        ET.parse(out / f"hist_{name}.svg")
    assert (out / "coupling_min2.csv").read_text().splitlines()[0] == "source_i,source_j,weight"
    sizes = list(csv.DictReader((out / "community_sizes.csv").open()))
    assert sizes and all(int(r["size"]) > 2 for r in sizes)


def test_histogram_counts_match_recount(tmp_path):
    res = generate(SynthSpec(community_sizes=(30,) * 4, pool_size=40, refs_per_doc=6.0, seed=1))
    edges, _ = res.write(tmp_path / "data")
    out = analyze(tmp_path, edges, "--quantile", "0.8", "--partitions", "2", "--null-samples", "10")
    assert main(["report", str(out), "--bins", "7", "--no-plots"]) == 0
    assert not list(out.glob("*.svg"))
    values: dict[str, list[float]] = {}
    for row in csv.DictReader((out / "distributions.csv").open()):
        values.setdefault(row["indicator"], []).append(float(row["value"]))
    got: dict[str, list[int]] = {}
    for row in csv.DictReader((out / "histograms.csv").open()):
        got.setdefault(row["indicator"], []).append(int(row["count"]))
    for name, vals in values.items():
        # independent binning: half-open bins over [-1, 1], last bin closed
        counts = [0] * 7
        for v in vals:
            counts[min(int((v + 1) / (2 / 7)), 6)] += 1
        assert got[name] == counts
        assert sum(got[name]) == len(vals)


def test_synth_subcommand(tmp_path):
    out = tmp_path / "syn"
    assert main(["synth", "-o", str(out), "--communities", "3", "--size", "10", "--pool-size", "15",
                 "--refs", "4", "--core-citers", "6", "--seed", "3"]) == 0
    truth = list(csv.DictReader((out / "truth.csv").open()))
    assert {r["role"] for r in truth} == {"citing", "local", "global", "pair-bridge", "background"}
    assert main(["synth", "-o", str(tmp_path / "bad"), "--size", "5", "--core-citers", "30"]) == 1
