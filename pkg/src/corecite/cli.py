"""Command-line entry point: ``corecite ingest|analyze|report|synth``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import __version__
from .citenet import dedup_references, load_citations, select_core
from .community import partition_ensemble, partition_seed
from .coupling import WEIGHTINGS, project_coupling
from .errors import ConfigurationError, CorecitError
from .indicators import BRIDGING_DOMAINS, CORRELATION_COLUMNS, FORMULAS, INDICATORS, ensemble_indicators, indicator_correlations
from .nullmodel import configuration_sample, sample_seed
from .report import (
    build_summary,
    render_report,
    write_correlations_csv,
    write_distributions_csv,
    write_indicators_csv,
    write_json,
    write_topk_csv,
)
from .synth import PlantedCore, SynthSpec, default_planted, generate

log = logging.getLogger("corecite")

DEFAULT_SEED = 1835
DEDUP_DEFAULT_THRESHOLD = 0.84


@dataclass
class RunConfig:
    input: str
    format: str = "edge-csv"
    metadata: str | None = None
    drop_authorless: bool = False
    quantile: float = 0.995
    partitions: int = 10
    null_samples: int = 100
    resolution: float = 1.0
    weighting: str = "raw"
    dedup_threshold: float | None = None
    seed: int = DEFAULT_SEED
    output_dir: str | None = None
    workers: int = 1
    shared_null: bool = False
    bridging_domain: str = "pair"
    formula: str = "ratio"
    top_k: int = 5
    dump_samples: int = 0

    def validate(self) -> None:
        if not 0 < self.quantile < 1:
            raise ConfigurationError("quantile must lie in (0, 1)")
        if self.partitions < 1 or self.null_samples < 1:
            raise ConfigurationError("partitions and null samples must be at least 1")
        if self.resolution <= 0:
            raise ConfigurationError("resolution must be positive")
        if self.weighting not in WEIGHTINGS:
            raise ConfigurationError(f"weighting must be one of {WEIGHTINGS}")
        if self.dedup_threshold is not None and not 0 <= self.dedup_threshold <= 1:
            raise ConfigurationError("dedup threshold must lie in [0, 1]")
        if self.seed < 0 or self.workers < 1 or self.top_k < 1 or self.dump_samples < 0:
            raise ConfigurationError("seed, workers, top-k and dump-samples must be non-negative / positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


class StageError(CorecitError):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")


def _load(cfg: RunConfig):
    net = load_citations(cfg.input, cfg.format, cfg.metadata, cfg.drop_authorless)
    report = None
    if cfg.dedup_threshold is not None:
        net, report = dedup_references(net, cfg.dedup_threshold)
    return net, report


def cmd_ingest(cfg: RunConfig, out: Path | None = None) -> dict:
    net, report = _load(cfg)
    core = select_core(net, cfg.quantile)
    stats = {
        **net.summary(),
        "core_count": len(core),
        "core_threshold": core.threshold,
        "quantile": cfg.quantile,
        "dropped_duplicates": net.dropped_duplicates,
        "dropped_self_loops": net.dropped_self_loops,
        "merged_documents": report.merged_documents if report else 0,
    }
    if out is not None:
        write_json(stats, out)
    return stats


def _manifest(cfg: RunConfig, status: str, stage: str | None, artifacts: list[str], error: str | None = None) -> dict:
    return {
        "version": __version__,
        "status": status,
        "failed_stage": stage if status != "complete" else None,
        "error": error,
        "config": cfg.to_dict(),
        "seeds": {
            "master": cfg.seed,
            "partitions": [partition_seed(cfg.seed, k) for k in range(cfg.partitions)],
        },
        "artifacts": sorted(artifacts),
    }


def cmd_analyze(cfg: RunConfig) -> Path:
    """Run the full pipeline and write every artifact into ``cfg.output_dir``."""
    cfg.validate()
    if not cfg.output_dir:
        raise ConfigurationError("analyze needs an output directory")
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts: list[str] = []
    stage = "ingest"

    def emit(name: str) -> Path:
        artifacts.append(name)
        return out / name

    write_json(_manifest(cfg, "incomplete", stage, artifacts), out / "manifest.json")
    try:
        net, merge = _load(cfg)
        if merge is not None:
            merge.write_csv(emit("merge_report.csv"))
        stage = "projection"
        coupling = project_coupling(net, cfg.weighting)
        coupling.write_csv(emit("coupling.csv"))
        stage = "partition"
        ensemble = partition_ensemble(coupling, cfg.partitions, cfg.resolution, cfg.seed, cfg.workers)
        ensemble.write_csv(emit("partitions.csv"))
        stage = "core"
        core = select_core(net, cfg.quantile)
        stage = "indicators"
        records = ensemble_indicators(
            net, coupling, core, ensemble, cfg.null_samples, cfg.seed,
            shared_null=cfg.shared_null, bridging_domain=cfg.bridging_domain,
            formula=cfg.formula, workers=cfg.workers,
        )
        stage = "report"
        write_indicators_csv(records, emit("indicators.csv"))
        write_distributions_csv(records, emit("distributions.csv"))
        for name in (*INDICATORS, "a_star"):
            write_topk_csv(records, name, emit(f"topk_{name}.csv"), cfg.top_k)
        try:
            corr = indicator_correlations(records)
        except CorecitError:
            corr = None
        write_correlations_csv(corr, emit("correlations.csv"), CORRELATION_COLUMNS)
        write_json(build_summary(net, core, coupling, ensemble, records), emit("summary.json"))
        for n in range(cfg.dump_samples):
            seed = sample_seed(cfg.seed, 0, n)
            configuration_sample(net, seed, n).dump_csv(emit(f"null_sample_{n:03d}.csv"))
    except Exception as exc:
        write_json(_manifest(cfg, "incomplete", stage, artifacts, f"{type(exc).__name__}: {exc}"), out / "manifest.json")
        raise StageError(stage, exc) from exc
    write_json(_manifest(cfg, "complete", None, artifacts), out / "manifest.json")
    return out


def cmd_report(run_dir: str | Path, bins: int = 20, min_weight: float | None = None,
               min_community_size: int | None = None, plots: bool = True) -> list[Path]:
    return render_report(run_dir, bins, min_weight, min_community_size, plots)


def cmd_synth(spec: SynthSpec, out_dir: str | Path) -> tuple[Path, Path]:
    return generate(spec).write(out_dir)


# -- argument parsing ---------------------------------------------------------


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="edge CSV with header citing_id,cited_id")
    p.add_argument("--format", default="edge-csv", choices=("edge-csv", "edge-csv-with-metadata"))
    p.add_argument("--metadata", help="metadata sidecar CSV (default: <stem>.metadata.csv)")
    p.add_argument("--drop-authorless", action="store_true", help="drop cited documents with an empty label")
    p.add_argument("--dedup", action="store_true", help=f"merge similar references (threshold {DEDUP_DEFAULT_THRESHOLD})")
    p.add_argument("--dedup-threshold", type=float, help="Jaro-Winkler merge threshold; implies --dedup")
    p.add_argument("--quantile", type=float, default=0.995)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corecite", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load a citation network and print summary statistics")
    _add_input_args(p)
    p.add_argument("--out", type=Path, help="also write the statistics as JSON")

    p = sub.add_parser("analyze", help="run the indicator pipeline")
    _add_input_args(p)
    p.add_argument("-o", "--output-dir", required=True)
    p.add_argument("--partitions", type=int, default=10)
    p.add_argument("--null-samples", type=int, default=100)
    p.add_argument("--resolution", type=float, default=1.0)
    p.add_argument("--weighting", choices=WEIGHTINGS, default="raw")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--shared-null", action="store_true", help="reuse one null ensemble for all partitions")
    p.add_argument("--bridging-domain", choices=BRIDGING_DOMAINS, default="pair")
    p.add_argument("--formula", choices=FORMULAS, default="ratio")
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--dump-samples", type=int, default=0, help="write the first N null samples as edge CSVs")

    p = sub.add_parser("report", help="render plots from a finished run directory")
    p.add_argument("run_dir")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--min-weight", type=float, help="export coupling edges with at least this weight")
    p.add_argument("--min-community-size", type=int, help="export communities with more than this many members")
    p.add_argument("--no-plots", action="store_true")

    p = sub.add_parser("synth", help="generate a planted-community citation network")
    p.add_argument("-o", "--output-dir", required=True)
    p.add_argument("--communities", type=int, default=4)
    p.add_argument("--size", type=int, default=100, help="citing documents per community")
    p.add_argument("--pool-size", type=int, default=200)
    p.add_argument("--refs", type=float, default=10.0)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--core-citers", type=int, default=20)
    p.add_argument("--no-planted", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    threshold = args.dedup_threshold
    if threshold is None and args.dedup:
        threshold = DEDUP_DEFAULT_THRESHOLD
    cfg = RunConfig(
        input=args.input, format=args.format, metadata=args.metadata,
        drop_authorless=args.drop_authorless, quantile=args.quantile,
        dedup_threshold=threshold, seed=args.seed,
    )
    if args.command == "analyze":
        cfg.output_dir = args.output_dir
        cfg.partitions = args.partitions
        cfg.null_samples = args.null_samples
        cfg.resolution = args.resolution
        cfg.weighting = args.weighting
        cfg.workers = args.workers
        cfg.shared_null = args.shared_null
        cfg.bridging_domain = args.bridging_domain
        cfg.formula = args.formula
        cfg.top_k = args.top_k
        cfg.dump_samples = args.dump_samples
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "ingest":
            stats = cmd_ingest(_config_from_args(args), args.out)
            print(json.dumps(stats, indent=2, sort_keys=True))
        elif args.command == "analyze":
            out = cmd_analyze(_config_from_args(args))
            print(f"wrote run to {out}")
        elif args.command == "report":
            for path in cmd_report(args.run_dir, args.bins, args.min_weight, args.min_community_size, not args.no_plots):
                print(path)
        elif args.command == "synth":
            planted = () if args.no_planted else tuple(
                PlantedCore(c.role, args.core_citers, c.communities) for c in default_planted(args.communities)
            )
            spec = SynthSpec(
                community_sizes=(args.size,) * args.communities, pool_size=args.pool_size,
                refs_per_doc=args.refs, noise=args.noise, planted=planted, seed=args.seed,
            )
            for path in cmd_synth(spec, args.output_dir):
                print(path)
    except (CorecitError, OSError) as exc:
        print(f"corecite: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
