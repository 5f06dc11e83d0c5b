"""Command-line surface: ``weave emit|validate|stats``.

The heavy lifting lives in the library modules; this wires files to
functions and keeps exit codes honest (0 ok, 1 validation findings,
2 usage or pipeline errors).
"""

from __future__ import annotations

import argparse
import datetime
import logging
import sys

from . import enrich as enrich_mod
from .catalog import ingest_catalog, load_split_chain
from .cluster import load_cluster_model
from .manifest import (
    ManifestHeader,
    emit_manifest,
    file_sha256,
    stats,
    validate_manifest,
)
from .weave import (
    DEFAULT_SAMPLES_PER_EPOCH,
    DEFAULT_TOTAL_FRAMES,
    MODES,
    WeaveConfig,
    build_epoch,
    plan_clustered_groups,
    plan_random_groups,
)

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weave",
        description="Weave clip corpora into fixed-frame-budget epochs.",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    emit = sub.add_parser("emit", help="plan and write one epoch manifest")
    emit.add_argument("--catalog", required=True, help="catalog JSONL path")
    emit.add_argument("--split", required=True, help="split chain JSON path")
    emit.add_argument(
        "--split-size", type=int, required=True,
        help="which split of the chain to weave over",
    )
    emit.add_argument("--mode", choices=MODES, default="random")
    emit.add_argument("--videos-per-sample", type=int, required=True)
    emit.add_argument("--total-frames", type=int, default=DEFAULT_TOTAL_FRAMES)
    emit.add_argument("--samples", type=int, default=DEFAULT_SAMPLES_PER_EPOCH)
    emit.add_argument("--seed", type=int, required=True)
    emit.add_argument(
        "--cluster-file", help="cluster model JSON (required for clustered mode)"
    )
    emit.add_argument("--output", required=True, help="manifest JSONL path")
    emit.add_argument(
        "--enrich", choices=("off", "dry-run", "live"), default="off",
        help="caption rewriting stage (default off)",
    )
    emit.add_argument("--cache-dir", help="enrichment cache directory")
    emit.add_argument(
        "--timestamp", action="store_true",
        help="record creation time in the header (breaks byte determinism)",
    )

    validate = sub.add_parser("validate", help="check a manifest against a catalog")
    validate.add_argument("manifest")
    validate.add_argument("--catalog", required=True)

    stats_p = sub.add_parser("stats", help="summarize a manifest as CSV")
    stats_p.add_argument("manifest")
    stats_p.add_argument(
        "--cluster-file",
        help="cluster model JSON, enables per-cluster sample counts",
    )
    return parser


def _cmd_emit(args: argparse.Namespace) -> int:
    catalog = ingest_catalog(args.catalog)
    chain = load_split_chain(args.split)
    split = chain.split(args.split_size)
    config = WeaveConfig(
        videos_per_sample=args.videos_per_sample,
        seed=args.seed,
        mode=args.mode,
        total_frames=args.total_frames,
        samples_per_epoch=args.samples,
    )

    cluster_hash = None
    if args.mode == "clustered":
        if not args.cluster_file:
            logger.error("clustered mode needs --cluster-file")
            return 2
        model = load_cluster_model(args.cluster_file)
        groups = plan_clustered_groups(model, config.seed)
        groups = groups[: config.samples_per_epoch]
        cluster_hash = file_sha256(args.cluster_file)
    else:
        groups = plan_random_groups(
            split, config.videos_per_sample, config.samples_per_epoch, config.seed
        )

    samples = build_epoch(catalog, split, groups, config)

    template_id = None
    if args.enrich != "off":
        cache = enrich_mod.DiskCache(args.cache_dir) if args.cache_dir else None
        client = None
        if args.enrich == "live":
            client = enrich_mod.EnrichmentClient()
        samples = enrich_mod.enrich_samples(
            samples, catalog, client, cache, dry_run=args.enrich == "dry-run"
        )
        template_id = enrich_mod.TEMPLATE_ID

    created_at = None
    if args.timestamp:
        created_at = datetime.datetime.now(datetime.timezone.utc).isoformat(
            timespec="seconds"
        )
    header = ManifestHeader(
        config=config,
        split_size=args.split_size,
        split_seed=chain.master_seed,
        cluster_file_sha256=cluster_hash,
        enrichment_template_id=template_id,
        created_at=created_at,
    )
    emit_manifest(samples, header, args.output)
    logger.info(
        "wrote %s: %d samples, %d frame references",
        args.output, len(samples), len(samples) * config.total_frames,
    )
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    catalog = ingest_catalog(args.catalog)
    report = validate_manifest(args.manifest, catalog)
    if report.ok:
        print(f"{args.manifest}: OK")
        return 0
    for v in report.violations:
        where = f" [{v.sample_id}]" if v.sample_id else ""
        print(f"{v.kind}{where}: {v.message}")
    counts = ", ".join(f"{k}={n}" for k, n in sorted(report.kinds().items()))
    print(f"{args.manifest}: {len(report.violations)} violations ({counts})")
    return 1


def _cmd_stats(args: argparse.Namespace) -> int:
    model = load_cluster_model(args.cluster_file) if args.cluster_file else None
    summary = stats(args.manifest, cluster_model=model)
    sys.stdout.write(summary.to_csv())
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "emit":
            return _cmd_emit(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_stats(args)
    except (ValueError, OSError, enrich_mod.EnrichmentError) as exc:
        logger.error("%s", exc)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
