"""Clustered weaving: groups drawn from semantically similar clips.

Clusters pooled clip embeddings into groups of exactly L, then weaves
each cluster into one sample, and compares against the random planner.
The `weave` CLI runs the same pipeline from files.
"""

import subprocess
import tempfile
from pathlib import Path

from clipweave import (
    ClusterConfig,
    ManifestHeader,
    WeaveConfig,
    build_epoch,
    build_split_chain,
    emit_manifest,
    export_embeddings,
    fit_balanced_kmeans,
    plan_clustered_groups,
    pooled_matrix,
    save_cluster_model,
    save_split_chain,
    validate_manifest,
    write_catalog,
)
from clipweave.manifest import file_sha256
from clipweave.synthetic import make_catalog, make_embedding_set

out = Path(tempfile.mkdtemp(prefix="weave-demo-"))
videos_per_sample = 4
samples_per_epoch = 100

catalog = make_catalog(500, seed=41)
write_catalog(catalog, out / "catalog.jsonl")
chain = build_split_chain(catalog, sizes=(400,), seed=42)
save_split_chain(chain, out / "splits.json")
split = chain.split(400)

embeddings = make_embedding_set(catalog, seed=43, dim=32, rows_per_video=8)
export_embeddings(embeddings, out / "embeddings.bin")
points = pooled_matrix(embeddings, split)

# one cluster per future sample: K = split / L, capacity = L
model = fit_balanced_kmeans(
    points,
    ClusterConfig(
        n_clusters=len(split) // videos_per_sample,
        capacity=videos_per_sample,
        seed=44,
    ),
    ids=split,
)
save_cluster_model(model, out / "clusters.json")
print(f"fitted {model.config.n_clusters} clusters of exactly "
      f"{model.config.capacity}, converged={model.converged}")

config = WeaveConfig(
    videos_per_sample=videos_per_sample, seed=45, mode="clustered",
    samples_per_epoch=samples_per_epoch,
)
groups = plan_clustered_groups(model, config.seed)[:samples_per_epoch]
samples = build_epoch(catalog, split, groups, config)
emit_manifest(
    samples,
    ManifestHeader(
        config=config, split_size=400, split_seed=42,
        cluster_file_sha256=file_sha256(out / "clusters.json"),
    ),
    out / "clustered.jsonl",
)
assert validate_manifest(out / "clustered.jsonl", catalog).ok
print(f"emitted {len(samples)} clustered samples; every group is one "
      "whole cluster")

print("\nthe CLI drives the same files:")
cmd = [
    "weave", "emit",
    "--catalog", str(out / "catalog.jsonl"),
    "--split", str(out / "splits.json"),
    "--split-size", "400",
    "--mode", "clustered",
    "--cluster-file", str(out / "clusters.json"),
    "--videos-per-sample", str(videos_per_sample),
    "--samples", str(samples_per_epoch),
    "--seed", "45",
    "--output", str(out / "clustered_cli.jsonl"),
]
print(" ", " ".join(cmd))
subprocess.run(cmd, check=True)
same = (out / "clustered.jsonl").read_bytes() == (
    out / "clustered_cli.jsonl"
).read_bytes()
print(f"library and CLI manifests byte-identical: {same}")

result = subprocess.run(
    ["weave", "stats", str(out / "clustered_cli.jsonl"),
     "--cluster-file", str(out / "clusters.json")],
    check=True, capture_output=True, text=True,
)
cluster_lines = [
    line for line in result.stdout.splitlines()
    if line.startswith("cluster_samples")
]
print(f"stats reports {len(cluster_lines)} clusters, one sample each")
