"""Embedding IO, pooling, and capacity-constrained clustering.

Round-trips per-frame embeddings through the binary file format, pools
them into per-clip feature vectors, and fits a balanced K-means where
every cluster holds exactly `capacity` clips.
"""

import tempfile
from pathlib import Path

import numpy as np

from clipweave import (
    ClusterConfig,
    export_embeddings,
    fit_balanced_kmeans,
    import_embeddings,
    pooled_matrix,
    save_cluster_model,
)
from clipweave.synthetic import make_catalog, make_embedding_set

out = Path(tempfile.mkdtemp(prefix="weave-demo-"))

catalog = make_catalog(96, seed=21)
embeddings = make_embedding_set(catalog, seed=22, dim=64, rows_per_video=16)

emb_path = out / "embeddings.bin"
export_embeddings(embeddings, emb_path)
print(f"wrote {emb_path} ({emb_path.stat().st_size} bytes)")
loaded = import_embeddings(emb_path)
assert loaded.ids == embeddings.ids
print(f"binary round trip: {len(loaded)} clips, dim {loaded.dim}")

points = pooled_matrix(loaded, loaded.ids)  # mean pool + L2 normalize
norms = np.linalg.norm(points, axis=1)
print(f"pooled features: {points.shape}, norms in "
      f"[{norms.min():.6f}, {norms.max():.6f}]")

config = ClusterConfig(n_clusters=24, capacity=4, seed=5)
model = fit_balanced_kmeans(points, config, ids=loaded.ids)
counts = np.bincount(model.assignments, minlength=config.n_clusters)
print(f"\nbalanced k-means: {config.n_clusters} clusters x capacity "
      f"{config.capacity}")
print(f"  converged={model.converged} after {model.iterations_run} iterations")
print(f"  members per cluster: min={counts.min()} max={counts.max()}")
print(f"  inertia trajectory: "
      + " -> ".join(f"{v:.2f}" for v in model.inertia_log[:6])
      + ("..." if len(model.inertia_log) > 6 else ""))
assert (counts == config.capacity).all()

model_path = out / "clusters.json"
save_cluster_model(model, model_path)
print(f"\nsaved cluster model to {model_path}")
print("members of cluster 0:",
      [v for v, c in zip(model.ids, model.assignments) if c == 0])
