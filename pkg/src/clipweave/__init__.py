"""Deterministic weaving of clip corpora into fixed-frame-budget
training samples."""

from .catalog import (
    Catalog,
    CatalogError,
    SplitChain,
    SplitError,
    VideoRecord,
    build_split_chain,
    ingest_catalog,
    load_split_chain,
    save_split_chain,
    write_catalog,
)
from .cluster import (
    ClusterConfig,
    ClusterError,
    ClusterModel,
    brute_force_balanced,
    drop_remainder,
    fit_balanced_kmeans,
    load_cluster_model,
    save_cluster_model,
)
from .embeddings import (
    EmbeddingFormatError,
    EmbeddingSet,
    FrameEmbeddingMatrix,
    PooledEmbedding,
    export_embeddings,
    import_embeddings,
    l2_normalize,
    mean_pool,
    pooled_matrix,
)
from .enrich import (
    EnrichmentClient,
    EnrichmentError,
    EnrichmentRequest,
    EnrichmentResult,
    enrich_samples,
)
from .manifest import (
    ManifestError,
    ManifestHeader,
    ValidationReport,
    emit_manifest,
    stats,
    validate_manifest,
)
from .weave import (
    ClipSlice,
    WeaveConfig,
    WeaveError,
    WovenSample,
    build_epoch,
    plan_clustered_groups,
    plan_random_groups,
)

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "CatalogError",
    "ClipSlice",
    "ClusterConfig",
    "ClusterError",
    "ClusterModel",
    "EmbeddingFormatError",
    "EmbeddingSet",
    "EnrichmentClient",
    "EnrichmentError",
    "EnrichmentRequest",
    "EnrichmentResult",
    "FrameEmbeddingMatrix",
    "ManifestError",
    "ManifestHeader",
    "PooledEmbedding",
    "SplitChain",
    "SplitError",
    "ValidationReport",
    "VideoRecord",
    "WeaveConfig",
    "WeaveError",
    "WovenSample",
    "brute_force_balanced",
    "build_epoch",
    "build_split_chain",
    "drop_remainder",
    "emit_manifest",
    "enrich_samples",
    "export_embeddings",
    "fit_balanced_kmeans",
    "import_embeddings",
    "ingest_catalog",
    "l2_normalize",
    "load_cluster_model",
    "load_split_chain",
    "mean_pool",
    "plan_clustered_groups",
    "plan_random_groups",
    "pooled_matrix",
    "save_cluster_model",
    "save_split_chain",
    "validate_manifest",
    "write_catalog",
]
