"""Caption enrichment without a live service.

Shows the prompt a rewriting service would receive, runs the dry-run
path that every offline pipeline uses, and demonstrates the disk cache
that makes repeated live runs cheap.
"""

import json
import tempfile
from pathlib import Path

from clipweave import (
    EnrichmentResult,
    WeaveConfig,
    build_epoch,
    build_split_chain,
    enrich_samples,
    plan_random_groups,
)
from clipweave.enrich import DiskCache, group_key, render_prompt
from clipweave.synthetic import make_catalog

out = Path(tempfile.mkdtemp(prefix="weave-demo-"))

catalog = make_catalog(200, seed=51)
chain = build_split_chain(catalog, sizes=(160,), seed=52)
split = chain.split(160)

config = WeaveConfig(videos_per_sample=4, seed=53, samples_per_epoch=20)
groups = plan_random_groups(split, config.videos_per_sample,
                            config.samples_per_epoch, config.seed)
samples = build_epoch(catalog, split, groups, config)

captions = [catalog[c.video_id].caption for c in samples[0].clips]
print("prompt sent to the rewriting service for the first sample:\n")
print(render_prompt(captions))

# dry-run: deterministic, no network, no cache writes
enriched = enrich_samples(samples, catalog, client=None, cache=None,
                          dry_run=True)
print("\ndry-run caption for the first sample:")
print(" ", enriched[0].caption)
joined = " ".join(captions)
print(f"dry-run equals the plain single-space join: "
      f"{enriched[0].caption == joined}")

# the cache stores one JSON file per caption group, keyed by content
cache = DiskCache(out / "cache")
key = group_key(captions)
cache.put(EnrichmentResult(
    group_key=key,
    enriched_caption="a rewritten caption would live here",
    provider_tag="demo",
    cached=False,
))
entry_files = sorted(p.name for p in (out / "cache").iterdir())
print(f"\ncache dir after one put: {entry_files}")
hit = cache.get(key)
print(f"cache hit round-trips the text: "
      f"{hit.enriched_caption == 'a rewritten caption would live here'}")

# entries are plain JSON, inspectable and rebuildable
entry = json.loads((out / "cache" / f"{key}.json").read_text())
print(f"entry keys: {sorted(entry)}")

# a different template id yields a different key, so cached rewrites
# never leak across prompt revisions
other = group_key(captions, "cohesive-v2")
print(f"same captions, new template, distinct key: {other != key}")
