"""Catalogs and nested splits.

Builds a synthetic clip catalog, writes it to JSONL, re-ingests it, and
derives a chain of strictly nested splits from one seeded permutation.
"""

import tempfile
from pathlib import Path

from clipweave import build_split_chain, ingest_catalog, save_split_chain, write_catalog
from clipweave.synthetic import make_catalog

out = Path(tempfile.mkdtemp(prefix="weave-demo-"))

catalog = make_catalog(1000, seed=7)
print(f"catalog: {len(catalog)} synthetic clips")
for record in list(catalog)[:3]:
    print(f"  {record.video_id}  frames={record.frame_count:<4} {record.caption!r}")

catalog_path = out / "catalog.jsonl"
write_catalog(catalog, catalog_path)
print(f"\nwrote {catalog_path}")
reloaded = ingest_catalog(catalog_path)
assert reloaded.ids == catalog.ids
print("round trip preserves order and content")

chain = build_split_chain(catalog, sizes=(100, 250, 500, 1000), seed=11)
save_split_chain(chain, out / "splits.json")
print(f"\nsplit chain over one permutation, seed {chain.master_seed}:")
previous = None
for size in chain.sizes:
    split = set(chain.split(size))
    nested = "" if previous is None else f"  contains split({len(previous)})"
    print(f"  split({size}): {len(split)} ids{nested}")
    if previous is not None:
        assert previous < split
    previous = split
print("\nevery smaller split is a strict subset of every larger one")
print(f"artifacts in {out}")
