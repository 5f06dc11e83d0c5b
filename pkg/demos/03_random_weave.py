"""Random weaving: fixed frame budget, variable clips per sample.

Builds one epoch at each group size and shows that the total frame
count never moves: more clips per sample just means fewer frames each.
"""

import json
import tempfile
from pathlib import Path

from clipweave import (
    ManifestHeader,
    WeaveConfig,
    build_epoch,
    build_split_chain,
    emit_manifest,
    plan_random_groups,
    validate_manifest,
)
from clipweave.manifest import stats
from clipweave.synthetic import make_catalog

out = Path(tempfile.mkdtemp(prefix="weave-demo-"))
catalog = make_catalog(4000, seed=31)
chain = build_split_chain(catalog, sizes=(3200,), seed=32)
split = chain.split(3200)

samples_per_epoch = 200
for videos_per_sample in (1, 2, 4, 8, 16):
    config = WeaveConfig(
        videos_per_sample=videos_per_sample, seed=33,
        samples_per_epoch=samples_per_epoch,
    )
    groups = plan_random_groups(
        split, videos_per_sample, samples_per_epoch, config.seed
    )
    samples = build_epoch(catalog, split, groups, config)
    path = out / f"epoch_L{videos_per_sample}.jsonl"
    emit_manifest(
        samples,
        ManifestHeader(config=config, split_size=3200, split_seed=32),
        path,
    )
    summary = stats(path)
    print(
        f"L={videos_per_sample:>2}: {summary.samples} samples, "
        f"{config.frames_per_video:>2} frames/clip, "
        f"{summary.total_frame_refs} total frame refs, "
        f"{summary.videos} distinct videos"
    )
    assert validate_manifest(path, catalog).ok

print("\nframe budget is conserved at every group size")

sample = json.loads((out / "epoch_L4.jsonl").read_text().splitlines()[1])
print("\none L=4 sample:")
print(f"  caption: {sample['caption'][:100]}...")
for clip in sample["clips"]:
    print(f"  {clip['video_id']}: frames {clip['frame_indices']}")
