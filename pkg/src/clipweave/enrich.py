"""Optional caption rewriting through an external chat-completion service.

Off by default: joined captions train better than rewritten ones, so
enrichment exists for experimentation.  Results are cached on disk keyed
by a content hash of (template_id, ordered captions); re-running over
the same groups never repeats a service call.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import requests

from .catalog import Catalog
from .weave import WovenSample

TEMPLATE_ID = "cohesive-v1"

ENDPOINT_ENV = "WEAVE_ENRICH_ENDPOINT"
MODEL_ENV = "WEAVE_ENRICH_MODEL"
API_KEY_ENV = "WEAVE_ENRICH_API_KEY"

MAX_ATTEMPTS = 3
BACKOFF_BASE_S = 1.0
DEFAULT_MAX_WORKERS = 4


class EnrichmentError(RuntimeError):
    """Raised for degenerate replies or misconfiguration."""


class EnrichmentTransportError(EnrichmentError):
    """Raised when the service stays unreachable after retries."""

    def __init__(self, message: str, group_key: str):
        super().__init__(message)
        self.group_key = group_key


def group_key(captions: Sequence[str], template_id: str = TEMPLATE_ID) -> str:
    """Content hash of the ordered captions under one template version."""
    payload = json.dumps([template_id, *captions], ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class EnrichmentRequest:
    captions: tuple[str, ...]
    template_id: str = TEMPLATE_ID

    def __post_init__(self) -> None:
        if not self.captions:
            raise EnrichmentError("cannot enrich an empty caption list")

    @property
    def group_key(self) -> str:
        return group_key(self.captions, self.template_id)


@dataclass(frozen=True)
class EnrichmentResult:
    group_key: str
    enriched_caption: str
    provider_tag: str
    cached: bool


def render_prompt(captions: Sequence[str]) -> str:
    """Deterministic rewriting instruction embedding the numbered captions."""
    if not captions:
        raise EnrichmentError("cannot render a prompt for zero captions")
    lines = [
        "The numbered lines below are captions of consecutive segments of "
        "one video.",
        "Rewrite them into a single cohesive caption that reads as one "
        "continuous description and preserves every piece of semantic "
        "information from every input line.",
        "Reply with the rewritten caption only.",
        "",
    ]
    lines.extend(f"{i}. {caption}" for i, caption in enumerate(captions, start=1))
    return "\n".join(lines)


class DiskCache:
    """One JSON file per group_key; corrupt entries read as misses."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> EnrichmentResult | None:
        path = self._path(key)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                obj = json.load(fh)
            caption = obj["enriched_caption"]
            if obj["group_key"] != key or not str(caption).strip():
                return None
            return EnrichmentResult(
                group_key=key,
                enriched_caption=str(caption),
                provider_tag=str(obj["provider_tag"]),
                cached=True,
            )
        except (OSError, ValueError, KeyError):
            return None

    def put(self, result: EnrichmentResult) -> None:
        # write-temp-then-rename so readers never see partial entries
        obj = {
            "group_key": result.group_key,
            "enriched_caption": result.enriched_caption,
            "provider_tag": result.provider_tag,
        }
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(obj, fh, ensure_ascii=False)
            os.replace(tmp, self._path(result.group_key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


class EnrichmentClient:
    """Minimal chat-completion client; endpoint/model/key from env vars."""

    def __init__(
        self,
        endpoint: str | None = None,
        model: str | None = None,
        api_key: str | None = None,
        session: requests.Session | None = None,
        sleep: Callable[[float], None] = time.sleep,
        timeout_s: float = 60.0,
    ):
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV)
        self.model = model or os.environ.get(MODEL_ENV)
        self.api_key = api_key or os.environ.get(API_KEY_ENV)
        self.session = session or requests.Session()
        self.sleep = sleep
        self.timeout_s = timeout_s
        if not self.endpoint or not self.model:
            raise EnrichmentError(
                f"enrichment needs an endpoint and a model; set "
                f"{ENDPOINT_ENV} and {MODEL_ENV} or pass them explicitly"
            )

    @property
    def provider_tag(self) -> str:
        return self.model or "unknown"

    def complete(self, prompt: str) -> str:
        """POST one chat request, retrying transport failures with backoff."""
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        last_error: Exception | None = None
        for attempt in range(MAX_ATTEMPTS):
            if attempt:
                self.sleep(BACKOFF_BASE_S * 2 ** (attempt - 1))
            try:
                response = self.session.post(
                    self.endpoint, json=body, headers=headers,
                    timeout=self.timeout_s,
                )
                response.raise_for_status()
                return _extract_text(response.json())
            except (requests.RequestException, ValueError) as exc:
                last_error = exc
        raise EnrichmentError(
            f"service unreachable after {MAX_ATTEMPTS} attempts: {last_error}"
        )


def _extract_text(payload: dict) -> str:
    try:
        return str(payload["choices"][0]["message"]["content"])
    except (KeyError, IndexError, TypeError):
        pass
    for key in ("content", "text"):
        if isinstance(payload.get(key), str):
            return payload[key]
    raise ValueError(f"no generated text in response: {json.dumps(payload)[:200]}")


def enrich(
    request: EnrichmentRequest,
    client: EnrichmentClient | None,
    cache: DiskCache | None,
    dry_run: bool = False,
) -> EnrichmentResult:
    """Rewrite one group's captions, consulting the cache first.

    Dry-run bypasses both service and cache and returns the plain
    whitespace join, tagged "dry-run".
    """
    key = request.group_key
    if dry_run:
        return EnrichmentResult(
            group_key=key,
            enriched_caption=" ".join(request.captions),
            provider_tag="dry-run",
            cached=False,
        )
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit
    if client is None:
        raise EnrichmentError("no client configured and not in dry-run mode")
    try:
        reply = client.complete(render_prompt(request.captions))
    except EnrichmentError as exc:
        raise EnrichmentTransportError(str(exc), group_key=key) from exc
    if not reply.strip():
        raise EnrichmentError(f"degenerate enrichment for group {key}")
    result = EnrichmentResult(
        group_key=key,
        enriched_caption=reply,
        provider_tag=client.provider_tag,
        cached=False,
    )
    if cache is not None:
        cache.put(result)
    return result


def enrich_all(
    requests_: Sequence[EnrichmentRequest],
    client: EnrichmentClient | None,
    cache: DiskCache | None,
    dry_run: bool = False,
    max_workers: int = DEFAULT_MAX_WORKERS,
) -> dict[str, EnrichmentResult]:
    """Enrich many groups with bounded concurrency, keyed by group_key."""
    results: dict[str, EnrichmentResult] = {}
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        for result in pool.map(
            lambda r: enrich(r, client, cache, dry_run=dry_run), requests_
        ):
            results[result.group_key] = result
    return results


def enrich_samples(
    samples: Sequence[WovenSample],
    catalog: Catalog,
    client: EnrichmentClient | None,
    cache: DiskCache | None,
    dry_run: bool = False,
    max_workers: int = DEFAULT_MAX_WORKERS,
) -> list[WovenSample]:
    """New sample list with captions rewritten; inputs stay untouched.

    Runs strictly before emission, so a failed batch can never corrupt
    an already-written manifest.
    """
    requests_ = [
        EnrichmentRequest(
            captions=tuple(catalog[c.video_id].caption for c in s.clips)
        )
        for s in samples
    ]
    results = enrich_all(
        requests_, client, cache, dry_run=dry_run, max_workers=max_workers
    )
    out = []
    for sample, request in zip(samples, requests_):
        result = results[request.group_key]
        out.append(
            WovenSample(
                sample_id=sample.sample_id,
                clips=sample.clips,
                caption=result.enriched_caption,
                prompt=sample.prompt,
            )
        )
    return out
