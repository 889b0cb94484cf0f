"""Small versioned JSON cache for expensive enumerations.

Entries are files ``<kind>-<sha256 of key>.json`` holding the key itself, a
format version and the payload.  A key or version mismatch is treated as a
miss, so stale files are never returned.
"""
from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

FORMAT = "orbizeta-cache"
VERSION = 1
ENV_VAR = "ORBIZETA_CACHE_DIR"


def default_cache_dir() -> Path | None:
    v = os.environ.get(ENV_VAR)
    return Path(v) if v else None


def _path(cache_dir: Path, kind: str, key: dict) -> Path:
    blob = json.dumps(key, sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(blob.encode()).hexdigest()[:24]
    return Path(cache_dir) / f"{kind}-{digest}.json"


def load(cache_dir, kind: str, key: dict):
    if cache_dir is None:
        return None
    p = _path(cache_dir, kind, key)
    try:
        data = json.loads(p.read_text())
    except (OSError, ValueError):
        return None
    if data.get("format") != FORMAT or data.get("version") != VERSION or data.get("key") != key:
        return None
    return data["payload"]


def store(cache_dir, kind: str, key: dict, payload) -> None:
    if cache_dir is None:
        return
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    p = _path(cache_dir, kind, key)
    tmp = p.with_suffix(".tmp")
    tmp.write_text(json.dumps({"format": FORMAT, "version": VERSION, "key": key, "payload": payload},
                              sort_keys=True))
    tmp.replace(p)
