"""Content-addressed on-disk cache of task results.

Keys are sha256 digests of (scenario definitions, task, tool version); values
are JSON files written atomically (temp file + rename), so concurrent readers
only ever see complete entries.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Optional

from .. import __version__
from .scenario import canonical_json

ENV_VAR = "GCOHOM_CACHE_DIR"


def default_cache_dir() -> Optional[str]:
    return os.environ.get(ENV_VAR) or None


def fragment_key(definitions: dict, task: dict, version: str = __version__) -> str:
    body = {"definitions": definitions, "task": {k: v for k, v in task.items() if k != "id"}, "version": version}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


class ResultStore:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str):
        path = self._path(key)
        try:
            with open(path, encoding="utf-8") as fh:
                entry = json.load(fh)
        except (OSError, ValueError):
            self.misses += 1
            return None
        if entry.get("key") != key:
            self.misses += 1
            return None
        self.hits += 1
        return entry["result"]

    def put(self, key: str, result) -> None:
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump({"key": key, "version": __version__, "result": result}, fh)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
