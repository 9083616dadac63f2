"""File-backed persistence: one canonical-JSON document per entity.

Layout under the data root:
    designs/<design_id>.json
    universes/<universe_id>.json
    branches/<universe_id>/<branch_id>.json
    audit/audit.ndjson

Writes are atomic (temp file + rename); universe documents are never
rewritten once stored.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from .errors import IntegrityError, NotFoundError
from .model import CommunityDesign, Universe, canonical_json
from .scenario import Branch

ENV_DATA_DIR = "SIMULACRA_DATA_DIR"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_json(path: Path) -> dict:
    if not path.exists():
        raise NotFoundError(f"no such document: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except (ValueError, OSError) as exc:
        raise IntegrityError(f"corrupt document at {path}: {exc}") from exc


class Store:
    def __init__(self, root=None):
        if root is None:
            root = os.environ.get(ENV_DATA_DIR, "simulacra-data")
        self.root = Path(root)
        self.designs_dir = self.root / "designs"
        self.universes_dir = self.root / "universes"
        self.branches_dir = self.root / "branches"
        self.audit_dir = self.root / "audit"

    @property
    def audit_path(self) -> Path:
        self.audit_dir.mkdir(parents=True, exist_ok=True)
        return self.audit_dir / "audit.ndjson"

    # -- designs -----------------------------------------------------------

    def save_design(self, design: CommunityDesign) -> str:
        text = canonical_json(design.to_dict())
        design_id = "d-" + hashlib.blake2b(text.encode(), digest_size=6).hexdigest()
        _atomic_write(self.designs_dir / f"{design_id}.json", text)
        return design_id

    def load_design(self, design_id: str) -> CommunityDesign:
        data = _load_json(self.designs_dir / f"{design_id}.json")
        try:
            return CommunityDesign.from_dict(data)
        except (KeyError, TypeError) as exc:
            raise IntegrityError(
                f"corrupt design at {self.designs_dir / (design_id + '.json')}: {exc}") from exc

    # -- universes ---------------------------------------------------------

    def save_universe(self, universe: Universe) -> str:
        path = self.universes_dir / f"{universe.id}.json"
        text = canonical_json(universe.to_dict())
        if path.exists():
            if path.read_text(encoding="utf-8") == text:
                return universe.id
            raise IntegrityError(f"universe {universe.id} already stored with different content")
        _atomic_write(path, text)
        return universe.id

    def load_universe(self, universe_id: str) -> Universe:
        data = _load_json(self.universes_dir / f"{universe_id}.json")
        try:
            return Universe.from_dict(data)
        except (KeyError, TypeError) as exc:
            raise IntegrityError(
                f"corrupt universe at {self.universes_dir / (universe_id + '.json')}: {exc}") from exc

    def list_universes(self, parent_community: str | None = None) -> list[dict]:
        """Creation-ordered summaries, optionally filtered by community."""
        summaries = []
        if self.universes_dir.exists():
            for path in self.universes_dir.glob("*.json"):
                data = _load_json(path)
                if parent_community is not None and data.get("parent_community") != parent_community:
                    continue
                summaries.append({
                    "id": data["id"],
                    "parent_community": data["parent_community"],
                    "created_at": data["created_at"],
                    "thread_count": len(data.get("threads", [])),
                    "roster_size": len(data.get("roster", [])),
                    "_mtime": path.stat().st_mtime_ns,
                })
        summaries.sort(key=lambda s: (s["created_at"], s.pop("_mtime")))
        return summaries

    # -- branches ----------------------------------------------------------

    def append_threads(self, universe_id: str, branches) -> list[str]:
        """Persist WhatIf/Multiverse outputs as separate branch documents."""
        if not (self.universes_dir / f"{universe_id}.json").exists():
            raise NotFoundError(f"unknown universe: {universe_id}")
        ids = []
        for branch in branches:
            branch_id = branch.thread.id
            path = self.branches_dir / universe_id / f"{branch_id}.json"
            _atomic_write(path, canonical_json(branch.to_dict()))
            ids.append(branch_id)
        return ids

    def load_branches(self, universe_id: str) -> list[Branch]:
        branch_dir = self.branches_dir / universe_id
        branches = []
        if branch_dir.exists():
            for path in sorted(branch_dir.glob("*.json"), key=lambda p: p.stat().st_mtime_ns):
                try:
                    branches.append(Branch.from_dict(_load_json(path)))
                except (KeyError, TypeError) as exc:
                    raise IntegrityError(f"corrupt branch at {path}: {exc}") from exc
        return branches
