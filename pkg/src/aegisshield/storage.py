"""Run persistence: lossless JSON round trips with an embedded schema
version, plus batch-directory enumeration in manifest order."""

from __future__ import annotations

import json
import os

from .domain import ThreatModelRun
from .errors import IoError, SchemaVersionMismatchError

SCHEMA_VERSION = 1


def persist_run(run: ThreatModelRun, path: str) -> None:
    document = {"schema_version": SCHEMA_VERSION, "run": run.to_doc()}
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(document, fh, indent=2)
    except OSError as exc:
        raise IoError(f"writing {path}: {exc}") from exc


def load_run(path: str) -> ThreatModelRun:
    try:
        with open(path, encoding="utf-8") as fh:
            document = json.load(fh)
    except OSError as exc:
        raise IoError(f"reading {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IoError(f"{path} is not valid JSON: {exc}") from exc
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatchError(found=version, supported=SCHEMA_VERSION)
    return ThreatModelRun.from_doc(document["run"])


def load_batch(directory: str) -> list[ThreatModelRun]:
    """Load every run of a batch directory in manifest order."""
    manifest_path = os.path.join(directory, "manifest.json")
    if os.path.exists(manifest_path):
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
        files = manifest.get("files", [])
    else:
        files = sorted(
            (name for name in os.listdir(directory)
             if name.startswith("batch-") and name.endswith(".json")),
            key=lambda name: int(name.split("-")[1].split(".")[0]),
        )
    return [load_run(os.path.join(directory, name)) for name in files]
