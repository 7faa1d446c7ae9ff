"""Review annotations kept in sidecar files next to data files.

``propulsion/engine.yaml.annotations.yaml`` holds a YAML list of entries::

    - target: thrust
      kind: question
      author: rev1
      body: source?
      timestamp: 2024-03-01T10:00:00Z

``target`` is relative to the data file's mount prefix; an empty target
annotates the whole file.
"""

from __future__ import annotations

import os
from collections.abc import Mapping
from pathlib import Path, PurePosixPath

import yaml

from verdad.datamodel.timescales import TimeScale, format_epoch, parse_iso_epoch
from verdad.datamodel.values import AnnotationKind, AnnotationRecord, KeyPath
from verdad.errors import ParseError, VerdadError
from verdad.ingest.formats import load_yaml_text
from verdad.ingest.namespace import ProjectScan, mount_key, scan_project
from verdad.layout import DEFAULT_OUTPUT_DIR, SIDECAR_SUFFIX

REQUIRED_FIELDS = ("target", "kind", "author", "body", "timestamp")


def sidecar_for(data_rel_path: str) -> str:
    return data_rel_path + SIDECAR_SUFFIX


def data_file_for(sidecar_rel_path: str) -> str:
    return sidecar_rel_path[: -len(SIDECAR_SUFFIX)]


def parse_sidecar(text: str, data_rel_path: str, path: str | None = None) -> list[AnnotationRecord]:
    path = path or sidecar_for(data_rel_path)
    items = load_yaml_text(text, "yaml", path)
    if items is None:
        return []
    if not isinstance(items, list):
        raise ParseError("yaml", "annotation sidecar must be a list of entries", path=path)
    prefix = mount_key(data_rel_path)
    records = []
    for i, item in enumerate(items):
        where = f"entry {i}"
        if not isinstance(item, Mapping):
            raise ParseError("yaml", f"{where} is not a mapping", path=path)
        missing = [f for f in REQUIRED_FIELDS if f not in item]
        if missing:
            raise ParseError("yaml", f"{where} lacks {', '.join(missing)}", path=path)
        target = item["target"]
        if target is None:
            target = ""
        try:
            key = prefix.child(*str(target).split(".")) if str(target) else prefix
            records.append(AnnotationRecord(
                key, AnnotationKind(str(item["kind"]).lower()), str(item["author"]),
                str(item["body"]), parse_iso_epoch(str(item["timestamp"]), TimeScale.UTC)))
        except (ValueError, VerdadError) as exc:
            raise ParseError("yaml", f"{where}: {exc}", path=path) from None
    return records


def load_sidecar_annotations(root: str | os.PathLike, output_dir=DEFAULT_OUTPUT_DIR,
                             scan: ProjectScan | None = None) -> list[AnnotationRecord]:
    """Read every annotation sidecar under ``root``. Data files are never opened."""
    root = Path(root)
    if scan is None:
        scan = scan_project(root, output_dir)
    records: list[AnnotationRecord] = []
    for rel in scan.sidecars:
        text = (root / rel).read_bytes().decode("utf-8")
        records.extend(parse_sidecar(text, data_file_for(rel), rel))
    return records


def annotation_entry(record: AnnotationRecord, prefix: KeyPath) -> dict:
    rel = record.target.relative_to(prefix)
    ts = format_epoch(record.timestamp)
    return {
        "target": ".".join(rel),
        "kind": record.kind.value,
        "author": record.author,
        "body": record.body,
        "timestamp": ts[:-len(" UTC")] + "Z",
    }


def append_to_sidecar(root: str | os.PathLike, data_rel_path: str, record: AnnotationRecord) -> Path:
    """Append one entry to a data file's sidecar, creating it if needed."""
    sidecar = Path(root) / PurePosixPath(sidecar_for(data_rel_path))
    entries = []
    if sidecar.exists():
        entries = load_yaml_text(sidecar.read_text("utf-8"), "yaml", str(sidecar)) or []
        if not isinstance(entries, list):
            raise ParseError("yaml", "annotation sidecar must be a list of entries", path=str(sidecar))
    entries.append(annotation_entry(record, mount_key(data_rel_path)))
    sidecar.write_text(yaml.safe_dump(entries, sort_keys=False, allow_unicode=True), "utf-8")
    return sidecar
