"""Mapping a project directory tree onto dot-separated keys.

``propulsion/engine.yaml`` mounts at ``propulsion.engine``; its ``thrust``
field is then reachable as ``propulsion.engine.thrust``.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath

from verdad.datamodel.values import (
    USER_INPUT, KeyPath, ProvenanceRecord, SourceFormat, Value, descend,
)
from verdad.errors import InvalidKeySegment, InvalidValue, NamespaceCollision, ParseError
from verdad.ingest.formats import detect_format, parse_file
from verdad.layout import (
    BUNDLE_SUFFIX, DEFAULT_OUTPUT_DIR, SIDECAR_SUFFIX, TEMPLATE_EXTENSIONS, is_template,
)

NamespaceEntry = tuple[KeyPath, Value, ProvenanceRecord]


@dataclass
class ProjectScan:
    """Classification of every file under a project root (relative POSIX paths)."""

    data_files: list[tuple[str, SourceFormat]] = field(default_factory=list)
    templates: list[str] = field(default_factory=list)
    bundles: list[str] = field(default_factory=list)
    sidecars: list[str] = field(default_factory=list)
    rendered: list[str] = field(default_factory=list)
    opaque: list[str] = field(default_factory=list)


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _relative_output_dir(root: Path, output_dir: str | os.PathLike | None) -> PurePosixPath | None:
    if output_dir is None:
        return None
    out = Path(output_dir)
    if out.is_absolute():
        try:
            out = out.resolve().relative_to(root.resolve())
        except ValueError:
            return None
    return PurePosixPath(out.as_posix())


def scan_project(root: str | os.PathLike, output_dir: str | os.PathLike | None = DEFAULT_OUTPUT_DIR) -> ProjectScan:
    """Walk ``root`` depth-first in lexicographic order and classify files.

    Dotfiles and dot-directories, the output directory and the insides of
    ``.analysis`` bundles are never classified as data.
    """
    root = Path(root)
    out_rel = _relative_output_dir(root, output_dir)
    scan = ProjectScan()

    def walk(directory: Path, rel: PurePosixPath) -> None:
        with os.scandir(directory) as it:
            entries = sorted(it, key=lambda e: e.name)
        names = {e.name for e in entries}
        for entry in entries:
            name = entry.name
            rel_path = rel / name
            if name.startswith("."):
                continue
            if entry.is_dir(follow_symlinks=False):
                if out_rel is not None and rel_path == out_rel:
                    continue
                if name.endswith(BUNDLE_SUFFIX):
                    scan.bundles.append(rel_path.as_posix())
                    continue
                walk(Path(entry.path), rel_path)
                continue
            if not entry.is_file():
                continue
            if is_template(name):
                scan.templates.append(rel_path.as_posix())
            elif name.endswith(SIDECAR_SUFFIX):
                scan.sidecars.append(rel_path.as_posix())
            elif any(name + ext in names for ext in TEMPLATE_EXTENSIONS):
                scan.rendered.append(rel_path.as_posix())
            else:
                fmt = detect_format(name)
                if fmt is None:
                    scan.opaque.append(rel_path.as_posix())
                else:
                    scan.data_files.append((rel_path.as_posix(), fmt))

    walk(root, PurePosixPath())
    return scan


def mount_key(rel_path: str) -> KeyPath:
    """Key prefix for a project-relative data file: directories + file stem."""
    p = PurePosixPath(rel_path)
    segments = list(p.parent.parts) + [p.name[: -len(p.suffix)] if p.suffix else p.name]
    for seg in segments:
        if not seg or "." in seg:
            raise InvalidKeySegment(rel_path, seg)
    try:
        return KeyPath(tuple(segments))
    except InvalidValue:
        raise InvalidKeySegment(rel_path, rel_path) from None


def find_shadowing(entries: dict[KeyPath, tuple[Value, str]]) -> tuple[KeyPath, str, str] | None:
    """First pair where a shallower entry's value defines a deeper entry's key."""
    for key in sorted(entries):
        for n in range(1, len(key.segments)):
            prefix = KeyPath(key.segments[:n])
            if prefix in entries:
                value, prefix_path = entries[prefix]
                try:
                    descend(value, key.segments[n])
                except KeyError:
                    continue
                return key, prefix_path, entries[key][1]
    return None


def build_namespace(root: str | os.PathLike, output_dir: str | os.PathLike | None = DEFAULT_OUTPUT_DIR,
                    scan: ProjectScan | None = None,
                    errors: list[Exception] | None = None) -> list[NamespaceEntry]:
    """Parse every data file under ``root`` and mount it at its key prefix.

    Returns entries sorted by source path. Two files claiming the same key,
    or a file whose fields overlap a deeper file's key, raise
    :class:`NamespaceCollision`. When ``errors`` is given, per-file parse
    and key errors are appended to it and the file is skipped.
    """
    root = Path(root)
    if scan is None:
        scan = scan_project(root, output_dir)
    claimed: dict[KeyPath, str] = {}
    usable = []
    for rel, fmt in scan.data_files:
        try:
            key = mount_key(rel)
            if key in claimed:
                raise NamespaceCollision(str(key), claimed[key], rel)
        except (InvalidKeySegment, NamespaceCollision) as exc:
            if errors is None:
                raise
            errors.append(exc)
            continue
        claimed[key] = rel
        usable.append((rel, fmt, key))

    result: list[NamespaceEntry] = []
    for seq, (rel, fmt, key) in enumerate(usable, 1):
        data = (root / rel).read_bytes()
        try:
            value = parse_file(data, fmt, rel)
        except ParseError as exc:
            if errors is None:
                raise
            errors.append(exc)
            continue
        prov = ProvenanceRecord(rel, fmt, sha256_hex(data), USER_INPUT, seq)
        result.append((key, value, prov))

    clash = find_shadowing({k: (v, p.source_path) for k, v, p in result})
    if clash is not None:
        key, p1, p2 = clash
        if errors is None:
            raise NamespaceCollision(str(key), p1, p2)
        errors.append(NamespaceCollision(str(key), p1, p2))
        result = [e for e in result if e[2].source_path not in (p1, p2)]
    return result
