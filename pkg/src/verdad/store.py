"""Immutable, versioned key-value store over the project namespace.

Every write returns a new :class:`Store` whose ``parent`` is the previous
version; nothing is ever modified in place. Entries are mounted at key
prefixes (one per data file or analysis output file) and :func:`get`
descends from the longest matching prefix into Maps, Tables and Sequences.

User input always wins over analysis output. When an analysis value would
define a key that user data already defines, the analysis value at that key
is dropped and a :class:`PrecedenceOverride` is recorded instead of raising.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any

from verdad.datamodel.canonical import dumps_canonical, to_tagged
from verdad.datamodel.values import (
    AnnotationRecord, KeyPath, Map, Origin, ProvenanceRecord, Value, descend,
)
from verdad.errors import CollisionWithinCommit, NotFound
from verdad.layout import ANALYSIS_PREFIX


@dataclass(frozen=True)
class Entry:
    value: Value
    provenance: ProvenanceRecord

    @property
    def origin(self) -> Origin:
        return self.provenance.origin


@dataclass(frozen=True)
class PrecedenceOverride:
    """An analysis value that was dropped because user input defines the key."""

    key: KeyPath
    bundle: str
    user_source: str
    version: int

    def to_report(self) -> dict:
        return {"key": str(self.key), "bundle": self.bundle, "user_source": self.user_source,
                "version": self.version}


@dataclass(frozen=True, eq=False)
class Store:
    version: int = 0
    entries: Mapping[KeyPath, Entry] = field(default_factory=lambda: MappingProxyType({}))
    annotations: tuple[AnnotationRecord, ...] = ()
    unresolved_annotations: tuple[AnnotationRecord, ...] = ()
    overrides: tuple[PrecedenceOverride, ...] = ()  # recorded by the write that made this version
    parent: Store | None = field(default=None, repr=False)

    def __post_init__(self):
        if not isinstance(self.entries, MappingProxyType):
            object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))
        object.__setattr__(self, "_children", None)

    def child_segments(self, key: KeyPath | None) -> list[str]:
        """Next segments of entries strictly below ``key`` (``None`` = root)."""
        if self._children is None:
            index: dict[tuple[str, ...], set[str]] = {}
            for k in self.entries:
                for n in range(len(k.segments)):
                    index.setdefault(k.segments[:n], set()).add(k.segments[n])
            object.__setattr__(self, "_children", index)
        segs = () if key is None else key.segments
        return sorted(self._children.get(segs, ()))

    def __contains__(self, key) -> bool:
        try:
            get(self, key)
        except NotFound:
            return False
        return True

    def __getitem__(self, key) -> Value:
        return get(self, key)

    def versions(self) -> list[Store]:
        chain = []
        s: Store | None = self
        while s is not None:
            chain.append(s)
            s = s.parent
        return chain[::-1]

    @classmethod
    def empty(cls) -> Store:
        return cls()


def _key(key: KeyPath | str) -> KeyPath:
    return KeyPath.parse(key)


def descend_path(value: Value, segments: Iterable[str]) -> Value:
    for seg in segments:
        value = descend(value, seg)
    return value


def _resolves(value: Value, segments: tuple[str, ...]) -> bool:
    try:
        descend_path(value, segments)
    except KeyError:
        return False
    return True


def _resolve_entry(store: Store, key: KeyPath) -> tuple[Value, Entry] | None:
    segs = key.segments
    for n in range(len(segs), 0, -1):
        entry = store.entries.get(KeyPath(segs[:n]))
        if entry is None:
            continue
        try:
            return descend_path(entry.value, segs[n:]), entry
        except KeyError:
            continue
    return None


def _lookup(store: Store, key: KeyPath) -> tuple[Value, Entry | None] | None:
    resolved = _resolve_entry(store, key)
    children = store.child_segments(key)
    if not children:
        return resolved
    if resolved is not None and not isinstance(resolved[0], Map):
        return resolved
    base = dict(resolved[0]) if resolved is not None else {}
    for seg in children:
        if seg not in base:
            found = _lookup(store, key.child(seg))
            if found is not None:
                base[seg] = found[0]
    return Map(base), (resolved[1] if resolved is not None else None)


def get(store: Store, key: KeyPath | str) -> Value:
    """Resolve a key: longest entry prefix, then descent through the value.

    Keys that only name a directory level resolve to a Map of everything
    mounted beneath them. Raises :class:`NotFound` carrying the deepest
    prefix that did resolve.
    """
    key = _key(key)
    found = _lookup(store, key)
    if found is None:
        nearest = ""
        for n in range(len(key.segments) - 1, 0, -1):
            prefix = KeyPath(key.segments[:n])
            if _lookup(store, prefix) is not None:
                nearest = str(prefix)
                break
        raise NotFound(key, nearest)
    return found[0]


def provenance_of(store: Store, key: KeyPath | str) -> ProvenanceRecord | None:
    resolved = _resolve_entry(store, _key(key))
    return None if resolved is None else resolved[1].provenance


def root_view(store: Store) -> Map:
    """The whole store as one nested Map."""
    return Map((seg, get(store, KeyPath((seg,)))) for seg in store.child_segments(None))


# -- writes --------------------------------------------------------------------


def _prune(value: Value, segments: tuple[str, ...]) -> Value | None:
    """Remove the node at ``segments`` from nested Maps; None if impossible."""
    if not isinstance(value, Map):
        return None
    head, rest = segments[0], segments[1:]
    if not rest:
        return value.without(head)
    inner = _prune(value[head], rest)
    return None if inner is None else value.replace(head, inner)


def _apply(working: dict[KeyPath, Entry], key: KeyPath, entry: Entry, version: int,
           overrides: list[PrecedenceOverride]) -> None:
    """Insert one entry into ``working`` under the user-input-wins rule."""
    origin = entry.origin
    user_entries = [(k, e) for k, e in working.items() if e.origin.is_user_input]
    if not origin.is_user_input:
        bundle = origin.bundle
        for k, e in user_entries:
            if key.startswith(k) and _resolves(e.value, key.segments[len(k):]):
                overrides.append(PrecedenceOverride(key, bundle, e.provenance.source_path, version))
                return
        value = entry.value
        for k, e in sorted(user_entries, key=lambda ke: ke[0]):
            if k != key and k.startswith(key):
                rest = k.segments[len(key):]
                if _resolves(value, rest):
                    overrides.append(PrecedenceOverride(k, bundle, e.provenance.source_path, version))
                    value = _prune(value, rest)
                    if value is None:
                        return
        working[key] = Entry(value, entry.provenance)
        return

    for k, e in sorted(working.items(), key=lambda ke: ke[0]):
        if e.origin.is_user_input:
            continue
        bundle = e.origin.bundle
        src = entry.provenance.source_path
        if k == key or (k.startswith(key) and _resolves(entry.value, k.segments[len(key):])):
            overrides.append(PrecedenceOverride(k, bundle, src, version))
            del working[k]
        elif key.startswith(k) and _resolves(e.value, key.segments[len(k):]):
            overrides.append(PrecedenceOverride(key, bundle, src, version))
            pruned = _prune(e.value, key.segments[len(k):])
            if pruned is None:
                del working[k]
            else:
                working[k] = Entry(pruned, e.provenance)
    working[key] = entry


def commit(parent: Store, entries: Iterable[tuple[KeyPath | str, Value, ProvenanceRecord]]) -> Store:
    """New store version with ``entries`` added.

    A key repeated within ``entries``, or already held by the parent with the
    same origin, raises :class:`CollisionWithinCommit`. Across origins, user
    input wins.
    """
    entries = [(_key(k), v, p) for k, v, p in entries]
    seen = set()
    for k, _, _ in entries:
        if k in seen:
            raise CollisionWithinCommit(k)
        seen.add(k)
    version = parent.version + 1
    working = dict(parent.entries)
    overrides: list[PrecedenceOverride] = []
    for k, v, p in entries:
        existing = working.get(k)
        if existing is not None and existing.origin == p.origin:
            raise CollisionWithinCommit(k)
        _apply(working, k, Entry(v, p), version, overrides)
    return Store(version, working, parent.annotations, parent.unresolved_annotations,
                 tuple(overrides), parent)


def merge_analysis_outputs(store: Store, bundle: str, outputs: Iterable[tuple]) -> Store:
    """Mount a bundle's outputs under ``analysis.<bundle>``.

    ``outputs`` holds ``(relative_key, value)`` or
    ``(relative_key, value, provenance)`` tuples. Earlier outputs of the same
    bundle at the same key are replaced. Values colliding with user input
    are dropped and recorded as precedence overrides.
    """
    version = store.version + 1
    origin = Origin(bundle)
    prefix = KeyPath((ANALYSIS_PREFIX, bundle))
    working = dict(store.entries)
    overrides: list[PrecedenceOverride] = []
    next_seq = max((e.provenance.load_sequence for e in working.values()), default=0) + 1
    for item in outputs:
        rel, value = item[0], item[1]
        rel = _key(rel)
        key = prefix.child(*rel.segments)
        if len(item) > 2:
            prov = item[2]
        else:
            prov = ProvenanceRecord(f"{ANALYSIS_PREFIX}:{bundle}", None, "", origin, next_seq)
            next_seq += 1
        if prov.origin != origin:
            prov = ProvenanceRecord(prov.source_path, prov.format, prov.content_hash, origin,
                                    prov.load_sequence)
        existing = working.get(key)
        if existing is not None and existing.origin == origin:
            del working[key]
        _apply(working, key, Entry(value, prov), version, overrides)
    return Store(version, working, store.annotations, store.unresolved_annotations,
                 tuple(overrides), store)


def attach_annotations(store: Store, annotations: Iterable[AnnotationRecord]) -> Store:
    """New store version with annotations appended; unresolvable targets are flagged."""
    annotations = tuple(annotations)
    unresolved = tuple(a for a in annotations if a.target not in store)
    return Store(store.version + 1, store.entries, store.annotations + annotations,
                 store.unresolved_annotations + unresolved, (), store)


def history(store: Store, key: KeyPath | str) -> list[tuple[int, Value, ProvenanceRecord]]:
    """Versions at which the entry resolving ``key`` changed, oldest first."""
    key = _key(key)
    out = []
    last: Entry | None = None
    for s in store.versions():
        resolved = _resolve_entry(s, key)
        entry = None if resolved is None else resolved[1]
        if entry is not None and entry is not last:
            out.append((s.version, resolved[0], entry.provenance))
        last = entry
    return out


def precedence_overrides(store: Store) -> list[PrecedenceOverride]:
    return [o for s in store.versions() for o in s.overrides]


# -- serialization -------------------------------------------------------------


def store_document(store: Store) -> dict[str, Any]:
    return {
        "version": store.version,
        "entries": {
            str(k): {"value": to_tagged(e.value), "provenance": to_tagged(e.provenance)}
            for k, e in sorted(store.entries.items())
        },
        "annotations": [to_tagged(a) for a in store.annotations],
        "unresolved_annotations": [to_tagged(a) for a in store.unresolved_annotations],
    }


def canonical_store_bytes(store: Store) -> bytes:
    """Canonical JSON of the full store: values, provenance and annotations."""
    return dumps_canonical(store_document(store))


def canonical_values_bytes(store: Store) -> bytes:
    """Canonical JSON of the key -> value mapping only (no provenance)."""
    return dumps_canonical({str(k): to_tagged(e.value) for k, e in sorted(store.entries.items())})
