"""Machine-readable run report written to ``<out>/report.yaml``."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import yaml

from verdad import __version__
from verdad.datamodel.timescales import format_epoch
from verdad.datamodel.values import AnnotationRecord
from verdad.store import PrecedenceOverride


@lru_cache(maxsize=1)
def report_schema() -> dict:
    return json.loads(resources.files("verdad").joinpath("report_schema.json").read_text("utf-8"))


@dataclass
class Report:
    command: str
    errors: list[dict] = field(default_factory=list)
    warnings: list[dict] = field(default_factory=list)
    templates: list[dict] = field(default_factory=list)
    bundles: list[dict] = field(default_factory=list)
    precedence_overrides: list[dict] = field(default_factory=list)
    annotations_unresolved: list[dict] = field(default_factory=list)

    def error(self, source: str, message: str) -> None:
        self.errors.append({"source": source, "message": message})

    def warn(self, source: str, message: str) -> None:
        self.warnings.append({"source": source, "message": message})

    @property
    def ok(self) -> bool:
        return not self.errors

    def add_overrides(self, overrides: list[PrecedenceOverride]) -> None:
        for o in overrides:
            self.precedence_overrides.append(o.to_report())
            self.warn(str(o.key), f"analysis output from bundle {o.bundle} dropped; "
                                  f"user input in {o.user_source} takes precedence")

    def add_unresolved(self, annotations: list[AnnotationRecord]) -> None:
        for a in annotations:
            self.annotations_unresolved.append({
                "target": str(a.target), "kind": a.kind.value, "author": a.author,
                "body": a.body, "timestamp": format_epoch(a.timestamp),
            })
            self.warn(str(a.target), "annotation target does not resolve")

    def to_dict(self) -> dict:
        return {
            "tool": {"name": "verdad", "version": __version__},
            "command": self.command,
            "ok": self.ok,
            "errors": self.errors,
            "warnings": self.warnings,
            "templates": self.templates,
            "bundles": self.bundles,
            "precedence_overrides": self.precedence_overrides,
            "annotations_unresolved": self.annotations_unresolved,
        }

    def validate(self) -> None:
        jsonschema.validate(self.to_dict(), report_schema())

    def write(self, path: Path) -> Path:
        self.validate()
        path.parent.mkdir(parents=True, exist_ok=True)
        text = yaml.safe_dump(self.to_dict(), sort_keys=False, allow_unicode=True)
        path.write_bytes(text.encode("utf-8"))
        return path

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)
