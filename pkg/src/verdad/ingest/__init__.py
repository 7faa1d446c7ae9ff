"""Parsing data files into Values and mounting them into the key namespace."""

from verdad.ingest.annotations import load_sidecar_annotations
from verdad.ingest.coerce import coerce_domain_types
from verdad.ingest.formats import detect_format, parse_file
from verdad.ingest.namespace import ProjectScan, build_namespace, mount_key, scan_project

__all__ = [
    "ProjectScan", "build_namespace", "coerce_domain_types", "detect_format",
    "load_sidecar_annotations", "mount_key", "parse_file", "scan_project",
]
