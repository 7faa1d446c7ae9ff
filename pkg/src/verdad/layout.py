"""File-name conventions shared by the ingest, template and analysis phases."""

TEMPLATE_EXTENSIONS = (".j2", ".jinja")
BUNDLE_SUFFIX = ".analysis"
MANIFEST_NAME = "manifest.yaml"
SIDECAR_SUFFIX = ".annotations.yaml"
DEFAULT_OUTPUT_DIR = "_verdad"
ANALYSIS_PREFIX = "analysis"


def is_template(name: str) -> bool:
    return name.endswith(TEMPLATE_EXTENSIONS)


def strip_template_extension(name: str) -> str:
    for ext in TEMPLATE_EXTENSIONS:
        if name.endswith(ext):
            return name[: -len(ext)]
    return name
