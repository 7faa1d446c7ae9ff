"""Exception hierarchy shared by all verdad modules."""

from __future__ import annotations


class VerdadError(Exception):
    """Base class for every error raised by verdad."""


# -- datamodel ---------------------------------------------------------------


class UnitError(VerdadError):
    pass


class UnknownUnitSymbol(UnitError):
    def __init__(self, text: str, start: int, end: int):
        self.text = text
        self.span = (start, end)
        super().__init__(f"unknown unit symbol {text[start:end]!r} at {start}:{end} in {text!r}")


class MalformedExpression(UnitError):
    def __init__(self, text: str, reason: str):
        self.text = text
        self.reason = reason
        super().__init__(f"malformed unit expression {text!r}: {reason}")


class DimensionMismatch(UnitError):
    def __init__(self, source, target):
        self.source = source
        self.target = target
        super().__init__(f"cannot convert {source.label!r} to {target.label!r}: incompatible dimensions")


class TimeError(VerdadError):
    pass


class EpochOutOfLeapTable(TimeError):
    pass


class InvalidCalendarDate(TimeError):
    pass


class InvalidLeapSecond(TimeError):
    pass


class InvalidValue(VerdadError):
    """A value violates a structural invariant of the generic data type."""


# -- ingest ------------------------------------------------------------------


class ParseError(VerdadError):
    def __init__(self, fmt: str, message: str, line: int | None = None,
                 column: int | None = None, path: str | None = None):
        self.format = fmt
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        super().__init__(str(self))

    def __str__(self) -> str:
        where = self.path or "<bytes>"
        if self.line is not None:
            where += f":{self.line}"
            if self.column is not None:
                where += f":{self.column}"
        return f"{self.format} parse error at {where}: {self.message}"


class EncodingError(ParseError):
    pass


class CoercionError(VerdadError):
    def __init__(self, message: str, cause: Exception | None = None):
        self.cause = cause
        super().__init__(message)


class NamespaceError(VerdadError):
    pass


class NamespaceCollision(NamespaceError):
    def __init__(self, key: str, path1: str, path2: str):
        self.key = key
        self.paths = (path1, path2)
        super().__init__(f"namespace collision at {key!r}: {path1} and {path2}")


class InvalidKeySegment(NamespaceError):
    def __init__(self, path: str, segment: str):
        self.path = path
        self.segment = segment
        super().__init__(f"{path}: name {segment!r} cannot be used as a key segment")


# -- store -------------------------------------------------------------------


class StoreError(VerdadError):
    pass


class NotFound(StoreError, KeyError):
    def __init__(self, key, nearest):
        self.key = key
        self.nearest = nearest
        StoreError.__init__(self, f"{key} not found (nearest resolvable prefix: {str(nearest)!r})")

    def __str__(self) -> str:
        return self.args[0]


class CollisionWithinCommit(StoreError):
    def __init__(self, key):
        self.key = key
        super().__init__(f"key {key} appears more than once in a single commit")


# -- templates ---------------------------------------------------------------


class TemplateError(VerdadError):
    pass


class TemplateSyntaxError(TemplateError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 path: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        loc = f"{path or '<template>'}:{line if line is not None else '?'}"
        super().__init__(f"template syntax error at {loc}: {message}")


class RenderError(TemplateError):
    def __init__(self, message: str, cause: Exception | None = None, path: str | None = None):
        self.cause = cause
        self.path = path
        super().__init__(message)


class MissingKey(TemplateError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"missing key {key}")


class OutputCollision(TemplateError):
    pass


# -- analysis ----------------------------------------------------------------


class AnalysisError(VerdadError):
    pass


class ManifestMissing(AnalysisError):
    def __init__(self, bundle_path: str):
        self.bundle_path = bundle_path
        super().__init__(f"{bundle_path}: manifest.yaml not found")


class ManifestInvalid(AnalysisError):
    def __init__(self, field: str, reason: str, bundle_path: str | None = None):
        self.field = field
        self.reason = reason
        self.bundle_path = bundle_path
        prefix = f"{bundle_path}: " if bundle_path else ""
        super().__init__(f"{prefix}invalid manifest field {field!r}: {reason}")


class DuplicateBundleName(AnalysisError):
    def __init__(self, name: str, paths: tuple[str, str]):
        self.name = name
        self.paths = paths
        super().__init__(f"bundle name {name!r} declared by both {paths[0]} and {paths[1]}")


class MissingInput(AnalysisError):
    def __init__(self, bundle: str, keys):
        self.bundle = bundle
        self.keys = tuple(keys)
        super().__init__(f"bundle {bundle!r} inputs not resolvable: {', '.join(map(str, self.keys))}")


class DependencyCycle(AnalysisError):
    def __init__(self, names):
        self.names = tuple(names)
        super().__init__(f"analysis bundles form a dependency cycle: {' -> '.join(self.names)}")


class RuntimeProbeFailed(AnalysisError):
    pass


# -- cli ---------------------------------------------------------------------


class TargetExists(VerdadError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"{path} already exists (use --force to overwrite)")


class TargetUnresolvable(VerdadError):
    def __init__(self, key: str, reason: str = ""):
        self.key = key
        super().__init__(f"cannot annotate {key}" + (f": {reason}" if reason else ""))
