"""Template discovery, static dependency analysis and rendering.

Templates are Jinja2 files (``.j2`` or ``.jinja``) anywhere in the project
tree. ``report.md.j2`` renders to ``report.md`` next to it. Before anything
is rendered, every template's data dependencies are extracted from its
syntax tree so missing keys can be reported up front.

Store values reach templates through thin read-only views that know their
own key path. The views let a missing key render as ``MISSING(<key>)`` in
permissive mode, and let :class:`AccessRecorder` log every key a render
actually touched.
"""

from __future__ import annotations

import os
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath
from typing import Any

import jinja2
from jinja2 import nodes
from jinja2.runtime import Context

from verdad.datamodel.timescales import Epoch, convert_epoch
from verdad.datamodel.units import parse_unit
from verdad.datamodel.values import (
    KeyPath, Map, Markdown, Quantity, Table, convert_quantity, format_number,
)
from verdad.errors import (
    DimensionMismatch, InvalidValue, MissingKey, NotFound, OutputCollision, RenderError,
    TemplateSyntaxError, UnitError, VerdadError,
)
from verdad.ingest.namespace import ProjectScan, scan_project
from verdad.layout import (
    ANALYSIS_PREFIX, DEFAULT_OUTPUT_DIR, TEMPLATE_EXTENSIONS, is_template,
    strip_template_extension,
)
from verdad.store import Store, get

STRICT = "strict"
PERMISSIVE = "permissive"

_JINJA_GLOBALS = frozenset({
    "range", "dict", "lipsum", "cycler", "joiner", "namespace", "loop", "self", "super",
    "varargs", "kwargs", "caller", "true", "false", "none", "True", "False", "None",
})
_OPTIONAL_TESTS = frozenset({"defined", "undefined"})
_OPTIONAL_FILTERS = frozenset({"default", "d"})


# -- dependency extraction ---------------------------------------------------------


@dataclass(frozen=True)
class TemplateAnalysis:
    dependencies: frozenset[KeyPath]
    required: frozenset[KeyPath]
    lint: tuple[str, ...] = ()


def _parse(body: str, path: str | None = None) -> nodes.Template:
    env = jinja2.Environment()
    try:
        return env.parse(body)
    except jinja2.TemplateSyntaxError as exc:
        raise TemplateSyntaxError(exc.message or str(exc), exc.lineno, None, path) from None


def _is_string_built(node: nodes.Node) -> bool:
    if isinstance(node, nodes.Concat):
        return True
    if isinstance(node, (nodes.Add, nodes.Mod)):
        return any(isinstance(n, nodes.Const) and isinstance(n.value, str)
                   or _is_string_built(n) for n in (node.left, node.right))
    if isinstance(node, nodes.Filter) and node.name in ("format", "join", "string"):
        return True
    return False


class _DependencyWalker:
    """Collects root-anchored key paths read by a template.

    Local names (loop targets, ``set`` targets, macro arguments, ``with``
    targets) resolve to the dependencies of the expressions bound to them,
    so ``{% for s in stages %}{{ s.mass }}`` depends on ``stages``.
    Bindings are tracked per name, not per scope.
    """

    def __init__(self, loader: jinja2.BaseLoader | None, path: str | None):
        self.loader = loader
        self.path = path
        self.bindings: dict[str, list[nodes.Node | None]] = {}
        self.direct: dict[str, list[nodes.Node | None]] = {}  # set/with sources
        self.deps: dict[KeyPath, bool] = {}  # key -> required
        self.lint: list[str] = []
        self.included: set[str] = set()
        self._alias_cache: dict[str, set[KeyPath]] = {}
        self._resolving: set[str] = set()

    # bindings
    def _bind_target(self, target: nodes.Node, source: nodes.Node | None) -> None:
        if isinstance(target, nodes.Name):
            self.bindings.setdefault(target.name, []).append(source)
        elif isinstance(target, nodes.Tuple):
            for item in target.items:
                self._bind_target(item, source)
        elif isinstance(target, nodes.NSRef):
            self.bindings.setdefault(target.name, []).append(source)

    def _bind_direct(self, target: nodes.Node, source: nodes.Node) -> None:
        if isinstance(target, nodes.Name):
            self.direct.setdefault(target.name, []).append(source)

    def _pure_chain(self, node: nodes.Node):
        """(name, segments) when every subscript in the chain is a literal key."""
        segments: list[str] = []
        cur = node
        while isinstance(cur, (nodes.Getattr, nodes.Getitem)):
            if isinstance(cur, nodes.Getattr):
                segments.append(cur.attr)
            else:
                arg = cur.arg
                if not (isinstance(arg, nodes.Const) and isinstance(arg.value, (str, int))
                        and not isinstance(arg.value, bool) and str(arg.value)
                        and "." not in str(arg.value)):
                    return None
                segments.append(str(arg.value))
            cur = cur.node
        if not isinstance(cur, nodes.Name):
            return None
        return cur.name, segments[::-1]

    def _path_alias(self, name: str, segments: list[str]) -> set[KeyPath] | None:
        """Deps of ``name.segments`` when ``name`` only ever aliases plain paths."""
        sources = self.direct.get(name)
        if not sources or len(sources) != len(self.bindings[name]) or name in self._resolving:
            return None
        chains = [self._pure_chain(s) for s in sources]
        if any(c is None for c in chains):
            return None
        self._resolving.add(name)
        try:
            out: set[KeyPath] = set()
            for base, segs in chains:
                out |= self._name_deps(base, [*segs, *segments])
            return out
        finally:
            self._resolving.discard(name)

    def collect_bindings(self, tree: nodes.Node) -> None:
        for node in tree.find_all((nodes.For, nodes.Assign, nodes.AssignBlock, nodes.Macro,
                                   nodes.CallBlock, nodes.With, nodes.Import, nodes.FromImport)):
            if isinstance(node, nodes.For):
                self._bind_target(node.target, node.iter)
            elif isinstance(node, nodes.Assign):
                self._bind_target(node.target, node.node)
                self._bind_direct(node.target, node.node)
            elif isinstance(node, nodes.AssignBlock):
                self._bind_target(node.target, None)
            elif isinstance(node, (nodes.Macro, nodes.CallBlock)):
                if isinstance(node, nodes.Macro):
                    self.bindings.setdefault(node.name, []).append(None)
                for arg in node.args:
                    self._bind_target(arg, None)
            elif isinstance(node, nodes.With):
                for target, value in zip(node.targets, node.values):
                    self._bind_target(target, value)
                    self._bind_direct(target, value)
            elif isinstance(node, nodes.Import):
                self.bindings.setdefault(node.target, []).append(None)
            elif isinstance(node, nodes.FromImport):
                for name in node.names:
                    alias = name[1] if isinstance(name, tuple) else name
                    self.bindings.setdefault(alias, []).append(None)

    def alias_deps(self, name: str) -> set[KeyPath]:
        if name in self._alias_cache:
            return self._alias_cache[name]
        if name in self._resolving:
            return set()
        self._resolving.add(name)
        out: set[KeyPath] = set()
        for source in self.bindings[name]:
            if source is not None:
                out |= self.expr_deps(source)
        self._resolving.discard(name)
        self._alias_cache[name] = out
        return out

    # expressions
    def _chain(self, node: nodes.Node, drop_last: bool = False):
        """(base name, segments) for Name/Getattr/Getitem chains, else None."""
        segments: list[str] = []
        cur = node
        while True:
            if isinstance(cur, nodes.Getattr):
                segments.append(cur.attr)
                cur = cur.node
            elif isinstance(cur, nodes.Getitem):
                arg = cur.arg
                if isinstance(arg, nodes.Const) and isinstance(arg.value, (str, int)) \
                        and not isinstance(arg.value, bool) and str(arg.value) \
                        and "." not in str(arg.value):
                    segments.append(str(arg.value))
                else:
                    segments.clear()  # truncate below a computed subscript
                    if _is_string_built(arg):
                        self.lint.append(f"line {cur.lineno}: key built from strings; "
                                         "dependencies cannot be checked statically")
                cur = cur.node
            elif isinstance(cur, nodes.Name):
                segments.reverse()
                if drop_last and segments:
                    segments.pop()
                return cur.name, segments
            else:
                return None

    def _chain_roots(self, node: nodes.Node) -> list[nodes.Node]:
        """Subexpressions inside a chain that are walked separately."""
        out = []
        cur = node
        while isinstance(cur, (nodes.Getattr, nodes.Getitem)):
            if isinstance(cur, nodes.Getitem):
                out.append(cur.arg)
            cur = cur.node
        if not isinstance(cur, nodes.Name):
            out.append(cur)
        return out

    def _name_deps(self, name: str, segments: list[str]) -> set[KeyPath]:
        if name in self.bindings:
            direct = self._path_alias(name, segments)
            return direct if direct is not None else set(self.alias_deps(name))
        if name in _JINJA_GLOBALS:
            return set()
        return {KeyPath((name, *segments))}

    def expr_deps(self, node: nodes.Node, drop_last: bool = False) -> set[KeyPath]:
        out: set[KeyPath] = set()
        self._visit(node, out, set(), drop_last)
        return out

    def _visit(self, node: nodes.Node, required: set[KeyPath], optional: set[KeyPath],
               drop_last: bool = False) -> None:
        if isinstance(node, (nodes.Name, nodes.Getattr, nodes.Getitem)):
            if isinstance(node, nodes.Name) and node.ctx != "load":
                return
            chain = self._chain(node, drop_last)
            if chain is not None:
                required |= self._name_deps(*chain)
                for sub in self._chain_roots(node):
                    self._visit(sub, required, optional)
                return
            for sub in self._chain_roots(node):
                self._visit(sub, required, optional)
            return
        if isinstance(node, nodes.Call):
            self._visit(node.node, required, optional, drop_last=True)
            for child in (*node.args, *node.kwargs, node.dyn_args, node.dyn_kwargs):
                if child is not None:
                    self._visit(child, required, optional)
            return
        if isinstance(node, nodes.Test) and node.name in _OPTIONAL_TESTS:
            self._visit(node.node, optional, optional)
            for child in (*node.args, *node.kwargs):
                self._visit(child, required, optional)
            return
        if isinstance(node, nodes.Filter) and node.name in _OPTIONAL_FILTERS and node.node is not None:
            self._visit(node.node, optional, optional)
            for child in (*node.args, *node.kwargs):
                self._visit(child, required, optional)
            return
        if isinstance(node, (nodes.Include, nodes.Import, nodes.FromImport)):
            self._include(node.template, required, optional)
            return
        if isinstance(node, nodes.If):
            guards: set[KeyPath] = set()
            self._visit(node.test, required, guards)
            optional |= guards
            body_required: set[KeyPath] = set()
            for child in node.body:
                self._visit(child, body_required, optional)
            for key in body_required:
                (optional if any(key.startswith(g) for g in guards) else required).add(key)
            for child in (*node.elif_, *node.else_):
                self._visit(child, required, optional)
            return
        if isinstance(node, nodes.With):
            for target, value in zip(node.targets, node.values):
                if not (isinstance(target, nodes.Name) and self._pure_chain(value)):
                    self._visit(value, required, optional)
            self._walk_field(node.body, required, optional)
            return
        if isinstance(node, (nodes.Assign, nodes.For)):
            # targets are stores; only walk the sources and bodies.
            # A plain-path alias is accounted for where it is used.
            for fname in node.fields:
                if fname == "target":
                    continue
                if isinstance(node, nodes.Assign) and isinstance(node.target, nodes.Name) \
                        and self._pure_chain(node.node):
                    continue
                self._walk_field(getattr(node, fname), required, optional)
            return
        for child in node.iter_child_nodes():
            self._visit(child, required, optional)

    def _walk_field(self, value: Any, required, optional) -> None:
        if isinstance(value, nodes.Node):
            self._visit(value, required, optional)
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, nodes.Node):
                    self._visit(item, required, optional)

    def _include(self, template: nodes.Node, required, optional) -> None:
        names = []
        if isinstance(template, nodes.Const) and isinstance(template.value, str):
            names = [template.value]
        elif isinstance(template, (nodes.List, nodes.Tuple)) and all(
                isinstance(i, nodes.Const) for i in template.items):
            names = [i.value for i in template.items]
        else:
            self.lint.append(f"line {template.lineno}: computed include name; "
                             "its dependencies cannot be checked statically")
            self._visit(template, required, optional)
            return
        if self.loader is None:
            return
        env = jinja2.Environment(loader=self.loader)
        for name in names:
            if name in self.included:
                continue
            self.included.add(name)
            try:
                source, _, _ = self.loader.get_source(env, name)
            except jinja2.TemplateNotFound:
                self.lint.append(f"included template {name!r} not found")
                continue
            sub = _parse(source, name)
            self.collect_bindings(sub)
            self._alias_cache.clear()
            for child in sub.iter_child_nodes():
                self._visit(child, required, optional)

    def run(self, tree: nodes.Template) -> TemplateAnalysis:
        self.collect_bindings(tree)
        required: set[KeyPath] = set()
        optional: set[KeyPath] = set()
        for child in tree.iter_child_nodes():
            self._visit(child, required, optional)
        return TemplateAnalysis(frozenset(required | optional), frozenset(required),
                                tuple(dict.fromkeys(self.lint)))


def analyze_template(body: str, loader: jinja2.BaseLoader | None = None,
                     path: str | None = None) -> TemplateAnalysis:
    return _DependencyWalker(loader, path).run(_parse(body, path))


def extract_dependencies(body: str, loader: jinja2.BaseLoader | None = None) -> set[KeyPath]:
    """Every root-anchored key path a template may read.

    Over-approximates: a path through a loop variable or a computed
    subscript is cut back to the part that is known statically.
    """
    return set(analyze_template(body, loader).dependencies)


# -- views -------------------------------------------------------------------------


class AccessRecorder:
    """Collects every key path touched during a render."""

    def __init__(self):
        self.paths: set[KeyPath] = set()

    def add(self, path: KeyPath) -> None:
        self.paths.add(path)


def _view(value: Any, path: KeyPath, rec: AccessRecorder | None) -> Any:
    if isinstance(value, Map) and not isinstance(value, MapView):
        return MapView._wrap(value, path, rec)
    if isinstance(value, Table) and not isinstance(value, TableView):
        return TableView._wrap(value, path, rec)
    if type(value) is tuple:
        return SeqView._wrap(value, path, rec)
    return value


class MapView(Map):
    __slots__ = ("_path", "_rec")

    @classmethod
    def _wrap(cls, m: Map, path: KeyPath, rec):
        self = object.__new__(cls)
        self._data = m._data
        self._hash = None
        self._path = path
        self._rec = rec
        return self

    def __getitem__(self, key):
        value = self._data[key]
        child = self._path.child(key)
        if self._rec is not None:
            self._rec.add(child)
        return _view(value, child, self._rec)

    def __iter__(self):
        if self._rec is not None:
            self._rec.add(self._path)
        return iter(self._data)

    def __str__(self) -> str:
        if self._rec is not None:
            self._rec.add(self._path)
        return "{" + ", ".join(f"{k}: {_plain_str(v)}" for k, v in self._data.items()) + "}"


class SeqView(tuple):
    @classmethod
    def _wrap(cls, t: tuple, path: KeyPath, rec):
        self = tuple.__new__(cls, t)
        self._path = path
        self._rec = rec
        return self

    def __getitem__(self, index):
        if isinstance(index, slice):
            if self._rec is not None:
                self._rec.add(self._path)
            return SeqView._wrap(tuple.__getitem__(self, index), self._path, self._rec)
        value = tuple.__getitem__(self, index)
        child = self._path.child(str(index % len(self)))
        if self._rec is not None:
            self._rec.add(child)
        return _view(value, child, self._rec)

    def __iter__(self):
        for i, value in enumerate(tuple.__iter__(self)):
            child = self._path.child(str(i))
            if self._rec is not None:
                self._rec.add(child)
            yield _view(value, child, self._rec)

    def __str__(self) -> str:
        if self._rec is not None:
            self._rec.add(self._path)
        return "[" + ", ".join(_plain_str(v) for v in tuple.__iter__(self)) + "]"


class TableView(Table):
    @classmethod
    def _wrap(cls, t: Table, path: KeyPath, rec):
        self = object.__new__(cls)
        object.__setattr__(self, "columns", t.columns)
        object.__setattr__(self, "rows", t.rows)
        object.__setattr__(self, "_path", path)
        object.__setattr__(self, "_rec", rec)
        return self

    def lookup(self, name: str):
        child = self._path.child(name)
        if self._rec is not None:
            self._rec.add(child)
        if name == "rows" and name not in self.column_names:
            return SeqView._wrap(tuple(self.row(i) for i in range(len(self.rows))), child, self._rec)
        return SeqView._wrap(self.column(name), child, self._rec)

    def __iter__(self):
        return iter(self.lookup("rows"))

    def __len__(self) -> int:
        return len(self.rows)


def _plain_str(value: Any) -> str:
    if isinstance(value, Map):
        return "{" + ", ".join(f"{k}: {_plain_str(v)}" for k, v in value.items()) + "}"
    if isinstance(value, tuple):
        return "[" + ", ".join(_plain_str(v) for v in value) + "]"
    if isinstance(value, float):
        return format_number(value)
    return str(value)


# -- environment -------------------------------------------------------------------


class MissingPlaceholder(jinja2.Undefined):
    """Permissive-mode stand-in that renders as ``MISSING(<key>)``."""

    def __str__(self) -> str:
        return f"MISSING({self._undefined_name})"


class StrictMissing(jinja2.StrictUndefined):
    pass


class _RecordingContext(Context):
    def resolve_or_missing(self, key):
        rv = super().resolve_or_missing(key)
        rec = getattr(self.environment, "recorder", None)
        if rec is not None and isinstance(rv, (MapView, SeqView, TableView)) and len(rv._path) == 1:
            rec.add(rv._path)
        elif rec is not None and key in getattr(self.environment, "data_roots", ()):
            rec.add(KeyPath((key,)))
        return rv


class DataEnvironment(jinja2.Environment):
    """Jinja environment where dot access prefers data keys over methods."""

    context_class = _RecordingContext

    def __init__(self, *, mode: str = STRICT, recorder: AccessRecorder | None = None, **kwargs):
        undefined = StrictMissing if mode == STRICT else MissingPlaceholder
        kwargs.setdefault("keep_trailing_newline", True)
        super().__init__(undefined=undefined, autoescape=False, **kwargs)
        self.mode = mode
        self.recorder = recorder
        self.data_roots: frozenset[str] = frozenset()
        self.filters.update(FILTERS)
        self.finalize = _finalize

    def _missing(self, path: KeyPath, obj: Any = None):
        return self.undefined(name=str(path), obj=obj)

    def getattr(self, obj, attribute):
        if isinstance(obj, jinja2.Undefined) and obj._undefined_name:
            return self.undefined(name=f"{obj._undefined_name}.{attribute}")
        if isinstance(obj, Map):
            if attribute in obj:
                return obj[attribute]
            if isinstance(obj, MapView) and not hasattr(Map, attribute):
                return self._missing(obj._path.child(attribute), obj)
        elif isinstance(obj, TableView):
            if attribute in obj.column_names or attribute == "rows":
                return obj.lookup(attribute)
            if not hasattr(obj, attribute):
                return self._missing(obj._path.child(attribute), obj)
        return super().getattr(obj, attribute)

    def getitem(self, obj, argument):
        if isinstance(obj, jinja2.Undefined) and obj._undefined_name:
            return self.undefined(name=f"{obj._undefined_name}.{argument}")
        if isinstance(argument, str):
            if isinstance(obj, Map):
                if argument in obj:
                    return obj[argument]
                if isinstance(obj, MapView) and argument and "." not in argument:
                    return self._missing(obj._path.child(argument), obj)
            elif isinstance(obj, TableView):
                if argument in obj.column_names or argument == "rows":
                    return obj.lookup(argument)
        if isinstance(obj, SeqView) and isinstance(argument, int) and not isinstance(argument, bool):
            if -len(obj) <= argument < len(obj):
                return obj[argument]
            return self._missing(obj._path.child(str(argument)), obj)
        return super().getitem(obj, argument)


def _finalize(value):
    if isinstance(value, float):
        return format_number(value)
    if isinstance(value, Markdown):
        return value.body
    return value


# -- filters -------------------------------------------------------------------------


def _filter_to(value, unit_text: str):
    if isinstance(value, Quantity):
        return convert_quantity(value, parse_unit(str(unit_text)))
    if isinstance(value, tuple):
        target = parse_unit(str(unit_text))
        return tuple(None if v is None else convert_quantity(v, target) for v in value)
    raise RenderError(f"'to' filter expects a quantity, got {type(value).__name__}")


def _filter_scale(value, scale_name: str):
    if not isinstance(value, Epoch):
        raise RenderError(f"'scale' filter expects an epoch, got {type(value).__name__}")
    return convert_epoch(value, str(scale_name).upper())


def _round_number(x: float, precision: int, method: str) -> float:
    if method == "common":
        return round(x, precision)
    import math
    factor = 10 ** precision
    fn = math.ceil if method == "ceil" else math.floor
    return fn(x * factor) / factor


def _filter_round(value, precision: int = 0, method: str = "common"):
    if isinstance(value, Quantity):
        return Quantity(_round_number(value.magnitude, precision, method), value.unit)
    if isinstance(value, jinja2.Undefined):
        return value
    return _round_number(float(value), precision, method)


def _cell_text(cell: Any) -> str:
    if cell is None:
        return ""
    if isinstance(cell, float):
        return format_number(cell)
    if isinstance(cell, bool):
        return "true" if cell else "false"
    return str(cell).replace("|", "\\|")


def _filter_table(value) -> str:
    """Markdown pipe table. Quantity columns with one unit show it in the header."""
    if not isinstance(value, Table):
        raise RenderError(f"'table' filter expects a table, got {type(value).__name__}")
    headers, columns = [], []
    for j, col in enumerate(value.columns):
        cells = [row[j] for row in value.rows]
        units = {c.unit.label for c in cells if isinstance(c, Quantity)}
        if len(units) == 1 and all(c is None or isinstance(c, Quantity) for c in cells):
            (label,) = units
            headers.append(f"{col.name} [{label}]")
            cells = [None if c is None else c.magnitude for c in cells]
        else:
            headers.append(col.name)
        columns.append([_cell_text(c) for c in cells])
    lines = ["| " + " | ".join(headers) + " |", "|" + "|".join("---" for _ in headers) + "|"]
    for i in range(len(value.rows)):
        lines.append("| " + " | ".join(col[i] for col in columns) + " |")
    return "\n".join(lines)


_QTY_TEXT = re.compile(r"\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s+(\S.*?)\s*")


def parse_quantity_text(text: str) -> Quantity:
    """``"3.5 km/s"`` -> Quantity(3.5, km/s)."""
    m = _QTY_TEXT.fullmatch(str(text))
    if not m:
        raise RenderError(f"cannot read a quantity from {text!r}")
    try:
        return Quantity(float(m.group(1)), parse_unit(m.group(2)))
    except UnitError as exc:
        raise RenderError(f"cannot read a quantity from {text!r}: {exc}", exc) from None


FILTERS = {
    "to": _filter_to,
    "scale": _filter_scale,
    "round": _filter_round,
    "table": _filter_table,
    "parse_qty": parse_quantity_text,
}


# -- template units ------------------------------------------------------------------


@dataclass(frozen=True)
class TemplateUnit:
    source_path: str
    output_path: str
    dependencies: frozenset[KeyPath]
    body: str
    required: frozenset[KeyPath] = frozenset()
    lint: tuple[str, ...] = ()
    search_path: tuple[str, ...] = ()
    error: VerdadError | None = field(default=None, compare=False)


def output_path_for(source_path: str) -> str:
    out = strip_template_extension(source_path)
    if out == source_path or is_template(out):
        raise OutputCollision(f"{source_path}: output name {out!r} would itself be a template")
    return out


def load_unit(root: str | os.PathLike, rel_path: str, search_path: Iterable[str] | None = None) -> TemplateUnit:
    root = Path(root)
    search = tuple(search_path) if search_path is not None else (str(root),)
    body = (root / rel_path).read_text("utf-8")
    try:
        output = output_path_for(rel_path)
    except OutputCollision as exc:
        return TemplateUnit(rel_path, rel_path, frozenset(), body, search_path=search, error=exc)
    try:
        analysis = analyze_template(body, jinja2.FileSystemLoader(list(search)), rel_path)
    except TemplateSyntaxError as exc:
        return TemplateUnit(rel_path, output, frozenset(), body, search_path=search, error=exc)
    return TemplateUnit(rel_path, output, analysis.dependencies, body, analysis.required,
                        analysis.lint, search)


def discover_templates(root: str | os.PathLike, output_dir=DEFAULT_OUTPUT_DIR,
                       scan: ProjectScan | None = None) -> list[TemplateUnit]:
    """All ``.j2``/``.jinja`` files outside analysis bundles, sorted by path.

    Problems found during discovery (syntax errors, clashing outputs) are
    attached to the unit's ``error`` instead of being raised.
    """
    root = Path(root)
    if scan is None:
        scan = scan_project(root, output_dir)
    units = [load_unit(root, rel) for rel in sorted(scan.templates)]
    seen: dict[str, str] = {}
    data_paths = {p for p, _ in scan.data_files}
    out = []
    for unit in units:
        if unit.error is None:
            other = seen.get(unit.output_path)
            if other is not None or unit.output_path in data_paths:
                clash = other or unit.output_path
                unit = TemplateUnit(unit.source_path, unit.output_path, unit.dependencies, unit.body,
                                    unit.required, unit.lint, unit.search_path,
                                    OutputCollision(f"{unit.source_path} and {clash} both write "
                                                    f"{unit.output_path}"))
            seen.setdefault(unit.output_path, unit.source_path)
        out.append(unit)
    return out


# -- completeness ----------------------------------------------------------------------


def _is_container(value: Any) -> bool:
    return isinstance(value, (Map, Table, tuple, Markdown))


def resolvable(store: Store, key: KeyPath) -> bool:
    """Whether a template read of ``key`` can succeed.

    Segments past a scalar leaf are attribute access on that value
    (``thrust.magnitude``), which the store does not model as keys.
    """
    try:
        get(store, key)
        return True
    except NotFound as exc:
        nearest = exc.nearest
    if not nearest:
        return False
    return not _is_container(get(store, nearest))


@dataclass
class TemplateCheck:
    source_path: str
    missing: list[KeyPath]
    hints: dict[str, str] = field(default_factory=dict)
    lint: tuple[str, ...] = ()
    error: str | None = None

    @property
    def complete(self) -> bool:
        return not self.missing and self.error is None


def check_completeness(units: Iterable[TemplateUnit], store: Store,
                       producers: Mapping[str, Iterable[str]] | None = None) -> list[TemplateCheck]:
    """Per template, the required keys the store cannot resolve.

    ``producers`` maps bundle names to their declared output file paths;
    a missing ``analysis.<bundle>.<stem>...`` key gets a hint naming the
    bundle that would produce it.
    """
    stems: dict[KeyPath, str] = {}
    for bundle, outputs in (producers or {}).items():
        for out in outputs:
            p = PurePosixPath(out)
            segs = [*p.parent.parts, p.name[: -len(p.suffix)] if p.suffix else p.name]
            try:
                stems[KeyPath((ANALYSIS_PREFIX, bundle, *segs))] = bundle
            except InvalidValue:
                continue
    report = []
    for unit in units:
        if unit.error is not None:
            report.append(TemplateCheck(unit.source_path, [], {}, unit.lint, str(unit.error)))
            continue
        missing = sorted(k for k in unit.required if not resolvable(store, k))
        hints = {}
        for k in missing:
            for prefix, bundle in stems.items():
                if k.startswith(prefix):
                    hints[str(k)] = f"possibly produced by bundle {bundle}"
        report.append(TemplateCheck(unit.source_path, missing, hints, unit.lint))
    return report


# -- rendering -----------------------------------------------------------------------


def make_environment(mode: str = STRICT, search_path: Iterable[str] = (),
                     recorder: AccessRecorder | None = None) -> DataEnvironment:
    loader = jinja2.FileSystemLoader(list(search_path)) if search_path else None
    return DataEnvironment(mode=mode, recorder=recorder, loader=loader)


def render_context(store: Store, recorder: AccessRecorder | None = None) -> dict[str, Any]:
    return {seg: _view(get(store, seg), KeyPath((seg,)), recorder)
            for seg in store.child_segments(None)}


def render_text(body: str, store: Store, mode: str = STRICT, search_path: Iterable[str] = (),
                recorder: AccessRecorder | None = None, path: str | None = None) -> str:
    """Render template source against the store."""
    env = make_environment(mode, search_path, recorder)
    context = render_context(store, recorder)
    env.data_roots = frozenset(context)
    try:
        template = env.from_string(body)
    except jinja2.TemplateSyntaxError as exc:
        raise TemplateSyntaxError(exc.message or str(exc), exc.lineno, None, path) from None
    try:
        return template.render(context)
    except jinja2.UndefinedError as exc:
        name = _undefined_name(exc)
        raise RenderError(f"{path or '<template>'}: missing key {name}", MissingKey(name), path) from exc
    except jinja2.TemplateSyntaxError as exc:
        raise TemplateSyntaxError(exc.message or str(exc), exc.lineno, None, exc.name or path) from None
    except DimensionMismatch as exc:
        raise RenderError(f"{path or '<template>'}: {exc}", exc, path) from exc
    except RenderError as exc:
        raise RenderError(f"{path or '<template>'}: {exc}", exc.cause or exc, path) from exc
    except (UnitError, VerdadError) as exc:
        raise RenderError(f"{path or '<template>'}: {exc}", exc, path) from exc
    except Exception as exc:  # anything jinja or a filter raised while rendering
        raise RenderError(f"{path or '<template>'}: {type(exc).__name__}: {exc}", exc, path) from exc


def _undefined_name(exc: jinja2.UndefinedError) -> str:
    m = re.search(r"'([^']+)' is undefined", str(exc))
    if m:
        return m.group(1)
    m = re.search(r"has no attribute '([^']+)'", str(exc))
    return m.group(1) if m else str(exc)


def render(unit: TemplateUnit, store: Store, mode: str = STRICT,
           recorder: AccessRecorder | None = None) -> str:
    """Render one template unit. In strict mode missing keys raise RenderError."""
    if unit.error is not None:
        raise unit.error
    if mode == STRICT:
        missing = sorted(k for k in unit.required if not resolvable(store, k))
        if missing:
            raise RenderError(f"{unit.source_path}: missing key {missing[0]}",
                              MissingKey(str(missing[0])), unit.source_path)
    return render_text(unit.body, store, mode, unit.search_path, recorder, unit.source_path)


@dataclass
class RenderReport:
    rendered: list[str] = field(default_factory=list)
    skipped_incomplete: list[dict] = field(default_factory=list)
    failed: list[dict] = field(default_factory=list)
    checks: list[TemplateCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed


def write_output(path: Path, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))


def render_all(root: str | os.PathLike, store: Store, mode: str = STRICT,
               units: list[TemplateUnit] | None = None,
               producers: Mapping[str, Iterable[str]] | None = None) -> RenderReport:
    """Discover, check, render and write every template next to its source."""
    root = Path(root)
    if units is None:
        units = discover_templates(root)
    report = RenderReport()
    checks = check_completeness(units, store, producers)
    report.checks = checks
    for unit, check in zip(units, checks):
        if check.error is not None:
            report.failed.append({"template": unit.source_path, "error": check.error})
            continue
        if check.missing and mode == STRICT:
            report.skipped_incomplete.append(
                {"template": unit.source_path, "missing": [str(k) for k in check.missing]})
            continue
        try:
            text = render(unit, store, mode)
        except (RenderError, TemplateSyntaxError) as exc:
            report.failed.append({"template": unit.source_path, "error": str(exc)})
            continue
        write_output(root / unit.output_path, text)
        report.rendered.append(unit.output_path)
    return report


__all__ = [
    "AccessRecorder", "DataEnvironment", "RenderReport", "TemplateAnalysis", "TemplateCheck",
    "TemplateUnit", "analyze_template", "check_completeness", "discover_templates",
    "extract_dependencies", "output_path_for", "parse_quantity_text", "render", "render_all",
    "render_text", "Markdown", "TEMPLATE_EXTENSIONS",
]
