"""Command-line entry point: ``verdad check|build|run|scaffold|annotate``.

Exit status: 0 on success, 1 on validation or execution failure, 2 on
usage errors. Diagnostics go to stderr; stdout carries only the report
when ``--json`` is given.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import sys
from dataclasses import dataclass, field
from pathlib import Path

from verdad import __version__
from verdad.analysis import (
    DEFAULT_TIMEOUT, RUNTIME_MODES, Bundle, BundleRun, discover_bundles, order_bundles, producers,
    resolve_runtime, run_pipeline, validate_bundle,
)
from verdad.datamodel.timescales import TimeScale, parse_iso_epoch
from verdad.datamodel.values import AnnotationKind, AnnotationRecord, KeyPath
from verdad.errors import (
    AnalysisError, InvalidValue, OutputCollision, RuntimeProbeFailed, TargetExists,
    TargetUnresolvable, TemplateSyntaxError, TimeError, VerdadError,
)
from verdad.ingest.annotations import append_to_sidecar, load_sidecar_annotations
from verdad.ingest.namespace import ProjectScan, build_namespace, scan_project, sha256_hex
from verdad.layout import ANALYSIS_PREFIX, DEFAULT_OUTPUT_DIR
from verdad.report import Report
from verdad.scaffold import KINDS, scaffold
from verdad.store import (
    Store, attach_annotations, canonical_store_bytes, commit, precedence_overrides,
)
from verdad.templates import (
    PERMISSIVE, STRICT, RenderReport, TemplateCheck, TemplateUnit, check_completeness,
    discover_templates, render_all,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    root: Path
    output_dir: Path = Path(DEFAULT_OUTPUT_DIR)
    mode: str = STRICT
    runtime: str = "auto"
    timeout: float = DEFAULT_TIMEOUT
    dump_store: bool = False
    json: bool = False
    engine: str = "docker"
    network: bool = False
    schedule_seed: int | None = None

    @property
    def out(self) -> Path:
        return self.output_dir if self.output_dir.is_absolute() else self.root / self.output_dir


@dataclass
class Project:
    scan: ProjectScan
    store: Store
    units: list[TemplateUnit]
    bundles: list[Bundle]
    ingest_failed: bool = False
    producers: dict = field(default_factory=dict)


def _source_of(exc: Exception) -> str:
    for attr in ("path", "bundle_path"):
        value = getattr(exc, attr, None)
        if value:
            return str(value)
    return "project"


def load_project(cfg: RunConfig, report: Report) -> Project:
    """Ingest data and annotations, discover templates and bundles, validate manifests."""
    scan = scan_project(cfg.root, cfg.output_dir)
    errors: list[Exception] = []
    entries = build_namespace(cfg.root, cfg.output_dir, scan, errors)
    for exc in errors:
        report.error(_source_of(exc), str(exc))
    store = commit(Store(), entries)
    try:
        annotations = load_sidecar_annotations(cfg.root, cfg.output_dir, scan)
    except VerdadError as exc:
        report.error(_source_of(exc), str(exc))
        annotations = []
    store = attach_annotations(store, annotations)
    report.add_unresolved(list(store.unresolved_annotations))

    units = discover_templates(cfg.root, cfg.output_dir, scan)
    bundle_errors: list[Exception] = []
    bundles = discover_bundles(cfg.root, cfg.output_dir, scan, bundle_errors)
    for exc in bundle_errors:
        report.error(_source_of(exc), str(exc))
    valid = []
    for bundle in bundles:
        try:
            validate_bundle(bundle)
        except (AnalysisError, TemplateSyntaxError, OutputCollision) as exc:
            report.error(bundle.path, str(exc))
            continue
        valid.append(bundle)
    try:
        order_bundles(valid)
    except AnalysisError as exc:
        report.error("bundles", str(exc))
    return Project(scan, store, units, valid, bool(errors), producers(valid))


def _missing_diagnostics(report: Report, source: str, missing, hints, mode: str) -> None:
    for key in missing:
        hint = hints.get(str(key))
        if hint:
            report.warn(source, f"missing key {key} ({hint})")
        elif mode == STRICT:
            report.error(source, f"missing key {key}")
        else:
            report.warn(source, f"missing key {key} (rendered as placeholder)")


def _lint_diagnostics(report: Report, unit: TemplateUnit, mode: str) -> None:
    for lint in unit.lint:
        if mode == STRICT:
            report.error(unit.source_path, lint)
        else:
            report.warn(unit.source_path, lint)


def _template_entry(unit: TemplateUnit, status: str, check: TemplateCheck | None) -> dict:
    entry = {"template": unit.source_path, "output": unit.output_path, "status": status,
             "missing": [str(k) for k in check.missing] if check else []}
    if check and check.hints:
        entry["hints"] = dict(sorted(check.hints.items()))
    if unit.lint:
        entry["lint"] = list(unit.lint)
    if check and check.error:
        entry["error"] = check.error
    return entry


def report_checks(report: Report, project: Project, mode: str) -> None:
    checks = check_completeness(project.units, project.store, project.producers)
    for unit, check in zip(project.units, checks):
        _lint_diagnostics(report, unit, mode)
        if check.error:
            report.error(unit.source_path, check.error)
            status = "failed"
        else:
            _missing_diagnostics(report, unit.source_path, check.missing, check.hints, mode)
            status = "complete" if not check.missing else "incomplete"
        report.templates.append(_template_entry(unit, status, check))


def report_bundle_inputs(report: Report, project: Project, mode: str) -> None:
    names = {b.name for b in project.bundles}
    for bundle in project.bundles:
        for key in bundle.manifest.inputs:
            if key in project.store:
                continue
            segs = key.segments
            if segs[0] == ANALYSIS_PREFIX and len(segs) > 1 and segs[1] in names:
                continue
            if mode == STRICT:
                report.error(bundle.path, f"declared input {key} is not in the store")
            else:
                report.warn(bundle.path, f"declared input {key} is not in the store")


def report_render(report: Report, project: Project, rendered: RenderReport, mode: str) -> None:
    report.templates.clear()
    by_source = {c.source_path: c for c in rendered.checks}
    done = set(rendered.rendered)
    skipped = {s["template"] for s in rendered.skipped_incomplete}
    failed = {f["template"]: f["error"] for f in rendered.failed}
    for unit in project.units:
        check = by_source.get(unit.source_path)
        _lint_diagnostics(report, unit, mode)
        if unit.source_path in failed:
            report.error(unit.source_path, failed[unit.source_path])
            entry = _template_entry(unit, "failed", check)
            entry["error"] = failed[unit.source_path]
        elif unit.source_path in skipped:
            _missing_diagnostics(report, unit.source_path, check.missing, check.hints, mode)
            entry = _template_entry(unit, "skipped", check)
        elif unit.output_path in done:
            if check and check.missing:
                _missing_diagnostics(report, unit.source_path, check.missing, check.hints, mode)
            entry = _template_entry(unit, "rendered", check)
        else:
            continue
        report.templates.append(entry)


def _bundle_entry(bundle: Bundle, run: BundleRun | None, cfg: RunConfig) -> dict:
    entry: dict = {"name": bundle.name, "path": bundle.path}
    if run is None:
        entry["status"] = "Discovered"
        return entry
    entry["status"] = run.status.value
    if run.staging is not None:
        entry["staging"] = _rel(run.staging, cfg.root)
    if run.produced:
        entry["produced"] = [{"path": p, "sha256": h} for p, h in run.produced]
    if run.missing:
        entry["missing"] = list(run.missing)
    if run.log:
        log_path = cfg.out / "logs" / f"{bundle.name}.log"
        log_path.parent.mkdir(parents=True, exist_ok=True)
        log_path.write_bytes(run.log.encode("utf-8"))
        entry["log"] = _rel(log_path, cfg.root)
    if run.error:
        entry["error"] = run.error
    if run.notes:
        entry["notes"] = list(run.notes)
    return entry


def _rel(path: Path, root: Path) -> str:
    try:
        return path.resolve().relative_to(root.resolve()).as_posix()
    except ValueError:
        return path.as_posix()


def _finish(report: Report, cfg: RunConfig, store: Store | None = None) -> int:
    for d in report.errors:
        print(f"error: {d['source']}: {d['message']}", file=sys.stderr)
    for d in report.warnings:
        print(f"warning: {d['source']}: {d['message']}", file=sys.stderr)
    report.write(cfg.out / "report.yaml")
    if cfg.dump_store and store is not None:
        (cfg.out / "store.json").write_bytes(canonical_store_bytes(store))
    if cfg.json:
        print(report.to_json())
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_check(cfg: RunConfig) -> int:
    report = Report("check")
    project = load_project(cfg, report)
    report_checks(report, project, cfg.mode)
    report_bundle_inputs(report, project, cfg.mode)
    report.bundles = [_bundle_entry(b, None, cfg) for b in project.bundles]
    return _finish(report, cfg, project.store)


def _build(cfg: RunConfig, report: Report) -> tuple[Project, bool]:
    project = load_project(cfg, report)
    report_bundle_inputs(report, project, cfg.mode)
    if project.ingest_failed:
        report_checks(report, project, cfg.mode)
        return project, False
    rendered = render_all(cfg.root, project.store, cfg.mode, project.units, project.producers)
    report_render(report, project, rendered, cfg.mode)
    return project, True


def cmd_build(cfg: RunConfig) -> int:
    report = Report("build")
    project, _ = _build(cfg, report)
    report.bundles = [_bundle_entry(b, None, cfg) for b in project.bundles]
    return _finish(report, cfg, project.store)


def cmd_run(cfg: RunConfig) -> int:
    report = Report("run")
    project, ok = _build(cfg, report)
    store = project.store
    if not ok:
        report.bundles = [_bundle_entry(b, None, cfg) for b in project.bundles]
        return _finish(report, cfg, store)
    try:
        runtime = resolve_runtime(cfg.runtime, cfg.engine, network=cfg.network, timeout=cfg.timeout)
    except RuntimeProbeFailed as exc:
        report.error("runtime", str(exc))
        report.bundles = [_bundle_entry(b, None, cfg) for b in project.bundles]
        return _finish(report, cfg, store)
    if runtime is None and project.bundles:
        report.warn("runtime", "no container runtime; bundles are staged but not executed")
    try:
        result = run_pipeline(cfg.root, store, runtime, output_dir=cfg.output_dir, mode=cfg.mode,
                              bundles=project.bundles, schedule_seed=cfg.schedule_seed)
    except AnalysisError as exc:
        report.error("bundles", str(exc))
        return _finish(report, cfg, store)
    store = result.store
    # the final render supersedes first-pass template diagnostics
    report.warnings = [w for w in report.warnings if not _is_template_diag(w, project)]
    report.errors = [e for e in report.errors if not _is_template_diag(e, project)]
    report_render(report, project, result.render, cfg.mode)
    runs = {r.bundle: r for r in result.runs}
    report.bundles = [_bundle_entry(b, runs.get(b.name), cfg) for b in project.bundles]
    for run in result.runs:
        if run.failed:
            report.error(f"bundle {run.bundle}", run.error or run.status.value)
    report.add_overrides(precedence_overrides(store))
    return _finish(report, cfg, store)


def _is_template_diag(diag: dict, project: Project) -> bool:
    return diag["source"] in {u.source_path for u in project.units}


def cmd_scaffold(cfg: RunConfig, kind: str, force: bool) -> int:
    try:
        written = scaffold(kind, cfg.root, force)
    except TargetExists as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    for path in written:
        print(f"wrote {_rel(path, cfg.root)}", file=sys.stderr)
    return EXIT_OK


def owning_file(entries, target: KeyPath) -> tuple[str, KeyPath] | None:
    """Data file whose mount prefix is the longest prefix of ``target``."""
    best = None
    for key, _, prov in entries:
        if target.startswith(key) and (best is None or len(key) > len(best[1])):
            best = (prov.source_path, key)
    return best


def cmd_annotate(cfg: RunConfig, target: str, kind: str, author: str, body: str,
                 timestamp: str | None) -> int:
    try:
        key = KeyPath.parse(target)
        entries = build_namespace(cfg.root, cfg.output_dir, errors=[])
        owner = owning_file(entries, key)
        if owner is None:
            raise TargetUnresolvable(target, "no data file mounts a prefix of this key")
        store = commit(Store(), entries)
        if key not in store:
            raise TargetUnresolvable(target, "key does not resolve in the store")
        when = timestamp or _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        record = AnnotationRecord(key, AnnotationKind(kind), author, body,
                                  parse_iso_epoch(when, TimeScale.UTC))
    except (TargetUnresolvable, InvalidValue, TimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    data_path = cfg.root / owner[0]
    before = sha256_hex(data_path.read_bytes())
    sidecar = append_to_sidecar(cfg.root, owner[0], record)
    if sha256_hex(data_path.read_bytes()) != before:  # pragma: no cover
        print(f"error: {owner[0]} changed while annotating", file=sys.stderr)
        return EXIT_FAIL
    print(f"annotated {key} in {_rel(sidecar, cfg.root)}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--root", default=".", help="project root (default: current directory)")
    common.add_argument("--out", default=DEFAULT_OUTPUT_DIR,
                        help="output directory, relative to the root unless absolute")

    pipeline = argparse.ArgumentParser(add_help=False)
    pipeline.add_argument("--mode", choices=(STRICT, PERMISSIVE), default=STRICT)
    pipeline.add_argument("--runtime", choices=RUNTIME_MODES, default="auto")
    pipeline.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT,
                          help="per-bundle wall-clock limit in seconds")
    pipeline.add_argument("--engine", default="docker", help="container engine binary")
    pipeline.add_argument("--network", action="store_true", help="allow container networking")
    pipeline.add_argument("--dump-store", action="store_true",
                          help="write the final store as canonical JSON to <out>/store.json")
    pipeline.add_argument("--json", action="store_true", help="also print the report as JSON")
    pipeline.add_argument("--schedule-seed", type=int, default=None, help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="verdad", description="Data-driven engineering documents.")
    parser.add_argument("--version", action="version", version=f"verdad {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common, pipeline], help="validate data, templates and bundles")
    sub.add_parser("build", parents=[common, pipeline], help="check, then render templates")
    sub.add_parser("run", parents=[common, pipeline], help="build, then run analysis bundles")
    sc = sub.add_parser("scaffold", parents=[common], help="generate CI configuration or git hooks")
    sc.add_argument("kind", choices=KINDS)
    sc.add_argument("--force", action="store_true", help="overwrite existing files")
    an = sub.add_parser("annotate", parents=[common], help="attach a review note to a key")
    an.add_argument("target", help="dot-separated key, e.g. propulsion.engine.thrust")
    an.add_argument("--kind", choices=[k.value for k in AnnotationKind], default="comment")
    an.add_argument("--author", required=True)
    an.add_argument("--body", required=True)
    an.add_argument("--timestamp", help="ISO-8601 UTC time (default: now)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    root = Path(args.root)
    if not root.is_dir():
        print(f"error: project root {root} is not a directory", file=sys.stderr)
        return EXIT_USAGE
    cfg = RunConfig(root=root, output_dir=Path(args.out))
    for name in ("mode", "runtime", "timeout", "dump_store", "json", "engine", "network",
                 "schedule_seed"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if args.command == "scaffold":
        return cmd_scaffold(cfg, args.kind, args.force)
    if args.command == "annotate":
        return cmd_annotate(cfg, args.target, args.kind, args.author, args.body, args.timestamp)
    handler = {"check": cmd_check, "build": cmd_build, "run": cmd_run}[args.command]
    try:
        return handler(cfg)
    except VerdadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
