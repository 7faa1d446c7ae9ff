"""Containerized analysis bundles.

A bundle is a directory ending in ``.analysis`` holding a ``manifest.yaml``,
input templates and static files. Running a bundle means rendering its
templates into a staging directory, running the declared image with that
directory mounted at ``/work``, and mounting the declared output files back
into the store under ``analysis.<name>``.

Any engine that speaks the usual container CLI (``<engine> run --rm -v
src:/work -w /work <image> <cmd...>``) will do; the binary is configurable.
Without an engine every bundle is staged but not executed.
"""

from __future__ import annotations

import os
import random
import re
import shutil
import subprocess
from collections.abc import Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path, PurePosixPath

import yaml

from verdad.datamodel.values import KeyPath, Origin, ProvenanceRecord
from verdad.errors import (
    AnalysisError, DependencyCycle, DuplicateBundleName, InvalidValue, ManifestInvalid,
    ManifestMissing, MissingInput, ParseError, RenderError, RuntimeProbeFailed,
    TemplateSyntaxError, VerdadError,
)
from verdad.ingest.formats import detect_format, parse_file
from verdad.ingest.namespace import ProjectScan, scan_project, sha256_hex
from verdad.layout import (
    ANALYSIS_PREFIX, DEFAULT_OUTPUT_DIR, MANIFEST_NAME, is_template,
)
from verdad.store import Store, merge_analysis_outputs
from verdad.templates import (
    PERMISSIVE, STRICT, RenderReport, TemplateUnit, load_unit, render, render_all,
    write_output,
)

NAME_PATTERN = re.compile(r"[a-z0-9_-]+")
DEFAULT_TIMEOUT = 900.0
MANIFEST_FIELDS = ("name", "image", "inputs", "outputs", "command")


class RunStatus(str, Enum):
    RENDERED_ONLY = "RenderedOnly"
    EXECUTED = "Executed"
    OUTPUT_MISSING = "OutputMissing"
    EXEC_FAILED = "ExecFailed"


@dataclass(frozen=True)
class AnalysisManifest:
    name: str
    image: str
    inputs: tuple[KeyPath, ...]
    outputs: tuple[str, ...]
    command: tuple[str, ...] | None = None

    @classmethod
    def from_mapping(cls, data, bundle_path: str | None = None) -> AnalysisManifest:
        def bad(fld, reason):
            return ManifestInvalid(fld, reason, bundle_path)

        if not isinstance(data, Mapping):
            raise bad("manifest", "must be a mapping")
        unknown = sorted(set(map(str, data)) - set(MANIFEST_FIELDS))
        if unknown:
            raise bad(unknown[0], "unknown field")
        name = data.get("name")
        if not isinstance(name, str) or not NAME_PATTERN.fullmatch(name):
            raise bad("name", "must match [a-z0-9_-]+")
        image = data.get("image")
        if not isinstance(image, str) or not image.strip():
            raise bad("image", "must be a non-empty string")
        raw_inputs = data.get("inputs") or []
        if not isinstance(raw_inputs, list):
            raise bad("inputs", "must be a list of dot-paths")
        inputs = []
        for item in raw_inputs:
            try:
                inputs.append(KeyPath.parse(str(item)))
            except InvalidValue as exc:
                raise bad("inputs", str(exc)) from None
        raw_outputs = data.get("outputs")
        if not isinstance(raw_outputs, list) or not raw_outputs:
            raise bad("outputs", "must be a non-empty list of relative paths")
        outputs = []
        for item in raw_outputs:
            p = PurePosixPath(str(item))
            if p.is_absolute() or ".." in p.parts or not p.parts:
                raise bad("outputs", f"{item!r} is not a relative path inside the bundle")
            try:
                output_key(p.as_posix())
            except InvalidValue:
                raise bad("outputs", f"{item!r} does not map to a valid key") from None
            outputs.append(p.as_posix())
        if len(set(outputs)) != len(outputs):
            raise bad("outputs", "duplicate entries")
        command = data.get("command")
        if command is not None:
            if not isinstance(command, list) or not command or not all(isinstance(c, str) for c in command):
                raise bad("command", "must be a non-empty list of strings")
            command = tuple(command)
        return cls(name, image, tuple(inputs), tuple(outputs), command)


def output_key(rel_path: str) -> KeyPath:
    """Key of an output file relative to ``analysis.<bundle>``: dirs + stem."""
    p = PurePosixPath(rel_path)
    stem = p.name[: -len(p.suffix)] if p.suffix else p.name
    return KeyPath((*p.parent.parts, stem))


@dataclass(frozen=True)
class Bundle:
    path: str  # project-relative bundle directory
    manifest: AnalysisManifest
    root: Path

    def __iter__(self):
        return iter((self.path, self.manifest))

    @property
    def name(self) -> str:
        return self.manifest.name

    @property
    def directory(self) -> Path:
        return self.root / self.path

    def files(self) -> list[str]:
        """Bundle-relative files, sorted, manifest and dotfiles excluded."""
        out = []
        for dirpath, dirnames, filenames in os.walk(self.directory):
            dirnames[:] = sorted(d for d in dirnames if not d.startswith("."))
            rel_dir = PurePosixPath(Path(dirpath).relative_to(self.directory).as_posix())
            for name in sorted(filenames):
                rel = (rel_dir / name).as_posix()
                if name.startswith(".") or rel == MANIFEST_NAME:
                    continue
                out.append(rel)
        return sorted(out)

    def templates(self) -> list[TemplateUnit]:
        search = (str(self.directory), str(self.root))
        return [load_unit(self.directory, rel, search) for rel in self.files() if is_template(rel)]

    def upstream(self) -> set[str]:
        """Bundle names whose outputs this bundle reads."""
        out = set()
        for key in self.manifest.inputs:
            if key.segments[0] == ANALYSIS_PREFIX and len(key.segments) > 1:
                out.add(key.segments[1])
        return out


def load_manifest(bundle_dir: Path, rel: str) -> AnalysisManifest:
    path = bundle_dir / MANIFEST_NAME
    if not path.is_file():
        raise ManifestMissing(rel)
    try:
        data = yaml.safe_load(path.read_text("utf-8"))
    except yaml.YAMLError as exc:
        raise ManifestInvalid("manifest", f"not valid YAML: {exc}", rel) from None
    return AnalysisManifest.from_mapping(data, rel)


def discover_bundles(root: str | os.PathLike, output_dir=DEFAULT_OUTPUT_DIR,
                     scan: ProjectScan | None = None,
                     errors: list[Exception] | None = None) -> list[Bundle]:
    """Every ``*.analysis`` directory with a valid manifest, sorted by path.

    With ``errors`` given, bad bundles are reported there and skipped.
    """
    root = Path(root)
    if scan is None:
        scan = scan_project(root, output_dir)
    bundles = []
    names: dict[str, str] = {}
    for rel in sorted(scan.bundles):
        try:
            manifest = load_manifest(root / rel, rel)
            if manifest.name in names:
                raise DuplicateBundleName(manifest.name, (names[manifest.name], rel))
        except AnalysisError as exc:
            if errors is None:
                raise
            errors.append(exc)
            continue
        names[manifest.name] = rel
        bundles.append(Bundle(rel, manifest, root))
    return bundles


def validate_bundle(bundle: Bundle) -> list[TemplateUnit]:
    """Check the bundle templates parse and only read declared inputs."""
    units = bundle.templates()
    inputs = bundle.manifest.inputs
    for unit in units:
        if unit.error is not None:
            raise unit.error
        for dep in sorted(unit.dependencies):
            if not any(dep.startswith(i) for i in inputs):
                raise ManifestInvalid(
                    "inputs", f"{dep} is read by {unit.source_path} but not declared", bundle.path)
    return units


def order_bundles(bundles: Iterable[Bundle]) -> list[list[Bundle]]:
    """Topological generations: bundles reading ``analysis.X.*`` come after X."""
    by_name = {b.name: b for b in bundles}
    deps = {n: {u for u in b.upstream() if u in by_name and u != n} for n, b in by_name.items()}
    for n, b in by_name.items():
        if n in b.upstream():
            raise DependencyCycle([n])
    levels: list[list[Bundle]] = []
    done: set[str] = set()
    while len(done) < len(by_name):
        ready = sorted(n for n in by_name if n not in done and deps[n] <= done)
        if not ready:
            raise DependencyCycle(sorted(n for n in by_name if n not in done))
        levels.append([by_name[n] for n in ready])
        done.update(ready)
    return levels


# -- staging -------------------------------------------------------------------------


def stage_bundle(bundle: Bundle, store: Store, staging_root: str | os.PathLike,
                 mode: str = STRICT) -> Path:
    """Render templates and copy static files into ``staging_root/<name>``.

    Declared inputs must resolve in strict mode; in permissive mode
    unresolved keys render as ``MISSING(<key>)``.
    """
    missing = [str(k) for k in bundle.manifest.inputs if k not in store]
    if missing and mode == STRICT:
        raise MissingInput(bundle.name, missing)
    staged = Path(staging_root) / bundle.name
    if staged.exists():
        shutil.rmtree(staged)
    staged.mkdir(parents=True)
    units = {u.source_path: u for u in bundle.templates()}
    for rel in bundle.files():
        if rel in units:
            unit = units[rel]
            write_output(staged / unit.output_path, render(unit, store, mode))
        else:
            target = staged / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(bundle.directory / rel, target)
    return staged


# -- execution -----------------------------------------------------------------------


@dataclass(frozen=True)
class ContainerRuntime:
    engine: str = "docker"
    network: bool = False
    timeout: float = DEFAULT_TIMEOUT

    def available(self) -> bool:
        exe = shutil.which(self.engine)
        if exe is None:
            return False
        try:
            proc = subprocess.run([exe, "version"], capture_output=True, timeout=30)
        except (OSError, subprocess.TimeoutExpired):
            return False
        return proc.returncode == 0

    def command(self, staged: Path, manifest: AnalysisManifest) -> list[str]:
        argv = [self.engine, "run", "--rm"]
        if not self.network:
            argv += ["--network", "none"]
        argv += ["-v", f"{staged.resolve()}:/work", "-w", "/work", manifest.image]
        if manifest.command:
            argv += list(manifest.command)
        return argv


RUNTIME_MODES = ("auto", "required", "disabled")


def resolve_runtime(mode: str = "auto", engine: str = "docker", *, network: bool = False,
                    timeout: float = DEFAULT_TIMEOUT) -> ContainerRuntime | None:
    """A usable runtime, or None. ``required`` turns absence into an error."""
    if mode not in RUNTIME_MODES:
        raise ValueError(f"runtime mode must be one of {RUNTIME_MODES}")
    if mode == "disabled":
        return None
    runtime = ContainerRuntime(engine, network, timeout)
    if runtime.available():
        return runtime
    if mode == "required":
        raise RuntimeProbeFailed(f"container engine {engine!r} is not available")
    return None


@dataclass
class BundleRun:
    bundle: str
    staging: Path | None
    status: RunStatus
    produced: list[tuple[str, str]] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)
    log: str = ""
    error: str | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.status in (RunStatus.OUTPUT_MISSING, RunStatus.EXEC_FAILED)


def _hash_outputs(staged: Path, manifest: AnalysisManifest) -> tuple[list, list]:
    produced, missing = [], []
    for rel in manifest.outputs:
        path = staged / rel
        if path.is_file():
            produced.append((rel, sha256_hex(path.read_bytes())))
        else:
            missing.append(rel)
    return produced, missing


def execute_bundle(staged: Path, manifest: AnalysisManifest,
                   runtime: ContainerRuntime | None) -> BundleRun:
    """Run the image on the staged directory and check declared outputs."""
    if runtime is None:
        return BundleRun(manifest.name, staged, RunStatus.RENDERED_ONLY,
                         notes=["no container runtime; staged but not executed"])
    argv = runtime.command(staged, manifest)
    try:
        proc = subprocess.run(argv, capture_output=True, timeout=runtime.timeout)
    except subprocess.TimeoutExpired as exc:
        log = _decode(exc.stdout) + _decode(exc.stderr)
        return BundleRun(manifest.name, staged, RunStatus.EXEC_FAILED, log=log,
                         error=f"timed out after {runtime.timeout:g} s")
    except OSError as exc:
        return BundleRun(manifest.name, staged, RunStatus.EXEC_FAILED, error=str(exc))
    log = _decode(proc.stdout) + _decode(proc.stderr)
    if proc.returncode != 0:
        return BundleRun(manifest.name, staged, RunStatus.EXEC_FAILED, log=log,
                         error=f"exit status {proc.returncode}")
    produced, missing = _hash_outputs(staged, manifest)
    if missing:
        return BundleRun(manifest.name, staged, RunStatus.OUTPUT_MISSING, produced, missing, log,
                         error="missing outputs: " + ", ".join(missing))
    return BundleRun(manifest.name, staged, RunStatus.EXECUTED, produced, [], log)


def _decode(data) -> str:
    if data is None:
        return ""
    if isinstance(data, bytes):
        return data.decode("utf-8", "replace")
    return data


def parse_outputs(run: BundleRun, manifest: AnalysisManifest, project_root: Path | None = None):
    """(relative key, value, provenance) for each produced output with a known format."""
    if run.status is not RunStatus.EXECUTED:
        raise AnalysisError(f"bundle {run.bundle} has status {run.status.value}; nothing to ingest")
    origin = Origin(manifest.name)
    out = []
    for rel in manifest.outputs:
        fmt = detect_format(rel)
        if fmt is None:
            continue
        path = run.staging / rel
        data = path.read_bytes()
        shown = path
        if project_root is not None:
            try:
                shown = path.resolve().relative_to(Path(project_root).resolve())
            except ValueError:
                pass
        source = PurePosixPath(Path(shown).as_posix()).as_posix()
        value = parse_file(data, fmt, source)
        out.append((output_key(rel), value, ProvenanceRecord(source, fmt, sha256_hex(data), origin, 0)))
    return out


def ingest_outputs(run: BundleRun, store: Store, manifest: AnalysisManifest,
                   project_root: Path | None = None) -> Store:
    """Mount a finished run's outputs at ``analysis.<name>.<stem>``."""
    return merge_parsed(store, manifest.name, parse_outputs(run, manifest, project_root))


def merge_parsed(store: Store, bundle: str, parsed) -> Store:
    seq = max((e.provenance.load_sequence for e in store.entries.values()), default=0)
    items = []
    for i, (key, value, prov) in enumerate(parsed, 1):
        items.append((key, value, ProvenanceRecord(prov.source_path, prov.format, prov.content_hash,
                                                   prov.origin, seq + i)))
    return merge_analysis_outputs(store, bundle, items)


# -- pipeline ------------------------------------------------------------------------


@dataclass
class PipelineResult:
    store: Store
    runs: list[BundleRun]
    render: RenderReport | None
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors and not any(r.failed for r in self.runs) and \
            (self.render is None or self.render.ok)


def producers(bundles: Iterable[Bundle]) -> dict[str, tuple[str, ...]]:
    return {b.name: b.manifest.outputs for b in bundles}


def _pending_on(key: KeyPath, pending: set[str]) -> str | None:
    segs = key.segments
    if segs[0] == ANALYSIS_PREFIX and len(segs) > 1 and segs[1] in pending:
        return segs[1]
    return None


def _run_one(bundle: Bundle, store: Store, staging_root: Path, runtime, pending: set[str]) -> BundleRun:
    """Stage and execute one bundle.

    Inputs that an upstream bundle has not produced yet (it was not
    executed) stage as placeholders and the bundle stays RenderedOnly.
    """
    missing = [k for k in bundle.manifest.inputs if k not in store]
    waiting = {_pending_on(k, pending) for k in missing}
    if None in waiting:
        absent = [str(k) for k in missing if _pending_on(k, pending) is None]
        return BundleRun(bundle.name, None, RunStatus.EXEC_FAILED,
                         error="missing inputs: " + ", ".join(absent))
    try:
        staged = stage_bundle(bundle, store, staging_root, PERMISSIVE if missing else STRICT)
    except (RenderError, TemplateSyntaxError, MissingInput, OSError) as exc:
        return BundleRun(bundle.name, None, RunStatus.EXEC_FAILED, error=f"staging failed: {exc}")
    if missing:
        return BundleRun(bundle.name, staged, RunStatus.RENDERED_ONLY,
                         notes=["inputs pending on bundle " + ", ".join(sorted(waiting))])
    return execute_bundle(staged, bundle.manifest, runtime)


def run_pipeline(root: str | os.PathLike, store: Store, runtime: ContainerRuntime | None, *,
                 output_dir: str | os.PathLike = DEFAULT_OUTPUT_DIR, mode: str = STRICT,
                 bundles: list[Bundle] | None = None, schedule_seed: int | None = None,
                 max_workers: int | None = None, final_render: bool = True) -> PipelineResult:
    """Stage, execute and ingest every bundle in dependency order.

    Bundles in one dependency generation run concurrently. Their outputs
    are merged afterwards in name order, so the final store does not depend
    on the schedule. ``schedule_seed`` shuffles submission order.
    """
    root = Path(root)
    out_dir = Path(output_dir)
    if not out_dir.is_absolute():
        out_dir = root / out_dir
    staging_root = out_dir / "bundles"
    if bundles is None:
        bundles = discover_bundles(root, output_dir)
    levels = order_bundles(bundles)
    rng = random.Random(schedule_seed) if schedule_seed is not None else None
    runs: dict[str, BundleRun] = {}
    errors: list[str] = []
    pending = {b.name for b in bundles}
    for level in levels:
        order = list(level)
        if rng is not None:
            rng.shuffle(order)
        workers = max_workers or max(1, min(len(order), os.cpu_count() or 1))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {b.name: pool.submit(_run_one, b, store, staging_root, runtime, set(pending))
                       for b in order}
            level_runs = {n: f.result() for n, f in futures.items()}
        for bundle in sorted(level, key=lambda b: b.name):
            run = level_runs[bundle.name]
            runs[bundle.name] = run
            if run.status is RunStatus.EXECUTED:
                try:
                    store = ingest_outputs(run, store, bundle.manifest, root)
                    pending.discard(bundle.name)
                except (ParseError, VerdadError) as exc:
                    run.status = RunStatus.EXEC_FAILED
                    run.error = f"output parse failed: {exc}"
            if run.failed:
                errors.append(f"bundle {bundle.name}: {run.error}")
    report = None
    if final_render:
        report = render_all(root, store, mode, producers=producers(bundles))
    ordered = [runs[b.name] for level in levels for b in sorted(level, key=lambda b: b.name)]
    return PipelineResult(store, ordered, report, errors)


__all__ = [
    "AnalysisManifest", "Bundle", "BundleRun", "ContainerRuntime", "PipelineResult", "RunStatus",
    "discover_bundles", "execute_bundle", "ingest_outputs", "order_bundles", "output_key",
    "parse_outputs", "resolve_runtime", "run_pipeline", "stage_bundle", "validate_bundle",
]
