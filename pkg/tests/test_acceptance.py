"""Acceptance criteria 1-10.

Each test wraps its assertions in ``criterion(...)`` so the run ends with
one PASS/FAIL line per criterion. Tolerances are pinned below; oracle
values are computed here from first principles (exact rationals, mpmath,
calendar arithmetic), never by calling the code under test.
"""
import datetime as dt
import hashlib
import json
import random
import shutil
import tempfile
import time
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest
import yaml
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from corpus import corpus_store, covered, generate_corpus
from helpers import EXAMPLE, STUB_ENGINE, bundle_files, write_tree
from verdad.cli import main
from verdad.datamodel.timescales import Epoch, TimeScale, convert_epoch, epoch_from_calendar
from verdad.datamodel.values import Map, Quantity
from verdad.ingest.namespace import build_namespace, mount_key
from verdad.store import Store, canonical_values_bytes, commit, get
from verdad.templates import AccessRecorder, extract_dependencies, render_text

# -- pinned tolerances ------------------------------------------------------------------

CROSS_FORMAT_SECONDS = 1.0
UNIT_ROUNDTRIP_REL = 1e-12
LBF_SIGNIFICANT_DIGITS = 15
EPOCH_ROUNDTRIP_US = 1.0
EPOCH_ORACLE_US = 1.0
MODEL_VS_FULL_SERIES_US = 50.0
EXAMPLE_SECONDS = 10.0
RANDOM_TREES = 500
UNIT_PAIRS = 1000
EPOCH_GRID = 200
CORPUS_SIZE = 50
SCHEDULE_RUNS = 5

mpmath.mp.dps = 40


def tree_bytes(root: Path) -> dict[str, bytes]:
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


def sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def store_of(root) -> Store:
    return commit(Store(), build_namespace(root))


@pytest.fixture
def example(tmp_path):
    dst = tmp_path / "example_mission"
    shutil.copytree(EXAMPLE, dst, ignore=shutil.ignore_patterns("_verdad", "report.md"))
    return dst


def cli(root, *args):
    return main([args[0], "--root", str(root), *args[1:]])


# -- 1 -----------------------------------------------------------------------------------

DATASET_YAML = """\
name: Orbiter-1
phase: B
active: true
revision: 7
margin: 0.15
tags: [mars, orbiter, chemical]
propulsion:
  engine:
    thrust: {value: 490, unit: N}
    isp: {value: 312, unit: s}
    mixture_ratio: 1.65
    qualified: false
  tanks:
    oxidizer: {value: 410.5, unit: kg}
    fuel: {value: 248.5, unit: kg}
    pressure: {value: 2.1, unit: MPa}
power:
  array_area: {value: 12.4, unit: m^2}
  battery: {value: 4320, unit: kJ}
  bus_voltage: {value: 28, unit: V}
  modes:
    columns: [mode, load, duty]
    rows:
      - [cruise, 310.5, 1.0]
      - [science, 455.0, 0.25]
      - [safe, 120.0, 0.5]
mission:
  launch: {epoch: "2027-03-14T09:30:00Z", scale: UTC}
  arrival: {epoch: 10132.5, scale: TDB}
  duration: {value: 200, unit: day}
  target: Mars
  orbit:
    periapsis: {value: 400, unit: km}
    apoapsis: {value: 33000, unit: km}
    inclination: {value: 93.1, unit: deg}
    period: {value: 1.0, unit: day}
thermal:
  limits:
    min: {value: 253.15, unit: K}
    max: {value: 318.15, unit: K}
  heaters: 6
  coating: white paint
comms:
  band: X
  carrier: {value: 8.4, unit: GHz}
  antenna_diameter: {value: 1.5, unit: m}
  ground_stations: [Goldstone, Madrid, Canberra]
"""

DATASET_TOML = """\
name = "Orbiter-1"
phase = "B"
active = true
revision = 7
margin = 0.15
tags = ["mars", "orbiter", "chemical"]

[propulsion.engine]
thrust = { value = 490, unit = "N" }
isp = { value = 312, unit = "s" }
mixture_ratio = 1.65
qualified = false

[propulsion.tanks]
oxidizer = { value = 410.5, unit = "kg" }
fuel = { value = 248.5, unit = "kg" }
pressure = { value = 2.1, unit = "MPa" }

[power]
array_area = { value = 12.4, unit = "m^2" }
battery = { value = 4320, unit = "kJ" }
bus_voltage = { value = 28, unit = "V" }

[power.modes]
columns = ["mode", "load", "duty"]
rows = [["cruise", 310.5, 1.0], ["science", 455.0, 0.25], ["safe", 120.0, 0.5]]

[mission]
launch = { epoch = "2027-03-14T09:30:00Z", scale = "UTC" }
arrival = { epoch = 10132.5, scale = "TDB" }
duration = { value = 200, unit = "day" }
target = "Mars"

[mission.orbit]
periapsis = { value = 400, unit = "km" }
apoapsis = { value = 33000, unit = "km" }
inclination = { value = 93.1, unit = "deg" }
period = { value = 1.0, unit = "day" }

[thermal]
heaters = 6
coating = "white paint"

[thermal.limits]
min = { value = 253.15, unit = "K" }
max = { value = 318.15, unit = "K" }

[comms]
band = "X"
carrier = { value = 8.4, unit = "GHz" }
antenna_diameter = { value = 1.5, unit = "m" }
ground_stations = ["Goldstone", "Madrid", "Canberra"]
"""

DATASET_JSON = """\
{
  "name": "Orbiter-1", "phase": "B", "active": true, "revision": 7, "margin": 0.15,
  "tags": ["mars", "orbiter", "chemical"],
  "propulsion": {
    "engine": {"thrust": {"value": 490, "unit": "N"}, "isp": {"value": 312, "unit": "s"},
               "mixture_ratio": 1.65, "qualified": false},
    "tanks": {"oxidizer": {"value": 410.5, "unit": "kg"}, "fuel": {"value": 248.5, "unit": "kg"},
              "pressure": {"value": 2.1, "unit": "MPa"}}
  },
  "power": {
    "array_area": {"value": 12.4, "unit": "m^2"}, "battery": {"value": 4320, "unit": "kJ"},
    "bus_voltage": {"value": 28, "unit": "V"},
    "modes": {"columns": ["mode", "load", "duty"],
              "rows": [["cruise", 310.5, 1.0], ["science", 455.0, 0.25], ["safe", 120.0, 0.5]]}
  },
  "mission": {
    "launch": {"epoch": "2027-03-14T09:30:00Z", "scale": "UTC"},
    "arrival": {"epoch": 10132.5, "scale": "TDB"},
    "duration": {"value": 200, "unit": "day"}, "target": "Mars",
    "orbit": {"periapsis": {"value": 400, "unit": "km"}, "apoapsis": {"value": 33000, "unit": "km"},
              "inclination": {"value": 93.1, "unit": "deg"}, "period": {"value": 1.0, "unit": "day"}}
  },
  "thermal": {"limits": {"min": {"value": 253.15, "unit": "K"}, "max": {"value": 318.15, "unit": "K"}},
              "heaters": 6, "coating": "white paint"},
  "comms": {"band": "X", "carrier": {"value": 8.4, "unit": "GHz"},
            "antenna_diameter": {"value": 1.5, "unit": "m"},
            "ground_stations": ["Goldstone", "Madrid", "Canberra"]}
}
"""


def leaf_paths(value, prefix=()):
    if isinstance(value, Map):
        for k, v in value.items():
            yield from leaf_paths(v, (*prefix, k))
    else:
        yield prefix


def test_criterion_1_cross_format_equivalence(tmp_path, criterion):
    with criterion("1", "cross-format equivalence (JSON/YAML/TOML, exact bytes)"):
        start = time.perf_counter()
        stores = {}
        for ext, text in (("json", DATASET_JSON), ("yaml", DATASET_YAML), ("toml", DATASET_TOML)):
            root = write_tree(tmp_path / ext, {f"vehicle.{ext}": text})
            stores[ext] = store_of(root)
        elapsed = time.perf_counter() - start
        value = get(stores["yaml"], "vehicle")
        assert len(list(leaf_paths(value))) >= 30
        assert isinstance(get(stores["yaml"], "vehicle.propulsion.engine.thrust"), Quantity)
        assert isinstance(get(stores["yaml"], "vehicle.mission.launch"), Epoch)
        assert get(stores["yaml"], "vehicle.power.modes.duty") == (1.0, 0.25, 0.5)
        encoded = {ext: canonical_values_bytes(s) for ext, s in stores.items()}
        assert encoded["json"] == encoded["yaml"] == encoded["toml"]
        assert elapsed < CROSS_FORMAT_SECONDS


# -- 2 -----------------------------------------------------------------------------------


EXT_CONTENT = {
    "json": '{"z": 1}', "yaml": "z: 1\n", "toml": "z = 1\n", "csv": "z\n1\n",
    "md": "---\nz: 1\n---\nbody\n", "ron": "(z: 1)",
}
seg = st.from_regex(r"[a-m][a-z0-9_]{0,5}", fullmatch=True)


@st.composite
def random_trees(draw):
    """{relative path: content} with stems unique per directory."""
    files = {}
    dirs = [()]
    for _ in range(draw(st.integers(0, 4))):
        parent = draw(st.sampled_from(dirs))
        dirs.append((*parent, draw(seg)))
    used: set[tuple] = set()
    for _ in range(draw(st.integers(1, 8))):
        d = draw(st.sampled_from(dirs))
        stem = draw(seg)
        if (*d, stem) in used or (*d, stem) in dirs:
            continue
        used.add((*d, stem))
        ext = draw(st.sampled_from(sorted(EXT_CONTENT)))
        files["/".join((*d, f"{stem}.{ext}"))] = EXT_CONTENT[ext]
    return files


def test_criterion_2_namespace_mapping(tmp_path, criterion):
    with criterion("2", f"namespace mapping (example + {RANDOM_TREES} random trees)"):
        write_tree(tmp_path, {"propulsion/engine.yaml": "thrust: {value: 440, unit: N}\n"})
        assert get(store_of(tmp_path), "propulsion.engine.thrust") == Quantity(440, "N")

        @settings(max_examples=RANDOM_TREES, deadline=None, database=None,
                  suppress_health_check=list(HealthCheck))
        @given(random_trees())
        def bijection(files):
            with tempfile.TemporaryDirectory() as d:
                root = write_tree(Path(d), files)
                entries = build_namespace(root)
                to_path = {str(k): prov.source_path for k, _, prov in entries}
                assert len(to_path) == len(entries) == len(files)
                assert sorted(to_path.values()) == sorted(files)
                for key, path in to_path.items():
                    assert str(mount_key(path)) == key
                    assert key.split(".") == [*path.split("/")[:-1], path.rsplit("/", 1)[-1].split(".")[0]]
                store = commit(Store(), entries)
                for key in to_path:
                    get(store, key)

        bijection()


# -- 3 -----------------------------------------------------------------------------------


COMPATIBLE = [
    ["m", "km", "ft", "in", "mi", "AU", "nmi"], ["s", "min", "h", "hr", "day", "ms"], ["kg", "g", "lb", "lbm", "t"],
    ["N", "kN", "lbf", "kg*m/s^2"], ["Pa", "kPa", "MPa", "bar", "psi"], ["J", "kJ", "eV", "W*s"],
    ["deg", "rad", "arcsec", "arcmin"], ["m/s", "km/s", "ft/s", "km/h"], ["W", "kW", "J/s"],
]


def test_criterion_3_unit_conversion(criterion):
    with criterion("3", f"unit conversion ({UNIT_PAIRS} round trips, lbf oracle)"):
        rng = random.Random(3)
        worst = 0.0
        for _ in range(UNIT_PAIRS):
            group = rng.choice(COMPATIBLE)
            a, b = rng.sample(group, 2)
            mag = rng.choice([-1, 1]) * 10 ** rng.uniform(-6, 9)
            back = Quantity(mag, a).to(b).to(a).magnitude
            worst = max(worst, abs(back - mag) / abs(mag))
        assert worst < UNIT_ROUNDTRIP_REL, worst

        oracle = Fraction("0.45359237") * Fraction("9.80665")  # avoirdupois pound x standard gravity
        assert oracle == Fraction("4.4482216152605")
        got = Quantity(1, "lbf").to("N").magnitude
        assert f"{got:.{LBF_SIGNIFICANT_DIGITS}g}" == f"{float(oracle):.{LBF_SIGNIFICANT_DIGITS}g}"


# -- 4 -----------------------------------------------------------------------------------


def oracle_utc_to_tdb_seconds(utc: dt.datetime, tai_minus_utc: int) -> mpmath.mpf:
    """Seconds past J2000 (TDB) for a UTC instant, evaluated with the specified model."""
    j2000 = dt.datetime(2000, 1, 1, 12)
    tt = mpmath.mpf((utc - j2000).days) * 86400 + (utc - j2000).seconds \
        + mpmath.mpf((utc - j2000).microseconds) / 10**6 + tai_minus_utc + mpmath.mpf("32.184")
    d = tt / 86400
    return tt + mpmath.mpf("0.001657") * mpmath.sin(mpmath.mpf("6.240060") + mpmath.mpf("0.017202") * d)


def test_criterion_4_epoch_conversion(criterion):
    with criterion("4", f"epoch conversion ({EPOCH_GRID}-point round trip, model oracle)"):
        lo = epoch_from_calendar(1972, 1, 1).days
        hi = epoch_from_calendar(2035, 12, 31).days
        worst = 0.0
        for i in range(EPOCH_GRID):
            e = Epoch(TimeScale.UTC, lo + (hi - lo) * (i + 0.5) / EPOCH_GRID)
            back = convert_epoch(convert_epoch(e, "TDB"), "UTC")
            worst = max(worst, abs(back.days - e.days) * 86400e6)
        assert worst < EPOCH_ROUNDTRIP_US, worst

        # TAI-UTC was 32 s from 1999-01-01 until 2006-01-01
        expected = oracle_utc_to_tdb_seconds(dt.datetime(2000, 1, 1, 12), 32)
        got = convert_epoch(Epoch(TimeScale.UTC, 0.0), "TDB").days * 86400
        assert abs(got - float(expected)) * 1e6 < EPOCH_ORACLE_US


def _astropy_tdb_seconds():
    astropy_time = pytest.importorskip("astropy.time")
    from astropy.utils import iers
    iers.conf.auto_download = False
    t = astropy_time.Time("2000-01-01T12:00:00", scale="utc")
    j2000 = astropy_time.Time("2000-01-01T12:00:00", scale="tdb")
    return (t.tdb - j2000).sec


def test_criterion_4_model_within_documented_bound(criterion):
    with criterion("4a", f"single-term TDB model within {MODEL_VS_FULL_SERIES_US:g} us of astropy"):
        got = convert_epoch(Epoch(TimeScale.UTC, 0.0), "TDB").days * 86400
        assert abs(got - _astropy_tdb_seconds()) * 1e6 < MODEL_VS_FULL_SERIES_US


@pytest.mark.xfail(strict=True, reason="the specified single-term TDB model differs from astropy's "
                                       "full series by about 28 us; see README")
def test_criterion_4_against_astropy_at_one_microsecond(criterion):
    with criterion("4b", f"UTC 0.0 -> TDB vs astropy full series at {EPOCH_ORACLE_US:g} us",
                   expect_fail="single-term model, ~28 us from the full series"):
        got = convert_epoch(Epoch(TimeScale.UTC, 0.0), "TDB").days * 86400
        assert abs(got - _astropy_tdb_seconds()) * 1e6 < EPOCH_ORACLE_US


# -- 5 -----------------------------------------------------------------------------------


def test_criterion_5_immutability(example, criterion):
    with criterion("5", "input files unchanged; two runs byte-identical"):
        inputs = {p: sha(b) for p, b in tree_bytes(example).items()}
        assert cli(example, "run", "--engine", STUB_ENGINE, "--dump-store") == 0
        first = tree_bytes(example)
        assert cli(example, "run", "--engine", STUB_ENGINE, "--dump-store") == 0
        second = tree_bytes(example)
        assert {p: sha(second[p]) for p in inputs} == inputs
        assert first == second
        assert "report.md" in first and "_verdad/store.json" in first


# -- 6 -----------------------------------------------------------------------------------


def expected_report() -> str:
    """report.md for the example project, with every number derived here."""
    lbf = Fraction("4.4482216152605")
    thrust_lbf = round(490 / lbf, 1)
    bar = Fraction("0.79") * 10**6 / 10**5
    m0, mf = Fraction("812.0") + Fraction("410.0") + Fraction("248.5"), Fraction("812.0")
    dv = mpmath.mpf(312) * mpmath.mpf("9.80665") * mpmath.log(mpmath.mpf(m0.numerator) / m0.denominator / (mpmath.mpf(mf.numerator) / mf.denominator))
    dv_kms = round(float(dv) / 1000, 4)
    ratio = round(float(m0 / mf), 6)
    # TAI-UTC has been 37 s since 2017-01-01
    launch = dt.datetime(2027, 3, 14, 9, 30)
    tdb = oracle_utc_to_tdb_seconds(launch, 37)
    j2000 = dt.datetime(2000, 1, 1, 12)
    whole = int(mpmath.floor(tdb))
    micros = int(mpmath.nint((tdb - whole) * 10**6))
    tdb_text = (j2000 + dt.timedelta(seconds=whole, microseconds=micros)).isoformat()
    return "\n".join([
        "# Example orbiter (rev 3)",
        "",
        "Small Mars orbiter used to exercise the toolchain.",
        "",
        "## Propulsion",
        "",
        "| Parameter | Value |",
        "|---|---|",
        "| Engine | R-4D-11 |",
        f"| Thrust | 490 N ({float(thrust_lbf)!r} lbf) |",
        "| Specific impulse | 312 s |",
        f"| Chamber pressure | {float(bar):g} bar |",
        "| Oxidizer | MON-3, 410 kg |",
        "| Fuel | MMH, 248.5 kg |",
        "",
        "## Power",
        "",
        "| subsystem | load [W] | duty |",
        "|---|---|---|",
        "| avionics | 42.5 | 1 |",
        "| comms | 38 | 0.35 |",
        "| heaters | 55 | 0.6 |",
        "| payload | 120 | 0.25 |",
        "",
        f"Peak load: {42.5 + 38 + 55 + 120:g} W",
        "",
        "## Timeline",
        "",
        f"- Launch: 2027-03-14T09:30:00 UTC ({tdb_text} TDB)",
        "- Orbit insertion: 2027-09-30T18:00:00 UTC",
        "",
        "## Trajectory analysis",
        "",
        f"- Ideal velocity budget: {dv_kms!r} km/s ({round(dv_kms * 1000):d} m/s)",
        f"- Mass ratio: {ratio!r}",
        "",
    ])


def test_criterion_6_template_contract(example, tmp_path, criterion):
    with criterion("6", f"template contract (example report, strict skip, {CORPUS_SIZE}-template soundness)"):
        assert cli(example, "run", "--engine", STUB_ENGINE) == 0
        assert (example / "report.md").read_text("utf-8") == expected_report()

        strict = write_tree(tmp_path / "strict", {
            "a.yaml": "x: 1\n", "ok.md.j2": "{{ a.x }}", "gap.md.j2": "{{ a.y }} {{ b.z }}"})
        assert cli(strict, "build") == 1
        data = yaml.safe_load((strict / "_verdad/report.yaml").read_text())
        status = {t["template"]: (t["status"], t["missing"]) for t in data["templates"]}
        assert status == {"gap.md.j2": ("skipped", ["a.y", "b.z"]), "ok.md.j2": ("rendered", [])}
        assert not (strict / "gap.md").exists() and (strict / "ok.md").read_text() == "1\n"
        assert any(e["source"] == "gap.md.j2" for e in data["errors"])

        store = corpus_store()
        corpus = generate_corpus(CORPUS_SIZE, seed=6)
        accessed_total = 0
        for body in corpus:
            deps = extract_dependencies(body)
            rec = AccessRecorder()
            render_text(body, store, "permissive", recorder=rec)
            accessed_total += len(rec.paths)
            unexplained = [str(p) for p in rec.paths if not covered(p, deps)]
            assert not unexplained, (body, unexplained)
        assert accessed_total > CORPUS_SIZE


# -- 7 -----------------------------------------------------------------------------------


def test_criterion_7_degradation(example, criterion):
    with criterion("7", "runtime disabled: exit 0, RenderedOnly, staged inputs rendered"):
        assert cli(example, "run", "--runtime", "disabled") == 0
        data = yaml.safe_load((example / "_verdad/report.yaml").read_text())
        assert [b["status"] for b in data["bundles"]] == ["RenderedOnly"]
        staged = example / "_verdad/bundles/trajectory"
        params = json.loads((staged / "params.json").read_text())
        assert params == {"isp_s": 312, "dry_mass_kg": 812, "propellant_kg": 410 + 248.5}
        assert (staged / "solve.py").read_bytes() == (example / "trajectory.analysis/solve.py").read_bytes()
        assert not (staged / "dv.json").exists()


# -- 8 -----------------------------------------------------------------------------------


def test_criterion_8_precedence(tmp_path, criterion):
    with criterion("8", "user value kept, exactly one PrecedenceOverride"):
        write_tree(tmp_path, {
            "analysis/calc/r.yaml": "dv: 1.5\n",
            **bundle_files("calc", [], ["r.json"], """\
                import json
                json.dump({"dv": 9.9, "other": 2}, open("r.json", "w"))
            """),
            "out.md.j2": "{{ analysis.calc.r.dv }}",
        })
        assert cli(tmp_path, "run", "--engine", STUB_ENGINE, "--dump-store") == 0
        data = yaml.safe_load((tmp_path / "_verdad/report.yaml").read_text())
        assert len(data["precedence_overrides"]) == 1
        assert data["precedence_overrides"][0]["key"] == "analysis.calc.r"
        assert len([w for w in data["warnings"] if "precedence" in w["message"]]) == 1
        assert (tmp_path / "out.md").read_text() == "1.5\n"
        store = json.loads((tmp_path / "_verdad/store.json").read_text())
        assert store["entries"]["analysis.calc.r"]["value"]["v"]["dv"] == {"t": "float", "v": 1.5}


# -- 9 -----------------------------------------------------------------------------------


def test_criterion_9_end_to_end(example, criterion):
    with criterion("9", f"example project check/build/run exit 0 in <{EXAMPLE_SECONDS:g} s"):
        start = time.perf_counter()
        for cmd in ("check", "build", "run"):
            assert cli(example, cmd, "--engine", STUB_ENGINE) == 0, cmd
        elapsed = time.perf_counter() - start
        data = yaml.safe_load((example / "_verdad/report.yaml").read_text())
        assert data["ok"] and [b["status"] for b in data["bundles"]] == ["Executed"]
        dv = json.loads((example / "_verdad/bundles/trajectory/dv.json").read_text())
        report = (example / "report.md").read_text()
        assert f"Ideal velocity budget: {dv['total']['value']!r} km/s" in report
        assert f"Mass ratio: {dv['mass_ratio']!r}" in report
        assert elapsed < EXAMPLE_SECONDS, elapsed

        # no engine on the machine at all: still exit 0, bundle staged only
        start = time.perf_counter()
        assert cli(example, "run", "--engine", str(example / "no-such-engine"), "--dump-store") == 0
        assert time.perf_counter() - start < EXAMPLE_SECONDS
        data = yaml.safe_load((example / "_verdad/report.yaml").read_text())
        assert [b["status"] for b in data["bundles"]] == ["RenderedOnly"]


# -- 10 ----------------------------------------------------------------------------------


JITTER = """\
    import json, random, time
    time.sleep(random.random() * 0.2)
    json.dump({{"v": {value}, "label": "{name}"}}, open("o.json", "w"))
"""


def test_criterion_10_schedule_determinism(tmp_path, criterion):
    with criterion("10", f"store bytes identical over {SCHEDULE_RUNS} shuffled schedules"):
        files = {"base.yaml": "k: 1\n"}
        for i, name in enumerate(["alpha", "bravo", "charlie", "delta"]):
            files.update(bundle_files(name, ["base.k"], ["o.json"], JITTER.format(value=i, name=name)))
        dumps = []
        for seed in range(SCHEDULE_RUNS):
            root = write_tree(tmp_path / f"run{seed}", files)
            assert cli(root, "run", "--engine", STUB_ENGINE, "--dump-store", "--schedule-seed", str(seed)) == 0
            dumps.append((root / "_verdad/store.json").read_bytes())
        assert len(set(dumps)) == 1
        entries = json.loads(dumps[0])["entries"]
        assert {k for k in entries if k.startswith("analysis.")} == {
            f"analysis.{n}.o" for n in ("alpha", "bravo", "charlie", "delta")}
