"""Shared fixtures-by-function for the test suite."""
from __future__ import annotations

import math
import sys
import textwrap
from pathlib import Path

from hypothesis import strategies as st

from verdad.datamodel.timescales import Epoch, TimeScale
from verdad.datamodel.values import Map, Markdown, Quantity, Table

HERE = Path(__file__).parent
STUB_ENGINE = str(HERE / "support" / "stub_engine.py")
EXAMPLE = HERE.parent / "example_mission"


def write_tree(root: Path, files: dict[str, str | bytes]) -> Path:
    for rel, content in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(content, bytes):
            path.write_bytes(content)
        else:
            path.write_text(textwrap.dedent(content), "utf-8")
    return root


def bundle_files(name: str, inputs: list[str], outputs: list[str], script: str,
                 templates: dict[str, str] | None = None, dirname: str | None = None) -> dict[str, str]:
    """Files for a bundle whose command runs ``run.py`` with the host Python."""
    d = dirname or f"{name}.analysis"
    lines = [f"name: {name}", "image: python:3.12-slim"]
    lines += ["inputs:"] + [f"  - {i}" for i in inputs] if inputs else ["inputs: []"]
    lines += ["outputs:"] + [f"  - {o}" for o in outputs]
    lines += ["command: [python3, run.py]"]
    files = {f"{d}/manifest.yaml": "\n".join(lines) + "\n", f"{d}/run.py": textwrap.dedent(script)}
    for rel, body in (templates or {}).items():
        files[f"{d}/{rel}"] = body
    return files


def python_cmd() -> str:
    return sys.executable


# -- hypothesis strategies -------------------------------------------------------

segments = st.from_regex(r"[a-z][a-z0-9_]{0,7}", fullmatch=True)
finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
units = st.sampled_from(["m", "km", "s", "N", "kg*m/s^2", "W", "deg", "rad", "lbf", "km/s", "Pa", "1"])
quantities = st.builds(Quantity, finite, units)
epochs = st.builds(Epoch, st.sampled_from([TimeScale.UTC, TimeScale.TDB]),
                   st.floats(-10000, 12000, allow_nan=False))
scalars = st.one_of(
    st.none(), st.booleans(), st.integers(-2**63, 2**63 - 1), finite,
    st.text(max_size=12), st.binary(max_size=8), quantities, epochs,
)


@st.composite
def tables(draw):
    ncols = draw(st.integers(1, 3))
    names = draw(st.lists(segments, min_size=ncols, max_size=ncols, unique=True))
    nrows = draw(st.integers(0, 4))
    kinds = draw(st.lists(st.sampled_from(["int", "float", "text", "qty"]), min_size=ncols, max_size=ncols))
    gen = {"int": st.integers(-1000, 1000), "float": finite, "text": st.text(max_size=5),
           "qty": st.builds(Quantity, finite, st.just("m"))}
    rows = [[draw(st.one_of(st.none(), gen[k])) for k in kinds] for _ in range(nrows)]
    return Table.infer(names, rows)


values = st.recursive(
    st.one_of(scalars, tables(), st.builds(Markdown, st.text(max_size=10))),
    lambda children: st.one_of(
        st.lists(children, max_size=4).map(tuple),
        st.dictionaries(segments, children, max_size=4).map(Map),
    ),
    max_leaves=20,
)


def rel_close(a: float, b: float, tol: float) -> bool:
    if a == b:
        return True
    return abs(a - b) <= tol * max(abs(a), abs(b), math.ulp(1.0))
