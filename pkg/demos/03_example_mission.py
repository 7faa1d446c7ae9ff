"""The example mission end to end, on a scratch copy.

Uses docker or podman when one is available; otherwise the trajectory
bundle is staged but not executed and the report says so.

Run: python3 demos/03_example_mission.py [--engine podman]
"""
import argparse
import shutil
import tempfile
from pathlib import Path

import yaml

from verdad.cli import main

HERE = Path(__file__).resolve().parent
parser = argparse.ArgumentParser()
parser.add_argument("--engine", default="docker")
args = parser.parse_args()

with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp) / "example_mission"
    shutil.copytree(HERE.parent / "example_mission", root,
                    ignore=shutil.ignore_patterns("_verdad", "report.md"))
    for command in ("check", "build", "run"):
        code = main([command, "--root", str(root), "--engine", args.engine])
        print(f"verdad {command}: exit {code}")

    report = yaml.safe_load((root / "_verdad/report.yaml").read_text())
    for bundle in report["bundles"]:
        print(f"bundle {bundle['name']}: {bundle['status']}")
    rendered = root / "report.md"
    print(rendered.read_text() if rendered.exists() else "report.md not rendered (see warnings above)")
