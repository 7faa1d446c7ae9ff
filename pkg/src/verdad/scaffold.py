"""CI configuration and git hook generators.

Commit-stage hooks run ``verdad check``; push and pipeline stages run
``verdad run``. Output depends only on the kind and the tool version.
"""

from __future__ import annotations

import os
import stat
from pathlib import Path

from verdad import __version__
from verdad.errors import TargetExists

KINDS = ("github", "gitlab", "pre-commit", "pre-push")
INSTALL_SPEC = "artifact"  # distribution that provides the verdad command

_GITHUB = f"""\
# Generated by verdad {__version__}
name: verdad

on:
  push:
  pull_request:

jobs:
  check:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v4
      - uses: actions/setup-python@v5
        with:
          python-version: "3.12"
      - run: pip install {INSTALL_SPEC}
      - run: verdad check --root .

  run:
    needs: check
    if: github.event_name == 'push'
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v4
      - uses: actions/setup-python@v5
        with:
          python-version: "3.12"
      - run: pip install {INSTALL_SPEC}
      - run: verdad run --root . --runtime auto
      - uses: actions/upload-artifact@v4
        if: always()
        with:
          name: verdad-report
          path: _verdad/
"""

_GITLAB = f"""\
# Generated by verdad {__version__}
stages:
  - check
  - run

verdad-check:
  stage: check
  image: python:3.12-slim
  script:
    - pip install {INSTALL_SPEC}
    - verdad check --root .

verdad-run:
  stage: run
  image: python:3.12-slim
  script:
    - pip install {INSTALL_SPEC}
    - verdad run --root . --runtime auto
  artifacts:
    when: always
    paths:
      - _verdad/
"""

_HOOK = """\
#!/bin/sh
# Generated by verdad {version}
# Enable with: git config core.hooksPath .githooks
exec verdad {command} --root "$(git rev-parse --show-toplevel)"
"""


def scaffold_files(kind: str) -> dict[str, tuple[str, bool]]:
    """Relative path -> (content, executable) for one scaffold kind."""
    if kind == "github":
        return {".github/workflows/verdad.yml": (_GITHUB, False)}
    if kind == "gitlab":
        return {".gitlab-ci.yml": (_GITLAB, False)}
    if kind == "pre-commit":
        return {".githooks/pre-commit": (_HOOK.format(version=__version__, command="check"), True)}
    if kind == "pre-push":
        return {".githooks/pre-push": (_HOOK.format(version=__version__, command="run"), True)}
    raise ValueError(f"unknown scaffold kind {kind!r}; expected one of {', '.join(KINDS)}")


def scaffold(kind: str, root: str | os.PathLike, force: bool = False) -> list[Path]:
    root = Path(root)
    files = scaffold_files(kind)
    if not force:
        for rel in files:
            if (root / rel).exists():
                raise TargetExists(rel)
    written = []
    for rel, (content, executable) in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(content.encode("utf-8"))
        if executable:
            mode = path.stat().st_mode
            path.chmod(mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)
        written.append(path)
    return written
