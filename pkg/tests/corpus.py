"""Random template corpus over a fixed store, for dependency soundness checks."""
from __future__ import annotations

import random

from verdad.datamodel.timescales import Epoch, TimeScale
from verdad.datamodel.values import USER_INPUT, Map, Markdown, ProvenanceRecord, Quantity, SourceFormat, Table
from verdad.store import Store, commit, merge_analysis_outputs


def corpus_store() -> Store:
    def p(path, seq):
        return ProvenanceRecord(path, SourceFormat.YAML, "h", USER_INPUT, seq)

    stages = tuple(Map({"name": f"s{i}", "mass": Quantity(100.0 * (i + 1), "kg")}) for i in range(3))
    s = commit(Store(), [
        ("propulsion.engine", Map({
            "name": "R4D", "thrust": Quantity(440, "N"), "isp": Quantity(312, "s"),
            "stages": stages, "flags": Map({"qualified": True, "heritage": False}),
        }), p("propulsion/engine.yaml", 1)),
        ("power.budget", Table.infer(["load", "mode"], [[Quantity(1.5, "W"), "a"], [Quantity(2.0, "W"), "b"]]),
         p("power/budget.csv", 2)),
        ("mission.timeline", Map({"launch": Epoch(TimeScale.UTC, 9000.25), "target": "Mars"}),
         p("mission/timeline.json", 3)),
        ("docs.overview", Markdown("Body text", Map({"title": "Orbiter", "rev": 3})), p("docs/overview.md", 4)),
    ])
    return merge_analysis_outputs(s, "traj", [("dv", Map({"total": Quantity(1.8, "km/s"), "ratio": 1.81}))])


LEAVES = [
    "propulsion.engine.name", "propulsion.engine.thrust", "propulsion.engine.isp",
    "propulsion.engine.flags.qualified", "mission.timeline.launch", "mission.timeline.target",
    "docs.overview.front_matter.title", "docs.overview.body", "analysis.traj.dv.total",
    "analysis.traj.dv.ratio", "propulsion.engine.stages.1.mass", "power.budget.mode",
]
QUANTITIES = {
    "propulsion.engine.thrust": ["kN", "lbf"], "propulsion.engine.isp": ["min", "ms"],
    "analysis.traj.dv.total": ["m/s", "ft/s"],
}
MAPS = {"propulsion.engine": ["name", "thrust", "isp"], "analysis.traj.dv": ["total", "ratio"],
        "propulsion.engine.flags": ["qualified", "heritage"]}


def _snippet(rng: random.Random, depth: int = 0) -> str:
    kind = rng.randrange(20)
    leaf = rng.choice(LEAVES)
    if kind == 0:
        return "{{ %s }}" % leaf
    if kind == 1:
        q = rng.choice(list(QUANTITIES))
        return "{{ %s | to('%s') | round(3) }}" % (q, rng.choice(QUANTITIES[q]))
    if kind == 2:
        field = rng.choice(["mass", "name"])
        return "{% for s in propulsion.engine.stages %}{{ s." + field + " }};{% endfor %}"
    if kind == 3:
        m = rng.choice(list(MAPS))
        return "{%% set x = %s %%}{{ x.%s }}" % (m, rng.choice(MAPS[m]))
    if kind == 4:
        return "{%% if %s %%}{{ %s }}{%% else %%}{{ %s }}{%% endif %%}" % (
            rng.choice(LEAVES), rng.choice(LEAVES), rng.choice(LEAVES))
    if kind == 5:
        return "{{ power.budget | table }}"
    if kind == 6:
        src = rng.choice(["power.budget", "power.budget.rows"])
        return "{%% for r in %s %%}{{ r.mode }}/{{ r.load }} {%% endfor %%}" % src
    if kind == 7:
        m = rng.choice(list(MAPS))
        return "{%% for k, v in %s.items() %%}{{ k }}={{ v }} {%% endfor %%}" % m
    if kind == 8:
        return "{{ propulsion.engine['thrust'] }} {{ propulsion.engine.stages[%d].mass }}" % rng.randrange(3)
    if kind == 9:
        return "{{ mission.timeline.launch | scale('TDB') }}"
    if kind == 10:
        return "{% with e = propulsion.engine %}{{ e.isp }}{% endwith %}"
    if kind == 11:
        return "{% macro show(q) %}[{{ q }}]{% endmacro %}{{ show(" + leaf + ") }}"
    if kind == 12:
        return "{{ power.budget.load | map(attribute='magnitude') | sum }}"
    if kind == 13:
        return "{{ propulsion.engine.stages | length }}"
    if kind == 14:
        return ("{% for s in propulsion.engine.stages %}{% set m = s.mass %}"
                "{{ m | to('t') }} {% endfor %}")
    if kind == 15:
        return "{{ nothing.here | default('n/a') }}{% if other is defined %}{{ other }}{% endif %}"
    if kind == 16:
        return ("{% set ns = namespace(t=0) %}{% for s in propulsion.engine.stages %}"
                "{% set ns.t = ns.t + s.mass.magnitude %}{% endfor %}{{ ns.t }}")
    if kind == 17:
        return "{% for c in ['load', 'mode'] %}{{ power.budget[c] | length }}{% endfor %}"
    if kind == 18 and depth < 2:
        return "{%% for s in propulsion.engine.stages %%}{%% if loop.first %%}%s{%% endif %%}{%% endfor %%}" % (
            _snippet(rng, depth + 1))
    return "{{ %s | string | upper }}" % leaf


def generate_corpus(n: int = 50, seed: int = 7) -> list[str]:
    rng = random.Random(seed)
    out = []
    for i in range(n):
        parts = [f"# template {i}"] + [_snippet(rng) for _ in range(rng.randint(3, 8))]
        out.append("\n".join(parts) + "\n")
    return out


def covered(path, deps) -> bool:
    return any(path.startswith(d) or d.startswith(path) for d in deps)
