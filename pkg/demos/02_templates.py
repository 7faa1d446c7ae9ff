"""Templates over an in-memory store: dependencies, strict and permissive rendering.

Run: python3 demos/02_templates.py
"""
from verdad.datamodel.values import USER_INPUT, Map, ProvenanceRecord, Quantity, SourceFormat
from verdad.errors import RenderError
from verdad.store import Store, commit
from verdad.templates import analyze_template, render_text

store = commit(Store(), [(
    "propulsion.engine",
    Map({"thrust": Quantity(490, "N"), "isp": Quantity(312, "s")}),
    ProvenanceRecord("propulsion/engine.yaml", SourceFormat.YAML, "demo", USER_INPUT, 1),
)])

body = """\
{% set e = propulsion.engine %}
Thrust {{ e.thrust | to('kN') }}, Isp {{ e.isp }}, mass flow {{ propulsion.engine.mdot }}"""

analysis = analyze_template(body)
print("reads:", sorted(map(str, analysis.dependencies)))

print("permissive:", render_text(body, store, "permissive").strip())
try:
    render_text(body, store, "strict")
except RenderError as exc:
    print("strict:", exc)
