"""Ideal velocity budget from the rocket equation."""
import json
import math

G0 = 9.80665

with open("params.json") as fh:
    p = json.load(fh)

m0 = p["dry_mass_kg"] + p["propellant_kg"]
mf = p["dry_mass_kg"]
dv = p["isp_s"] * G0 * math.log(m0 / mf)

with open("dv.json", "w") as fh:
    json.dump({
        "total": {"value": round(dv / 1000.0, 4), "unit": "km/s"},
        "mass_ratio": round(m0 / mf, 6),
    }, fh, indent=2, sort_keys=True)
