"""Quantities, epochs and the canonical encoding.

Run: python3 demos/01_values_and_units.py
"""
from verdad.datamodel.canonical import canonical_serialize
from verdad.datamodel.timescales import convert_epoch, parse_iso_epoch
from verdad.datamodel.values import Quantity

thrust = Quantity(490, "N")
print("thrust:", thrust, "=", thrust.to("lbf"), "=", thrust.to("kg*m/s^2"))

# Convertible is not the same as equal: the unit label is part of the value.
print("same value?", thrust == thrust.to("kg*m/s^2"))

launch = parse_iso_epoch("2027-03-14T09:30:00Z")
print("launch:", launch, "->", convert_epoch(launch, "TDB"))
print("days after J2000 (UTC):", launch.days)

print("canonical bytes:", canonical_serialize(thrust).decode())
