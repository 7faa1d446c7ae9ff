"""Data-oriented engineering data engine.

Loads a project directory of heterogeneous data files into an immutable,
namespaced store of generic values, renders templates against it, runs
containerized analysis bundles whose outputs feed back into the store, and
scaffolds CI configuration.
"""

__version__ = "0.1.0"
