"""Quasimorphisms on the free group of rank two, pure braids of the torus and
Gambaudo-Ghys estimates for area-preserving torus maps."""

import json
from importlib import resources

__version__ = "0.1.0"


def load_schema(name: str) -> dict:
    """Shipped JSON schema: ``gg_estimate``, ``pure_braid`` or ``homogenization``."""
    return json.loads(resources.files(__name__).joinpath("schemas", f"{name}.schema.json").read_text())
