r"""
Braids from trajectories
========================

Two points moving on the torus trace a pure braid.  Its free part is read
from the difference x - y on the punctured torus by recording crossings of
the two cut circles through the puncture; its lattice part is the winding of
the second point.
"""

import numpy as np

from autonorm.braid import GENERATORS
from autonorm.flows import eggbeater
from autonorm.winding import braid_from_paths, braid_of_map, generator_motions

print("generator motions")
for name, (X, Y) in generator_motions().items():
    b = braid_from_paths(X, Y)
    print(f"  {name:<7} -> free {str(b.free) or '1':<10} lattice {b.lattice}   table: {GENERATORS[name].to_json()}")

g = eggbeater("a^4 b^3 a^2 b", 0.1, 5e-5)
print("\neggbeater braids for a few point pairs")
pairs = [((0.2, 0.8), (0.7, 0.3)), ((0.28, 0.72), (0.7, 0.3)), ((0.22, 0.3), (0.6, 0.7)), ((0.6, 0.1), (0.9, 0.4))]
for x, y in pairs:
    b = braid_of_map(g, np.array(x), np.array(y))
    print(f"  x={x} y={y}: {b.to_json()}")

x, y = np.array([0.2, 0.8]), np.array([0.7, 0.3])
print("\nfixed points: the braid of g^p is the p-th power")
for p in (1, 2, 3):
    print(f"  p={p}: {braid_of_map(g.power(p), x, y).free}")
