r"""
Vanishing on autonomous maps
============================

Single shears and the time-one map of H = sin(2 pi x) sin(2 pi y) / (2 pi)
are autonomous.  Klein-invariant homogenized quasimorphisms give estimates
indistinguishable from zero there, while the snake quasimorphism, which is
not invariant under inverting one generator, sees nonzero braids.
"""

from autonorm.flows import ode_flow, shear_h, shear_v
from autonorm.gg import GGConfig, gg_estimate_many
from autonorm.qmorph import BUILTIN_KLEIN_INVARIANT, HomogenizedQM, SnakeQM, parse_qm

qs = [parse_qm(s) for s in BUILTIN_KLEIN_INVARIANT] + [HomogenizedQM(SnakeQM())]
maps = {"v": shear_v(0.1, 5e-5), "h": shear_h(0.1, 5e-5), "ode:cellular": ode_flow("cellular")}
for name, m in maps.items():
    n = 20_000 if name.startswith("ode") else 50_000
    for q, e in zip(qs, gg_estimate_many(qs, m, GGConfig(samples=n, seed=2))):
        print(f"{name:<13} {q.spec:<14} {e.value:+.5f} +- {e.stderr:.5f}  [{e.mode}, max |integrand| {e.max_abs_integrand:g}]")
