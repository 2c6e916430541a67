"""Counting homomorphisms into small symmetric and cyclic groups.

S has plenty of finite images.  B and Q have none up to S5 and Z/12,
which matches their trivial abelianization.

Run: python3 demos/finite_quotients.py [max_degree]
"""

import sys

from gforge.abelian import h1
from gforge.constructions import load_builtin
from gforge.quotients import quotient_sweep

deg = int(sys.argv[1]) if len(sys.argv) > 1 else 5
for name in ("s", "b", "q"):
    p = load_builtin(name)
    sweep = quotient_sweep(p, deg)
    counts = ", ".join(f"{r.target}:{r.homs}" for r in sweep.reports if r.target.startswith("S"))
    print(f"{p.name}: H1 = {h1(p)}; homs {counts}")
    print(f"   {sweep.verdict}")
    if sweep.nontrivial_found:
        wit = next(r.witness for r in sweep.reports if r.witness)
        print(f"   e.g. {wit}")
