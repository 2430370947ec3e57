"""
Admissible trees for module transfer
====================================

A tree is a composition of i - 1; the transferred module operation of
arity i is the sum of one composite per tree.
"""
import random

from pertalg import ainf
from pertalg.generators import random_two_step_algebra
from pertalg.hodge import ChainComplex, build_hodge
from pertalg.modules import enumerate_admissible_trees, regular_module, transfer_module

for i in range(2, 6):
    trees = enumerate_admissible_trees(i)
    print(i, len(trees), [t.composition for t in trees])

for t in enumerate_admissible_trees(4):
    print(f"{str(t.composition):10} {t.formula()}")

# a random algebra acting on itself: the tree sums agree with the series
V, m = random_two_step_algebra(random.Random(3), 2, 2)
Mm = regular_module(ainf.from_m_family(V, m, 6))
hd = build_hodge(ChainComplex(Mm.module_space, Mm.differential()))
tr = transfer_module(Mm, hd)
for r in tr.reports:
    if r.identity_id.startswith("tree sum"):
        print(r.status, r.identity_id)
print("everything:", tr.passed)
