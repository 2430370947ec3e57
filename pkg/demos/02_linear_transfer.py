"""
Perturbing a small complex
==========================

V = <a, b> in degree 0 and <c> in degree 1 with d(a) = c.  After the
perturbation x(a) = x(b) = c one class survives in degree 0, and the
retract tV = <b> carries the transferred differential.
"""
from pertalg.hodge import (ChainComplex, GradedMap, GradedSpace, build_hodge, gauge_conjugation,
                           make_perturbation, transferred_structure, verify_transfer)

V = GradedSpace({0: ("a", "b"), 1: ("c",)})
C = ChainComplex(V, GradedMap.from_entries(V, 1, [("a", "c", 1)]))
hd = build_hodge(C)
print("s:", sorted(hd.s.entries()))
print("t:", sorted(hd.t.entries()))

x = GradedMap.from_entries(V, 1, [("a", "c", 1), ("b", "c", 1)])
p = make_perturbation(C, hd, x)
print("alpha_V:", sorted(p.alpha_V.entries()))

tr = transferred_structure(C, hd, p)
print("tV =", tr.tspace.labels, " xi =", sorted(tr.xi.entries()))
for r in verify_transfer(C, hd, p, tr):
    print(f"  {r.status}  {r.identity_id}")

# g conjugates d + x into d + t x alpha t
g, rep = gauge_conjugation(C, hd, p)
print("g_V:", sorted(g.entries()), rep.status)

# homology before and after
print("H(V, d)     =", C.cohomology_dims())
print("H(V, d + x) =", C.cohomology_dims(x))
