"""
A triple Massey product
=======================

The dg algebra with u, v, w in degree 1, uv, wu in degree 2, d(w) = uv and
products u.v = uv, w.u = wu.  Its cohomology is <u, v> + <wu>, the product
there vanishes, and the transferred m_3 sees <u, v, u>.
"""
from importlib.resources import files

from pertalg import ainf
from pertalg.hodge import ChainComplex, build_hodge
from pertalg.problems import load_problem

A = load_problem(files("pertalg") / "data" / "massey.json").algebra(4)
hd = build_hodge(ChainComplex(A.space, A.differential()))

mm = ainf.transfer_minimal(A, hd, 4)
M = mm.structure
print("H =", M.space.labels)
m = ainf.to_m_family(M)
lab = M.basis.labels
for n in (2, 3, 4):
    for key, row in sorted(m[n].items()):
        for o, c in row.items():
            print(f"m_{n}({', '.join(lab[i] for i in key)}) = {c} {lab[o]}")

# the minimal model is an A-infinity algebra and incl, proj are morphisms
checks = ainf.stasheff_check(M.space, m, 4) + ainf.morphism_check(mm.incl) + ainf.morphism_check(mm.proj)
print("all checks:", all(r.passed for r in checks))

# decomposition: A is isomorphic to minimal (+) linear contractible
dec = ainf.decomposition(A, hd, 4)
print("decomposition:", dec.passed)
