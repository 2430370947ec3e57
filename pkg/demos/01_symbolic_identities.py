"""
Symbolic perturbation algebra
=============================

Words in s, t, x with tt = t and ss = st = ts = 0, plus truncated
series in the number of x's.
"""
from pertalg import verify_catalog
from pertalg.algebra import apply_phi, differential, element, gauge_action, series_constant, TruncatedSeries

# the differential: d(s) = 1 - t, d(x) = -x^2, d(t) = 0
print("d(sx)   =", differential(element("sx")))

# alpha = (1 + sx)^-1 as a series, cut after two x's
alpha = series_constant("alpha", 2)
print("alpha   =", alpha)

# the gauge element g moves x onto xi = t x alpha t
cap = 4
g = series_constant("g", cap)
print("g.x     =", gauge_action(g, TruncatedSeries(cap, element("x"))))
print("xi      =", series_constant("xi", cap))

# phi is an involution
print("phi(t)  =", apply_phi(element("t"), 1))

# and the whole catalog in one go
for r in verify_catalog(4):
    print(f"{r.identity_id:10} {r.status}")
