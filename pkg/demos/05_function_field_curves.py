"""Function-field mode: exact L-series over the projective line.

Everything is a power series in T = q^{-s} with rational coefficients; the
truncated Euler product of the split torus telescopes to the polynomial
(1 - T)(1 - T/q), the rational reconstruction finds it from the series, and
the special value at s = 0 comes out as (1 - 1/q) log q on both routes.
"""

import mpmath as mp

from ctori import ff_l_function, verify_special_value
from ctori.constructible import k0_decompose
from ctori.instances import skyscraper_dual_data, split_gm_data
from ctori.l_series import FFCurveData

mp.mp.dps = 30

for q in (2, 3, 4):
    curve = FFCurveData(q)
    counts = [curve.count(d) for d in range(1, 7)]
    print(f"q = {q}: place counts by degree {counts}")
    res = ff_l_function(k0_decompose(split_gm_data()), curve, 12)
    print("  series:", [str(c) for c in res.series[:4]], "...")
    print("  rational fit:", res.rational_fit)
    rep = verify_special_value(split_gm_data(), mode="ff", curve=curve, tolerance=1e-12)
    print(f"  order {rep.order}, |L*| = {mp.nstr(rep.leading, 15)},",
          f"chi = {mp.nstr(rep.chi, 15)},",
          f"(1-1/q) log q = {mp.nstr((1 - mp.mpf(1)/q) * mp.log(q), 15)}  [{rep.verdict}]")
    print()

# a skyscraper at a rational point of the line over F_2: exact polynomial 1 - T
curve = FFCurveData(2)
res = ff_l_function(k0_decompose(skyscraper_dual_data("x0", 2)), curve, 8)
print("skyscraper at a degree-1 place of the line over F_2:", res.rational_fit)
