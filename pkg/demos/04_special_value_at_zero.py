"""The special value at s = 0 for the norm-one torus of the Gaussian field,
verified through two genuinely independent routes.

The class decomposes as [split torus over the Gaussian field] minus [split
torus over the rationals], with the point classes at 2 cancelling exactly.
The L-side leading coefficient is assembled from a numerically computed zeta
residue and the Gauss-sum value of L(1, chi_-4); the chi side uses the class
number formula ingredients (h, R, w, disc) of the bundled fixture records.
Both land on 4/pi.
"""

import warnings

import mpmath as mp

from ctori import load_fixture, vanishing_order, verify_special_value
from ctori.constructible import WildReductionWarning, k0_decompose
from ctori.instances import norm_one_gaussian, skyscraper_dual_data, split_gm_data

warnings.simplefilter("ignore", WildReductionWarning)
mp.mp.dps = 50

T = norm_one_gaussian()
K = k0_decompose(T)
print("decomposition:", K)
print("vanishing order:", vanishing_order(K))
print()

fields = {(0,): load_fixture("Q(i)"), (0, 1): load_fixture("Q")}
report = verify_special_value(T, fields, tolerance=1e-8)
for line in report.lines():
    print(line)
print()
print("4/pi =", mp.nstr(4 / mp.pi, 17))
print()

# the split torus over the integers: order 1 and |L*| = chi = 1
rep2 = verify_special_value(split_gm_data(), {(0,): load_fixture("Q")})
print("split torus over Z: order", rep2.order,
      "|L*| =", mp.nstr(rep2.leading, 12), "chi =", mp.nstr(rep2.chi, 12), rep2.verdict)

# a skyscraper point: order 1 and |L*| = chi = log q, exactly
rep3 = verify_special_value(skyscraper_dual_data("3", 3), {})
print("point at q=3: order", rep3.order,
      "|L*| =", mp.nstr(rep3.leading, 12), "= log 3 =", mp.nstr(mp.log(3), 12), rep3.verdict)
