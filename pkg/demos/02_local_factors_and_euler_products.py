"""Local L-factors as exact rational functions, and truncated Euler products
checked against classical constants.

The local factor at x is Q_x(inv, s) / (Q_x(inv, s+1) Q_x(fiber, s)) with
inv the inertia invariants of the cocharacter lattice, everything written in
t = N(x)^{-s}; at good places it collapses to the inverse Artin factor at
s+1.
"""

import warnings

import mpmath as mp

from ctori import euler_product, local_factor_torus
from ctori.constructible import PlaceCtx, WildReductionWarning, k0_decompose
from ctori.instances import norm_one_gaussian, quadratic_bad_place, split_gm_data
from ctori.l_series import AbelianOracle
from ctori.groups import FiniteGroup

warnings.simplefilter("ignore", WildReductionWarning)
mp.mp.dps = 30

T = norm_one_gaussian()
Z2 = T.group
print("norm-one torus of the Gaussian field, local factors:")
print("  ramified place 2:", local_factor_torus(T, "2"))
print("  inert place 3:   ", local_factor_torus(T, PlaceCtx.good("3", 3, Z2, 1)))
print("  split place 5:   ", local_factor_torus(T, PlaceCtx.good("5", 5, Z2, 0)))
print()

# The split torus over the integers: its L-function is 1/zeta(s+1), so at
# s = 2 the truncated Euler product approaches 1/zeta(3).
G1 = FiniteGroup.trivial()
triv_oracle = AbelianOracle(G1, 1, {0: 0})
res = euler_product(split_gm_data(), triv_oracle, s=2.0, bound=10000)
print("split torus at s=2:", mp.nstr(res.value, 12), "+-", mp.nstr(res.tail_bound, 3))
print("1/zeta(3)         :", mp.nstr(1 / mp.zeta(3), 12))
print()

# The norm-one torus: L = 1/L(chi_-4, s+1); at s = 2 compare with the
# alternating series for the classical beta function value.
mod4 = AbelianOracle(Z2, 4, {1: 0, 3: 1}, {2: quadratic_bad_place("2", 2, wild_depth=1)})
res2 = euler_product(T, mod4, s=2.0, bound=10000)
beta3 = mp.nsum(lambda n: (-1) ** n / (2 * n + 1) ** 3, [0, mp.inf])
print("norm-one at s=2:", mp.nstr(res2.value, 12))
print("1/beta(3)      :", mp.nstr(1 / beta3, 12))
print()

# The same Euler product through the generator decomposition (field terms
# over the two fields, point terms cancelled) gives the identical factors.
K = k0_decompose(T)
print("K0 class:", K)
res3 = euler_product(K, mod4, s=2.0, bound=10000)
print("via decomposition:", mp.nstr(res3.value, 12), " (bit-equal:", res3.value == res2.value, ")")
