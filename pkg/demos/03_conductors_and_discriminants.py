"""Artin conductors from ramification filtrations, base-change conductors,
and the conductor-discriminant bookkeeping.

The conductor exponent is a_v(V) = sum_i (|G_i|/|G_0|) dim(V/V^{G_i}) over
the lower-numbering filtration; the base-change conductor of a torus is half
the conductor of its cocharacter lattice, and summing a_v(Ind 1) log q_v
over bad places recovers log |disc| of the corresponding field.
"""

import mpmath as mp

from ctori import artin_conductor, base_change_conductor, delta_add, load_fixture
from ctori.constructible import K0Class
from ctori.groups import trivial_subgroup
from ctori.instances import quadratic_bad_place, quadratic_group, sign_lattice
from ctori.lattices import regular_lattice
from fractions import Fraction

mp.mp.dps = 30
Z2 = quadratic_group()
Y = sign_lattice(Z2, trivial_subgroup(Z2))

# wild place modeling 2 in the Gaussian cover: G_0 = G_1 = Z/2
v2 = quadratic_bad_place("2", 2, wild_depth=1)
# tame places modeling 3 and 5 in the quadratic covers of disc -3 and 5
v3 = quadratic_bad_place("3", 3)
v5 = quadratic_bad_place("5", 5)

print("conductor of the sign character:")
for v in (v2, v3, v5):
    print(f"  a_{v.label} =", artin_conductor(Y, v))
print()

print("conductor-discriminant: a(Ind 1) against |disc|")
reg = regular_lattice(Z2)
for v, label in ((v2, "Q(i)"), (v3, "Q(sqrt-3)"), (v5, "Q(sqrt5)")):
    a = artin_conductor(reg, v)
    disc = abs(load_fixture(label).disc)
    print(f"  {label}: q^a = {v.q}^{a} = {v.q ** int(a)}, |disc| = {disc}")
print()

# base-change conductors: the norm-one torus and the Weil restriction both
# pick up c_2 = 1 at the wild place
for name, L in (("norm-one", Y), ("restriction", reg)):
    per_place, total = base_change_conductor(L, [v2])
    print(f"{name}: c_2 = {per_place['2']}, total = {mp.nstr(total, 12)} (log 2 = {mp.nstr(mp.log(2), 12)})")
print()

# the graded-line shadow of det Lie on generator classes
K = K0Class(quadratic_group(), {(0,): Fraction(1)}, ())
line = delta_add(K, {(0,): load_fixture("Q(i)")})
print("delta_add of the Gaussian field generator:",
      f"grade {line.grade}, covolume {mp.nstr(line.covolume, 12)}, exact tag {line.exact_tag}")
