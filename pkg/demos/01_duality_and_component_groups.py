"""Duality between torsion-free sheaf data and constructible torus data.

Build the pushforward of the sign lattice of a ramified quadratic cover,
dualize it to the norm-one torus, inspect component groups and good
reduction, and watch the double dual reproduce the input bit for bit.
"""

import warnings

from ctori import (
    check_bidual,
    component_group,
    dualize_sheaf,
    dualize_torus,
    good_reduction_locus,
)
from ctori.constructible import WildReductionWarning
from ctori.ctdata import serialize_ctdata
from ctori.instances import (
    norm_one_gaussian,
    pushforward_sheaf_gaussian,
    quadratic_bad_place,
    quadratic_group,
    sign_lattice,
)
from ctori.groups import trivial_subgroup
from ctori.constructible import BadPlaceData

warnings.simplefilter("ignore", WildReductionWarning)

# The sheaf g_* Y for Y the sign lattice of the quadratic cover ramified at 2:
# its fiber at the bad place is the invariant lattice, which is zero.
F = pushforward_sheaf_gaussian()
print("sheaf datum:", F)
print()

# Its dual is the norm-one torus: same rank-1 sign character lattice, and the
# fiber at 2 is the zero lattice (the component group there is pure torsion).
T = dualize_sheaf(F)
print("dual torus datum:", T)
print("matches the norm-one builder:", T == norm_one_gaussian())
print()

# Component groups at three kinds of places.
Z2 = quadratic_group()
Y = sign_lattice(Z2, trivial_subgroup(Z2))
ramified = quadratic_bad_place("2", 2, wild_depth=1)
inert = BadPlaceData("3", 3, ramified.decomposition, trivial_subgroup(Z2), 1)
split = BadPlaceData("5", 5, trivial_subgroup(Z2), trivial_subgroup(Z2), 0)
for v in (ramified, inert, split):
    cg = component_group(Y, v)
    print(f"component group at {v.label}: torsion {cg.torsion}, free rank {cg.free_rank}")
print()

# The listed place 2 is genuinely bad; everything else is good by fiat.
print("good reduction flags:", good_reduction_locus(T))
print()

# Biduality is an identity of canonical-basis data, so the round trip is
# byte-identical in the ctdata-v1 serialization.
report = check_bidual(F)
print("bidual check:", "pass" if report.ok else report.mismatches)
round_trip = dualize_torus(dualize_sheaf(F))
print("serializations equal:", serialize_ctdata(F) == serialize_ctdata(round_trip))
