import random
from fractions import Fraction

import mpmath as mp
import pytest

from ctori.arith_data import load_fixture
from ctori.conductors import (
    ConductorError,
    artin_conductor,
    base_change_conductor,
    delta_add,
)
from ctori.constructible import BadPlaceData, K0Class, PointTerm
from ctori.groups import FiniteGroup, full_subgroup, trivial_subgroup
from ctori.instances import (
    quadratic_bad_place,
    quadratic_group,
    sign_lattice,
    split_gm_data,
)
from ctori.lattices import FinAbFrob, GLattice, IntMatrix, regular_lattice

Z2 = quadratic_group()


def test_unramified_conductor_zero():
    Y = sign_lattice(Z2, trivial_subgroup(Z2))
    v = BadPlaceData("7", 7, full_subgroup(Z2), trivial_subgroup(Z2), 1)
    assert artin_conductor(Y, v) == 0


def test_wild_sign_conductor_two():
    # the place modeling 2 in the Gaussian extension: G0 = G1 = Z/2
    Y = sign_lattice(Z2, trivial_subgroup(Z2))
    v = quadratic_bad_place("2", 2, wild_depth=1)
    assert artin_conductor(Y, v) == 2


def test_tame_sign_conductor_one():
    Y = sign_lattice(Z2, trivial_subgroup(Z2))
    v = quadratic_bad_place("3", 3, wild_depth=None)
    assert artin_conductor(Y, v) == 1


def test_wild_depth_two_conductor_three():
    # the place modeling 2 in the sqrt(2) extension: G0 = G1 = G2 = Z/2
    Y = sign_lattice(Z2, trivial_subgroup(Z2))
    v = quadratic_bad_place("2", 2, wild_depth=2)
    assert artin_conductor(Y, v) == 3


def test_missing_filtration_at_wild_place():
    Y = sign_lattice(Z2, trivial_subgroup(Z2))
    v = BadPlaceData("2", 2, full_subgroup(Z2), full_subgroup(Z2), 0, None)
    assert v.is_wild()
    with pytest.raises(ConductorError, match="ramification filtration required"):
        artin_conductor(Y, v)


def test_conductor_additivity_random_triples():
    rng = random.Random(4)
    places = [quadratic_bad_place("2", 2, wild_depth=1),
              quadratic_bad_place("3", 3, wild_depth=None)]
    pieces = [GLattice.trivial(Z2, 1), sign_lattice(Z2, trivial_subgroup(Z2)),
              regular_lattice(Z2)]
    for _ in range(20):
        A = rng.choice(pieces)
        B = rng.choice(pieces)
        for v in places:
            assert artin_conductor(A.direct_sum(B), v) == \
                artin_conductor(A, v) + artin_conductor(B, v)


def test_conductor_discriminant_quadratic_fields():
    # sum over bad places of a(Ind_H 1) log q equals log |disc|
    cases = [
        ("Q(i)", quadratic_bad_place("2", 2, wild_depth=1), 4),
        ("Q(sqrt-3)", quadratic_bad_place("3", 3, wild_depth=None), 3),
        ("Q(sqrt5)", quadratic_bad_place("5", 5, wild_depth=None), 5),
        ("Q(sqrt2)", quadratic_bad_place("2", 2, wild_depth=2), 8),
    ]
    for label, v, absdisc in cases:
        rec = load_fixture(label)
        assert abs(rec.disc) == absdisc
        # Ind_1^G 1 as a lattice: the regular module
        reg = regular_lattice(Z2)
        a = artin_conductor(reg, v)
        assert a.denominator == 1
        assert v.q ** int(a) == absdisc


def test_conductor_discriminant_quartic_cyclotomic():
    # degree-4 cyclic field ramified at one tame place: a(regular) = 3
    G = FiniteGroup.cyclic(4)
    r = next(i for i in range(4) if G.element_order(i) == 4)
    v = BadPlaceData("5", 5, full_subgroup(G), full_subgroup(G), 0,
                     (full_subgroup(G), trivial_subgroup(G)))
    reg = regular_lattice(G)
    a = artin_conductor(reg, v)
    rec = load_fixture("Q(zeta5)")
    assert v.q ** int(a) == abs(rec.disc) == 125


def test_base_change_conductor_split():
    T = split_gm_data()
    per_place, total = base_change_conductor(T.characters, [])
    assert per_place == {} and total == 0


def test_base_change_conductor_norm_one_and_restriction():
    Y = sign_lattice(Z2, trivial_subgroup(Z2))
    v2 = quadratic_bad_place("2", 2, wild_depth=1)
    per_place, total = base_change_conductor(Y, [v2])
    assert per_place["2"] == 1
    with mp.workdps(50):
        assert abs(total - mp.log(2)) < mp.mpf(10) ** -45
    # Weil restriction: regular module; c = a(trivial + sign)/2 = (0 + 2)/2
    reg = regular_lattice(Z2)
    per_place, _ = base_change_conductor(reg, [v2])
    assert per_place["2"] == 1


def test_delta_add_examples():
    G1 = FiniteGroup.trivial()
    q_rec = load_fixture("Q")
    qi_rec = load_fixture("Q(i)")
    K = K0Class(G1, {(0,): Fraction(1)}, ())
    gl = delta_add(K, {(0,): q_rec})
    assert gl.grade == 1 and gl.integral_grade
    assert abs(gl.covolume - 1) < mp.mpf(10) ** -40
    assert gl.exact_tag == (Fraction(1), 1)

    K2 = K0Class(G1, {(0,): Fraction(1)}, ())
    gl2 = delta_add(K2, {(0,): qi_rec})
    assert gl2.grade == 2
    assert abs(gl2.covolume - 2) < mp.mpf(10) ** -40
    assert gl2.exact_tag == (Fraction(2), 1)

    pt = PointTerm("3", 3, FinAbFrob((), 1, IntMatrix.identity(1), 1, 3), Fraction(1))
    K3 = K0Class(G1, {}, (pt,))
    gl3 = delta_add(K3, {})
    assert gl3.grade == 0
    assert gl3.covolume == 1


def test_delta_add_homomorphism():
    G1 = FiniteGroup.trivial()
    recs = {(0,): load_fixture("Q(sqrt5)")}
    K1 = K0Class(G1, {(0,): Fraction(1)}, ())
    K2 = K0Class(G1, {(0,): Fraction(2)}, ())
    a = delta_add(K1, recs)
    b = delta_add(K2, recs)
    c = delta_add(K1 + K2, recs)
    assert c.grade == a.grade + b.grade
    with mp.workdps(50):
        assert abs(c.covolume - a.covolume * b.covolume) < mp.mpf(10) ** -40


def test_delta_add_non_integral_grade_flagged():
    G1 = FiniteGroup.trivial()
    K = K0Class(G1, {(0,): Fraction(1, 2)}, ())
    gl = delta_add(K, {(0,): load_fixture("Q")})
    assert not gl.integral_grade
    assert gl.grade == Fraction(1, 2)


def test_delta_add_ff_mode():
    G1 = FiniteGroup.trivial()
    K = K0Class(G1, {(0,): Fraction(1)}, ())
    gl = delta_add(K, {}, mode="ff", genus=0)
    assert gl.grade == 1
