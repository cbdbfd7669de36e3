from fractions import Fraction

import pytest

from ctori.groups import (
    ArtinInductionError,
    ClassFunction,
    FiniteGroup,
    GroupStructureError,
    Subgroup,
    artin_induction,
    canonical_subgroup_key,
    conjugacy_classes,
    cyclic_subgroups,
    full_subgroup,
    induced_trivial_character,
    left_cosets,
    parse_group,
    perm_from_cycles,
    serialize_group,
    trivial_subgroup,
)


def brute_force_classes(G):
    """Independent oracle: conjugation orbits by direct double loop."""
    classes = []
    assigned = [None] * G.order
    for i in range(G.order):
        if assigned[i] is not None:
            continue
        orbit = sorted({G.conjugate(i, j) for j in range(G.order)})
        for k in orbit:
            assigned[k] = True
        classes.append(tuple(orbit))
    return sorted(classes, key=lambda c: c[0])


S3 = FiniteGroup.symmetric(3)
Z2 = FiniteGroup.cyclic(2)
Z3 = FiniteGroup.cyclic(3)
Z4 = FiniteGroup.cyclic(4)
Z6 = FiniteGroup.cyclic(6)
V4 = FiniteGroup.klein_four()


def test_identity_is_index_zero():
    for G in (S3, Z2, Z4, V4):
        assert G.identity_index == 0
        assert G.elements[0] == tuple(range(G.degree))


def test_trivial_group_single_class():
    G = FiniteGroup.trivial()
    assert conjugacy_classes(G) == [(0,)]


def test_s3_class_sizes():
    classes = conjugacy_classes(S3)
    assert classes == brute_force_classes(S3)
    assert sorted(len(c) for c in classes) == [1, 2, 3]
    # canonical order: identity class first
    assert classes[0] == (0,)


def test_z4_singleton_classes():
    classes = conjugacy_classes(Z4)
    assert len(classes) == 4
    assert all(len(c) == 1 for c in classes)


def test_class_sizes_partition_group():
    for G in (S3, Z2, Z3, Z4, Z6, V4):
        classes = conjugacy_classes(G)
        assert sum(len(c) for c in classes) == G.order
        members = sorted(i for c in classes for i in c)
        assert members == list(range(G.order))


def test_malformed_group_rejected():
    with pytest.raises(GroupStructureError):
        FiniteGroup(2, [(0, 1), (1, 0), (0, 0)])
    with pytest.raises(GroupStructureError):
        # not closed: missing the product of the two 3-cycles' generator set
        FiniteGroup(3, [(0, 1, 2), (1, 2, 0)])


def test_cyclic_subgroups_z2():
    subs = cyclic_subgroups(Z2)
    assert [H.order for H in subs] == [1, 2]


def test_cyclic_subgroups_s3():
    subs = cyclic_subgroups(S3)
    # oracle: enumerate <g> for every g, dedupe by conjugacy
    seen = set()
    for g in range(S3.order):
        members = {S3.identity_index}
        k = g
        while k not in members or k == S3.identity_index and len(members) == 1 and g != 0:
            members.add(k)
            k = S3.mult(k, g)
        H = Subgroup(S3, members | {k}, check=False)
        seen.add(canonical_subgroup_key(H))
    assert len(subs) == 3
    assert {H.members for H in subs} == seen
    assert sorted(H.order for H in subs) == [1, 2, 3]


def test_cyclic_subgroups_z6():
    subs = cyclic_subgroups(Z6)
    assert sorted(H.order for H in subs) == [1, 2, 3, 6]


def test_induced_trivial_full_subgroup_constant_one():
    for G in (S3, Z6, V4):
        chi = induced_trivial_character(full_subgroup(G))
        assert all(v == 1 for v in chi.values)


def test_induced_trivial_regular():
    chi = induced_trivial_character(trivial_subgroup(Z2))
    assert chi.values == (Fraction(2), Fraction(0))


def test_induced_trivial_s3_transposition():
    H = Subgroup(S3, [S3.identity_index, S3.index(perm_from_cycles(3, [(0, 1)]))])
    chi = induced_trivial_character(H)
    # classes ordered (e, ?, ?): identify by class sizes
    classes = conjugacy_classes(S3)
    by_size = {len(c): v for c, v in zip(classes, chi.values)}
    assert by_size[1] == 3   # identity
    assert by_size[3] == 1   # transpositions
    assert by_size[2] == 0   # 3-cycles

    # oracle: brute-force fixed-coset count for every class representative
    for cls, val in zip(classes, chi.values):
        g = cls[0]
        fixed = sum(
            1
            for coset in left_cosets(S3, H)
            if tuple(sorted(S3.mult(g, x) for x in coset)) == coset
        )
        assert val == fixed


def test_artin_induction_trivial_character_cyclic_groups():
    # for cyclic G the whole group is an admissible induction subgroup
    for G in (Z2, Z3, Z4, Z6):
        chi = ClassFunction.from_values(G, [1] * len(conjugacy_classes(G)))
        coeffs = artin_induction(chi)
        full_key = tuple(range(G.order))
        assert coeffs[full_key] == 1
        assert all(v == 0 for k, v in coeffs.items() if k != full_key)


def test_artin_induction_trivial_character_s3():
    # non-cyclic G: the trivial character decomposes over cyclic subgroups
    chi = ClassFunction.from_values(S3, [1, 1, 1])
    coeffs = artin_induction(chi)
    assert synthesize(S3, coeffs).values == chi.values
    by_order = {len(k): v for k, v in coeffs.items()}
    assert by_order[1] == Fraction(-1, 2)
    assert by_order[2] == 1
    assert by_order[3] == Fraction(1, 2)


def test_artin_induction_sign_of_z2():
    sign = ClassFunction.from_values(Z2, [1, -1])
    coeffs = artin_induction(sign)
    assert coeffs[(0,)] == 1
    assert coeffs[(0, 1)] == -1


def test_artin_induction_s3_two_dimensional():
    classes = conjugacy_classes(S3)
    values = []
    for c in classes:
        size = len(c)
        values.append({1: 2, 3: 0, 2: -1}[size])
    chi = ClassFunction.from_values(S3, values)
    coeffs = artin_induction(chi)
    by_order = {}
    for key, v in coeffs.items():
        by_order.setdefault(len(key), Fraction(0))
        by_order[len(key)] += v
    assert by_order[1] == Fraction(1, 2)
    assert by_order[2] == 0
    assert by_order[3] == Fraction(-1, 2)


def synthesize(G, coeffs):
    total = None
    for key, a in coeffs.items():
        chi = induced_trivial_character(Subgroup(G, key)).scale(a)
        total = chi if total is None else total + chi
    return total


@pytest.mark.parametrize("G", [S3, Z6, V4])
def test_artin_induction_exact_residual_and_denominators(G):
    # every rational irreducible character, plus a couple of sums
    rational_chars = {
        "S": [],
    }
    classes = conjugacy_classes(G)
    candidates = []
    if G is S3:
        sizes = [len(c) for c in classes]
        triv = [1, 1, 1]
        sgn = [1 if s != 3 else -1 for s in sizes]
        two = [{1: 2, 3: 0, 2: -1}[s] for s in sizes]
        candidates = [triv, sgn, two, [a + b for a, b in zip(triv, two)]]
    elif G is Z6:
        # rational irreducibles of Z/6: by kernel subgroup; express via
        # induced characters directly (they span): test a spread of
        # integer-valued class functions known to be rational characters
        ind = [induced_trivial_character(H).values for H in cyclic_subgroups(G)]
        candidates = [list(v) for v in ind]
        candidates.append([sum(col) for col in zip(*ind)])
    else:
        ind = [induced_trivial_character(H).values for H in cyclic_subgroups(G)]
        candidates = [list(v) for v in ind]
    for values in candidates:
        chi = ClassFunction.from_values(G, values)
        coeffs = artin_induction(chi)
        assert synthesize(G, coeffs).values == chi.values
        for v in coeffs.values():
            assert (v * G.order).denominator == 1


def test_artin_induction_rejects_irrational():
    # a class function on Z/6 that is not constant on rational classes
    # (distinguishes a generator from its inverse) is outside the span
    r = next(i for i in range(Z6.order) if Z6.element_order(i) == 6)
    rinv = Z6.inv(r)
    assert r != rinv
    values = [0] * 6
    values[r] = 1
    values[rinv] = -1
    chi = ClassFunction.from_values(Z6, values)
    with pytest.raises(ArtinInductionError):
        artin_induction(chi)
    # non-integer values are rejected up front
    with pytest.raises(ArtinInductionError):
        artin_induction(ClassFunction.from_values(S3, [Fraction(1, 2), 0, 0]))


def test_induction_transitivity_s3():
    # Ind_K^G 1 = Ind_H^G (Ind_K^H 1) at the level of fixed-point characters:
    # for K <= H <= G with H = <(012)>, K = 1
    H = Subgroup(S3, sorted({S3.identity_index,
                             S3.index(perm_from_cycles(3, [(0, 1, 2)])),
                             S3.index(perm_from_cycles(3, [(0, 2, 1)]))}))
    K = trivial_subgroup(S3)
    lhs = induced_trivial_character(K)
    # Ind_H^G of the regular character of H equals [H:K] copies stacked:
    # compute via coefficients: regular of H = sum over cyclic subgroups of H
    # with artin coefficients; here simply check Ind_1^G = 2 * Ind_H^G? No:
    # use the classical identity Ind_1^G 1 = Ind_H^G (regular_H) and
    # regular_H = Ind_1^H 1.
    # fixed points of g on G/1 == sum over cosets structure; verify numerically:
    ind_H = induced_trivial_character(H)
    # regular_H has character |H| at e, 0 elsewhere; Ind_H^G of it has
    # character |H| * (fixed cosets of g on G/H when g acts trivially on H-part)
    # -> equals |G| at e and 0 elsewhere, which is lhs.
    assert lhs.values[0] == S3.order
    assert all(v == 0 for v in lhs.values[1:])
    assert ind_H.values[0] == 2


def test_group_roundtrip_serialization():
    for G in (S3, Z6, V4):
        text = serialize_group(G)
        G2 = parse_group(text)
        assert G2 == G
        assert serialize_group(G2) == text


def test_parse_group_cycles_and_generators():
    G = parse_group("degree 3\n(0 1)\n(0 1 2)\n")
    assert G == S3
    G2 = parse_group("degree 4\nimages 1 0 2 3\n(2 3)\n")
    assert G2 == V4
