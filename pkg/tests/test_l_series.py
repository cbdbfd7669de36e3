import warnings
from fractions import Fraction

import mpmath as mp
import pytest

from ctori.arith_data import load_fixture
from ctori.constructible import (
    BadPlaceData,
    CTorusData,
    TorusPlace,
    ValidationError,
    WildReductionWarning,
    k0_decompose,
    make_complex,
)
from ctori.groups import FiniteGroup, trivial_subgroup, full_subgroup
from ctori.instances import (
    norm_one_gaussian,
    quadratic_bad_place,
    quadratic_group,
    skyscraper_dual_data,
    split_gm_data,
)
from ctori.lattices import FinAbFrob, GLattice, IntMatrix
from ctori.l_series import (
    AbelianOracle,
    FFCurveData,
    OracleError,
    TableOracle,
    derive_cover_oracle,
    dirichlet_l_at_1,
    euler_product,
    ff_l_function,
    primes_up_to,
    zeta_residue_numeric,
)
from ctori.pushforward import CoverData, LowerPlaceEntry, UpperPlaceRef, pushforward_torus

mp.mp.dps = 50
Z2 = quadratic_group()
G1 = FiniteGroup.trivial()

TRIV_ORACLE = AbelianOracle(G1, 1, {0: 0})
MOD4 = AbelianOracle(Z2, 4, {1: 0, 3: 1}, {2: quadratic_bad_place("2", 2, wild_depth=1)})


def zeta3_partial_sums(terms=200000):
    """Independent oracle: zeta(3) by partial sums with an integral tail."""
    s = mp.mpf(0)
    for n in range(1, terms + 1):
        s += mp.mpf(1) / mp.mpf(n) ** 3
    # tail between integral bounds; midpoint is accurate to ~terms^-4
    tail = (mp.mpf(1) / (2 * terms ** 2) + mp.mpf(1) / (2 * (terms + 1) ** 2)) / 2
    return s + tail


def beta3_alternating(terms=200000):
    s = mp.mpf(0)
    for n in range(terms):
        s += mp.mpf((-1) ** n) / mp.mpf(2 * n + 1) ** 3
    return s


def test_primes_up_to():
    assert primes_up_to(20) == [2, 3, 5, 7, 11, 13, 17, 19]
    assert primes_up_to(1) == []


def test_oracle_validation():
    with pytest.raises(OracleError):
        AbelianOracle(Z2, 4, {1: 1})  # 1 must map to the identity
    with pytest.raises(OracleError):
        AbelianOracle(Z2, 5, {1: 0, 2: 1, 3: 1, 4: 1})  # 2*3=1 -> id, but 1+1 != 0
    with pytest.raises(OracleError):
        AbelianOracle(Z2, 4, {1: 0, 2: 1})  # 2 is not a unit mod 4


def test_oracle_incompleteness_named():
    oracle = AbelianOracle(Z2, 4, {1: 0}, {2: quadratic_bad_place("2", 2, wild_depth=1)})
    with pytest.raises(OracleError, match="residue class 3"):
        oracle.places(10)
    # missing override for a prime dividing the modulus
    oracle2 = AbelianOracle(Z2, 4, {1: 0, 3: 1})
    with pytest.raises(OracleError, match="prime 2"):
        oracle2.places(10)


def test_oracle_consistency_periodic_and_overrides():
    ctxs = {c.label: c for c in MOD4.places(50)}
    for p in primes_up_to(50):
        if p == 2:
            assert ctxs["2"].inertia.order == 2  # override drives the bad prime
        else:
            assert ctxs[str(p)].frobenius == (0 if p % 4 == 1 else 1)


def test_euler_product_split_gm():
    res = euler_product(split_gm_data(), TRIV_ORACLE, s=2.0, bound=10000)
    target = 1 / zeta3_partial_sums()
    assert abs(res.value - target) < mp.mpf("1e-8")
    assert res.tail_bound < mp.mpf("1e-6")
    assert abs(res.value - target) < res.tail_bound + mp.mpf("1e-9")


def test_euler_product_norm_one():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WildReductionWarning)
        res = euler_product(norm_one_gaussian(), MOD4, s=2.0, bound=10000)
    target = 1 / beta3_alternating()
    assert abs(res.value - target) < mp.mpf("1e-10")


def test_euler_product_empty_class_is_one():
    from ctori.constructible import K0Class
    K = K0Class(G1, {}, ())
    res = euler_product(K, TRIV_ORACLE, s=2.0, bound=1000)
    assert res.value == 1


def test_euler_product_rejects_small_s():
    with pytest.raises(ValidationError):
        euler_product(split_gm_data(), TRIV_ORACLE, s=1.2, bound=100)


def _listed_split(rank, q=5):
    v = BadPlaceData(str(q), q, full_subgroup(G1), trivial_subgroup(G1), 0)
    E = FinAbFrob((), rank, IntMatrix.identity(rank), 1, q)
    return CTorusData(G1, GLattice.trivial(G1, rank), (),
                      (TorusPlace(v, E, IntMatrix.identity(rank)),))


def test_complex_euler_product_matches_ratio():
    # source rank 2, target rank 1: a genuinely non-exact complex
    T_source = _listed_split(2)
    T_target = _listed_split(1)
    cx = make_complex(T_source, T_target, IntMatrix([[1], [0]]),
                      {"5": IntMatrix([[1, 0]])})
    K = k0_decompose(cx)
    assert K.field_terms == {(0,): Fraction(-1)}
    via_k0 = euler_product(K, TRIV_ORACLE, s=2.0, bound=10000)
    ratio = euler_product(T_target, TRIV_ORACLE, s=2.0, bound=10000).value / \
        euler_product(T_source, TRIV_ORACLE, s=2.0, bound=10000).value
    rel = abs(via_k0.value - ratio) / ratio
    assert rel < mp.mpf("1e-6")


def test_pushforward_euler_product_invariance():
    U = FiniteGroup.trivial()
    lower2 = quadratic_bad_place("2", 2, wild_depth=1)
    cover = CoverData(Z2, trivial_subgroup(Z2), U, (0,),
                      (LowerPlaceEntry(lower2, (UpperPlaceRef("2i", 2, 1),)),))
    T_up = CTorusData(U, GLattice.trivial(U, 1), (), ())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WildReductionWarning)
        P = pushforward_torus(cover, T_up)
        lo = euler_product(P, MOD4, s=2.0, bound=10000)
    hi = euler_product(T_up, derive_cover_oracle(MOD4, cover, 10000), s=2.0, bound=10000)
    rel = abs(lo.value - hi.value) / hi.value
    assert rel < lo.tail_bound + hi.tail_bound
    assert rel < mp.mpf("1e-6")


# ---------------------------------------------------------------------------
# function-field mode
# ---------------------------------------------------------------------------

def test_ff_projective_line_counts():
    curve = FFCurveData(2)
    assert curve.count(1) == 3
    assert curve.count(2) == 1  # monic irreducible quadratics over F_2
    assert curve.count(3) == 2
    assert curve.count(4) == 3


def test_ff_split_gm_series_and_fit():
    for q in (2, 3, 4):
        curve = FFCurveData(q)
        res = ff_l_function(k0_decompose(split_gm_data()), curve, 12)
        expected = [Fraction(1), Fraction(-1) - Fraction(1, q), Fraction(1, q)] \
            + [Fraction(0)] * 10
        assert res.series == expected
        fit = res.rational_fit
        assert fit is not None
        assert fit.series(12) == res.series  # re-expansion is exact
        assert fit.num.coeffs == (Fraction(1), Fraction(-1) - Fraction(1, q), Fraction(1, q))


def test_ff_blue_point():
    curve = FFCurveData(2)
    res = ff_l_function(k0_decompose(skyscraper_dual_data("x", 2)), curve, 8)
    assert res.rational_fit is not None
    assert str(res.rational_fit) == "1 - t"


def test_ff_direct_sum_multiplies_series():
    curve = FFCurveData(3)
    K1 = k0_decompose(split_gm_data())
    K2 = k0_decompose(skyscraper_dual_data("x", 3))
    s1 = ff_l_function(K1, curve, 10).series
    s2 = ff_l_function(K2, curve, 10).series
    s12 = ff_l_function(K1 + K2, curve, 10).series
    from ctori.l_series import _series_mul
    assert s12 == _series_mul(s1, s2, 10)


def test_ff_rejects_nonconstant_without_oracle():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WildReductionWarning)
        T = norm_one_gaussian()
        with pytest.raises(ValidationError):
            ff_l_function(k0_decompose(T), FFCurveData(2), 8)


# ---------------------------------------------------------------------------
# Dirichlet L(1) values
# ---------------------------------------------------------------------------

def test_dirichlet_l1_chi_minus4():
    chi = load_fixture("Q(i)").characters[0]
    assert abs(dirichlet_l_at_1(chi) - mp.pi / 4) < mp.mpf(10) ** -45


def test_dirichlet_l1_chi_minus3():
    chi = load_fixture("Q(sqrt-3)").characters[0]
    assert abs(dirichlet_l_at_1(chi) - mp.pi / (3 * mp.sqrt(3))) < mp.mpf(10) ** -45


def test_dirichlet_l1_chi5():
    chi = load_fixture("Q(sqrt5)").characters[0]
    target = 2 * mp.log((1 + mp.sqrt(5)) / 2) / mp.sqrt(5)
    assert abs(dirichlet_l_at_1(chi) - target) < mp.mpf(10) ** -45


def test_zeta_residue_numeric():
    assert abs(zeta_residue_numeric() - 1) < mp.mpf(10) ** -20


def test_table_oracle_bounds():
    from ctori.constructible import PlaceCtx
    entries = [PlaceCtx("2", 2, trivial_subgroup(G1), 0)]
    oracle = TableOracle(G1, entries, 10)
    assert len(oracle.places(10)) == 1
    with pytest.raises(OracleError):
        oracle.places(11)
    with pytest.raises(OracleError):
        TableOracle(G1, entries + entries, 10)
