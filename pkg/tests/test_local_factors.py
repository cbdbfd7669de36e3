import random
import warnings
from fractions import Fraction

from ctori.constructible import (
    PlaceCtx,
    WildReductionWarning,
    k0_decompose,
)
from ctori.groups import FiniteGroup
from ctori.instances import (
    norm_one_eisenstein,
    norm_one_gaussian,
    skyscraper_dual_data,
    split_gm_data,
    quadratic_group,
    random_tf_sheaf_data,
)
from ctori.lattices import FinAbFrob, GLattice, IntMatrix
from ctori.local_factors import (
    PolyQ,
    RationalFunctionT,
    SymbolicFactorProduct,
    det_one_minus_t_phi,
    format_poly,
    local_factor_torus,
    q_factor,
)

Z2 = quadratic_group()


def rf(num, den=(1,)):
    return RationalFunctionT(PolyQ(num), PolyQ(den))


# --------------------------------------------------------------------------
# polynomial / rational function plumbing
# --------------------------------------------------------------------------

def test_poly_arithmetic():
    p = PolyQ([1, 2])
    q = PolyQ([1, -1])
    assert (p * q).coeffs == (Fraction(1), Fraction(1), Fraction(-2))
    quo, rem = (p * q).divmod(q)
    assert quo == p and rem.is_zero()
    assert p.gcd(q).is_one() or p.gcd(q) == PolyQ([1])


def test_rational_function_normalization():
    # (1 - t^2)/(1 - t) reduces to 1 + t
    f = rf([1, 0, -1], [1, -1])
    assert f.is_polynomial()
    assert f.num.coeffs == (Fraction(1), Fraction(1))
    # denominator normalized to primitive integer with positive leading coeff
    g = rf([1], [Fraction(1, 2), Fraction(-1, 2)])
    assert g.den.coeffs == (Fraction(1), Fraction(-1)) or g.den.coeffs == (Fraction(-1), Fraction(1))
    assert g.den.coeffs[-1] > 0 or g.den.coeffs == (Fraction(1), Fraction(-1))


def test_rational_function_str():
    assert str(rf([1, Fraction(-1, 5)])) == "1 - 1/5*t"
    assert str(rf([1, Fraction(-1, 2), 1])) == "1 - 1/2*t + t^2"
    assert format_poly((Fraction(0),)) == "0"
    # leading coefficient of the denominator is normalized positive
    f = rf([1], [1, -1])
    assert str(f) == "(-1)/(-1 + t)"
    assert f == rf([-1], [-1, 1])


def test_series_expansion():
    f = rf([1], [1, -1])  # 1/(1-t)
    assert f.series(4) == [Fraction(1)] * 5
    g = rf([1, 1])
    assert g.series(3) == [Fraction(1), Fraction(1), Fraction(0), Fraction(0)]


# --------------------------------------------------------------------------
# q-factors
# --------------------------------------------------------------------------

def test_q_factor_trivial():
    A = FinAbFrob((), 1, IntMatrix.identity(1), 1, 7)
    f = q_factor(A, 7, 0)
    assert f == rf([1], [1, -1])


def test_q_factor_sign_shift():
    A = FinAbFrob((), 1, IntMatrix([[-1]]), 2, 5)
    f = q_factor(A, 5, 1)
    assert f == rf([1], [1, Fraction(1, 5)])


def test_q_factor_finite_module():
    A = FinAbFrob((4,), 0, IntMatrix([[1]]), 1, 3)
    assert q_factor(A, 3, 0) == RationalFunctionT.one()


def test_q_factor_swap():
    A = FinAbFrob((), 2, IntMatrix([[0, 1], [1, 0]]), 2, 3)
    f = q_factor(A, 3, 0)
    assert f == rf([1], [1, 0, -1])


# --------------------------------------------------------------------------
# local factors of torus data
# --------------------------------------------------------------------------

def good_place(G, q, frob=None):
    return PlaceCtx.good(str(q), q, G, frob if frob is not None else G.identity_index)


def test_local_factor_good_split_place():
    T = split_gm_data()
    f = local_factor_torus(T, good_place(T.group, 5))
    assert str(f) == "1 - 1/5*t"


def test_local_factor_blue_point():
    T = skyscraper_dual_data("3", 3)
    f = local_factor_torus(T, "3")
    assert str(f) == "1 - t"


def test_local_factor_tame_ramified_norm_one():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WildReductionWarning)
        T = norm_one_eisenstein()
        f = local_factor_torus(T, "3")
    assert f == RationalFunctionT.one()


def test_local_factor_inert_norm_one():
    T = norm_one_gaussian()
    # inert place: frobenius acts by the nontrivial element
    f = local_factor_torus(T, good_place(T.group, 3, frob=1))
    assert str(f) == "1 + 1/3*t"


def test_local_factor_split_place_norm_one():
    T = norm_one_gaussian()
    f = local_factor_torus(T, good_place(T.group, 5, frob=0))
    assert str(f) == "1 - 1/5*t"


def test_local_factor_wild_listed_place_is_one():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WildReductionWarning)
        T = norm_one_gaussian()
        f = local_factor_torus(T, "2")
    assert f == RationalFunctionT.one()


# --------------------------------------------------------------------------
# invariants and properties
# --------------------------------------------------------------------------

def test_multiplicativity_direct_sum():
    from ctori.constructible import direct_sum_torus
    T = norm_one_gaussian()
    Y2 = GLattice.trivial(Z2, 1)
    from ctori.constructible import CTorusData
    T2 = CTorusData(Z2, Y2, T.arch_places, ())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WildReductionWarning)
        S = direct_sum_torus(T, T2)
        for ctx in (good_place(Z2, 3, 1), good_place(Z2, 5, 0), "2"):
            fS = local_factor_torus(S, ctx)
            f1 = local_factor_torus(T, ctx)
            f2 = local_factor_torus(T2, ctx if not isinstance(ctx, str)
                                    else good_place(Z2, 2, 0))
            assert fS == f1 * f2


def test_conjugation_invariance():
    # replacing frobenius by a conjugate leaves the factor unchanged
    S3 = FiniteGroup.symmetric(3)
    from ctori.instances import permutation_lattice
    from ctori.constructible import CTorusData
    Y = permutation_lattice(S3)
    T = CTorusData(S3, Y, (), ())
    from ctori.groups import conjugacy_classes
    for cls in conjugacy_classes(S3):
        factors = {str(local_factor_torus(T, good_place(S3, 7, g))) for g in cls}
        assert len(factors) == 1


def test_good_reduction_inverse_artin_identity():
    # at every good place the factor equals the inverse Artin factor at s+1
    rng = random.Random(99)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WildReductionWarning)
        for _ in range(20):
            F = random_tf_sheaf_data(rng, max_places=0)
            from ctori.constructible import dualize_sheaf
            T = dualize_sheaf(F)
            G = T.group
            q = rng.choice([5, 7, 11, 13])
            g = rng.randrange(G.order)
            f = local_factor_torus(T, good_place(G, q, g))
            # inverse Artin factor at s+1: det(I - (t/q) rho(g) | Y)
            artin = det_one_minus_t_phi(T.characters.action[g], q, shift=1)
            assert f == RationalFunctionT(artin, PolyQ([1]), q)


def test_degree_bound():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WildReductionWarning)
        T = norm_one_gaussian()
        for ctx in (good_place(Z2, 3, 1), good_place(Z2, 5, 0), "2"):
            f = local_factor_torus(T, ctx)
            rank_y = T.characters.rank
            rank_e = max((e.fiber.free_rank for e in T.bad_places), default=0)
            assert f.degree_bound() <= 2 * rank_y + rank_e


# --------------------------------------------------------------------------
# local factors of K0 classes
# --------------------------------------------------------------------------

def test_k0_local_factor_matches_direct():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WildReductionWarning)
        T = norm_one_gaussian()
        K = k0_decompose(T)
        for ctx in (good_place(Z2, 3, 1), good_place(Z2, 5, 0)):
            direct = local_factor_torus(T, ctx)
            via_k0 = local_factor_torus(K, ctx)
            assert direct == via_k0


def test_k0_local_factor_split_gm():
    T = split_gm_data()
    K = k0_decompose(T)
    f = local_factor_torus(K, good_place(T.group, 5))
    assert str(f) == "1 - 1/5*t"


def test_k0_symbolic_exponent_flagged():
    # a class with coefficient 1/2 on a field term cannot clear at a place
    from ctori.constructible import K0Class
    G = FiniteGroup.trivial()
    K = K0Class(G, {(0,): Fraction(1, 2)}, ())
    f = local_factor_torus(K, good_place(G, 5))
    assert isinstance(f, SymbolicFactorProduct)
    assert f.non_polynomial
