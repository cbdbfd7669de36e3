"""Exact models of constructible tori over rings of integers and curves over
finite fields: duality, local L-factors, conductors, and special values at
s = 0 verified against independent analytic oracles."""

from .groups import (
    ClassFunction,
    FiniteGroup,
    Subgroup,
    artin_induction,
    conjugacy_classes,
    cyclic_subgroups,
    induced_trivial_character,
)
from .lattices import (
    FinAb,
    FinAbFrob,
    GLattice,
    IntMatrix,
    character_of,
    coinvariants,
    induce_module,
    invariants,
    smith_normal_form,
    z_dual,
)
from .constructible import (
    ArchPlaceData,
    BadPlaceData,
    CTorusData,
    K0Class,
    PlaceCtx,
    SheafPlace,
    TfSheafData,
    TorusPlace,
    TwoTermComplex,
    check_bidual,
    component_group,
    direct_sum_torus,
    dualize_sheaf,
    dualize_torus,
    good_reduction_locus,
    k0_decompose,
    k0_of,
    make_complex,
)
from .pushforward import CoverData, LowerPlaceEntry, UpperPlaceRef, pushforward_torus
from .local_factors import PolyQ, RationalFunctionT, local_factor_torus, q_factor
from .l_series import (
    AbelianOracle,
    FFCurveData,
    TableOracle,
    dirichlet_l_at_1,
    euler_product,
    ff_l_function,
)
from .conductors import GradedLine, artin_conductor, base_change_conductor, delta_add
from .arith_data import (
    DirichletCharacter,
    NumberFieldRecord,
    fetch_remote,
    load_fixture,
    residue_rho,
)
from .special_values import (
    SpecialValueReport,
    chi,
    chi_field_generator,
    chi_point,
    leading_coefficient,
    order_point,
    vanishing_order,
    verify_special_value,
)

__version__ = "0.1.0"
