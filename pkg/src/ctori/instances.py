"""Ready-made data instances: split tori, norm-one tori, skyscrapers, and
seeded random sheaf data for property suites."""

from __future__ import annotations

import random

from .constructible import (
    ArchPlaceData,
    BadPlaceData,
    CTorusData,
    SheafPlace,
    TfSheafData,
    TorusPlace,
)
from .groups import FiniteGroup, Subgroup, full_subgroup, trivial_subgroup
from .lattices import FinAbFrob, GLattice, IntMatrix, induce_module


def sign_lattice(G: FiniteGroup, kernel: Subgroup) -> GLattice:
    """Rank-1 lattice where elements of the kernel act by +1, others by -1."""
    mats = []
    kset = set(kernel.members)
    for i in range(G.order):
        mats.append(IntMatrix([[1 if i in kset else -1]]))
    return GLattice(G, 1, mats)


def split_gm_data() -> CTorusData:
    """The split one-dimensional torus over the full base: trivial group,
    trivial rank-1 character lattice, no listed places."""
    G = FiniteGroup.trivial()
    return CTorusData(G, GLattice.trivial(G, 1), arch_places=(
        ArchPlaceData("oo", "real", G.identity_index),))


def constant_sheaf_data() -> TfSheafData:
    """The constant sheaf Z over the full base (dual of split_gm_data)."""
    G = FiniteGroup.trivial()
    return TfSheafData(G, GLattice.trivial(G, 1), arch_places=(
        ArchPlaceData("oo", "real", G.identity_index),))


def quadratic_group() -> FiniteGroup:
    return FiniteGroup.cyclic(2)


def quadratic_bad_place(label: str, q: int, wild_depth: int | None = None) -> BadPlaceData:
    """A totally ramified place of a quadratic cover: D = I = Z/2.

    ``wild_depth`` d means the filtration is G_0 = ... = G_d = Z/2, then
    trivial (so the sign character has conductor exponent d+1); None means
    tame.
    """
    G = quadratic_group()
    D = full_subgroup(G)
    I = full_subgroup(G)
    filt = None
    if wild_depth is not None:
        filt = tuple([D] * (wild_depth + 1) + [trivial_subgroup(G)])
    return BadPlaceData(label, q, D, I, G.identity_index, filt)


def norm_one_data(label: str, q: int, wild_depth: int | None = None) -> CTorusData:
    """Norm-one torus of a ramified quadratic extension: sign characters,
    one listed place with zero fiber (the component group is pure torsion)."""
    G = quadratic_group()
    Y = sign_lattice(G, trivial_subgroup(G))
    v = quadratic_bad_place(label, q, wild_depth)
    entry = TorusPlace(v, FinAbFrob.zero(q), IntMatrix.zeros(0, 0))
    arch = (ArchPlaceData("oo", "real", 1),)
    return CTorusData(G, Y, arch, (entry,))


def norm_one_gaussian() -> CTorusData:
    """Norm-one torus data for the Gaussian quadratic field (listed place 2,
    wild with conductor exponent 2)."""
    return norm_one_data("2", 2, wild_depth=1)


def norm_one_eisenstein() -> CTorusData:
    """Norm-one torus data for the quadratic field of discriminant -3
    (listed place 3, tame)."""
    return norm_one_data("3", 3, wild_depth=None)


def skyscraper_dual_data(label: str, q: int) -> CTorusData:
    """Torus data with zero generic part and fiber Z at one place (the dual
    of a skyscraper sheaf)."""
    G = FiniteGroup.trivial()
    Y = GLattice.trivial(G, 0)
    v = BadPlaceData(label, q, full_subgroup(G), trivial_subgroup(G), G.identity_index)
    E = FinAbFrob((), 1, IntMatrix.identity(1), 1, q)
    entry = TorusPlace(v, E, IntMatrix.zeros(1, 0))
    return CTorusData(G, Y, (), (entry,))


def skyscraper_sheaf_data(label: str, q: int) -> TfSheafData:
    G = FiniteGroup.trivial()
    M = GLattice.trivial(G, 0)
    v = BadPlaceData(label, q, full_subgroup(G), trivial_subgroup(G), G.identity_index)
    fiber = FinAbFrob((), 1, IntMatrix.identity(1), 1, q)
    entry = SheafPlace(v, fiber, IntMatrix.zeros(0, 1))
    return TfSheafData(G, M, (), (entry,))


def pushforward_sheaf_gaussian() -> TfSheafData:
    """g_* of the sign lattice of the Gaussian field: fiber at 2 is the
    (zero) invariant lattice."""
    G = quadratic_group()
    M = sign_lattice(G, trivial_subgroup(G))
    v = quadratic_bad_place("2", 2, wild_depth=1)
    entry = SheafPlace(v, FinAbFrob.zero(2), IntMatrix.zeros(0, 0))
    arch = (ArchPlaceData("oo", "real", 1),)
    return TfSheafData(G, M, arch, (entry,))


# ---------------------------------------------------------------------------
# Seeded random instances for property suites
# ---------------------------------------------------------------------------

GROUP_POOL = ("1", "Z2", "Z3", "S3")


def _pool_group(name: str) -> FiniteGroup:
    if name == "1":
        return FiniteGroup.trivial()
    if name == "Z2":
        return FiniteGroup.cyclic(2)
    if name == "Z3":
        return FiniteGroup.cyclic(3)
    if name == "S3":
        return FiniteGroup.symmetric(3)
    raise ValueError(name)


def _random_unimodular(rng: random.Random, n: int, steps: int = 6) -> IntMatrix:
    if n == 0:
        return IntMatrix.zeros(0, 0)
    M = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        c = rng.choice((-2, -1, 1, 2))
        for k in range(n):
            M[i][k] += c * M[j][k]
    return IntMatrix(M)


def permutation_lattice(G: FiniteGroup) -> GLattice:
    """The degree-dimensional permutation module of the group itself."""
    mats = []
    for e in G.elements:
        M = [[0] * G.degree for _ in range(G.degree)]
        for j in range(G.degree):
            M[e[j]][j] = 1
        mats.append(IntMatrix(M))
    return GLattice(G, G.degree, mats, check=False)


def _random_glattice(rng: random.Random, G: FiniteGroup, max_rank: int = 4) -> GLattice:
    """A random integral representation: a sum of monomial building blocks
    conjugated by a random unimodular matrix."""
    blocks: list[GLattice] = []
    rank = 0
    options = ["trivial", "permutation"]
    if G.order <= max_rank:
        options.append("regular")
    if G.order == 2:
        options.append("sign")
    while rank < max_rank:
        kind = rng.choice(options)
        if kind == "trivial":
            blk = GLattice.trivial(G, 1)
        elif kind == "sign":
            blk = sign_lattice(G, trivial_subgroup(G))
        elif kind == "permutation":
            blk = permutation_lattice(G)
        else:
            blk = induce_module(trivial_subgroup(G), 1, lambda h: IntMatrix.identity(1), check=False)
        if rank + blk.rank > max_rank:
            if blocks:
                break
            blk = GLattice.trivial(G, 1)
        blocks.append(blk)
        rank += blk.rank
        if rng.random() < 0.35:
            break
    Y = blocks[0]
    for blk in blocks[1:]:
        Y = Y.direct_sum(blk)
    P = _random_unimodular(rng, Y.rank)
    Pinv = None
    from .lattices import inverse_unimodular
    Pinv = inverse_unimodular(P)
    action = [P * A * Pinv for A in Y.action]
    return GLattice(G, Y.rank, action, check=False)


def _random_finite_order_matrix(rng: random.Random, n: int) -> tuple[IntMatrix, int]:
    """A random finite-order integer matrix: a signed permutation conjugated
    by a random unimodular matrix; returns (matrix, exact order)."""
    perm = list(range(n))
    rng.shuffle(perm)
    signs = [rng.choice((1, -1)) for _ in range(n)]
    M = [[0] * n for _ in range(n)]
    for j in range(n):
        M[perm[j]][j] = signs[j]
    base = IntMatrix(M)
    P = _random_unimodular(rng, n)
    from .lattices import inverse_unimodular
    A = P * base * inverse_unimodular(P)
    order = 1
    X = A
    I = IntMatrix.identity(n)
    while X != I:
        X = X * A
        order += 1
        if order > 2 * n * n + 4:
            raise AssertionError("runaway order for a signed permutation")
    return A, order


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13)


def _random_bad_place(rng: random.Random, G: FiniteGroup, label: str,
                      used_q: set[int]) -> BadPlaceData | None:
    # choose D with cyclic D/I; enumerate candidate (D, I, frob) triples
    candidates = []
    subgroup_pool: list[Subgroup] = []
    seen_keys = set()
    for g in range(G.order):
        H = trivial_subgroup(G).generated_with([g])
        if H.members not in seen_keys:
            seen_keys.add(H.members)
            subgroup_pool.append(H)
    subgroup_pool.append(full_subgroup(G))
    for D in subgroup_pool:
        for I in subgroup_pool:
            if not I <= D or not I.is_normal_in(D):
                continue
            for f in D.members:
                if I.generated_with([f]).members == D.members:
                    candidates.append((D, I, f))
                    break
    D, I, f = rng.choice(candidates)
    qpool = [p for p in _SMALL_PRIMES if p not in used_q and I.order % p != 0]
    if not qpool:
        return None
    q = rng.choice(qpool)  # tame by construction: p does not divide |I|
    filt = None
    if I.order > 1 and rng.random() < 0.5:
        filt = (I, trivial_subgroup(G))
    return BadPlaceData(label, q, D, I, f, filt)


def random_tf_sheaf_data(rng: random.Random, group_name: str | None = None,
                         max_rank: int = 4, max_places: int = 3) -> TfSheafData:
    """A seeded-random torsion-free sheaf datum for property suites.

    Groups are drawn from {1, Z/2, Z/3, S3}, generic rank <= 4, at most 3
    listed places; fibers and specializations are random but exactly
    Frobenius-equivariant by averaging over the Frobenius orbit.
    """
    from .lattices import invariants

    name = group_name or rng.choice(GROUP_POOL)
    G = _pool_group(name)
    M = _random_glattice(rng, G, max_rank)
    places = []
    used_q: set[int] = set()
    for k in range(rng.randint(0, max_places)):
        v = _random_bad_place(rng, G, label=f"p{k}", used_q=used_q)
        if v is None:
            continue
        used_q.add(v.q)
        inv = invariants(M, v.inertia, frobenius=v.frobenius)
        fiber_rank = rng.randint(0, max(inv.rank, 1))
        phi, order = _random_finite_order_matrix(rng, fiber_rank)
        fiber = FinAbFrob((), fiber_rank, phi, order, v.q)
        raw = IntMatrix([[rng.randint(-2, 2) for _ in range(fiber_rank)]
                         for _ in range(inv.rank)]) if inv.rank else IntMatrix.zeros(0, fiber_rank)
        # average over the Frobenius orbit to force exact equivariance
        n_ord = order
        m_ord = G.element_order(v.frobenius)
        from math import lcm
        period = lcm(n_ord, m_ord)
        acc = IntMatrix.zeros(inv.rank, fiber_rank)
        left = inv.frob
        from .lattices import inverse_unimodular
        left_inv = inverse_unimodular(left) if inv.rank else left
        Lk = IntMatrix.identity(inv.rank)
        Rk = IntMatrix.identity(fiber_rank)
        for _ in range(period):
            acc = acc + Lk * raw * Rk
            Lk = left_inv * Lk
            Rk = phi * Rk
        places.append(SheafPlace(v, fiber, acc))
    arch = ()
    if rng.random() < 0.5:
        invol = [i for i in range(G.order) if G.mult(i, i) == G.identity_index]
        arch = (ArchPlaceData("oo", "real", rng.choice(invol)),)
    return TfSheafData(G, M, arch, places)
