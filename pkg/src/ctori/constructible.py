"""Torsion-free constructible sheaf/torus data, duality, pushforward and K0.

The data model is the trait-triple picture of étale sheaves on a Dedekind
base: a generic Galois lattice plus, at finitely many listed places, a
fiber lattice with Frobenius and a specialization (sheaf side) or
comparison (torus side) matrix.  Unlisted places are good by fiat and
materialized on demand from the generic data.

Frobenius convention: the ``frobenius`` element stored in place data is the
group element that acts as the *geometric* Frobenius on every module in
sight (characters, cocharacters, fibers).  Rational invariants cannot see
the arithmetic/geometric choice; integral component-group torsion can, so
the convention is fixed here once.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .groups import (
    FiniteGroup,
    Subgroup,
    artin_induction,
    canonical_subgroup_key,
    trivial_subgroup,
)
from .lattices import (
    FinAb,
    FinAbFrob,
    GLattice,
    IntMatrix,
    character_of,
    invariants,
    inverse_unimodular,
    z_dual,
)


class ValidationError(ValueError):
    pass


class WildReductionWarning(UserWarning):
    """The coinvariants model for the component group is unverified at wild
    places; emitted once per offending place."""


def _smallest_prime_factor(n: int) -> int:
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def is_prime_power(q: int) -> tuple[bool, int, int]:
    if q < 2:
        return False, 0, 0
    p = _smallest_prime_factor(q)
    k, v = 0, q
    while v % p == 0:
        v //= p
        k += 1
    return v == 1, p, k


# ---------------------------------------------------------------------------
# Place data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArchPlaceData:
    label: str
    kind: str  # "real" | "complex"
    conjugation: int  # group element index, identity when complex

    def validate(self, G: FiniteGroup):
        if self.kind not in ("real", "complex"):
            raise ValidationError(f"archimedean kind must be real or complex, got {self.kind!r}")
        c = self.conjugation
        if not 0 <= c < G.order:
            raise ValidationError("conjugation element out of range")
        if G.mult(c, c) != G.identity_index:
            raise ValidationError("conjugation must square to the identity")
        if self.kind == "complex" and c != G.identity_index:
            raise ValidationError("complex places carry the identity conjugation")


class BadPlaceData:
    """Local Galois data at a listed closed point.

    ``filtration`` is the lower-numbering ramification chain G_0 ⊇ G_1 ⊇ ...
    starting at the inertia subgroup and ending at the trivial subgroup;
    it may be omitted (None) at tame places, where G_1 = 1 is automatic.
    """

    def __init__(self, label: str, q: int, decomposition: Subgroup, inertia: Subgroup,
                 frobenius: int, filtration: Sequence[Subgroup] | None = None):
        self.label = str(label)
        ok, p, k = is_prime_power(q)
        if not ok:
            raise ValidationError(f"residue size {q} is not a prime power")
        self.q = int(q)
        self.residue_char = p
        self.decomposition = decomposition
        self.inertia = inertia
        self.frobenius = int(frobenius)
        self.filtration = tuple(filtration) if filtration is not None else None
        self._validate()

    def _validate(self):
        D, I = self.decomposition, self.inertia
        G = D.parent
        if not I <= D:
            raise ValidationError(f"place {self.label}: inertia must lie in the decomposition group")
        if not I.is_normal_in(D):
            raise ValidationError(f"place {self.label}: inertia must be normal in the decomposition group")
        if not D.contains(self.frobenius):
            raise ValidationError(f"place {self.label}: frobenius must lie in the decomposition group")
        gen = I.generated_with([self.frobenius])
        if gen.members != D.members:
            raise ValidationError(f"place {self.label}: frobenius and inertia must generate the decomposition group")
        if self.filtration is not None:
            if not self.filtration or self.filtration[0].members != I.members:
                raise ValidationError(f"place {self.label}: ramification filtration must start at inertia")
            for a, b in zip(self.filtration, self.filtration[1:]):
                if not b <= a:
                    raise ValidationError(f"place {self.label}: ramification filtration must be descending")
            if self.filtration[-1].order != 1:
                raise ValidationError(f"place {self.label}: ramification filtration must end at the trivial group")

    @property
    def group(self) -> FiniteGroup:
        return self.decomposition.parent

    def is_wild(self) -> bool:
        return self.inertia.order % self.residue_char == 0

    def __eq__(self, other):
        return isinstance(other, BadPlaceData) and (
            self.label, self.q, self.decomposition.members, self.inertia.members,
            self.frobenius, tuple(f.members for f in self.filtration) if self.filtration else None,
        ) == (
            other.label, other.q, other.decomposition.members, other.inertia.members,
            other.frobenius, tuple(f.members for f in other.filtration) if other.filtration else None,
        )

    def __repr__(self):
        return f"BadPlaceData({self.label!r}, q={self.q})"


@dataclass
class PlaceCtx:
    """Resolved local context of a place, listed or oracle-supplied."""

    label: str
    q: int
    inertia: Subgroup
    frobenius: int
    decomposition: Subgroup | None = None
    filtration: tuple[Subgroup, ...] | None = None
    fiber: FinAbFrob | None = None  # listed torus fiber, None at good places

    def decomposition_subgroup(self) -> Subgroup:
        if self.decomposition is not None:
            return self.decomposition
        return self.inertia.generated_with([self.frobenius])

    @staticmethod
    def from_bad_place(place: BadPlaceData, fiber: FinAbFrob | None) -> "PlaceCtx":
        return PlaceCtx(place.label, place.q, place.inertia, place.frobenius,
                        place.decomposition, place.filtration, fiber)

    @staticmethod
    def good(label: str, q: int, group: FiniteGroup, frobenius: int) -> "PlaceCtx":
        return PlaceCtx(str(label), q, trivial_subgroup(group), frobenius)


def place_double_cosets(D: Subgroup, I: Subgroup, H: Subgroup) -> list[tuple[int, int, int]]:
    """Upper places over a lower place, as (representative g, e, f).

    Double cosets D g H correspond to the places of the fixed field of H
    over the place with decomposition D and inertia I; e = [I : I ∩ gHg^-1]
    and f = [D : D ∩ gHg^-1] / e.  Deterministic order by minimal member.
    """
    G = D.parent
    if H.parent != G or I.parent != G:
        raise ValidationError("subgroups must share the parent group")
    seen: set[int] = set()
    out = []
    hset = set(H.members)
    for g in range(G.order):
        if g in seen:
            continue
        coset = set()
        for d in D.members:
            dg = G.mult(d, g)
            for h in H.members:
                coset.add(G.mult(dg, h))
        seen |= coset
        ginv = G.inv(g)
        conj = {G.mult(G.mult(g, h), ginv) for h in H.members}
        d_cap = len(set(D.members) & conj)
        i_cap = len(set(I.members) & conj)
        e = I.order // i_cap
        ef = D.order // d_cap
        if ef % e:
            raise ValidationError("inconsistent decomposition/inertia data")
        out.append((min(coset), e, ef // e))
    out.sort(key=lambda t: t[0])
    if sum(e * f for _, e, f in out) * H.order != G.order:
        raise ValidationError("double coset bookkeeping failed: sum of e*f != [G:H]")
    return out


# ---------------------------------------------------------------------------
# Component groups
# ---------------------------------------------------------------------------

class ComponentGroup:
    """Inertia coinvariants of the cocharacter lattice, with bases exposed.

    ``finab`` is the quotient in canonical Smith coordinates;
    ``free_projection``/``free_section`` mediate between ambient cocharacter
    coordinates and the free part, and ``pairing`` is the unimodular matrix
    of the canonical isomorphism (free part) -> dual of the invariant
    lattice of the character module.
    """

    def __init__(self, Y: GLattice, place: Union[BadPlaceData, PlaceCtx]):
        G = Y.group
        I = place.inertia
        frob = place.frobenius
        q = place.q
        Yd = z_dual(Y)
        from .lattices import generating_set

        gens = generating_set(I)
        n = Y.rank
        stacked = IntMatrix.zeros(n, 0)
        for h in gens:
            stacked = stacked.hstack(Yd.action[h] - IntMatrix.identity(n))
        grp = FinAb(n, stacked)
        frob_mat = Yd.action[frob]
        order = G.element_order(frob)
        red = grp.reduction_map()
        sec = grp.reduction_section()
        self.module = FinAbFrob(grp.invariant_factors, grp.rank, red * frob_mat * sec, order, q)
        self.free_projection = grp.free_projection()  # rank x n
        self.free_section = grp.free_section()        # n x rank
        self.ambient_rank = n
        # canonical pairing with the invariants of the character lattice
        inv = invariants(Y, I)
        self.invariant_basis = inv.basis              # n x rank
        self.pairing = inv.basis.transpose() * self.free_section  # rank x rank
        if self.pairing.rows and abs(self.pairing.det()) != 1:
            raise ValidationError("component-group pairing failed to be unimodular")
        if isinstance(place, BadPlaceData) and place.is_wild():
            warnings.warn(
                f"place {place.label}: wild inertia; the coinvariants model for the "
                "component group is a modeling assumption here",
                WildReductionWarning, stacklevel=2)

    @property
    def free_rank(self) -> int:
        return self.module.free_rank

    @property
    def torsion(self) -> tuple[int, ...]:
        return self.module.torsion


def component_group(Y: GLattice, v: Union[BadPlaceData, PlaceCtx]) -> FinAbFrob:
    """π0 model at v: inertia coinvariants of the cocharacter lattice, with
    the Frobenius induced by v's frobenius element."""
    return ComponentGroup(Y, v).module


# ---------------------------------------------------------------------------
# Sheaf and torus data
# ---------------------------------------------------------------------------

@dataclass
class SheafPlace:
    place: BadPlaceData
    fiber: FinAbFrob            # torsion-free: fiber lattice with Frobenius
    specialization: IntMatrix   # fiber -> invariants(generic, inertia), in basis coords


@dataclass
class TorusPlace:
    place: BadPlaceData
    fiber: FinAbFrob            # E_v: torsion-free lattice with Frobenius
    comparison: IntMatrix       # component_group free part -> E_v


class TfSheafData:
    """A torsion-free Z-constructible sheaf: generic lattice + listed fibers."""

    kind = "sheaf"

    def __init__(self, group: FiniteGroup, generic: GLattice,
                 arch_places: Sequence[ArchPlaceData] = (),
                 bad_places: Sequence[SheafPlace] = (), check: bool = True):
        self.group = group
        self.generic = generic
        self.arch_places = tuple(arch_places)
        self.bad_places = tuple(sorted(bad_places, key=lambda e: (e.place.q, e.place.label)))
        if check:
            self.validate()

    def validate(self) -> list[str]:
        if self.generic.group != self.group:
            raise ValidationError("generic lattice must carry the ambient group action")
        for a in self.arch_places:
            a.validate(self.group)
        seen = set()
        notes = []
        for entry in self.bad_places:
            v, Mv, S = entry.place, entry.fiber, entry.specialization
            if v.label in seen:
                raise ValidationError(f"duplicate listed place {v.label}")
            seen.add(v.label)
            if v.group != self.group:
                raise ValidationError(f"place {v.label}: subgroups belong to a different group")
            if Mv.torsion:
                raise ValidationError(f"place {v.label}: fibers must be torsion-free")
            inv = invariants(self.generic, v.inertia, frobenius=v.frobenius)
            if S.rows != inv.rank or S.cols != Mv.free_rank:
                raise ValidationError(
                    f"place {v.label}: specialization must be {inv.rank}x{Mv.free_rank}, "
                    f"got {S.rows}x{S.cols}")
            if inv.frob * S != S * Mv.rational_frobenius():
                raise ValidationError(f"place {v.label}: specialization is not Frobenius-equivariant")
            if Mv.free_rank > inv.rank:
                notes.append(f"place {v.label}: fiber rank exceeds the invariant rank "
                             "(skyscraper-type datum)")
        return notes

    def __eq__(self, other):
        return isinstance(other, TfSheafData) and self.group == other.group \
            and self.generic == other.generic and self.arch_places == other.arch_places \
            and len(self.bad_places) == len(other.bad_places) \
            and all(a.place == b.place and a.fiber == b.fiber and a.specialization == b.specialization
                    for a, b in zip(self.bad_places, other.bad_places))

    def __repr__(self):
        return f"TfSheafData(rank={self.generic.rank}, places={[e.place.label for e in self.bad_places]})"


class CTorusData:
    """A torsion-free constructible torus: characters + listed E-fibers."""

    kind = "torus"

    def __init__(self, group: FiniteGroup, characters: GLattice,
                 arch_places: Sequence[ArchPlaceData] = (),
                 bad_places: Sequence[TorusPlace] = (), check: bool = True):
        self.group = group
        self.characters = characters
        self.arch_places = tuple(arch_places)
        self.bad_places = tuple(sorted(bad_places, key=lambda e: (e.place.q, e.place.label)))
        if check:
            self.validate()

    def validate(self) -> list[str]:
        if self.characters.group != self.group:
            raise ValidationError("character lattice must carry the ambient group action")
        for a in self.arch_places:
            a.validate(self.group)
        seen = set()
        notes = []
        for entry in self.bad_places:
            v, E, C = entry.place, entry.fiber, entry.comparison
            if v.label in seen:
                raise ValidationError(f"duplicate listed place {v.label}")
            seen.add(v.label)
            if v.group != self.group:
                raise ValidationError(f"place {v.label}: subgroups belong to a different group")
            if E.torsion:
                raise ValidationError(f"place {v.label}: fibers must be torsion-free")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", WildReductionWarning)
                cg = ComponentGroup(self.characters, v)
            if C.rows != E.free_rank or C.cols != cg.free_rank:
                raise ValidationError(
                    f"place {v.label}: comparison must be {E.free_rank}x{cg.free_rank}, "
                    f"got {C.rows}x{C.cols}")
            if E.rational_frobenius() * C != C * cg.module.rational_frobenius():
                raise ValidationError(f"place {v.label}: comparison is not Frobenius-equivariant")
        return notes

    def listed(self, label: str) -> TorusPlace | None:
        for entry in self.bad_places:
            if entry.place.label == str(label):
                return entry
        return None

    def resolve_place(self, x, oracle=None) -> PlaceCtx:
        """Resolve a place given by label or PlaceCtx against the listing."""
        if isinstance(x, PlaceCtx):
            hit = self.listed(x.label)
            if hit is not None:
                return PlaceCtx.from_bad_place(hit.place, hit.fiber)
            return x
        entry = self.listed(str(x))
        if entry is not None:
            return PlaceCtx.from_bad_place(entry.place, entry.fiber)
        if oracle is not None:
            return oracle.place_ctx(str(x), self.group)
        raise ValidationError(f"place {x!r} is not listed and no oracle was supplied")

    def component_model(self, ctx: PlaceCtx) -> FinAbFrob:
        return component_group(self.characters, ctx)

    def __eq__(self, other):
        return isinstance(other, CTorusData) and self.group == other.group \
            and self.characters == other.characters and self.arch_places == other.arch_places \
            and len(self.bad_places) == len(other.bad_places) \
            and all(a.place == b.place and a.fiber == b.fiber and a.comparison == b.comparison
                    for a, b in zip(self.bad_places, other.bad_places))

    def __repr__(self):
        return f"CTorusData(rank={self.characters.rank}, places={[e.place.label for e in self.bad_places]})"


def _dual_fiber_frobenius(M: FinAbFrob) -> IntMatrix:
    """Geometric Frobenius on the Z-dual of a free fiber: inverse transpose."""
    phi = M.rational_frobenius()
    if phi.rows == 0:
        return phi
    return inverse_unimodular(phi).transpose()


def dualize_sheaf(F: TfSheafData) -> CTorusData:
    """The constructible torus dual to a torsion-free sheaf.

    The character lattice is the generic lattice itself; at each listed
    place the fiber is the Z-dual of the sheaf fiber and the comparison is
    the dual of the specialization transported through the canonical
    pairing between cocharacter coinvariants and invariant-lattice duals.
    """
    F.validate()
    places = []
    for entry in F.bad_places:
        v, Mv, S = entry.place, entry.fiber, entry.specialization
        phi_E = _dual_fiber_frobenius(Mv)
        E = FinAbFrob((), Mv.free_rank, phi_E, Mv.order, v.q)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WildReductionWarning)
            cg = ComponentGroup(F.generic, v)
        C = S.transpose() * cg.pairing
        places.append(TorusPlace(v, E, C))
    return CTorusData(F.group, F.generic, F.arch_places, places)


def dualize_torus(T: CTorusData) -> TfSheafData:
    """The torsion-free sheaf dual to a constructible torus (inverse of
    dualize_sheaf on canonical-basis data)."""
    T.validate()
    places = []
    for entry in T.bad_places:
        v, E, C = entry.place, entry.fiber, entry.comparison
        phi_M = _dual_fiber_frobenius(E)
        Mv = FinAbFrob((), E.free_rank, phi_M, E.order, v.q)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WildReductionWarning)
            cg = ComponentGroup(T.characters, v)
        Pinv = inverse_unimodular(cg.pairing) if cg.pairing.rows else cg.pairing
        S = (C * Pinv).transpose()
        places.append(SheafPlace(v, Mv, S))
    return TfSheafData(T.group, T.characters, T.arch_places, places)


@dataclass
class BidualReport:
    ok: bool
    mismatches: tuple[tuple[str, str], ...]  # (place label or "generic", field)

    def __bool__(self):
        return self.ok


def check_bidual(F: Union[TfSheafData, CTorusData]) -> BidualReport:
    """Compute the double dual componentwise and compare bit-exactly.

    The duality operations are involutive matrix transforms in canonical
    bases, so the bidual must equal the input entrywise; any mismatch is
    pinpointed by place and field.
    """
    if isinstance(F, TfSheafData):
        FDD = dualize_torus(dualize_sheaf(F))
    else:
        FDD = dualize_sheaf(dualize_torus(F))
    mism: list[tuple[str, str]] = []
    if FDD.group != F.group:
        mism.append(("generic", "group"))
    gen1 = F.generic if isinstance(F, TfSheafData) else F.characters
    gen2 = FDD.generic if isinstance(FDD, TfSheafData) else FDD.characters
    if gen1 != gen2:
        mism.append(("generic", "lattice"))
    if F.arch_places != FDD.arch_places:
        mism.append(("generic", "arch_places"))
    for a, b in zip(F.bad_places, FDD.bad_places):
        if a.place != b.place:
            mism.append((a.place.label, "place"))
        if a.fiber != b.fiber:
            mism.append((a.place.label, "fiber"))
        m1 = a.specialization if isinstance(a, SheafPlace) else a.comparison
        m2 = b.specialization if isinstance(b, SheafPlace) else b.comparison
        if m1 != m2:
            mism.append((a.place.label, "matrix"))
    if len(F.bad_places) != len(FDD.bad_places):
        mism.append(("generic", "place count"))
    return BidualReport(not mism, tuple(mism))


def good_reduction_locus(T: CTorusData) -> dict[str, bool]:
    """Flag each listed place good/bad.

    A listed place is good iff inertia acts trivially on the characters,
    the component group has no torsion, and the comparison is unimodular.
    """
    out = {}
    for entry in T.bad_places:
        v, E, C = entry.place, entry.fiber, entry.comparison
        I = v.inertia
        acts_trivially = all(T.characters.action[h].is_identity() for h in I.members)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WildReductionWarning)
            cg = ComponentGroup(T.characters, v)
        iso = (not cg.torsion) and C.rows == C.cols and C.rows == cg.free_rank \
            and (C.rows == 0 or C.det() in (1, -1))
        out[v.label] = bool(acts_trivially and iso)
    return out


# ---------------------------------------------------------------------------
# Direct sums
# ---------------------------------------------------------------------------

def _good_torus_fiber(Y: GLattice, v: BadPlaceData) -> tuple[FinAbFrob, IntMatrix]:
    """Good-model fiber at a place where inertia acts trivially on Y."""
    I = v.inertia
    if not all(Y.action[h].is_identity() for h in I.members):
        raise ValidationError(
            f"place {v.label}: inertia acts nontrivially; the summand must list this place")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WildReductionWarning)
        cg = ComponentGroup(Y, v)
    if cg.torsion:
        raise ValidationError(f"place {v.label}: unexpected component torsion at a good place")
    E = cg.module
    C = IntMatrix.identity(cg.free_rank)
    return E, C


def direct_sum_torus(T1: CTorusData, T2: CTorusData) -> CTorusData:
    """Direct sum of constructible torus data over a common group.

    Places listed in one summand only are completed with the other
    summand's good-model fiber; shared listed places must agree on their
    local Galois data.
    """
    if T1.group != T2.group:
        raise ValidationError("direct sum needs a common group")
    if T1.arch_places != T2.arch_places:
        raise ValidationError("direct sum needs identical archimedean data")
    Y = T1.characters.direct_sum(T2.characters)
    labels: list[str] = []
    for entry in list(T1.bad_places) + list(T2.bad_places):
        if entry.place.label not in labels:
            labels.append(entry.place.label)
    places = []
    for label in labels:
        e1, e2 = T1.listed(label), T2.listed(label)
        v = (e1 or e2).place
        if e1 and e2 and e1.place != e2.place:
            raise ValidationError(f"place {label}: summands disagree on local Galois data")
        E1, C1 = (e1.fiber, e1.comparison) if e1 else _good_torus_fiber(T1.characters, v)
        E2, C2 = (e2.fiber, e2.comparison) if e2 else _good_torus_fiber(T2.characters, v)
        phi = IntMatrix.block_diag([E1.rational_frobenius(), E2.rational_frobenius()])
        order = 1
        # lcm of the two declared orders
        from math import gcd as _gcd
        order = E1.order * E2.order // _gcd(E1.order, E2.order)
        E = FinAbFrob((), E1.free_rank + E2.free_rank, phi, order, v.q)
        # transition from the canonical free basis of pi0(Y1+Y2) to the
        # block basis pi0(Y1) + pi0(Y2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WildReductionWarning)
            cg = ComponentGroup(Y, v)
            cg1 = ComponentGroup(T1.characters, v)
            cg2 = ComponentGroup(T2.characters, v)
        n1 = T1.characters.rank
        sec = cg.free_section  # (n1+n2) x rho
        top = sec.submatrix(range(n1), range(sec.cols))
        bot = sec.submatrix(range(n1, sec.rows), range(sec.cols))
        trans = (cg1.free_projection * top).vstack(cg2.free_projection * bot)
        C = IntMatrix.block_diag([C1, C2]) * trans
        places.append(TorusPlace(v, E, C))
    return CTorusData(T1.group, Y, T1.arch_places, places)


# ---------------------------------------------------------------------------
# Two-term complexes (constructible tori with torsion)
# ---------------------------------------------------------------------------

class TwoTermComplex:
    """A two-term complex of torsion-free constructible torus data.

    ``char_map`` is the character-lattice matrix of the torus morphism
    source -> target (so it maps target characters into source characters
    and must be injective after tensoring with Q); ``fiber_maps`` maps each
    shared listed label to the matrix E_source -> E_target, required to
    have full rank onto the target fiber (finite cokernel).
    """

    def __init__(self, source: CTorusData, target: CTorusData,
                 char_map: IntMatrix, fiber_maps: dict[str, IntMatrix]):
        if source.group != target.group:
            raise ValidationError("complex terms must share the group")
        self.source = source
        self.target = target
        self.char_map = char_map
        self.fiber_maps = dict(fiber_maps)
        self._validate()

    def _validate(self):
        A = self.char_map
        Ys, Yt = self.source.characters, self.target.characters
        if A.rows != Ys.rank or A.cols != Yt.rank:
            raise ValidationError("character map has the wrong shape")
        for g in range(self.source.group.order):
            if Ys.action[g] * A != A * Yt.action[g]:
                raise ValidationError("character map is not equivariant")
        from .lattices import smith_normal_form, diagonal_of
        _, D, _ = smith_normal_form(A)
        if len([d for d in diagonal_of(D) if d != 0]) != Yt.rank:
            raise ValidationError("not a constructible torus: generic map fails to be "
                                  "surjective after tensoring with Q")
        labels_s = {e.place.label for e in self.source.bad_places}
        labels_t = {e.place.label for e in self.target.bad_places}
        if labels_s != labels_t or set(self.fiber_maps) != labels_s:
            raise ValidationError("complex terms must list the same places, with one fiber map each")
        for label, M in self.fiber_maps.items():
            es, et = self.source.listed(label), self.target.listed(label)
            if M.rows != et.fiber.free_rank or M.cols != es.fiber.free_rank:
                raise ValidationError(f"fiber map at {label} has the wrong shape")
            if et.fiber.rational_frobenius() * M != M * es.fiber.rational_frobenius():
                raise ValidationError(f"fiber map at {label} is not Frobenius-equivariant")
            _, D, _ = smith_normal_form(M)
            if len([d for d in diagonal_of(D) if d != 0]) != et.fiber.free_rank:
                raise ValidationError(f"not a constructible torus: fiber map at {label} "
                                      "does not have finite cokernel")

    def is_exact(self) -> bool:
        """Exactness at the data level: generic and fiber maps all unimodular."""
        A = self.char_map
        if A.rows != A.cols or A.det() not in (1, -1):
            return False
        for M in self.fiber_maps.values():
            if M.rows != M.cols or M.det() not in (1, -1):
                return False
        return True

    def dual(self) -> "DualComplexView":
        return DualComplexView(self)


class DualComplexView:
    """The sheaf-side dual of a two-term complex (maps transposed)."""

    def __init__(self, cx: TwoTermComplex):
        self.source = dualize_torus(cx.target)
        self.target = dualize_torus(cx.source)
        self.generic_map = cx.char_map.transpose()
        self.fiber_maps = {label: M.transpose() for label, M in cx.fiber_maps.items()}

    def is_exact(self) -> bool:
        A = self.generic_map
        if A.rows != A.cols or A.det() not in (1, -1):
            return False
        for M in self.fiber_maps.values():
            if M.rows != M.cols or M.det() not in (1, -1):
                return False
        return True


def make_complex(source: CTorusData, target: CTorusData, char_map: IntMatrix,
                 fiber_maps: dict[str, IntMatrix]) -> TwoTermComplex:
    """Validated two-term complex [source -> target]; raises naming the
    failing condition when the data is not a constructible torus."""
    return TwoTermComplex(source, target, char_map, fiber_maps)


# ---------------------------------------------------------------------------
# K0 classes and the generator decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointTerm:
    lower_label: str
    q: int
    module: FinAbFrob
    coeff: Fraction


class K0Class:
    """A formal rational combination of field and point generators.

    Field terms are keyed by the canonical representative tuple of a
    subgroup conjugacy class H (the generator is the split torus over the
    fixed field of H); point terms carry a finite-order Frobenius module at
    a place.  Point terms are merged only when syntactically identical in
    canonical coordinates; downstream invariants are iso-invariant
    homomorphisms, so unmerged isomorphic terms are harmless.
    """

    def __init__(self, group: FiniteGroup,
                 field_terms: dict[tuple[int, ...], Fraction] | None = None,
                 point_terms: Iterable[PointTerm] = ()):
        self.group = group
        self.field_terms: dict[tuple[int, ...], Fraction] = {}
        for key, c in (field_terms or {}).items():
            c = Fraction(c)
            if c:
                self.field_terms[tuple(key)] = self.field_terms.get(tuple(key), Fraction(0)) + c
        self.field_terms = {k: v for k, v in sorted(self.field_terms.items()) if v != 0}
        merged: dict[tuple, tuple[PointTerm, Fraction]] = {}
        for pt in point_terms:
            if pt.module.free_rank == 0 and not pt.module.torsion:
                continue
            key = (pt.lower_label, pt.q, pt.module.torsion, pt.module.free_rank,
                   pt.module.frob.entries)
            if key in merged:
                old, acc = merged[key]
                merged[key] = (old, acc + pt.coeff)
            else:
                merged[key] = (pt, Fraction(pt.coeff))
        kept = []
        for key in sorted(merged, key=lambda k: (merged[k][0].q, merged[k][0].lower_label, k)):
            pt, acc = merged[key]
            if acc != 0:
                kept.append(PointTerm(pt.lower_label, pt.q, pt.module, acc))
        self.point_terms: tuple[PointTerm, ...] = tuple(kept)

    def __add__(self, other: "K0Class") -> "K0Class":
        if self.group != other.group:
            raise ValidationError("K0 classes live over different groups")
        ft = dict(self.field_terms)
        for k, v in other.field_terms.items():
            ft[k] = ft.get(k, Fraction(0)) + v
        return K0Class(self.group, ft, self.point_terms + other.point_terms)

    def __neg__(self) -> "K0Class":
        return self.scale(-1)

    def __sub__(self, other: "K0Class") -> "K0Class":
        return self + (-other)

    def scale(self, c) -> "K0Class":
        c = Fraction(c)
        ft = {k: c * v for k, v in self.field_terms.items()}
        pts = [PointTerm(p.lower_label, p.q, p.module, c * p.coeff) for p in self.point_terms]
        return K0Class(self.group, ft, pts)

    def is_zero(self) -> bool:
        return not self.field_terms and not self.point_terms

    def __repr__(self):
        fs = ", ".join(f"H{list(k)}: {v}" for k, v in self.field_terms.items())
        ps = ", ".join(f"({p.lower_label}, q={p.q}, rank={p.module.free_rank}): {p.coeff}"
                       for p in self.point_terms)
        return f"K0Class(fields=[{fs}], points=[{ps}])"


def _trivial_rank1_module(q: int) -> FinAbFrob:
    return FinAbFrob((), 1, IntMatrix.identity(1), 1, q)


def k0_decompose(obj: Union[CTorusData, TwoTermComplex, K0Class]) -> K0Class:
    """Decompose into field and point generator classes with exact rational
    coefficients.

    The listed-fiber point classes split off first; the generic part is
    resolved by Artin induction of the character of the character lattice,
    each induced piece opening up into a field generator minus the point
    classes of the upper places over the listed bad places (with trivial
    Frobenius at the upper residue sizes).
    """
    if isinstance(obj, K0Class):
        return obj
    if isinstance(obj, TwoTermComplex):
        return k0_decompose(obj.target) - k0_decompose(obj.source)
    T = obj
    G = T.group
    points: list[PointTerm] = []
    for entry in T.bad_places:
        if entry.fiber.free_rank:
            mod = FinAbFrob((), entry.fiber.free_rank, entry.fiber.frob,
                            entry.fiber.order, entry.place.q)
            points.append(PointTerm(entry.place.label, entry.place.q, mod, Fraction(1)))
    chi = character_of(T.characters)
    coeffs = artin_induction(chi)
    field_terms: dict[tuple[int, ...], Fraction] = {}
    for key, a in sorted(coeffs.items()):
        if a == 0:
            continue
        H = Subgroup(G, key, check=False)
        ckey = canonical_subgroup_key(H)
        field_terms[ckey] = field_terms.get(ckey, Fraction(0)) + a
        for entry in T.bad_places:
            v = entry.place
            for g, e, f in place_double_cosets(v.decomposition, v.inertia, H):
                points.append(PointTerm(v.label, v.q ** f, _trivial_rank1_module(v.q ** f), -a))
    return K0Class(G, field_terms, points)


def k0_of(obj) -> K0Class:
    return k0_decompose(obj)
