"""Finite-dominant pushforward of constructible data along a cover.

The cover is described by the subgroup H of the ambient group fixing the
upper field, an identification of the upper data's abstract group with H,
and a user-supplied place-mapping table (lower place data plus the upper
places over it with their e, f).  The pushforward is computed on the sheaf
side, where the stalks are explicit: the lower stalk at v is the direct sum
over upper places of the induced Frobenius module of rank f * rank(fiber)
with block-cycle Frobenius, and the specialization spreads the upper
specializations over the inertia orbits of cosets.  Torus data is
transported through the duality functors, which keeps comparison matrices
canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .constructible import (
    ArchPlaceData,
    BadPlaceData,
    CTorusData,
    SheafPlace,
    TfSheafData,
    ValidationError,
    dualize_sheaf,
    dualize_torus,
)
from .groups import FiniteGroup, Subgroup, left_cosets
from .lattices import (
    FinAbFrob,
    IntMatrix,
    induce_from_subgroup_lattice,
    integer_solve,
    invariants,
)


@dataclass(frozen=True)
class UpperPlaceRef:
    label: str
    e: int
    f: int


@dataclass
class LowerPlaceEntry:
    lower: BadPlaceData
    uppers: tuple[UpperPlaceRef, ...]


class CoverData:
    """A finite cover: subgroup, upper-group identification, place mapping."""

    def __init__(self, group: FiniteGroup, subgroup: Subgroup, upper_group: FiniteGroup,
                 embed: Sequence[int], place_map: Sequence[LowerPlaceEntry] = (),
                 lower_arch: Sequence[ArchPlaceData] = ()):
        self.group = group
        self.subgroup = subgroup
        self.upper_group = upper_group
        self.embed = tuple(int(i) for i in embed)
        self.place_map = tuple(place_map)
        self.lower_arch = tuple(lower_arch)
        self._validate()
        self._back = {self.embed[i]: i for i in range(upper_group.order)}

    def _validate(self):
        G, H, U = self.group, self.subgroup, self.upper_group
        if len(self.embed) != U.order or sorted(self.embed) != sorted(H.members):
            raise ValidationError("embedding must identify the upper group with the subgroup")
        for i in range(U.order):
            for j in range(U.order):
                if self.embed[U.mult(i, j)] != G.mult(self.embed[i], self.embed[j]):
                    raise ValidationError("embedding is not a group homomorphism")
        for entry in self.place_map:
            v = entry.lower
            if v.group != G:
                raise ValidationError(f"place {v.label}: lower data lives over the wrong group")
            total = sum(u.e * u.f for u in entry.uppers)
            if total * H.order != G.order:
                raise ValidationError(
                    f"place {v.label}: place-mapping inconsistent with subgroup indices "
                    f"(sum of e*f = {total}, [G:H] = {G.order // H.order})")
            labels = [u.label for u in entry.uppers]
            if len(set(labels)) != len(labels):
                raise ValidationError(f"place {v.label}: duplicate upper labels")

    @property
    def index(self) -> int:
        return self.group.order // self.subgroup.order

    def to_upper(self, g: int) -> int:
        try:
            return self._back[g]
        except KeyError:
            raise ValidationError("element does not lie in the covering subgroup") from None

    @staticmethod
    def trivial(group: FiniteGroup) -> "CoverData":
        from .groups import full_subgroup
        H = full_subgroup(group)
        return CoverData(group, H, group, tuple(range(group.order)))


class _CycleData:
    """An upper place over a lower place: a Frobenius cycle of inertia orbits."""

    __slots__ = ("orbits", "e", "f", "rep_cosets", "edges")

    def __init__(self, orbits, e, f, rep_cosets, edges):
        self.orbits = orbits          # list of orbit index lists (cosets)
        self.e = e
        self.f = f
        self.rep_cosets = rep_cosets  # c_j per step
        self.edges = edges            # g_j in H (lower indexing) per step


def _coset_geometry(cover: CoverData, v: BadPlaceData):
    """Inertia orbits of cosets and their Frobenius cycles at a lower place."""
    G, H = cover.group, cover.subgroup
    cosets = left_cosets(G, H)
    coset_of = {}
    for ci, coset in enumerate(cosets):
        for g in coset:
            coset_of[g] = ci
    transversal = [c[0] for c in cosets]

    def act(g: int, ci: int) -> int:
        return coset_of[G.mult(g, transversal[ci])]

    # inertia orbits
    orbit_of = {}
    orbits = []
    for ci in range(len(cosets)):
        if ci in orbit_of:
            continue
        orbit = {ci}
        frontier = [ci]
        while frontier:
            nxt = []
            for c in frontier:
                for i in v.inertia.members:
                    c2 = act(i, c)
                    if c2 not in orbit:
                        orbit.add(c2)
                        nxt.append(c2)
            frontier = nxt
        idx = len(orbits)
        orbits.append(sorted(orbit))
        for c in orbit:
            orbit_of[c] = idx
    # Frobenius permutation of orbits
    w0 = v.frobenius
    sigma = [orbit_of[act(w0, orb[0])] for orb in orbits]
    cycles = []
    seen = set()
    for start in range(len(orbits)):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        nxt = sigma[start]
        while nxt != start:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = sigma[nxt]
        rep_cosets = [orbits[x][0] for x in cyc]
        edges = []
        for j, x in enumerate(cyc):
            cj = rep_cosets[j]
            cnext = rep_cosets[(j + 1) % len(cyc)]
            target = act(w0, cj)
            iota = next(i for i in v.inertia.members if act(i, target) == cnext)
            a = G.mult(iota, w0)
            gj = G.mult(G.mult(G.inv(transversal[cnext]), a), transversal[cj])
            edges.append(gj)
        cycles.append(_CycleData([orbits[x] for x in cyc], len(orbits[cyc[0]]),
                                 len(cyc), rep_cosets, edges))
    cycles.sort(key=lambda c: c.rep_cosets[0])
    return cosets, transversal, coset_of, act, cycles


def _matrix_order(M: IntMatrix, bound: int) -> int:
    I = IntMatrix.identity(M.rows)
    X = M
    for k in range(1, bound + 1):
        if X == I:
            return k
        X = M * X
    raise ValidationError("fiber Frobenius order exceeded its bound")


def pushforward_sheaf(cover: CoverData, F: TfSheafData) -> TfSheafData:
    """Pushforward of torsion-free sheaf data along the cover."""
    G, H, U = cover.group, cover.subgroup, cover.upper_group
    if F.group != U:
        raise ValidationError("sheaf data does not live over the cover's upper group")
    M_low = induce_from_subgroup_lattice(H, F.generic, cover.embed, check=False)

    upper_listed = {e.place.label: e for e in F.bad_places}
    consumed: set[str] = set()
    lower_places = []
    for entry in cover.place_map:
        v = entry.lower
        cosets, transversal, coset_of, act, cycles = _coset_geometry(cover, v)
        declared = list(entry.uppers)
        computed_ef = sorted((c.e, c.f) for c in cycles)
        declared_ef = sorted((u.e, u.f) for u in declared)
        if computed_ef != declared_ef:
            raise ValidationError(
                f"place {v.label}: declared (e,f) table {declared_ef} does not match "
                f"the double-coset structure {computed_ef}")
        # deterministic matching: cycles in canonical order against declared
        # refs sorted by (e, f, label)
        pool = sorted(declared, key=lambda u: (u.e, u.f, u.label))
        assignment = []
        for cyc in cycles:
            k = next(i for i, u in enumerate(pool) if (u.e, u.f) == (cyc.e, cyc.f))
            assignment.append(pool.pop(k))

        B_low = invariants(M_low, v.inertia, frobenius=v.frobenius)
        fiber_blocks = []
        spec_cols: list[list[int]] = []
        n_up = F.generic.rank
        r_low = M_low.rank
        for cyc, ref in zip(cycles, assignment):
            tau0 = transversal[cyc.rep_cosets[0]]
            stab = [g for g in v.inertia.members
                    if coset_of[G.mult(g, tau0)] == cyc.rep_cosets[0]]
            iw_members = sorted(cover.to_upper(G.mult(G.mult(G.inv(tau0), s), tau0))
                                for s in stab)
            I_w = Subgroup(U, iw_members, check=False)
            hol = cyc.edges[0]
            for g in cyc.edges[1:]:
                hol = G.mult(g, hol)
            u_up = cover.to_upper(hol)

            listed = upper_listed.get(ref.label)
            if listed is not None:
                consumed.add(ref.label)
                if listed.place.inertia.members != tuple(iw_members):
                    raise ValidationError(
                        f"upper place {ref.label}: declared inertia {listed.place.inertia.members} "
                        f"differs from the cover's {tuple(iw_members)} (canonical transversal)")
                diff = U.mult(u_up, U.inv(listed.place.frobenius))
                if not I_w.contains(diff):
                    raise ValidationError(
                        f"upper place {ref.label}: declared frobenius is not the cover's "
                        "holonomy modulo inertia")
                if listed.place.q != v.q ** cyc.f:
                    raise ValidationError(
                        f"upper place {ref.label}: residue size must be {v.q ** cyc.f}")
                B_w = invariants(F.generic, I_w).basis
                seeds = B_w * listed.specialization
                phi_w = listed.fiber.frob
                k_w = listed.fiber.free_rank
            else:
                fl = invariants(F.generic, I_w)
                B_w = fl.basis
                seeds = B_w
                phi_w = fl.restrict(F.generic.action[u_up])
                k_w = fl.rank

            f = cyc.f
            # block-cycle Frobenius: copy_j -> copy_{j+1}, wrap with phi_w
            N = f * k_w
            Phi = [[0] * N for _ in range(N)]
            for j in range(f):
                jn = (j + 1) % f
                blk = IntMatrix.identity(k_w) if j < f - 1 else phi_w
                for a in range(k_w):
                    for b in range(k_w):
                        Phi[jn * k_w + a][j * k_w + b] = blk.entries[a][b]
            Phi_m = IntMatrix(Phi) if N else IntMatrix.zeros(0, 0)
            order = _matrix_order(Phi_m, 2 * f * max(U.order, 1) * 4 + 4) if N else 1
            fiber_blocks.append(FinAbFrob((), N, Phi_m, order, v.q))

            # spread the seeds over the orbits
            y = seeds  # n_up x k_w, transported along the cycle
            for j in range(f):
                orbit = cyc.orbits[j]
                cj = cyc.rep_cosets[j]
                tau_j = transversal[cj]
                for col in range(k_w):
                    vec = [0] * (r_low)
                    for c in orbit:
                        iota = next(i for i in v.inertia.members
                                    if act(i, cj) == c)
                        h = G.mult(G.mult(G.inv(transversal[c]), iota), tau_j)
                        comp = F.generic.action[cover.to_upper(h)].apply(y.col(col))
                        for a in range(n_up):
                            vec[c * n_up + a] = comp[a]
                    spec_cols.append(vec)
                if j < f - 1:
                    y = F.generic.action[cover.to_upper(cyc.edges[j])] * y
        fiber = _block_sum(fiber_blocks, v.q)
        spread = IntMatrix.from_cols(spec_cols, rows=r_low)
        S_low = integer_solve(B_low.basis, spread)
        if S_low is None:
            raise ValidationError(
                f"place {v.label}: spread sections failed to be inertia-invariant")
        lower_places.append(SheafPlace(v, fiber, S_low))

    missing = set(upper_listed) - consumed
    if missing:
        raise ValidationError(
            f"upper listed places {sorted(missing)} are not covered by the place mapping")
    return TfSheafData(G, M_low, cover.lower_arch, lower_places)


def _block_sum(blocks: list[FinAbFrob], q: int) -> FinAbFrob:
    if not blocks:
        return FinAbFrob.zero(q)
    rank = sum(b.free_rank for b in blocks)
    phi = IntMatrix.block_diag([b.frob for b in blocks])
    order = 1
    from math import lcm
    for b in blocks:
        order = lcm(order, b.order)
    return FinAbFrob((), rank, phi, order, q)


def pushforward_torus(cover: CoverData, T: CTorusData) -> CTorusData:
    """Pushforward of constructible torus data: transported through duality."""
    return dualize_sheaf(pushforward_sheaf(cover, dualize_torus(T)))
