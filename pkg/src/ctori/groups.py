"""Finite permutation groups, conjugacy structure and Artin induction.

Groups are stored as explicit element lists (desk scale, |G| <= 48 or so),
which keeps every axiom checkable by enumeration.  Elements are permutations
of {0..degree-1} in image notation, canonically sorted lexicographically, so
element indices, conjugacy classes and serialized class functions are
reproducible bit-exactly.

Composition convention: (g*h)(i) = g(h(i)), i.e. h acts first.  This matches
the matrix convention P(g*h) = P(g)P(h) used for lattice actions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations as _itertools_permutations
from typing import Iterable, Sequence


class GroupStructureError(ValueError):
    """A claimed group or subgroup violates one of the group axioms."""


Perm = tuple[int, ...]


def compose(g: Perm, h: Perm) -> Perm:
    """Composite permutation g∘h (h first)."""
    return tuple(g[h[i]] for i in range(len(g)))


def inverse_perm(g: Perm) -> Perm:
    inv = [0] * len(g)
    for i, gi in enumerate(g):
        inv[gi] = i
    return tuple(inv)


def perm_from_cycles(degree: int, cycles: Sequence[Sequence[int]]) -> Perm:
    """Build a permutation from disjoint cycles; omitted letters are fixed."""
    images = list(range(degree))
    seen: set[int] = set()
    for cyc in cycles:
        for a in cyc:
            if not 0 <= a < degree:
                raise GroupStructureError(f"cycle entry {a} out of range for degree {degree}")
            if a in seen:
                raise GroupStructureError(f"letter {a} repeated across cycles")
            seen.add(a)
        for i, a in enumerate(cyc):
            images[a] = cyc[(i + 1) % len(cyc)]
    return tuple(images)


def perm_to_cycles(g: Perm) -> list[tuple[int, ...]]:
    """Disjoint cycle decomposition, fixed points omitted, canonical order."""
    seen: set[int] = set()
    cycles = []
    for start in range(len(g)):
        if start in seen or g[start] == start:
            seen.add(start)
            continue
        cyc = [start]
        seen.add(start)
        a = g[start]
        while a != start:
            cyc.append(a)
            seen.add(a)
            a = g[a]
        cycles.append(tuple(cyc))
    return cycles


class FiniteGroup:
    """A finite permutation group on {0..degree-1}, stored by enumeration.

    ``elements`` is the lexicographically sorted tuple of all member
    permutations; the identity always lands at index 0.  All structural
    axioms (closure, inverses, identity) are verified at construction.
    """

    def __init__(self, degree: int, elements: Iterable[Perm], check: bool = True):
        if degree < 1:
            raise GroupStructureError("degree must be a positive integer")
        elems = sorted({tuple(e) for e in elements})
        if not elems:
            raise GroupStructureError("a group needs at least the identity element")
        for e in elems:
            if len(e) != degree or sorted(e) != list(range(degree)):
                raise GroupStructureError(f"{e} is not a permutation of 0..{degree - 1}")
        self.degree = degree
        self.elements: tuple[Perm, ...] = tuple(elems)
        self._index = {e: i for i, e in enumerate(self.elements)}
        identity = tuple(range(degree))
        if identity not in self._index:
            raise GroupStructureError("identity permutation missing")
        self.identity_index = self._index[identity]  # 0 by lexicographic sort
        if check:
            self._check_axioms()

    # -- structure ---------------------------------------------------------

    def _check_axioms(self):
        for g in self.elements:
            if inverse_perm(g) not in self._index:
                raise GroupStructureError(f"inverse of {g} missing (closure under inverse fails)")
            for h in self.elements:
                if compose(g, h) not in self._index:
                    raise GroupStructureError(f"product of {g} and {h} leaves the element set (closure fails)")

    @property
    def order(self) -> int:
        return len(self.elements)

    def index(self, g: Perm) -> int:
        return self._index[tuple(g)]

    def mult(self, i: int, j: int) -> int:
        return self._index[compose(self.elements[i], self.elements[j])]

    def inv(self, i: int) -> int:
        return self._index[inverse_perm(self.elements[i])]

    def conjugate(self, i: int, j: int) -> int:
        """Index of g_j g_i g_j^{-1}."""
        return self.mult(self.mult(j, i), self.inv(j))

    def element_order(self, i: int) -> int:
        n, k = 1, i
        while k != self.identity_index:
            k = self.mult(k, i)
            n += 1
        return n

    def __len__(self) -> int:
        return self.order

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGroup) and self.degree == other.degree and self.elements == other.elements

    def __hash__(self):
        return hash((self.degree, self.elements))

    def __repr__(self):
        return f"FiniteGroup(degree={self.degree}, order={self.order})"

    # -- constructors ------------------------------------------------------

    @staticmethod
    def trivial(degree: int = 1) -> "FiniteGroup":
        return FiniteGroup(degree, [tuple(range(degree))])

    @staticmethod
    def cyclic(n: int) -> "FiniteGroup":
        """Z/n as the rotation group on n letters (n=1: trivial on 1 letter)."""
        rot = tuple((i + 1) % n for i in range(n))
        return FiniteGroup.generated(n, [rot])

    @staticmethod
    def symmetric(n: int) -> "FiniteGroup":
        return FiniteGroup(n, list(_itertools_permutations(range(n))))

    @staticmethod
    def klein_four() -> "FiniteGroup":
        """Z/2 x Z/2 as double transpositions on 4 letters."""
        a = perm_from_cycles(4, [(0, 1)])
        b = perm_from_cycles(4, [(2, 3)])
        return FiniteGroup.generated(4, [a, b])

    @staticmethod
    def generated(degree: int, generators: Sequence[Perm]) -> "FiniteGroup":
        """Close a generator list under composition."""
        identity = tuple(range(degree))
        elems = {identity}
        frontier = [identity]
        gens = [tuple(g) for g in generators]
        while frontier:
            nxt = []
            for e in frontier:
                for g in gens:
                    p = compose(g, e)
                    if p not in elems:
                        elems.add(p)
                        nxt.append(p)
            frontier = nxt
        return FiniteGroup(degree, elems, check=False)


class Subgroup:
    """A subgroup of a FiniteGroup, stored as sorted member indices."""

    def __init__(self, parent: FiniteGroup, members: Iterable[int], check: bool = True):
        self.parent = parent
        self.members: tuple[int, ...] = tuple(sorted(set(members)))
        if check:
            if parent.identity_index not in self.members:
                raise GroupStructureError("subgroup must contain the identity")
            mset = set(self.members)
            for i in self.members:
                if parent.inv(i) not in mset:
                    raise GroupStructureError("subgroup not closed under inverse")
                for j in self.members:
                    if parent.mult(i, j) not in mset:
                        raise GroupStructureError("subgroup not closed under composition")

    @property
    def order(self) -> int:
        return len(self.members)

    def contains(self, i: int) -> bool:
        return i in set(self.members)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self.parent == other.parent and self.members == other.members

    def __le__(self, other: "Subgroup") -> bool:
        return set(self.members) <= set(other.members)

    def __hash__(self):
        return hash((id(self.parent), self.members))

    def __repr__(self):
        return f"Subgroup(order={self.order}, members={self.members})"

    def is_normal_in(self, other: "Subgroup") -> bool:
        mset = set(self.members)
        return all(self.parent.conjugate(i, j) in mset for i in self.members for j in other.members)

    def conjugate_by(self, j: int) -> "Subgroup":
        return Subgroup(self.parent, [self.parent.conjugate(i, j) for i in self.members], check=False)

    def generated_with(self, extra: Iterable[int]) -> "Subgroup":
        G = self.parent
        members = set(self.members)
        frontier = list(members)
        for e in extra:
            if e not in members:
                members.add(e)
                frontier.append(e)
        while frontier:
            nxt = []
            for i in frontier:
                for j in list(members):
                    for k in (G.mult(i, j), G.mult(j, i), G.inv(i)):
                        if k not in members:
                            members.add(k)
                            nxt.append(k)
            frontier = nxt
        return Subgroup(G, members, check=False)


def trivial_subgroup(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, [G.identity_index], check=False)


def full_subgroup(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, range(G.order), check=False)


def conjugacy_classes(G: FiniteGroup) -> list[tuple[int, ...]]:
    """Partition of element indices into conjugation orbits.

    Classes are sorted by their minimal element index, members sorted
    ascending; this is the canonical class order used by ClassFunction.
    """
    remaining = set(range(G.order))
    classes = []
    while remaining:
        start = min(remaining)
        orbit = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for i in frontier:
                for j in range(G.order):
                    c = G.conjugate(i, j)
                    if c not in orbit:
                        orbit.add(c)
                        nxt.append(c)
            frontier = nxt
        classes.append(tuple(sorted(orbit)))
        remaining -= orbit
    classes.sort(key=lambda c: c[0])
    return classes


def left_cosets(G: FiniteGroup, H: Subgroup) -> list[tuple[int, ...]]:
    """Left cosets gH as sorted index tuples, ordered by minimal member."""
    if H.parent is not G and H.parent != G:
        raise GroupStructureError("subgroup belongs to a different group")
    seen: set[int] = set()
    cosets = []
    for g in range(G.order):
        if g in seen:
            continue
        coset = tuple(sorted(G.mult(g, h) for h in H.members))
        seen.update(coset)
        cosets.append(coset)
    cosets.sort(key=lambda c: c[0])
    return cosets


def coset_transversal(G: FiniteGroup, H: Subgroup) -> list[int]:
    """Minimal representative of each left coset, in coset order."""
    return [c[0] for c in left_cosets(G, H)]


def canonical_subgroup_key(H: Subgroup) -> tuple[int, ...]:
    """Lexicographically smallest member tuple among conjugates of H.

    Used to key subgroup conjugacy classes (e.g. in K0 field terms).
    """
    G = H.parent
    best = H.members
    for j in range(G.order):
        cand = tuple(sorted(G.conjugate(i, j) for i in H.members))
        if cand < best:
            best = cand
    return best


def cyclic_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """One representative per conjugacy class of cyclic subgroups.

    The trivial subgroup is included.  Representatives are the canonical
    (lexicographically smallest) conjugates, listed by increasing order and
    then member tuple, so output is deterministic.
    """
    reps: dict[tuple[int, ...], Subgroup] = {}
    for g in range(G.order):
        members = set()
        k = G.identity_index
        while True:
            members.add(k)
            if k == G.identity_index and len(members) > 1:
                break
            k = G.mult(k, g)
            if k in members:
                break
        H = Subgroup(G, members, check=False)
        key = canonical_subgroup_key(H)
        if key not in reps:
            reps[key] = Subgroup(G, key, check=False)
    out = list(reps.values())
    out.sort(key=lambda H: (H.order, H.members))
    return out


@dataclass(frozen=True)
class ClassFunction:
    """A rational-valued function on conjugacy classes, canonical class order."""

    group: FiniteGroup
    values: tuple[Fraction, ...]

    def __post_init__(self):
        ncl = len(conjugacy_classes(self.group))
        if len(self.values) != ncl:
            raise GroupStructureError(f"class function needs {ncl} values, got {len(self.values)}")

    @staticmethod
    def from_values(group: FiniteGroup, values: Sequence) -> "ClassFunction":
        return ClassFunction(group, tuple(Fraction(v) for v in values))

    def __add__(self, other: "ClassFunction") -> "ClassFunction":
        assert self.group == other.group
        return ClassFunction(self.group, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "ClassFunction") -> "ClassFunction":
        assert self.group == other.group
        return ClassFunction(self.group, tuple(a - b for a, b in zip(self.values, other.values)))

    def scale(self, c) -> "ClassFunction":
        c = Fraction(c)
        return ClassFunction(self.group, tuple(c * a for a in self.values))

    def value_at_element(self, i: int) -> Fraction:
        for cls, val in zip(conjugacy_classes(self.group), self.values):
            if i in cls:
                return val
        raise IndexError(i)

    def is_integer_valued(self) -> bool:
        return all(v.denominator == 1 for v in self.values)


def induced_trivial_character(H: Subgroup) -> ClassFunction:
    """Character of the permutation representation of G on G/H.

    Value at the class of g is the number of left cosets xH fixed by g,
    i.e. #{xH : x^{-1} g x in H}.
    """
    G = H.parent
    cosets = left_cosets(G, H)
    hset = set(H.members)
    reps = [c[0] for c in cosets]
    values = []
    for cls in conjugacy_classes(G):
        g = cls[0]
        fixed = 0
        for x in reps:
            if G.mult(G.mult(G.inv(x), g), x) in hset:
                fixed += 1
        values.append(Fraction(fixed))
    return ClassFunction(G, tuple(values))


class ArtinInductionError(ValueError):
    """The class function is not in the Q-span of induced trivial characters."""


def artin_induction(chi: ClassFunction) -> dict[tuple[int, ...], Fraction]:
    """Write chi = Σ_H a_H · Ind_H^G 1 over cyclic subgroups H, exactly.

    Returns a map keyed by the canonical member tuple of each cyclic
    subgroup class, with exact rational coefficients; zero coefficients are
    kept so the support is explicit.  The induced trivial characters of
    non-conjugate cyclic subgroups are linearly independent (they biject
    with rational conjugacy classes), so the solution is unique whenever it
    exists; columns are nevertheless eliminated in decreasing subgroup
    order, with free variables pinned to zero, which realizes the
    sparsity-then-larger-subgroup tie-break deterministically.

    Raises ArtinInductionError if chi is not a rational character (no exact
    solution), which cannot happen for characters of rational
    representations.
    """
    G = chi.group
    if not chi.is_integer_valued():
        raise ArtinInductionError("not in the span of induced trivial characters: non-integer values")
    subs = cyclic_subgroups(G)
    subs_by_size = sorted(subs, key=lambda H: (-H.order, H.members))
    ncl = len(conjugacy_classes(G))
    # columns: induced characters, in decreasing subgroup order
    cols = [induced_trivial_character(H).values for H in subs_by_size]
    # exact Gaussian elimination on the augmented system
    rows = [[cols[j][i] for j in range(len(cols))] + [chi.values[i]] for i in range(ncl)]
    ncols = len(cols)
    pivot_of_col: dict[int, int] = {}
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, ncl) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(ncl):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivot_of_col[c] = r
        r += 1
        if r == ncl:
            break
    coeffs = [Fraction(0)] * ncols
    for c, pr in pivot_of_col.items():
        coeffs[c] = rows[pr][ncols]
    # rows below the pivot block must be consistent
    for i in range(r, ncl):
        if rows[i][ncols] != 0:
            raise ArtinInductionError("not in the span of induced trivial characters")
    # residual check: re-synthesize and compare exactly
    synth = [Fraction(0)] * ncl
    for j, a in enumerate(coeffs):
        if a:
            synth = [s + a * v for s, v in zip(synth, cols[j])]
    if tuple(synth) != chi.values:
        raise ArtinInductionError("not in the span of induced trivial characters")
    return {H.members: coeffs[j] for j, H in enumerate(subs_by_size)}


# ---------------------------------------------------------------------------
# Group text records
#
# A group record lists the degree and one permutation per line, in one-line
# cycle notation "(0 1)(2 3)" (fixed points omitted, "()" is the identity)
# or in image notation "images 1 0 2".  The listed permutations generate the
# group; listing every element is fine.  Blank lines and '#' comments are
# ignored.
# ---------------------------------------------------------------------------

def parse_permutation(degree: int, line: str) -> Perm:
    line = line.strip()
    if line.startswith("images"):
        imgs = [int(tok) for tok in line[len("images"):].replace(",", " ").split()]
        if len(imgs) != degree:
            raise GroupStructureError(f"image notation needs {degree} entries: {line!r}")
        return tuple(imgs)
    if line.startswith("("):
        cycles = []
        body = line.replace(")(", ")|(")
        for part in body.split("|"):
            part = part.strip()
            if not (part.startswith("(") and part.endswith(")")):
                raise GroupStructureError(f"malformed cycle notation: {line!r}")
            inner = part[1:-1].replace(",", " ").split()
            if inner:
                cycles.append([int(tok) for tok in inner])
        return perm_from_cycles(degree, cycles)
    raise GroupStructureError(f"unrecognized permutation syntax: {line!r}")


def parse_group(text: str) -> FiniteGroup:
    """Parse a group text record (see module docstring grammar)."""
    degree = None
    perms: list[Perm] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("degree"):
            degree = int(line.split()[1])
            continue
        if degree is None:
            raise GroupStructureError("group record must declare the degree first")
        perms.append(parse_permutation(degree, line))
    if degree is None:
        raise GroupStructureError("group record missing degree")
    return FiniteGroup.generated(degree, perms)


def serialize_group(G: FiniteGroup) -> str:
    """Canonical group record: degree plus every element in image notation."""
    lines = [f"degree {G.degree}"]
    for e in G.elements:
        lines.append("images " + " ".join(str(i) for i in e))
    return "\n".join(lines) + "\n"
