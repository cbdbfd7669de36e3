"""Exact integer linear algebra for Galois lattices and finite abelian groups.

Everything here is arbitrary-precision and deterministic: Smith normal forms,
kernels, image lattices and the finitely generated abelian group toolkit all
produce canonical outputs so serialized data and golden tests are bit-exact.
No floating point enters this module.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .groups import ClassFunction, FiniteGroup, Subgroup, conjugacy_classes, coset_transversal


class LatticeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Integer matrices
# ---------------------------------------------------------------------------

class IntMatrix:
    """An immutable integer matrix with exact (arbitrary precision) entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Iterable[int]], cols: int | None = None):
        rows = tuple(tuple(int(x) for x in r) for r in entries)
        self.rows = len(rows)
        if rows:
            self.cols = len(rows[0])
            if any(len(r) != self.cols for r in rows):
                raise LatticeError("ragged matrix")
        else:
            self.cols = 0 if cols is None else cols
        if cols is not None and self.rows and cols != self.cols:
            raise LatticeError("declared column count does not match entries")
        self.entries = rows

    # -- constructors ------------------------------------------------------

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(r: int, c: int) -> "IntMatrix":
        if r == 0:
            return IntMatrix([], cols=c)
        return IntMatrix([[0] * c for _ in range(r)])

    @staticmethod
    def from_cols(cols: Sequence[Sequence[int]], rows: int | None = None) -> "IntMatrix":
        if not cols:
            return IntMatrix.zeros(rows or 0, 0)
        r = len(cols[0])
        return IntMatrix([[col[i] for col in cols] for i in range(r)])

    @staticmethod
    def diagonal(diag: Sequence[int], rows: int | None = None, cols: int | None = None) -> "IntMatrix":
        r = rows if rows is not None else len(diag)
        c = cols if cols is not None else len(diag)
        return IntMatrix([[diag[i] if (i == j and i < len(diag)) else 0 for j in range(c)] for i in range(r)])

    # -- basic ops ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.rows == other.rows and self.cols == other.cols \
            and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.entries]!r})"

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise LatticeError(f"dimension mismatch {self.rows}x{self.cols} * {other.rows}x{other.cols}")
        if self.rows == 0 or other.cols == 0:
            return IntMatrix.zeros(self.rows, other.cols)
        ocolsT = [other.col(j) for j in range(other.cols)]
        return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in ocolsT] for r in self.entries])

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], cols=self.cols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], cols=self.cols)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self.entries], cols=self.cols)

    def _same_shape(self, other: "IntMatrix"):
        if self.rows != other.rows or self.cols != other.cols:
            raise LatticeError("shape mismatch")

    def transpose(self) -> "IntMatrix":
        return IntMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], cols=self.rows)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise LatticeError("hstack needs equal row counts")
        if self.rows == 0:
            return IntMatrix.zeros(0, self.cols + other.cols)
        return IntMatrix([r + s for r, s in zip(self.entries, other.entries)])

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise LatticeError("vstack needs equal column counts")
        return IntMatrix(list(self.entries) + list(other.entries), cols=self.cols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix([[self.entries[i][j] for j in cols] for i in rows], cols=len(cols))

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise LatticeError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self.entries)

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == IntMatrix.identity(self.rows)

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.entries for a in r)

    @staticmethod
    def block_diag(blocks: Sequence["IntMatrix"]) -> "IntMatrix":
        R = sum(b.rows for b in blocks)
        C = sum(b.cols for b in blocks)
        out = [[0] * C for _ in range(R)]
        ro = co = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[ro + i][co + j] = b.entries[i][j]
            ro += b.rows
            co += b.cols
        if R == 0:
            return IntMatrix.zeros(0, C)
        return IntMatrix(out)

    def det(self) -> int:
        """Exact determinant (fraction-free Bareiss)."""
        if self.rows != self.cols:
            raise LatticeError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [list(r) for r in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if pivot is None:
                    return 0
                a[k], a[pivot] = a[pivot], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


def rational_solve(A: IntMatrix, B: IntMatrix) -> list[list[Fraction]] | None:
    """Solve A X = B over Q; None if inconsistent.

    A must have full column rank (the use sites guarantee it); among
    solutions the one produced by plain Gaussian elimination is returned.
    """
    m, n = A.rows, A.cols
    k = B.cols
    aug = [[Fraction(A.entries[i][j]) for j in range(n)] + [Fraction(B.entries[i][j]) for j in range(k)]
           for i in range(m)]
    piv_cols = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, m):
        if any(aug[i][n + j] != 0 for j in range(k)):
            return None
    X = [[Fraction(0)] * k for _ in range(n)]
    for row, c in enumerate(piv_cols):
        for j in range(k):
            X[c][j] = aug[row][n + j]
    return X


def integer_solve(A: IntMatrix, B: IntMatrix) -> IntMatrix | None:
    """Solve A X = B over Z when A has full column rank; None if impossible."""
    X = rational_solve(A, B)
    if X is None:
        return None
    if any(x.denominator != 1 for row in X for x in row):
        return None
    return IntMatrix([[int(x) for x in row] for row in X], cols=B.cols)


def inverse_unimodular(U: IntMatrix) -> IntMatrix:
    inv = integer_solve(U, IntMatrix.identity(U.rows))
    if inv is None:
        raise LatticeError("matrix is not unimodular")
    return inv


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, D, V) with U*M*V = D, D diagonal with d1 | d2 | ...

    U and V are unimodular; diagonal entries are nonnegative.  The reduction
    is deterministic (smallest pivot by absolute value, then position), so
    downstream canonical bases are reproducible.
    """
    m, n = M.rows, M.cols
    A = [list(r) for r in M.entries]
    Ur = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    Vr = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        Ur[i], Ur[j] = Ur[j], Ur[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in Vr:
            r[i], r[j] = r[j], r[i]

    def addmul_row(dst, src, c):
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        Ur[dst] = [a + c * b for a, b in zip(Ur[dst], Ur[src])]

    def addmul_col(dst, src, c):
        for r in A:
            r[dst] += c * r[src]
        for r in Vr:
            r[dst] += c * r[src]

    def negate_row(i):
        A[i] = [-a for a in A[i]]
        Ur[i] = [-a for a in Ur[i]]

    t = 0
    while t < min(m, n):
        # choose the pivot of smallest nonzero absolute value in A[t:, t:]
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)
        # clear row and column t; restart if a remainder becomes the new pivot
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, m):
                if A[i][t] != 0:
                    q = A[i][t] // A[t][t]
                    addmul_row(i, t, -q)
                    if A[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j] != 0:
                    q = A[t][j] // A[t][t]
                    addmul_col(j, t, -q)
                    if A[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
        if A[t][t] < 0:
            negate_row(t)
        t += 1

    # enforce the divisibility chain d1 | d2 | ... by folding offending pairs
    r = t
    changed = True
    while changed:
        changed = False
        for i in range(r - 1):
            a, b = A[i][i], A[i + 1][i + 1]
            if a != 0 and b % a != 0:
                # put b below a in column i, run Euclid on the pair of rows,
                # then clear the fill-in; the 2x2 block becomes
                # diag(gcd(a,b), +-lcm(a,b))
                addmul_col(i, i + 1, 1)
                while A[i + 1][i] != 0:
                    q = A[i][i] // A[i + 1][i]
                    addmul_row(i, i + 1, -q)
                    swap_rows(i, i + 1)
                # entries of column i+1 in these two rows are multiples of
                # gcd(a,b) = A[i][i], so the division below is exact
                if A[i][i + 1] != 0:
                    addmul_col(i + 1, i, -(A[i][i + 1] // A[i][i]))
                if A[i][i] < 0:
                    negate_row(i)
                if A[i + 1][i + 1] < 0:
                    negate_row(i + 1)
                changed = True
    U = IntMatrix(Ur) if m else IntMatrix.zeros(0, 0)
    V = IntMatrix(Vr) if n else IntMatrix.zeros(0, 0)
    D = IntMatrix(A, cols=n) if m else IntMatrix.zeros(0, n)
    return U, D, V


def diagonal_of(D: IntMatrix) -> list[int]:
    return [D.entries[i][i] for i in range(min(D.rows, D.cols))]


def kernel_basis(M: IntMatrix) -> IntMatrix:
    """Basis of the integer kernel {x : Mx = 0}, as columns; saturated."""
    U, D, V = smith_normal_form(M)
    diag = diagonal_of(D)
    free = [j for j in range(M.cols) if j >= len(diag) or diag[j] == 0]
    return V.submatrix(range(M.cols), free)


def column_lattice_basis(M: IntMatrix) -> IntMatrix:
    """Basis (as columns) of the lattice spanned by the columns of M."""
    U, D, V = smith_normal_form(M)
    diag = diagonal_of(D)
    Uinv = inverse_unimodular(U) if M.rows else IntMatrix.zeros(0, 0)
    cols = [[diag[i] * Uinv.entries[r][i] for r in range(M.rows)] for i in range(len(diag)) if diag[i] != 0]
    return IntMatrix.from_cols(cols, rows=M.rows)


def in_column_lattice(M: IntMatrix, vec: Sequence[int]) -> bool:
    U, D, V = smith_normal_form(M)
    diag = diagonal_of(D)
    y = U.apply(vec)
    for i, yi in enumerate(y):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if yi != 0:
                return False
        elif yi % d != 0:
            return False
    return True


def preimage_lattice(W: IntMatrix, R: IntMatrix) -> IntMatrix:
    """Basis of {a : W a lies in the column lattice of R}, as columns."""
    if W.rows != R.rows:
        raise LatticeError("shape mismatch")
    block = W.hstack(R)
    K = kernel_basis(block)  # columns (a, y) with Wa + Ry = 0
    proj = K.submatrix(range(W.cols), range(K.cols))
    return column_lattice_basis(proj)


def charpoly_reverse(M: IntMatrix) -> list[int]:
    """Coefficients [1, -c1, -c2, ...] of det(I - u*M) as a polynomial in u.

    Faddeev-LeVerrier; all divisions are exact for integer matrices.
    """
    n = M.rows
    if n != M.cols:
        raise LatticeError("characteristic polynomial of non-square matrix")
    coeffs = [1]
    Mk = M
    I = IntMatrix.identity(n)
    cs = []
    for k in range(1, n + 1):
        tr = sum(Mk.entries[i][i] for i in range(n))
        assert tr % k == 0, "Faddeev trace division must be exact"
        ck = tr // k
        cs.append(ck)
        if k < n:
            Mk = M * (Mk - IntMatrix.diagonal([ck] * n))
    # det(I - uM) = 1 - c1 u - c2 u^2 - ... - cn u^n
    return coeffs + [-c for c in cs]


# ---------------------------------------------------------------------------
# Finitely generated abelian groups (Smith presentations)
# ---------------------------------------------------------------------------

class FinAb:
    """A finitely generated abelian group, presented as coker(R: Z^m -> Z^n).

    Smith invariants are computed once and cached; canonical coordinates put
    torsion generators first (invariant factors > 1, dividing in sequence)
    followed by free generators.
    """

    def __init__(self, gens: int, relations: IntMatrix):
        if relations.rows != gens:
            raise LatticeError("relation matrix must have one row per generator")
        self.gens = gens
        self.relations = relations
        U, D, V = smith_normal_form(relations)
        self._U = U
        self._Uinv = inverse_unimodular(U) if gens else IntMatrix.zeros(0, 0)
        diag = diagonal_of(D)
        nonzero = [d for d in diag if d != 0]
        self.invariant_factors = tuple(d for d in nonzero if d != 1)
        self.rank = gens - len(nonzero)
        self._torsion_coords = [i for i, d in enumerate(nonzero) if d != 1]
        self._free_coords = list(range(len(nonzero), gens))

    @property
    def torsion_order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def is_finite(self) -> bool:
        return self.rank == 0

    # canonical reduced coordinates: torsion coords then free coords
    def reduced_coords(self) -> list[int]:
        return self._torsion_coords + self._free_coords

    def reduction_map(self) -> IntMatrix:
        """Matrix of Z^gens -> Z^(k+r) sending a to its reduced coordinates."""
        return self._U.submatrix(self.reduced_coords(), range(self.gens))

    def reduction_section(self) -> IntMatrix:
        """A right inverse of reduction_map (choice of lifts of generators)."""
        return self._Uinv.submatrix(range(self.gens), self.reduced_coords())

    def free_projection(self) -> IntMatrix:
        """Matrix of the projection Z^gens -> (group)/torsion = Z^rank."""
        return self._U.submatrix(self._free_coords, range(self.gens))

    def free_section(self) -> IntMatrix:
        return self._Uinv.submatrix(range(self.gens), self._free_coords)

    def __repr__(self):
        return f"FinAb(invariant_factors={self.invariant_factors}, rank={self.rank})"


class FinAbFrob:
    """A f.g. abelian group in canonical coordinates with a finite-order
    automorphism (Frobenius) and an ambient residue size q.

    Generators: ``len(torsion)`` torsion generators (orders dividing in
    sequence, all > 1) followed by ``free_rank`` free generators.  ``frob``
    acts on generators; its free-row/torsion-column block is forced to be
    zero (automorphisms map torsion into torsion), torsion rows are stored
    reduced modulo the corresponding invariant factor.
    """

    def __init__(self, torsion: Sequence[int], free_rank: int, frob: IntMatrix,
                 order: int, q: int | None = None):
        self.torsion = tuple(int(d) for d in torsion)
        if any(d < 2 for d in self.torsion):
            raise LatticeError("invariant factors must be >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise LatticeError("invariant factors must divide in sequence")
        self.free_rank = int(free_rank)
        self.q = q
        n = len(self.torsion) + self.free_rank
        if frob.rows != n or frob.cols != n:
            raise LatticeError(f"frobenius must be {n}x{n}")
        k = len(self.torsion)
        ent = [list(r) for r in frob.entries] if n else []
        for i in range(k):
            for j in range(n):
                ent[i][j] %= self.torsion[i]
        for i in range(k, n):
            for j in range(k):
                if ent[i][j] != 0:
                    raise LatticeError("frobenius maps a torsion generator outside torsion")
        self.frob = IntMatrix(ent, cols=n) if n else IntMatrix.zeros(0, 0)
        if order < 1:
            raise LatticeError("declared frobenius order must be >= 1")
        self.order = int(order)
        if not self._is_identity_power(self.order):
            raise LatticeError(f"frobenius does not have the declared order {order}")

    def _is_identity_power(self, n: int) -> bool:
        M = IntMatrix.identity(self.ngens)
        for _ in range(n):
            M = self._reduce(self.frob * M)
        return M == IntMatrix.identity(self.ngens)

    def _reduce(self, M: IntMatrix) -> IntMatrix:
        k = len(self.torsion)
        ent = [list(r) for r in M.entries]
        for i in range(k):
            for j in range(M.cols):
                ent[i][j] %= self.torsion[i]
        return IntMatrix(ent, cols=M.cols) if M.rows else M

    @property
    def ngens(self) -> int:
        return len(self.torsion) + self.free_rank

    @property
    def torsion_order(self) -> int:
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def presentation(self) -> IntMatrix:
        """Relations matrix: diag(torsion) padded with zero rows for free gens."""
        return IntMatrix.diagonal(list(self.torsion), rows=self.ngens, cols=len(self.torsion))

    def rational_frobenius(self) -> IntMatrix:
        """Action induced on (group)/torsion tensor Q: the free block."""
        k = len(self.torsion)
        return self.frob.submatrix(range(k, self.ngens), range(k, self.ngens))

    @staticmethod
    def from_lattice(frob: IntMatrix, order: int, q: int | None = None) -> "FinAbFrob":
        return FinAbFrob((), frob.rows, frob, order, q)

    @staticmethod
    def zero(q: int | None = None) -> "FinAbFrob":
        return FinAbFrob((), 0, IntMatrix.zeros(0, 0), 1, q)

    def __eq__(self, other) -> bool:
        return isinstance(other, FinAbFrob) and self.torsion == other.torsion \
            and self.free_rank == other.free_rank and self.frob == other.frob and self.q == other.q

    def __hash__(self):
        return hash((self.torsion, self.free_rank, self.frob, self.q))

    def __repr__(self):
        return f"FinAbFrob(torsion={self.torsion}, free_rank={self.free_rank}, q={self.q})"


# ---------------------------------------------------------------------------
# Galois lattices
# ---------------------------------------------------------------------------

class GLattice:
    """A free Z-module of finite rank with an action of a finite group.

    ``action[i]`` is the matrix of group element i (in the group's canonical
    element order) acting on column vectors.  Construction verifies that all
    matrices are invertible over Z and that the assignment is a group
    homomorphism, by full enumeration.
    """

    def __init__(self, group: FiniteGroup, rank: int, action: Sequence[IntMatrix], check: bool = True):
        self.group = group
        self.rank = int(rank)
        self.action = tuple(action)
        if len(self.action) != group.order:
            raise LatticeError("need one action matrix per group element")
        for A in self.action:
            if A.rows != self.rank or A.cols != self.rank:
                raise LatticeError("action matrix has wrong shape")
        if check:
            for A in self.action:
                if A.det() not in (1, -1):
                    raise LatticeError("action matrix is not invertible over Z")
            if not self.action[group.identity_index].is_identity():
                raise LatticeError("identity element must act as the identity matrix")
            for i in range(group.order):
                for j in range(group.order):
                    if self.action[i] * self.action[j] != self.action[group.mult(i, j)]:
                        raise LatticeError("action is not a group homomorphism")

    def act(self, i: int) -> IntMatrix:
        return self.action[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, GLattice) and self.group == other.group and self.rank == other.rank \
            and self.action == other.action

    def __repr__(self):
        return f"GLattice(rank={self.rank}, group_order={self.group.order})"

    @staticmethod
    def trivial(group: FiniteGroup, rank: int) -> "GLattice":
        I = IntMatrix.identity(rank)
        return GLattice(group, rank, [I] * group.order, check=False)

    @staticmethod
    def from_generator_map(group: FiniteGroup, rank: int,
                           gen_images: dict[int, IntMatrix]) -> "GLattice":
        """Extend matrices given on a generating set to the whole group."""
        known: dict[int, IntMatrix] = {group.identity_index: IntMatrix.identity(rank)}
        known.update(gen_images)
        frontier = list(known)
        while len(known) < group.order:
            progressed = False
            for i in list(known):
                for j in list(known):
                    k = group.mult(i, j)
                    if k not in known:
                        known[k] = known[i] * known[j]
                        progressed = True
            if not progressed:
                raise LatticeError("generator images do not generate the group")
        return GLattice(group, rank, [known[i] for i in range(group.order)])

    def direct_sum(self, other: "GLattice") -> "GLattice":
        if self.group != other.group:
            raise LatticeError("direct sum needs a common group")
        action = [IntMatrix.block_diag([a, b]) for a, b in zip(self.action, other.action)]
        return GLattice(self.group, self.rank + other.rank, action, check=False)


def z_dual(Y: GLattice) -> GLattice:
    """Contragredient lattice: g acts by transpose(action(g^{-1}))."""
    G = Y.group
    action = [Y.action[G.inv(i)].transpose() for i in range(G.order)]
    return GLattice(G, Y.rank, action, check=False)


def dual_matrix(M: IntMatrix) -> IntMatrix:
    """Matrix of the Z-dual map between dual bases (the transpose)."""
    return M.transpose()


def character_of(Y: GLattice) -> ClassFunction:
    values = []
    for cls in conjugacy_classes(Y.group):
        values.append(Fraction(sum(Y.action[cls[0]].entries[i][i] for i in range(Y.rank))))
    return ClassFunction(Y.group, tuple(values))


def generating_set(H: Subgroup) -> list[int]:
    """A small generating set of H (greedy; deterministic)."""
    G = H.parent
    gens: list[int] = []
    have = {G.identity_index}
    for i in H.members:
        if i in have:
            continue
        gens.append(i)
        frontier = [i]
        have.add(i)
        while frontier:
            nxt = []
            for a in frontier:
                for b in list(have):
                    for c in (G.mult(a, b), G.mult(b, a), G.inv(a)):
                        if c not in have:
                            have.add(c)
                            nxt.append(c)
            frontier = nxt
        if len(have) == H.order:
            break
    return gens


class FixedLattice:
    """The saturated sublattice of H-invariant vectors of a GLattice.

    ``basis`` has the invariant basis vectors as columns (in the ambient
    coordinates); ``frob`` is the restriction of a supplied commuting
    automorphism to this sublattice, when one was given.
    """

    def __init__(self, ambient_rank: int, basis: IntMatrix, frob: IntMatrix | None = None,
                 frob_order: int | None = None, q: int | None = None):
        self.ambient_rank = ambient_rank
        self.basis = basis
        self.rank = basis.cols
        self.frob = frob
        self.frob_order = frob_order
        self.q = q

    def restrict(self, M: IntMatrix) -> IntMatrix:
        """Matrix of M on the sublattice; M must preserve it."""
        out = integer_solve(self.basis, M * self.basis)
        if out is None:
            raise LatticeError("matrix does not preserve the invariant sublattice")
        return out

    def rational_frobenius(self) -> IntMatrix:
        if self.frob is None:
            raise LatticeError("no Frobenius attached to this fixed lattice")
        return self.frob

    @property
    def free_rank(self) -> int:
        return self.rank


def invariants(Y: GLattice, H: Subgroup, frobenius: int | None = None) -> FixedLattice:
    """Kernel lattice {y : rho(h) y = y for all h in H}, saturated.

    When ``frobenius`` (a group element index normalizing H's action) is
    supplied, its restricted action on the sublattice is carried along.
    """
    gens = generating_set(H)
    if not gens:
        basis = IntMatrix.identity(Y.rank)
    else:
        I = IntMatrix.identity(Y.rank)
        stacked = IntMatrix.zeros(0, Y.rank)
        for h in gens:
            stacked = stacked.vstack(Y.action[h] - I)
        basis = kernel_basis(stacked)
    fl = FixedLattice(Y.rank, basis)
    if frobenius is not None:
        frob_mat = fl.restrict(Y.action[frobenius])
        fl.frob = frob_mat
        fl.frob_order = Y.group.element_order(frobenius)
        # restricted order may properly divide the element order; keep the
        # declared order as the element order, which is always valid
    return fl


class FrobeniusCompatibilityError(LatticeError):
    pass


def coinvariants(Y, H: Subgroup | None = None, frobenius: int | None = None,
                 q: int | None = None) -> FinAbFrob:
    """Coinvariant group Y_H = Y / <(rho(h) - 1)y>, in Smith-canonical form.

    For a GLattice input, H must act through Y's group; a commuting
    ``frobenius`` element induces the Frobenius carried on the result.  For
    a FinAbFrob input (cyclic action by its own Frobenius), H is omitted and
    the cokernel of (frob - 1) is returned.
    """
    if isinstance(Y, FinAbFrob):
        W = Y.frob - IntMatrix.identity(Y.ngens)
        pres = W.hstack(Y.presentation())
        return _cokernel_with_frobenius(Y.ngens, pres, IntMatrix.identity(Y.ngens), 1, q or Y.q)
    if H is None:
        raise LatticeError("coinvariants of a GLattice needs a subgroup")
    gens = generating_set(H)
    n = Y.rank
    blocks = [Y.action[h] - IntMatrix.identity(n) for h in gens]
    stacked = IntMatrix.zeros(n, 0)
    for b in blocks:
        stacked = stacked.hstack(b)
    if frobenius is not None:
        frob_mat = Y.action[frobenius]
        order = Y.group.element_order(frobenius)
        # Frobenius must normalize the inertia action to descend
        if stacked.cols:
            im_basis = column_lattice_basis(stacked)
            if integer_solve(im_basis, frob_mat * im_basis) is None:
                raise FrobeniusCompatibilityError("Frobenius incompatible with inertia")
    else:
        frob_mat = IntMatrix.identity(n)
        order = 1
    return _cokernel_with_frobenius(n, stacked, frob_mat, order, q)


def _cokernel_with_frobenius(n: int, relations: IntMatrix, frob: IntMatrix,
                             order: int, q: int | None) -> FinAbFrob:
    grp = FinAb(n, relations)
    frob_red = grp.reduction_map() * frob * grp.reduction_section()
    return FinAbFrob(grp.invariant_factors, grp.rank, frob_red, order, q)


def induce_module(H: Subgroup, rank: int, action_of: Callable[[int], IntMatrix],
                  check: bool = True) -> GLattice:
    """Induced lattice Ind_H^G W, for W an H-lattice given by ``action_of``.

    ``action_of(h)`` is the matrix of the member h of H (parent indexing).
    Blocks are indexed by the canonical left-coset transversal (minimal
    representatives, in element order); g sends block c to block gc with
    matrix W(t_{gc}^{-1} g t_c).
    """
    G = H.parent
    transversal = coset_transversal(G, H)
    coset_of: dict[int, int] = {}
    for ci, t in enumerate(transversal):
        for h in H.members:
            coset_of[G.mult(t, h)] = ci
    nco = len(transversal)
    N = nco * rank
    action = []
    for g in range(G.order):
        M = [[0] * N for _ in range(N)]
        for ci, t in enumerate(transversal):
            gt = G.mult(g, t)
            cj = coset_of[gt]
            h = G.mult(G.inv(transversal[cj]), gt)
            block = action_of(h)
            for a in range(rank):
                for b in range(rank):
                    M[cj * rank + a][ci * rank + b] = block.entries[a][b]
        action.append(IntMatrix(M) if N else IntMatrix.zeros(0, 0))
    return GLattice(G, N, action, check=check)


def induce_from_subgroup_lattice(H: Subgroup, W: GLattice, embed: Sequence[int],
                                 check: bool = True) -> GLattice:
    """Induce a lattice over an abstract group identified with H.

    ``embed[i]`` is the parent index of the i-th element of W's group; it
    must be a group isomorphism onto H.
    """
    G = H.parent
    if sorted(embed) != sorted(H.members):
        raise LatticeError("embedding image is not the subgroup")
    upper = W.group
    for i in range(upper.order):
        for j in range(upper.order):
            if embed[upper.mult(i, j)] != G.mult(embed[i], embed[j]):
                raise LatticeError("embedding is not a homomorphism")
    back = {embed[i]: i for i in range(upper.order)}
    return induce_module(H, W.rank, lambda h: W.action[back[h]], check=check)


def regular_lattice(G: FiniteGroup) -> GLattice:
    from .groups import trivial_subgroup
    return induce_module(trivial_subgroup(G), 1, lambda h: IntMatrix.identity(1), check=False)
