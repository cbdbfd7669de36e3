"""Local L-factors as exact rational functions in t = N(x)^(-s).

Everything is expressed in the single variable t; the substitution
s -> s + k becomes t -> t / q^k, which introduces rational coefficients, so
polynomial arithmetic is over Q throughout.  The canonical form of a
rational function (reduced, denominator a primitive integer polynomial with
positive leading coefficient) makes golden tests bit-exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

from .lattices import FinAbFrob, FixedLattice, IntMatrix, charpoly_reverse


class PolyQ:
    """Polynomial in t with exact rational coefficients (ascending order)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Union[int, Fraction]]):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def one() -> "PolyQ":
        return PolyQ([1])

    @staticmethod
    def zero() -> "PolyQ":
        return PolyQ([])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (Fraction(1),)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyQ) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "PolyQ") -> "PolyQ":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return PolyQ([x + y for x, y in zip(a, b)])

    def __sub__(self, other: "PolyQ") -> "PolyQ":
        return self + PolyQ([-c for c in other.coeffs])

    def __mul__(self, other: "PolyQ") -> "PolyQ":
        if self.is_zero() or other.is_zero():
            return PolyQ.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return PolyQ(out)

    def scale(self, c: Union[int, Fraction]) -> "PolyQ":
        c = Fraction(c)
        return PolyQ([c * a for a in self.coeffs])

    def divmod(self, other: "PolyQ") -> tuple["PolyQ", "PolyQ"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        d = other.coeffs
        while len(rem) >= len(d) and any(rem):
            if rem[-1] == 0:
                rem.pop()
                continue
            k = len(rem) - len(d)
            f = rem[-1] / d[-1]
            q[k] = f
            for i, c in enumerate(d):
                rem[k + i] -= f * c
            rem.pop()
        return PolyQ(q), PolyQ(rem)

    def gcd(self, other: "PolyQ") -> "PolyQ":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        if a.is_zero():
            return a
        return a.scale(1 / a.coeffs[-1])  # monic

    def evaluate(self, t: Fraction) -> Fraction:
        out = Fraction(0)
        for c in reversed(self.coeffs):
            out = out * t + c
        return out

    def evaluate_mp(self, t, ctx):
        out = ctx.mpf(0)
        for c in reversed(self.coeffs):
            out = out * t + ctx.mpf(c.numerator) / ctx.mpf(c.denominator)
        return out

    def shift_variable(self, c: Fraction) -> "PolyQ":
        """Substitute t -> c*t."""
        c = Fraction(c)
        out, p = [], Fraction(1)
        for a in self.coeffs:
            out.append(a * p)
            p *= c
        return PolyQ(out)

    def inflate(self, d: int) -> "PolyQ":
        """Substitute t -> t^d."""
        if d < 1:
            raise ValueError("inflation degree must be >= 1")
        out = [Fraction(0)] * (len(self.coeffs) * d)
        for i, a in enumerate(self.coeffs):
            out[i * d] = a
        return PolyQ(out)

    def series_inverse(self, order: int) -> list[Fraction]:
        """Coefficients of 1/self up to t^order; constant term must be nonzero."""
        if self.is_zero() or self.coeffs[0] == 0:
            raise ZeroDivisionError("series inverse needs a unit constant term")
        inv = [Fraction(0)] * (order + 1)
        inv[0] = 1 / self.coeffs[0]
        for n in range(1, order + 1):
            s = Fraction(0)
            for k in range(1, min(n, len(self.coeffs) - 1) + 1):
                s += self.coeffs[k] * inv[n - k]
            inv[n] = -s / self.coeffs[0]
        return inv

    def __str__(self):
        return format_poly(self.coeffs)

    def __repr__(self):
        return f"PolyQ({list(self.coeffs)!r})"


def format_poly(coeffs: Sequence[Fraction]) -> str:
    """Canonical ASCII form, ascending powers: "1 - 1/2*t + t^2"."""
    if not coeffs or all(c == 0 for c in coeffs):
        return "0"
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            tpow = "t" if i == 1 else f"t^{i}"
            body = tpow if mag == 1 else f"{mag}*{tpow}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)


class RationalFunctionT:
    """A rational function in t, reduced, with canonical normalization.

    Invariants: gcd(num, den) = 1 over Q; den is a primitive integer
    polynomial with positive leading coefficient (den = 1 for polynomials).
    The residue size q of the place is carried along for the s -> s+1
    substitution t -> t/q.
    """

    __slots__ = ("num", "den", "q")

    def __init__(self, num: PolyQ, den: PolyQ = None, q: int | None = None):
        den = PolyQ.one() if den is None else den
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = num.gcd(den)
        if not g.is_zero() and g.degree > 0:
            num = num.divmod(g)[0]
            den = den.divmod(g)[0]
        # make den a primitive integer polynomial with positive leading coeff
        if den.is_zero():
            raise ZeroDivisionError("zero denominator after reduction")
        lcm = 1
        for c in den.coeffs:
            lcm = lcm * c.denominator // gcd(lcm, c.denominator)
        ints = [c * lcm for c in den.coeffs]
        content = 0
        for c in ints:
            content = gcd(content, c.numerator)
        content = content or 1
        scale = Fraction(lcm, content)
        if ints and ints[-1] < 0:
            scale = -scale
        self.num = num.scale(scale)
        self.den = den.scale(scale)
        self.q = q

    @staticmethod
    def one(q: int | None = None) -> "RationalFunctionT":
        return RationalFunctionT(PolyQ.one(), PolyQ.one(), q)

    @staticmethod
    def from_poly(p: PolyQ, q: int | None = None) -> "RationalFunctionT":
        return RationalFunctionT(p, PolyQ.one(), q)

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalFunctionT) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __mul__(self, other: "RationalFunctionT") -> "RationalFunctionT":
        return RationalFunctionT(self.num * other.num, self.den * other.den, self.q or other.q)

    def __truediv__(self, other: "RationalFunctionT") -> "RationalFunctionT":
        return RationalFunctionT(self.num * other.den, self.den * other.num, self.q or other.q)

    def __pow__(self, n: int) -> "RationalFunctionT":
        if n == 0:
            return RationalFunctionT.one(self.q)
        out = self
        base = self if n > 0 else RationalFunctionT(self.den, self.num, self.q)
        out = RationalFunctionT.one(self.q)
        for _ in range(abs(n)):
            out = out * base
        return out

    def evaluate(self, t: Fraction) -> Fraction:
        den = self.den.evaluate(t)
        if den == 0:
            raise ZeroDivisionError("pole at the evaluation point")
        return self.num.evaluate(t) / den

    def evaluate_mp(self, t, ctx):
        return self.num.evaluate_mp(t, ctx) / self.den.evaluate_mp(t, ctx)

    def inflate(self, d: int) -> "RationalFunctionT":
        return RationalFunctionT(self.num.inflate(d), self.den.inflate(d), self.q)

    def series(self, order: int) -> list[Fraction]:
        inv = self.den.series_inverse(order)
        out = [Fraction(0)] * (order + 1)
        for i, a in enumerate(self.num.coeffs):
            if a and i <= order:
                for j in range(order + 1 - i):
                    out[i + j] += a * inv[j]
        return out

    def degree_bound(self) -> int:
        return max(self.num.degree, 0) + max(self.den.degree, 0)

    def __str__(self):
        ns = format_poly(self.num.coeffs)
        if self.is_polynomial():
            return ns
        return f"({ns})/({format_poly(self.den.coeffs)})"

    def __repr__(self):
        return f"RationalFunctionT({self}, q={self.q})"


class SymbolicFactorProduct:
    """A product of rational-function factors with rational exponents.

    Returned by local-factor assembly when exponents do not clear to
    integers at a place ("non-polynomial local factor"); usable numerically
    through evaluate_mp, flagged for exact consumers.
    """

    def __init__(self, factors: Sequence[tuple[RationalFunctionT, Fraction]], q: int | None = None):
        self.factors = tuple((f, Fraction(e)) for f, e in factors)
        self.q = q
        self.non_polynomial = True

    def evaluate_mp(self, t, ctx):
        out = ctx.mpf(1)
        for f, e in self.factors:
            out *= ctx.power(f.evaluate_mp(t, ctx), ctx.mpf(e.numerator) / ctx.mpf(e.denominator))
        return out

    def __repr__(self):
        inner = " * ".join(f"({f})^({e})" for f, e in self.factors)
        return f"SymbolicFactorProduct[{inner}]"


# ---------------------------------------------------------------------------
# Q-factors of Frobenius modules
# ---------------------------------------------------------------------------

FrobModule = Union[FinAbFrob, FixedLattice]


def _rational_frobenius_matrix(A: FrobModule) -> IntMatrix:
    if isinstance(A, FinAbFrob):
        return A.rational_frobenius()
    if isinstance(A, FixedLattice):
        if A.frob is None:
            if A.rank == 0:
                return IntMatrix.zeros(0, 0)
            raise ValueError("fixed lattice carries no Frobenius")
        return A.frob
    raise TypeError(f"unsupported module type {type(A)!r}")


def det_one_minus_t_phi(phi: IntMatrix, q: int, shift: int = 0, inflate: int = 1) -> PolyQ:
    """det(I - (t^inflate / q^shift) * phi) as an exact polynomial in t."""
    coeffs = charpoly_reverse(phi)
    p = PolyQ(coeffs)
    if shift:
        p = p.shift_variable(Fraction(1, q ** shift))
    if inflate != 1:
        p = p.inflate(inflate)
    return p


def q_factor(A: FrobModule, q: int, shift: int = 0) -> RationalFunctionT:
    """Inverse characteristic polynomial of Frobenius on the rational shadow.

    Returns 1 / det(I - (t/q^shift) phi | A tensor Q); torsion contributes
    nothing.  shift >= 0 realizes s -> s + shift.
    """
    if shift < 0:
        raise ValueError("shift must be a nonnegative integer")
    phi = _rational_frobenius_matrix(A)
    den = det_one_minus_t_phi(phi, q, shift)
    return RationalFunctionT(PolyQ.one(), den, q)


# ---------------------------------------------------------------------------
# Local factors of constructible-torus data and K0 classes
# ---------------------------------------------------------------------------

def local_factor_torus(T, x, oracle=None):
    """Local L-factor at a place, as an exact RationalFunctionT.

    ``T`` is CTorusData, a TwoTermComplex, or a K0Class; ``x`` is a
    PlaceCtx (from a listing or an oracle) or the label of a listed place.
    The factor is Q_x(inv, s) / (Q_x(inv, s+1) * Q_x(fiber, s)) with
    inv the inertia invariants of the cocharacter lattice; at good places
    the fiber is the component-group model.  For K0 classes the generator
    factors are raised to their coefficients; if the exponents do not clear
    to integers the result is a SymbolicFactorProduct flagged
    non-polynomial.
    """
    from . import constructible as con

    if isinstance(T, con.K0Class):
        return _local_factor_k0(T, x)
    if isinstance(T, con.TwoTermComplex):
        num = local_factor_torus(T.target, x, oracle)
        den = local_factor_torus(T.source, x, oracle)
        return num / den
    if isinstance(T, con.CTorusData):
        ctx = T.resolve_place(x, oracle)
        return _local_factor_data(T, ctx)
    raise TypeError(f"unsupported object {type(T)!r}")


def _local_factor_data(T, ctx) -> RationalFunctionT:
    from .lattices import invariants, z_dual

    q = ctx.q
    fl = invariants(z_dual(T.characters), ctx.inertia, frobenius=ctx.frobenius)
    top = det_one_minus_t_phi(fl.frob, q, shift=1) if fl.rank else PolyQ.one()
    bottom = det_one_minus_t_phi(fl.frob, q, shift=0) if fl.rank else PolyQ.one()
    fiber = ctx.fiber if ctx.fiber is not None else T.component_model(ctx)
    phi_f = fiber.rational_frobenius()
    fiber_poly = det_one_minus_t_phi(phi_f, q, shift=0) if phi_f.rows else PolyQ.one()
    # Q(s) / (Q(s+1) Q(fiber, s)) = top * fiber_poly / bottom
    return RationalFunctionT(top * fiber_poly, bottom, q)


def _local_factor_k0(K, ctx):
    from . import constructible as con

    q = ctx.q
    bases: dict[tuple, tuple[RationalFunctionT, Fraction]] = {}

    def accumulate(rf: RationalFunctionT, e: Fraction):
        key = (rf.num.coeffs, rf.den.coeffs)
        if key in bases:
            old_rf, old_e = bases[key]
            bases[key] = (old_rf, old_e + e)
        else:
            bases[key] = (rf, Fraction(e))

    G = K.group
    D = ctx.decomposition_subgroup()
    for key, coeff in sorted(K.field_terms.items()):
        if coeff == 0:
            continue
        H = con.Subgroup(G, key, check=False)
        for g, e, f in con.place_double_cosets(D, ctx.inertia, H):
            # good factor of the split torus over the fixed field of H at an
            # upper place of residue degree f: 1 - (t/q)^f
            poly = PolyQ([1] + [Fraction(0)] * (f - 1) + [Fraction(-1, q ** f)])
            accumulate(RationalFunctionT(poly, PolyQ.one(), q), coeff)
    for pt in K.point_terms:
        if pt.coeff == 0 or pt.lower_label != ctx.label:
            continue
        f = _exact_log(pt.q, q)
        poly = det_one_minus_t_phi(pt.module.rational_frobenius(), q, shift=0, inflate=f)
        accumulate(RationalFunctionT(poly, PolyQ.one(), q), pt.coeff)

    out = RationalFunctionT.one(q)
    symbolic = []
    for rf, e in bases.values():
        if e == 0:
            continue
        if e.denominator == 1:
            out = out * (rf ** int(e))
        else:
            symbolic.append((rf, e))
    if symbolic:
        return SymbolicFactorProduct(list(symbolic) + [(out, Fraction(1))], q)
    return out


def _exact_log(qpow: int, q: int) -> int:
    f = 0
    v = 1
    while v < qpow:
        v *= q
        f += 1
    if v != qpow:
        raise ValueError(f"{qpow} is not a power of the residue size {q}")
    return max(f, 1)
