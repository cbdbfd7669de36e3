"""Artin conductors, base-change conductors, and the graded-line shadow of
the determinant of the Lie algebra."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath as mp

from .constructible import BadPlaceData, K0Class
from .groups import Subgroup
from .lattices import GLattice, invariants, z_dual


class ConductorError(ValueError):
    pass


def artin_conductor(V: GLattice, v: BadPlaceData) -> Fraction:
    """Artin conductor exponent a_v(V ⊗ Q) = Σ_i (|G_i|/|G_0|)·dim(V/V^{G_i}).

    The sum runs over the lower-numbering ramification filtration of v.  A
    missing filtration is allowed only at tame places (residue char not
    dividing |inertia|), where the sum collapses to dim(V/V^{G_0}).
    """
    I = v.inertia
    if all(V.action[h].is_identity() for h in I.members):
        return Fraction(0)
    if v.filtration is None:
        if v.is_wild():
            raise ConductorError(f"ramification filtration required at wild place {v.label}")
        chain: Sequence[Subgroup] = (I,)
    else:
        chain = v.filtration
    g0 = I.order
    total = Fraction(0)
    for Gi in chain:
        if Gi.order == 1:
            continue
        codim = V.rank - invariants(V, Gi).rank
        total += Fraction(Gi.order, g0) * codim
    return total


def base_change_conductor(Y: GLattice, places: Sequence[BadPlaceData],
                          dps: int = 50) -> tuple[dict[str, Fraction], mp.mpf]:
    """Per-place base-change conductors c_v = a_v(cocharacters)/2 and the
    total Σ c_v · log q_v as a multiprecision real."""
    cochar = z_dual(Y)
    out: dict[str, Fraction] = {}
    with mp.workdps(dps):
        total = mp.mpf(0)
        for v in places:
            c = artin_conductor(cochar, v) / 2
            out[v.label] = c
            total += mp.mpf(c.numerator) / mp.mpf(c.denominator) * mp.log(v.q)
    return out, total


@dataclass
class GradedLine:
    """(integer grade, positive real covolume), the numeric shadow of the
    determinant line; ``exact_tag`` is (rational, n) meaning rational·sqrt(n)
    when the covolume is known in that exact form, and ``integral_grade`` is
    False for virtual objects whose rank failed to clear to an integer (the
    rational grade is kept for diagnostics)."""

    grade: Fraction
    covolume: mp.mpf
    exact_tag: tuple[Fraction, int] | None = None
    integral_grade: bool = True


def _extract_square(n: int) -> tuple[int, int]:
    """n = s^2 * m with m squarefree; returns (s, m)."""
    s, m, d = 1, n, 2
    while d * d <= m:
        while m % (d * d) == 0:
            m //= d * d
            s *= d
        d += 1
    return s, m


def delta_add(K: K0Class, fields: Mapping[tuple[int, ...], "object"],
              mode: str = "nf", genus: int = 0, degree_data: Mapping[tuple[int, ...], int] | None = None,
              dps: int = 50) -> GradedLine:
    """Graded-line invariant of a K0 class.

    Number-field mode: a field generator over K_H contributes grade [K_H:Q]
    and covolume sqrt(|disc|); point generators contribute (0, 1); rational
    coefficients scale grades (flagged non-integral if the total fails to be
    an integer) and act as real powers on covolumes.  ``fields`` maps each
    field-term key to a record with ``degree`` and ``disc`` attributes.

    Function-field mode: the Riemann-Roch shadow; grade = Σ a_H·((1-g)·1 +
    deg_H) using the supplied determinant degree data (default 0), covolume
    q-power free (set to 1 here; the q-power bookkeeping lives with the
    curve data).
    """
    grade = Fraction(0)
    with mp.workdps(dps):
        cov = mp.mpf(1)
        disc_power: Fraction | None = Fraction(1)
        disc_accum = Fraction(1)
        for key, coeff in sorted(K.field_terms.items()):
            if mode == "ff":
                deg = (degree_data or {}).get(key, 0)
                grade += coeff * ((1 - genus) + deg)
                continue
            try:
                rec = fields[key]
            except KeyError:
                raise ConductorError(f"no field record supplied for the field term {key}") from None
            grade += coeff * rec.degree
            d = abs(rec.disc)
            cov *= mp.power(mp.mpf(d), mp.mpf(coeff.numerator) / (2 * coeff.denominator))
            if coeff.denominator == 1:
                disc_accum *= Fraction(d) ** coeff.numerator
            else:
                disc_power = None
        exact = None
        if mode == "nf" and disc_power is not None:
            # covolume = sqrt(a/b) = (s/b)*sqrt(m) with a*b = s^2 * m
            s, m = _extract_square(disc_accum.numerator * disc_accum.denominator)
            exact = (Fraction(s, disc_accum.denominator), m)
        if mode == "ff":
            cov = mp.mpf(1)
        integral = grade.denominator == 1
        return GradedLine(grade, cov, exact, integral)
