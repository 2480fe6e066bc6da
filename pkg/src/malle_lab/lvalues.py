"""Dirichlet L-values and cyclotomic Dedekind zeta values at real points.

The zeta function of the m-th cyclotomic field factors over the characters
mod m into Dirichlet L-functions, which are evaluated through Hurwitz zeta
sums (Euler-Maclaurin under the hood), so real points inside the critical
strip and residues at 1 are both available to high precision.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from mpmath import mp

from .numerics import precision_digits, unit_group_components

AngleTable = tuple[tuple[int, Fraction], ...]


@lru_cache(maxsize=None)
def characters_mod(m: int) -> tuple[AngleTable, ...]:
    """All characters of (Z/m)^* as tables ((a, angle), ...) over units a.

    Angles are rationals in [0, 1); the character value is exp(2 pi i angle).
    """
    comps = unit_group_components(m)
    orders = [order for _, _, _, order in comps]
    residues = [residue for _, _, residue, _ in comps]

    items: list[tuple[int, tuple[int, ...]]] = []

    def enumerate_units(i: int, residue: int, exps: tuple[int, ...]) -> None:
        if i == len(residues):
            items.append((residue, exps))
            return
        r = residue
        for k in range(orders[i]):
            enumerate_units(i + 1, r, exps + (k,))
            r = r * residues[i] % m

    enumerate_units(0, 1 % m if m > 1 else 0, ())

    chars: list[AngleTable] = []

    def enumerate_chars(i: int, exps: tuple[int, ...]) -> None:
        if i == len(orders):
            table = []
            for a, xs in items:
                angle = Fraction(0)
                for e, x, o in zip(exps, xs, orders):
                    angle += Fraction(e * x, o)
                table.append((a, angle % 1))
            chars.append(tuple(sorted(table)))
            return
        for e in range(orders[i]):
            enumerate_chars(i + 1, exps + (e,))

    enumerate_chars(0, ())
    return tuple(chars)


@lru_cache(maxsize=None)
def primitive_from(m: int, table: AngleTable) -> tuple[int, AngleTable]:
    """Conductor and primitive value table of a character given mod m."""
    for f in range(1, m + 1):
        if m % f:
            continue
        if all(angle == 0 for a, angle in table if a % f == 1 % f):
            prim: dict[int, Fraction] = {}
            for a, angle in table:
                prim.setdefault(a % f if f > 1 else 1, angle)
            return f, tuple(sorted(prim.items()))
    raise AssertionError("no conductor found")


def _root_of_unity(angle: Fraction):
    if angle == 0:
        return mp.mpf(1)
    return mp.expjpi(2 * mp.mpf(angle.numerator) / angle.denominator)


def _l_value(x: Fraction, f: int, prim: AngleTable):
    """L(x, chi) for the primitive character chi of conductor f at real x > 0."""
    if f == 1:
        return mp.zeta(mp.mpf(x.numerator) / x.denominator)
    if x == 1:
        total = mp.mpc(0)
        for a, angle in prim:
            total -= _root_of_unity(angle) * mp.digamma(mp.mpf(a) / f)
        return total / f
    xs = mp.mpf(x.numerator) / x.denominator
    total = mp.mpc(0)
    for a, angle in prim:
        total += _root_of_unity(angle) * mp.zeta(xs, mp.mpf(a) / f)
    return total * mp.power(f, -xs)


@lru_cache(maxsize=None)
def _dedekind_zeta_value(m: int, x: Fraction, dps: int):
    with mp.workdps(dps + 10):
        acc = mp.mpc(1)
        for table in characters_mod(m):
            f, prim = primitive_from(m, table)
            acc *= _l_value(x, f, prim)
        assert abs(acc.imag) < mp.mpf(10) ** (-dps), "zeta value should be real"
        return acc.real


def dedekind_zeta_value(m: int, x: Fraction | int, dps: int | None = None):
    """zeta of Q(zeta_m) at the real point x != 1, as a real mpf."""
    x = Fraction(x)
    if x == 1:
        raise ValueError("pole at 1; use dedekind_zeta_residue")
    return _dedekind_zeta_value(m, x, dps or precision_digits())


@lru_cache(maxsize=None)
def _dedekind_zeta_residue(m: int, dps: int):
    with mp.workdps(dps + 10):
        acc = mp.mpc(1)
        for table in characters_mod(m):
            f, prim = primitive_from(m, table)
            if f == 1:
                continue
            acc *= _l_value(Fraction(1), f, prim)
        assert abs(acc.imag) < mp.mpf(10) ** (-dps)
        return acc.real


def dedekind_zeta_residue(m: int, dps: int | None = None):
    """Residue at s = 1 of zeta of Q(zeta_m): product of L(1, chi), chi != 1."""
    return _dedekind_zeta_residue(m, dps or precision_digits())


def riemann_zeta_value(x: Fraction | int, dps: int | None = None):
    x = Fraction(x)
    if x == 1:
        raise ValueError("pole at 1")
    with mp.workdps((dps or precision_digits()) + 10):
        return mp.zeta(mp.mpf(x.numerator) / x.denominator)
