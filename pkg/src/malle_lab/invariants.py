"""Counting invariants for abelian extensions: index, orbits, a, b_d, cases.

The discriminant of a tamely ramified extension is governed by the index
ind(g) = |G|(1 - 1/ord(g)) of the inertia generator in the regular
representation.  Galois twists act on group elements through pairs
(automorphism, unit power); over Q the plain cyclotomic action uses every
unit.  Orbits of that action, weighted by an index function, produce the
exponents and log-powers of the counting asymptotics and the case analysis
for when lower order terms provably survive the surjection sieve.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .groups import (
    AbelianGroup,
    Element,
    element_order,
    frattini,
    make_group,
    subgroup_invariant_factors,
    subgroup_lattice,
)
from .numerics import smallest_prime_factor, unit_group_components


class InvarianceViolation(ValueError):
    """A custom weight table is not constant on an orbit."""


def index_of(G: AbelianGroup, g: Element) -> int:
    """Index of g in the regular representation: |G| (1 - 1/ord(g))."""
    n = G.order
    return n - n // element_order(G, g)


# -- weight functions ---------------------------------------------------------


@dataclass(frozen=True)
class WeightFn:
    """Weight on group elements; zero exactly at the identity.

    kind 'disc' is the regular-representation index, 'ram' weights every
    non-identity element 1, and 'custom' carries an explicit table keyed by
    element order (int key) or by element tuple.
    """

    kind: str
    table: tuple[tuple[object, Fraction], ...] | None = None

    @staticmethod
    def disc() -> "WeightFn":
        return WeightFn("disc")

    @staticmethod
    def ram() -> "WeightFn":
        return WeightFn("ram")

    @staticmethod
    def custom(G: AbelianGroup, mapping: dict) -> "WeightFn":
        table = tuple(sorted(((k, Fraction(v)) for k, v in mapping.items()), key=str))
        wt = WeightFn("custom", table)
        for key, value in table:
            if value < 0:
                raise ValueError("weights must be nonnegative")
        # invariance under invertible powers: check on the elements of G
        for g in G.elements():
            w = weight_of(G, wt, g)
            o = element_order(G, g)
            for u in range(1, o):
                if _gcd(u, o) == 1 and weight_of(G, wt, G.scale(u, g)) != w:
                    raise InvarianceViolation(
                        f"weight not invariant on the orbit of {g}"
                    )
            if (g == G.identity) != (w == 0):
                raise ValueError("weight must vanish exactly at the identity")
        return wt


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def weight_of(G: AbelianGroup, wt: WeightFn, g: Element) -> Fraction:
    if wt.kind == "disc":
        return Fraction(index_of(G, g))
    if wt.kind == "ram":
        return Fraction(0) if g == G.identity else Fraction(1)
    if wt.kind == "custom":
        if g == G.identity:
            return Fraction(0)
        assert wt.table is not None
        lookup = dict(wt.table)
        if g in lookup:
            return lookup[g]
        o = element_order(G, g)
        if o in lookup:
            return lookup[o]
        raise KeyError(f"custom weight table has no entry for {g} (order {o})")
    raise ValueError(f"unknown weight kind {wt.kind!r}")


# -- Galois actions -----------------------------------------------------------


AutMap = tuple[Element, ...]  # images of the basis elements


@dataclass(frozen=True)
class GaloisActionSpec:
    """Group action generated by pairs (automorphism, unit): t -> alpha(t)^u."""

    group: AbelianGroup
    generators: tuple[tuple[AutMap, int], ...]

    def apply(self, pair: tuple[AutMap, int], g: Element) -> Element:
        aut, u = pair
        G = self.group
        image = G.identity
        for coord, basis_image in zip(g, aut):
            image = G.add(image, G.scale(coord, basis_image))
        return G.scale(u, image)

    def orbit_of(self, g: Element) -> frozenset[Element]:
        seen = {g}
        frontier = [g]
        while frontier:
            new = []
            for h in frontier:
                for pair in self.generators:
                    x = self.apply(pair, h)
                    if x not in seen:
                        seen.add(x)
                        new.append(x)
            frontier = new
        return frozenset(seen)

    def closure_pairs(self) -> frozenset[tuple[AutMap, int]]:
        """All pairs generated under composition (identity included).

        Composition of (a1,u1) then (a2,u2) is t -> a2(a1(t))^(u1*u2); only
        meant for small groups and invariant checks.
        """
        G = self.group
        exp = G.exponent
        identity = (G.basis(), 1)

        def compose(p: tuple[AutMap, int], q: tuple[AutMap, int]) -> tuple[AutMap, int]:
            a1, u1 = p
            a2, u2 = q
            images = tuple(self.apply((a2, 1), img) for img in a1)
            return images, (u1 * u2) % exp if exp > 1 else 1

        seen = {identity}
        frontier = [identity]
        while frontier:
            new = []
            for p in frontier:
                for q in self.generators:
                    r = compose(p, q)
                    if r not in seen:
                        seen.add(r)
                        new.append(r)
            frontier = new
        return frozenset(seen)

    @staticmethod
    def trivial(G: AbelianGroup) -> "GaloisActionSpec":
        return GaloisActionSpec(G, ((G.basis(), 1),))

    @staticmethod
    def cyclotomic(G: AbelianGroup) -> "GaloisActionSpec":
        """The action g -> g^u for every unit u mod exp(G) (the K = Q case)."""
        exp = G.exponent
        gens = [(G.basis(), residue % exp) for _, _, residue, _ in unit_group_components(exp)]
        if not gens:
            gens = [(G.basis(), 1)]
        return GaloisActionSpec(G, tuple(gens))

    @staticmethod
    def from_units(G: AbelianGroup, units: list[int]) -> "GaloisActionSpec":
        exp = G.exponent
        gens = []
        for u in units:
            u %= exp if exp > 1 else 1
            if exp > 1 and _gcd(u, exp) != 1:
                raise ValueError(f"{u} is not a unit mod {exp}")
            gens.append((G.basis(), u if exp > 1 else 1))
        if not gens:
            gens = [(G.basis(), 1)]
        return GaloisActionSpec(G, tuple(gens))


@dataclass(frozen=True)
class OrbitData:
    representative: Element
    size: int
    weight: Fraction
    element_order: int
    members: tuple[Element, ...]


@lru_cache(maxsize=None)
def _orbit_partition(action: GaloisActionSpec) -> tuple[frozenset[Element], ...]:
    G = action.group
    remaining = set(G.elements())
    parts = []
    while remaining:
        g = min(remaining)
        orb = action.orbit_of(g)
        parts.append(orb)
        remaining -= orb
    return tuple(parts)


def orbits(
    G: AbelianGroup, action: GaloisActionSpec, wt: WeightFn
) -> tuple[OrbitData, ...]:
    """Partition of all of G (identity included) into action orbits."""
    if action.group != G:
        raise ValueError("action is attached to a different group")
    out = []
    for part in _orbit_partition(action):
        members = tuple(sorted(part))
        rep = members[0]
        w = weight_of(G, wt, rep)
        for other in members[1:]:
            if weight_of(G, wt, other) != w:
                raise InvarianceViolation(
                    f"weight is not constant on the orbit of {rep}"
                )
        out.append(
            OrbitData(rep, len(members), w, element_order(G, rep), members)
        )
    assert sum(o.size for o in out) == G.order
    out.sort(key=lambda o: (o.weight, o.representative))
    return tuple(out)


def nonidentity_orbits(
    G: AbelianGroup, action: GaloisActionSpec, wt: WeightFn
) -> tuple[OrbitData, ...]:
    return tuple(o for o in orbits(G, action, wt) if o.weight != 0)


def weight_spectrum(
    G: AbelianGroup, action: GaloisActionSpec, wt: WeightFn
) -> tuple[Fraction, ...]:
    return tuple(sorted({o.weight for o in nonidentity_orbits(G, action, wt)}))


def a_invariant(G: AbelianGroup, action: GaloisActionSpec, wt: WeightFn) -> Fraction:
    """Minimal weight of a non-identity orbit (the main-term exponent is 1/a)."""
    if G.order <= 1:
        raise ValueError("a is undefined for the trivial group")
    return min(o.weight for o in nonidentity_orbits(G, action, wt))


def b_d(
    G: AbelianGroup, action: GaloisActionSpec, wt: WeightFn, d: Fraction | int
) -> int:
    """Number of non-identity orbits of weight exactly d."""
    target = Fraction(d)
    return sum(1 for o in nonidentity_orbits(G, action, wt) if o.weight == target)


ZetaOrderHook = Callable[[int, Fraction], int]


def default_zeta_order_hook(m: int, x: Fraction) -> int:
    """Order of vanishing of the degree-phi(m) cyclotomic zeta at x: assume 0."""
    return 0


def bbar_d(
    G: AbelianGroup,
    d: int,
    zeta_ord_hook: ZetaOrderHook = default_zeta_order_hook,
) -> int:
    """b_d minus hypothetical real-zero corrections, clamped at zero.

    The correction sums the hook once per cyclotomic orbit of smaller index,
    evaluated at the scaled point ind(o)/d; the hook returns the assumed
    order of vanishing (0 everywhere by default).
    """
    action = GaloisActionSpec.cyclotomic(G)
    wt = WeightFn.disc()
    spectrum = weight_spectrum(G, action, wt)
    if Fraction(d) not in spectrum:
        raise ValueError(f"{d} is not in the index spectrum of {G}")
    base = b_d(G, action, wt, d)
    correction = 0
    for o in nonidentity_orbits(G, action, wt):
        if o.weight < d:
            ord_val = zeta_ord_hook(o.element_order, Fraction(o.weight, d))
            if ord_val < 0:
                raise ValueError("zeta order hook returned a negative order")
            correction += ord_val
    return max(base - correction, 0)


def conjectured_pole_order(
    G: AbelianGroup,
    d: int,
    zeta_ord_hook: ZetaOrderHook = default_zeta_order_hook,
) -> int:
    """Predicted exact pole order at s = 1/d: max of bbar over Frattini-over subgroups.

    A subgroup H enters with the scaled index d / [G:H] and is skipped when
    that value is not an index of H itself.
    """
    action = GaloisActionSpec.cyclotomic(G)
    wt = WeightFn.disc()
    if Fraction(d) not in weight_spectrum(G, action, wt):
        raise ValueError(f"{d} is not in the index spectrum of {G}")
    phi = frattini(G).elements
    best = 0
    for H in subgroup_lattice(G):
        if not phi <= H.elements or H.order == 1:
            continue
        index = G.order // H.order
        if d % index:
            continue
        H_abs = subgroup_invariant_factors(H)
        scaled = d // index
        spectrum = weight_spectrum(
            H_abs, GaloisActionSpec.cyclotomic(H_abs), wt
        )
        if Fraction(scaled) not in spectrum:
            continue
        best = max(best, bbar_d(H_abs, scaled, zeta_ord_hook))
    return best


NONVANISHING_CASES = ("case_i", "case_ii", "case_iii", "case_iv", "none")


def nonvanishing_case(G: AbelianGroup, d: int) -> str:
    """First applicable non-vanishing case for the pole at s = 1/d over Q.

    i: d is the minimal index.  ii: everything of smaller index sits in the
    Frattini subgroup.  iii: G = C2 x (odd) and smaller-index elements sit in
    Frattini union the 2-torsion.  iv: G cyclic and d the index of a
    generator.  'none' otherwise.
    """
    action = GaloisActionSpec.cyclotomic(G)
    wt = WeightFn.disc()
    if Fraction(d) not in weight_spectrum(G, action, wt):
        raise ValueError(f"{d} is not in the index spectrum of {G}")
    n = G.order
    ell = smallest_prime_factor(n)
    if d == n - n // ell:
        return "case_i"
    phi = frattini(G).elements
    smaller = [g for g in G.elements() if g != G.identity and index_of(G, g) < d]
    if all(g in phi for g in smaller):
        return "case_ii"
    if n % 4 == 2:
        two_torsion = {g for g in G.elements() if G.scale(2, g) == G.identity}
        if all(g in phi or g in two_torsion for g in smaller):
            return "case_iii"
    if G.is_cyclic() and d == n - 1:
        return "case_iv"
    return "none"


def invariant_summary(
    G: AbelianGroup,
    ordering: str = "disc",
    units: list[int] | None = None,
) -> dict:
    """All invariants of one group in a JSON-friendly dict (CLI backend)."""
    if G.order <= 1:
        raise ValueError("invariants are undefined for the trivial group")
    wt = WeightFn.disc() if ordering == "disc" else WeightFn.ram()
    action = (
        GaloisActionSpec.cyclotomic(G)
        if units is None
        else GaloisActionSpec.from_units(G, units)
    )
    spectrum = weight_spectrum(G, action, wt)
    summary = {
        "group": str(G),
        "order": G.order,
        "ordering": ordering,
        "a": str(a_invariant(G, action, wt)),
        "spectrum": [str(d) for d in spectrum],
        "b": {str(d): b_d(G, action, wt, d) for d in spectrum},
    }
    if ordering == "disc" and units is None:
        summary["bbar"] = {str(d): bbar_d(G, int(d)) for d in spectrum}
        summary["conjectured_pole_order"] = {
            str(d): conjectured_pole_order(G, int(d)) for d in spectrum
        }
        summary["case"] = {str(d): nonvanishing_case(G, int(d)) for d in spectrum}
    return summary


def cyclic_group(n: int) -> AbelianGroup:
    return make_group([n]) if n > 1 else AbelianGroup(())
