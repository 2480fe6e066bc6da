"""Finite abelian groups in invariant-factor form.

Elements are residue tuples, subgroups are explicit element sets, and the
subgroup poset carries a Moebius function used by the surjection sieve.
Groups are fully enumerated below a configurable cap; large groups beyond
the cap are only touched through divisor arithmetic elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .numerics import factorize, radical

ENUMERATION_CAP = 10_000

Element = tuple[int, ...]


class GroupTooLargeError(ValueError):
    """An operation would enumerate a group beyond the configured cap."""


@dataclass(frozen=True)
class AbelianGroup:
    """Product of cyclic groups Z/d_1 x ... x Z/d_k with d_1 | d_2 | ... | d_k."""

    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        fs = self.invariant_factors
        if any(d < 2 for d in fs):
            raise ValueError("invariant factors must be at least 2")
        if any(b % a for a, b in zip(fs, fs[1:])):
            raise ValueError(f"{fs} is not a divisibility chain; use make_group")

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def identity(self) -> Element:
        return (0,) * self.rank

    def is_cyclic(self) -> bool:
        return self.rank <= 1

    def add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.invariant_factors))

    def neg(self, a: Element) -> Element:
        return tuple((-x) % d for x, d in zip(a, self.invariant_factors))

    def scale(self, k: int, a: Element) -> Element:
        return tuple((k * x) % d for x, d in zip(a, self.invariant_factors))

    def contains(self, a: Element) -> bool:
        return len(a) == self.rank and all(
            0 <= x < d for x, d in zip(a, self.invariant_factors)
        )

    def basis(self) -> tuple[Element, ...]:
        k = self.rank
        return tuple(
            tuple(1 if i == j else 0 for j in range(k)) for i in range(k)
        )

    def elements(self) -> tuple[Element, ...]:
        return _elements(self)

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "C1"
        return "x".join(f"C{d}" for d in self.invariant_factors)


@lru_cache(maxsize=None)
def _elements(G: AbelianGroup) -> tuple[Element, ...]:
    if G.order > ENUMERATION_CAP:
        raise GroupTooLargeError(
            f"|G| = {G.order} exceeds the enumeration cap {ENUMERATION_CAP}"
        )
    return tuple(product(*(range(d) for d in G.invariant_factors)))


def make_group(factors: list[int] | tuple[int, ...]) -> AbelianGroup:
    """Normalize a multiset of cyclic orders to invariant factors.

    Works over the integers by gcd/lcm pivoting on the diagonal, so C4 x C6
    comes out as [2, 12]. Factors equal to 1 are rejected except that the
    empty list yields the trivial group.
    """
    vals = list(factors)
    for v in vals:
        if v < 2:
            raise ValueError(f"cyclic factor {v} < 2 is not allowed")
    changed = True
    while changed:
        changed = False
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                a, b = vals[i], vals[j]
                if b % a:
                    g = math.gcd(a, b)
                    vals[i], vals[j] = g, a * b // g
                    changed = True
        vals.sort()
    return AbelianGroup(tuple(v for v in vals if v > 1))


def element_order(G: AbelianGroup, g: Element) -> int:
    if not G.contains(g):
        raise ValueError(f"{g} is not an element of {G}")
    order = 1
    for x, d in zip(g, G.invariant_factors):
        order = math.lcm(order, d // math.gcd(d, x))
    return order


@dataclass(frozen=True)
class Subgroup:
    """Subgroup given by its full element set (equality is set equality)."""

    group: AbelianGroup
    elements: frozenset[Element]
    generators: tuple[Element, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def contains_subgroup(self, other: "Subgroup") -> bool:
        return other.elements <= self.elements

    def sorted_elements(self) -> tuple[Element, ...]:
        return tuple(sorted(self.elements))


def span(G: AbelianGroup, gens: tuple[Element, ...]) -> Subgroup:
    """Closure of a generator set under the group operation."""
    seen = {G.identity}
    frontier = [G.identity]
    while frontier:
        new = []
        for h in frontier:
            for g in gens:
                x = G.add(h, g)
                if x not in seen:
                    seen.add(x)
                    new.append(x)
        frontier = new
    return Subgroup(G, frozenset(seen), gens)


@lru_cache(maxsize=None)
def subgroup_lattice(G: AbelianGroup) -> tuple[Subgroup, ...]:
    """Every subgroup exactly once, sorted by (order, element list)."""
    elems = _elements(G)
    trivial = frozenset({G.identity})
    found: dict[frozenset, tuple[Element, ...]] = {trivial: ()}
    frontier = [trivial]
    while frontier:
        new: list[frozenset] = []
        for hset in frontier:
            gens = found[hset]
            for g in elems:
                if g in hset:
                    continue
                extended = span(G, gens + (g,)).elements
                if extended not in found:
                    found[extended] = gens + (g,)
                    new.append(extended)
        frontier = new
    subs = [Subgroup(G, hset, gens) for hset, gens in found.items()]
    subs.sort(key=lambda H: (H.order, H.sorted_elements()))
    return tuple(subs)


def full_subgroup(G: AbelianGroup) -> Subgroup:
    return Subgroup(G, frozenset(_elements(G)), G.basis())


def trivial_subgroup(G: AbelianGroup) -> Subgroup:
    return Subgroup(G, frozenset({G.identity}), ())


def frattini(G: AbelianGroup) -> Subgroup:
    """Intersection of the maximal subgroups; for abelian G this is rad(|G|)*G."""
    if G.order == 1:
        return trivial_subgroup(G)
    r = radical(G.order)
    gens = tuple(G.scale(r, e) for e in G.basis())
    return span(G, gens)


@lru_cache(maxsize=None)
def _moebius_table(G: AbelianGroup) -> dict[frozenset, int]:
    """mu(H, G) for every subgroup H, by downward recursion from the top."""
    lattice = subgroup_lattice(G)
    by_size = sorted(lattice, key=lambda H: -H.order)
    table: dict[frozenset, int] = {}
    phi = frattini(G).elements
    for H in by_size:
        if H.order == G.order:
            table[H.elements] = 1
            continue
        acc = 0
        for K in lattice:
            if K.order > H.order and H.elements < K.elements:
                acc += table[K.elements]
        table[H.elements] = -acc
        # the subgroup-poset Moebius function vanishes below the Frattini subgroup
        if table[H.elements] != 0:
            assert phi <= H.elements, "nonzero mu on a subgroup missing Frattini"
    return table


def moebius_subgroup(H: Subgroup, G: AbelianGroup) -> int:
    if H.group != G:
        raise ValueError("subgroup belongs to a different group")
    table = _moebius_table(G)
    if H.elements not in table:
        raise ValueError("not a subgroup of the ambient group")
    return table[H.elements]


def sieve_terms(G: AbelianGroup) -> tuple[tuple[Subgroup, int], ...]:
    """Subgroups with nonzero Moebius weight, i.e. those containing Frattini."""
    table = _moebius_table(G)
    out = [(H, table[H.elements]) for H in subgroup_lattice(G) if table[H.elements]]
    return tuple(out)


def subgroup_invariant_factors(H: Subgroup) -> AbelianGroup:
    """Abstract isomorphism type of a subgroup from its element orders.

    For each prime p the partition of the p-part is recovered from the
    counts #{h : p^k h = 0} = p^(sum_i min(lambda_i, k)).
    """
    n = H.order
    if n == 1:
        return AbelianGroup(())
    G = H.group
    parts: dict[int, list[int]] = {}
    for p, e in factorize(n):
        log_counts = []
        for k in range(e + 1):
            pk = p**k
            count = sum(1 for h in H.elements if G.scale(pk, h) == G.identity)
            log_counts.append(round(math.log(count, p)))
        # log_counts[k] - log_counts[k-1] = number of partition parts >= k
        ge = [log_counts[k] - log_counts[k - 1] for k in range(1, e + 1)]
        partition = []
        for k, cnt in enumerate(ge, start=1):
            nxt = ge[k] if k < len(ge) else 0
            partition.extend([k] * (cnt - nxt))
        parts[p] = sorted(partition, reverse=True)
    rank = max(len(v) for v in parts.values())
    factors = []
    for i in range(rank):
        d = 1
        for p, partition in parts.items():
            if i < len(partition):
                d *= p ** partition[i]
        factors.append(d)
    return make_group([f for f in factors if f > 1])


def aut_order(G: AbelianGroup) -> int:
    """|Aut(G)| via the prime-by-prime formula for abelian p-groups."""
    total = 1
    for p, _ in factorize(G.order):
        exps = sorted(
            e for d in G.invariant_factors for q, e in factorize(d) if q == p
        )
        n = len(exps)
        d_k = [max(l + 1 for l in range(n) if exps[l] == exps[k]) for k in range(n)]
        c_k = [min(l + 1 for l in range(n) if exps[l] == exps[k]) for k in range(n)]
        count = 1
        for k in range(n):
            count *= p ** d_k[k] - p**k
        for j in range(n):
            count *= p ** (exps[j] * (n - d_k[j]))
        for i in range(n):
            count *= p ** ((exps[i] - 1) * (n - c_k[i] + 1))
        total *= count
    return total


# -- duals -------------------------------------------------------------------
#
# A character of G is an exponent tuple (k_1, ..., k_r) sending the i-th
# basis element to a primitive d_i-th root of unity raised to k_i.  The dual
# group has the same invariant factors, so characters reuse Element tuples.


def character_angle(G: AbelianGroup, chi: Element, g: Element) -> Fraction:
    """chi(g) as a rational angle in [0, 1): chi(g) = exp(2*pi*i*angle)."""
    total = Fraction(0)
    for k, x, d in zip(chi, g, G.invariant_factors):
        total += Fraction(k * x, d)
    return total % 1


def character_is_trivial_on(G: AbelianGroup, chi: Element, g: Element) -> bool:
    return character_angle(G, chi, g) == 0


def dual_group(G: AbelianGroup) -> AbelianGroup:
    return AbelianGroup(G.invariant_factors)


def parse_group_literal(text: str) -> AbelianGroup:
    """Parse CLI group literals: 'C4', 'C2xC6', or '[2,6]'."""
    s = text.strip()
    if s.startswith("["):
        if not s.endswith("]"):
            raise ValueError(f"malformed group literal {text!r}")
        body = s[1:-1].strip()
        factors = [int(tok) for tok in body.split(",")] if body else []
        return make_group(factors)
    factors = []
    for part in s.split("x"):
        part = part.strip()
        if not part or part[0] not in "Cc" or not part[1:].isdigit():
            raise ValueError(f"malformed group literal {text!r}")
        value = int(part[1:])
        if value == 1:
            continue
        factors.append(value)
    return make_group(factors)
