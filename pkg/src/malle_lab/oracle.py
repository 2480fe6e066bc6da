"""Brute-force counting of abelian extensions of Q through Dirichlet characters.

Every continuous surjection from the absolute Galois group of Q onto an
abelian group G corresponds, by duality and Kronecker-Weber, to exactly one
injection of the dual group of G into the group of Dirichlet characters.
Enumerating character tuples therefore counts surjections with no field
arithmetic at all: the discriminant is the product over the dual group of
the conductors of the image characters, and the product-of-ramified-primes
invariant is the radical of their lcm.

Characters are stored by prime-power local components on coherent unit
group generators, so multiplication, conductors, and primitivity are all
componentwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iproduct

from .groups import AbelianGroup, aut_order, make_group
from .numerics import euler_phi, factorize, primes_up_to, unit_group_components

DEFAULT_NODE_BUDGET = 50_000_000


class BudgetExceededError(RuntimeError):
    """Enumeration grew past the configured node budget."""


@dataclass(frozen=True)
class UnitGroupStructure:
    """(Z/q)^* with explicit generator residues for its cyclic components."""

    modulus: int
    generator_residues: tuple[int, ...]
    generator_orders: tuple[int, ...]
    group: AbelianGroup


def unit_group_structure(q: int) -> UnitGroupStructure:
    if q < 1:
        raise ValueError("modulus must be positive")
    comps = unit_group_components(q)
    residues = tuple(residue for _, _, residue, _ in comps)
    orders = tuple(order for _, _, _, order in comps)
    return UnitGroupStructure(q, residues, orders, make_group(list(orders)))


# A local component at p is (p, k, exps): exponents of the character on the
# generators of (Z/p^k)^*, one generator for odd p, the pair (-1, 5) for
# p = 2 with k >= 3, just -1 for k = 2.


@lru_cache(maxsize=None)
def _local_orders(p: int, k: int) -> tuple[int, ...]:
    if p == 2:
        if k == 1:
            return ()
        if k == 2:
            return (2,)
        return (2, 2 ** (k - 2))
    return (euler_phi(p**k),)


def _local_conductor(p: int, k: int, exps: tuple[int, ...]) -> int:
    orders = _local_orders(p, k)
    if p != 2:
        (n,) = orders
        (e,) = exps
        if e % n == 0:
            return 1
        order = n // math.gcd(n, e)
        v = 0
        while order % p == 0:
            order //= p
            v += 1
        return p ** (v + 1)
    if k == 1 or not exps:
        return 1
    if k == 2:
        return 4 if exps[0] % 2 else 1
    sign, wild = exps
    w = (2 ** (k - 2)) // math.gcd(2 ** (k - 2), wild)
    if w == 1:
        return 4 if sign % 2 else 1
    return 4 * w


@dataclass(frozen=True)
class DirichletCharacter:
    """Finite-order character of (Z/q)^*, stored by prime-power components."""

    components: tuple[tuple[int, int, tuple[int, ...]], ...]

    @property
    def modulus(self) -> int:
        return math.prod(p**k for p, k, _ in self.components) if self.components else 1

    @property
    def conductor(self) -> int:
        c = 1
        for p, k, exps in self.components:
            c *= _local_conductor(p, k, exps)
        return c

    @property
    def order(self) -> int:
        total = 1
        for p, k, exps in self.components:
            for e, n in zip(exps, _local_orders(p, k)):
                total = math.lcm(total, n // math.gcd(n, e))
        return total

    def is_trivial(self) -> bool:
        return self.order == 1

    def ramified_primes(self) -> tuple[int, ...]:
        return tuple(
            p for p, k, exps in self.components if _local_conductor(p, k, exps) > 1
        )

    def mul(self, other: "DirichletCharacter") -> "DirichletCharacter":
        by_p: dict[int, tuple[int, tuple[int, ...]]] = {}
        for p, k, exps in self.components + other.components:
            if p not in by_p:
                by_p[p] = (k, exps)
                continue
            k0, exps0 = by_p[p]
            k_new = max(k, k0)
            a = _lift(p, k0, exps0, k_new)
            b = _lift(p, k, exps, k_new)
            orders = _local_orders(p, k_new)
            by_p[p] = (k_new, tuple((x + y) % n for x, y, n in zip(a, b, orders)))
        comps = tuple(sorted((p, k, exps) for p, (k, exps) in by_p.items()))
        return DirichletCharacter(comps).primitive()

    def power(self, e: int) -> "DirichletCharacter":
        if e == 1:
            return self.primitive()
        comps = []
        for p, k, exps in self.components:
            orders = _local_orders(p, k)
            comps.append((p, k, tuple((x * e) % n for x, n in zip(exps, orders))))
        return DirichletCharacter(tuple(comps)).primitive()

    def primitive(self) -> "DirichletCharacter":
        comps = []
        dirty = False
        for p, k, exps in self.components:
            f = _local_conductor(p, k, exps)
            if f == p**k:
                comps.append((p, k, exps))
                continue
            dirty = True
            if f == 1:
                continue
            k_f = 0
            ff = f
            while ff > 1:
                ff //= p
                k_f += 1
            comps.append((p, k_f, _shrink(p, k, exps, k_f)))
        if not dirty:
            return self
        return DirichletCharacter(tuple(sorted(comps)))

    def induced_mod(self, q: int) -> "DirichletCharacter":
        """The same character viewed mod q (q a multiple of the conductor)."""
        prim = self.primitive()
        if q % prim.conductor:
            raise ValueError("modulus must be a multiple of the conductor")
        by_p = {p: (k, exps) for p, k, exps in prim.components}
        comps = []
        for p, e in factorize(q):
            if p in by_p:
                k, exps = by_p[p]
                comps.append((p, e, _lift(p, k, exps, e)))
            else:
                comps.append((p, e, tuple(0 for _ in _local_orders(p, e))))
        return DirichletCharacter(tuple(sorted(comps)))

    def generator_values(self) -> tuple[tuple[int, int], ...]:
        """Values on the unit-group generators as (order, exponent) pairs."""
        out = []
        for p, k, exps in self.components:
            for e, n in zip(exps, _local_orders(p, k)):
                out.append((n, e % n))
        return tuple(out)


def _lift(p: int, k_from: int, exps: tuple[int, ...], k_to: int) -> tuple[int, ...]:
    """Rescale exponents when the modulus grows from p^k_from to p^k_to."""
    if k_to == k_from:
        return exps
    orders_to = _local_orders(p, k_to)
    if p != 2:
        orders_from = _local_orders(p, k_from)
        return (exps[0] * (orders_to[0] // orders_from[0]),)
    if k_from == 1:
        return tuple(0 for _ in orders_to)
    if k_from == 2:
        sign = exps[0]
        return (sign,) if len(orders_to) == 1 else (sign, 0)
    scale = orders_to[1] // _local_orders(2, k_from)[1]
    return (exps[0], exps[1] * scale)


def _shrink(p: int, k_from: int, exps: tuple[int, ...], k_to: int) -> tuple[int, ...]:
    """Inverse of _lift for a character whose conductor divides p^k_to."""
    if k_to == k_from:
        return exps
    if p != 2:
        scale = _local_orders(p, k_from)[0] // _local_orders(p, k_to)[0]
        assert exps[0] % scale == 0
        return (exps[0] // scale,)
    if k_to == 2:
        return (exps[0] % 2,)
    scale = _local_orders(2, k_from)[1] // _local_orders(2, k_to)[1]
    assert exps[1] % scale == 0
    return (exps[0] % 2, exps[1] // scale)


TRIVIAL_CHARACTER = DirichletCharacter(())


def conductor(chi: DirichletCharacter) -> int:
    """Primitive conductor: the smallest modulus the character lives on."""
    return chi.conductor


@lru_cache(maxsize=None)
def _char_power(chi: DirichletCharacter, e: int) -> DirichletCharacter:
    return chi.power(e)


@lru_cache(maxsize=None)
def _local_primitive_atoms(p: int, k: int, e: int) -> tuple[DirichletCharacter, ...]:
    """Primitive characters mod p^k of order dividing e."""
    out: list[DirichletCharacter] = []
    if p != 2:
        n = _local_orders(p, k)[0]
        g = math.gcd(n, e)
        for t in range(1, g):
            exps = (n // g * t,)
            if _local_conductor(p, k, exps) == p**k:
                out.append(DirichletCharacter(((p, k, exps),)))
    elif k == 2:
        if e % 2 == 0:
            out.append(DirichletCharacter(((2, 2, (1,)),)))
    elif k == 3:
        if e % 2 == 0:
            out.append(DirichletCharacter(((2, 3, (0, 1)),)))
            out.append(DirichletCharacter(((2, 3, (1, 1)),)))
    elif k >= 4:
        wild_order = 2 ** (k - 2)
        if e % wild_order == 0:
            for sign in (0, 1):
                for w in range(1, wild_order, 2):
                    out.append(DirichletCharacter(((2, k, (sign, w)),)))
    return tuple(out)


def characters_up_to(e: int, f_max: int) -> list[DirichletCharacter]:
    """All primitive nontrivial characters of order dividing e, conductor <= f_max.

    Built multiplicatively from prime-power atoms; the result is sorted by
    conductor with deterministic tie order.
    """
    if e < 1 or f_max < 1:
        raise ValueError("order and conductor bounds must be positive")
    atoms_by_p: list[tuple[int, list[DirichletCharacter]]] = []
    for p in primes_up_to(f_max):
        local: list[DirichletCharacter] = []
        k = 1
        while p**k <= f_max:
            local.extend(_local_primitive_atoms(p, k, e))
            k += 1
        if local:
            local.sort(key=lambda chi: chi.conductor)
            atoms_by_p.append((p, local))
    out: list[DirichletCharacter] = []

    def extend(start: int, comps: tuple, cond: int) -> None:
        if cond > 1:
            out.append(DirichletCharacter(comps))
        for i in range(start, len(atoms_by_p)):
            p, local = atoms_by_p[i]
            if cond * p > f_max:
                break
            for atom in local:
                c = cond * atom.conductor
                if c > f_max:
                    break
                extend(i + 1, comps + atom.components, c)

    extend(0, (), 1)
    out.sort(key=lambda chi: (chi.conductor, chi.components))
    return out


# -- counting -----------------------------------------------------------------


@dataclass(frozen=True)
class CountReport:
    group: AbelianGroup
    bound: int
    ordering: str
    surjections: int
    fields: int
    histogram: tuple[tuple[int, int], ...] | None

    def as_dict(self) -> dict:
        out = {
            "group": str(self.group),
            "X": self.bound,
            "ordering": self.ordering,
            "surjections": self.surjections,
            "fields": self.fields,
        }
        if self.histogram is not None:
            out["histogram_rows"] = len(self.histogram)
        return out


def _integer_root(x: int, k: int) -> int:
    """Largest r with r^k <= x."""
    if k == 1:
        return x
    r = int(round(x ** (1.0 / k)))
    while r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


@lru_cache(maxsize=None)
def _dual_levels(factors: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Nonzero dual exponent tuples grouped by their last nonzero coordinate."""
    k = len(factors)
    levels: list[list[tuple[int, ...]]] = [[] for _ in range(k)]
    for exps in iproduct(*(range(d) for d in factors)):
        if not any(exps):
            continue
        last = max(i for i, v in enumerate(exps) if v)
        levels[last].append(exps)
    return tuple(tuple(level) for level in levels)


def count_surjections(
    G: AbelianGroup,
    x_bound: int,
    ordering: str = "disc",
    histogram: bool = False,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> CountReport:
    """Count surjections from the Galois group of Q onto G with invariant <= X.

    Images of the dual-group generators run over Dirichlet characters of
    exact order d_i (injectivity on the i-th cyclic piece demands that), the
    partial discriminant over the dual elements seen so far prunes the tree,
    and full injectivity is checked on every nonzero dual element.
    """
    if x_bound < 1:
        raise ValueError("the bound must be at least 1")
    if ordering not in ("disc", "ram"):
        raise ValueError("ordering must be disc or ram")
    factors = G.invariant_factors
    if not factors:
        return CountReport(G, x_bound, ordering, 1, 1, ((1, 1),) if histogram else None)

    pools: dict[int, list[DirichletCharacter]] = {}
    for d in sorted(set(factors)):
        if ordering == "disc":
            f_cap = _integer_root(x_bound, euler_phi(d))
        else:
            # order-d characters ramified within {p : p | ram} have conductor
            # at most ram * d * 2 (one extra power of p per p | d, two at 2)
            f_cap = 2 * d * x_bound
        pools[d] = [chi for chi in characters_up_to(d, f_cap) if chi.order == d]

    levels = _dual_levels(factors)
    hist: dict[int, int] = {}
    count = 0
    nodes = 0

    def level_invariant(
        images: list[DirichletCharacter], i: int
    ) -> tuple[int, frozenset[int]] | None:
        """(conductor product, ramified primes) over dual elements at level i."""
        value = 1
        primes: set[int] = set()
        for exps in levels[i]:
            img = TRIVIAL_CHARACTER
            for chi, e in zip(images, exps):
                if e:
                    part = _char_power(chi, e)
                    img = part if img.is_trivial() else img.mul(part)
            if img.is_trivial():
                return None  # fails injectivity
            value *= img.conductor
            primes.update(img.ramified_primes())
        return value, frozenset(primes)

    def walk(i: int, images: list[DirichletCharacter], disc: int, primes: frozenset[int]) -> None:
        nonlocal count, nodes
        if i == len(factors):
            inv = disc if ordering == "disc" else math.prod(sorted(primes)) if primes else 1
            if inv <= x_bound:
                count += 1
                if histogram:
                    hist[inv] = hist.get(inv, 0) + 1
            return
        d_i = factors[i]
        phi_d = euler_phi(d_i)
        for chi in pools[d_i]:
            nodes += 1
            if nodes > node_budget:
                raise BudgetExceededError(f"enumeration exceeded {node_budget} nodes")
            if ordering == "disc" and disc * chi.conductor**phi_d > x_bound:
                break  # pools are sorted by conductor
            extended = images + [chi]
            got = level_invariant(extended, i)
            if got is None:
                continue
            value, new_primes = got
            if ordering == "disc":
                new_disc = disc * value
                if new_disc > x_bound:
                    continue
                walk(i + 1, extended, new_disc, primes)
            else:
                merged = primes | new_primes
                if math.prod(sorted(merged)) > x_bound:
                    continue
                walk(i + 1, extended, 1, merged)

    walk(0, [], 1, frozenset())
    aut = aut_order(G)
    assert count % aut == 0, "surjection count must be divisible by |Aut(G)|"
    hist_out = tuple(sorted(hist.items())) if histogram else None
    return CountReport(G, x_bound, ordering, count, count // aut, hist_out)
