import random

import pytest

from malle_lab.groups import AbelianGroup, make_group
from malle_lab.numerics import factorize


def _partitions(n: int):
    if n == 0:
        yield ()
        return
    for first in range(n, 0, -1):
        for rest in _partitions(n - first):
            if not rest or rest[0] <= first:
                yield (first,) + rest


def abelian_groups_of_order(n: int) -> list[AbelianGroup]:
    """Every abelian group of order n, one per isomorphism class."""
    if n == 1:
        return [AbelianGroup(())]
    per_prime = []
    for p, e in factorize(n):
        per_prime.append([(p, part) for part in _partitions(e)])
    groups = [[]]
    for options in per_prime:
        groups = [g + [opt] for g in groups for opt in options]
    out = []
    for combo in groups:
        factors = []
        for p, part in combo:
            factors.extend(p**k for k in part)
        out.append(make_group(factors))
    return out


def all_abelian_groups(max_order: int, min_order: int = 2) -> list[AbelianGroup]:
    out = []
    for n in range(min_order, max_order + 1):
        out.extend(abelian_groups_of_order(n))
    return out


def random_abelian_group(rng: random.Random, max_order: int) -> AbelianGroup:
    while True:
        factors = [rng.randint(2, max_order) for _ in range(rng.randint(1, 3))]
        G = make_group(factors)
        if 2 <= G.order <= max_order:
            return G


@pytest.fixture
def rng():
    return random.Random(20260808)
