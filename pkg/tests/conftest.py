import random

import pytest

from owlab import FinSubset, Heisenberg, IntLattice, NatMonoid


def rand_element(sg, rng, span=6):
    if isinstance(sg, Heisenberg):
        return (rng.randint(-span, span), rng.randint(-span, span), rng.randint(-span, span))
    lo = 0 if isinstance(sg, NatMonoid) else -span
    return tuple(rng.randint(lo, span) for _ in range(sg.dim))


def rand_set(sg, rng, max_size, span=6, min_size=1):
    size = rng.randint(min_size, max_size)
    return FinSubset(rand_element(sg, rng, span) for _ in range(size))


FAMILIES = [IntLattice(2), NatMonoid(2), Heisenberg()]


@pytest.fixture(params=FAMILIES, ids=lambda sg: sg.spec_string)
def family(request):
    return request.param


@pytest.fixture
def rng():
    return random.Random(20240611)
