from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

from netshield.game import Instance

DATA = Path(__file__).parent / "data"


def path3(alpha=1, beta=1) -> Instance:
    # u=0, w1=1, w2=2: edges w1-w2 (bought by w1), w2-u (bought by w2); w2 immune
    return Instance.build(3, 0, {1: [2], 2: [0]}, [2], alpha, beta)


def chain4(alpha=1, beta=1) -> Instance:
    # path u-x-y-z with u=0, x=1, y=2, z=3; y immune
    return Instance.build(4, 0, {1: [0, 2], 2: [3]}, [2], alpha, beta)


def star4(alpha=1, beta=Fraction(1, 2)) -> Instance:
    # immune centre c=1 bought every edge; leaves u=0, l1=2, l2=3
    return Instance.build(4, 0, {1: [0, 2, 3]}, [1], alpha, beta)


def allvuln(alpha=1, beta=1) -> Instance:
    return Instance.build(5, 0, {1: [0], 2: [1], 3: [2], 4: [3]}, [], alpha, beta)


@pytest.fixture
def named():
    return {"path3": path3(), "chain4": chain4(), "star4": star4()}


PRICES = [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(7, 3), Fraction(1, 3), Fraction(5, 2)]


def random_connected(rng: random.Random, n: int, extra: float, immun: float,
                     alpha=1, beta=1) -> Instance:
    """Random spanning tree on the others plus extra edges; u attached at random."""
    links: dict = {v: set() for v in range(n)}
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        a, b = order[i], order[rng.randrange(i)]
        owner = b if a == 0 else a if b == 0 else rng.choice((a, b))
        links[owner].add(a + b - owner)
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < extra and b not in links[a] and a not in links[b]:
                owner = b if a == 0 else a if b == 0 else rng.choice((a, b))
                links[owner].add(a + b - owner)
    immunised = [v for v in range(1, n) if rng.random() < immun]
    return Instance.build(n, 0, links, immunised, alpha, beta)


@st.composite
def connected_instances(draw, min_n: int = 1, max_n: int = 7):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    extra = draw(st.sampled_from([0.0, 0.15, 0.4, 0.8]))
    immun = draw(st.sampled_from([0.2, 0.5, 0.8]))
    alpha = draw(st.sampled_from(PRICES))
    beta = draw(st.sampled_from(PRICES))
    return random_connected(random.Random(seed), n, extra, immun, alpha, beta)
