"""Deterministic generators shared by the test modules.

Everything is driven by an explicitly seeded ``random.Random`` so every
test run samples the identical instances.
"""

from __future__ import annotations

import random

from qlat.bt_tree import Vertex, neighbors, standard_vertex
from qlat.exact_padic import Mat2
from qlat.local_orders import LocalOrder, order_closure


def make_rng(seed: int) -> random.Random:
    return random.Random(seed)


def random_matrix(rng: random.Random, p: int, span: int = 2) -> Mat2:
    """Integral 2x2 matrix; entries biased toward multiples of p."""

    def entry() -> int:
        k = rng.randrange(-(p**span), p**span + 1)
        if rng.random() < 0.3:
            k *= p
        return k

    return Mat2.of([[entry(), entry()], [entry(), entry()]])


def random_order(rng: random.Random, p: int, ngens: int = 2) -> LocalOrder:
    """A random integral order (closure always stabilizes inside M2(Z_(p)))."""
    return order_closure([random_matrix(rng, p) for _ in range(ngens)], p)


def random_vertex(rng: random.Random, p: int, steps: int) -> Vertex:
    """Endpoint of a random walk from the standard vertex (<= steps edges)."""
    v = standard_vertex(p)
    for _ in range(rng.randrange(steps + 1)):
        v = rng.choice(neighbors(v))
    return v


def random_vertex_at(rng: random.Random, start: Vertex, dist: int) -> Vertex:
    """A vertex at exactly the given distance: a non-backtracking walk."""
    cur, prev = start, None
    for _ in range(dist):
        options = [n for n in neighbors(cur) if n != prev]
        cur, prev = rng.choice(options), cur
    return cur


def spine_vertex(shape) -> Vertex:
    """A vertex guaranteed to lie in the (nonempty) shape."""
    from qlat.branches import Fan, Full, ThickApartment, ThickPath, ThickRay

    if isinstance(shape, ThickPath):
        return shape.path[0]
    if isinstance(shape, (ThickRay, Fan)):
        return shape.base
    if isinstance(shape, ThickApartment):
        return shape.anchor
    if isinstance(shape, Full):
        return standard_vertex(shape.p)
    raise ValueError(f"no spine vertex for {shape!r}")


def connected_members(shape, seed: Vertex, radius: int) -> frozenset[Vertex]:
    """All shape members within `radius` of a member seed.

    Branches are connected subtrees, so members within the ball are exactly
    what a membership-restricted BFS from the seed reaches; this avoids
    scanning the whole (exponentially large) ball.
    """
    from qlat.branches import shape_member

    assert shape_member(shape, seed)
    seen = {seed}
    frontier = [(seed, 0)]
    while frontier:
        nxt = []
        for u, dist in frontier:
            if dist == radius:
                continue
            for n in neighbors(u):
                if n not in seen and shape_member(shape, n):
                    seen.add(n)
                    nxt.append((n, dist + 1))
        frontier = nxt
    return frozenset(seen)
