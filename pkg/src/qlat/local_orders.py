"""Orders in the algebra of 2x2 rational matrices, localized at p.

An order is a unital subring that is finitely generated as a Z_(p)-module.
`order_closure` saturates a generating set into the canonical module basis
of the generated order, detecting unbounded (non-integral) input.  The
maximal orders are the lattice stabilizers: one per tree vertex.  A shifted
Eichler order is Z_(p) + p^r * E for E the intersection of the two maximal
orders at the endpoints of a path of length d; `decompose_shifted_eichler`
recognizes members of that family exactly, and `three_maximal_orders`
produces three maximal orders whose intersection realizes a given shifted
Eichler order.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .bt_tree import Vertex, distance, geodesic, neighbors
from .errors import NotShiftedEichler, Unbounded
from .exact_padic import (
    Mat2,
    Module4,
    conjugate,
    module_hnf,
    module_intersect,
    reduce_mod_ppow,
    valuation,
)

CLOSURE_MAX_ROUNDS = 64
_DIVERGENCE_WINDOW = 8


@dataclass(frozen=True)
class LocalOrder:
    """An order presented by generators plus its canonical module basis."""

    p: int
    generators: tuple[Mat2, ...]
    closure: Module4

    @property
    def rank(self) -> int:
        return self.closure.rank


def order_closure(gens, p: int, max_rounds: int = CLOSURE_MAX_ROUNDS) -> LocalOrder:
    """Saturate {1} + gens into the order they generate.

    Raises `Unbounded` (with a growth certificate) if the module keeps
    growing: the minimum entry valuation strictly decreasing over a window
    of rounds, or no stabilization within the round cap.  For bounded input
    the iteration stabilizes and the result is multiplicatively closed.
    """
    gens = tuple(gens)
    mats = [Mat2.identity(), *gens]
    span = module_hnf(mats, p)
    minvals = []
    for _ in range(max_rounds):
        prods = [g * b for g in gens for b in span.basis]
        grown = module_hnf(list(span.basis) + prods, p)
        if grown == span:
            return LocalOrder(p, gens, span)
        span = grown
        minvals.append(min(b.min_valuation(p) for b in span.basis))
        window = minvals[-_DIVERGENCE_WINDOW:]
        if len(window) == _DIVERGENCE_WINDOW and all(
            x > y for x, y in zip(window, window[1:])
        ):
            raise Unbounded(
                {
                    "reason": "entry valuations strictly decreasing",
                    "min_valuations": minvals,
                    "basis": [[str(x) for x in b.entries] for b in span.basis],
                }
            )
    raise Unbounded(
        {
            "reason": f"no stabilization within {max_rounds} rounds",
            "min_valuations": minvals,
            "basis": [[str(x) for x in b.entries] for b in span.basis],
        }
    )


def order_from_module(module: Module4, generators=()) -> LocalOrder:
    return LocalOrder(module.p, tuple(generators), module)


def maximal_order_module(v: Vertex) -> Module4:
    """The stabilizer order of the lattice class v, as a canonical module."""
    g = v.basis()
    units = [
        Mat2.of([[1, 0], [0, 0]]),
        Mat2.of([[0, 1], [0, 0]]),
        Mat2.of([[0, 0], [1, 0]]),
        Mat2.of([[0, 0], [0, 1]]),
    ]
    return module_hnf([g * e * g.inverse() for e in units], v.p)


def shift_order(order: LocalOrder, t: int) -> LocalOrder:
    """Z_(p) + p^t * O for an order O; again an order, no resaturation needed."""
    if t < 0:
        raise ValueError("shift must be >= 0")
    p = order.p
    scaled = tuple(b.scale(Fraction(p) ** t) for b in order.closure.basis)
    module = module_hnf([Mat2.identity(), *scaled], p)
    return LocalOrder(p, scaled, module)


def shifted_eichler_module(v1: Vertex, v2: Vertex, r: int) -> Module4:
    """Canonical module of Z_(p) + p^r * (D_v1 intersect D_v2)."""
    inner = module_intersect(maximal_order_module(v1), maximal_order_module(v2))
    p = v1.p
    mats = [Mat2.identity()] + [b.scale(Fraction(p) ** r) for b in inner.basis]
    return module_hnf(mats, p)


def contains_shifted(v: Vertex, h: Mat2, r: int) -> bool:
    """Is h in Z_(p) + p^r * D_v?

    In the coordinates of the lattice class this says: all entries local
    integers, both off-diagonal entries and the diagonal difference
    divisible by p^r.
    """
    m = conjugate(h, v.basis())
    p = v.p
    if any(valuation(x, p) < 0 for x in m.entries):
        return False
    return (
        valuation(m.m01, p) >= r
        and valuation(m.m10, p) >= r
        and valuation(m.m00 - m.m11, p) >= r
    )


# ---------------------------------------------------------------------------
# Shifted Eichler orders


@dataclass(frozen=True)
class ShiftedEichler:
    """Invariants (endpoint pair, level d, shift r) of Z + p^r * Eichler(d)."""

    endpoints: tuple[Vertex, Vertex]
    level: int
    shift: int

    def __post_init__(self):
        v1, v2 = self.endpoints
        if self.shift < 0:
            raise ValueError("shift must be >= 0")
        if distance(v1, v2) != self.level:
            raise ValueError("level must equal the distance between endpoints")

    @property
    def p(self) -> int:
        return self.endpoints[0].p

    def module(self) -> Module4:
        v1, v2 = self.endpoints
        return shifted_eichler_module(v1, v2, self.shift)


def decompose_shifted_eichler(order: LocalOrder) -> ShiftedEichler:
    """Recognize Z + p^r * E for an Eichler order E, or raise NotShiftedEichler.

    The branch of the order must be a path-with-thickness, the candidate
    invariants are read off its envelope, and the candidate is confirmed by
    exact module equality.
    """
    from .branches import ThickPath, branch_of_order, eichler_envelope

    if order.rank != 4:
        raise NotShiftedEichler(f"rank is {order.rank}, need 4")
    shape = branch_of_order(order)
    if not isinstance(shape, ThickPath):
        raise NotShiftedEichler(f"branch is {type(shape).__name__}, not a thick path")
    v1, v2, level, shift = eichler_envelope(shape)
    if shifted_eichler_module(v1, v2, shift) != order.closure:
        raise NotShiftedEichler("module differs from its branch envelope order")
    return ShiftedEichler((v1, v2), level, shift)


def _extend_away(start: Vertex, banned_first, steps: int):
    """Walk `steps` from start: first step outside `banned_first`, then
    non-backtracking; the canonically least option each time.  Returns
    (endpoint, first_step_or_None)."""
    if steps == 0:
        return start, None
    first = min(n for n in neighbors(start) if n not in banned_first)
    prev, cur = start, first
    for _ in range(steps - 1):
        prev, cur = cur, min(n for n in neighbors(cur) if n != prev)
    return cur, first


def three_maximal_orders(order: ShiftedEichler) -> tuple[Vertex, Vertex, Vertex]:
    """Three vertices whose maximal orders intersect in the given order.

    The first two hang `shift` steps beyond the endpoints (pointing away
    from the path), the third hangs `shift` steps off the middle of the path
    in a fresh direction.  The construction is verified by module equality;
    if the pinned middle anchor fails, anchors and fresh directions are
    scanned deterministically.
    """
    v1, v2 = order.endpoints
    d, r = order.level, order.shift
    path = geodesic(v1, v2)
    target = order.module()

    banned3 = {path[1]} if d > 0 else set()
    d3, f3 = _extend_away(v1, banned3, r)
    banned4 = {path[-2]} if d > 0 else ({f3} if f3 is not None else set())
    d4, f4 = _extend_away(v2, banned4, r)

    def verify(a: Vertex, b: Vertex, c: Vertex) -> bool:
        inter = module_intersect(
            module_intersect(maximal_order_module(a), maximal_order_module(b)),
            maximal_order_module(c),
        )
        return inter == target

    def fresh_banned(anchor: Vertex, i: int) -> set[Vertex]:
        banned = set()
        if i > 0:
            banned.add(path[i - 1])
        if i + 1 < len(path):
            banned.add(path[i + 1])
        if anchor == d3 or (anchor == v1 and f3 is not None):
            banned.add(f3 if f3 is not None else d3)
        if anchor == d4 or (anchor == v2 and f4 is not None):
            banned.add(f4 if f4 is not None else d4)
        banned.discard(None)
        return banned

    mid = d // 2
    anchor = path[mid]
    d5, _ = _extend_away(anchor, fresh_banned(anchor, mid), r)
    if verify(d3, d4, d5):
        return d3, d4, d5

    # Deterministic fallback: scan anchors from the middle outward, then all
    # fresh directions at each anchor.
    order_idx = sorted(range(len(path)), key=lambda i: (abs(i - mid), i))
    for i in order_idx:
        anchor = path[i]
        banned = fresh_banned(anchor, i)
        for first in sorted(n for n in neighbors(anchor) if n not in banned):
            if r == 0:
                cand = anchor
            else:
                prev, cur = anchor, first
                for _ in range(r - 1):
                    prev, cur = cur, min(n for n in neighbors(cur) if n != prev)
                cand = cur
            if verify(d3, d4, cand):
                return d3, d4, cand
            if r == 0:
                break
    raise AssertionError("no realizing triple found")  # pragma: no cover


# ---------------------------------------------------------------------------
# Residue field detection


def _char_poly_residues(m: Mat2, p: int) -> tuple[int, int]:
    """(trace, det) of m reduced mod p; well-defined on elements of a
    bounded order even when matrix entries are non-integral, because trace
    and det of order elements are local integers."""
    s = int(reduce_mod_ppow(m.trace(), p, 1))
    n = int(reduce_mod_ppow(m.det(), p, 1))
    return s, n


def _residue_poly_irreducible(s: int, n: int, p: int) -> bool:
    return all((z * z - s * z + n) % p != 0 for z in range(p))


def has_unramified_residue_field(order: LocalOrder, sample_limit: int = 20000) -> bool:
    """Does the order contain an element whose residue generates the
    quadratic extension of the residue field?

    Equivalent to the reduction mod p of some Z_(p)-combination of the basis
    having an irreducible quadratic characteristic polynomial.  For p <= 13
    all residue combinations are enumerated; for larger p a seeded sample is
    used.
    """
    p = order.p
    basis = order.closure.basis
    k = len(basis)

    def test(coeffs) -> bool:
        m = Mat2.zero()
        for c, b in zip(coeffs, basis):
            if c:
                m = m + b.scale(c)
        if m.is_scalar():
            return False
        s, n = _char_poly_residues(m, p)
        return _residue_poly_irreducible(s, n, p)

    if p <= 13:
        for coeffs in itertools.product(range(p), repeat=k):
            if any(coeffs) and test(coeffs):
                return True
        return False
    rng = random.Random(0)
    for _ in range(sample_limit):
        coeffs = tuple(rng.randrange(p) for _ in range(k))
        if any(coeffs) and test(coeffs):
            return True
    return False
