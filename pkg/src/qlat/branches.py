"""Branches: the vertex sets on which an order embeds with a given depth.

For a single integral non-scalar matrix `a` and a vertex v, the margin

    mu(a, v) = min(v_p(m01), v_p(m10), v_p(m00 - m11)),  m = g^-1 a g,

measures how deep `a` sits inside the shifted maximal order at v: `a` lies
in Z_(p) + p^r * D_v exactly when mu(a, v) >= r.  The sets {mu >= 0} come in
four exactly-representable families, each carried by a margin function that
changes by at most 1 along edges and is concave along geodesics:

- `ThickPath`: all vertices within t of a finite path (field case),
- `ThickApartment`: within t of the axis fixed by a split semisimple matrix
  (ends are rational lines when the eigenvalues are rational, otherwise the
  axis is carried by a witness matrix),
- `Fan`: a horoball around one boundary line (nilpotent-plus-scalar case),
- `Full` / `Empty`.

Intersections of these shapes are computed exactly: margins are concave and
1-Lipschitz, so a bounded intersection is the lower level set of its summit
plateau (a path), and shapes sharing one boundary line resolve to a
`ThickRay`.  The branch of a whole order is the fold of intersections over
its basis; deepening by r erodes every margin by r.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import inf, isqrt

from .bt_tree import (
    End,
    Vertex,
    canonical_vertex,
    dist_to_ray,
    distance,
    end_from_vector,
    neighbors,
    standard_vertex,
    step_toward_end,
    vertex_budget,
    walk_toward_end,
    ball,
)
from .errors import BudgetExceeded, EmptyShape, InfiniteUnsupported, NotFinite
from .exact_padic import (
    Mat2,
    commute,
    conjugate,
    is_local_square_rat,
    is_rational_square,
    reduce_mod_ppow,
    unit_part,
    valuation,
)
from .local_orders import LocalOrder, contains_shifted, order_closure

# ---------------------------------------------------------------------------
# Shapes


@dataclass(frozen=True)
class Full:
    p: int


@dataclass(frozen=True)
class Empty:
    p: int


@dataclass(frozen=True)
class ThickPath:
    """Vertices within t of a finite path (path listed in canonical order)."""

    path: tuple[Vertex, ...]
    t: int

    def __post_init__(self):
        if not self.path:
            raise ValueError("thick path needs at least one vertex")
        if self.t < 0:
            raise ValueError("thickness must be >= 0")
        for u, w in zip(self.path, self.path[1:]):
            if distance(u, w) != 1:
                raise ValueError("path vertices must be consecutive neighbors")
        if self.path[0] > self.path[-1]:
            object.__setattr__(self, "path", tuple(reversed(self.path)))

    @property
    def p(self) -> int:
        return self.path[0].p

    @property
    def level(self) -> int:
        return len(self.path) - 1


@dataclass(frozen=True)
class ThickRay:
    """Vertices within t of the ray from base toward one boundary line."""

    base: Vertex
    end: End
    t: int

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("thickness must be >= 0")

    @property
    def p(self) -> int:
        return self.base.p


@dataclass(frozen=True, eq=False)
class ThickApartment:
    """Vertices within t of the axis of a split semisimple witness.

    `ends` is the sorted pair of rational boundary lines when the witness
    has rational eigenvalues, and None when the eigenvalues are irrational
    (then only the witness pins the axis down, and equality of shapes is
    decided by whether the witnesses commute).  `axis_margin` is the value
    of mu(witness, .) on the axis and `anchor` is a vertex on the axis.
    """

    p: int
    ends: tuple[End, End] | None
    t: int
    witness: Mat2 = field(repr=False)
    axis_margin: int = field(repr=False)
    anchor: Vertex = field(repr=False)

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("thickness must be >= 0")
        if self.ends is not None and tuple(sorted(self.ends)) != self.ends:
            object.__setattr__(self, "ends", tuple(sorted(self.ends)))

    def __eq__(self, other):
        if not isinstance(other, ThickApartment):
            return NotImplemented
        if self.p != other.p or self.t != other.t:
            return False
        if (self.ends is None) != (other.ends is None):
            return False
        if self.ends is not None:
            return self.ends == other.ends
        return commute(self.witness, other.witness)

    def __hash__(self):
        return hash((self.p, self.ends, self.t))


@dataclass(frozen=True)
class Fan:
    """A horoball: vertices whose slack toward one boundary line is >= 0.

    The base is canonical (the zero-slack vertex reached by a deterministic
    walk from the standard vertex), so structural equality is set equality.
    """

    base: Vertex
    end: End

    @property
    def p(self) -> int:
        return self.base.p


Shape = Full | Empty | ThickPath | ThickRay | ThickApartment | Fan


# ---------------------------------------------------------------------------
# Margins


def mu_margin(a: Mat2, v: Vertex):
    """Largest r with a in Z_(p) + p^r * D_v (may be negative or infinite)."""
    m = conjugate(a, v.basis())
    p = v.p
    return min(
        valuation(m.m01, p),
        valuation(m.m10, p),
        valuation(m.m00 - m.m11, p),
    )


def fan_slack(base: Vertex, end: End, v: Vertex) -> int:
    """Horoball slack of v relative to the zero level through base."""
    k = distance(v, base) + 2
    tip = walk_toward_end(base, end, k)
    return k - distance(v, tip)


def shape_margin(s: Shape, v: Vertex):
    """How far v sits inside s; membership is margin >= 0.

    Margins change by at most 1 along tree edges and are concave along
    geodesics, which is what the intersection engine relies on.
    """
    if isinstance(s, Full):
        return inf
    if isinstance(s, Empty):
        return -inf
    if isinstance(s, ThickPath):
        return s.t - min(distance(v, x) for x in s.path)
    if isinstance(s, ThickRay):
        return s.t - dist_to_ray(v, s.base, s.end)
    if isinstance(s, ThickApartment):
        return s.t - (s.axis_margin - mu_margin(s.witness, v))
    if isinstance(s, Fan):
        return fan_slack(s.base, s.end, v)
    raise TypeError(f"not a shape: {s!r}")


def shape_member(s: Shape, v: Vertex) -> bool:
    return shape_margin(s, v) >= 0


def canonical_fan(p: int, end: End, slack_at) -> Fan:
    """Fan with the canonical base for an intrinsic horoball slack function."""
    v = standard_vertex(p)
    s = slack_at(v)
    if s < 0:
        for _ in range(-s):
            v = step_toward_end(v, end)
    elif s > 0:
        for _ in range(s):
            toward = step_toward_end(v, end)
            v = min(n for n in neighbors(v) if n != toward)
    assert slack_at(v) == 0
    return Fan(v, end)


# ---------------------------------------------------------------------------
# Classification of a single matrix


def _quadratic_ext_disc_val(disc, p: int) -> int:
    """Valuation of the discriminant of the quadratic extension generated by
    a root of x^2 = disc (disc not a local square)."""
    v = valuation(disc, p)
    if p != 2:
        return 0 if v % 2 == 0 else 1
    if v % 2 != 0:
        return 3
    u = int(reduce_mod_ppow(unit_part(disc, 2), 2, 3))
    assert u != 1, "square discriminant has no field extension"
    return 0 if u == 5 else 2


def _climb(a: Mat2, start: Vertex, ceiling=None) -> tuple[Vertex, int]:
    """Greedy margin ascent from start; returns (summit vertex, margin)."""
    cur = start
    m = mu_margin(a, cur)
    while ceiling is None or m < ceiling:
        better = [n for n in neighbors(cur) if mu_margin(a, n) > m]
        if not better:
            break
        cur = min(better)
        m += 1
        assert mu_margin(a, cur) == m
    return cur, m


def _stable_start(a: Mat2, p: int) -> Vertex:
    """A vertex whose lattice is stable under a: the class of (e, a*e)."""
    if a.m10 != 0:
        cols = [[1, a.m00], [0, a.m10]]
    elif a.m01 != 0:
        cols = [[0, a.m01], [1, a.m11]]
    else:  # diagonal: any vertex works
        return standard_vertex(p)
    return canonical_vertex(Mat2.of(cols), p)


def classify_single(a: Mat2, p: int) -> Shape:
    """Exact shape of {v : a in D_v}, i.e. the depth-0 branch of Z_(p)[a].

    Scalars give Full; nilpotent-plus-scalar gives a Fan toward the image
    line; split semisimple gives the ThickApartment around the axis of the
    eigenline pair; the field (non-split) case gives a ThickPath whose stem
    is a vertex or an edge.  Raises Unbounded for non-integral input.
    """
    order_closure([a], p)  # validates integrality
    if a.is_scalar():
        return Full(p)
    disc = a.discriminant()
    half_trace = a.trace() / 2

    if disc == 0:
        nil = a - Mat2.scalar(half_trace)
        col = (nil.m00, nil.m10)
        if col == (0, 0):
            col = (nil.m01, nil.m11)
        end = end_from_vector(col)
        return canonical_fan(p, end, lambda v: mu_margin(nil, v))

    v_disc = valuation(disc, p)
    if is_local_square_rat(disc, p):
        t = v_disc // 2
        if is_rational_square(disc):
            root = Fraction(isqrt(disc.numerator), isqrt(disc.denominator))
            eigs = ((a.trace() + root) / 2, (a.trace() - root) / 2)
            vecs = []
            for lam in eigs:
                w = (a.m01, lam - a.m00)
                if w == (0, 0):
                    w = (lam - a.m11, a.m10)
                vecs.append(w)
            ends = tuple(sorted(end_from_vector(w) for w in vecs))
            anchor = canonical_vertex(
                Mat2.of([[vecs[0][0], vecs[1][0]], [vecs[0][1], vecs[1][1]]]), p
            )
            assert mu_margin(a, anchor) == t
            return ThickApartment(p, ends, t, witness=a, axis_margin=t, anchor=anchor)
        anchor, reached = _climb(a, _stable_start(a, p), ceiling=t)
        assert reached == t
        return ThickApartment(p, None, t, witness=a, axis_margin=t, anchor=anchor)

    # Field case: the margin summit is a single vertex or a single edge.
    summit, t = _climb(a, _stable_start(a, p))
    assert t == (v_disc - _quadratic_ext_disc_val(disc, p)) // 2
    stem = [summit] + [n for n in neighbors(summit) if mu_margin(a, n) == t]
    assert len(stem) <= 2
    return ThickPath(tuple(sorted(stem)), t)


# ---------------------------------------------------------------------------
# Intersection engine


def _rational_ends(s: Shape) -> frozenset[End]:
    if isinstance(s, Fan):
        return frozenset([s.end])
    if isinstance(s, ThickRay):
        return frozenset([s.end])
    if isinstance(s, ThickApartment) and s.ends is not None:
        return frozenset(s.ends)
    return frozenset()


def _anchor(s: Shape) -> Vertex:
    if isinstance(s, ThickPath):
        return s.path[0]
    if isinstance(s, (ThickRay, Fan)):
        return s.base
    if isinstance(s, ThickApartment):
        return s.anchor
    raise TypeError(f"shape has no anchor: {s!r}")


def _finite_thickness(s: Shape) -> int:
    return s.t if isinstance(s, (ThickPath, ThickRay, ThickApartment)) else 0


def _resolve_shared_end(s1: Shape, s2: Shape, end: End) -> Shape:
    """Intersection of two shapes sharing exactly one boundary line.

    Asymptotically toward the shared line the joint margin stabilizes at
    t* = min of the non-horoball thicknesses; the result is the thick ray of
    thickness t* based at the farthest-back spine vertex still attaining t*.
    """
    p = s1.p
    ts = [s.t for s in (s1, s2) if not isinstance(s, Fan)]
    t_star = min(ts)

    def sigma(v: Vertex):
        return min(shape_margin(s1, v), shape_margin(s2, v))

    a1, a2 = _anchor(s1), _anchor(s2)
    far = (
        distance(a1, a2)
        + abs(_finite_thickness(s1))
        + abs(_finite_thickness(s2))
        + 8
    )
    cur = walk_toward_end(a1, end, far)
    if sigma(cur) != t_star:
        cur = walk_toward_end(cur, end, far)
        if sigma(cur) != t_star:
            raise InfiniteUnsupported(s1, s2, "shared-line margin failed to settle")
    steps = 0
    while True:
        toward = step_toward_end(cur, end)
        back = [n for n in neighbors(cur) if n != toward and sigma(n) == t_star]
        if not back:
            break
        cur = min(back)
        steps += 1
        if steps > 2 * far + 8:
            raise InfiniteUnsupported(s1, s2, "shared-line spine failed to terminate")
    return ThickRay(cur, end, t_star)


def _bounded_intersection(s1: Shape, s2: Shape, max_vertices=None) -> Shape:
    """Intersection when no boundary line is shared, hence a bounded set.

    The joint margin sigma = min of the two margins is concave and
    1-Lipschitz, so (a) greedy ascent reaches the global summit, and (b) the
    distance from any vertex to the summit plateau is exactly the margin
    drop, which makes the intersection the thick path around the plateau.
    """
    p = s1.p

    def sigma(v: Vertex):
        return min(shape_margin(s1, v), shape_margin(s2, v))

    a1, a2 = _anchor(s1), _anchor(s2)
    cap = (
        distance(a1, a2)
        + abs(_finite_thickness(s1))
        + abs(_finite_thickness(s2))
        + 64
    )
    cur = a1
    val = sigma(cur)
    steps = 0
    while True:
        better = [n for n in neighbors(cur) if sigma(n) > val]
        if not better:
            break
        cur = min(better)
        val += 1
        assert sigma(cur) == val
        steps += 1
        if steps > cap:
            raise InfiniteUnsupported(s1, s2, "margin ascent failed to terminate")
    if val < 0:
        return Empty(p)

    budget = vertex_budget(max_vertices)
    plateau = {cur}
    frontier = [cur]
    while frontier:
        nxt = []
        for u in frontier:
            for n in neighbors(u):
                if n not in plateau and sigma(n) == val:
                    plateau.add(n)
                    if len(plateau) > budget:
                        raise BudgetExceeded(
                            f"summit plateau exceeded budget of {budget} vertices"
                        )
                    nxt.append(n)
        frontier = nxt

    if len(plateau) == 1:
        return ThickPath((cur,), val)
    deg = {u: sum(1 for n in neighbors(u) if n in plateau) for u in plateau}
    tips = sorted(u for u, k in deg.items() if k == 1)
    if any(k > 2 for k in deg.values()) or len(tips) != 2:
        raise InfiniteUnsupported(s1, s2, "summit plateau is not a path")
    path = [tips[0]]
    prev = None
    while path[-1] != tips[1]:
        nxt = next(
            n for n in neighbors(path[-1]) if n in plateau and n != prev
        )
        prev = path[-1]
        path.append(nxt)
    return ThickPath(tuple(path), val)


def intersect_shapes(s1: Shape, s2: Shape, max_vertices=None) -> Shape:
    """Exact intersection of two branch shapes, again a branch shape."""
    if s1.p != s2.p:
        raise ValueError("shapes live on trees of different primes")
    p = s1.p
    if isinstance(s1, Empty) or isinstance(s2, Empty):
        return Empty(p)
    if isinstance(s1, Full):
        return s2
    if isinstance(s2, Full):
        return s1

    if (
        isinstance(s1, ThickApartment)
        and isinstance(s2, ThickApartment)
        and commute(s1.witness, s2.witness)
    ):
        return s1 if s1.t <= s2.t else s2

    shared = _rational_ends(s1) & _rational_ends(s2)
    if shared:
        assert len(shared) == 1, "two shared lines imply a common axis"
        end = next(iter(shared))
        if isinstance(s1, Fan) and isinstance(s2, Fan):
            # Horoballs around the same line are nested.
            return s1 if fan_slack(s2.base, end, s1.base) >= 0 else s2
        return _resolve_shared_end(s1, s2, end)

    return _bounded_intersection(s1, s2, max_vertices)


# ---------------------------------------------------------------------------
# Deepening, diameters, whole-order branches


def deepen(s: Shape, r: int) -> Shape:
    """The depth-r branch {v : ball-depth r inside s}: erode every margin by r."""
    if r < 0:
        raise ValueError("depth must be >= 0")
    if r == 0 or isinstance(s, (Full, Empty)):
        return s
    if isinstance(s, ThickPath):
        return ThickPath(s.path, s.t - r) if r <= s.t else Empty(s.p)
    if isinstance(s, ThickRay):
        return ThickRay(s.base, s.end, s.t - r) if r <= s.t else Empty(s.p)
    if isinstance(s, ThickApartment):
        if r > s.t:
            return Empty(s.p)
        return ThickApartment(
            s.p, s.ends, s.t - r, witness=s.witness,
            axis_margin=s.axis_margin, anchor=s.anchor,
        )
    if isinstance(s, Fan):
        return canonical_fan(
            s.p, s.end, lambda v: fan_slack(s.base, s.end, v) - r
        )
    raise TypeError(f"not a shape: {s!r}")


def diameter(s: Shape):
    """Vertex-set diameter: finite only for thick paths; raises on Empty."""
    if isinstance(s, Empty):
        raise EmptyShape("empty shape has no diameter")
    if isinstance(s, ThickPath):
        return s.level + 2 * s.t
    return inf


def embeds_in_level(s: Shape, d: int, r: int) -> bool:
    """Does the depth-r branch contain two vertices at distance d?"""
    deep = deepen(s, r)
    if isinstance(deep, Empty):
        return False
    return diameter(deep) >= d


def branch_of_order(order: LocalOrder, max_vertices=None) -> Shape:
    """Shape of {v : order contained in D_v}: fold intersections over the basis."""
    shape: Shape = Full(order.p)
    for b in order.closure.basis:
        if b.is_scalar():
            continue
        shape = intersect_shapes(shape, classify_single(b, order.p), max_vertices)
    return shape


def enumerate_branch(
    order: LocalOrder, r: int, center: Vertex, radius: int, max_vertices=None
) -> frozenset[Vertex]:
    """Brute-force probe: depth-r branch vertices within a ball (exact there)."""
    region = ball(center, radius, max_vertices)
    return frozenset(
        v
        for v in region
        if all(contains_shifted(v, b, r) for b in order.closure.basis)
    )


def eichler_envelope(s: Shape) -> tuple[Vertex, Vertex, int, int]:
    """(endpoint1, endpoint2, level, shift) read off a thick path."""
    if isinstance(s, Empty):
        raise EmptyShape("empty branch has no envelope")
    if not isinstance(s, ThickPath):
        raise NotFinite(f"branch {type(s).__name__} is unbounded")
    return s.path[0], s.path[-1], s.level, s.t
