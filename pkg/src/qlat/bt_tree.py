"""The (p+1)-regular tree of local lattice classes.

A vertex is a homothety class of rank-2 lattices over Z_(p).  Each class has
a unique canonical upper-triangular basis

    [[p^a, c], [0, p^b]],   a, b >= 0,  0 <= c < p^a an integer,
                            min(a, b, v_p(c)) = 0,

so vertices compare and hash structurally.  The graph distance between two
classes is e2 - e1 for the elementary divisor exponents of a change-of-basis
matrix, neighbors are the p+1 index-p sublattice classes, and ends of the
tree (boundary points) are lines in the plane, encoded by a primitive
integer vector.

Ball enumeration checks its vertex budget (default 200,000, overridable via
the QLAT_MAX_VERTICES environment variable or an explicit argument) before
allocating anything.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import ResourceLimit, SingularMatrix
from .exact_padic import Mat2, Rat, reduce_mod_ppow, smith_local, valuation

DEFAULT_MAX_VERTICES = 200_000


def vertex_budget(max_vertices=None) -> int:
    """Effective vertex budget: explicit argument, else env var, else default."""
    if max_vertices is not None:
        return int(max_vertices)
    env = os.environ.get("QLAT_MAX_VERTICES")
    if env:
        n = int(env)
        if n <= 0:
            raise ValueError("QLAT_MAX_VERTICES must be positive")
        return n
    return DEFAULT_MAX_VERTICES


@dataclass(frozen=True, order=True)
class Vertex:
    """Canonical lattice class; sorts by the canonical triple."""

    p: int
    a: int
    b: int
    c: int

    def __post_init__(self):
        p, a, b, c = self.p, self.a, self.b, self.c
        if a < 0 or b < 0 or not (0 <= c < p**a):
            raise ValueError(f"non-canonical vertex triple ({a}, {b}, {c})")
        if min(a, b, valuation(c, p)) != 0:
            raise ValueError(f"vertex triple ({a}, {b}, {c}) is not primitive")

    def basis(self) -> Mat2:
        """Column basis matrix of the canonical lattice representative."""
        return Mat2.of([[self.p**self.a, self.c], [0, self.p**self.b]])


def standard_vertex(p: int) -> Vertex:
    return Vertex(p, 0, 0, 0)


def canonical_vertex(g: Mat2, p: int) -> Vertex:
    """Canonical form of the lattice class spanned by the columns of g."""
    if g.det() == 0:
        raise SingularMatrix("lattice basis must be invertible")
    cols = [(g.m00, g.m10), (g.m01, g.m11)]
    # Column 2 takes the minimal-valuation second coordinate.
    if valuation(cols[0][1], p) < valuation(cols[1][1], p):
        cols.reverse()
    (x1, y1), (x2, y2) = cols
    # Clear the second coordinate of column 1; the quotient is in Z_(p).
    if y1 != 0:
        f = y1 / y2
        x1 -= f * x2
    alpha = valuation(x1, p)
    x1 = Fraction(p) ** alpha
    beta = valuation(y2, p)
    u2 = Fraction(p) ** beta / y2
    y2 = Fraction(p) ** beta
    x2 *= u2
    c = reduce_mod_ppow(x2, p, alpha)
    shift = min(alpha, beta, valuation(c, p))
    a = alpha - shift
    b = beta - shift
    cq = c * Fraction(p) ** (-shift)
    assert cq.denominator == 1
    return Vertex(p, a, b, int(cq))


def distance(v: Vertex, w: Vertex) -> int:
    """Graph distance: spread of the elementary divisors of the transition."""
    if v.p != w.p:
        raise ValueError("vertices live on trees of different primes")
    if v == w:
        return 0
    m = v.basis().inverse() * w.basis()
    e1, e2 = smith_local(m, v.p)
    return e2 - e1


def neighbors(v: Vertex) -> tuple[Vertex, ...]:
    """The p+1 adjacent classes, sorted canonically."""
    p = v.p
    g = v.basis()
    out = set()
    for j in range(p):
        out.add(canonical_vertex(g * Mat2.of([[1, 0], [j, p]]), p))
    out.add(canonical_vertex(g * Mat2.of([[p, 0], [0, 1]]), p))
    assert len(out) == p + 1
    return tuple(sorted(out))


def geodesic(v: Vertex, w: Vertex) -> tuple[Vertex, ...]:
    """The unique path from v to w, inclusive."""
    path = [v]
    cur = v
    d = distance(v, w)
    while cur != w:
        for n in neighbors(cur):
            if distance(n, w) == d - 1:
                cur = n
                break
        else:  # pragma: no cover - unreachable on a tree
            raise AssertionError("no descent step found")
        path.append(cur)
        d -= 1
    return tuple(path)


def ball_size(p: int, radius: int) -> int:
    if radius <= 0:
        return 1
    return 1 + (p + 1) * (p**radius - 1) // (p - 1)


def ball(v: Vertex, radius: int, max_vertices=None) -> frozenset[Vertex]:
    """All vertices within the given distance of v."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    budget = vertex_budget(max_vertices)
    size = ball_size(v.p, radius)
    if size > budget:
        raise ResourceLimit(
            f"ball of radius {radius} at p={v.p} has {size} vertices, "
            f"budget is {budget}"
        )
    seen = {v}
    frontier = [v]
    for _ in range(radius):
        nxt = []
        for u in frontier:
            for n in neighbors(u):
                if n not in seen:
                    seen.add(n)
                    nxt.append(n)
        frontier = nxt
    return frozenset(seen)


# ---------------------------------------------------------------------------
# Ends of the tree


@dataclass(frozen=True, order=True)
class End:
    """A boundary point: the line spanned by the primitive vector (x, y)."""

    x: int
    y: int

    def __post_init__(self):
        if self.x == 0 and self.y == 0:
            raise ValueError("end requires a nonzero vector")
        if gcd(self.x, self.y) != 1:
            raise ValueError("end vector must be primitive")
        lead = self.x if self.x != 0 else self.y
        if lead < 0:
            raise ValueError("end vector must have positive leading entry")

    def vector(self) -> tuple[Rat, Rat]:
        return (Fraction(self.x), Fraction(self.y))


def end_from_vector(vec) -> End:
    """Normalize any nonzero rational vector to a canonical end."""
    x, y = Fraction(vec[0]), Fraction(vec[1])
    if x == 0 and y == 0:
        raise ValueError("end requires a nonzero vector")
    den = x.denominator * y.denominator // gcd(x.denominator, y.denominator)
    xi, yi = int(x * den), int(y * den)
    g = gcd(xi, yi)
    xi, yi = xi // g, yi // g
    lead = xi if xi != 0 else yi
    if lead < 0:
        xi, yi = -xi, -yi
    return End(xi, yi)


def step_toward_end(v: Vertex, end: End) -> Vertex:
    """The neighbor of v on the ray from v to the given boundary line."""
    p = v.p
    g = v.basis()
    # Coordinates of the line direction in the lattice basis, made primitive.
    u = g.inverse().apply(end.vector())
    m = min(valuation(x, p) for x in u)
    u = (u[0] * Fraction(p) ** (-m), u[1] * Fraction(p) ** (-m))
    w = g.apply(u)  # primitive lattice vector spanning the line's direction
    # New lattice: Z*w + p*Lambda, using a basis vector completing w.
    if valuation(u[1], p) == 0:
        other = (g.m00, g.m10)  # column 1 completes
    else:
        other = (g.m01, g.m11)  # column 2 completes
    nb = Mat2.of([[w[0], p * other[0]], [w[1], p * other[1]]])
    return canonical_vertex(nb, p)


def walk_toward_end(v: Vertex, end: End, steps: int) -> Vertex:
    for _ in range(steps):
        v = step_toward_end(v, end)
    return v


def ray_vertices(base: Vertex, end: End, count: int) -> tuple[Vertex, ...]:
    """The first `count + 1` vertices of the ray from base toward end."""
    out = [base]
    cur = base
    for _ in range(count):
        cur = step_toward_end(cur, end)
        out.append(cur)
    return tuple(out)


def dist_to_ray(v: Vertex, base: Vertex, end: End) -> int:
    """Distance from v to the ray; the distance along the ray is convex."""
    cur = base
    best = distance(v, base)
    while True:
        nxt = step_toward_end(cur, end)
        d = distance(v, nxt)
        if d >= best:
            return best
        best = d
        cur = nxt


# ---------------------------------------------------------------------------
# DOT export


def export_dot(vertices, highlights=None) -> str:
    """Graphviz DOT source for the induced subgraph on the given vertices.

    `highlights` maps vertices to extra label strings.  Output is
    deterministic: vertices sorted canonically, edges listed once.
    """
    verts = sorted(set(vertices))
    highlights = highlights or {}
    vset = set(verts)

    def name(v: Vertex) -> str:
        return f"v_{v.a}_{v.b}_{v.c}"

    lines = ["graph lattice_classes {", "  node [shape=circle];"]
    for v in verts:
        label = f"({v.a},{v.b},{v.c})"
        if v in highlights:
            label += f"\\n{highlights[v]}"
        lines.append(f'  {name(v)} [label="{label}"];')
    for v in verts:
        for n in neighbors(v):
            if n in vset and v < n:
                lines.append(f"  {name(v)} -- {name(n)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
