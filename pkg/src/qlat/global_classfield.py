"""Quadratic base fields, places, local symbols, and spinor class fields.

Global arithmetic over Q and over quadratic fields Q(sqrt(m)):

* places — finite prime ideals with a deterministic branch selector at
  split primes, plus real embeddings — with exact local valuations,
  local square tests, and unramifiedness tests for field elements; the
  split-place branch is pinned by a canonical Hensel square root, so every
  answer is reproducible;
* narrow ray class groups with real moduli, realized inside the narrow
  form class group of the field discriminant;
* the spinor class field of an Eichler-type quaternion genus (its degree,
  forced split places, and ideal-class kernel), representation fields of
  suborder genera (commutative quadratic suborders with a conductor,
  rank-3 suborders, rank-4 Eichler-type suborders), and the resulting
  selectivity ratios.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import inf

from .errors import AlgebraNotSplit, EmbeddingInfeasible, SchemaError
from .exact_padic import (
    is_local_square_rat,
    is_prime,
    is_rational_square,
    legendre,
    reduce_mod_ppow,
    valuation,
)
from .quadforms import (
    ClassGroup,
    QForm,
    class_group,
    class_rep,
    fundamental_discriminant,
    is_squarefree,
    kronecker_at,
    negative_identity_class,
    prime_form,
    sqrt_mod,
)

#: Field element x + y*sqrt(m), held as a pair of exact rationals.
FE = tuple[Fraction, Fraction]


def fe(x, y=0) -> FE:
    return (Fraction(x), Fraction(y))


def fe_is_zero(e: FE) -> bool:
    return e[0] == 0 and e[1] == 0


def fe_add(a: FE, b: FE) -> FE:
    return (a[0] + b[0], a[1] + b[1])


def fe_sub(a: FE, b: FE) -> FE:
    return (a[0] - b[0], a[1] - b[1])


def fe_mul(a: FE, b: FE, m: int) -> FE:
    return (a[0] * b[0] + m * a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def fe_conj(a: FE) -> FE:
    return (a[0], -a[1])


def fe_norm(a: FE, m: int) -> Fraction:
    return a[0] * a[0] - m * a[1] * a[1]


def fe_inv(a: FE, m: int) -> FE:
    n = fe_norm(a, m)
    if n == 0:
        raise ZeroDivisionError("inverse of a zero-norm element")
    return (a[0] / n, -a[1] / n)


def fe_pow(a: FE, k: int, m: int) -> FE:
    if k < 0:
        return fe_pow(fe_inv(a, m), -k, m)
    out = fe(1)
    while k:
        if k & 1:
            out = fe_mul(out, a, m)
        a = fe_mul(a, a, m)
        k >>= 1
    return out


def _fraction_sqrt(x: Fraction) -> Fraction:
    from math import isqrt

    return Fraction(isqrt(x.numerator), isqrt(x.denominator))


def _prime_factors(n: int) -> set[int]:
    n = abs(n)
    out: set[int] = set()
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


# ---------------------------------------------------------------------------
# Fields and places


@dataclass(frozen=True, order=True)
class PrimeIdeal:
    """A finite place: the prime below, its splitting type, and — at split
    primes — which of the two branches (selector 1 or 2) this place is."""

    p: int
    selector: int  # 0 unless split, else 1 or 2
    tag: str  # "rational" | "inert" | "ramified" | "split"

    def key(self) -> str:
        if self.selector:
            return f"{self.p}.{self.selector}"
        return str(self.p)

    @property
    def residue_degree(self) -> int:
        return 2 if self.tag == "inert" else 1

    @property
    def is_dyadic(self) -> bool:
        return self.p == 2


@dataclass(frozen=True)
class BaseField:
    """Q (m is None) or the quadratic field Q(sqrt(m)), m squarefree."""

    m: int | None

    @staticmethod
    def rationals() -> "BaseField":
        return BaseField(None)

    @staticmethod
    def quadratic(m: int) -> "BaseField":
        if m in (0, 1) or not is_squarefree(m):
            raise ValueError("radicand must be squarefree and not 0 or 1")
        return BaseField(m)

    @property
    def is_rational(self) -> bool:
        return self.m is None

    @property
    def discriminant(self) -> int:
        if self.m is None:
            return 1
        return fundamental_discriminant(self.m)

    def real_place_keys(self) -> tuple[str, ...]:
        if self.m is None:
            return ("inf",)
        return ("inf1", "inf2") if self.m > 0 else ()

    def places_over(self, p: int) -> tuple[PrimeIdeal, ...]:
        if not is_prime(p):
            raise ValueError(f"{p} is not a prime")
        if self.m is None:
            return (PrimeIdeal(p, 0, "rational"),)
        sym = kronecker_at(self.discriminant, p)
        if sym == 0:
            return (PrimeIdeal(p, 0, "ramified"),)
        if sym == -1:
            return (PrimeIdeal(p, 0, "inert"),)
        return (PrimeIdeal(p, 1, "split"), PrimeIdeal(p, 2, "split"))


def parse_place_key(field: BaseField, key: str) -> PrimeIdeal:
    """Parse a finite place key: "p" or, at split primes, "p.1" / "p.2"."""
    parts = str(key).strip().split(".")
    try:
        p = int(parts[0])
    except ValueError:
        raise ValueError(f"bad place key {key!r}") from None
    places = field.places_over(p)
    if len(parts) == 1:
        if len(places) == 2:
            raise ValueError(f"prime {p} splits: use '{p}.1' or '{p}.2'")
        return places[0]
    if len(parts) == 2 and parts[1] in ("1", "2"):
        if len(places) != 2:
            raise ValueError(f"prime {p} does not split in this field")
        return places[int(parts[1]) - 1]
    raise ValueError(f"bad place key {key!r}")


# ---------------------------------------------------------------------------
# Canonical local square roots and embeddings


def hensel_sqrt(m: int, p: int, prec: int) -> int:
    """Canonical square root of m modulo p^prec.

    Requires m to be a unit square locally (odd p: nonzero QR mod p;
    p = 2: m = 1 mod 8).  The branch is pinned deterministically: odd p
    lifts the smaller of the two residue roots, p = 2 lifts the dyadic
    root congruent to 1 mod 4.  Truncations are compatible across prec.
    """
    prec = max(prec, 1)
    if p == 2:
        if m % 8 != 1:
            raise ValueError("dyadic square root requires m = 1 mod 8")
        # refine one step past prec: the adjustment at stage k touches bit
        # k - 1, so stopping at k = prec would leave bit prec - 1 unsettled
        # and truncations would disagree with higher-precision calls
        r, k = 1, 3
        while k <= prec:
            if (r * r - m) % (1 << (k + 1)):
                r += 1 << (k - 1)
            k += 1
        return r % (1 << prec)
    r0 = sqrt_mod(m % p, p)
    if r0 is None or r0 == 0:
        raise ValueError(f"{m} is not a unit square modulo {p}")
    r = min(r0, p - r0)
    k = 1
    while k < prec:
        k = min(2 * k, prec)
        mod = p**k
        r = (r + m * pow(r, -1, mod)) * pow(2, -1, mod) % mod
    return r


def _split_embed(field: BaseField, el: FE, place: PrimeIdeal) -> tuple[int, int, int]:
    """Image of p^k * el in Z/p^prec under the split-place embedding.

    Returns (w, prec, k) with w nonzero mod p^prec and k the power of p
    used to clear denominators, so v_place(el) = v_p(w) - k.
    """
    p, m = place.p, field.m
    x, y = el
    k = max(0, -min(valuation(x, p), valuation(y, p)))
    if k:
        x, y = x * p**k, y * p**k
    n = x * x - m * y * y
    prec = int(valuation(n, p)) + 5
    rho = hensel_sqrt(m, p, prec)
    mod = p**prec
    if place.selector == 2:
        rho = (-rho) % mod
    w = (int(reduce_mod_ppow(x, p, prec)) + int(reduce_mod_ppow(y, p, prec)) * rho) % mod
    assert w != 0, "split embedding lost all precision"
    return w, prec, k


# ---------------------------------------------------------------------------
# Local valuations, squares, and ramification


def val_at_place(field: BaseField, el: FE, place: PrimeIdeal):
    """Normalized valuation of el at the place (uniformizer has value 1);
    +infinity for zero."""
    if fe_is_zero(el):
        return inf
    p = place.p
    x, y = el
    if place.tag == "rational":
        return valuation(x, p)
    m = field.m
    if place.tag == "inert":
        v = valuation(fe_norm(el, m), p)
        assert v % 2 == 0
        return v // 2
    if place.tag == "ramified":
        if p != 2:
            return valuation(fe_norm(el, m), p)
        if m % 4 == 2:
            return min(2 * valuation(x, 2), 2 * valuation(y, 2) + 1)
        # m = 3 mod 4: write el = (x - y) + y * (1 + sqrt(m))
        return min(2 * valuation(x - y, 2), 2 * valuation(y, 2) + 1)
    w, _, k = _split_embed(field, el, place)
    return valuation(w, p) - k


def _fp2_pow(a0: int, a1: int, e: int, p: int, mbar: int) -> tuple[int, int]:
    """(a0 + a1*s)^e in F_p[s]/(s^2 - mbar)."""
    r0, r1 = 1, 0
    while e:
        if e & 1:
            r0, r1 = (r0 * a0 + r1 * a1 * mbar) % p, (r0 * a1 + r1 * a0) % p
        a0, a1 = (a0 * a0 + a1 * a1 * mbar) % p, 2 * a0 * a1 % p
        e >>= 1
    return r0, r1


def _dyadic_ram_unit(field: BaseField, el: FE, v: int) -> FE:
    """el / pi^v at the ramified dyadic place (v = val_at_place(el), even)."""
    m = field.m
    if m % 4 == 2:  # pi = sqrt(m), pi^2 = m
        s = Fraction(m) ** (v // 2)
        return (el[0] / s, el[1] / s)
    return fe_mul(el, fe_pow(fe(1, 1), -v, m), m)  # pi = 1 + sqrt(m)


def _omega_basis_mod(field: BaseField, u: FE, e: int) -> tuple[int, int]:
    """Coordinates of u in the (1, omega) basis modulo 2^e, for m = 1 mod 4
    (omega = (1 + sqrt(m))/2): u = A + B*omega with A = x - y, B = 2y."""
    a = reduce_mod_ppow(u[0] - u[1], 2, e)
    b = reduce_mod_ppow(2 * u[1], 2, e)
    return int(a), int(b)


def _inert_dyadic_square_search(field: BaseField, u: FE, modexp: int) -> bool:
    """Is the unit u a square of O/2^modexp at the inert dyadic place?"""
    m = field.m
    au, bu = _omega_basis_mod(field, u, modexp)
    mod = 1 << modexp
    c = (m - 1) // 4
    for a in range(mod):
        for b in range(mod):
            if (a * a + b * b * c - au) % mod == 0 and (2 * a * b + b * b - bu) % mod == 0:
                return True
    return False


def _ram_dyadic_square_search(
    field: BaseField, u: FE, place: PrimeIdeal, threshold: int
) -> bool:
    """Is u congruent to a square below the given pi-adic threshold?"""
    m = field.m
    for a in range(8):
        for b in range(8):
            x2 = (Fraction(a * a + m * b * b), Fraction(2 * a * b))
            if val_at_place(field, fe_sub(x2, u), place) >= threshold:
                return True
    return False


def is_local_square(field: BaseField, el: FE, place: PrimeIdeal) -> bool:
    """Is the nonzero element el a square in the completion at the place?"""
    if fe_is_zero(el):
        raise ZeroDivisionError("square class of zero")
    p = place.p
    if place.tag == "rational":
        return is_local_square_rat(el[0], p)
    m = field.m
    if place.tag == "split":
        w, prec, k = _split_embed(field, el, place)
        vw = int(valuation(w, p))
        if (vw - k) % 2:
            return False
        u = w // p**vw % p ** (prec - vw)
        if p == 2:
            return u % 8 == 1
        return legendre(u, p) == 1
    v = val_at_place(field, el, place)
    if v % 2:
        return False
    if place.tag == "inert":
        u = (el[0] / Fraction(p) ** v, el[1] / Fraction(p) ** v)
        if p != 2:
            xr = int(reduce_mod_ppow(u[0], p, 1))
            yr = int(reduce_mod_ppow(u[1], p, 1))
            return _fp2_pow(xr, yr, (p * p - 1) // 2, p, m % p) == (1, 0)
        return _inert_dyadic_square_search(field, u, 3)
    # ramified
    if p != 2:
        u0 = el[0] / Fraction(m) ** (v // 2)
        return legendre(int(reduce_mod_ppow(u0, p, 1)), p) == 1
    u = _dyadic_ram_unit(field, el, v)
    return _ram_dyadic_square_search(field, u, place, 5)


def is_unramified_or_split(field: BaseField, el: FE, place: PrimeIdeal) -> bool:
    """Is K_place(sqrt(el)) unramified (possibly split) over the completion?

    At odd residue characteristic this is just evenness of the valuation;
    at dyadic places the unit part must additionally be a square modulo 4.
    """
    if fe_is_zero(el):
        raise ZeroDivisionError("square class of zero")
    p = place.p
    v = val_at_place(field, el, place)
    if v % 2:
        return False
    if p != 2:
        return True
    if place.tag == "rational":
        u = el[0] / Fraction(2) ** v
        return int(reduce_mod_ppow(u, 2, 2)) == 1
    if place.tag == "split":
        w, _, _ = _split_embed(field, el, place)
        vw = int(valuation(w, 2))
        return w // 2**vw % 4 == 1
    if place.tag == "inert":
        u = (el[0] / Fraction(2) ** v, el[1] / Fraction(2) ** v)
        return _inert_dyadic_square_search(field, u, 2)
    u = _dyadic_ram_unit(field, el, v)
    return _ram_dyadic_square_search(field, u, place, 4)


def sign_at_real(field: BaseField, el: FE, key: str) -> int:
    """Sign of el under the real embedding named by key (exact)."""
    if fe_is_zero(el):
        raise ZeroDivisionError("sign of zero")
    if key not in field.real_place_keys():
        raise ValueError(f"{key!r} is not a real place of this field")
    x, y = el
    if field.is_rational:
        return 1 if x > 0 else -1
    if key == "inf2":
        y = -y
    m = field.m
    if y == 0:
        return 1 if x > 0 else -1
    if x == 0:
        return 1 if y > 0 else -1
    if x > 0 and y > 0:
        return 1
    if x < 0 and y < 0:
        return -1
    n = x * x - m * y * y  # compare |x| against |y|*sqrt(m)
    if x > 0:  # y < 0: positive iff x outweighs
        return 1 if n > 0 else -1
    return 1 if n < 0 else -1


def fe_is_square(field: BaseField, el: FE) -> bool:
    """Is el a square already in the base field (globally)?"""
    x, y = el
    if field.is_rational:
        return is_rational_square(x)
    m = field.m
    if y == 0:
        return is_rational_square(x) or is_rational_square(x / m)
    n = fe_norm(el, m)
    if not is_rational_square(n):
        return False
    r = _fraction_sqrt(n)
    for rr in (r, -r):
        cand = (x + rr) / 2
        if cand != 0 and is_rational_square(cand):
            s = _fraction_sqrt(cand)
            t = y / (2 * s)
            if s * s + m * t * t == x and 2 * s * t == y:
                return True
    return False


# ---------------------------------------------------------------------------
# Ray class groups


@dataclass(frozen=True)
class RayClassGroup:
    """Narrow ray class group of conductor = a set of real places,
    realized as (narrow form class group) / kernel."""

    field: BaseField
    modulus: tuple[str, ...]
    base: ClassGroup | None = dc_field(repr=False, default=None)
    kernel: frozenset[QForm] = frozenset()

    @property
    def order(self) -> int:
        if self.base is None:
            return 1
        return self.base.order // len(self.kernel)

    def coset_rep(self, f: QForm) -> QForm:
        """Canonical label of the coset of f (minimal class representative)."""
        if self.base is None:
            raise ValueError("the trivial group has no form representatives")
        return min(self.base.op(f, k) for k in self.kernel)

    def prime_class(self, place: PrimeIdeal) -> QForm | None:
        """Coset of the class of the prime ideal; None over Q."""
        if self.base is None:
            return None
        return self.coset_rep(_ideal_class(self.base, place))


def _ideal_class(base: ClassGroup, place: PrimeIdeal) -> QForm:
    if place.tag == "inert":
        return base.identity  # the ideal is (p), principal and totally positive
    return class_rep(prime_form(base.disc, place.p, place.selector or 1), base.disc)


def narrow_ray_class_group(field: BaseField, modulus=()) -> RayClassGroup:
    keys = tuple(sorted(set(modulus)))
    for key in keys:
        if key not in field.real_place_keys():
            raise ValueError(f"{key!r} is not a real place of this field")
    if field.is_rational:
        return RayClassGroup(field, keys, None, frozenset())
    disc = field.discriminant
    base = class_group(disc)
    if field.m < 0 or len(keys) == 2:
        kernel = frozenset({base.identity})
    else:
        # Dropping a real place from the modulus absorbs the class of the
        # norm -1 form (ideals become identified with their totally
        # negative twists); dropping one place or both gives the same
        # quotient, the wide class group.
        kernel = base.subgroup([negative_identity_class(disc)])
    return RayClassGroup(field, keys, base, kernel)


# ---------------------------------------------------------------------------
# Quaternion genera


@dataclass(frozen=True)
class QuatAlgebra:
    """A quaternion algebra over the base field, given by its ramified
    places (finite prime ideals and real place keys); the set must have
    even size."""

    field: BaseField
    finite: tuple[PrimeIdeal, ...] = ()
    real: tuple[str, ...] = ()

    @staticmethod
    def of(field: BaseField, finite=(), real=()) -> "QuatAlgebra":
        fin = tuple(sorted(set(finite)))
        re = tuple(sorted(set(real)))
        for key in re:
            if key not in field.real_place_keys():
                raise ValueError(f"{key!r} is not a real place of this field")
        if (len(fin) + len(re)) % 2:
            raise ValueError("a ramification set must have even size")
        return QuatAlgebra(field, fin, re)

    @property
    def is_split_everywhere(self) -> bool:
        return not self.finite and not self.real


def _normalize_ideal_map(entries) -> tuple[tuple[PrimeIdeal, int], ...]:
    if entries is None:
        return ()
    items = entries.items() if hasattr(entries, "items") else entries
    out: dict[PrimeIdeal, int] = {}
    for place, e in items:
        if not isinstance(e, int) or e < 0:
            raise ValueError("ideal exponents must be nonnegative integers")
        if place in out:
            raise ValueError(f"duplicate place {place.key()}")
        if e:
            out[place] = e
    return tuple(sorted(out.items()))


@dataclass(frozen=True)
class Genus:
    """Eichler-type genus data: per-place level exponents and the shift
    ideal exponents (the r in O + p^r * intersection)."""

    level: tuple[tuple[PrimeIdeal, int], ...] = ()
    shift: tuple[tuple[PrimeIdeal, int], ...] = ()

    @staticmethod
    def of(level=None, shift=None) -> "Genus":
        return Genus(_normalize_ideal_map(level), _normalize_ideal_map(shift))

    def level_at(self, place: PrimeIdeal) -> int:
        return dict(self.level).get(place, 0)

    def shift_at(self, place: PrimeIdeal) -> int:
        return dict(self.shift).get(place, 0)

    def support(self) -> tuple[PrimeIdeal, ...]:
        return tuple(sorted({p for p, _ in self.level} | {p for p, _ in self.shift}))


def validate_genus(algebra: QuatAlgebra, genus: Genus, path: str = "genus") -> None:
    for place in algebra.finite:
        if genus.level_at(place) or genus.shift_at(place):
            raise SchemaError(
                f"{path}.{place.key()}",
                "level and shift must vanish at division places",
            )


# ---------------------------------------------------------------------------
# Spinor class fields


@dataclass(frozen=True)
class SigmaField:
    """The spinor class field of a genus, presented by class-group data:
    degree over the base field, the ray class group order it sits in, the
    finite places whose Frobenius classes are forced to die, and the
    ideal-class kernel cutting it out."""

    field: BaseField
    modulus: tuple[str, ...]
    degree: int
    group_order: int
    forced_split: tuple[str, ...]
    base: ClassGroup | None = dc_field(repr=False, default=None)
    kernel: frozenset[QForm] = dc_field(repr=False, default=frozenset())


def spinor_class_field(algebra: QuatAlgebra, genus: Genus) -> SigmaField:
    """Degree, forced split places, and kernel of the spinor class field.

    The class field is the largest exponent-2 extension of the base field
    that is unramified at all finite places, unramified at the real places
    where the algebra is split (those stay in the modulus), and split at
    every finite division place and every place of odd level.
    """
    field = algebra.field
    validate_genus(algebra, genus)
    forced = sorted(set(algebra.finite) | {p for p, d in genus.level if d % 2 == 1})
    fkeys = tuple(p.key() for p in forced)
    ray = narrow_ray_class_group(field, algebra.real)
    if ray.base is None:
        return SigmaField(field, ray.modulus, 1, 1, fkeys, None, frozenset())
    base = ray.base
    gens = set(ray.kernel)
    gens.update(base.op(x, x) for x in base.reps)
    gens.update(_ideal_class(base, p) for p in forced)
    kernel = base.subgroup(gens)
    degree = base.order // len(kernel)
    return SigmaField(field, ray.modulus, degree, ray.order, fkeys, base, kernel)


# ---------------------------------------------------------------------------
# Representation fields


@dataclass(frozen=True)
class RepField:
    """Representation field of a suborder genus: its degree over the base
    field, the ambient spinor class field, and the places whose conditions
    push the field down (strict/unbalanced places)."""

    degree: int
    sigma: SigmaField
    strict_places: tuple[str, ...] = ()


def selectivity_ratio(rep: RepField) -> Fraction:
    """Fraction of the genus admitting the suborder: 1/[F : K]."""
    return Fraction(1, rep.degree)


def _quadratic_in_sigma(
    field: BaseField, algebra: QuatAlgebra, sigma: SigmaField, delta: FE
) -> bool:
    """Is K(sqrt(delta)) contained in the spinor class field?"""
    # (a) unramified at every finite place.  Any place where delta has a
    # nonzero valuation divides the norm or a coordinate denominator, so
    # this candidate set is exhaustive (dyadic places always included).
    if field.is_rational:
        n = delta[0]
    else:
        n = fe_norm(delta, field.m)
    cand = {2} | _prime_factors(field.discriminant)
    cand |= _prime_factors(n.numerator) | _prime_factors(n.denominator)
    cand |= _prime_factors(delta[0].denominator) | _prime_factors(delta[1].denominator)
    for p in sorted(cand):
        for place in field.places_over(p):
            if not is_unramified_or_split(field, delta, place):
                return False
    # (b) split at every real place where the algebra is split.
    for key in field.real_place_keys():
        if key not in algebra.real and sign_at_real(field, delta, key) < 0:
            return False
    # (c) the forced classes must split in K(sqrt(delta)).  After (a) the
    # extension is unramified at these places, so splitting is exactly the
    # local square condition.
    for key in sigma.forced_split:
        place = parse_place_key(field, key)
        if not is_local_square(field, delta, place):
            return False
    return True


def _map_at(entries: tuple[tuple[PrimeIdeal, int], ...], place: PrimeIdeal) -> int:
    return dict(entries).get(place, 0)


def rep_field_comm_quadratic(
    algebra: QuatAlgebra, genus: Genus, delta: FE, conductor=()
) -> RepField:
    """Representation field of the genus of D = O + I*D0, where D0 is the
    quadratic suborder O_K + f*O_L of L = K(sqrt(delta)) with conductor f.

    Feasibility is checked first and raises EmbeddingInfeasible; then the
    field is L exactly when L lies in the spinor class field and at every
    place inert in L the conductor depth matches shift + level/2.
    """
    field = algebra.field
    validate_genus(algebra, genus)
    delta = (Fraction(delta[0]), Fraction(delta[1]))
    if fe_is_zero(delta):
        raise ValueError("delta must be nonzero")
    if field.is_rational and delta[1] != 0:
        raise ValueError("delta must be rational over Q")
    cond = _normalize_ideal_map(conductor)

    # --- feasibility, checked before any class field computation ---
    for key in algebra.real:
        if sign_at_real(field, delta, key) > 0:
            raise EmbeddingInfeasible(
                key, "the quadratic algebra splits at a ramified real place"
            )
    for place in algebra.finite:
        if is_local_square(field, delta, place):
            raise EmbeddingInfeasible(
                place.key(), "the quadratic algebra splits at a division place"
            )
    support = sorted(set(genus.support()) | {p for p, _ in cond})
    for place in support:
        if place in algebra.finite:
            continue  # any integral quadratic order embeds in the division order
        t = _map_at(cond, place)
        r = genus.shift_at(place)
        d = genus.level_at(place)
        if t < r:
            raise EmbeddingInfeasible(
                place.key(), "the conductor is shallower than the genus shift"
            )
        if not is_local_square(field, delta, place):
            core = 0 if is_unramified_or_split(field, delta, place) else 1
            if core + 2 * (t - r) < d:
                raise EmbeddingInfeasible(
                    place.key(), "the suborder branch is smaller than the genus level"
                )

    sigma = spinor_class_field(algebra, genus)
    if fe_is_square(field, delta):
        return RepField(1, sigma, ())  # L is not a field: K x K collapses
    in_sigma = _quadratic_in_sigma(field, algebra, sigma, delta)
    unbalanced = []
    for place in support:
        if place in algebra.finite:
            continue  # division places impose no distance condition
        if is_local_square(field, delta, place):
            continue  # split in L
        if not is_unramified_or_split(field, delta, place):
            continue  # ramified in L: containment in sigma already failed
        d = genus.level_at(place)
        if d % 2 == 1 or _map_at(cond, place) != genus.shift_at(place) + d // 2:
            unbalanced.append(place.key())
    degree = 2 if in_sigma and not unbalanced else 1
    return RepField(degree, sigma, tuple(unbalanced))


def rep_field_rank3(algebra: QuatAlgebra, genus: Genus) -> RepField:
    """Representation field of a rank-3 suborder genus: admitting one
    forces the algebra to be split everywhere, and the field is the base
    field itself."""
    if not algebra.is_split_everywhere:
        raise AlgebraNotSplit(
            "rank-3 suborders only occur in the everywhere-split algebra"
        )
    validate_genus(algebra, genus)
    sigma = spinor_class_field(algebra, genus)
    return RepField(1, sigma, ())


def rep_field_rank4(algebra: QuatAlgebra, genus: Genus, sub: Genus) -> RepField:
    """Representation field of a rank-4 Eichler-type suborder genus.

    The suborder genus (level D2, shift J) embeds into the ambient genus
    (level D1, shift I) iff at every place v(J) >= v(I) and
    l(D2) + 2 v(J) >= l(D1) + 2 v(I); the representation field is the
    largest subfield of the spinor class field split at every place where
    the second inequality is strict.
    """
    validate_genus(algebra, genus)
    validate_genus(algebra, sub, path="suborder")
    support = sorted(set(genus.support()) | set(sub.support()))
    strict: list[PrimeIdeal] = []
    for place in support:
        r1, d1 = genus.shift_at(place), genus.level_at(place)
        r2, d2 = sub.shift_at(place), sub.level_at(place)
        if r2 < r1:
            raise EmbeddingInfeasible(
                place.key(), "the suborder shift is shallower than the genus shift"
            )
        if d2 + 2 * r2 < d1 + 2 * r1:
            raise EmbeddingInfeasible(
                place.key(), "the suborder diameter is smaller than the genus level"
            )
        if d2 + 2 * r2 > d1 + 2 * r1:
            strict.append(place)
    sigma = spinor_class_field(algebra, genus)
    keys = tuple(p.key() for p in strict)
    if sigma.base is None:
        return RepField(1, sigma, keys)
    kernel = sigma.base.subgroup(
        set(sigma.kernel) | {_ideal_class(sigma.base, p) for p in strict}
    )
    degree = sigma.base.order // len(kernel)
    return RepField(degree, sigma, keys)
