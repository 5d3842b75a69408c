"""Exact algebraic plane curves over Q(sqrt(3)) and quadratic inversion.

Homogeneous trivariate polynomials with exact coefficients, the quadratic
map attached to a fundamental circle and pole, total and strict
transforms with exceptional-factor bookkeeping, multiplicities and
singularity classification.  Everything here is exact: coefficients live
in the field Q adjoined sqrt(3), which is where the equilateral
configuration (base point at (1/2, sqrt(3)/2)) has its coordinates.

Curve text format (one monomial per line, `s3` denotes sqrt(3)):

    (i,j,k): num/den
    (i,j,k): num/den+num/den*s3

where (i, j, k) are the exponents of (x, y, w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .core import GeometryError, HPoint

Rat = Fraction


class InexactInput(GeometryError):
    pass


class ZeroPullback(GeometryError):
    pass


class FundamentalComponent(GeometryError):
    pass


class WrongMultiplicity(GeometryError):
    pass


class ExceptionalMismatch(GeometryError):
    """Exceptional-factor exponent disagrees with the base-point multiplicity."""


_RatLike = Union[int, Fraction]


def _frac(x: _RatLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise InexactInput(f"expected exact rational, got {type(x).__name__}: {x!r}")


@dataclass(frozen=True)
class Q3:
    """Element a + b*sqrt(3) of Q(sqrt(3)), with exact Fraction parts."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    @staticmethod
    def of(x: Union["Q3", _RatLike]) -> "Q3":
        if isinstance(x, Q3):
            return x
        return Q3(_frac(x), Fraction(0))

    def __add__(self, o):
        o = Q3.of(o)
        return Q3(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Q3(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-Q3.of(o))

    def __rsub__(self, o):
        return Q3.of(o) + (-self)

    def __mul__(self, o):
        o = Q3.of(o)
        return Q3(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self) -> "Q3":
        n = self.a * self.a - 3 * self.b * self.b
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(3))")
        return Q3(self.a / n, -self.b / n)

    def __truediv__(self, o):
        return self * Q3.of(o).inverse()

    def __rtruediv__(self, o):
        return Q3.of(o) * self.inverse()

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def sign(self) -> int:
        """Exact sign of the real number a + b*sqrt(3)."""
        if self.a == 0 and self.b == 0:
            return 0
        if self.a >= 0 and self.b >= 0:
            return 1
        if self.a <= 0 and self.b <= 0:
            return -1
        # opposite signs: compare a^2 with 3 b^2
        if self.a > 0:
            return 1 if self.a * self.a > 3 * self.b * self.b else -1
        return -1 if self.a * self.a > 3 * self.b * self.b else 1

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(3.0)

    def __repr__(self):
        if self.b == 0:
            return f"{self.a}"
        return f"{self.a}+{self.b}*s3"


SQRT3 = Q3(Fraction(0), Fraction(1))
Q3Like = Union[Q3, int, Fraction]

Mono = tuple[int, int, int]
Poly = dict[Mono, Q3]

ExactPoint = tuple[Q3, Q3, Q3]


def exact_point(x: Q3Like, y: Q3Like, w: Q3Like = 1) -> ExactPoint:
    return (Q3.of(x), Q3.of(y), Q3.of(w))


# ---------------------------------------------------------------------------
# raw polynomial arithmetic on {monomial: Q3} dicts


def poly_clean(p: Mapping[Mono, Q3]) -> Poly:
    return {m: c for m, c in p.items() if c}


def poly_add(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for m, c in q.items():
        out[m] = out.get(m, Q3()) + c
    return poly_clean(out)


def poly_scale(p: Poly, s: Q3Like) -> Poly:
    s = Q3.of(s)
    return poly_clean({m: c * s for m, c in p.items()})


def poly_sub(p: Poly, q: Poly) -> Poly:
    return poly_add(p, poly_scale(q, -1))


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
            out[m] = out.get(m, Q3()) + c1 * c2
    return poly_clean(out)


def poly_pow(p: Poly, k: int) -> Poly:
    out: Poly = {(0, 0, 0): Q3.of(1)}
    for _ in range(k):
        out = poly_mul(out, p)
    return out


def poly_degree(p: Poly) -> int:
    return max(sum(m) for m in p)


def _leading(p: Poly) -> tuple[Mono, Q3]:
    m = max(p)  # lex on exponent triples
    return m, p[m]


def poly_divmod(p: Poly, d: Poly) -> tuple[Poly, Poly]:
    """Division with remainder by a single divisor, lex monomial order."""
    if not d:
        raise ZeroDivisionError("polynomial division by zero")
    dm, dc = _leading(d)
    quot: Poly = {}
    rem: Poly = {}
    work = dict(p)
    while work:
        m, c = _leading(work)
        if m[0] >= dm[0] and m[1] >= dm[1] and m[2] >= dm[2]:
            fm = (m[0] - dm[0], m[1] - dm[1], m[2] - dm[2])
            fc = c / dc
            quot[fm] = quot.get(fm, Q3()) + fc
            work = poly_sub(work, poly_mul({fm: fc}, d))
        else:
            rem[m] = c
            del work[m]
    return poly_clean(quot), poly_clean(rem)


def poly_divisible(p: Poly, d: Poly) -> Optional[Poly]:
    q, r = poly_divmod(p, d)
    return q if not r else None


def poly_substitute(p: Poly, subs: Sequence[Poly]) -> Poly:
    """Compose: substitute polynomials for x, y, w."""
    maxdeg = [max((m[i] for m in p), default=0) for i in range(3)]
    powers = []
    for i in range(3):
        cache = [{(0, 0, 0): Q3.of(1)}]
        for _ in range(maxdeg[i]):
            cache.append(poly_mul(cache[-1], subs[i]))
        powers.append(cache)
    out: Poly = {}
    for m, c in p.items():
        term = poly_scale(poly_mul(poly_mul(powers[0][m[0]], powers[1][m[1]]), powers[2][m[2]]), c)
        out = poly_add(out, term)
    return out


def poly_eval_exact(p: Poly, pt: ExactPoint) -> Q3:
    total = Q3()
    for (i, j, k), c in p.items():
        term = c
        for _ in range(i):
            term = term * pt[0]
        for _ in range(j):
            term = term * pt[1]
        for _ in range(k):
            term = term * pt[2]
        total = total + term
    return total


def poly_canonical(p: Poly) -> Poly:
    """Content-reduce: integer components with gcd 1, canonical sign."""
    if not p:
        return {}
    denoms = []
    for c in p.values():
        denoms.append(c.a.denominator)
        denoms.append(c.b.denominator)
    lcm = 1
    for d in denoms:
        lcm = lcm * d // math.gcd(lcm, d)
    nums = []
    for c in p.values():
        nums.append(abs(int(c.a * lcm)))
        nums.append(abs(int(c.b * lcm)))
    g = 0
    for n in nums:
        g = math.gcd(g, n)
    scale = Fraction(lcm, g if g else 1)
    out = {m: c * scale for m, c in p.items()}
    lead = out[max(out)]
    sgn = 1 if (lead.a > 0 or (lead.a == 0 and lead.b > 0)) else -1
    if sgn < 0:
        out = {m: -c for m, c in out.items()}
    return out


# ---------------------------------------------------------------------------
# plane curves


class PlaneCurve:
    """Nonzero homogeneous trivariate polynomial, content-reduced.

    Reducible curves are first-class: no squarefreeness is imposed.
    """

    __slots__ = ("coeffs", "degree")

    def __init__(self, coeffs: Mapping[Mono, Q3Like]):
        clean: Poly = {}
        for m, c in coeffs.items():
            q = Q3.of(c)
            if q:
                clean[tuple(m)] = q
        if not clean:
            raise ZeroPullback("zero polynomial is not a curve")
        degs = {sum(m) for m in clean}
        if len(degs) != 1:
            raise InexactInput(f"polynomial is not homogeneous: degrees {sorted(degs)}")
        self.coeffs = poly_canonical(clean)
        self.degree = degs.pop()

    @staticmethod
    def from_affine(coeffs: Mapping[tuple[int, int], Q3Like], degree: Optional[int] = None) -> "PlaneCurve":
        """Homogenize an affine polynomial in x, y with w."""
        items = {k: Q3.of(v) for k, v in coeffs.items() if Q3.of(v)}
        n = degree if degree is not None else max(i + j for i, j in items)
        return PlaneCurve({(i, j, n - i - j): c for (i, j), c in items.items()})

    @staticmethod
    def line(a: Q3Like, b: Q3Like, c: Q3Like) -> "PlaneCurve":
        return PlaneCurve({(1, 0, 0): Q3.of(a), (0, 1, 0): Q3.of(b), (0, 0, 1): Q3.of(c)})

    def __eq__(self, other):
        return isinstance(other, PlaneCurve) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        terms = ", ".join(f"{m}: {c!r}" for m, c in sorted(self.coeffs.items(), reverse=True))
        return f"PlaneCurve(deg={self.degree}, {{{terms}}})"

    def proportional_to(self, other: "PlaneCurve") -> bool:
        return self.coeffs == other.coeffs  # canonical form is unique up to nothing

    def evaluate_exact(self, pt: ExactPoint) -> Q3:
        return poly_eval_exact(self.coeffs, pt)

    def float_coeffs(self) -> dict[Mono, float]:
        return {m: float(c) for m, c in self.coeffs.items()}

    def evaluate(self, x: float, y: float, w: float = 1.0) -> float:
        total = 0.0
        for (i, j, k), c in self.coeffs.items():
            total += float(c) * x**i * y**j * w**k
        return total

    def multiply(self, other: "PlaneCurve") -> "PlaneCurve":
        return PlaneCurve(poly_mul(self.coeffs, other.coeffs))

    def to_text(self) -> str:
        lines = []
        for m, c in sorted(self.coeffs.items(), reverse=True):
            if c.b == 0:
                lines.append(f"({m[0]},{m[1]},{m[2]}): {c.a.numerator}/{c.a.denominator}")
            else:
                lines.append(
                    f"({m[0]},{m[1]},{m[2]}): {c.a.numerator}/{c.a.denominator}"
                    f"+{c.b.numerator}/{c.b.denominator}*s3"
                )
        return "\n".join(lines)

    @staticmethod
    def from_text(text: str) -> "PlaneCurve":
        coeffs: dict[Mono, Q3] = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            mono_part, _, coeff_part = line.partition(":")
            mono = tuple(int(t) for t in mono_part.strip().strip("()").split(","))
            coeff_part = coeff_part.strip()
            b = Fraction(0)
            if "*s3" in coeff_part:
                rat_part, _, s3_part = coeff_part.partition("+")
                if not s3_part:  # form like "num/den*s3" only
                    rat_part, s3_part = "0/1", coeff_part
                b = Fraction(s3_part.replace("*s3", ""))
                a = Fraction(rat_part)
            else:
                a = Fraction(coeff_part)
            coeffs[mono] = Q3(a, b)  # type: ignore[index]
        return PlaneCurve(coeffs)


# ---------------------------------------------------------------------------
# the quadratic map of a fundamental circle and pole


def _circle_matrix(center: tuple[Q3Like, Q3Like], r2: Q3Like) -> list[list[Q3]]:
    cx, cy = Q3.of(center[0]), Q3.of(center[1])
    rr = Q3.of(r2)
    return [
        [Q3.of(1), Q3.of(0), -cx],
        [Q3.of(0), Q3.of(1), -cy],
        [-cx, -cy, cx * cx + cy * cy - rr],
    ]


def _polar_form(m: Sequence[Sequence[Q3]], p: ExactPoint) -> list[Q3]:
    return [m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2] for i in range(3)]


class QuadraticMap:
    """Exact quadratic involution P -> polar(P) x (pole x P).

    The three component quadratics vanish exactly at the fundamental
    points; the self-composition equals (x, y, w) times a common cubic,
    which is verified symbolically at construction.
    """

    __slots__ = ("components", "bases", "_lines")

    def __init__(
        self,
        gamma: Sequence[Sequence[Q3Like]],
        pole: ExactPoint,
        base_b: ExactPoint,
        base_c: ExactPoint,
    ):
        m = [[Q3.of(v) for v in row] for row in gamma]
        for i in range(3):
            for j in range(3):
                if m[i][j] != m[j][i]:
                    raise InexactInput("fundamental conic matrix must be symmetric")
        a = pole
        # linear forms u_i = (M P)_i and v_i = (pole x P)_i
        u = [
            poly_clean({(1, 0, 0): m[i][0], (0, 1, 0): m[i][1], (0, 0, 1): m[i][2]})
            for i in range(3)
        ]
        skew = [
            [Q3.of(0), -a[2], a[1]],
            [a[2], Q3.of(0), -a[0]],
            [-a[1], a[0], Q3.of(0)],
        ]
        v = [
            poly_clean({(1, 0, 0): skew[i][0], (0, 1, 0): skew[i][1], (0, 0, 1): skew[i][2]})
            for i in range(3)
        ]
        comps = []
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            comps.append(poly_sub(poly_mul(u[j], v[k]), poly_mul(u[k], v[j])))
        # joint content normalization with the denominator's sign canonical
        merged: Poly = {}
        for idx, comp in enumerate(comps):
            for mono, c in comp.items():
                merged[(idx,) + mono] = c  # type: ignore[index]
        norm = poly_canonical(merged)  # type: ignore[arg-type]
        comps = [poly_clean({mono[1:]: c for mono, c in norm.items() if mono[0] == idx}) for idx in range(3)]
        lead = comps[2][max(comps[2])]
        if lead.sign() < 0:
            comps = [poly_scale(c, -1) for c in comps]
        self.components = tuple(comps)
        self.bases = {"A": pole, "B": base_b, "C": base_c}
        for name, pt in self.bases.items():
            for comp in self.components:
                if poly_eval_exact(comp, pt):
                    raise InexactInput(f"map components do not vanish at base point {name}")
        self._lines = {
            name: poly_clean(
                {(1, 0, 0): lf[0], (0, 1, 0): lf[1], (0, 0, 1): lf[2]}
            )
            for name, lf in ((n, _polar_form(m, p)) for n, p in self.bases.items())
        }
        for name, lf in self._lines.items():
            if not lf:
                raise InexactInput(f"degenerate fundamental line for {name}")
        self._verify_involution()

    def _verify_involution(self):
        g = [poly_substitute(c, self.components) for c in self.components]
        x = {(1, 0, 0): Q3.of(1)}
        y = {(0, 1, 0): Q3.of(1)}
        w = {(0, 0, 1): Q3.of(1)}
        if poly_sub(poly_mul(g[0], y), poly_mul(g[1], x)):
            raise InexactInput("quadratic map is not an involution up to scale")
        if poly_sub(poly_mul(g[0], w), poly_mul(g[2], x)):
            raise InexactInput("quadratic map is not an involution up to scale")
        if not any(g):
            raise InexactInput("degenerate self-composition")

    def fundamental_line(self, name: str) -> PlaneCurve:
        """Fundamental line contracted to base point `name` (its polar)."""
        return PlaneCurve(self._lines[name])

    def component_curves(self) -> tuple[PlaneCurve, PlaneCurve, PlaneCurve]:
        return tuple(PlaneCurve(c) for c in self.components)

    def image_exact(self, pt: ExactPoint) -> ExactPoint:
        return tuple(poly_eval_exact(c, pt) for c in self.components)  # type: ignore[return-value]

    def image_float(self, x: float, y: float, w: float = 1.0) -> tuple[float, float, float]:
        out = []
        for comp in self.components:
            total = 0.0
            for (i, j, k), c in comp.items():
                total += float(c) * x**i * y**j * w**k
            out.append(total)
        return tuple(out)  # type: ignore[return-value]


_HALF = Fraction(1, 2)


def canonical_map() -> QuadraticMap:
    """The equilateral configuration A=(0,0), B=(1,0), C=(1/2, sqrt(3)/2)
    with the fundamental circle tangent at B and through C."""
    gamma = _circle_matrix((Q3.of(1), Q3(Fraction(0), Fraction(1, 3))), Fraction(1, 3))
    return QuadraticMap(
        gamma,
        exact_point(0, 0),
        exact_point(1, 0),
        (Q3(_HALF), Q3(Fraction(0), _HALF), Q3.of(1)),
    )


def bh_map_polys(
    center: tuple[Q3Like, Q3Like] = None,
    r2: Q3Like = None,
    pole: tuple[Q3Like, Q3Like] = None,
    base_b: ExactPoint = None,
    base_c: ExactPoint = None,
) -> QuadraticMap:
    """Quadratic map for an exact circle and pole; defaults to canonical.

    The base points must be supplied exactly for non-canonical input (the
    intersections of the pole's polar with the circle generally live in a
    larger field, so they cannot be derived here).
    """
    if center is None:
        return canonical_map()
    if base_b is None or base_c is None:
        raise InexactInput("non-canonical configuration requires exact base points")
    gamma = _circle_matrix(center, r2)
    pole_pt = exact_point(pole[0], pole[1])
    for name, pt in (("B", base_b), ("C", base_c)):
        on_gamma = poly_eval_exact(
            {
                (2, 0, 0): gamma[0][0],
                (1, 1, 0): gamma[0][1] * 2,
                (0, 2, 0): gamma[1][1],
                (1, 0, 1): gamma[0][2] * 2,
                (0, 1, 1): gamma[1][2] * 2,
                (0, 0, 2): gamma[2][2],
            },
            pt,
        )
        if on_gamma:
            raise InexactInput(f"base point {name} is not exactly on the circle")
        pl = _polar_form(gamma, pole_pt)
        if pl[0] * pt[0] + pl[1] * pt[1] + pl[2] * pt[2]:
            raise InexactInput(f"base point {name} is not on the pole's polar")
    return QuadraticMap(gamma, pole_pt, base_b, base_c)


# ---------------------------------------------------------------------------
# multiplicities and transforms


def _local_expansion(c: PlaneCurve, p: ExactPoint) -> dict[tuple[int, int], Q3]:
    """Taylor coefficients of the curve in an affine chart centered at p."""
    nz = [i for i in (2, 0, 1) if p[i]]
    if not nz:
        raise WrongMultiplicity("invalid exact point")
    chart = nz[0]
    scale = p[chart].inverse()
    aff = [p[i] * scale for i in range(3) if i != chart]
    others = [i for i in range(3) if i != chart]
    out: dict[tuple[int, int], Q3] = {}
    for mono, coeff in c.coeffs.items():
        eu, ev = mono[others[0]], mono[others[1]]
        # expand (u + p_u)^eu (v + p_v)^ev
        for iu in range(eu + 1):
            bu = Q3.of(math.comb(eu, iu))
            pu = Q3.of(1)
            for _ in range(eu - iu):
                pu = pu * aff[0]
            for iv in range(ev + 1):
                bv = Q3.of(math.comb(ev, iv))
                pv = Q3.of(1)
                for _ in range(ev - iv):
                    pv = pv * aff[1]
                key = (iu, iv)
                out[key] = out.get(key, Q3()) + coeff * bu * bv * pu * pv
    return {k: v for k, v in out.items() if v}


def multiplicity_at(c: PlaneCurve, p: ExactPoint) -> int:
    """Smallest total degree with a nonvanishing local Taylor term;
    0 means the point is not on the curve."""
    local = _local_expansion(c, p)
    if not local:
        return c.degree  # curve is a cone with vertex p (all terms vanish)
    return min(a + b for a, b in local)


class SingularityType(Enum):
    NODE = "node"
    CUSP = "cusp"
    TACNODE_OR_WORSE = "tacnode-or-worse"


def tangent_cone_discriminant(c: PlaneCurve, p: ExactPoint) -> Q3:
    """Discriminant of the degree-2 Taylor form at a double point.

    Its exact sign separates a crunode (positive: two real branches)
    from an isolated real point (negative: conjugate complex tangents,
    the visible curve stays away from the point) and a repeated tangent
    (zero).
    """
    local = _local_expansion(c, p)
    if not local or min(a + b for a, b in local) != 2:
        raise WrongMultiplicity("point does not have multiplicity 2")
    qa = local.get((2, 0), Q3())
    qb = local.get((1, 1), Q3())
    qc = local.get((0, 2), Q3())
    return qb * qb - 4 * qa * qc


def classify_singularity(c: PlaneCurve, p: ExactPoint) -> SingularityType:
    """Classify a double point by its tangent cone and cubic term."""
    local = _local_expansion(c, p)
    if not local or min(a + b for a, b in local) != 2:
        raise WrongMultiplicity("point does not have multiplicity 2")
    qa = local.get((2, 0), Q3())
    qb = local.get((1, 1), Q3())
    qc = local.get((0, 2), Q3())
    disc = qb * qb - 4 * qa * qc
    if disc:
        return SingularityType.NODE
    # repeated tangent alpha*u + beta*v
    if qa:
        alpha, beta = 2 * qa, qb
    else:
        alpha, beta = qb, 2 * qc  # qa == 0, disc == 0 forces qb == 0, so tangent is v
    if not qa and not qc:
        return SingularityType.NODE  # qb != 0 handled by disc above; unreachable
    # substitute so the tangent becomes the second coordinate t:
    # if alpha != 0: u = (t - beta*s)/alpha, v = s ; else tangent = v: s = u, t = v
    cubic = {k: v for k, v in local.items() if k[0] + k[1] == 3}
    if alpha:
        inv = alpha.inverse()
        # coefficient of s^3 after u -> (t - beta s)/alpha, v -> s: set t = 0
        # u -> -beta*inv*s, v -> s
        coeff = Q3()
        mb = -beta * inv
        for (i, j), cv in cubic.items():
            term = cv
            for _ in range(i):
                term = term * mb
            coeff = coeff + term
    else:
        coeff = cubic.get((3, 0), Q3())
    return SingularityType.CUSP if coeff else SingularityType.TACNODE_OR_WORSE


def total_transform(c: PlaneCurve, q: QuadraticMap) -> PlaneCurve:
    """Substitute the map components: degree doubles exactly."""
    out = poly_substitute(c.coeffs, q.components)
    if not out:
        raise ZeroPullback("curve pulls back to zero")
    return PlaneCurve(out)


def strict_transform(
    c: PlaneCurve, q: QuadraticMap
) -> tuple[PlaneCurve, list[tuple[PlaneCurve, int]]]:
    """Total transform with the exceptional line factors divided out.

    Each fundamental line divides the total transform exactly as often as
    the multiplicity of the curve at the base point it is contracted to;
    the result has degree 2n - t_A - t_B - t_C.
    """
    for name in ("A", "B", "C"):
        if poly_divisible(c.coeffs, q._lines[name]) is not None:
            raise FundamentalComponent(f"curve contains the fundamental line of {name}")
    total = total_transform(c, q)
    work = dict(total.coeffs)
    exceptional: list[tuple[PlaneCurve, int]] = []
    for name in ("A", "B", "C"):
        line = q._lines[name]
        count = 0
        while True:
            quo = poly_divisible(work, line)
            if quo is None:
                break
            work = quo
            count += 1
        t_v = multiplicity_at(c, q.bases[name])
        if count != t_v:
            raise ExceptionalMismatch(
                f"factor of line {name} appears {count} times, multiplicity is {t_v}"
            )
        exceptional.append((q.fundamental_line(name), count))
    return PlaneCurve(work), exceptional


def curve_eval_residual(c: PlaneCurve, samples: Iterable[HPoint]) -> float:
    """Max |c(p)| over normalized samples, scaled by the coefficient norm."""
    fc = c.float_coeffs()
    norm = math.sqrt(sum(v * v for v in fc.values()))
    worst = 0.0
    for p in samples:
        x, y, w = p.x, p.y, p.w
        total = 0.0
        for (i, j, k), v in fc.items():
            total += v * x**i * y**j * w**k
        worst = max(worst, abs(total) / norm)
    return worst


# ---------------------------------------------------------------------------
# random curves with prescribed base-point multiplicities (for property tests)


def _q3_nullspace(rows: list[list[Q3]], ncols: int) -> list[list[Q3]]:
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(mat)):
            if mat[i][col]:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = mat[r][col].inverse()
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [Q3() for _ in range(ncols)]
        vec[fcol] = Q3.of(1)
        for row_idx, pcol in enumerate(pivots):
            vec[pcol] = -mat[row_idx][fcol]
        basis.append(vec)
    return basis


def _multiplicity_conditions(n: int, p: ExactPoint, t: int, monos: list[Mono]) -> list[list[Q3]]:
    """Linear conditions on degree-n coefficients for multiplicity >= t at p."""
    if t == 0:
        return []
    scale = p[2].inverse()
    px, py = p[0] * scale, p[1] * scale
    rows = []
    for a in range(t):
        for b in range(t - a):
            row = []
            for (i, j, _k) in monos:
                if i >= a and j >= b:
                    coeff = Q3.of(math.comb(i, a) * math.comb(j, b))
                    for _ in range(i - a):
                        coeff = coeff * px
                    for _ in range(j - b):
                        coeff = coeff * py
                    row.append(coeff)
                else:
                    row.append(Q3())
            rows.append(row)
    return rows


def random_curve_with_multiplicities(
    n: int, t: tuple[int, int, int], q: QuadraticMap, rng, attempts: int = 40
) -> Optional[PlaneCurve]:
    """Random degree-n curve with exactly the prescribed multiplicities at
    the three base points and no fundamental-line component, or None if
    the combination is infeasible."""
    if any(tv > n for tv in t):
        return None
    monos = [(i, j, n - i - j) for i in range(n + 1) for j in range(n + 1 - i)]
    rows: list[list[Q3]] = []
    for name, tv in zip(("A", "B", "C"), t):
        rows.extend(_multiplicity_conditions(n, q.bases[name], tv, monos))
    basis = _q3_nullspace(rows, len(monos))
    if not basis:
        return None
    for _ in range(attempts):
        coeffs = [Q3() for _ in monos]
        for vec in basis:
            k = Q3.of(rng.randint(-5, 5))
            coeffs = [c + k * v for c, v in zip(coeffs, vec)]
        poly = {m: c for m, c in zip(monos, coeffs) if c}
        if not poly:
            continue
        curve = PlaneCurve(poly)
        if curve.degree != n:
            continue
        if any(poly_divisible(curve.coeffs, q._lines[nm]) is not None for nm in ("A", "B", "C")):
            continue
        if all(multiplicity_at(curve, q.bases[nm]) == tv for nm, tv in zip(("A", "B", "C"), t)):
            return curve
    return None
