"""Inversive, projective and quadratic plane transformations.

Circular inversion, stereographic projection and its north/south
composition, central projection between planes, pole/polar, harmonic
conjugates, conjugate conics with their ideal chords, organic conic
generation from a pencil projectivity, and the quadratic inversion
determined by a fundamental conic and a pole (with its blow-up limits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Union

import numpy as np

from .core import (
    EPS_INCIDENCE,
    Circle,
    CoincidentObjects,
    Conic,
    DegenerateInput,
    GenCircle,
    GeometryError,
    HLine,
    HPoint,
    conic_through,
    intersect,
    join,
    meet,
    midpoint,
)


class CenterInversion(GeometryError):
    pass


class PoleProjection(GeometryError):
    pass


class DegenerateRay(GeometryError):
    pass


class SingularConic(GeometryError):
    pass


class NoCenter(GeometryError):
    pass


class AsymptoticDirection(GeometryError):
    pass


class RealSecant(GeometryError):
    pass


class NoIntersection(GeometryError):
    pass


class ConcentricCircles(GeometryError):
    pass


class DegenerateProjectivity(GeometryError):
    pass


class FundamentalPoint(GeometryError):
    pass


class IndeterminateIntersection(GeometryError):
    pass


class ExceptionalApproach(GeometryError):
    pass


class ComplexBasePoints(GeometryError):
    pass


# ---------------------------------------------------------------------------
# circular inversion


def invert_point(c: Circle, p: HPoint) -> HPoint:
    """Inverse of p in circle c: image on the ray center->p, d*d' = r^2.

    The point at infinity maps to the center; the center itself has no
    affine image and raises CenterInversion.
    """
    cx, cy = c.center.affine()
    if p.is_infinite:
        return c.center
    px, py = p.affine()
    dx, dy = px - cx, py - cy
    d2 = dx * dx + dy * dy
    if d2 <= (EPS_INCIDENCE * c.radius) ** 2:
        raise CenterInversion("inversion center has no affine image")
    k = c.radius * c.radius / d2
    return HPoint.at(cx + k * dx, cy + k * dy)


def invert_gencircle(c: Circle, g: GenCircle) -> GenCircle:
    """Image of a line or circle under inversion in c.

    Lines/circles through the center map to lines; everything else maps
    to circles; circles orthogonal to c map to themselves.
    """
    cx, cy = c.center.affine()
    r2 = c.radius * c.radius
    if isinstance(g, HLine):
        if g.is_infinity:
            raise DegenerateInput("the line at infinity has no generalized-circle image")
        n = math.hypot(g.a, g.b)
        s = (g.a * cx + g.b * cy + g.c) / n
        if abs(s) <= EPS_INCIDENCE * max(1.0, c.radius):
            return g  # line through the center is fixed as a set
        ux, uy = -g.a / n * math.copysign(1.0, s), -g.b / n * math.copysign(1.0, s)
        h = abs(s)
        rho = r2 / (2.0 * h)
        return Circle(HPoint.at(cx + rho * ux, cy + rho * uy), rho)
    gx, gy = g.center.affine()
    d = math.hypot(gx - cx, gy - cy)
    if abs(d - g.radius) <= EPS_INCIDENCE * max(1.0, d, g.radius):
        # circle through the center: image is a line perpendicular to the
        # center line at the image of the antipodal point
        ux, uy = (gx - cx) / d, (gy - cy) / d
        t = r2 / (d + g.radius)
        fx, fy = cx + t * ux, cy + t * uy
        return HLine(ux, uy, -(ux * fx + uy * fy))
    k = r2 / (d * d - g.radius * g.radius)
    return Circle(HPoint.at(cx + k * (gx - cx), cy + k * (gy - cy)), abs(k) * g.radius)


# ---------------------------------------------------------------------------
# stereographic projection (canonical frame: unit sphere, image plane z = 0)


class ProjectionPole(Enum):
    NORTH = 1
    SOUTH = -1


NORTH = ProjectionPole.NORTH
SOUTH = ProjectionPole.SOUTH


@dataclass(frozen=True)
class SpherePoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        n2 = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(n2 - 1.0) > 1e-12:
            raise DegenerateInput(f"sphere point not on the unit sphere: |p|^2 = {n2}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def stereo_project(pole: ProjectionPole, s: SpherePoint) -> HPoint:
    """Project a sphere point from the chosen pole onto the plane z = 0."""
    denom = 1.0 - pole.value * s.z
    if abs(denom) <= 1e-12:
        raise PoleProjection("cannot project the pole itself")
    return HPoint.at(s.x / denom, s.y / denom)


def stereo_lift(pole: ProjectionPole, p: HPoint) -> SpherePoint:
    """Inverse stereographic map of a finite plane point onto the sphere."""
    x, y = p.affine()
    r2 = x * x + y * y
    d = r2 + 1.0
    return SpherePoint(2.0 * x / d, 2.0 * y / d, pole.value * (r2 - 1.0) / d)


def ns_composition(p: HPoint) -> HPoint:
    """Lift from the north pole, project from the south pole.

    Coincides pointwise with inversion in the unit circle.
    """
    if p.is_infinite:
        return HPoint.at(0.0, 0.0)
    x, y = p.affine()
    if x * x + y * y <= EPS_INCIDENCE * EPS_INCIDENCE:
        raise CenterInversion("origin has no north/south composition image")
    return stereo_project(SOUTH, stereo_lift(NORTH, p))


# ---------------------------------------------------------------------------
# central projection between planes in 3-space


@dataclass(frozen=True)
class Plane3:
    """Affine plane in 3-space with an orthonormal in-plane frame (u, v)."""

    origin: tuple[float, float, float]
    u: tuple[float, float, float]
    v: tuple[float, float, float]

    def __post_init__(self):
        u, v = np.array(self.u), np.array(self.v)
        if abs(np.dot(u, u) - 1) > 1e-9 or abs(np.dot(v, v) - 1) > 1e-9 or abs(np.dot(u, v)) > 1e-9:
            raise DegenerateInput("plane frame must be orthonormal")

    @staticmethod
    def from_normal(origin, normal) -> "Plane3":
        n = np.asarray(normal, dtype=float)
        n = n / np.linalg.norm(n)
        seed = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        u = np.cross(n, seed)
        u = u / np.linalg.norm(u)
        v = np.cross(n, u)
        return Plane3(tuple(np.asarray(origin, dtype=float)), tuple(u), tuple(v))

    @property
    def normal(self) -> np.ndarray:
        return np.cross(self.u, self.v)

    def embed(self, p: HPoint) -> np.ndarray:
        x, y = p.affine()
        return np.asarray(self.origin) + x * np.asarray(self.u) + y * np.asarray(self.v)

    def coords(self, q: np.ndarray) -> HPoint:
        d = q - np.asarray(self.origin)
        return HPoint.at(float(d @ np.asarray(self.u)), float(d @ np.asarray(self.v)))

    def coords_direction(self, d: np.ndarray) -> HPoint:
        return HPoint.infinite(float(d @ np.asarray(self.u)), float(d @ np.asarray(self.v)))


def central_project(center, src: Plane3, dst: Plane3, p: HPoint) -> HPoint:
    """Project p (in src-plane coordinates) from a 3D center onto dst.

    Rays parallel to the destination plane land on its line at infinity.
    """
    c = np.asarray(center, dtype=float)
    for plane in (src, dst):
        if abs((c - np.asarray(plane.origin)) @ plane.normal) <= 1e-12:
            raise DegenerateInput("projection center lies on a plane")
    if p.is_infinite:
        d3 = p.x * np.asarray(src.u) + p.y * np.asarray(src.v)
    else:
        d3 = src.embed(p) - c
        if np.linalg.norm(d3) <= 1e-14:
            raise DegenerateRay("point coincides with the projection center")
    n = dst.normal
    denom = float(d3 @ n)
    num = float((np.asarray(dst.origin) - c) @ n)
    if abs(denom) <= 1e-12 * max(1.0, float(np.linalg.norm(d3))):
        return dst.coords_direction(d3)
    return dst.coords(c + (num / denom) * d3)


# ---------------------------------------------------------------------------
# pole / polar


def _as_conic(c: Union[Circle, Conic]) -> Conic:
    return c.to_conic() if isinstance(c, Circle) else c


def polar(c: Union[Circle, Conic], p: HPoint) -> HLine:
    """Polar line of p: the matrix product m @ p.

    For p on the conic this is the tangent; p inside or outside both work.
    """
    conic = _as_conic(c)
    if conic.rank() < 3:
        raise SingularConic("polar undefined for a degenerate conic")
    v = conic.m @ p.as_array()
    return HLine(v[0], v[1], v[2])


def pole(c: Union[Circle, Conic], l: HLine) -> HPoint:
    conic = _as_conic(c)
    if conic.rank() < 3:
        raise SingularConic("pole undefined for a degenerate conic")
    v = np.linalg.solve(conic.m, l.as_array())
    return HPoint(v[0], v[1], v[2])


def harmonic_conjugate(a: HPoint, b: HPoint, c: HPoint) -> HPoint:
    """Fourth harmonic d with cross-ratio (a, b; c, d) = -1.

    Built as the circular inverse of c in the circle with diameter ab;
    the midpoint of ab maps to the point at infinity of the line.
    """
    if a.close_to(b):
        raise DegenerateInput("harmonic conjugate needs two distinct base points")
    if c.close_to(a) or c.close_to(b):
        raise DegenerateInput("point must differ from both base points")
    line = join(a, b)
    if line.residual(c) > 1e-7:
        raise DegenerateInput("point is not on the base line")
    if a.is_infinite or b.is_infinite:
        fin = b if a.is_infinite else a
        fx, fy = fin.affine()
        cx, cy = c.affine()
        return HPoint.at(2.0 * fx - cx, 2.0 * fy - cy)
    m = midpoint(a, b)
    if c.is_infinite:
        return m
    from .core import distance

    r = distance(a, b) / 2.0
    k = Circle(m, r)
    try:
        return invert_point(k, c)
    except CenterInversion:
        return join(a, b).direction()


# ---------------------------------------------------------------------------
# conjugate conic and ideal chords


def conjugate_conic(c: Union[Circle, Conic], direction: HPoint) -> Conic:
    """Conic sharing diameters and parameter with c but with the quadratic
    term along `direction` flipped in sign (ellipse <-> hyperbola).

    `direction` is a point at infinity; asymptotic directions are rejected.
    Applying the construction twice returns the original conic.
    """
    conic = _as_conic(c)
    if conic.rank() < 3:
        raise SingularConic("conjugate conic needs a nondegenerate conic")
    if not direction.is_infinite:
        raise DegenerateInput("direction must be a point at infinity")
    ctr = conic.center()
    if ctr.is_infinite:
        raise NoCenter("parabola has no conjugate conic")
    if abs(conic.evaluate(direction)) <= EPS_INCIDENCE:
        raise AsymptoticDirection("direction is asymptotic to the conic")
    diam = polar(conic, direction)  # diameter conjugate to the direction
    u = diam.direction()
    cx, cy = ctr.affine()
    t = np.array(
        [
            [u.x, direction.x, cx],
            [u.y, direction.y, cy],
            [0.0, 0.0, 1.0],
        ]
    )
    mf = t.T @ conic.m @ t
    # in the (conjugate diameter, direction) frame the conic is centered
    # with no cross term; anything beyond rounding means a bad frame
    scale = float(np.max(np.abs(np.diag(mf))))
    off = max(abs(mf[0, 1]), abs(mf[0, 2]), abs(mf[1, 2]))
    if off > 1e-8 * max(scale, 1e-300):
        raise DegenerateInput("conjugate-diameter frame is not diagonal")
    mf[0, 1] = mf[1, 0] = 0.0
    mf[0, 2] = mf[2, 0] = 0.0
    mf[1, 2] = mf[2, 1] = 0.0
    mf[1, 1] = -mf[1, 1]
    ti = np.linalg.inv(t)
    return Conic(ti.T @ mf @ ti)


def ideal_chord(c: Union[Circle, Conic], l: HLine) -> tuple[HPoint, HPoint]:
    """Real carrier of the imaginary chord cut on c by a disjoint line l:
    the intersection of l with the conjugate conic along l's direction."""
    conic = _as_conic(c)
    real = intersect(l, conic)
    if len(real) == 1 and real[0].multiplicity == 2:
        p = real[0].point
        return (p, p)
    if real:
        raise RealSecant("line meets the conic in real points")
    conj = conjugate_conic(conic, l.direction())
    pts = intersect(l, conj)
    if not pts:
        raise NoIntersection("line misses the conjugate conic as well")
    return (pts[0].point, pts[-1].point)


def ideal_common_secant(c1: Circle, c2: Circle) -> HLine:
    """Radical axis: the difference of the two circle equations.

    Carries the common chord when the circles meet, its ideal counterpart
    when they do not; tangent lengths from any of its points are equal.
    """
    from .core import _radical_axis

    try:
        return _radical_axis(c1, c2)
    except CoincidentObjects:
        raise ConcentricCircles("concentric circles have no radical axis") from None


# ---------------------------------------------------------------------------
# organic generation of a conic from a projectivity between two pencils


def _pencil_basis(v: HPoint) -> tuple[np.ndarray, np.ndarray]:
    arr = v.as_array()
    skip = int(np.argmax(np.abs(arr)))
    basis = []
    for i in range(3):
        if i == skip:
            continue
        e = np.zeros(3)
        e[i] = 1.0
        l = np.cross(arr, e)
        basis.append(l / np.linalg.norm(l))
    return basis[0], basis[1]


def _pencil_params(v: HPoint, l: HLine) -> np.ndarray:
    l0, l1 = _pencil_basis(v)
    mat = np.stack([l0, l1], axis=1)
    sol, res, rank, _ = np.linalg.lstsq(mat, l.as_array(), rcond=None)
    resid = np.linalg.norm(mat @ sol - l.as_array())
    if resid > 1e-7:
        raise DegenerateInput("line does not belong to the pencil")
    n = np.linalg.norm(sol)
    if n == 0.0:
        raise DegenerateInput("zero line")
    return sol / n


def _pencil_line(v: HPoint, params: np.ndarray) -> HLine:
    l0, l1 = _pencil_basis(v)
    lv = params[0] * l0 + params[1] * l1
    return HLine(lv[0], lv[1], lv[2])


@dataclass(frozen=True)
class Projectivity:
    """Projectivity between the line pencils through p and through q,
    given by a nonsingular 2x2 matrix on canonical pencil parameters."""

    p: HPoint
    q: HPoint
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (2, 2) or abs(np.linalg.det(m)) <= 1e-12 * max(1.0, float(np.max(np.abs(m))) ** 2):
            raise DegenerateProjectivity("pencil matrix must be nonsingular 2x2")
        m = m / np.max(np.abs(m))
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def apply(self, r: HLine) -> HLine:
        params = _pencil_params(self.p, r)
        return _pencil_line(self.q, self.matrix @ params)

    def fixes_joining_line(self) -> bool:
        pq = join(self.p, self.q)
        out = self.apply(pq)
        cross = np.cross(pq.as_array(), out.as_array())
        return bool(np.max(np.abs(cross)) <= 1e-9)


def projectivity_from_lines(
    p: HPoint, q: HPoint, pairs: list[tuple[HLine, HLine]]
) -> Projectivity:
    """Unique pencil projectivity matching three line correspondences."""
    if len(pairs) != 3:
        raise DegenerateProjectivity("exactly three line pairs required")
    a = [_pencil_params(p, r) for r, _ in pairs]
    b = [_pencil_params(q, s) for _, s in pairs]
    la = np.linalg.solve(np.stack([a[0], a[1]], axis=1), a[2])
    lb = np.linalg.solve(np.stack([b[0], b[1]], axis=1), b[2])
    if min(abs(la[0]), abs(la[1]), abs(lb[0]), abs(lb[1])) <= 1e-12:
        raise DegenerateProjectivity("degenerate line correspondences")
    src = np.stack([la[0] * a[0], la[1] * a[1]], axis=1)
    dst = np.stack([lb[0] * b[0], lb[1] * b[1]], axis=1)
    return Projectivity(p, q, dst @ np.linalg.inv(src))


class OrganicResult(NamedTuple):
    conic: Conic
    degenerate: bool


def organic_conic(sigma: Projectivity, samples: int = 24) -> OrganicResult:
    """Locus of r ∧ sigma(r) as r runs through the source pencil.

    A conic through both pencil vertices; degenerates to a line pair
    (rank <= 2, flagged) exactly when sigma maps the joining line to
    itself, e.g. for every perspectivity.
    """
    if sigma.p.close_to(sigma.q):
        raise DegenerateProjectivity("pencil vertices must be distinct")
    pts: list[HPoint] = []
    for k in range(samples):
        theta = math.pi * (k + 0.31) / samples
        r = _pencil_line(sigma.p, np.array([math.cos(theta), math.sin(theta)]))
        s = sigma.apply(r)
        try:
            x = meet(r, s)
        except CoincidentObjects:
            continue
        if not any(x.close_to(e, 1e-9) for e in pts):
            pts.append(x)
    degenerate = sigma.fixes_joining_line()
    if len(pts) < 5 and not degenerate:
        raise DegenerateProjectivity("could not sample five locus points")
    if degenerate:
        # line pair: the joining line plus the line carrying the meets
        carrier_pts = [x for x in pts if join(sigma.p, sigma.q).residual(x) > 1e-7]
        if len(carrier_pts) >= 2:
            carrier = join(carrier_pts[0], carrier_pts[-1])
        else:
            carrier = join(sigma.p, sigma.q)
        l1 = join(sigma.p, sigma.q).as_array()
        l2 = carrier.as_array()
        m = np.outer(l1, l2)
        return OrganicResult(Conic(m + m.T), True)
    idx = np.linspace(0, len(pts) - 1, 5).astype(int)
    conic = conic_through([pts[i] for i in idx])
    return OrganicResult(conic, conic.rank() < 3)


# ---------------------------------------------------------------------------
# Bellavitis-Hirst quadratic inversion


@dataclass(frozen=True)
class BHConfig:
    """Fundamental conic with a pole and the derived base triangle.

    The base points are the real intersections of the pole's polar with
    the conic; they are absent (None) when those intersections are
    complex, e.g. for classical inversion where the pole is the center.
    """

    gamma: Conic
    pole: HPoint
    base_b: Optional[HPoint] = None
    base_c: Optional[HPoint] = None

    @staticmethod
    def create(gamma: Union[Circle, Conic], pole: HPoint) -> "BHConfig":
        conic = _as_conic(gamma)
        if conic.rank() < 3:
            raise SingularConic("fundamental conic must be nondegenerate")
        if abs(conic.evaluate(pole)) <= EPS_INCIDENCE:
            raise DegenerateInput("pole must not lie on the fundamental conic")
        pl = polar(conic, pole)
        pts = [i.point for i in intersect(pl, conic)]
        if len(pts) == 2:
            return BHConfig(conic, pole, pts[0], pts[1])
        return BHConfig(conic, pole, None, None)

    @property
    def has_real_bases(self) -> bool:
        return self.base_b is not None and self.base_c is not None

    def fundamental_lines(self) -> dict[str, HLine]:
        """Real fundamental lines keyed by the base point they contract to.

        polar(pole) (= line BC when real) contracts to the pole; the
        tangent line through pole and each base point contracts to that
        base point.
        """
        lines = {"A": polar(self.gamma, self.pole)}
        if self.base_b is not None:
            lines["B"] = join(self.pole, self.base_b)
        if self.base_c is not None:
            lines["C"] = join(self.pole, self.base_c)
        return lines

    def quadratic_matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric matrices (F0, F1, F2) with image_i(P) = P^T F_i P.

        The map is P -> polar(P) x (pole x P), expanded to one quadratic
        form per homogeneous output coordinate.
        """
        m = self.gamma.m
        a = self.pole.as_array()
        s = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
        out = []
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            f = np.outer(m[j], s[k]) - np.outer(m[k], s[j])
            out.append((f + f.T) / 2.0)
        return tuple(out)


def bh_invert(cfg: BHConfig, p: HPoint) -> HPoint:
    """Quadratic inverse of p: polar(p) ∧ line(pole, p).

    Involutive away from the fundamental triangle; specializes to
    circular inversion when gamma is a circle and the pole its center.
    """
    for fund in (cfg.pole, cfg.base_b, cfg.base_c):
        if fund is not None and p.close_to(fund, 1e-12):
            raise FundamentalPoint(f"{p} is a fundamental point (blown up)")
    l = polar(cfg.gamma, p)
    m = join(cfg.pole, p)
    if np.max(np.abs(np.cross(l.as_array(), m.as_array()))) <= EPS_INCIDENCE:
        raise IndeterminateIntersection("polar coincides with the joining line")
    return meet(l, m)


def bh_bilinear(cfg: BHConfig, p: HPoint, q: HPoint) -> np.ndarray:
    """Polarization of the quadratic map: B(p, q) with B(p, p) = image(p)."""
    f0, f1, f2 = cfg.quadratic_matrices()
    a, b = p.as_array(), q.as_array()
    return np.array([float(a @ f @ b) for f in (f0, f1, f2)])


def bh_blowup_limit(cfg: BHConfig, base: str, approach_line: HLine) -> HPoint:
    """Limit of bh_invert along a line through a fundamental point.

    Computed from the first-order expansion of the quadratic map, so it
    is exact up to rounding; distinct approach lines give distinct limits
    on the exceptional line of the chosen base point.
    """
    points = {"A": cfg.pole, "B": cfg.base_b, "C": cfg.base_c}
    if base not in points:
        raise DegenerateInput("base must be one of 'A', 'B', 'C'")
    v = points[base]
    if v is None:
        raise ComplexBasePoints(f"base point {base} is not real in this configuration")
    if approach_line.residual(v) > 1e-9:
        raise DegenerateInput("approach line does not pass through the base point")
    for name, line in cfg.fundamental_lines().items():
        cross = np.cross(line.as_array(), approach_line.as_array())
        if np.max(np.abs(cross)) <= 1e-9 and line.residual(v) <= 1e-9:
            raise ExceptionalApproach(f"approach along the fundamental line of {name}")
    from .core import _line_points

    p0, p1 = _line_points(approach_line)
    va = v.as_array()
    d = p1 if np.max(np.abs(np.cross(p1, va))) > np.max(np.abs(np.cross(p0, va))) else p0
    w = bh_bilinear(cfg, v, HPoint(d[0], d[1], d[2]))
    if np.max(np.abs(w)) <= 1e-12:
        raise ExceptionalApproach("first-order expansion vanishes along this line")
    return HPoint(w[0], w[1], w[2])
