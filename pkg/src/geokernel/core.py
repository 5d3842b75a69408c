"""Numeric projective and metric plane primitives.

Homogeneous points and lines, circles and general conics as symmetric
3x3 matrices, their intersections, cross-ratio, tangents and angles.
Everything here is a pure function over immutable values; tolerances are
relative to coordinates normalized so the largest component is 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

# Incidence tolerance on normalized homogeneous coordinates.  Double
# precision leaves ~6 guard digits for chained constructions above this.
EPS_INCIDENCE = 1e-9

_TINY = 1e-300


class GeometryError(Exception):
    """Base class for geometric failures that callers may handle."""


class CoincidentObjects(GeometryError):
    pass


class NotCollinear(GeometryError):
    pass


class DegenerateQuadruple(GeometryError):
    pass


class DegenerateInput(GeometryError):
    pass


class NotOnCurve(GeometryError):
    pass


class SingularPoint(GeometryError):
    pass


class LineAtInfinity(GeometryError):
    pass


def _canonical3(x: float, y: float, w: float) -> tuple[float, float, float]:
    """Scale a homogeneous triple so its largest-magnitude entry is +1."""
    ax, ay, aw = abs(x), abs(y), abs(w)
    m = max(ax, ay, aw)
    if m == 0.0 or not math.isfinite(m):
        raise DegenerateInput(f"invalid homogeneous triple ({x}, {y}, {w})")
    if aw == m:
        s = w
    elif ay == m:
        s = y
    else:
        s = x
    return (x / s, y / s, w / s)


@dataclass(frozen=True)
class HPoint:
    """Homogeneous point (x : y : w); w == 0 marks a point at infinity."""

    x: float
    y: float
    w: float

    def __post_init__(self):
        x, y, w = _canonical3(self.x, self.y, self.w)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "w", w)

    @staticmethod
    def at(x: float, y: float) -> "HPoint":
        return HPoint(x, y, 1.0)

    @staticmethod
    def infinite(dx: float, dy: float) -> "HPoint":
        return HPoint(dx, dy, 0.0)

    @property
    def is_infinite(self) -> bool:
        return self.w == 0.0

    def affine(self) -> tuple[float, float]:
        if self.w == 0.0:
            raise LineAtInfinity(f"point at infinity has no affine coordinates: {self}")
        return (self.x / self.w, self.y / self.w)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.w])

    def close_to(self, other: "HPoint", tol: float = EPS_INCIDENCE) -> bool:
        return point_distance(self, other) <= tol


@dataclass(frozen=True)
class HLine:
    """Line a*x + b*y + c*w = 0; (0, 0, 1) is the line at infinity."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        a, b, c = _canonical3(self.a, self.b, self.c)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def is_infinity(self) -> bool:
        return self.a == 0.0 and self.b == 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    def direction(self) -> HPoint:
        """Point at infinity of this line."""
        if self.is_infinity:
            raise LineAtInfinity("the line at infinity has no direction")
        return HPoint(self.b, -self.a, 0.0)

    def residual(self, p: HPoint) -> float:
        return abs(self.a * p.x + self.b * p.y + self.c * p.w)

    def contains(self, p: HPoint, tol: float = EPS_INCIDENCE) -> bool:
        return self.residual(p) <= tol


@dataclass(frozen=True)
class Circle:
    """Metric circle kept in exact center/radius form.

    Losslessly convertible to a Conic; metric operations (inversion)
    use this form directly to avoid conditioning loss.
    """

    center: HPoint
    radius: float

    def __post_init__(self):
        if self.center.is_infinite:
            raise DegenerateInput("circle center must be finite")
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise DegenerateInput(f"circle radius must be positive, got {self.radius}")

    def to_conic(self) -> "Conic":
        cx, cy = self.center.affine()
        r = self.radius
        m = np.array(
            [
                [1.0, 0.0, -cx],
                [0.0, 1.0, -cy],
                [-cx, -cy, cx * cx + cy * cy - r * r],
            ]
        )
        return Conic(m)

    def point_at(self, theta: float) -> HPoint:
        cx, cy = self.center.affine()
        return HPoint.at(cx + self.radius * math.cos(theta), cy + self.radius * math.sin(theta))

    def contains(self, p: HPoint, tol: float = EPS_INCIDENCE) -> bool:
        if p.is_infinite:
            return False
        px, py = p.affine()
        cx, cy = self.center.affine()
        return abs(math.hypot(px - cx, py - cy) - self.radius) <= tol * max(1.0, self.radius)


class Conic:
    """Point conic as a symmetric 3x3 coefficient matrix; p maps to p^T m p.

    rank < 3 marks a reducible conic (line pair or double line).
    """

    __slots__ = ("m",)

    def __init__(self, m: np.ndarray):
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise DegenerateInput("conic matrix must be 3x3")
        m = (m + m.T) / 2.0
        scale = np.max(np.abs(m))
        if scale == 0.0 or not np.isfinite(scale):
            raise DegenerateInput("conic matrix must be nonzero and finite")
        m = m / scale
        # fix sign deterministically: first nonzero entry in row-major order positive
        flat = m.reshape(-1)
        for v in flat:
            if v != 0.0:
                if v < 0.0:
                    m = -m
                break
        m.setflags(write=False)
        self.m = m

    def __repr__(self):
        return f"Conic({self.m.tolist()})"

    def evaluate(self, p: HPoint) -> float:
        v = p.as_array()
        return float(v @ self.m @ v)

    def rank(self, tol: float = 1e-10) -> int:
        s = np.linalg.svd(self.m, compute_uv=False)
        return int(np.sum(s > tol * s[0]))

    def contains(self, p: HPoint, tol: float = EPS_INCIDENCE) -> bool:
        return abs(self.evaluate(p)) <= tol * 10.0

    def gradient(self, p: HPoint) -> np.ndarray:
        return self.m @ p.as_array()

    def center(self) -> HPoint:
        """Pole of the line at infinity; at infinity itself for a parabola."""
        a, b, c = self.m[0, 0], self.m[0, 1], self.m[1, 1]
        d, e = self.m[0, 2], self.m[1, 2]
        v = (b * e - c * d, b * d - a * e, a * c - b * b)
        if max(abs(x) for x in v) < _TINY:
            raise DegenerateInput("conic has no well-defined center")
        return HPoint(*v)


GenCircle = Union[Circle, HLine]
ConicLike = Union[Circle, Conic]
Curve = Union[HLine, Circle, Conic]


class Intersection(NamedTuple):
    point: HPoint
    multiplicity: int


def join(p: HPoint, q: HPoint) -> HLine:
    """Line through two distinct points."""
    v = np.cross(p.as_array(), q.as_array())
    if np.max(np.abs(v)) <= EPS_INCIDENCE:
        raise CoincidentObjects(f"join of coincident points {p}, {q}")
    return HLine(v[0], v[1], v[2])


def meet(l1: HLine, l2: HLine) -> HPoint:
    """Intersection point of two distinct lines (may be at infinity)."""
    v = np.cross(l1.as_array(), l2.as_array())
    if np.max(np.abs(v)) <= EPS_INCIDENCE:
        raise CoincidentObjects(f"meet of coincident lines {l1}, {l2}")
    return HPoint(v[0], v[1], v[2])


def point_distance(p: HPoint, q: HPoint) -> float:
    """Metric for witness tracking: affine distance when both points are
    finite, else distance between canonical representatives up to sign."""
    if not p.is_infinite and not q.is_infinite:
        px, py = p.affine()
        qx, qy = q.affine()
        return math.hypot(px - qx, py - qy)
    a, b = p.as_array(), q.as_array()
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def distance(p: HPoint, q: HPoint) -> float:
    """Euclidean distance between two finite points."""
    px, py = p.affine()
    qx, qy = q.affine()
    return math.hypot(px - qx, py - qy)


def midpoint(p: HPoint, q: HPoint) -> HPoint:
    px, py = p.affine()
    qx, qy = q.affine()
    return HPoint.at((px + qx) / 2.0, (py + qy) / 2.0)


def parallel_through(l: HLine, p: HPoint) -> HLine:
    return join(p, l.direction())


def perpendicular_through(l: HLine, p: HPoint) -> HLine:
    if l.is_infinity:
        raise LineAtInfinity("no perpendicular to the line at infinity")
    return join(p, HPoint(l.a, l.b, 0.0))


def _line_points(l: HLine) -> tuple[np.ndarray, np.ndarray]:
    """Base point and direction point spanning the line."""
    a, b, c = l.a, l.b, l.c
    n2 = a * a + b * b
    if n2 <= _TINY:  # line at infinity
        return np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
    return np.array([-a * c, -b * c, n2]), np.array([b, -a, 0.0])


def _line_parameter(l: HLine, p: HPoint) -> float:
    """Position of p along the line's canonical parametrization."""
    p0, d = _line_points(l)
    v = p.as_array()
    if abs(v[2]) <= 1e-14:
        # point at infinity: sign of alignment with the direction
        return math.inf if (v[0] * d[0] + v[1] * d[1]) >= 0 else -math.inf
    w0 = p0[2] if p0[2] != 0.0 else 1.0
    x0, y0 = p0[0] / w0, p0[1] / w0
    px, py = v[0] / v[2], v[1] / v[2]
    return ((px - x0) * d[0] + (py - y0) * d[1]) / (d[0] * d[0] + d[1] * d[1])


def _circle_parameter(c: Circle, p: HPoint) -> float:
    if p.is_infinite:
        return 0.0
    cx, cy = c.center.affine()
    px, py = p.affine()
    return math.atan2(py - cy, px - cx) % (2.0 * math.pi)


def _sort_key(first: Curve, pts: list[Intersection]) -> list[Intersection]:
    """Deterministic ordering along the first operand's parametrization."""
    if isinstance(first, HLine):
        return sorted(pts, key=lambda i: _line_parameter(first, i.point))
    if isinstance(first, Circle):
        return sorted(pts, key=lambda i: _circle_parameter(first, i.point))
    return pts


def _intersect_line_conic(l: HLine, m: np.ndarray) -> list[Intersection]:
    p0, p1 = _line_points(l)
    qa = float(p1 @ m @ p1)
    qb = 2.0 * float(p0 @ m @ p1)
    qc = float(p0 @ m @ p0)
    scale = max(abs(qa), abs(qb), abs(qc))
    if scale == 0.0:
        raise CoincidentObjects("line is a component of the conic")
    out: list[Intersection] = []
    if abs(qa) <= EPS_INCIDENCE * scale:
        # direction point of the line lies on the conic
        if abs(qb) <= EPS_INCIDENCE * scale:
            raise CoincidentObjects("line is a component of the conic")
        t = -qc / qb
        out.append(Intersection(HPoint(*(p0 + t * p1)), 1))
        out.append(Intersection(HPoint(p1[0], p1[1], p1[2]), 1))
        return out
    disc = qb * qb - 4.0 * qa * qc
    disc_scale = max(qb * qb, abs(4.0 * qa * qc), _TINY)
    if abs(disc) <= EPS_INCIDENCE * disc_scale:
        t = -qb / (2.0 * qa)
        out.append(Intersection(HPoint(*(p0 + t * p1)), 2))
        return out
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    # numerically stable quadratic roots
    q = -(qb + math.copysign(sq, qb)) / 2.0
    t1 = q / qa
    t2 = qc / q if q != 0.0 else -qb / qa - t1
    for t in (t1, t2):
        out.append(Intersection(HPoint(*(p0 + t * p1)), 1))
    return out


def _radical_axis(c1: Circle, c2: Circle) -> HLine:
    x1, y1 = c1.center.affine()
    x2, y2 = c2.center.affine()
    # difference of the two expanded circle equations
    a = 2.0 * (x2 - x1)
    b = 2.0 * (y2 - y1)
    c = (x1 * x1 + y1 * y1 - c1.radius**2) - (x2 * x2 + y2 * y2 - c2.radius**2)
    if abs(a) <= EPS_INCIDENCE and abs(b) <= EPS_INCIDENCE:
        raise CoincidentObjects("concentric circles have no radical axis")
    return HLine(a, b, c)


def _intersect_circle_circle(c1: Circle, c2: Circle) -> list[Intersection]:
    x1, y1 = c1.center.affine()
    x2, y2 = c2.center.affine()
    d = math.hypot(x2 - x1, y2 - y1)
    scale = max(c1.radius, c2.radius, d)
    if d <= EPS_INCIDENCE * scale:
        if abs(c1.radius - c2.radius) <= EPS_INCIDENCE * scale:
            raise CoincidentObjects("coincident circles")
        return []
    axis = _radical_axis(c1, c2)
    return _intersect_line_conic(axis, c1.to_conic().m)


def _split_degenerate_conic(m: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """Split a rank<=2 conic into two real lines, or None if complex."""
    scale = np.max(np.abs(m))
    adj = np.array(
        [
            [
                m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1],
                m[1, 2] * m[2, 0] - m[1, 0] * m[2, 2],
                m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0],
            ],
            [
                m[2, 1] * m[0, 2] - m[2, 2] * m[0, 1],
                m[2, 2] * m[0, 0] - m[2, 0] * m[0, 2],
                m[2, 0] * m[0, 1] - m[2, 1] * m[0, 0],
            ],
            [
                m[0, 1] * m[1, 2] - m[0, 2] * m[1, 1],
                m[0, 2] * m[1, 0] - m[0, 0] * m[1, 2],
                m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0],
            ],
        ]
    ).T
    b = -adj
    diag = np.diag(b)
    i = int(np.argmax(np.abs(diag)))
    if abs(diag[i]) > 1e-12 * scale * scale:
        if diag[i] < 0.0:
            return None  # complex line pair (e.g. point conic)
        beta = math.sqrt(diag[i])
        p = b[:, i] / beta
        cross = np.array([[0.0, p[2], -p[1]], [-p[2], 0.0, p[0]], [p[1], -p[0], 0.0]])
        c = m + cross
    else:
        c = m  # rank 1: double line, rows already proportional to it
    idx = np.unravel_index(np.argmax(np.abs(c)), c.shape)
    if abs(c[idx]) <= 1e-12 * max(scale, 1.0):
        return None
    g = c[idx[0], :]
    h = c[:, idx[1]]
    return g, h


def _intersect_conic_conic(a: ConicLike, b: ConicLike) -> list[Intersection]:
    """Intersect via a degenerate member of the pencil.

    Covers circle/conic pairs without general quartic root-finding; at
    least one operand is expected to be a circle for good conditioning.
    """
    m1 = a.to_conic().m if isinstance(a, Circle) else a.m
    m2 = b.to_conic().m if isinstance(b, Circle) else b.m
    if np.allclose(m1, m2, atol=EPS_INCIDENCE) or np.allclose(m1, -m2, atol=EPS_INCIDENCE):
        raise CoincidentObjects("coincident conics")
    # det(m1 + t m2) as a cubic in t
    def det(t: float) -> float:
        return float(np.linalg.det(m1 + t * m2))

    d0 = det(0.0)
    d1 = det(1.0)
    dm1 = det(-1.0)
    d2 = det(2.0)
    # interpolate cubic coefficients from 4 samples
    c3 = (d2 - dm1) / 6.0 - (d1 - d0) / 2.0
    c2 = (d1 + dm1) / 2.0 - d0
    c1 = d1 - d0 - c3 - c2
    c0 = d0
    coeffs = [c3, c2, c1, c0]
    while len(coeffs) > 1 and abs(coeffs[0]) <= 1e-14 * max(abs(x) for x in coeffs):
        coeffs = coeffs[1:]
    roots = np.roots(coeffs) if len(coeffs) > 1 else np.array([])
    real = [r.real for r in roots if abs(r.imag) <= 1e-7 * (1.0 + abs(r))]
    if not real:
        return []
    pts: list[Intersection] = []
    base_is_a = isinstance(a, Circle) or not isinstance(b, Circle)
    base_m, other_m = (m1, m2) if base_is_a else (m2, m1)
    for t in sorted(real, key=abs):
        split = _split_degenerate_conic(m1 + t * m2)
        if split is None:
            continue
        for lv in split:
            if np.max(np.abs(lv)) <= _TINY:
                continue
            line = HLine(lv[0], lv[1], lv[2])
            try:
                cand = _intersect_line_conic(line, base_m)
            except CoincidentObjects:
                continue
            for inter in cand:
                v = inter.point.as_array()
                r_other = abs(float(v @ other_m @ v))
                if r_other <= 1e-7:
                    if not any(inter.point.close_to(e.point, 1e-7) for e in pts):
                        pts.append(inter)
        if pts:
            break
    return pts


def intersect(a: Curve, b: Curve) -> list[Intersection]:
    """All real intersections of two curves, deterministically ordered.

    Tangency is reported as a single point with multiplicity 2.  Parallel
    distinct lines meet in the point at infinity of their direction.
    Ordering follows the first operand's canonical parametrization (line:
    affine parameter, circle: counterclockwise angle); when the first
    operand is a general conic the second operand's parametrization is
    used instead.
    """
    if isinstance(a, HLine) and isinstance(b, HLine):
        return [Intersection(meet(a, b), 1)]
    if isinstance(a, HLine):
        m = b.to_conic().m if isinstance(b, Circle) else b.m
        return _sort_key(a, _intersect_line_conic(a, m))
    if isinstance(b, HLine):
        m = a.to_conic().m if isinstance(a, Circle) else a.m
        return _sort_key(a, _intersect_line_conic(b, m))
    if isinstance(a, Circle) and isinstance(b, Circle):
        return _sort_key(a, _intersect_circle_circle(a, b))
    return _sort_key(a, _intersect_conic_conic(a, b))


def intersect_points(a: Curve, b: Curve) -> list[HPoint]:
    return [i.point for i in intersect(a, b)]


def cross_ratio(a: HPoint, b: HPoint, c: HPoint, d: HPoint) -> float:
    """Cross-ratio (a, b; c, d) of four collinear points, any at infinity.

    Projectively invariant; harmonic quadruples return -1.
    """
    pts = [p.as_array() for p in (a, b, c, d)]
    # pick the best-separated pair to carry the line
    best = None
    best_norm = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            v = np.cross(pts[i], pts[j])
            n = float(np.linalg.norm(v))
            if n > best_norm:
                best_norm = n
                best = v
    coincide_tol = EPS_INCIDENCE
    for i in range(4):
        for j in range(i + 1, 4):
            if float(np.linalg.norm(np.cross(pts[i], pts[j]))) <= coincide_tol:
                raise DegenerateQuadruple("coincident points in cross-ratio")
    if best is None or best_norm <= coincide_tol:
        raise DegenerateQuadruple("cross-ratio needs four distinct points")
    line = best / best_norm
    for p in pts:
        if abs(float(line @ p)) > 1e-7 * float(np.linalg.norm(p)):
            raise NotCollinear("cross-ratio points are not collinear")
    drop = int(np.argmax(np.abs(line)))
    keep = [k for k in range(3) if k != drop]
    two = [p[keep] for p in pts]

    def det2(u, v):
        return u[0] * v[1] - u[1] * v[0]

    num = det2(two[0], two[2]) * det2(two[1], two[3])
    den = det2(two[1], two[2]) * det2(two[0], two[3])
    if den == 0.0:
        raise DegenerateQuadruple("cross-ratio undefined for this quadruple")
    return num / den


def conic_through(points: list[HPoint]) -> Conic:
    """Unique conic through five points, no four of them collinear."""
    if len(points) != 5:
        raise DegenerateInput("conic_through needs exactly five points")
    for skip in range(5):
        four = [p for k, p in enumerate(points) if k != skip]
        mat = np.array([p.as_array() for p in four])
        s = np.linalg.svd(mat, compute_uv=False)
        if s[2] <= 1e-9 * s[0]:
            raise DegenerateInput("four of the five points are collinear")
    rows = []
    for p in points:
        x, y, w = p.x, p.y, p.w
        rows.append([x * x, x * y, y * y, x * w, y * w, w * w])
    mat = np.array(rows)
    _, s, vt = np.linalg.svd(mat)
    if s[4] <= 1e-9 * s[0]:
        raise DegenerateInput("conic through the points is not unique")
    coeff = vt[-1]
    a, bxy, c, d, e, f = coeff
    m = np.array(
        [
            [a, bxy / 2.0, d / 2.0],
            [bxy / 2.0, c, e / 2.0],
            [d / 2.0, e / 2.0, f],
        ]
    )
    return Conic(m)


def circle_through(p: HPoint, q: HPoint, r: HPoint) -> Circle:
    """Circumcircle of three non-collinear finite points."""
    pts = [p.affine(), q.affine(), r.affine()]
    mat = np.array([[x, y, 1.0] for x, y in pts])
    rhs = np.array([-(x * x + y * y) for x, y in pts])
    try:
        d, e, f = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError:
        raise DegenerateInput("collinear points have no circumcircle") from None
    cx, cy = -d / 2.0, -e / 2.0
    r2 = cx * cx + cy * cy - f
    if r2 <= 0.0:
        raise DegenerateInput("degenerate circumcircle")
    return Circle(HPoint.at(cx, cy), math.sqrt(r2))


def tangent_direction(c: ConicLike, p: HPoint) -> HLine:
    """Tangent line to a circle or conic at a point on it."""
    conic = c.to_conic() if isinstance(c, Circle) else c
    v = p.as_array()
    value = abs(float(v @ conic.m @ v))
    if value > 1e-7:
        raise NotOnCurve(f"point {p} is not on the curve (residual {value:.2e})")
    grad = conic.m @ v
    if np.max(np.abs(grad)) <= EPS_INCIDENCE:
        raise SingularPoint(f"curve is singular at {p}")
    return HLine(grad[0], grad[1], grad[2])


def angle_between(l1: HLine, l2: HLine) -> float:
    """Unsigned angle between two finite lines, in [0, pi/2]."""
    if l1.is_infinity or l2.is_infinity:
        raise LineAtInfinity("angle with the line at infinity is undefined")
    dot = l1.a * l2.a + l1.b * l2.b
    cross = l1.a * l2.b - l1.b * l2.a
    return math.atan2(abs(cross), abs(dot))
