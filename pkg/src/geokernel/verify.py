"""Property suites for the geometric claims the kernel implements.

Each suite runs a batch of randomized or exact checks with pinned
tolerances and reports (check, measured value, bound, pass).  `geo
verify <suite>|all` fronts this module; the test suite asserts every
check as an acceptance criterion.
"""

from __future__ import annotations

import math
import os
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import core, curves, transforms
from .core import Circle, HLine, HPoint, circle_through, cross_ratio, distance, intersect_points, join, tangent_direction, angle_between
from .curves import PlaneCurve, Q3, SingularityType, canonical_map
from .dsl import parse_strict
from .engine import BranchState, evaluate, check_toolset, drag, trace_locus

DEFAULT_SEED = 987

S3 = math.sqrt(3.0)
UNIT = Circle(HPoint.at(0.0, 0.0), 1.0)


def corpus_dir() -> Path:
    env = os.environ.get("GEO_CORPUS")
    if env:
        return Path(env)
    here = Path(__file__).resolve()
    for base in [Path.cwd()] + list(here.parents):
        cand = base / "corpus"
        if cand.is_dir():
            return cand
    raise FileNotFoundError("corpus directory not found; set GEO_CORPUS")


def load_corpus(name: str):
    return parse_strict((corpus_dir() / name).read_text())


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: float
    bound: float
    relation: str = "<"

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.measured:.3e} {self.relation} {self.bound:.1e}"


def _chk(name: str, measured: float, bound: float, relation: str = "<") -> Check:
    if relation == "<":
        ok = measured < bound
    elif relation == ">":
        ok = measured > bound
    elif relation == "==0":
        ok = measured == 0.0
        relation = "=="
    else:
        raise ValueError(relation)
    return Check(name, ok, measured, bound, relation)


def _bool(name: str, ok: bool) -> Check:
    return Check(name, ok, 0.0 if ok else 1.0, 0.5, "<")


# ---------------------------------------------------------------------------


def suite_golden_section(seed: int) -> list[Check]:
    t0 = time.perf_counter()
    fig = load_corpus("golden_section.geo")
    scene = evaluate(fig)
    elapsed = time.perf_counter() - t0
    a, b, k = (scene.value(x) for x in ("A", "B", "K"))
    ab, bk, ka = distance(a, b), distance(b, k), distance(k, a)
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    return [
        _chk("BK/AB equals (sqrt5-1)/2", abs(bk / ab - golden), 1e-9),
        _chk("AB:BK equals BK:KA", abs(ab / bk - bk / ka), 1e-9),
        _chk("runtime under 1 s", elapsed, 1.0),
    ]


def suite_decagon(seed: int) -> list[Check]:
    fig = load_corpus("decagon.geo")
    scene = evaluate(fig)
    gap = distance(scene.value("V10"), scene.value("B"))
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    trig = abs(2.0 * math.sin(math.pi / 10.0) - golden)
    return [
        _chk("ten golden chords close", gap, 1e-8),
        _chk("2 sin(pi/10) equals (sqrt5-1)/2", trig, 1e-12),
    ]


def suite_hexagon(seed: int) -> list[Check]:
    fig = load_corpus("hexagon.geo")
    scene = evaluate(fig)
    gap = distance(scene.value("V6"), scene.value("B"))
    fig2 = load_corpus("chords_half_radius.geo")
    scene2 = evaluate(fig2)
    ex, ey = scene2.value("V12").affine()
    ang_gap = abs(math.remainder(math.atan2(ey, ex), 2.0 * math.pi))
    return [
        _chk("hexagon closes", gap, 1e-9),
        _chk("half-radius 12-chord gap", ang_gap, 0.2, ">"),
    ]


def suite_toolset_game(seed: int) -> list[Check]:
    euclid = check_toolset(load_corpus("euclid_I1.geo"))
    par = check_toolset(load_corpus("parallel_tool.geo"))
    comp = check_toolset(load_corpus("compass_via_I2.geo"))
    return [
        _bool("Euclid I.1 passes POSTULATES_ONLY", euclid == []),
        _bool("parallel tool fails POSTULATES_ONLY", par == [("m", "parallel")]),
        _bool("compass via I.2 macro passes POSTULATES_ONLY", comp == []),
    ]


def suite_inversion(seed: int) -> list[Check]:
    rng = random.Random(seed)
    worst_invol = 0.0
    worst_fixed = 0.0
    worst_orth = 0.0
    worst_class = 0.0
    trials = 0
    while trials < 1000:
        c = Circle(HPoint.at(rng.uniform(-2, 2), rng.uniform(-2, 2)), rng.uniform(0.4, 2.5))
        cx, cy = c.center.affine()
        p = HPoint.at(rng.uniform(-4, 4), rng.uniform(-4, 4))
        if distance(p, c.center) < 0.05:
            continue
        # involution
        q = transforms.invert_point(c, transforms.invert_point(c, p))
        worst_invol = max(worst_invol, distance(p, q))
        # fixed circle
        s = c.point_at(rng.uniform(0, 2 * math.pi))
        worst_fixed = max(worst_fixed, distance(s, transforms.invert_point(c, s)))
        # orthogonal circle invariance: center at distance sqrt(r^2 + rho^2)
        rho = rng.uniform(0.3, 1.5)
        d = math.hypot(c.radius, rho)
        theta = rng.uniform(0, 2 * math.pi)
        g = Circle(HPoint.at(cx + d * math.cos(theta), cy + d * math.sin(theta)), rho)
        img = transforms.invert_gencircle(c, g)
        if isinstance(img, Circle):
            gx, gy = g.center.affine()
            ix, iy = img.center.affine()
            worst_orth = max(worst_orth, math.hypot(gx - ix, gy - iy), abs(img.radius - g.radius))
        else:
            worst_orth = max(worst_orth, 1.0)
        # classification: a line not through the center maps to a circle
        # through the center, and back to the line
        l = join(
            HPoint.at(rng.uniform(-3, 3), rng.uniform(-3, 3)),
            HPoint.at(rng.uniform(-3, 3), rng.uniform(-3, 3)),
        )
        n = math.hypot(l.a, l.b)
        if abs(l.a * cx + l.b * cy + l.c) / n < 0.05:
            continue
        img_l = transforms.invert_gencircle(c, l)
        if not isinstance(img_l, Circle):
            worst_class = max(worst_class, 1.0)
        else:
            # image circle passes through the inversion center
            ix, iy = img_l.center.affine()
            worst_class = max(worst_class, abs(math.hypot(ix - cx, iy - cy) - img_l.radius))
            back = transforms.invert_gencircle(c, img_l)
            if not isinstance(back, HLine):
                worst_class = max(worst_class, 1.0)
            else:
                cr = np.cross(back.as_array(), l.as_array())
                worst_class = max(worst_class, float(np.max(np.abs(cr))))
        trials += 1
    return [
        _chk("involution on 1e3 points", worst_invol, 1e-9),
        _chk("inversion circle pointwise fixed", worst_fixed, 1e-9),
        _chk("orthogonal circles invariant", worst_orth, 1e-9),
        _chk("line/circle classification round-trip", worst_class, 1e-9),
    ]


def suite_stereo(seed: int) -> list[Check]:
    rng = random.Random(seed + 1)
    worst = 0.0
    trials = 0
    while trials < 1000:
        p = HPoint.at(rng.uniform(-5, 5), rng.uniform(-5, 5))
        x, y = p.affine()
        if math.hypot(x, y) < 1e-3:
            continue
        a = transforms.ns_composition(p)
        b = transforms.invert_point(UNIT, p)
        worst = max(worst, distance(a, b))
        trials += 1
    return [_chk("north/south composition equals inversion", worst, 1e-10)]


def suite_harmonic(seed: int) -> list[Check]:
    rng = random.Random(seed + 2)
    worst_quad = 0.0
    trials = 0
    while trials < 1000:
        k = Circle(HPoint.at(rng.uniform(-1, 1), rng.uniform(-1, 1)), rng.uniform(0.5, 2.0))
        c = HPoint.at(rng.uniform(-3, 3), rng.uniform(-3, 3))
        if distance(c, k.center) < 0.05 or abs(distance(c, k.center) - k.radius) < 1e-3:
            continue
        c2 = transforms.invert_point(k, c)
        if core.point_distance(c, c2) < 1e-6:
            continue
        ab = intersect_points(join(c, c2), k)
        if len(ab) != 2:
            continue
        worst_quad = max(worst_quad, abs(cross_ratio(ab[0], ab[1], c, c2) + 1.0))
        trials += 1
    # polar as locus of fourth harmonics, 50 secants
    conic = Circle(HPoint.at(0.3, -0.2), 1.4).to_conic()
    p = HPoint.at(2.6, 1.1)
    pl = transforms.polar(conic, p)
    worst_polar = 0.0
    hits = 0
    while hits < 50:
        q = HPoint.at(rng.uniform(-4, 4), rng.uniform(-4, 4))
        try:
            line = join(p, q)
            ab = intersect_points(line, conic)
        except core.GeometryError:
            continue
        if len(ab) != 2 or any(x.close_to(p, 1e-6) for x in ab):
            continue
        d = transforms.harmonic_conjugate(ab[0], ab[1], p)
        worst_polar = max(worst_polar, pl.residual(d))
        hits += 1
    return [
        _chk("inversion quadruples are harmonic", worst_quad, 1e-9),
        _chk("polar is the locus of fourth harmonics", worst_polar, 1e-8),
    ]


def suite_radical_axis(seed: int) -> list[Check]:
    rng = random.Random(seed + 3)
    c1 = Circle(HPoint.at(0.0, 0.0), 1.0)
    c2 = Circle(HPoint.at(4.0, 1.0), 1.5)
    axis = transforms.ideal_common_secant(c1, c2)
    # equation-difference oracle, written out independently
    diff = HLine(
        2.0 * (4.0 - 0.0),
        2.0 * (1.0 - 0.0),
        (0.0 + 0.0 - 1.0) - (16.0 + 1.0 - 1.5**2),
    )
    cr = np.cross(axis.as_array(), diff.as_array())
    eq_residual = float(np.max(np.abs(cr)))
    worst_tan = 0.0
    hits = 0
    p0, d = core._line_points(axis)
    base = p0 / p0[2]
    while hits < 100:
        t = rng.uniform(-20, 20)
        p = HPoint.at(base[0] + t * d[0], base[1] + t * d[1])
        pow1 = distance(p, c1.center) ** 2 - c1.radius**2
        pow2 = distance(p, c2.center) ** 2 - c2.radius**2
        if pow1 < 0:
            continue
        worst_tan = max(worst_tan, abs(math.sqrt(pow1) - math.sqrt(pow2)))
        hits += 1
    # continuity with the real common secant across the contact
    prev = None
    worst_jump = 0.0
    for dist_centers in np.linspace(2.5, 1.5, 201):
        a = Circle(HPoint.at(0.0, 0.0), 1.0)
        b = Circle(HPoint.at(float(dist_centers), 0.0), 1.0)
        pts = intersect_points(a, b)
        if len(pts) == 2:
            line = join(pts[0], pts[1])
        else:
            line = transforms.ideal_common_secant(a, b)
        arr = line.as_array()
        if prev is not None:
            worst_jump = max(
                worst_jump,
                float(min(np.linalg.norm(arr - prev), np.linalg.norm(arr + prev))),
            )
        prev = arr
    return [
        _chk("radical axis equals equation difference", eq_residual, 1e-12),
        _chk("equal tangent lengths on 100 axis points", worst_tan, 1e-9),
        _chk("continuity with the real secant", worst_jump, 0.05),
    ]


def suite_conjugate_conic(seed: int) -> list[Check]:
    conj = transforms.conjugate_conic(UNIT, HPoint.infinite(0.0, 1.0))
    exact = float(np.max(np.abs(conj.m - np.diag([1.0, -1.0, -1.0]))))
    # Bellavitis's step-by-step macro against the analytic ideal chord
    fig = load_corpus("conjugate_conic_bellavitis.geo")
    from dataclasses import replace as _replace

    worst = 0.0
    ts = [1.2 + 0.18 * k for k in range(10)] + [-1.2 - 0.18 * k for k in range(10)]
    for t in ts:
        steps = []
        for step in fig.steps:
            if step.tool == "ideal_uv":
                step = _replace(step, params=(float(t),))
            steps.append(step)
        fig_t = type(fig)(tuple(steps), fig.toolset, fig.macros)
        scene = evaluate(fig_t)
        u1, v1 = scene.value("U1"), scene.value("V1")
        iu, iv = transforms.ideal_chord(UNIT, HLine(1.0, 0.0, -float(t)))
        direct = max(distance(u1, iu), distance(v1, iv))
        swapped = max(distance(u1, iv), distance(v1, iu))
        worst = max(worst, min(direct, swapped))
    return [
        _chk("unit circle conjugate is x^2 - y^2 = 1 exactly", exact, 0.0, "==0"),
        _chk("Bellavitis construction matches ideal chord on 20 lines", worst, 1e-8),
    ]


def _canonical_bh_config() -> transforms.BHConfig:
    gamma = Circle(HPoint.at(1.0, 1.0 / S3), 1.0 / S3)
    return transforms.BHConfig.create(gamma, HPoint.at(0.0, 0.0))


def suite_bh_closed_form(seed: int) -> list[Check]:
    rng = random.Random(seed + 4)
    cfg = _canonical_bh_config()
    worst = 0.0
    trials = 0
    while trials < 1000:
        x, y = rng.uniform(-3, 3), rng.uniform(-3, 3)
        den = -3 * x + 3 * x * x - S3 * y + 3 * y * y
        if abs(den) < 1e-3:
            continue
        expect = (-(3 * x - 3 * x * x - S3 * x * y) / den, y * (-3 + 3 * x + S3 * y) / den)
        try:
            got = transforms.bh_invert(cfg, HPoint.at(x, y)).affine()
        except transforms.GeometryError:
            continue
        worst = max(worst, math.hypot(got[0] - expect[0], got[1] - expect[1]))
        trials += 1
    g = HPoint.at(0.5, S3 / 6.0)
    centroid_residual = distance(transforms.bh_invert(cfg, g), g)
    return [
        _chk("geometric map equals displayed formula on 1e3 points", worst, 1e-9),
        _chk("centroid is a fixed point", centroid_residual, 1e-12),
    ]


def suite_degree_law(seed: int) -> list[Check]:
    rng = random.Random(seed + 5)
    q = canonical_map()
    t0 = time.perf_counter()
    feasible = 0
    failures = 0
    for n in range(1, 5):
        for ta in range(3):
            for tb in range(3):
                for tc in range(3):
                    c = curves.random_curve_with_multiplicities(n, (ta, tb, tc), q, rng, attempts=25)
                    if c is None:
                        continue
                    st, exc = curves.strict_transform(c, q)
                    if st.degree != 2 * n - ta - tb - tc or [e for _, e in exc] != [ta, tb, tc]:
                        failures += 1
                    feasible += 1
    elapsed = time.perf_counter() - t0
    return [
        _bool(f"degree = 2n - tA - tB - tC on {feasible} feasible grid cells", failures == 0 and feasible >= 50),
        _chk("degree-law grid runtime under 60 s", elapsed, 60.0),
    ]


def _incircle_curve() -> PlaneCurve:
    third = Fraction(1, 3)
    return PlaneCurve.from_affine(
        {(2, 0): 1, (0, 2): 1, (1, 0): -1, (0, 1): Q3(Fraction(0), -third), (0, 0): Fraction(1, 4)},
        degree=2,
    )


def suite_deltoid(seed: int) -> list[Check]:
    q = canonical_map()
    delt, exc = curves.strict_transform(_incircle_curve(), q)
    degree_ok = delt.degree == 4 and all(e == 0 for _, e in exc)
    cusp_ok = all(
        curves.multiplicity_at(delt, q.bases[name]) == 2
        and curves.classify_singularity(delt, q.bases[name]) == SingularityType.CUSP
        for name in "ABC"
    )
    # similarity-fitted a/b = 3 hypocycloid
    center = (0.5, S3 / 6.0)
    b = (1.0 / S3) / 3.0
    best_fit = math.inf
    vertex_angle = math.atan2(-center[1], -center[0])
    for rot in range(3):
        for orient in (1.0, -1.0):
            phi = vertex_angle + rot * 2.0 * math.pi / 3.0
            samples = []
            for k in range(720):
                t = 2.0 * math.pi * k / 720.0
                x = 2 * b * math.cos(t) + b * math.cos(2 * t)
                y = orient * (2 * b * math.sin(t) - b * math.sin(2 * t))
                samples.append(
                    HPoint.at(
                        x * math.cos(phi) - y * math.sin(phi) + center[0],
                        x * math.sin(phi) + y * math.cos(phi) + center[1],
                    )
                )
            best_fit = min(best_fit, curves.curve_eval_residual(delt, samples))
    # 720-sample engine locus through the corpus construction
    fig = load_corpus("bh_deltoid.geo")
    scene = evaluate(fig)
    locus = scene.value("delt")
    pts = [HPoint.at(x, y) for x, y in locus.points()]
    locus_res = curves.curve_eval_residual(delt, pts)
    return [
        _bool("strict transform is a quartic with no exceptional factors", degree_ok),
        _bool("cusps at exactly A, B, C", cusp_ok),
        _chk("hypocycloid (a/b = 3) similarity fit", best_fit, 1e-7),
        _chk(f"locus trace on {len(pts)} samples satisfies the quartic", locus_res, 1e-7),
    ]


def suite_circumcircle(seed: int) -> list[Check]:
    q = canonical_map()
    third = Fraction(1, 3)
    circum = PlaneCurve.from_affine(
        {(2, 0): 1, (0, 2): 1, (1, 0): -1, (0, 1): Q3(Fraction(0), -third)},
        degree=2,
    )
    denominator = PlaneCurve(q.components[2])
    identity_ok = circum == denominator
    total = curves.total_transform(circum, q)
    quo = curves.poly_divisible(total.coeffs, {(0, 0, 1): Q3.of(1)})
    infinity_ok = quo is not None
    if infinity_ok:
        rest = PlaneCurve(quo)
        prod = q.fundamental_line("A").multiply(q.fundamental_line("B")).multiply(q.fundamental_line("C"))
        infinity_ok = rest == prod
    return [
        _bool("circumscribed circle equals the denominator conic (/3)", identity_ok),
        _bool("its image is the line at infinity", infinity_ok),
    ]


def suite_asymptote_angle(seed: int) -> list[Check]:
    cfg = _canonical_bh_config()
    f0, f1, f2 = cfg.quadratic_matrices()
    incircle = Circle(HPoint.at(0.5, S3 / 6.0), S3 / 6.0)
    worst = 0.0
    for k in range(20):
        theta = 2.0 * math.pi * (k + 0.123) / 20.0
        p = incircle.point_at(theta)
        l = tangent_direction(incircle, p)
        arr = l.as_array()
        mm = arr[0] * f0 + arr[1] * f1 + arr[2] * f2
        a, bq, c = mm[0, 0], mm[0, 1], mm[1, 1]
        disc = bq * bq - a * c
        if disc <= 0:
            worst = max(worst, 1.0)
            continue
        ang = math.atan2(2.0 * math.sqrt(disc), a + c)
        ang = min(ang % math.pi, math.pi - ang % math.pi)
        worst = max(worst, abs(ang - math.pi / 3.0))
    return [_chk("asymptote angle pi/3 on 20 tangents", worst, 1e-6)]


def suite_fig41(seed: int) -> list[Check]:
    q = canonical_map()
    third = Fraction(1, 3)

    def circle_curve(r2: Fraction) -> PlaneCurve:
        return PlaneCurve.from_affine(
            {
                (2, 0): 1,
                (0, 2): 1,
                (1, 0): -1,
                (0, 1): Q3(Fraction(0), -third),
                (0, 0): third - r2,
            },
            degree=2,
        )

    smaller, _ = curves.strict_transform(circle_curve(Fraction(1, 16)), q)
    tangent, _ = curves.strict_transform(circle_curve(Fraction(1, 12)), q)
    bigger, _ = curves.strict_transform(circle_curve(Fraction(1, 9)), q)
    smooth_ok = all(curves.tangent_cone_discriminant(smaller, q.bases[n]).sign() < 0 for n in "ABC")
    cusp_ok = all(curves.classify_singularity(tangent, q.bases[n]) == SingularityType.CUSP for n in "ABC")
    node_ok = all(
        curves.tangent_cone_discriminant(bigger, q.bases[n]).sign() > 0
        and curves.classify_singularity(bigger, q.bases[n]) == SingularityType.NODE
        for n in "ABC"
    )
    return [
        _bool("r < r_in: vertices are isolated points (visible curve smooth)", smooth_ok),
        _bool("r = r_in: cusps at the vertices", cusp_ok),
        _bool("r > r_in: nodes at the vertices", node_ok),
    ]


SUITES: dict[str, Callable[[int], list[Check]]] = {
    "golden-section": suite_golden_section,
    "decagon": suite_decagon,
    "hexagon": suite_hexagon,
    "toolset-game": suite_toolset_game,
    "inversion": suite_inversion,
    "stereo": suite_stereo,
    "harmonic": suite_harmonic,
    "radical-axis": suite_radical_axis,
    "conjugate-conic": suite_conjugate_conic,
    "bh-closed-form": suite_bh_closed_form,
    "degree-law": suite_degree_law,
    "deltoid": suite_deltoid,
    "circumcircle": suite_circumcircle,
    "asymptote-angle": suite_asymptote_angle,
    "fig41": suite_fig41,
}


def run_suites(names: list[str], seed: Optional[int] = None) -> list[tuple[str, list[Check]]]:
    if seed is None:
        seed = int(os.environ.get("GEO_SEED", DEFAULT_SEED))
    out = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; available: {', '.join(sorted(SUITES))}")
        out.append((name, SUITES[name](seed)))
    return out
