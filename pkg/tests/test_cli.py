import csv
import io
import math
import os
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def run_geo(*args, **kw):
    env = dict(os.environ)
    env.setdefault("GEO_CORPUS", str(CORPUS))
    return subprocess.run(
        [sys.executable, "-m", "geokernel.cli", *args],
        capture_output=True,
        text=True,
        cwd=ROOT,
        env=env,
        **kw,
    )


class TestRun:
    def test_euclid_scene_dump(self):
        r = run_geo("run", str(CORPUS / "euclid_I1.geo"))
        assert r.returncode == 0
        assert "# protocol" in r.stdout
        assert "C: point" in r.stdout

    def test_golden_section_ratios(self):
        r = run_geo("run", str(CORPUS / "golden_section.geo"))
        assert r.returncode == 0
        lines = [l for l in r.stdout.splitlines() if l.startswith("|sAB|/|sBK|") or l.startswith("|sBK|/|sKA|")]
        assert len(lines) == 2
        vals = [float(l.split("=")[1]) for l in lines]
        golden = (1 + math.sqrt(5)) / 2
        assert vals[0] == pytest.approx(golden, abs=1e-9)
        assert vals[1] == pytest.approx(golden, abs=1e-9)
        assert abs(vals[0] - vals[1]) < 1e-9

    def test_equilateral_annotation(self):
        r = run_geo("run", str(CORPUS / "euclid_I1.geo"))
        dists = {}
        for line in r.stdout.splitlines():
            if line.startswith("|") and "| = " in line and len(line.split("|")[1]) == 2:
                name, val = line.split(" = ")
                dists[name.strip("|")] = float(val)
        assert {"AB", "AC", "BC"} <= set(dists)
        assert abs(dists["AC"] - dists["AB"]) < 1e-9
        assert abs(dists["BC"] - dists["AB"]) < 1e-9

    def test_parse_error_exit_1(self, tmp_path):
        bad = tmp_path / "bad.geo"
        bad.write_text("point A = junk(1)\n")
        r = run_geo("run", str(bad))
        assert r.returncode == 1
        assert "bad.geo:1:" in r.stderr

    def test_missing_file_exit_1(self):
        r = run_geo("run", "corpus/does_not_exist.geo")
        assert r.returncode == 1
        assert "cannot read" in r.stderr

    def test_nonexistent_object_exit_2(self, tmp_path):
        f = tmp_path / "gone.geo"
        f.write_text(
            "point A = free_point(0,0)\npoint B = free_point(1,0)\n"
            "circle c1 = circle_center_point(A,B)\n"
            "point P = free_point(9,0)\npoint Q = free_point(10,0)\n"
            "circle c2 = circle_center_point(P,Q)\n"
            "point X = intersect(c1, c2, branch=0)\n"
        )
        r = run_geo("run", str(f))
        assert r.returncode == 2
        assert "does not exist" in r.stdout

    def test_json_dump(self):
        import json

        r = run_geo("run", str(CORPUS / "euclid_I1.geo"), "--json")
        frame = json.loads(r.stdout)
        assert frame["op"] == "scene"
        assert len(frame["objects"]) == 6

    def test_static_svg(self, tmp_path):
        out = tmp_path / "fig.svg"
        r = run_geo("run", str(CORPUS / "euclid_I1_triangle.geo"), "--svg", str(out))
        assert r.returncode == 0
        root = ET.parse(out).getroot()
        circles = [e for e in root.iter() if e.tag.endswith("circle") and e.get("class") == "curve"]
        segs = [e for e in root.iter() if e.get("class") == "seg"]
        draggable = [e for e in root.iter() if e.get("class") == "pt draggable"]
        assert len(circles) == 2
        assert len(segs) == 3
        assert len(draggable) == 2


class TestTrace:
    def test_csv_two_rows(self, tmp_path):
        out = tmp_path / "t.csv"
        r = run_geo(
            "trace",
            str(CORPUS / "bh_deltoid.geo"),
            "--mover", "p", "--path", "inc", "--target", "q",
            "--n", "2", "--out", str(out),
        )
        assert r.returncode == 0
        rows = list(csv.reader(io.StringIO(out.read_text())))
        assert rows[0] == ["t", "x", "y", "exists"]
        assert len(rows) == 3

    def test_csv_deterministic(self, tmp_path):
        outs = []
        for k in range(2):
            out = tmp_path / f"t{k}.csv"
            run_geo(
                "trace",
                str(CORPUS / "bh_deltoid.geo"),
                "--mover", "p", "--path", "inc", "--target", "q",
                "--n", "64", "--out", str(out),
            )
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_deltoid_svg(self, tmp_path):
        out = tmp_path / "deltoid.svg"
        r = run_geo(
            "trace",
            str(CORPUS / "bh_deltoid.geo"),
            "--mover", "p", "--path", "inc", "--target", "q",
            "--n", "240", "--out", str(out),
        )
        assert r.returncode == 0
        tree = ET.parse(out)  # valid XML
        root = tree.getroot()
        assert root.get("viewBox")
        traces = [e for e in root.iter() if e.get("class") == "trace"]
        assert traces

    def test_polar_locus_svg_is_straight(self, tmp_path):
        f = tmp_path / "harmonic.geo"
        f.write_text(
            "point O = free_point(0,0)\npoint U = free_point(1,0)\n"
            "circle cn = circle_center_point(O,U)\n"
            "point P = free_point(2.5, 0.5)\npoint Aux = free_point(2.5, 1)\n"
            "circle orbit = circle_center_point(P, Aux)\n"
            "point M = point_on(orbit, 0.1)\n"
            "line sec = line_through(P, M)\n"
            "point A1 = intersect(sec, cn, branch=0)\n"
            "point B1 = intersect(sec, cn, branch=1)\n"
            "point mid = midpoint(A1, B1)\n"
            "circle kh = circle_center_point(mid, A1)\n"
            "point D = invert(kh, P)\n"
        )
        out = tmp_path / "polar.svg"
        r = run_geo(
            "trace", str(f), "--mover", "M", "--path", "orbit", "--target", "D",
            "--n", "128", "--out", str(out),
        )
        assert r.returncode == 0
        root = ET.parse(out).getroot()
        pts = []
        for el in root.iter():
            if el.get("class") == "trace":
                for pair in el.get("points").split():
                    x, y = pair.split(",")
                    pts.append((float(x), float(y)))
        assert len(pts) >= 10
        # all trace points collinear: the polar of P
        import numpy as np

        arr = np.array(pts)
        amat = np.column_stack([arr[:, 0], arr[:, 1], np.ones(len(arr))])
        _, s, _ = np.linalg.svd(amat)
        assert s[2] / s[0] < 1e-6

    def test_no_dependency_exit_2(self, tmp_path):
        f = tmp_path / "indep.geo"
        f.write_text(
            "point O = free_point(0,0)\npoint U = free_point(1,0)\n"
            "circle c = circle_center_point(O,U)\npoint P = point_on(c, 0.5)\n"
            "point Q = free_point(5,5)\n"
        )
        r = run_geo(
            "trace", str(f), "--mover", "P", "--path", "c", "--target", "Q", "--n", "8", "--out", "-",
        )
        assert r.returncode == 2


class TestVerify:
    def test_single_suite(self):
        r = run_geo("verify", "hexagon")
        assert r.returncode == 0
        assert "PASS" in r.stdout
        assert "FAIL" not in r.stdout

    def test_unknown_suite(self):
        r = run_geo("verify", "nonsense")
        assert r.returncode == 2

    def test_seed_env_respected(self):
        env = dict(os.environ)
        env["GEO_SEED"] = "12345"
        env.setdefault("GEO_CORPUS", str(CORPUS))
        r = subprocess.run(
            [sys.executable, "-m", "geokernel.cli", "verify", "stereo"],
            capture_output=True, text=True, cwd=ROOT, env=env,
        )
        assert r.returncode == 0
