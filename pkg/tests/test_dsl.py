import math
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from geokernel.dsl import ParseError, parse, parse_strict, serialize
from geokernel.engine import FULL, POSTULATES_ONLY, evaluate

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def corpus_files():
    return sorted(CORPUS.glob("*.geo"))


class TestParse:
    def test_euclid_corpus_six_steps(self):
        fig = parse_strict((CORPUS / "euclid_I1.geo").read_text())
        assert len(fig.steps) == 6
        assert fig.toolset is POSTULATES_ONLY

    def test_header_optional_defaults_to_full(self):
        fig = parse_strict("point A = free_point(0, 0)\n")
        assert fig.toolset is FULL

    def test_arity_error(self):
        res = parse("point A = free_point(0,0)\npoint X = line_through(A)\n")
        assert not res.ok
        assert len(res.errors) == 1
        err = res.errors[0]
        assert err.line == 2
        assert "arity" in err.message or "argument" in err.message

    def test_forward_reference_names_identifier(self):
        res = parse("circle c = circle_center_point(A, B)\n")
        assert not res.ok
        assert any("A" in e.message and "undefined" in e.message.lower() for e in res.errors)

    def test_unknown_toolset(self):
        res = parse("toolset NOPE\n")
        assert not res.ok
        assert "NOPE" in res.errors[0].message

    def test_all_errors_reported_in_one_pass(self):
        src = "point A = free_point(0,0)\npoint B = junk(A)\npoint C = line_through(A)\npoint D = free_point(1,1)\n"
        res = parse(src)
        assert len(res.errors) == 2
        assert {e.line for e in res.errors} == {2, 3}

    def test_type_mismatch(self):
        res = parse("point A = free_point(0,0)\npoint B = free_point(1,0)\nline c = circle_center_point(A,B)\n")
        assert not res.ok
        assert res.errors[0].line == 3

    def test_duplicate_name(self):
        res = parse("point A = free_point(0,0)\npoint A = free_point(1,0)\n")
        assert not res.ok
        assert "already defined" in res.errors[0].message

    def test_number_forms(self):
        fig = parse_strict(
            "point A = free_point(sqrt(0.75), -0.5)\n"
            "point B = free_point(pi, phi)\n"
            "point C = free_point(-sqrt(2), 1e-3)\n"
        )
        ax, ay = fig.steps[0].params
        assert ax == math.sqrt(0.75)
        assert ay == -0.5
        assert fig.steps[1].params == (math.pi, (1 + math.sqrt(5)) / 2)
        assert fig.steps[2].params == (-math.sqrt(2), 1e-3)

    def test_branch_syntax(self):
        fig = parse_strict(
            "point A = free_point(0,0)\npoint B = free_point(1,0)\n"
            "circle c1 = circle_center_point(A,B)\ncircle c2 = circle_center_point(B,A)\n"
            "point C = intersect(c1, c2, branch=1)\n"
        )
        assert fig.steps[4].params == (1.0,)

    def test_branch_value_checked(self):
        res = parse(
            "point A = free_point(0,0)\npoint B = free_point(1,0)\n"
            "circle c1 = circle_center_point(A,B)\ncircle c2 = circle_center_point(B,A)\n"
            "point C = intersect(c1, c2, branch=2)\n"
        )
        assert not res.ok

    def test_error_column_points_into_line(self):
        src = "point A = free_point(0,0)\nline l = line_through(A, ZZZ)\n"
        res = parse(src)
        err = res.errors[0]
        line_text = src.splitlines()[err.line - 1]
        assert line_text[err.column - 1 :].startswith("ZZZ")

    def test_macro_unclosed(self):
        res = parse("macro m(point P) {\npoint Q = midpoint(P, P)\nreturn Q\n")
        assert not res.ok
        assert any("never closed" in e.message for e in res.errors)

    def test_scalar_flow(self):
        fig = parse_strict(
            "point A = free_point(1,0)\npoint B = free_point(0,0)\npoint C = free_point(0,1)\n"
            "scalar ang = angle_measure(A, B, C)\n"
            "circle k = circle_center_radius(B, ang)\n"
        )
        scene = evaluate(fig)
        assert scene.value("k").radius == pytest.approx(math.pi / 2)


class TestCorpus:
    @pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.name)
    def test_roundtrip_structural_equality(self, path):
        fig = parse_strict(path.read_text())
        text = serialize(fig)
        fig2 = parse_strict(text)
        assert fig2.steps == fig.steps
        assert fig2.toolset == fig.toolset
        assert fig2.macros == fig.macros

    @pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.name)
    def test_serialize_idempotent(self, path):
        fig = parse_strict(path.read_text())
        once = serialize(fig)
        twice = serialize(parse_strict(once))
        assert once == twice

    @pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.name)
    def test_corpus_evaluates(self, path):
        fig = parse_strict(path.read_text())
        scene = evaluate(fig)
        assert scene.all_exist()

    @pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.name)
    def test_corpus_evaluation_deterministic(self, path):
        fig = parse_strict(path.read_text())
        s1 = evaluate(fig)
        s2 = evaluate(fig)
        assert repr(sorted(s1.items())) == repr(sorted(s2.items()))

    def test_scalar_reference_roundtrip(self):
        src = (
            "point A = free_point(1,0)\npoint B = free_point(0,0)\npoint C = free_point(0,1)\n"
            "scalar ang = angle_measure(A, B, C)\n"
            "circle k = circle_center_radius(B, ang)\n"
        )
        fig = parse_strict(src)
        assert fig.steps[4].params == ("ang",)
        again = parse_strict(serialize(fig))
        assert again.steps == fig.steps


class TestSerialize:
    def test_empty_figure_header_only(self):
        from geokernel.engine import Figure

        assert serialize(Figure((), FULL)) == "toolset FULL\n"

    def test_macro_emitted_before_use(self):
        fig = parse_strict((CORPUS / "compass_via_I2.geo").read_text())
        text = serialize(fig)
        assert text.index("macro transport") < text.index("macro compass_i2")
        assert text.index("macro compass_i2") < text.index("circle K")

    def test_seventeen_digit_numbers(self):
        fig = parse_strict("point A = free_point(0.1, 3)\n")
        text = serialize(fig)
        assert "0.10000000000000001" in text


class TestFuzz:
    @settings(max_examples=300, deadline=2000)
    @given(st.binary(max_size=4096))
    def test_parser_never_crashes_on_bytes(self, blob):
        try:
            src = blob.decode("utf-8", errors="replace")
        except Exception:
            return
        res = parse(src)
        assert res.figure is not None or res.errors

    @settings(max_examples=200, deadline=2000)
    @given(
        st.lists(
            st.sampled_from(
                [
                    "point A = free_point(0,0)",
                    "point B = free_point(1,0)",
                    "circle c = circle_center_point(A,B)",
                    "macro m(point P) {",
                    "return X",
                    "}",
                    "toolset FULL",
                    "???",
                    "point A = ",
                    "line l = line_through(A,B)",
                ]
            ),
            max_size=30,
        )
    )
    def test_parser_never_crashes_on_line_salad(self, lines):
        res = parse("\n".join(lines))
        assert isinstance(res.errors, list)
