import pytest

from geodd.catalogs import YEAR7_TEXT, label_for, load_catalog
from geodd.fof import (
    FofError,
    SourceUnit,
    parse_units,
    print_unit,
    resolve_includes,
)

from .conftest import THEOREM1_P, THEOREM2_P

# The two listings that circulate with unbalanced parentheses, verbatim.
RAW_D9 = """\
fof(ruleD9,axiom,(![A,B,C,D,E,F] :
           (perp(A,B,E,F) & perp(C,D,E,F) => para(A,B,C,D) )).
"""

RAW_D58 = """\
fof(ruleD58,axiom,(![A,B,C,P,Q,R] :
            (eqangle(A,B,B,C,P,Q,Q,R) & eqangle(A,C,B,C,P,R,Q,R) &
             ~coll(A,B,C)) => simtri(A,B,C,P,Q,R)) )).
"""


def parse_one(text: str) -> SourceUnit:
    units, directives = parse_units(text)
    assert not directives
    assert len(units) == 1
    return units[0]


class TestParseUnits:
    def test_catalog_parses_fully(self):
        units, directives = parse_units(YEAR7_TEXT, "year7.ax")
        assert not directives
        assert len(units) == 21
        assert all(u.role == "axiom" for u in units)

    def test_rule_r6(self):
        unit = parse_one(
            "fof(ruleR6,axiom,(![A,B,C] :\n           (rightangle(A,B,B,C) => perp(A,B,B,C)) )).\n"
        )
        f = unit.formula
        assert unit.name == "ruleR6" and unit.role == "axiom"
        assert f.variables == ("A", "B", "C")
        assert [str(a) for a in f.premises] == ["rightangle(A,B,B,C)"]
        assert [str(a) for a in f.conclusions] == ["perp(A,B,B,C)"]
        assert not f.ndg_premises

    def test_theorem1_conjecture(self):
        units, directives = parse_units(THEOREM1_P, "theorem1.p")
        assert [d.path for d in directives] == ["year7.ax"]
        (unit,) = units
        assert unit.role == "conjecture"
        f = unit.formula
        assert [str(a) for a in f.premises] == ["parallelogram(A,B,C,D)"]
        assert [str(a) for a in f.conclusions] == ["cong(A,B,C,D)", "cong(A,D,B,C)"]

    def test_d58_negated_premise(self):
        units, _ = parse_units(YEAR7_TEXT)
        d58 = next(u for u in units if u.name == "ruleD58")
        assert [str(a) for a in d58.formula.ndg_premises] == ["coll(A,B,C)"]
        assert len(d58.formula.premises) == 2
        assert all(a.predicate == "eqangle" for a in d58.formula.premises)

    def test_empty_text(self):
        assert parse_units("") == ([], [])

    def test_comments_only(self):
        assert parse_units("% nothing here\n  % more\n") == ([], [])

    def test_positions_recorded(self):
        units, _ = parse_units("% pad\n\nfof(u,axiom,(![A,B,C] : coll(A,B,C))).\n", "f.ax")
        assert units[0].origin == "f.ax"
        assert units[0].line == 3


class TestParseErrors:
    def test_raw_d9_is_unbalanced(self):
        with pytest.raises(FofError):
            parse_units(RAW_D9)

    def test_raw_d58_is_unbalanced(self):
        with pytest.raises(FofError):
            parse_units(RAW_D58)

    def test_unknown_predicate(self):
        with pytest.raises(FofError, match="unknown predicate"):
            parse_units("fof(u,axiom,(![A,B] : circle(A,B))).")

    def test_arity_mismatch(self):
        with pytest.raises(FofError, match="expects 3 arguments"):
            parse_units("fof(u,axiom,(![A,B] : coll(A,B))).")

    def test_unknown_role(self):
        with pytest.raises(FofError, match="unknown role"):
            parse_units("fof(u,lemma,(![A,B,C] : coll(A,B,C))).")

    def test_duplicate_unit_name(self):
        text = "fof(u,axiom,(![A,B,C] : coll(A,B,C))).\nfof(u,axiom,(![A,B,C] : coll(A,B,C)))."
        with pytest.raises(FofError, match="duplicate unit name"):
            parse_units(text)

    def test_non_ascii_rejected_with_position(self):
        with pytest.raises(FofError) as err:
            parse_units("fof(u,axiom,\n(![A,B,C] : coll(A,B,Ç))).")
        assert err.value.line == 2

    def test_unquantified_variable(self):
        with pytest.raises(FofError, match="not quantified"):
            parse_units("fof(u,axiom,(![A,B] : para(A,B,C,D))).")

    def test_unused_quantified_variable(self):
        with pytest.raises(FofError, match="never occurs"):
            parse_units("fof(u,axiom,(![A,B,C,X] : coll(A,B,C))).")

    def test_negated_conclusion(self):
        with pytest.raises(FofError, match="negation"):
            parse_units("fof(u,axiom,(![A,B,C] : coll(A,B,C) => ~coll(A,B,C))).")

    def test_missing_conclusion(self):
        with pytest.raises(FofError):
            parse_units("fof(u,axiom,(![A,B,C] : coll(A,B,C) => )).")

    def test_unterminated_quote(self):
        with pytest.raises(FofError, match="unterminated"):
            parse_units("include('oops.ax).")

    def test_stray_character(self):
        with pytest.raises(FofError, match="unexpected character"):
            parse_units("fof(u,axiom,(![A] : coll(A;B,C))).")

    def test_line_and_column_in_message(self):
        with pytest.raises(FofError) as err:
            parse_units("fof(u,axiom,(![A,B] :\n  coll(A,B))).", "bad.ax")
        assert "bad.ax:2" in str(err.value)


class TestIncludes:
    def loader(self, files):
        def load(path):
            if path not in files:
                raise FileNotFoundError(path)
            return files[path]

        return load

    def test_chain_order_is_depth_first(self):
        files = {
            "b.ax": "include('c.ax').\nfof(b1,axiom,(![A,B,C] : coll(A,B,C) => coll(A,B,C))).",
            "c.ax": "fof(c1,axiom,(![A,B,C] : coll(A,B,C) => coll(B,A,C))).",
        }
        text = "include('b.ax').\nfof(a1,axiom,(![A,B,C] : coll(A,B,C) => coll(C,B,A)))."
        units, directives = parse_units(text, "a.p")
        flat = resolve_includes(units, directives, ".", self.loader(files))
        assert [u.name for u in flat] == ["c1", "b1", "a1"]

    def test_no_includes_identity(self):
        units, directives = parse_units("fof(x,axiom,(![A,B,C] : coll(A,B,C) => coll(B,A,C))).")
        assert resolve_includes(units, directives, ".", self.loader({})) == units

    def test_cycle_rejected(self):
        files = {
            "a.ax": "include('b.ax').",
            "b.ax": "include('a.ax').",
        }
        units, directives = parse_units(files["a.ax"], "a.ax")
        with pytest.raises(FofError, match="cycle"):
            resolve_includes(units, directives, ".", self.loader(files))

    def test_missing_file(self):
        units, directives = parse_units("include('nope.ax').")
        with pytest.raises(FofError, match="cannot include"):
            resolve_includes(units, directives, ".", self.loader({}))

    def test_duplicate_across_files(self):
        files = {"b.ax": "fof(same,axiom,(![A,B,C] : coll(A,B,C) => coll(B,A,C)))."}
        text = "include('b.ax').\nfof(same,axiom,(![A,B,C] : coll(A,B,C) => coll(C,B,A)))."
        units, directives = parse_units(text)
        with pytest.raises(FofError, match="duplicate unit name"):
            resolve_includes(units, directives, ".", self.loader(files))

    def test_relative_to_including_file(self):
        files = {"sub/inner.ax": "fof(i,axiom,(![A,B,C] : coll(A,B,C) => coll(B,A,C)))."}
        units, directives = parse_units("include('inner.ax').", "sub/outer.p")
        flat = resolve_includes(units, directives, "sub", self.loader(files))
        assert [u.name for u in flat] == ["i"]


class TestPrintUnit:
    def test_round_trip_whole_catalog(self):
        units, _ = parse_units(YEAR7_TEXT)
        for unit in units:
            reparsed = parse_one(print_unit(unit))
            assert reparsed.name == unit.name
            assert reparsed.role == unit.role
            assert reparsed.formula == unit.formula

    def test_round_trip_theorems(self):
        for text in (THEOREM1_P, THEOREM2_P):
            units, _ = parse_units(text)
            for unit in units:
                assert parse_one(print_unit(unit)).formula == unit.formula

    def test_ground_fact_unit(self):
        unit = parse_one("fof(h1,axiom,parallelogram(a,b,c,d)).")
        assert not unit.formula.variables
        assert parse_one(print_unit(unit)).formula == unit.formula

    def test_ndg_printed_as_negated_premise(self):
        units, _ = parse_units(YEAR7_TEXT)
        d58 = next(u for u in units if u.name == "ruleD58")
        assert "~coll(A,B,C)" in print_unit(d58)

    def test_conjecture_single_line(self):
        units, _ = parse_units(THEOREM2_P)
        text = print_unit(units[0])
        assert text.count("\n") == 0
        assert text.startswith("fof(theorem2,conjecture,")


class TestLabels:
    @pytest.mark.parametrize(
        "name,label",
        [
            ("ruleR1a", "R1a"),
            ("rulerD61", "D61"),
            ("ruleD40", "D40"),
            ("eqtrans", "eqtrans"),
            ("theorem1", "theorem1"),
            ("ruleX9z", "X9z"),
        ],
    )
    def test_label_for(self, name, label):
        assert label_for(name) == label


class TestCatalogLoading:
    def test_embedded_year7(self):
        assert len(load_catalog("year7")) == 21

    def test_conjecture_rejected_in_catalog(self, tmp_path):
        path = tmp_path / "bad.ax"
        path.write_text("fof(t,conjecture,(![A,B,C] : coll(A,B,C) => coll(B,A,C))).")
        with pytest.raises(FofError, match="conjecture"):
            load_catalog(str(path))

    def test_ground_fact_rejected_in_catalog(self, tmp_path):
        path = tmp_path / "bad.ax"
        path.write_text("fof(h,axiom,coll(a,b,c)).")
        with pytest.raises(FofError, match="problem file"):
            load_catalog(str(path))

    def test_unknown_catalog(self):
        with pytest.raises(FofError, match="no such catalog"):
            load_catalog("year8")

    def test_catalog_dir_env(self, tmp_path, monkeypatch):
        (tmp_path / "mine.ax").write_text(
            "fof(only,axiom,(![A,B,C] : coll(A,B,C) => coll(B,A,C))).\n"
        )
        monkeypatch.setenv("GEODD_CATALOG_DIR", str(tmp_path))
        assert [u.name for u in load_catalog("mine")] == ["only"]
