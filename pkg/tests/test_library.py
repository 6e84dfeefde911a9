"""The procedure library: save, lookup, entry files, and reuse through
the procedure-call law."""

import pytest

from refinery.oracle import ScriptedOracle, drive_refinement
from refinery.prog_lang import interpret, parse_program
from refinery.refinement import (
    Library,
    LibraryError,
    SpecTree,
    parse_entry,
    parse_law_line,
    parse_spec_file,
    render_entry,
)
from refinery.verifier import VerifyConfig, parse_domains

from conftest import SQRT_SCRIPT, SQRT_SPEC


def closed_sqrt_tree(sqrt_config):
    spec = parse_spec_file(SQRT_SPEC)
    tree = SpecTree(spec.statement)
    report = drive_refinement(tree, ScriptedOracle(SQRT_SCRIPT), sqrt_config)
    assert report.fully_refined
    return tree


class TestSaveLookup:
    def test_save_then_identity_lookup(self, sqrt_config, tmp_path):
        lib = Library(tmp_path)
        tree = closed_sqrt_tree(sqrt_config)
        entry = lib.save(tree, "sqrt_approx")
        assert (tmp_path / "sqrt_approx.proc").exists()

        matches = lib.lookup(tree.root.stmt)
        assert len(matches) == 1
        match = matches[0]
        assert match.entry is entry
        # identity instantiation and trivially mutual side conditions
        ob_pre, ob_post = match.obligations
        assert ob_pre.render() == "N >= 0 /\\ e > 0 -> N >= 0 /\\ e > 0"
        assert ob_post.render() == ("x*x <= N /\\ N < y*y /\\ y <= x+e -> "
                                    "x*x <= N /\\ N < y*y /\\ y <= x+e")

    def test_lookup_on_empty_library(self, sqrt_config):
        lib = Library()
        tree = closed_sqrt_tree(sqrt_config)
        assert lib.lookup(tree.root.stmt) == []

    def test_duplicate_name_rejected(self, sqrt_config):
        lib = Library()
        tree = closed_sqrt_tree(sqrt_config)
        lib.save(tree, "sqrt_approx")
        with pytest.raises(LibraryError):
            lib.save(tree, "sqrt_approx")

    def test_open_tree_rejected(self):
        spec = parse_spec_file(SQRT_SPEC)
        tree = SpecTree(spec.statement)
        with pytest.raises(LibraryError):
            Library().save(tree, "unfinished")

    def test_entry_file_round_trip(self, sqrt_config, tmp_path):
        lib = Library(tmp_path)
        tree = closed_sqrt_tree(sqrt_config)
        entry = lib.save(tree, "sqrt_approx")
        text = (tmp_path / "sqrt_approx.proc").read_text()
        again = parse_entry(text)
        assert again.name == entry.name
        assert again.params == entry.params
        assert again.pre == entry.pre and again.post == entry.post
        assert again.program == entry.program
        assert render_entry(again) == text

    def test_directory_reload(self, sqrt_config, tmp_path):
        lib = Library(tmp_path)
        lib.save(closed_sqrt_tree(sqrt_config), "sqrt_approx")
        reloaded = Library(tmp_path)
        assert "sqrt_approx" in reloaded.entries

    def test_predicate_shaped_lookup(self):
        """A definition-backed entry matches a statement of the same
        shape (the modulo / isPrime reuse pattern)."""
        lib_spec = parse_spec_file(
            "name: is_factor\n"
            "constants: D: int, M: int\n"
            "variants: b: bool\n"
            "define: divides (d:int) (m:int) := exists (q:int), m = d * q\n"
            "pre: D >= 1\n"
            "post: b = true -> divides(D, M)\n")
        tree = SpecTree(lib_spec.statement, defs=lib_spec.defs_map)
        # close it trivially for the purposes of the lookup test
        tree.apply(tree.root_id, parse_law_line(
            "assign b := false", tree.root.stmt, tree.defs))
        for ob in tree.root.obligations:
            ob.resolve("proved", backend="test")
        lib = Library()
        lib.save(tree, "is_factor")
        matches = lib.lookup(lib_spec.statement)
        assert len(matches) == 1


class TestProcCallReuse:
    def test_sqrt_reused_via_proccall(self, sqrt_config, tmp_path):
        lib = Library(tmp_path)
        lib.save(closed_sqrt_tree(sqrt_config), "sqrt_approx")

        spec = parse_spec_file(SQRT_SPEC)
        tree = SpecTree(spec.statement, library=lib)
        script = "proccall sqrt_approx(x, y, N, e)"
        report = drive_refinement(tree, ScriptedOracle(script), sqrt_config)
        assert report.fully_refined

        program = tree.extract_program()
        # the callee must be in scope for a standalone run
        from refinery.prog_lang import ProcDef, Seq
        entry = lib.get("sqrt_approx")
        defs = ProcDef("sqrt_approx",
                       tuple((p.name, str(p.ty)) for p in entry.params),
                       entry.program)
        from fractions import Fraction
        out = interpret(Seq((defs, program)),
                        {"N": Fraction(2), "e": Fraction(1, 2),
                         "x": Fraction(0), "y": Fraction(0)})
        x, y = out.final["x"], out.final["y"]
        assert x * x <= 2 < y * y and y <= x + Fraction(1, 2)
