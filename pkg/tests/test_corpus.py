"""Corpus ingestion, serialization, and alphabet derivation."""

import logging

import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphotact import corpus
from graphotact.errors import (
    DataError,
    MalformedRowError,
    PadCollisionError,
    UnknownSymbolError,
)

# Field text that cannot collide with the record syntax.
field = st.text(
    st.characters(exclude_characters="\t\n\r;", min_codepoint=33),
    min_size=1, max_size=8,
)


class TestParseRow:
    def test_unimorph_row(self):
        t = corpus.parse_row("run\tran\tV;PST")
        assert t == corpus.Triple("run", "ran", ("V", "PST"))

    def test_minimal_row(self):
        assert corpus.parse_row("x\ty\tA") == corpus.Triple("x", "y", ("A",))

    def test_missing_column(self):
        with pytest.raises(MalformedRowError):
            corpus.parse_row("a\tb")

    def test_extra_column(self):
        with pytest.raises(MalformedRowError):
            corpus.parse_row("a\tb\tC\td")

    def test_empty_field(self):
        with pytest.raises(MalformedRowError):
            corpus.parse_row("a\t\tC")

    def test_error_carries_line_number(self):
        with pytest.raises(MalformedRowError, match="line 7"):
            corpus.parse_row("a\tb", line_no=7)

    def test_trailing_newline_ignored(self):
        assert corpus.parse_row("a\tb\tC\n") == corpus.parse_row("a\tb\tC")

    @given(lemma=field, form=field, tags=st.lists(field, min_size=1, max_size=4))
    def test_round_trip(self, lemma, form, tags):
        line = f"{lemma}\t{form}\t{';'.join(tags)}"
        assert corpus.parse_row(line).to_line() == line


class TestLoadDataset:
    def test_fixture_loads_in_order(self, toyglot, toyglot_path):
        assert len(toyglot) == 100
        first = toyglot_path.read_text("utf-8").splitlines()[0]
        assert toyglot.triples[0].to_line() == first

    def test_serialization_round_trip(self, toyglot, toyglot_path):
        assert toyglot.to_text() == toyglot_path.read_text("utf-8")

    def test_empty_file_warns(self, tmp_path, caplog):
        p = tmp_path / "x-train-low"
        p.write_text("")
        with caplog.at_level(logging.WARNING):
            ds = corpus.load_dataset(p)
        assert len(ds) == 0
        assert "0 examples" in caplog.text

    def test_non_100_size_warns(self, tmp_path, caplog):
        p = tmp_path / "x-train-low"
        p.write_text("a\tb\tC\n")
        with caplog.at_level(logging.WARNING):
            corpus.load_dataset(p)
        assert "1 examples" in caplog.text

    def test_bad_row_names_line(self, tmp_path):
        p = tmp_path / "bad"
        p.write_text("a\tb\tC\nbroken line\n")
        with pytest.raises(MalformedRowError, match="line 2"):
            corpus.load_dataset(p)

    def test_trailing_blank_lines_ignored(self, tmp_path):
        p = tmp_path / "x"
        p.write_text("a\tb\tC\n\n\n")
        assert len(corpus.load_dataset(p)) == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            corpus.load_dataset(tmp_path / "absent")

    def test_language_defaults_to_stem(self, tmp_path):
        p = tmp_path / "kashubian-train-low"
        p.write_text("a\tb\tC\n")
        assert corpus.load_dataset(p).language == "kashubian-train-low"


class TestWriteDataset:
    def test_round_trip(self, toyglot, tmp_path):
        out = tmp_path / "copy"
        corpus.write_dataset(toyglot, out)
        assert corpus.load_dataset(out, language="toyglot") == toyglot

    def test_provenance_column(self, tmp_path):
        ds = corpus.Dataset("x", [corpus.Triple("a", "b", ("C",))])
        out = tmp_path / "tagged"
        corpus.write_dataset(ds, out, provenance="random")
        assert out.read_text("utf-8") == "a\tb\tC\trandom\n"


class TestAlphabet:
    def test_union_sorted_with_pad(self):
        ds = corpus.Dataset("x", [corpus.Triple("ab", "abba", ("T",))])
        a = corpus.build_alphabet(ds)
        assert a.symbols == ("0", "a", "b")
        assert a.pad_glyph == "0"
        assert a.real_symbols == ("a", "b")

    def test_order_independence(self):
        d1 = corpus.Dataset("x", [corpus.Triple("ba", "ab", ("T",))])
        d2 = corpus.Dataset("x", [corpus.Triple("ab", "ba", ("T",))])
        assert corpus.build_alphabet(d1) == corpus.build_alphabet(d2)

    def test_size_27_over_ascii_lowercase(self):
        import string
        third = len(string.ascii_lowercase) // 3 + 1
        chunks = [string.ascii_lowercase[i : i + third] for i in range(0, 26, third)]
        ds = corpus.Dataset("x", [
            corpus.Triple(chunks[0], chunks[1], ("T",)),
            corpus.Triple(chunks[2], chunks[0], ("T",)),
            corpus.Triple(chunks[1], chunks[2], ("T",)),
        ])
        assert len(corpus.build_alphabet(ds)) == 27

    def test_idempotent(self, toyglot):
        assert corpus.build_alphabet(toyglot) == corpus.build_alphabet(toyglot)

    def test_pad_fallback_when_zero_in_data(self):
        ds = corpus.Dataset("x", [corpus.Triple("a0", "0a", ("T",))])
        a = corpus.build_alphabet(ds)
        assert a.pad_glyph == "␀"
        assert "0" in a.real_symbols

    def test_pad_collision_error(self):
        ds = corpus.Dataset("x", [corpus.Triple("0␀", "␀0", ("T",))])
        with pytest.raises(PadCollisionError):
            corpus.build_alphabet(ds)

    def test_empty_dataset(self):
        with pytest.raises(DataError):
            corpus.build_alphabet(corpus.Dataset("x", []))

    def test_index_round_trip(self):
        a = corpus.Alphabet(("0", "a", "b"))
        assert a.index_of("a") == 1
        assert a.symbol_at(0) == "0"
        assert a.symbol_at(2) == "b"
        assert "a" in a and "0" not in a

    def test_unknown_symbol(self):
        a = corpus.Alphabet(("0", "a"))
        with pytest.raises(UnknownSymbolError):
            a.index_of("z")
        with pytest.raises(UnknownSymbolError):
            a.symbol_at(9)

    def test_duplicate_symbols_rejected(self):
        with pytest.raises(DataError):
            corpus.Alphabet(("0", "a", "a"))

    def test_pad_duplicated_as_real_symbol_rejected(self):
        with pytest.raises(PadCollisionError):
            corpus.Alphabet(("0", "0", "a"))

    def test_every_dataset_character_indexable(self, toyglot):
        a = corpus.build_alphabet(toyglot)
        for t in toyglot:
            for ch in t.lemma + t.form:
                assert a.symbol_at(a.index_of(ch)) == ch

    @given(st.lists(st.tuples(field, field), min_size=1, max_size=6))
    def test_permutation_invariant(self, pairs):
        triples = [corpus.Triple(l, f, ("T",)) for l, f in pairs]
        fwd = corpus.build_alphabet(corpus.Dataset("x", triples))
        rev = corpus.build_alphabet(corpus.Dataset("x", triples[::-1]))
        assert fwd == rev
