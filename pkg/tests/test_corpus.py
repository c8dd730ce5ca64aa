import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctgs.corpus import (
    CorpusSplit,
    bundled_english_text,
    bundled_lipogram_text,
    load_corpus_text,
    read_manifest,
    split_corpus,
    synthetic_english_tokens,
    tokenize_words,
    verify_lipogram,
)
from ctgs.errors import SequenceTooShort


class TestVerify:
    def test_clean_text(self):
        assert verify_lipogram("a big dog", {"e"}) == []

    def test_single_violation_offset(self):
        violations = verify_lipogram("the dog", {"e"})
        assert len(violations) == 1
        assert violations[0].byte_offset == 0
        assert violations[0].word == "the"
        assert violations[0].letter == "e"

    def test_case_insensitive(self):
        violations = verify_lipogram("Echo", {"e"})
        assert len(violations) == 1

    def test_offset_counts_bytes_not_chars(self):
        violations = verify_lipogram("éclair met", {"m"})
        # é is two bytes in UTF-8
        assert violations[0].byte_offset == 8

    def test_multiple_banned_letters(self):
        violations = verify_lipogram("abc def", {"c", "f"})
        assert [v.word for v in violations] == ["abc", "def"]

    @given(st.text(max_size=200), st.sets(st.sampled_from("aeiou"), min_size=1, max_size=3))
    @settings(max_examples=150)
    def test_empty_iff_no_banned_letter(self, text, banned):
        violations = verify_lipogram(text, banned)
        # independent character loop
        found = any(c in banned for c in text.lower())
        assert (violations == []) == (not found)


class TestTokenize:
    def test_contraction_and_punct(self):
        assert tokenize_words("Don't stop!") == ["don't", "stop", "!"]

    def test_empty(self):
        assert tokenize_words("") == []

    def test_internal_hyphen(self):
        assert tokenize_words("e-mail") == ["e-mail"]

    def test_edge_punctuation_peeled(self):
        assert tokenize_words('"Hello," she said.') == [
            '"', "hello", ",", '"', "she", "said", ".",
        ]

    def test_edge_apostrophe_is_punctuation(self):
        assert tokenize_words("'tis so'") == ["'", "tis", "so", "'"]

    @given(st.text(alphabet="abc '!.-", max_size=60))
    @settings(max_examples=150)
    def test_idempotent_on_rejoined_output(self, text):
        once = tokenize_words(text)
        assert tokenize_words(" ".join(once)) == once


class TestSplit:
    def test_ninety_ten(self):
        split = split_corpus(list(range(100)), 0.9, seed=0)
        assert len(split.train) == 90 and len(split.test) == 10

    def test_two_tokens(self):
        split = split_corpus([1, 2], 0.5, seed=0)
        assert len(split.train) == 1 and len(split.test) == 1

    def test_too_short(self):
        with pytest.raises(SequenceTooShort):
            split_corpus([1], 0.5, seed=0)

    def test_concat_in_block_order_is_input(self):
        tokens = tuple(range(37))
        for seed in range(6):
            split = split_corpus(tokens, 0.7, seed=seed)
            assert split.in_block_order() == tokens

    def test_blocks_are_contiguous_and_disjoint(self):
        tokens = tuple(range(50))
        split = split_corpus(tokens, 0.8, seed=3)
        assert set(split.train) | set(split.test) == set(tokens)
        assert not set(split.train) & set(split.test)

    def test_seed_flips_block_order(self):
        tokens = tuple(range(20))
        orders = {split_corpus(tokens, 0.5, seed=s).train_first for s in range(20)}
        assert orders == {True, False}


def test_manifest_reading(tmp_path):
    (tmp_path / "a.txt").write_text("alpha beta", encoding="utf-8")
    (tmp_path / "b.txt").write_text("gamma", encoding="utf-8")
    manifest = tmp_path / "corpus.manifest"
    manifest.write_text("# members\na.txt\n\nb.txt\n", encoding="utf-8")
    members = read_manifest(manifest)
    assert [p.name for p in members] == ["a.txt", "b.txt"]
    assert load_corpus_text(manifest) == "alpha beta\ngamma"


def test_bundled_lipogram_has_no_e(lipogram_text):
    assert verify_lipogram(lipogram_text, {"e"}) == []
    assert len(tokenize_words(lipogram_text)) > 300


def test_bundled_english_is_ordinary(english_text):
    assert len(verify_lipogram(english_text, {"e"})) > 100


def test_synthetic_corpus_reaches_size():
    tokens = synthetic_english_tokens(50_000)
    assert len(tokens) >= 50_000
    # deterministic
    assert tokens[:100] == synthetic_english_tokens(50_000)[:100]
