import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_embeddings
from ctgs.catalog import build_catalog, space_marker_prefix, word_level
from ctgs.errors import FilterParseError, InvalidFilterParam, MissingResource
from ctgs.filters import (
    EMPTY_CONTEXT,
    BanLetters,
    BannedWords,
    BansStrings,
    ContainsString,
    EndsWith,
    EPrime,
    FullAnagramOf,
    GenerationContext,
    LengthExact,
    LengthMax,
    LengthMin,
    MeterPattern,
    Palindrome,
    PartialAnagramOf,
    PhoneticMatch,
    RequireLetters,
    RhymesWith,
    SemanticSimilarity,
    StartsWith,
    SyllableCount,
    SyllableMax,
    SyllableMin,
    WordStartOnly,
    apply_to_catalog,
    compose,
    evaluate,
    filter_schema,
    parse_filter_item,
    parse_filters,
    serialize_filter,
)


class TestEvaluate:
    def test_ban_letters_rejects_the(self, small_catalog):
        f = small_catalog.features_of(small_catalog.id_of("the"))
        assert evaluate(BanLetters(frozenset("e")), f) is False

    def test_intro_combo_on_data(self, lexicon):
        cat = build_catalog(["data"], lexicon=lexicon)
        f = cat.features_of(0)
        assert evaluate(RequireLetters(frozenset("a")), f) is True
        assert evaluate(LengthMin(4), f) is True
        assert evaluate(BanLetters(frozenset("e")), f) is True

    def test_partial_anagram(self, lexicon):
        cat = build_catalog(["stone", "steel"], lexicon=lexicon)
        spec = PartialAnagramOf("elations")
        assert evaluate(spec, cat.features_of(0)) is True
        assert evaluate(spec, cat.features_of(1)) is False  # needs two e's

    def test_rhymes_with_cat_on_hat(self, small_catalog):
        f = small_catalog.features_of(small_catalog.id_of("hat"))
        assert evaluate(RhymesWith("cat"), f, catalog=small_catalog) is True
        g = small_catalog.features_of(small_catalog.id_of("the"))
        assert evaluate(RhymesWith("cat"), g, catalog=small_catalog) is False

    def test_semantic_identical_word(self, lexicon):
        emb = make_embeddings({"dog": [1.0, 0.0], "cat": [0.9, 0.1]})
        cat = build_catalog(["dog", "cat"], lexicon=lexicon, embeddings=emb)
        spec = SemanticSimilarity("dog", 0.5)
        assert evaluate(spec, cat.features_of(0), catalog=cat) is True

    def test_eprime_bans_is(self, lexicon):
        cat = build_catalog(["is", "runs"], lexicon=lexicon)
        assert evaluate(EPrime(), cat.features_of(0)) is False
        assert evaluate(EPrime(), cat.features_of(1)) is True

    def test_phonetic_feature_absent_fails(self, lexicon):
        cat = build_catalog(["zzzq"], lexicon=lexicon)
        f = cat.features_of(0)
        assert evaluate(SyllableCount(1), f) is False
        assert evaluate(MeterPattern("1"), f) is False
        assert evaluate(RhymesWith("cat"), f, catalog=cat) is False

    def test_special_token_fails_every_spec(self):
        cat = build_catalog(["ok", "<unk>"], scheme=word_level(specials=["<unk>"]))
        f = cat.features_of(1)
        assert evaluate(LengthMin(0), f) is False
        assert evaluate(BanLetters(frozenset("e")), f) is False


class TestCompose:
    def test_empty_passes_everything(self, small_catalog):
        allowed = compose([], small_catalog).allowed()
        assert allowed.cardinality == small_catalog.size

    def test_two_bans_equal_union(self, small_catalog):
        a = compose(
            [BanLetters(frozenset("e")), BanLetters(frozenset("a"))], small_catalog
        ).allowed()
        b = compose([BanLetters(frozenset("ea"))], small_catalog).allowed()
        assert np.array_equal(a.mask, b.mask)

    def test_missing_embeddings(self, small_catalog):
        with pytest.raises(MissingResource) as e:
            compose([SemanticSimilarity("dog", 0.5)], small_catalog)
        assert e.value.resource == "embeddings"

    def test_missing_lexicon(self):
        cat = build_catalog(["cat", "hat"])
        with pytest.raises(MissingResource) as e:
            compose([RhymesWith("cat")], cat)
        assert e.value.resource == "lexicon"


class TestApply:
    def test_ban_e_on_four_words(self, lexicon):
        cat = build_catalog(["the", "cat", "hat", "dog"], lexicon=lexicon)
        allowed = apply_to_catalog(compose([BanLetters(frozenset("e"))], cat))
        assert allowed.cardinality == 3
        assert [cat.tokens[i] for i in allowed.ids()] == ["cat", "hat", "dog"]

    def test_universal_pass(self, small_catalog):
        allowed = apply_to_catalog(compose([], small_catalog))
        assert allowed.mask.all()

    def test_dead_end_cardinality_zero(self, lexicon):
        cat = build_catalog(["the", "then"], lexicon=lexicon)
        allowed = apply_to_catalog(compose([BanLetters(frozenset("e"))], cat))
        assert allowed.cardinality == 0

    def test_mismatched_catalog_rejected(self, small_catalog, lexicon):
        other = build_catalog(["x"], lexicon=lexicon)
        comp = compose([], small_catalog)
        with pytest.raises(ValueError):
            apply_to_catalog(comp, other)


WORDS = [
    "the", "cat", "hat", "dog", "a", "stone", "steel", "level", "noon",
    "data", "hello", "read", "light", "night", "play", "day", "den",
    "is", "был", "e-mail", "don't", "x", "zzzq", "banana", "madam",
]


def _spec_pool(has_lexicon, has_embeddings):
    pool = [
        BanLetters(frozenset("e")), BanLetters(frozenset("ae")),
        RequireLetters(frozenset("a")), RequireLetters(frozenset("no")),
        StartsWith("d"), EndsWith("t"), ContainsString("at"),
        BansStrings(("ell", "oo")), LengthMin(2), LengthMin(4), LengthMax(4),
        LengthExact(3), PartialAnagramOf("elations"), FullAnagramOf("tach"),
        Palindrome(), BannedWords(("the", "dog")), EPrime(), WordStartOnly(),
    ]
    if has_lexicon:
        pool += [
            SyllableCount(1), SyllableMin(2), SyllableMax(1),
            MeterPattern("1"), MeterPattern("10"), MeterPattern("1x", line_mode=True),
            RhymesWith("cat"), RhymesWith("read", any_variant=True),
            RhymesWith("day", at_line_end=True), PhoneticMatch("smith"),
            PhoneticMatch("cat"),
        ]
    if has_embeddings:
        pool += [SemanticSimilarity("dog", 0.5), SemanticSimilarity("cat", -0.5)]
    return pool


def _brute_force(comp, context=EMPTY_CONTEXT):
    cat = comp.catalog
    return np.asarray(
        [comp.passes_token(i, context) for i in range(cat.size)], dtype=bool
    )


@pytest.mark.parametrize("seed", range(40))
def test_apply_matches_brute_force_and_singleton_and(seed, lexicon):
    rng = random.Random(seed)
    tokens = rng.sample(WORDS, rng.randint(2, len(WORDS)))
    emb = make_embeddings({"dog": [1.0, 0.2], "cat": [0.6, 0.4], "hat": [-1.0, 0.1]})
    cat = build_catalog(tokens, lexicon=lexicon, embeddings=emb)
    specs = [rng.choice(_spec_pool(True, True)) for _ in range(rng.randint(0, 5))]
    ctx = rng.choice(
        [EMPTY_CONTEXT, GenerationContext(line_pattern="1x0", at_line_end=True)]
    )
    comp = compose(specs, cat)
    vectorized = comp.allowed(ctx).mask
    assert np.array_equal(vectorized, _brute_force(comp, ctx))
    if specs:
        single = np.ones(cat.size, dtype=bool)
        for s in specs:
            single &= compose([s], cat).allowed(ctx).mask
        assert np.array_equal(vectorized, single)
    # order independence
    perm = list(specs)
    rng.shuffle(perm)
    assert np.array_equal(vectorized, compose(perm, cat).allowed(ctx).mask)


def test_monotonicity_appending_never_adds(lexicon):
    cat = build_catalog(WORDS, lexicon=lexicon)
    specs = []
    prev = compose(specs, cat).allowed().cardinality
    for s in [LengthMin(3), BanLetters(frozenset("e")), SyllableCount(1)]:
        specs.append(s)
        now = compose(specs, cat).allowed().cardinality
        assert now <= prev
        prev = now


class TestContextModes:
    def test_meter_full_match(self, lexicon):
        cat = build_catalog(["potential", "cat", "garden"], lexicon=lexicon)
        mask = compose([MeterPattern("010")], cat).allowed().mask
        assert [cat.tokens[i] for i in np.flatnonzero(mask)] == ["potential"]

    def test_meter_one_matches_secondary_stress(self, lexicon):
        cat = build_catalog(["whirlpools"], lexicon=lexicon)  # stress 12
        assert compose([MeterPattern("11")], cat).allowed().cardinality == 1
        assert compose([MeterPattern("10")], cat).allowed().cardinality == 0

    def test_meter_line_mode_prefix(self, lexicon):
        cat = build_catalog(["cat", "garden", "potential"], lexicon=lexicon)
        comp = compose([MeterPattern("10", line_mode=True)], cat)
        ctx = GenerationContext(line_pattern="10x0")
        names = [cat.tokens[i] for i in np.flatnonzero(comp.allowed(ctx).mask)]
        assert names == ["cat", "garden"]  # '010' is not a prefix of '10x0'

    def test_rhyme_line_mode_defers(self, lexicon):
        cat = build_catalog(["cat", "dog"], lexicon=lexicon)
        comp = compose([RhymesWith("hat", at_line_end=True)], cat)
        assert comp.allowed(EMPTY_CONTEXT).cardinality == 2
        engaged = comp.allowed(GenerationContext(at_line_end=True))
        assert [cat.tokens[i] for i in np.flatnonzero(engaged.mask)] == ["cat"]

    def test_rhyme_any_variant(self, lexicon):
        cat = build_catalog(["bread", "seed"], lexicon=lexicon)
        strict = compose([RhymesWith("read")], cat)
        assert [cat.tokens[i] for i in strict.allowed().ids()] == []
        # 'bread' B R EH1 D matches variant R EH1 D of 'read'
        lex_lines = ["BREAD  B R EH1 D", "SEED  S IY1 D"]
        from ctgs.phonetics import parse_cmudict

        cat2 = build_catalog(
            ["bread", "seed"],
            lexicon=parse_cmudict(lex_lines + ["READ  R IY1 D", "READ(1)  R EH1 D"]),
        )
        anyv = compose([RhymesWith("read", any_variant=True)], cat2)
        assert [cat2.tokens[i] for i in anyv.allowed().ids()] == ["bread", "seed"]


class TestParsing:
    @pytest.mark.parametrize(
        "item,expected",
        [
            ("ban_letters=e", BanLetters(frozenset("e"))),
            ("require_letters=a", RequireLetters(frozenset("a"))),
            ("length_min=4", LengthMin(4)),
            ("syllables=2", SyllableCount(2)),
            ("rhymes_with=cat", RhymesWith("cat")),
            ("rhymes_with=cat:any:line", RhymesWith("cat", True, True)),
            ("meter=0101", MeterPattern("0101")),
            ("meter=01x:line", MeterPattern("01x", line_mode=True)),
            ("partial_anagram_of=elations", PartialAnagramOf("elations")),
            ("semantic=dog:0.5", SemanticSimilarity("dog", 0.5)),
            ("eprime", EPrime()),
            ("palindrome", Palindrome()),
            ("word_start_only", WordStartOnly()),
            ("ban_words=the,dog", BannedWords(("the", "dog"))),
            ("ban_strings=oo,ell", BansStrings(("oo", "ell"))),
            ("sounds_like=smith", PhoneticMatch("smith")),
            ("anagram_of=tach", FullAnagramOf("tach")),
        ],
    )
    def test_parse_and_round_trip(self, item, expected):
        spec = parse_filter_item(item)
        assert spec == expected
        assert parse_filter_item(serialize_filter(spec)) == spec

    @pytest.mark.parametrize(
        "item",
        [
            "syllables=banana",
            "nope=1",
            "ban_letters=",
            "ban_letters=é",
            "meter=012",
            "semantic=dog",
            "semantic=dog:2",
            "length_min=-1",
            "eprime=1",
            "rhymes_with=cat:maybe",
        ],
    )
    def test_parse_errors_name_item(self, item):
        with pytest.raises(FilterParseError) as e:
            parse_filter_item(item)
        assert e.value.item == item

    def test_parse_filters_list(self):
        specs = parse_filters(["ban_letters=e", "length_min=4"])
        assert specs == [BanLetters(frozenset("e")), LengthMin(4)]

    def test_construction_validation(self):
        with pytest.raises(InvalidFilterParam):
            LengthMin(-1)
        with pytest.raises(InvalidFilterParam):
            SemanticSimilarity("dog", 1.5)
        with pytest.raises(InvalidFilterParam):
            MeterPattern("2")

    def test_schema_covers_all_kinds(self):
        schema = filter_schema()
        keys = {row["key"] for row in schema}
        assert "ban_letters" in keys and "semantic" in keys
        assert len(keys) == len(schema) >= 22


@given(st.sampled_from([
    BanLetters(frozenset("xq")), RequireLetters(frozenset("ab")),
    StartsWith("un"), EndsWith("ing"), ContainsString("qu"),
    BansStrings(("th", "sh")), LengthMin(0), LengthMax(12), LengthExact(5),
    SyllableCount(3), SyllableMin(1), SyllableMax(9),
    MeterPattern("x01"), MeterPattern("1", line_mode=True),
    RhymesWith("moon"), RhymesWith("moon", True), RhymesWith("moon", False, True),
    PhoneticMatch("knight"), PartialAnagramOf("elations"), FullAnagramOf("listen"),
    Palindrome(), BannedWords(("a", "b")), EPrime(),
    SemanticSimilarity("sky", 0.25), WordStartOnly(),
]))
def test_round_trip_every_kind(spec):
    assert parse_filter_item(serialize_filter(spec)) == spec


def test_word_start_only_on_subword_catalog(lexicon):
    cat = build_catalog(
        ["▁the", "re", "▁cat"],
        lexicon=lexicon,
        scheme=space_marker_prefix("▁"),
    )
    mask = compose([WordStartOnly()], cat).allowed().mask
    assert [cat.tokens[i] for i in np.flatnonzero(mask)] == ["▁the", "▁cat"]


def test_purity_of_evaluate(small_catalog):
    spec = BanLetters(frozenset("e"))
    f = small_catalog.features_of(0)
    results = {evaluate(spec, f) for _ in range(5)}
    assert len(results) == 1
