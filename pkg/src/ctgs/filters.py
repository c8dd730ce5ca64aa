"""Declarative token filters and their AND-composition into vocabulary masks.

Each filter kind is a small frozen dataclass with two equivalent
evaluation routes: ``passes`` checks a single token's features (the
reference semantics) and ``mask`` computes the same predicate vectorized
over a whole catalog. ``compose`` validates resource requirements up
front and returns a :class:`CompositeFilter` whose allowed set is the
bitwise AND of its members.

Canonical textual syntax, one item per filter: ``ban_letters=e``,
``require_letters=a``, ``length_min=4``, ``syllables=2``,
``rhymes_with=cat``, ``meter=0101``, ``partial_anagram_of=elations``,
``semantic=dog:0.5``, ``eprime``. Items round-trip through
``parse_filter_item`` / ``serialize_filter``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .catalog import TokenCatalog, TokenFeatures, WordBoundaryClass
from .errors import FilterParseError, InvalidFilterParam, MissingResource
from .metaphone import double_metaphone


@dataclass(frozen=True)
class GenerationContext:
    """Step-local state read by the context-aware filters.

    ``line_pattern`` is the unmatched remainder of the current line's meter
    pattern; ``at_line_end`` tells deferred rhyme constraints to engage.
    Filters that don't use context ignore it.
    """

    line_pattern: str | None = None
    at_line_end: bool = False


EMPTY_CONTEXT = GenerationContext()


def _ascii_lower(text: str) -> str:
    return "".join(chr(ord(c) + 32) if "A" <= c <= "Z" else c for c in text)


def _letter_vector(word: str) -> np.ndarray:
    counts = np.zeros(26, dtype=np.int32)
    for c in _ascii_lower(word):
        o = ord(c)
        if 97 <= o <= 122:
            counts[o - 97] += 1
    return counts


def _letter_indices(letters: frozenset[str]) -> list[int]:
    return sorted(ord(c) - 97 for c in letters)


def _is_contraction(normalized: str) -> bool:
    return len(normalized) > 1 and normalized[0] == "'" and normalized[1:].isalpha()


_REGISTRY: dict[str, type["FilterSpec"]] = {}


@dataclass(frozen=True)
class FilterSpec:
    key: ClassVar[str] = ""
    requires: ClassVar[frozenset[str]] = frozenset()
    describe: ClassVar[str] = ""
    arg_hint: ClassVar[str | None] = None

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        if cls.key:
            _REGISTRY[cls.key] = cls

    def arg(self) -> str | None:
        return None

    @classmethod
    def from_arg(cls, arg: str | None) -> "FilterSpec":
        if arg is not None:
            raise InvalidFilterParam(f"{cls.key} takes no argument")
        return cls()

    def passes(self, f: TokenFeatures, cat: TokenCatalog, ctx: GenerationContext) -> bool:
        raise NotImplementedError

    def mask(self, cat: TokenCatalog, ctx: GenerationContext) -> np.ndarray:
        raise NotImplementedError

    def __str__(self) -> str:
        return serialize_filter(self)


def _parse_letters(arg: str | None, key: str) -> frozenset[str]:
    if not arg:
        raise InvalidFilterParam(f"{key} needs at least one letter")
    letters = frozenset(_ascii_lower(arg))
    if not all("a" <= c <= "z" for c in letters):
        raise InvalidFilterParam(f"{key} accepts letters a-z only, got {arg!r}")
    return letters


@dataclass(frozen=True)
class BanLetters(FilterSpec):
    """Reject tokens containing any of the given letters."""

    key: ClassVar[str] = "ban_letters"
    describe: ClassVar[str] = "reject tokens containing any of these letters"
    arg_hint: ClassVar[str] = "letters"
    letters: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.letters or not all("a" <= c <= "z" for c in self.letters):
            raise InvalidFilterParam("ban_letters needs letters a-z")

    def arg(self):
        return "".join(sorted(self.letters))

    @classmethod
    def from_arg(cls, arg):
        return cls(_parse_letters(arg, cls.key))

    def passes(self, f, cat, ctx):
        return all(f.letter_multiset.get(c, 0) == 0 for c in self.letters)

    def mask(self, cat, ctx):
        cols = cat.letter_counts[:, _letter_indices(self.letters)]
        return cols.sum(axis=1) == 0


@dataclass(frozen=True)
class RequireLetters(FilterSpec):
    """Keep only tokens containing every one of the given letters."""

    key: ClassVar[str] = "require_letters"
    describe: ClassVar[str] = "keep only tokens containing all of these letters"
    arg_hint: ClassVar[str] = "letters"
    letters: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.letters or not all("a" <= c <= "z" for c in self.letters):
            raise InvalidFilterParam("require_letters needs letters a-z")

    def arg(self):
        return "".join(sorted(self.letters))

    @classmethod
    def from_arg(cls, arg):
        return cls(_parse_letters(arg, cls.key))

    def passes(self, f, cat, ctx):
        return all(f.letter_multiset.get(c, 0) > 0 for c in self.letters)

    def mask(self, cat, ctx):
        cols = cat.letter_counts[:, _letter_indices(self.letters)]
        return (cols > 0).all(axis=1)


def _require_text(arg: str | None, key: str) -> str:
    if not arg:
        raise InvalidFilterParam(f"{key} needs a non-empty string")
    return _ascii_lower(arg)


@dataclass(frozen=True)
class StartsWith(FilterSpec):
    key: ClassVar[str] = "starts_with"
    describe: ClassVar[str] = "token must start with this string"
    arg_hint: ClassVar[str] = "string"
    text: str = ""

    def __post_init__(self):
        if not self.text:
            raise InvalidFilterParam("starts_with needs a non-empty string")

    def arg(self):
        return self.text

    @classmethod
    def from_arg(cls, arg):
        return cls(_require_text(arg, cls.key))

    def passes(self, f, cat, ctx):
        return f.normalized.startswith(self.text)

    def mask(self, cat, ctx):
        return np.char.startswith(cat.np_normalized, self.text)


@dataclass(frozen=True)
class EndsWith(FilterSpec):
    key: ClassVar[str] = "ends_with"
    describe: ClassVar[str] = "token must end with this string"
    arg_hint: ClassVar[str] = "string"
    text: str = ""

    def __post_init__(self):
        if not self.text:
            raise InvalidFilterParam("ends_with needs a non-empty string")

    def arg(self):
        return self.text

    @classmethod
    def from_arg(cls, arg):
        return cls(_require_text(arg, cls.key))

    def passes(self, f, cat, ctx):
        return f.normalized.endswith(self.text)

    def mask(self, cat, ctx):
        return np.char.endswith(cat.np_normalized, self.text)


@dataclass(frozen=True)
class ContainsString(FilterSpec):
    key: ClassVar[str] = "contains"
    describe: ClassVar[str] = "token must contain this string"
    arg_hint: ClassVar[str] = "string"
    text: str = ""

    def __post_init__(self):
        if not self.text:
            raise InvalidFilterParam("contains needs a non-empty string")

    def arg(self):
        return self.text

    @classmethod
    def from_arg(cls, arg):
        return cls(_require_text(arg, cls.key))

    def passes(self, f, cat, ctx):
        return self.text in f.normalized

    def mask(self, cat, ctx):
        return np.char.find(cat.np_normalized, self.text) >= 0


@dataclass(frozen=True)
class BansStrings(FilterSpec):
    """Reject tokens containing any of the given substrings."""

    key: ClassVar[str] = "ban_strings"
    describe: ClassVar[str] = "reject tokens containing any of these strings"
    arg_hint: ClassVar[str] = "s1,s2,..."
    strings: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.strings or any(not s or "," in s for s in self.strings):
            raise InvalidFilterParam(
                "ban_strings needs non-empty, comma-free strings"
            )

    def arg(self):
        return ",".join(self.strings)

    @classmethod
    def from_arg(cls, arg):
        if not arg:
            raise InvalidFilterParam("ban_strings needs at least one string")
        return cls(tuple(_ascii_lower(s) for s in arg.split(",")))

    def passes(self, f, cat, ctx):
        return all(s not in f.normalized for s in self.strings)

    def mask(self, cat, ctx):
        out = np.ones(cat.size, dtype=bool)
        for s in self.strings:
            out &= np.char.find(cat.np_normalized, s) < 0
        return out


def _require_count(arg: str | None, key: str) -> int:
    try:
        n = int(arg)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise InvalidFilterParam(f"{key} needs an integer, got {arg!r}") from None
    return n


@dataclass(frozen=True)
class _CountSpec(FilterSpec):
    n: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise InvalidFilterParam(f"{self.key} must be >= 0")

    def arg(self):
        return str(self.n)

    @classmethod
    def from_arg(cls, arg):
        return cls(_require_count(arg, cls.key))


@dataclass(frozen=True)
class LengthMin(_CountSpec):
    key: ClassVar[str] = "length_min"
    describe: ClassVar[str] = "token length at least n"
    arg_hint: ClassVar[str] = "n"

    def passes(self, f, cat, ctx):
        return f.length >= self.n

    def mask(self, cat, ctx):
        return cat.lengths >= self.n


@dataclass(frozen=True)
class LengthMax(_CountSpec):
    key: ClassVar[str] = "length_max"
    describe: ClassVar[str] = "token length at most n"
    arg_hint: ClassVar[str] = "n"

    def passes(self, f, cat, ctx):
        return f.length <= self.n

    def mask(self, cat, ctx):
        return cat.lengths <= self.n


@dataclass(frozen=True)
class LengthExact(_CountSpec):
    key: ClassVar[str] = "length"
    describe: ClassVar[str] = "token length exactly n"
    arg_hint: ClassVar[str] = "n"

    def passes(self, f, cat, ctx):
        return f.length == self.n

    def mask(self, cat, ctx):
        return cat.lengths == self.n


@dataclass(frozen=True)
class SyllableCount(_CountSpec):
    key: ClassVar[str] = "syllables"
    describe: ClassVar[str] = "exactly n syllables (dictionary words only)"
    arg_hint: ClassVar[str] = "n"
    requires: ClassVar[frozenset[str]] = frozenset({"lexicon"})

    def passes(self, f, cat, ctx):
        return f.syllables is not None and f.syllables == self.n

    def mask(self, cat, ctx):
        return cat.syllables == self.n


@dataclass(frozen=True)
class SyllableMin(_CountSpec):
    key: ClassVar[str] = "syllables_min"
    describe: ClassVar[str] = "at least n syllables"
    arg_hint: ClassVar[str] = "n"
    requires: ClassVar[frozenset[str]] = frozenset({"lexicon"})

    def passes(self, f, cat, ctx):
        return f.syllables is not None and f.syllables >= self.n

    def mask(self, cat, ctx):
        return (cat.syllables >= 0) & (cat.syllables >= self.n)


@dataclass(frozen=True)
class SyllableMax(_CountSpec):
    key: ClassVar[str] = "syllables_max"
    describe: ClassVar[str] = "at most n syllables"
    arg_hint: ClassVar[str] = "n"
    requires: ClassVar[frozenset[str]] = frozenset({"lexicon"})

    def passes(self, f, cat, ctx):
        return f.syllables is not None and f.syllables <= self.n

    def mask(self, cat, ctx):
        return (cat.syllables >= 0) & (cat.syllables <= self.n)


def _meter_matches(stress: str, pattern: str) -> bool:
    # '0' wants an unstressed vowel, '1' accepts primary or secondary
    # stress, 'x' accepts anything.
    for d, p in zip(stress, pattern):
        if p == "0" and d != "0":
            return False
        if p == "1" and d not in "12":
            return False
    return True


@dataclass(frozen=True)
class MeterPattern(FilterSpec):
    """Stress pattern constraint over {0,1,x}.

    Full mode: the token's whole stress pattern must match the pattern
    exactly. Line mode: the token's stress pattern must be a prefix of
    the remaining line pattern (from context when supplied, else the
    spec's own pattern). Tokens without a stress pattern always fail.
    """

    key: ClassVar[str] = "meter"
    describe: ClassVar[str] = "stress pattern over 0/1/x; append :line for prefix mode"
    arg_hint: ClassVar[str] = "pattern[:line]"
    requires: ClassVar[frozenset[str]] = frozenset({"lexicon"})
    pattern: str = ""
    line_mode: bool = False

    def __post_init__(self):
        if not self.pattern or any(c not in "01x" for c in self.pattern):
            raise InvalidFilterParam("meter pattern must be non-empty over {0,1,x}")

    def arg(self):
        return self.pattern + (":line" if self.line_mode else "")

    @classmethod
    def from_arg(cls, arg):
        if not arg:
            raise InvalidFilterParam("meter needs a pattern")
        line_mode = arg.endswith(":line")
        if line_mode:
            arg = arg[: -len(":line")]
        return cls(arg, line_mode)

    def _stress_ok(self, stress: str | None, ctx: GenerationContext) -> bool:
        if not stress:
            return False
        if self.line_mode:
            remaining = ctx.line_pattern if ctx.line_pattern is not None else self.pattern
            return len(stress) <= len(remaining) and _meter_matches(stress, remaining)
        return len(stress) == len(self.pattern) and _meter_matches(
            stress, self.pattern
        )

    def passes(self, f, cat, ctx):
        return self._stress_ok(f.stress_pattern, ctx)

    def mask(self, cat, ctx):
        ok = np.zeros(len(cat.stress_pool) + 1, dtype=bool)
        for i, stress in enumerate(cat.stress_pool):
            ok[i] = self._stress_ok(stress, ctx)
        return ok[cat.stress_ids]  # -1 indexes the trailing False


@dataclass(frozen=True)
class RhymesWith(FilterSpec):
    """Keep tokens whose rhyme key equals the target word's.

    ``any_variant`` accepts a match against any of the target's
    pronunciation variants (tokens always use their first). With
    ``at_line_end``, the constraint engages only when the context says
    the line is ending; until then everything passes.
    """

    key: ClassVar[str] = "rhymes_with"
    describe: ClassVar[str] = "rhyme with a word; options :any (variants), :line (end of line only)"
    arg_hint: ClassVar[str] = "word[:any][:line]"
    requires: ClassVar[frozenset[str]] = frozenset({"lexicon"})
    word: str = ""
    any_variant: bool = False
    at_line_end: bool = False

    def __post_init__(self):
        if not self.word:
            raise InvalidFilterParam("rhymes_with needs a word")

    def arg(self):
        return (
            self.word
            + (":any" if self.any_variant else "")
            + (":line" if self.at_line_end else "")
        )

    @classmethod
    def from_arg(cls, arg):
        if not arg:
            raise InvalidFilterParam("rhymes_with needs a word")
        parts = arg.split(":")
        word, opts = parts[0], parts[1:]
        if not word or any(o not in ("any", "line") for o in opts):
            raise InvalidFilterParam(f"bad rhymes_with argument {arg!r}")
        return cls(_ascii_lower(word), "any" in opts, "line" in opts)

    def _target_keys(self, cat) -> list[tuple[str, ...]]:
        from .phonetics import rhyme_key, rhyme_keys_all_variants

        if cat is None or cat.lexicon is None:
            return []
        if self.any_variant:
            return rhyme_keys_all_variants(cat.lexicon, self.word)
        key = rhyme_key(cat.lexicon, self.word)
        return [key] if key is not None else []

    def passes(self, f, cat, ctx):
        if self.at_line_end and not ctx.at_line_end:
            return True
        return f.rhyme_key is not None and f.rhyme_key in self._target_keys(cat)

    def mask(self, cat, ctx):
        if self.at_line_end and not ctx.at_line_end:
            return np.ones(cat.size, dtype=bool)
        ids = [
            cat.rhyme_pool_index[k]
            for k in self._target_keys(cat)
            if k in cat.rhyme_pool_index
        ]
        if not ids:
            return np.zeros(cat.size, dtype=bool)
        return np.isin(cat.rhyme_ids, ids)


@dataclass(frozen=True)
class PhoneticMatch(FilterSpec):
    """Keep tokens whose double-metaphone code matches the target's
    (either of the token's two codes equal to either of the target's)."""

    key: ClassVar[str] = "sounds_like"
    describe: ClassVar[str] = "phonetic match via double metaphone"
    arg_hint: ClassVar[str] = "word"
    requires: ClassVar[frozenset[str]] = frozenset({"lexicon"})
    word: str = ""

    def __post_init__(self):
        if not self.word:
            raise InvalidFilterParam("sounds_like needs a word")

    def arg(self):
        return self.word

    @classmethod
    def from_arg(cls, arg):
        if not arg:
            raise InvalidFilterParam("sounds_like needs a word")
        return cls(_ascii_lower(arg))

    def passes(self, f, cat, ctx):
        if f.metaphone is None:
            return False
        return f.metaphone.matches(double_metaphone(self.word))

    def mask(self, cat, ctx):
        target = double_metaphone(self.word)
        codes = {target.primary, target.alternate} - {""}
        ids = [cat.meta_pool_index[c] for c in sorted(codes) if c in cat.meta_pool_index]
        if not ids:
            return np.zeros(cat.size, dtype=bool)
        return np.isin(cat.meta_pri_ids, ids) | np.isin(cat.meta_alt_ids, ids)


@dataclass(frozen=True)
class PartialAnagramOf(FilterSpec):
    """Token letters must fit inside the target word's letter multiset."""

    key: ClassVar[str] = "partial_anagram_of"
    describe: ClassVar[str] = "letters form a sub-multiset of the word's"
    arg_hint: ClassVar[str] = "word"
    word: str = ""

    def __post_init__(self):
        if not self.word:
            raise InvalidFilterParam("partial_anagram_of needs a word")

    def arg(self):
        return self.word

    @classmethod
    def from_arg(cls, arg):
        if not arg:
            raise InvalidFilterParam("partial_anagram_of needs a word")
        return cls(_ascii_lower(arg))

    def passes(self, f, cat, ctx):
        target = _letter_vector(self.word)
        return all(
            f.letter_multiset.get(chr(97 + i), 0) <= target[i] for i in range(26)
        )

    def mask(self, cat, ctx):
        target = _letter_vector(self.word)
        return (cat.letter_counts <= target[None, :]).all(axis=1)


@dataclass(frozen=True)
class FullAnagramOf(FilterSpec):
    """Token letters must exactly equal the target word's letter multiset."""

    key: ClassVar[str] = "anagram_of"
    describe: ClassVar[str] = "letters exactly rearrange the word's"
    arg_hint: ClassVar[str] = "word"
    word: str = ""

    def __post_init__(self):
        if not self.word:
            raise InvalidFilterParam("anagram_of needs a word")

    def arg(self):
        return self.word

    @classmethod
    def from_arg(cls, arg):
        if not arg:
            raise InvalidFilterParam("anagram_of needs a word")
        return cls(_ascii_lower(arg))

    def passes(self, f, cat, ctx):
        target = _letter_vector(self.word)
        return all(
            f.letter_multiset.get(chr(97 + i), 0) == target[i] for i in range(26)
        )

    def mask(self, cat, ctx):
        target = _letter_vector(self.word)
        return (cat.letter_counts == target[None, :]).all(axis=1)


@dataclass(frozen=True)
class Palindrome(FilterSpec):
    key: ClassVar[str] = "palindrome"
    describe: ClassVar[str] = "token reads the same backwards"

    def passes(self, f, cat, ctx):
        return len(f.normalized) > 0 and f.normalized == f.normalized[::-1]

    def mask(self, cat, ctx):
        return cat.is_palindrome.copy()


@dataclass(frozen=True)
class BannedWords(FilterSpec):
    key: ClassVar[str] = "ban_words"
    describe: ClassVar[str] = "reject exactly these words"
    arg_hint: ClassVar[str] = "w1,w2,..."
    words: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.words or any(not w or "," in w for w in self.words):
            raise InvalidFilterParam("ban_words needs non-empty, comma-free words")

    def arg(self):
        return ",".join(self.words)

    @classmethod
    def from_arg(cls, arg):
        if not arg:
            raise InvalidFilterParam("ban_words needs at least one word")
        return cls(tuple(_ascii_lower(w) for w in arg.split(",")))

    def passes(self, f, cat, ctx):
        return f.normalized not in self.words

    def mask(self, cat, ctx):
        return ~np.isin(cat.np_normalized, list(self.words))


# All conjugated/negated forms of "to be"; contraction tails are rejected
# only for tokens the catalog marks as contraction forms.
EPRIME_WORDS = (
    "be", "is", "am", "are", "was", "were", "been", "being",
    "isn't", "aren't", "wasn't", "weren't", "ain't",
)
EPRIME_CONTRACTIONS = ("'s", "'re", "'m")


@dataclass(frozen=True)
class EPrime(FilterSpec):
    """English without any form of the verb "to be"."""

    key: ClassVar[str] = "eprime"
    describe: ClassVar[str] = "ban every form of the verb 'to be'"

    def passes(self, f, cat, ctx):
        if f.normalized in EPRIME_WORDS:
            return False
        return not (
            f.normalized in EPRIME_CONTRACTIONS and _is_contraction(f.normalized)
        )

    def mask(self, cat, ctx):
        out = ~np.isin(cat.np_normalized, list(EPRIME_WORDS))
        out &= ~(np.isin(cat.np_normalized, list(EPRIME_CONTRACTIONS)) & cat.is_contraction)
        return out


@dataclass(frozen=True)
class SemanticSimilarity(FilterSpec):
    """Cosine similarity against the target word's embedding must reach
    the threshold; tokens without an embedding always fail."""

    key: ClassVar[str] = "semantic"
    describe: ClassVar[str] = "cosine similarity to a word at or above a threshold"
    arg_hint: ClassVar[str] = "word:threshold"
    requires: ClassVar[frozenset[str]] = frozenset({"embeddings"})
    word: str = ""
    threshold: float = 0.0

    def __post_init__(self):
        if not self.word:
            raise InvalidFilterParam("semantic needs a word")
        if not -1.0 <= self.threshold <= 1.0:
            raise InvalidFilterParam("semantic threshold must be in [-1, 1]")

    def arg(self):
        return f"{self.word}:{self.threshold!r}"

    @classmethod
    def from_arg(cls, arg):
        if not arg or ":" not in arg:
            raise InvalidFilterParam("semantic needs word:threshold")
        word, _, raw = arg.rpartition(":")
        try:
            tau = float(raw)
        except ValueError:
            raise InvalidFilterParam(f"bad semantic threshold {raw!r}") from None
        return cls(_ascii_lower(word), tau)

    def _target(self, cat) -> np.ndarray | None:
        if cat is None or cat.embedding_table is None:
            return None
        return cat.embedding_table.get(_ascii_lower(self.word))

    def passes(self, f, cat, ctx):
        target = self._target(cat)
        if target is None or f.embedding is None:
            return False
        return float(np.dot(f.embedding, target)) >= self.threshold

    def mask(self, cat, ctx):
        target = self._target(cat)
        if target is None or cat.embeddings is None:
            return np.zeros(cat.size, dtype=bool)
        sims = cat.embeddings @ target
        return (sims >= self.threshold) & cat.has_embedding


@dataclass(frozen=True)
class WordStartOnly(FilterSpec):
    key: ClassVar[str] = "word_start_only"
    describe: ClassVar[str] = "keep only tokens that begin a word"

    def passes(self, f, cat, ctx):
        return f.boundary == WordBoundaryClass.WORD_START

    def mask(self, cat, ctx):
        return cat.boundary_classes == int(WordBoundaryClass.WORD_START)


def serialize_filter(spec: FilterSpec) -> str:
    arg = spec.arg()
    return spec.key if arg is None else f"{spec.key}={arg}"


def parse_filter_item(item: str) -> FilterSpec:
    """Parse one canonical filter item; errors name the offending item."""
    text = item.strip()
    key, sep, arg = text.partition("=")
    cls = _REGISTRY.get(key)
    if cls is None:
        raise FilterParseError(item, f"unknown filter {key!r}")
    try:
        return cls.from_arg(arg if sep else None)
    except InvalidFilterParam as e:
        raise FilterParseError(item, str(e)) from None


def parse_filters(items) -> list[FilterSpec]:
    return [parse_filter_item(i) for i in items]


def filter_schema() -> list[dict]:
    """Machine-readable description of every filter kind, for UIs."""
    out = []
    for key in sorted(_REGISTRY):
        cls = _REGISTRY[key]
        out.append(
            {
                "key": key,
                "arg": cls.arg_hint,
                "requires": sorted(cls.requires),
                "description": cls.describe,
            }
        )
    return out


PRESETS: dict[str, tuple[str, ...]] = {
    "lipogram-e": ("ban_letters=e",),
    "e-prime": ("eprime",),
}


@dataclass
class AllowedSet:
    """Bit per token id: True = survives the filter."""

    mask: np.ndarray

    @property
    def cardinality(self) -> int:
        return int(self.mask.sum())

    def ids(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __contains__(self, token_id: int) -> bool:
        return bool(self.mask[token_id])


SPECIAL = int(WordBoundaryClass.SPECIAL)


class CompositeFilter:
    """AND-composition of filter specs bound to one catalog.

    The empty composition passes every token. Any non-empty composition
    additionally rejects special tokens (the reserved unknown above all),
    so constrained output can never contain them.
    """

    def __init__(self, specs, catalog: TokenCatalog):
        self.specs: tuple[FilterSpec, ...] = tuple(specs)
        self.catalog = catalog

    def __len__(self) -> int:
        return len(self.specs)

    def items(self) -> list[str]:
        return [serialize_filter(s) for s in self.specs]

    def allowed(self, context: GenerationContext = EMPTY_CONTEXT) -> AllowedSet:
        cat = self.catalog
        mask = np.ones(cat.size, dtype=bool)
        if self.specs:
            mask &= cat.boundary_classes != SPECIAL
            for spec in self.specs:
                mask &= spec.mask(cat, context)
        return AllowedSet(mask)

    def passes_token(
        self, token_id: int, context: GenerationContext = EMPTY_CONTEXT
    ) -> bool:
        if not self.specs:
            return True
        if self.catalog.boundary_classes[token_id] == SPECIAL:
            return False
        f = self.catalog.features_of(token_id)
        return all(s.passes(f, self.catalog, context) for s in self.specs)

    def first_rejecting(
        self, token_id: int, context: GenerationContext = EMPTY_CONTEXT
    ) -> str | None:
        """Canonical form of the first spec rejecting this token, or the
        pseudo-reason "special_token"; None when the token passes."""
        if not self.specs:
            return None
        if self.catalog.boundary_classes[token_id] == SPECIAL:
            return "special_token"
        f = self.catalog.features_of(token_id)
        for s in self.specs:
            if not s.passes(f, self.catalog, context):
                return serialize_filter(s)
        return None


def compose(specs, catalog: TokenCatalog) -> CompositeFilter:
    """Validate resource requirements and bind the specs to a catalog."""
    for spec in specs:
        for res in sorted(spec.requires):
            if res == "lexicon" and not catalog.has_lexicon:
                raise MissingResource(serialize_filter(spec), "lexicon")
            if res == "embeddings" and not catalog.has_embeddings:
                raise MissingResource(serialize_filter(spec), "embeddings")
    return CompositeFilter(specs, catalog)


def evaluate(
    spec: FilterSpec,
    features: TokenFeatures,
    context: GenerationContext = EMPTY_CONTEXT,
    catalog: TokenCatalog | None = None,
) -> bool:
    """Single-token reference semantics of one spec.

    Special tokens fail every spec. Specs that resolve a target through
    catalog resources (rhymes_with, semantic) need ``catalog``.
    """
    if features.boundary == WordBoundaryClass.SPECIAL:
        return False
    return spec.passes(features, catalog, context)


def apply_to_catalog(
    composite: CompositeFilter,
    catalog: TokenCatalog | None = None,
    context: GenerationContext = EMPTY_CONTEXT,
) -> AllowedSet:
    if catalog is not None and catalog is not composite.catalog:
        raise ValueError("composite was bound to a different catalog")
    return composite.allowed(context)
