"""Immutable vocabulary catalog with precomputed per-token features.

Filters run over the whole vocabulary at every decode step, so everything
a filter can test (letter counts, lengths, syllables, stress, rhyme keys,
metaphone codes, embeddings, boundary classes) is computed once at build
time and stored in dense arrays indexed by token id.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import DuplicateToken, EmptyVocabulary, IdOutOfRange
from .metaphone import MetaphoneCode, double_metaphone
from .phonetics import PhoneticLexicon, _grapheme_syllables, rhyme_key_of


class WordBoundaryClass(IntEnum):
    WORD_START = 0
    CONTINUATION = 1
    SPECIAL = 2


@dataclass(frozen=True)
class TokenizationScheme:
    """How token surfaces encode word boundaries.

    ``word``: every token is a full word. ``prefix``: tokens starting with
    ``marker`` begin a new word (SentencePiece style). ``suffix``: tokens
    ending with ``marker`` continue into the next token (BPE-suffix style;
    a token ending with the marker is itself a continuation here).
    """

    kind: str  # "word" | "prefix" | "suffix"
    marker: str = ""
    specials: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.kind not in ("word", "prefix", "suffix"):
            raise ValueError(f"unknown tokenization scheme kind {self.kind!r}")
        if self.kind != "word" and not self.marker:
            raise ValueError(f"{self.kind} scheme needs a marker")

    @property
    def subword(self) -> bool:
        return self.kind != "word"


def word_level(specials=()) -> TokenizationScheme:
    return TokenizationScheme("word", "", frozenset(specials))


def space_marker_prefix(marker: str, specials=()) -> TokenizationScheme:
    return TokenizationScheme("prefix", marker, frozenset(specials))


def suffix_marker(marker: str, specials=()) -> TokenizationScheme:
    return TokenizationScheme("suffix", marker, frozenset(specials))


def classify_boundary(token: str, scheme: TokenizationScheme) -> WordBoundaryClass:
    """Total classification of a token surface under a scheme."""
    if token in scheme.specials:
        return WordBoundaryClass.SPECIAL
    if scheme.kind == "word":
        return WordBoundaryClass.WORD_START
    if scheme.kind == "prefix":
        if token.startswith(scheme.marker):
            return WordBoundaryClass.WORD_START
        return WordBoundaryClass.CONTINUATION
    if token.endswith(scheme.marker):
        return WordBoundaryClass.CONTINUATION
    return WordBoundaryClass.WORD_START


def normalize_token(token: str, scheme: TokenizationScheme) -> str:
    """Strip exactly one boundary marker per the scheme, then lowercase
    A-Z. Non-ASCII letters pass through untouched."""
    if scheme.kind == "prefix" and scheme.marker and token.startswith(scheme.marker):
        token = token[len(scheme.marker) :]
    elif scheme.kind == "suffix" and scheme.marker and token.endswith(scheme.marker):
        token = token[: -len(scheme.marker)]
    return "".join(chr(ord(c) + 32) if "A" <= c <= "Z" else c for c in token)


@dataclass(eq=False)
class TokenFeatures:
    """Everything the filter engine can test about one token."""

    surface: str
    normalized: str
    letter_multiset: dict[str, int]
    length: int
    boundary: WordBoundaryClass
    syllables: int | None = None
    stress_pattern: str | None = None
    rhyme_key: tuple[str, ...] | None = None
    metaphone: MetaphoneCode | None = None
    embedding: np.ndarray | None = None

    def __eq__(self, other):
        if not isinstance(other, TokenFeatures):
            return NotImplemented
        same_emb = (
            self.embedding is None
            and other.embedding is None
            or (
                self.embedding is not None
                and other.embedding is not None
                and np.array_equal(self.embedding, other.embedding)
            )
        )
        return same_emb and (
            self.surface,
            self.normalized,
            self.letter_multiset,
            self.length,
            self.boundary,
            self.syllables,
            self.stress_pattern,
            self.rhyme_key,
            self.metaphone,
        ) == (
            other.surface,
            other.normalized,
            other.letter_multiset,
            other.length,
            other.boundary,
            other.syllables,
            other.stress_pattern,
            other.rhyme_key,
            other.metaphone,
        )


class EmbeddingTable:
    """Word vectors from a plain-text file, unit-normalized on load.

    Format: optional ``count dim`` header, then ``word v1 v2 ... vd`` per
    line. Unparseable lines (and zero vectors, which cannot be normalized)
    are skipped and counted on ``skipped_lines``.
    """

    def __init__(self, words: list[str], matrix: np.ndarray, skipped_lines: int = 0):
        self.index = {w: i for i, w in enumerate(words)}
        self.matrix = matrix
        self.dim = matrix.shape[1] if matrix.size else 0
        self.skipped_lines = skipped_lines

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def __len__(self) -> int:
        return len(self.index)

    def get(self, word: str) -> np.ndarray | None:
        i = self.index.get(word)
        return self.matrix[i] if i is not None else None

    @classmethod
    def load(cls, path) -> "EmbeddingTable":
        words: list[str] = []
        rows: list[np.ndarray] = []
        skipped = 0
        dim = None
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh):
                parts = raw.split()
                if not parts:
                    continue
                if lineno == 0 and len(parts) == 2:
                    try:
                        int(parts[0]), int(parts[1])
                        continue  # header line
                    except ValueError:
                        pass
                word, vals = parts[0], parts[1:]
                try:
                    vec = np.asarray([float(v) for v in vals], dtype=np.float64)
                except ValueError:
                    skipped += 1
                    continue
                if vec.size == 0 or (dim is not None and vec.size != dim):
                    skipped += 1
                    continue
                norm = float(np.linalg.norm(vec))
                if norm == 0.0:
                    skipped += 1
                    continue
                dim = vec.size
                words.append(word)
                rows.append(vec / norm)
        matrix = np.vstack(rows) if rows else np.zeros((0, 0))
        return cls(words, matrix, skipped)


_A, _Z = ord("a"), ord("z")


class TokenCatalog:
    """Dense, immutable token id space with per-id feature arrays.

    Construction is a pure function of (tokens, lexicon, embeddings,
    scheme): identical inputs produce byte-identical feature tables.
    """

    def __init__(self, tokens, lexicon, embeddings, scheme, syllable_fallback):
        tokens = list(tokens)
        if not tokens:
            raise EmptyVocabulary("catalog needs at least one token")
        seen: set[str] = set()
        for t in tokens:
            if t in seen:
                raise DuplicateToken(t)
            seen.add(t)

        self.tokens: tuple[str, ...] = tuple(tokens)
        self.scheme = scheme
        self.lexicon: PhoneticLexicon | None = lexicon
        self.embedding_table: EmbeddingTable | None = embeddings
        self.size = len(tokens)
        self.token_to_id = {t: i for i, t in enumerate(tokens)}

        n = self.size
        self.normalized = [normalize_token(t, scheme) for t in tokens]
        self.np_normalized = np.asarray(self.normalized, dtype=np.str_)
        self.boundary_classes = np.asarray(
            [int(classify_boundary(t, scheme)) for t in tokens], dtype=np.uint8
        )
        self.lengths = np.asarray([len(w) for w in self.normalized], dtype=np.int32)

        self.letter_counts = np.zeros((n, 26), dtype=np.uint8)
        for i, w in enumerate(self.normalized):
            for c in w:
                o = ord(c)
                if _A <= o <= _Z:
                    col = o - _A
                    if self.letter_counts[i, col] < 255:
                        self.letter_counts[i, col] += 1

        self.is_palindrome = np.asarray(
            [len(w) > 0 and w == w[::-1] for w in self.normalized], dtype=bool
        )
        # tokens like "'s" / "'re": an apostrophe followed by letters only
        self.is_contraction = np.asarray(
            [
                len(w) > 1 and w[0] == "'" and w[1:].isalpha()
                for w in self.normalized
            ],
            dtype=bool,
        )

        # Phonetic features are interned: per-token ids into pools of
        # distinct values, so filters compare ints instead of strings.
        self.stress_pool: list[str] = []
        self.rhyme_pool: list[tuple[str, ...]] = []
        self.meta_pool: list[str] = []
        self.rhyme_pool_index: dict[tuple[str, ...], int] = {}
        self.meta_pool_index: dict[str, int] = {}
        self.syllables = np.full(n, -1, dtype=np.int32)
        self.stress_ids = np.full(n, -1, dtype=np.int32)
        self.rhyme_ids = np.full(n, -1, dtype=np.int32)
        self.meta_pri_ids = np.full(n, -1, dtype=np.int32)
        self.meta_alt_ids = np.full(n, -1, dtype=np.int32)

        if lexicon is not None:
            stress_index: dict[str, int] = {}
            rhyme_index = self.rhyme_pool_index
            meta_index = self.meta_pool_index

            def intern(pool, index, value):
                if value not in index:
                    index[value] = len(pool)
                    pool.append(value)
                return index[value]

            for i, w in enumerate(self.normalized):
                pron = lexicon.first(w) if w else None
                if pron is not None:
                    digits = pron.stress_digits()
                    self.syllables[i] = len(digits)
                    self.stress_ids[i] = intern(self.stress_pool, stress_index, digits)
                    key = rhyme_key_of(pron)
                    if key is not None:
                        self.rhyme_ids[i] = intern(self.rhyme_pool, rhyme_index, key)
                elif syllable_fallback and w:
                    self.syllables[i] = _grapheme_syllables(w)
                if w:
                    code = double_metaphone(w)
                    self.meta_pri_ids[i] = intern(
                        self.meta_pool, meta_index, code.primary
                    )
                    self.meta_alt_ids[i] = intern(
                        self.meta_pool, meta_index, code.alternate
                    )

        self.embeddings: np.ndarray | None = None
        self.has_embedding = np.zeros(n, dtype=bool)
        if embeddings is not None and embeddings.dim:
            self.embeddings = np.zeros((n, embeddings.dim), dtype=np.float64)
            for i, w in enumerate(self.normalized):
                vec = embeddings.get(w)
                if vec is not None:
                    self.embeddings[i] = vec
                    self.has_embedding[i] = True

        self.checksum = self._checksum()
        self.unk_id: int | None = None

    def _checksum(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.scheme.kind}|{self.scheme.marker}|".encode())
        h.update("|".join(sorted(self.scheme.specials)).encode())
        for t in self.tokens:
            h.update(b"\x00")
            h.update(t.encode("utf-8"))
        return h.hexdigest()

    @property
    def has_lexicon(self) -> bool:
        return self.lexicon is not None

    @property
    def has_embeddings(self) -> bool:
        return self.embeddings is not None

    def check_id(self, token_id: int) -> None:
        if not 0 <= token_id < self.size:
            raise IdOutOfRange(token_id, self.size)

    def id_of(self, surface: str) -> int | None:
        return self.token_to_id.get(surface)

    def encode(self, words, strict: bool = False) -> list[int]:
        """Map surfaces to ids; unknown words map to the reserved unknown
        token (requires one) unless ``strict``."""
        out = []
        for w in words:
            i = self.token_to_id.get(w)
            if i is None:
                if strict or self.unk_id is None:
                    raise KeyError(f"word {w!r} not in catalog")
                i = self.unk_id
            out.append(i)
        return out

    def render(self, ids) -> str:
        """Surface text for a token id sequence."""
        if self.scheme.kind == "word":
            return " ".join(self.tokens[i] for i in ids)
        parts = []
        for i in ids:
            t = self.tokens[i]
            if self.scheme.kind == "prefix":
                if t.startswith(self.scheme.marker):
                    parts.append(" " + t[len(self.scheme.marker) :])
                else:
                    parts.append(t)
            else:
                if t.endswith(self.scheme.marker):
                    parts.append(t[: -len(self.scheme.marker)])
                else:
                    parts.append(t + " ")
        return "".join(parts).strip()

    def features_of(self, token_id: int) -> TokenFeatures:
        """Features for one id, assembled from the precomputed arrays."""
        self.check_id(token_id)
        i = token_id
        counts = {
            chr(_A + c): int(self.letter_counts[i, c])
            for c in np.flatnonzero(self.letter_counts[i])
        }
        meta = None
        if self.meta_pri_ids[i] >= 0:
            meta = MetaphoneCode(
                self.meta_pool[self.meta_pri_ids[i]],
                self.meta_pool[self.meta_alt_ids[i]],
            )
        return TokenFeatures(
            surface=self.tokens[i],
            normalized=self.normalized[i],
            letter_multiset=counts,
            length=int(self.lengths[i]),
            boundary=WordBoundaryClass(int(self.boundary_classes[i])),
            syllables=int(self.syllables[i]) if self.syllables[i] >= 0 else None,
            stress_pattern=(
                self.stress_pool[self.stress_ids[i]] if self.stress_ids[i] >= 0 else None
            ),
            rhyme_key=(
                self.rhyme_pool[self.rhyme_ids[i]] if self.rhyme_ids[i] >= 0 else None
            ),
            metaphone=meta,
            embedding=(
                self.embeddings[i]
                if self.embeddings is not None and self.has_embedding[i]
                else None
            ),
        )


UNKNOWN_TOKEN = "<unk>"


def build_catalog(
    tokens,
    lexicon: PhoneticLexicon | None = None,
    embeddings: EmbeddingTable | None = None,
    scheme: TokenizationScheme | None = None,
    syllable_fallback: bool = False,
    reserve_unknown: bool = False,
) -> TokenCatalog:
    """Construct a catalog; pure function of its inputs.

    ``reserve_unknown`` appends a special unknown token used when encoding
    out-of-vocabulary words (filters always reject special tokens).
    """
    tokens = list(tokens)
    if scheme is None:
        scheme = word_level()
    if reserve_unknown and UNKNOWN_TOKEN not in tokens:
        tokens = tokens + [UNKNOWN_TOKEN]
        scheme = TokenizationScheme(
            scheme.kind, scheme.marker, scheme.specials | {UNKNOWN_TOKEN}
        )
    cat = TokenCatalog(tokens, lexicon, embeddings, scheme, syllable_fallback)
    if UNKNOWN_TOKEN in cat.token_to_id and UNKNOWN_TOKEN in scheme.specials:
        cat.unk_id = cat.token_to_id[UNKNOWN_TOKEN]
    return cat


def features_of(catalog: TokenCatalog, token_id: int) -> TokenFeatures:
    return catalog.features_of(token_id)
