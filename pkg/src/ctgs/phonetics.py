"""CMU Pronouncing Dictionary parsing and the phonetic features built on it.

The dictionary file format: one entry per line, ``WORD  PH1 PH2 ...`` with
any whitespace run as separator, ``;;;`` comment lines, and ``WORD(n)``
suffixes for alternative pronunciations. Vowel phonemes carry a stress
digit (0 = unstressed, 1 = primary, 2 = secondary); consonants carry none.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import IO, Iterable

from .errors import EmptyLexicon

ARPABET_VOWELS = frozenset(
    "AA AE AH AO AW AY EH ER EY IH IY OW OY UH UW".split()
)
ARPABET_CONSONANTS = frozenset(
    "B CH D DH F G HH JH K L M N NG P R S SH T TH V W Y Z ZH".split()
)
STRESS_DIGITS = frozenset("012")

_VARIANT_RE = re.compile(r"^(.*)\((\d+)\)$")


def is_vowel(phoneme: str) -> bool:
    """True for a stress-bearing ARPAbet symbol such as ``AE1``."""
    return phoneme[:-1] in ARPABET_VOWELS and phoneme[-1] in STRESS_DIGITS


def valid_phoneme(phoneme: str) -> bool:
    return phoneme in ARPABET_CONSONANTS or is_vowel(phoneme)


@dataclass(frozen=True)
class Pronunciation:
    """One ARPAbet transcription; stress digits retained on vowels."""

    phonemes: tuple[str, ...]

    def __post_init__(self):
        if not self.phonemes:
            raise ValueError("empty pronunciation")

    def vowels(self) -> tuple[str, ...]:
        return tuple(p for p in self.phonemes if is_vowel(p))

    def stress_digits(self) -> str:
        return "".join(p[-1] for p in self.phonemes if is_vowel(p))


class PhoneticLexicon:
    """Word -> pronunciations, keyed case-insensitively (stored uppercase)."""

    def __init__(self, entries: dict[str, list[Pronunciation]], skipped_lines: int = 0):
        self.entries = entries
        self.skipped_lines = skipped_lines

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word.upper() in self.entries

    def pronunciations(self, word: str) -> list[Pronunciation]:
        """All variants for ``word``, in file order; empty list if absent."""
        return self.entries.get(word.upper(), [])

    def first(self, word: str) -> Pronunciation | None:
        prons = self.entries.get(word.upper())
        return prons[0] if prons else None

    def words(self) -> Iterable[str]:
        return self.entries.keys()


def parse_cmudict(stream: IO[str] | Iterable[str]) -> PhoneticLexicon:
    """Parse dictionary text into a lexicon.

    Comment lines (``;;;`` prefix) are skipped; variant entries ``WORD(n)``
    merge under ``WORD`` preserving file order; malformed lines are counted
    on ``lexicon.skipped_lines`` and skipped. Raises :class:`EmptyLexicon`
    when no valid entry survives.
    """
    entries: dict[str, list[Pronunciation]] = {}
    skipped = 0
    for raw in stream:
        line = raw.strip()
        if not line or line.startswith(";;;"):
            continue
        parts = line.split()
        if len(parts) < 2:
            skipped += 1
            continue
        head, phonemes = parts[0], parts[1:]
        m = _VARIANT_RE.match(head)
        word = m.group(1) if m else head
        if not word or not all(valid_phoneme(p) for p in phonemes):
            skipped += 1
            continue
        entries.setdefault(word.upper(), []).append(Pronunciation(tuple(phonemes)))
    if not entries:
        raise EmptyLexicon("no valid dictionary entries found")
    return PhoneticLexicon(entries, skipped_lines=skipped)


def load_cmudict(path) -> PhoneticLexicon:
    with open(path, "r", encoding="latin-1") as fh:
        return parse_cmudict(fh)


def serialize_lexicon(lexicon: PhoneticLexicon) -> str:
    """Inverse of :func:`parse_cmudict`, re-numbering variants from the
    stored order. Round-trips entry count and per-word variant order."""
    lines = []
    for word in lexicon.entries:
        for i, pron in enumerate(lexicon.entries[word]):
            head = word if i == 0 else f"{word}({i})"
            lines.append(f"{head}  {' '.join(pron.phonemes)}")
    return "\n".join(lines) + "\n"


_VOWEL_LETTERS = frozenset("aeiouy")


def _grapheme_syllables(word: str) -> int:
    # Fallback heuristic: count maximal vowel-letter runs (aeiouy), drop one
    # for a terminal silent "e" unless that empties the count, floor at 1.
    w = word.lower()
    groups = len(re.findall(r"[aeiouy]+", w))
    if w.endswith("e") and groups > 1:
        groups -= 1
    return max(groups, 1)


def syllable_count(
    lexicon: PhoneticLexicon, word: str, fallback: bool = False
) -> int | None:
    """Syllables of the first pronunciation (= its stress-bearing phonemes).

    Out-of-lexicon words get the grapheme heuristic when ``fallback`` is on,
    otherwise ``None``.
    """
    pron = lexicon.first(word)
    if pron is not None:
        return len(pron.stress_digits())
    if fallback:
        return _grapheme_syllables(word)
    return None


def stress_pattern(lexicon: PhoneticLexicon, word: str) -> str | None:
    """Stress digits of the first pronunciation's vowels, in order."""
    pron = lexicon.first(word)
    if pron is None:
        return None
    return pron.stress_digits()


def rhyme_key_of(pron: Pronunciation) -> tuple[str, ...] | None:
    """Suffix from the last primary-stressed vowel onward; if no primary
    stress exists, from the last vowel of any stress; None without vowels."""
    last_primary = None
    last_vowel = None
    for i, p in enumerate(pron.phonemes):
        if is_vowel(p):
            last_vowel = i
            if p[-1] == "1":
                last_primary = i
    anchor = last_primary if last_primary is not None else last_vowel
    if anchor is None:
        return None
    return pron.phonemes[anchor:]


def rhyme_key(lexicon: PhoneticLexicon, word: str) -> tuple[str, ...] | None:
    pron = lexicon.first(word)
    if pron is None:
        return None
    return rhyme_key_of(pron)


def rhyme_keys_all_variants(
    lexicon: PhoneticLexicon, word: str
) -> list[tuple[str, ...]]:
    """Rhyme keys across every pronunciation variant (duplicates removed,
    order preserved). Used by the filter engine's match-any-variant mode."""
    keys: list[tuple[str, ...]] = []
    for pron in lexicon.pronunciations(word):
        key = rhyme_key_of(pron)
        if key is not None and key not in keys:
            keys.append(key)
    return keys
