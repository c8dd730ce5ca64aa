"""Corpus preparation and constraint verification.

Letter-omission texts are trivial to verify mechanically; the verifier
here is the ground truth the evaluation harness scores generations
against. Splits are contiguous blocks, never shuffled: constrained prose
carries its coherence in order, and an n-gram model trained on shuffled
sentences would measure nothing.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import SequenceTooShort


@dataclass(frozen=True)
class Violation:
    byte_offset: int
    word: str
    letter: str


def verify_lipogram(text: str, banned) -> list[Violation]:
    """Case-insensitive scan for banned letters; one violation per
    offending word occurrence, at its byte offset in UTF-8."""
    banned = {b.lower() for b in banned}
    violations: list[Violation] = []
    byte_offset = 0
    char_pos = 0
    for m in re.finditer(r"\S+", text):
        byte_offset += len(text[char_pos : m.start()].encode("utf-8"))
        char_pos = m.start()
        word = m.group()
        lowered = word.lower()
        for letter in lowered:
            if letter in banned:
                violations.append(Violation(byte_offset, word, letter))
                break
    return violations


def tokenize_words(text: str) -> list[str]:
    """Whitespace split, edge punctuation peeled into its own tokens,
    internal apostrophes/hyphens kept, lowercased.

    The word core runs from a chunk's first alphanumeric character to its
    last, so edge apostrophes/hyphens count as punctuation while internal
    ones survive ("don't", "e-mail").
    """
    tokens: list[str] = []
    for chunk in text.split():
        start, end = 0, len(chunk)
        while start < end and not chunk[start].isalnum():
            start += 1
        while end > start and not chunk[end - 1].isalnum():
            end -= 1
        for c in chunk[:start]:
            tokens.append(c)
        core = chunk[start:end]
        if core:
            tokens.append(
                "".join(chr(ord(c) + 32) if "A" <= c <= "Z" else c for c in core)
            )
        for c in chunk[end:]:
            tokens.append(c)
    return tokens


@dataclass(frozen=True)
class CorpusSplit:
    train: tuple[int, ...]
    test: tuple[int, ...]
    seed: int
    ratio: float
    train_first: bool

    def in_block_order(self) -> tuple[int, ...]:
        if self.train_first:
            return self.train + self.test
        return self.test + self.train


def split_corpus(tokens, ratio: float, seed: int = 0) -> CorpusSplit:
    """Contiguous split at floor(ratio * length); the seed decides whether
    the first block is the train or the test side."""
    tokens = tuple(tokens)
    if len(tokens) < 2:
        raise SequenceTooShort("need at least 2 tokens to split")
    if not 0 < ratio < 1:
        raise ValueError("ratio must be in (0, 1)")
    cut = int(ratio * len(tokens))
    cut = min(max(cut, 1), len(tokens) - 1)
    train_first = bool(np.random.default_rng(seed).integers(0, 2))
    first, second = tokens[:cut], tokens[cut:]
    if train_first:
        return CorpusSplit(first, second, seed, ratio, True)
    return CorpusSplit(second, first, seed, ratio, False)


def read_manifest(path) -> list[Path]:
    """Member files of a corpus, one path per line, resolved relative to
    the manifest; ``#`` comments and blank lines are skipped."""
    path = Path(path)
    members = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        members.append((path.parent / line).resolve())
    return members


def load_corpus_text(path) -> str:
    """A corpus file is either plain text or a ``.manifest`` listing."""
    path = Path(path)
    if path.suffix == ".manifest":
        parts = [p.read_text(encoding="utf-8") for p in read_manifest(path)]
        return "\n".join(parts)
    return path.read_text(encoding="utf-8")


def checksum_tokens(tokens) -> str:
    h = hashlib.sha256()
    for t in tokens:
        h.update(str(int(t)).encode())
        h.update(b",")
    return h.hexdigest()


def bundled_lipogram_text() -> str:
    """A short original passage written without the letter "e", shipped
    for tests and demos (the well-known book-length lipograms are under
    copyright; point the tools at your own files for real corpora)."""
    return (
        resources.files("ctgs.data").joinpath("lipogram_sample.txt").read_text("utf-8")
    )


def bundled_english_text() -> str:
    """A small bank of ordinary English sentences for training demos."""
    return (
        resources.files("ctgs.data").joinpath("english_sample.txt").read_text("utf-8")
    )


def synthetic_english_tokens(min_tokens: int) -> list[str]:
    """Cycle the bundled sentence bank until at least ``min_tokens``
    word tokens accumulate. Deterministic."""
    bank = tokenize_words(bundled_english_text())
    if not bank:
        raise SequenceTooShort("bundled sentence bank is empty")
    reps = -(-min_tokens // len(bank))
    return bank * reps
