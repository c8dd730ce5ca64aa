"""Next-token probability sources over a token catalog.

The built-in model is a word-level n-gram with add-k smoothing and
longest-observed-suffix backoff: the probability vector always covers the
whole catalog and every token gets strictly positive mass, so a filter
mask is the only thing that can zero a token out.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .catalog import TokenCatalog, TokenizationScheme, build_catalog
from .errors import CorpusTooShort, InvalidSmoothing

_SUM_TOL = 1e-9


class Distribution:
    """Dense probability vector indexed by token id; sums to 1."""

    def __init__(self, probs: np.ndarray, validate: bool = True):
        probs = np.asarray(probs, dtype=np.float64)
        if validate:
            if probs.ndim != 1:
                raise ValueError("distribution must be a vector")
            if (probs < 0).any():
                raise ValueError("negative probability")
            total = float(probs.sum())
            if abs(total - 1.0) > _SUM_TOL:
                raise ValueError(f"probabilities sum to {total}, not 1")
        self.probs = probs

    def __len__(self) -> int:
        return len(self.probs)

    def log(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.probs)

    @classmethod
    def from_unnormalized(cls, weights: np.ndarray) -> "Distribution":
        weights = np.asarray(weights, dtype=np.float64)
        total = weights.sum()
        if total <= 0:
            raise ValueError("cannot normalize non-positive weights")
        return cls(weights / total, validate=False)

    @classmethod
    def uniform(cls, size: int) -> "Distribution":
        return cls(np.full(size, 1.0 / size), validate=False)


class NGramModel:
    """Add-k n-gram counts over a catalog, with suffix backoff.

    ``counts`` maps a context tuple (0 to order-1 token ids) to successor
    counts; prediction uses the longest context suffix that was observed
    at training time and falls back to shorter ones, ending at the
    unigram (or uniform for an untrained model).
    """

    def __init__(self, order: int, k: float, catalog: TokenCatalog, counts=None):
        if order < 1:
            raise ValueError("order must be >= 1")
        if not k > 0:
            raise InvalidSmoothing(f"add-k constant must be > 0, got {k}")
        self.order = order
        self.k = float(k)
        self.catalog = catalog
        self.counts: dict[tuple[int, ...], dict[int, int]] = counts or {}
        self.context_totals = {
            ctx: sum(succ.values()) for ctx, succ in self.counts.items()
        }

    def next_distribution(self, context) -> Distribution:
        """P(token | context) over the whole catalog."""
        v = self.catalog.size
        seq = list(context)
        ctx = tuple(int(t) for t in seq[max(0, len(seq) - (self.order - 1)) :])
        while True:
            succ = self.counts.get(ctx)
            if succ is not None:
                total = self.context_totals[ctx]
                probs = np.full(v, self.k, dtype=np.float64)
                for tok, c in succ.items():
                    probs[tok] += c
                return Distribution(probs / (total + self.k * v), validate=False)
            if not ctx:
                return Distribution.uniform(v)
            ctx = ctx[1:]

    def description(self) -> str:
        return f"ngram(order={self.order}, k={self.k})"


def train_ngram(corpus, catalog: TokenCatalog, order: int, k: float) -> NGramModel:
    """Count every window of each order from 1 to ``order``.

    ``corpus`` is a token id sequence; ids must be valid for the catalog.
    """
    corpus = list(corpus)
    if order < 1:
        raise ValueError("order must be >= 1")
    if not k > 0:
        raise InvalidSmoothing(f"add-k constant must be > 0, got {k}")
    if len(corpus) < order:
        raise CorpusTooShort(
            f"corpus of {len(corpus)} tokens cannot fit an order-{order} window"
        )
    for t in corpus:
        catalog.check_id(t)
    counts: dict[tuple[int, ...], dict[int, int]] = {}
    for i, tok in enumerate(corpus):
        for length in range(min(order - 1, i) + 1):
            ctx = tuple(corpus[i - length : i])
            succ = counts.setdefault(ctx, {})
            succ[tok] = succ.get(tok, 0) + 1
    return NGramModel(order, k, catalog, counts)


def uniform_model(catalog: TokenCatalog) -> NGramModel:
    """Untrained baseline: every context yields the uniform distribution."""
    return NGramModel(1, 1.0, catalog, {})


MODEL_FORMAT = "ctgs-ngram"


def save_model(model: NGramModel, path) -> None:
    """Persist counts plus the catalog's tokens and scheme as JSON.

    Feature resources (lexicon, embeddings) are not embedded; they are
    re-supplied at load time so the catalog can be rebuilt.
    """
    scheme = model.catalog.scheme
    payload = {
        "format": MODEL_FORMAT,
        "version": 1,
        "order": model.order,
        "k": model.k,
        "scheme": {
            "kind": scheme.kind,
            "marker": scheme.marker,
            "specials": sorted(scheme.specials),
        },
        "tokens": list(model.catalog.tokens),
        "counts": [
            [list(ctx), sorted(succ.items())]
            for ctx, succ in sorted(model.counts.items())
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, separators=(",", ":"))


def load_model(path, lexicon=None, embeddings=None, syllable_fallback=False) -> NGramModel:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path} is not a {MODEL_FORMAT} file")
    scheme = TokenizationScheme(
        payload["scheme"]["kind"],
        payload["scheme"]["marker"],
        frozenset(payload["scheme"]["specials"]),
    )
    catalog = build_catalog(
        payload["tokens"],
        lexicon=lexicon,
        embeddings=embeddings,
        scheme=scheme,
        syllable_fallback=syllable_fallback,
    )
    counts = {
        tuple(ctx): {int(t): int(c) for t, c in succ}
        for ctx, succ in payload["counts"]
    }
    return NGramModel(payload["order"], payload["k"], catalog, counts)


@dataclass(frozen=True)
class ProviderHandle:
    """Where an external distribution provider lives, and the catalog
    checksum it must serve."""

    host: str
    port: int
    checksum: str
