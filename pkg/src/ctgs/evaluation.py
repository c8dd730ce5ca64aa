"""Perplexity and constraint-error measurement, with and without masking.

Masked perplexity uses the same renormalized distributions the decoder
samples from. Renormalizing over a set that still contains the reference
token can only raise that token's probability, so on constraint-compliant
text the masked perplexity is never worse than the raw one; the gap is
the probability mass the filter removed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import CorpusSplit, checksum_tokens
from .decoding import SamplingParams, Session
from .errors import EmptyText, MaskedTruthToken
from .filters import CompositeFilter


def perplexity(model, catalog, composite: CompositeFilter | None, text) -> float:
    """exp of the mean negative log-probability of each token given its
    preceding context; masked and renormalized when a filter is given.

    Raises :class:`MaskedTruthToken` if the filter bans a reference
    token: the metric is undefined when the truth itself is out of the
    allowed set.
    """
    text = [int(t) for t in text]
    if not text:
        raise EmptyText("perplexity needs at least one token")
    mask = composite.allowed().mask if composite is not None else None
    total = 0.0
    for pos, truth in enumerate(text):
        dist = model.next_distribution(text[:pos])
        probs = dist.probs
        if mask is not None:
            if not mask[truth]:
                raise MaskedTruthToken(pos, truth)
            survivors = np.where(mask, probs, 0.0)
            denom = survivors.sum()
            p = float(survivors[truth] / denom) if denom > 0 else 0.0
        else:
            p = float(probs[truth])
        if p <= 0.0:
            return math.inf
        total += -math.log(p)
    return math.exp(total / len(text))


def constraint_error_rate(tokens, composite: CompositeFilter, catalog=None) -> float:
    """Percentage of tokens the filter rejects; 0.0 for empty input."""
    tokens = list(tokens)
    if not tokens:
        return 0.0
    mask = composite.allowed().mask
    failures = sum(1 for t in tokens if not mask[int(t)])
    return 100.0 * failures / len(tokens)


@dataclass(frozen=True)
class EvalRow:
    label: str
    perplexity: float
    ignored_error_pct: float


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[EvalRow, ...]
    corpus_checksum: str
    model_description: str
    filter_description: str
    seed: int

    def to_tsv(self) -> str:
        lines = [
            f"# corpus_checksum: {self.corpus_checksum}",
            f"# models: {self.model_description}",
            f"# filter: {self.filter_description}",
            f"# seed: {self.seed}",
            "label\tperplexity\tignored_error_pct",
        ]
        for row in self.rows:
            lines.append(
                f"{row.label}\t{row.perplexity:.6f}\t{row.ignored_error_pct:.4f}"
            )
        return "\n".join(lines) + "\n"


def run_experiment(
    models: dict[str, object],
    composite: CompositeFilter,
    split: CorpusSplit,
    seed: int = 0,
    generate_tokens: int = 2000,
    sampling: SamplingParams | None = None,
    backtrack_budget: int = 0,
) -> EvalReport:
    """One report row per (model, with/without filter) cell.

    Each cell measures perplexity on the test split (masked for the
    filtered cells) and the constraint error rate of a fresh generation:
    filtered cells generate through the mask, unfiltered cells sample the
    raw model, and both generations are scored against the same filter.
    """
    if not split.test:
        raise EmptyText("empty test split")
    sampling = sampling or SamplingParams.with_temperature(1.0)
    catalog = composite.catalog
    rows = []
    for label in sorted(models):
        model = models[label]
        for filtered in (False, True):
            specs = list(composite.specs) if filtered else []
            session = Session(
                catalog, model, filters=specs, sampling=sampling, seed=seed
            )
            generated = session.generate(generate_tokens, backtrack_budget)
            rows.append(
                EvalRow(
                    label=f"{label}+filter" if filtered else label,
                    perplexity=perplexity(
                        model, catalog, composite if filtered else None, split.test
                    ),
                    ignored_error_pct=constraint_error_rate(generated, composite),
                )
            )
    return EvalReport(
        rows=tuple(rows),
        corpus_checksum=checksum_tokens(split.in_block_order()),
        model_description="; ".join(
            f"{label}={models[label].description()}" for label in sorted(models)
        ),
        filter_description=", ".join(composite.items()) or "(none)",
        seed=seed,
    )
