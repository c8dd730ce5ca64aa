"""The constrained decoding loop.

Each step masks the model's distribution with the composite filter's
allowed set and renormalizes over the survivors, which preserves their
relative probabilities exactly; sampling strategies then act on the
renormalized distribution. Humans can accept any listed token, or force
one past the filters (recorded as forced, never silently legalized).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import TokenCatalog
from .errors import DeadEnd, TokenNotAllowed
from .filters import (
    EMPTY_CONTEXT,
    CompositeFilter,
    FilterSpec,
    GenerationContext,
    WordStartOnly,
    compose,
)


@dataclass(frozen=True)
class SamplingParams:
    """Decoding strategy applied after masking and renormalization."""

    strategy: str = "greedy"  # greedy | temperature | top_k | top_p
    temperature: float = 1.0
    k: int = 1
    p: float = 1.0

    def __post_init__(self):
        if self.strategy not in ("greedy", "temperature", "top_k", "top_p"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "temperature" and not self.temperature > 0:
            raise ValueError("temperature must be > 0")
        if self.strategy == "top_k" and self.k < 1:
            raise ValueError("top_k needs k >= 1")
        if self.strategy == "top_p" and not 0 < self.p <= 1:
            raise ValueError("top_p needs p in (0, 1]")

    @classmethod
    def greedy(cls) -> "SamplingParams":
        return cls("greedy")

    @classmethod
    def with_temperature(cls, t: float) -> "SamplingParams":
        return cls("temperature", temperature=t)

    @classmethod
    def top_k(cls, k: int) -> "SamplingParams":
        return cls("top_k", k=k)

    @classmethod
    def top_p(cls, p: float) -> "SamplingParams":
        return cls("top_p", p=p)

    @classmethod
    def parse(cls, text: str) -> "SamplingParams":
        """Parse the CLI form: greedy | temp:T | topk:K | topp:P."""
        name, _, arg = text.partition(":")
        try:
            if name == "greedy" and not arg:
                return cls.greedy()
            if name == "temp":
                return cls.with_temperature(float(arg))
            if name == "topk":
                return cls.top_k(int(arg))
            if name == "topp":
                return cls.top_p(float(arg))
        except ValueError as e:
            raise ValueError(f"bad sampling spec {text!r}: {e}") from None
        raise ValueError(f"bad sampling spec {text!r}")

    def spec_string(self) -> str:
        if self.strategy == "greedy":
            return "greedy"
        if self.strategy == "temperature":
            return f"temp:{self.temperature!r}"
        if self.strategy == "top_k":
            return f"topk:{self.k}"
        return f"topp:{self.p!r}"


@dataclass(frozen=True)
class RejectedToken:
    """Why a high-probability token was filtered out, for diagnostics."""

    token_id: int
    surface: str
    probability: float
    rejected_by: str


@dataclass(frozen=True)
class StepResult:
    chosen: int
    renormalized_prob: float
    alternatives: tuple[tuple[int, float], ...]
    allowed_count: int


@dataclass
class StepRecord:
    token_id: int
    forced: bool
    generated: bool
    rng_state: dict
    renormalized_prob: float | None
    allowed_count: int


class Session:
    """Single-writer generation state: context, filters, history, RNG.

    Every machine-generated token passed the composite filter active at
    its step; user-forced tokens are flagged in the history. Undo restores
    both the context and the RNG state, so replays are deterministic.
    """

    def __init__(
        self,
        catalog: TokenCatalog,
        model,
        filters: list[FilterSpec] | None = None,
        sampling: SamplingParams | None = None,
        seed: int = 0,
        alternatives: int = 10,
        context: GenerationContext = EMPTY_CONTEXT,
    ):
        self.catalog = catalog
        self.model = model
        self.sampling = sampling or SamplingParams.greedy()
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.context: list[int] = []
        self.history: list[StepRecord] = []
        self.alternatives_requested = alternatives
        self.generation_context = context
        self.composite: CompositeFilter = self._compose(filters or [])

    def _compose(self, specs: list[FilterSpec]) -> CompositeFilter:
        # Subword catalogs get an implicit word-start restriction whenever
        # any filter is active: letter/phonetic tests on word fragments
        # would silently under-constrain assembled words.
        specs = list(specs)
        if (
            specs
            and self.catalog.scheme.subword
            and not any(isinstance(s, WordStartOnly) for s in specs)
        ):
            specs = [WordStartOnly()] + specs
        return compose(specs, self.catalog)

    def set_filters(self, specs: list[FilterSpec]) -> None:
        """Swap the filter set; takes effect from the next step, past
        context is left as it was produced."""
        self.composite = self._compose(specs)

    def filter_items(self) -> list[str]:
        return self.composite.items()

    def allowed_mask(self, extra_banned: set[int] | None = None) -> np.ndarray:
        mask = self.composite.allowed(self.generation_context).mask
        if extra_banned:
            mask = mask.copy()
            mask[list(extra_banned)] = False
        return mask

    def _dead_end(self, probs: np.ndarray, partial=None) -> DeadEnd:
        top = np.argsort(-probs, kind="stable")[:10]
        diags = [
            RejectedToken(
                int(i),
                self.catalog.tokens[int(i)],
                float(probs[int(i)]),
                self.composite.first_rejecting(int(i), self.generation_context)
                or "position_ban",
            )
            for i in top
        ]
        return DeadEnd(diagnostics=diags, partial=partial)

    def _masked_probs(self, extra_banned: set[int] | None = None):
        dist = self.model.next_distribution(self.context)
        mask = self.allowed_mask(extra_banned)
        allowed_count = int(mask.sum())
        if allowed_count == 0:
            raise self._dead_end(dist.probs)
        survivors = np.where(mask, dist.probs, 0.0)
        total = survivors.sum()
        if total <= 0.0:
            # Allowed tokens exist but carry no probability mass; there is
            # nothing to renormalize, so treat it as a dead end too.
            raise self._dead_end(dist.probs)
        return survivors / total, mask, allowed_count

    def step(self, extra_banned: set[int] | None = None) -> StepResult:
        """One constrained decode step; appends the chosen token."""
        renorm, mask, allowed_count = self._masked_probs(extra_banned)
        rng_state = self.rng.bit_generator.state
        chosen = _choose(renorm, self.sampling, self.rng)
        alts = top_alternatives(renorm, mask, self.alternatives_requested)
        self.context.append(chosen)
        self.history.append(
            StepRecord(
                token_id=chosen,
                forced=False,
                generated=True,
                rng_state=rng_state,
                renormalized_prob=float(renorm[chosen]),
                allowed_count=allowed_count,
            )
        )
        return StepResult(
            chosen=chosen,
            renormalized_prob=float(renorm[chosen]),
            alternatives=tuple(alts),
            allowed_count=allowed_count,
        )

    def list_continuations(self, m: int) -> list[tuple[int, float]]:
        """Top-m surviving tokens with renormalized probabilities; the
        session is not mutated."""
        if m < 1:
            raise ValueError("m must be >= 1")
        renorm, mask, _ = self._masked_probs()
        return top_alternatives(renorm, mask, m)

    def allowed_count(self) -> int:
        return self.composite.allowed(self.generation_context).cardinality

    def accept(self, token_id: int, user_forced: bool = False) -> "Session":
        """Append a chosen token; non-forced accepts must be allowed."""
        self.catalog.check_id(token_id)
        if not user_forced:
            mask = self.allowed_mask()
            if not mask[token_id]:
                raise TokenNotAllowed(token_id)
        self.context.append(int(token_id))
        self.history.append(
            StepRecord(
                token_id=int(token_id),
                forced=user_forced,
                generated=False,
                rng_state=self.rng.bit_generator.state,
                renormalized_prob=None,
                allowed_count=-1,
            )
        )
        return self

    def undo(self, steps: int = 1) -> "Session":
        from .errors import UndoPastBeginning

        if steps < 1:
            raise ValueError("steps must be >= 1")
        if steps > len(self.history):
            raise UndoPastBeginning(steps, len(self.history))
        for _ in range(steps):
            record = self.history.pop()
            self.context.pop()
            self.rng.bit_generator.state = record.rng_state
        return self

    def generate(self, n: int, backtrack_budget: int = 0) -> list[int]:
        """Run ``n`` constrained steps.

        On a dead end, while budget remains, the previous generated token
        is undone and banned at that position before retrying; otherwise
        the DeadEnd surfaces with the partial output attached.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        produced: list[int] = []
        banned_at: dict[int, set[int]] = {}
        budget = backtrack_budget
        while len(produced) < n:
            position = len(self.context)
            try:
                result = self.step(banned_at.get(position))
            except DeadEnd as e:
                if budget > 0 and produced:
                    budget -= 1
                    bad = produced.pop()
                    self.undo(1)
                    banned_at.setdefault(len(self.context), set()).add(bad)
                    continue
                raise DeadEnd(diagnostics=e.diagnostics, partial=produced) from None
            produced.append(result.chosen)
        return produced

    def rendered_context(self) -> str:
        return self.catalog.render(self.context)


def top_alternatives(
    renorm: np.ndarray, mask: np.ndarray, m: int
) -> list[tuple[int, float]]:
    """Top-m allowed tokens by probability, ties broken by id ascending.
    When m exceeds the allowed count, the whole allowed set is returned."""
    ids = np.flatnonzero(mask)
    order = ids[np.lexsort((ids, -renorm[ids]))]
    return [(int(i), float(renorm[i])) for i in order[:m]]


def _sample_from(probs: np.ndarray, ids: np.ndarray, rng: np.random.Generator) -> int:
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0  # guard against rounding at the top end
    u = rng.random()
    return int(ids[np.searchsorted(cdf, u, side="right")])


def _choose(renorm: np.ndarray, sampling: SamplingParams, rng: np.random.Generator) -> int:
    if sampling.strategy == "greedy":
        top = renorm.max()
        return int(np.flatnonzero(renorm == top)[0])

    ids = np.flatnonzero(renorm)
    probs = renorm[ids]

    if sampling.strategy == "temperature":
        if sampling.temperature != 1.0:
            probs = probs ** (1.0 / sampling.temperature)
        return _sample_from(probs / probs.sum(), ids, rng)

    # top_k / top_p shrink the candidate pool first (probability
    # descending, id ascending), then sample from the renormalized pool.
    order = np.lexsort((ids, -probs))
    ids, probs = ids[order], probs[order]
    if sampling.strategy == "top_k":
        keep = min(sampling.k, ids.size)
    else:
        keep = int(np.searchsorted(np.cumsum(probs), sampling.p, side="left")) + 1
        keep = min(keep, ids.size)
    ids, probs = ids[:keep], probs[:keep]
    return _sample_from(probs / probs.sum(), ids, rng)


def constrained_step(session: Session) -> StepResult:
    return session.step()


def list_continuations(session: Session, m: int) -> list[tuple[int, float]]:
    return session.list_continuations(m)


def accept_token(session: Session, token_id: int, user_forced: bool = False) -> Session:
    return session.accept(token_id, user_forced)


def generate(session: Session, n: int, backtrack_budget: int = 0) -> list[int]:
    return session.generate(n, backtrack_budget)
