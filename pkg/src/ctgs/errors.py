"""Exception hierarchy shared across the engine.

Every error carries a stable machine-readable ``code`` so the HTTP service
and CLI can surface structured diagnostics without string matching.
"""

from __future__ import annotations


class CtgsError(Exception):
    code = "error"

    def details(self) -> dict:
        return {}


class DuplicateToken(CtgsError):
    code = "duplicate_token"

    def __init__(self, surface: str):
        super().__init__(f"duplicate token surface: {surface!r}")
        self.surface = surface

    def details(self) -> dict:
        return {"surface": self.surface}


class EmptyVocabulary(CtgsError):
    code = "empty_vocabulary"


class IdOutOfRange(CtgsError):
    code = "id_out_of_range"

    def __init__(self, token_id: int, size: int):
        super().__init__(f"token id {token_id} outside 0..{size - 1}")
        self.token_id = token_id
        self.size = size

    def details(self) -> dict:
        return {"token_id": self.token_id, "size": self.size}


class EmptyLexicon(CtgsError):
    code = "empty_lexicon"


class InvalidFilterParam(CtgsError, ValueError):
    code = "invalid_filter_param"


class FilterParseError(CtgsError):
    code = "filter_parse_error"

    def __init__(self, item: str, reason: str):
        super().__init__(f"bad filter item {item!r}: {reason}")
        self.item = item
        self.reason = reason

    def details(self) -> dict:
        return {"item": self.item, "reason": self.reason}


class MissingResource(CtgsError):
    code = "missing_resource"

    def __init__(self, spec, resource: str):
        super().__init__(
            f"filter {spec!r} needs {resource}, but the catalog was built without it"
        )
        self.spec = spec
        self.resource = resource

    def details(self) -> dict:
        return {"spec": str(self.spec), "resource": self.resource}


class CorpusTooShort(CtgsError):
    code = "corpus_too_short"


class InvalidSmoothing(CtgsError):
    code = "invalid_smoothing"


class ProviderUnreachable(CtgsError):
    code = "provider_unreachable"


class CatalogMismatch(CtgsError):
    code = "catalog_mismatch"


class MalformedDistribution(CtgsError):
    code = "malformed_distribution"


class DeadEnd(CtgsError):
    """Every token in the vocabulary is banned at the current step.

    ``diagnostics`` lists, for each of the highest-probability unfiltered
    tokens, the first filter that rejected it. ``partial`` holds whatever
    token ids a multi-token generation produced before stalling.
    """

    code = "dead_end"

    def __init__(self, diagnostics=None, partial=None):
        super().__init__("no token passes the active filters")
        self.allowed_count = 0
        self.diagnostics = list(diagnostics or [])
        self.partial = list(partial or [])

    def details(self) -> dict:
        return {
            "allowed_count": 0,
            "diagnostics": [
                {
                    "token_id": d.token_id,
                    "surface": d.surface,
                    "probability": d.probability,
                    "rejected_by": d.rejected_by,
                }
                for d in self.diagnostics
            ],
            "partial": self.partial,
        }


class UnknownToken(CtgsError):
    code = "unknown_token"

    def __init__(self, surface: str):
        super().__init__(f"token {surface!r} is not in the vocabulary")
        self.surface = surface

    def details(self) -> dict:
        return {"surface": self.surface}


class TokenNotAllowed(CtgsError):
    code = "token_not_allowed"

    def __init__(self, token_id: int):
        super().__init__(f"token {token_id} is banned by the active filters")
        self.token_id = token_id

    def details(self) -> dict:
        return {"token_id": self.token_id}


class MaskedTruthToken(CtgsError):
    code = "masked_truth_token"

    def __init__(self, position: int, token_id: int):
        super().__init__(
            f"reference token at position {position} is banned by the filter; "
            "perplexity is undefined"
        )
        self.position = position
        self.token_id = token_id

    def details(self) -> dict:
        return {"position": self.position, "token_id": self.token_id}


class EmptyText(CtgsError):
    code = "empty_text"


class SequenceTooShort(CtgsError):
    code = "sequence_too_short"


class UnknownModel(CtgsError):
    code = "unknown_model"

    def __init__(self, label: str):
        super().__init__(f"no model registered under {label!r}")
        self.label = label


class UnknownSession(CtgsError):
    code = "unknown_session"

    def __init__(self, session_id: str):
        super().__init__(f"no session {session_id!r}")
        self.session_id = session_id


class UndoPastBeginning(CtgsError):
    code = "undo_past_beginning"

    def __init__(self, requested: int, available: int):
        super().__init__(f"cannot undo {requested} steps; only {available} recorded")
        self.requested = requested
        self.available = available

    def details(self) -> dict:
        return {"requested": self.requested, "available": self.available}
