"""Constrained text generation studio.

Filter a language model's vocabulary with composable lexical, phonetic,
and semantic constraints before each token is sampled; surviving tokens
keep their relative probabilities. Includes a trainable word-level n-gram
model, an evaluation harness, an HTTP studio service, and a CLI.
"""

from .catalog import (
    EmbeddingTable,
    TokenCatalog,
    TokenFeatures,
    TokenizationScheme,
    WordBoundaryClass,
    build_catalog,
    classify_boundary,
    features_of,
    space_marker_prefix,
    suffix_marker,
    word_level,
)
from .decoding import (
    SamplingParams,
    Session,
    StepResult,
    accept_token,
    constrained_step,
    generate,
    list_continuations,
)
from .errors import CtgsError, DeadEnd, MissingResource, TokenNotAllowed
from .evaluation import EvalReport, constraint_error_rate, perplexity, run_experiment
from .filters import (
    PRESETS,
    AllowedSet,
    CompositeFilter,
    FilterSpec,
    GenerationContext,
    apply_to_catalog,
    compose,
    evaluate,
    parse_filter_item,
    parse_filters,
    serialize_filter,
)
from .metaphone import MetaphoneCode, double_metaphone
from .models import (
    Distribution,
    NGramModel,
    ProviderHandle,
    load_model,
    save_model,
    train_ngram,
    uniform_model,
)
from .phonetics import (
    PhoneticLexicon,
    Pronunciation,
    load_cmudict,
    parse_cmudict,
    rhyme_key,
    stress_pattern,
    syllable_count,
)

__version__ = "0.1.0"
