"""Command line for the constrained generation studio.

One command per invocation. The shared flags (--model, --lexicon,
--filter, --seed, ...) may be given before the command or after it; the
command-level value wins, then the group-level one, then --config, then
the built-in default. All randomness flows from --seed; leaving it unset
means seed 0, never wall-clock entropy.

Exit status: 0 success, 1 domain error (dead end, violations found,
bad resources), 2 usage error.
"""

from __future__ import annotations

import functools
import json
import sys
from importlib import resources as importlib_resources
from pathlib import Path

import click

from . import corpus as corpus_tools
from .catalog import EmbeddingTable, build_catalog
from .decoding import SamplingParams, Session
from .errors import CtgsError, DeadEnd
from .evaluation import run_experiment
from .filters import compose, parse_filters
from .metaphone import double_metaphone
from .models import load_model, save_model, train_ngram, uniform_model
from .phonetics import (
    load_cmudict,
    parse_cmudict,
    rhyme_key,
    stress_pattern,
    syllable_count,
)

_SHARED = [
    ("model", dict(type=str, help="Trained model file (JSON).")),
    ("lexicon", dict(type=str, help="Pronouncing dictionary path, or 'builtin'.")),
    ("embeddings", dict(type=str, help="Embedding table path.")),
    ("filter", dict(multiple=True, help="Filter item, repeatable.")),
    ("n", dict(type=int, help="Token count for generation.")),
    ("seed", dict(type=int, help="RNG seed (default 0).")),
    ("strategy", dict(type=str, help="greedy | temp:T | topk:K | topp:P.")),
    ("backtrack", dict(type=int, help="Dead-end backtrack budget.")),
    ("out", dict(type=str, help="Output path (default stdout).")),
]

_DEFAULTS = {
    "model": None,
    "lexicon": None,
    "embeddings": None,
    "filter": (),
    "n": 50,
    "seed": 0,
    "strategy": "greedy",
    "backtrack": 0,
    "out": None,
}


def _shared_options(fn):
    for name, kw in reversed(_SHARED):
        fn = click.option(f"--{name}", default=None, **kw)(fn)
    return fn


def _resolve(ctx, **command_values):
    """command flag > group flag > config file > default."""
    merged = dict(_DEFAULTS)
    merged.update({k: v for k, v in ctx.obj["config"].items() if k in merged})
    for source in (ctx.obj["group"], command_values):
        for key, value in source.items():
            if value is None or (key == "filter" and value == ()):
                continue
            merged[key] = value
    return merged


@click.group()
@_shared_options
@click.option("--config", default=None, type=str, help="JSON config with the same keys as the flags.")
@click.pass_context
def main(ctx, config, **group_values):
    """Constrained text generation studio."""
    cfg = {}
    if config:
        try:
            cfg = json.loads(Path(config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise click.UsageError(f"cannot read config {config}: {e}")
        if "filter" in cfg and isinstance(cfg["filter"], list):
            cfg["filter"] = tuple(cfg["filter"])
    ctx.obj = {"group": group_values, "config": cfg}


def _load_lexicon(spec: str | None):
    if spec is None or spec == "builtin":
        text = (
            importlib_resources.files("ctgs.data")
            .joinpath("lexicon_sample.dict")
            .read_text("latin-1")
        )
        return parse_cmudict(text.splitlines())
    return load_cmudict(spec)


def _load_embeddings(spec: str | None):
    return EmbeddingTable.load(spec) if spec else None


def _write_out(out: str | None, text: str) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _fail(message: str, details: dict | None = None) -> None:
    click.echo(f"error: {message}", err=True)
    if details:
        click.echo(json.dumps(details, indent=2, default=str), err=True)
    sys.exit(1)


def _domain(fn):
    """Map engine errors to exit status 1 with structured diagnostics."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DeadEnd as e:
            _fail("dead end: every token is filtered out", e.details())
        except CtgsError as e:
            _fail(str(e), e.details() or None)

    return wrapper


def _read_corpus_tokens(paths) -> list[str]:
    tokens: list[str] = []
    for p in paths:
        tokens.extend(corpus_tools.tokenize_words(corpus_tools.load_corpus_text(p)))
    return tokens


def _load_session_parts(opts, require_model=True):
    lexicon = _load_lexicon(opts["lexicon"]) if opts["lexicon"] else None
    embeddings = _load_embeddings(opts["embeddings"])
    if opts["model"]:
        model = load_model(opts["model"], lexicon=lexicon, embeddings=embeddings)
    elif require_model:
        raise click.UsageError("--model is required for this command")
    else:
        model = None
    return model, lexicon, embeddings


@main.command()
@_shared_options
@click.option("--order", default=3, show_default=True, help="N-gram order.")
@click.option("--k", default=0.1, show_default=True, help="Add-k smoothing constant.")
@click.argument("corpus", nargs=-1, required=True, type=click.Path(exists=True))
@click.pass_context
@_domain
def train(ctx, order, k, corpus, **cmd):
    """Train the built-in n-gram model on text files."""
    opts = _resolve(ctx, **cmd)
    if not opts["out"]:
        raise click.UsageError("train needs --out for the model file")
    words = _read_corpus_tokens(corpus)
    vocabulary = list(dict.fromkeys(words))
    lexicon = _load_lexicon(opts["lexicon"]) if opts["lexicon"] else None
    catalog = build_catalog(
        vocabulary,
        lexicon=lexicon,
        embeddings=_load_embeddings(opts["embeddings"]),
        reserve_unknown=True,
    )
    model = train_ngram(catalog.encode(words), catalog, order, k)
    save_model(model, opts["out"])
    click.echo(
        f"trained order-{order} model: {len(words)} tokens, "
        f"vocabulary {catalog.size}, saved to {opts['out']}"
    )


@main.command()
@_shared_options
@click.pass_context
@_domain
def generate(ctx, **cmd):
    """Generate tokens under the active filters."""
    opts = _resolve(ctx, **cmd)
    model, _, _ = _load_session_parts(opts)
    session = Session(
        model.catalog,
        model,
        filters=parse_filters(opts["filter"]),
        sampling=SamplingParams.parse(opts["strategy"]),
        seed=opts["seed"],
    )
    ids = session.generate(opts["n"], opts["backtrack"])
    _write_out(opts["out"], model.catalog.render(ids) + "\n")


@main.command()
@_shared_options
@click.option("--show", default=10, show_default=True, help="Continuations listed per step.")
@click.pass_context
@_domain
def complete(ctx, show, **cmd):
    """Interactively pick continuations token by token."""
    opts = _resolve(ctx, **cmd)
    model, _, _ = _load_session_parts(opts)
    session = Session(
        model.catalog,
        model,
        filters=parse_filters(opts["filter"]),
        sampling=SamplingParams.parse(opts["strategy"]),
        seed=opts["seed"],
    )
    click.echo("commands: <number> pick, w <word> force, u undo, g <n> generate, q quit")
    while True:
        click.echo(f"\ntext: {session.rendered_context() or '(empty)'}")
        try:
            ranked = session.list_continuations(show)
        except DeadEnd as e:
            click.echo("dead end; rejecting filters for the top tokens:")
            for d in e.diagnostics:
                click.echo(f"  {d.surface!r} p={d.probability:.4f} <- {d.rejected_by}")
            ranked = []
        for i, (tok, p) in enumerate(ranked):
            click.echo(f"  [{i}] {model.catalog.tokens[tok]}  ({p:.4f})")
        line = click.prompt("pick", default="q", show_default=False).strip()
        if not line or line == "q":
            break
        try:
            if line.startswith("w "):
                word = line[2:].strip()
                token_id = model.catalog.id_of(word)
                if token_id is None:
                    click.echo(f"{word!r} is not in the vocabulary")
                    continue
                session.accept(token_id, user_forced=True)
            elif line == "u":
                session.undo(1)
            elif line.startswith("g "):
                session.generate(int(line[2:]), opts["backtrack"])
            else:
                session.accept(ranked[int(line)][0])
        except (ValueError, IndexError):
            click.echo("unrecognized choice")
        except CtgsError as e:
            click.echo(f"error: {e}")
    if opts["out"]:
        _write_out(opts["out"], session.rendered_context() + "\n")


@main.command()
@_shared_options
@click.argument("word")
@click.pass_context
@_domain
def analyze(ctx, word, **cmd):
    """Phonetic report for one word."""
    opts = _resolve(ctx, **cmd)
    lexicon = _load_lexicon(opts["lexicon"])
    syllables = syllable_count(lexicon, word)
    stress = stress_pattern(lexicon, word)
    key = rhyme_key(lexicon, word)
    code = double_metaphone(word)
    click.echo(f"word={word}")
    click.echo(f"syllables={syllables if syllables is not None else '-'}")
    click.echo(f"stress={stress if stress is not None else '-'}")
    click.echo(f"rhyme_key={' '.join(key) if key else '-'}")
    click.echo(f"metaphone={code.primary}/{code.alternate}")


@main.command()
@_shared_options
@click.option("--ban", required=True, help="Letters that must not appear.")
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True))
@click.pass_context
def verify(ctx, ban, files, **cmd):
    """Check text files against a letter ban; exit 1 on violations."""
    banned = set(ban.lower())
    total = 0
    for path in files:
        text = corpus_tools.load_corpus_text(path)
        violations = corpus_tools.verify_lipogram(text, banned)
        total += len(violations)
        click.echo(f"{path}: {len(violations)} violations")
        for v in violations[:20]:
            click.echo(f"  byte {v.byte_offset}: {v.word!r} contains {v.letter!r}")
        if len(violations) > 20:
            click.echo(f"  ... and {len(violations) - 20} more")
    click.echo(f"{total} violations")
    if total:
        sys.exit(1)


@main.command(name="eval")
@_shared_options
@click.option("--order", default=3, show_default=True)
@click.option("--k", default=0.1, show_default=True)
@click.option("--ratio", default=0.9, show_default=True, help="Train share of the split.")
@click.option("--test-corpus", default=None, type=click.Path(exists=True),
              help="Separate constraint-compliant test text (otherwise split CORPUS).")
@click.option("--gen-tokens", default=2000, show_default=True)
@click.argument("corpus", nargs=-1, required=True, type=click.Path(exists=True))
@click.pass_context
@_domain
def eval_cmd(ctx, order, k, ratio, test_corpus, gen_tokens, corpus, **cmd):
    """Perplexity and ignored-constraint error, with and without the mask."""
    opts = _resolve(ctx, **cmd)
    words = _read_corpus_tokens(corpus)
    if test_corpus:
        test_words = corpus_tools.tokenize_words(
            corpus_tools.load_corpus_text(test_corpus)
        )
        train_words = words
    else:
        split_words = corpus_tools.split_corpus(words, ratio, opts["seed"])
        train_words, test_words = list(split_words.train), list(split_words.test)
    vocabulary = list(dict.fromkeys(train_words + test_words))
    catalog = build_catalog(
        vocabulary,
        lexicon=_load_lexicon(opts["lexicon"]) if opts["lexicon"] else None,
        embeddings=_load_embeddings(opts["embeddings"]),
        reserve_unknown=True,
    )
    composite = compose(parse_filters(opts["filter"]), catalog)
    model = train_ngram(catalog.encode(train_words), catalog, order, k)
    split = corpus_tools.CorpusSplit(
        tuple(catalog.encode(train_words)),
        tuple(catalog.encode(test_words)),
        opts["seed"],
        ratio,
        True,
    )
    report = run_experiment(
        {f"ngram{order}": model},
        composite,
        split,
        seed=opts["seed"],
        generate_tokens=gen_tokens,
        backtrack_budget=opts["backtrack"],
    )
    _write_out(opts["out"], report.to_tsv())


@main.command()
@_shared_options
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.pass_context
@_domain
def serve(ctx, host, port, **cmd):
    """Serve the studio HTTP API over the trained model."""
    import uvicorn

    from .service import ModelRegistry, create_app

    opts = _resolve(ctx, **cmd)
    model, _, _ = _load_session_parts(opts)
    registry = ModelRegistry()
    registry.register(Path(opts["model"]).stem, model)
    registry.register("uniform", uniform_model(model.catalog))
    uvicorn.run(create_app(registry), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
