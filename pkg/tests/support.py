"""Shared fixtures and generators for the test suite."""

import random
from pathlib import Path

from annotab import Corpus, Token, Utterance, parse_config, parse_corpus

DATA_DIR = Path(__file__).parent / "data"
SAMPLE_CONLL = DATA_DIR / "sample.conll"
SAMPLE_TASKS = DATA_DIR / "sample_tasks.json"


def sample_text() -> str:
    return SAMPLE_CONLL.read_text(encoding="utf-8")


def sample_corpus() -> Corpus:
    return parse_corpus(sample_text())


def sample_taskset():
    return parse_config(SAMPLE_TASKS.read_text(encoding="utf-8"))


_WORDS = [
    "What",
    "?",
    "Eevee",
    "is",
    "evolving",
    "!",
    "Smell",
    "ya",
    "later",
    "über",
    "nope",
    "x1",
]


def random_bio_corpus(
    rng: random.Random,
    n_utterances: int,
    types: tuple[str, ...] = ("PER", "LOC"),
    max_tokens: int = 8,
) -> Corpus:
    """Corpus with form in column 1 and a well-formed BIO column 2."""
    utterances = []
    for _ in range(n_utterances):
        n = rng.randint(1, max_tokens)
        tags = random_bio_tags(rng, n, types)
        tokens = [Token([rng.choice(_WORDS), tag]) for tag in tags]
        utterances.append(Utterance(tokens=tokens))
    return Corpus(utterances)


def random_bio_tags(rng: random.Random, n: int, types: tuple[str, ...]) -> list[str]:
    """A well-formed BIO tag sequence of length n."""
    tags = []
    open_type = None
    for _ in range(n):
        roll = rng.random()
        if open_type is not None and roll < 0.4:
            tags.append(f"I-{open_type}")
            continue
        if roll < 0.6:
            open_type = rng.choice(types)
            tags.append(f"B-{open_type}")
        else:
            open_type = None
            tags.append("O")
    return tags
