"""Corpus statistics and report rendering.

The report path writes tab-separated summary files and, next to each label
histogram, a matplotlib bar chart rendered to PNG."""

import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .conll import Corpus
from .spans import bio_decode
from .tasks import TaskConfig, TaskSet, TaskType


@dataclass
class CorpusStats:
    utterances: int
    tokens: int


def corpus_stats(corpus: Corpus) -> CorpusStats:
    return CorpusStats(len(corpus), corpus.token_count())


def label_histogram(corpus: Corpus, task: TaskConfig) -> dict[str, int]:
    """Count label occurrences for one task: cell values for seq, decoded
    span types for seq_bio, metadata values for class.  seq2seq has no
    labels and yields an empty histogram."""
    counts: Counter[str] = Counter()
    if task.task_type is TaskType.SEQ:
        for utt in corpus:
            for token in utt.tokens:
                value = token.get(task.output_index)
                if value:
                    counts[value] += 1
    elif task.task_type is TaskType.SEQ_BIO:
        for utt in corpus:
            tags = [t.get(task.output_index) or "" for t in utt.tokens]
            for span in bio_decode(tags):
                counts[span.label] += 1
    elif task.task_type is TaskType.CLASS:
        for utt in corpus:
            value = utt.get_metadata(task.title)
            if value:
                counts[value] += 1
    return dict(sorted(counts.items()))


def _slug(title: str) -> str:
    slug = re.sub(r"[^A-Za-z0-9_-]+", "_", title).strip("_")
    return slug or "task"


def write_report(corpus: Corpus, tasks: TaskSet, outdir: Path) -> list[Path]:
    """Write stats.tsv plus, per task, a label-count TSV and a bar-chart PNG.

    Returns the written paths.  matplotlib is imported lazily so that plain
    CLI runs never pay for it.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    stats = corpus_stats(corpus)
    stats_path = outdir / "stats.tsv"
    stats_path.write_text(
        f"utterances\t{stats.utterances}\ntokens\t{stats.tokens}\n", encoding="utf-8"
    )
    written.append(stats_path)

    for task in tasks:
        if task.task_type is TaskType.SEQ2SEQ:
            continue
        histogram = label_histogram(corpus, task)
        slug = _slug(task.title)
        tsv_path = outdir / f"labels_{slug}.tsv"
        tsv_path.write_text(
            "".join(f"{label}\t{count}\n" for label, count in histogram.items()),
            encoding="utf-8",
        )
        written.append(tsv_path)

        fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * len(histogram) + 2), 3.5))
        if histogram:
            ax.bar(list(histogram.keys()), list(histogram.values()), color="#4878a8")
        ax.set_title(f"{task.title} ({task.task_type.value})")
        ax.set_ylabel("count")
        ax.tick_params(axis="x", rotation=45)
        fig.tight_layout()
        png_path = outdir / f"labels_{slug}.png"
        fig.savefig(png_path, dpi=120)
        plt.close(fig)
        written.append(png_path)

    return written
