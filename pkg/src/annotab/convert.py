"""Format bridges: raw text and JSON-lines ingestion, character-offset
standoff conversion in both directions, and MaChAmp training-config export.

Tokenization here is whitespace-only; the corpus format assumes tokens are
already gold."""

import json
import re
from dataclasses import dataclass, field
from pathlib import PurePath

from .conll import Corpus, Token, Utterance
from .spans import Span, bio_decode, bio_encode, joined_offsets, snap_to_tokens
from .tasks import TaskConfig, TaskSet, TaskType

_TOKEN_RE = re.compile(r"\S+")


class ConversionError(ValueError):
    pass


@dataclass(frozen=True)
class CharSpan:
    """Half-open character interval with a label."""

    start: int
    end: int
    label: str


@dataclass
class StandoffDocument:
    """Raw text plus labeled character-offset spans (touching allowed,
    overlap not)."""

    text: str
    spans: list[CharSpan] = field(default_factory=list)

    def __post_init__(self):
        for span in self.spans:
            if not (0 <= span.start < span.end <= len(self.text)):
                raise ValueError(
                    f"span [{span.start}, {span.end}) out of range for text of "
                    f"length {len(self.text)}"
                )
        ordered = sorted(self.spans, key=lambda s: (s.start, s.end))
        for left, right in zip(ordered, ordered[1:]):
            if right.start < left.end:
                raise ValueError(
                    f"overlapping spans [{left.start}, {left.end}) and "
                    f"[{right.start}, {right.end})"
                )

    @classmethod
    def from_json(cls, text: str) -> "StandoffDocument":
        """Load the ``{"text": ..., "spans": [{"start", "end", "label"}]}`` shape."""
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConversionError(f"standoff document is not valid JSON: {exc}") from None
        if not isinstance(doc, dict) or not isinstance(doc.get("text"), str):
            raise ConversionError("standoff document needs a string 'text' field")
        spans = []
        for i, obj in enumerate(doc.get("spans", [])):
            try:
                spans.append(CharSpan(int(obj["start"]), int(obj["end"]), str(obj["label"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConversionError(f"span {i}: {exc}") from None
        try:
            return cls(doc["text"], spans)
        except ValueError as exc:
            raise ConversionError(str(exc)) from None

    def to_json(self) -> str:
        return json.dumps(
            {
                "text": self.text,
                "spans": [
                    {"start": s.start, "end": s.end, "label": s.label} for s in self.spans
                ],
            },
            indent=2,
            ensure_ascii=False,
        )


@dataclass
class FieldMapping:
    """Which record keys of a JSON-lines dataset hold the text and labels."""

    text_field: str
    label_field: str | None = None
    task_title: str = "label"

    def __post_init__(self):
        if not self.text_field:
            raise ValueError("text_field must be non-empty")


@dataclass
class SnapAdjustment:
    """One standoff span whose offsets had to be widened to token borders."""

    label: str
    original: tuple[int, int]
    snapped: tuple[int, int]

    def __str__(self):
        return (
            f"span {self.label!r} [{self.original[0]}, {self.original[1]}) snapped "
            f"to [{self.snapped[0]}, {self.snapped[1]})"
        )


@dataclass
class StandoffConversion:
    """Tokenized standoff document: token texts, aligned BIO tags, and a
    report of every span that was not already token-aligned."""

    tokens: list[str]
    tags: list[str]
    adjustments: list[SnapAdjustment]


def import_raw_text(text: str) -> Corpus:
    """Build a single-column corpus from plain text: blank lines separate
    utterances, any other whitespace separates tokens."""
    utterances = []
    block: list[str] = []

    def flush():
        tokens = " ".join(block).split()
        if tokens:
            try:
                utterances.append(Utterance(tokens=[Token([t]) for t in tokens]))
            except ValueError as exc:
                raise ConversionError(
                    f"utterance {len(utterances) + 1}: {exc}"
                ) from None
        block.clear()

    for line in text.split("\n"):
        if line.strip() == "":
            flush()
        else:
            block.append(line)
    flush()
    return Corpus(utterances)


def _scalar(value, what: str, record: int) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return str(value)
    raise ConversionError(f"record {record}: {what} must be a string or number, got {value!r}")


def import_jsonl(records: list[dict], mapping: FieldMapping) -> tuple[Corpus, TaskConfig]:
    """Convert flat records to a corpus plus the matching task.

    The text field may hold a string (whitespace-tokenized) or a token list.
    A scalar label field makes a class task stored as metadata; a per-token
    tag list makes a seq task filling column 2.  Token/tag length mismatches
    report the record index.
    """
    utterances: list[Utterance] = []
    seen_labels: set[str] = set()
    kind: str | None = None  # "class" or "seq", fixed by the first labeled record

    for index, record in enumerate(records):
        if not isinstance(record, dict):
            raise ConversionError(f"record {index}: expected an object")
        if mapping.text_field not in record:
            raise ConversionError(f"record {index}: missing field {mapping.text_field!r}")
        value = record[mapping.text_field]
        if isinstance(value, str):
            tokens = value.split()
        elif isinstance(value, list):
            tokens = [_scalar(v, "token", index) for v in value]
        else:
            raise ConversionError(
                f"record {index}: field {mapping.text_field!r} must be a string or token list"
            )

        tags: list[str] | None = None
        class_label: str | None = None
        if mapping.label_field is not None:
            if mapping.label_field not in record:
                raise ConversionError(f"record {index}: missing field {mapping.label_field!r}")
            label_value = record[mapping.label_field]
            if isinstance(label_value, list):
                if kind == "class":
                    raise ConversionError(
                        f"record {index}: tag list after scalar labels in earlier records"
                    )
                kind = "seq"
                tags = [_scalar(v, "tag", index) for v in label_value]
                if len(tags) != len(tokens):
                    raise ConversionError(
                        f"record {index}: {len(tokens)} token(s) but {len(tags)} tag(s)"
                    )
            else:
                if kind == "seq":
                    raise ConversionError(
                        f"record {index}: scalar label after tag lists in earlier records"
                    )
                kind = "class"
                class_label = _scalar(label_value, "label", index)

        try:
            if tags is not None:
                rows = [Token([tok, tag]) for tok, tag in zip(tokens, tags)]
            else:
                rows = [Token([tok]) for tok in tokens]
        except ValueError as exc:
            raise ConversionError(f"record {index}: {exc}") from None
        utt = Utterance(tokens=rows)
        if class_label is not None:
            utt.set_metadata(mapping.task_title, class_label)
            seen_labels.add(class_label)
        if tags is not None:
            seen_labels.update(t for t in tags if t)
        utterances.append(utt)

    if kind == "seq":
        task = TaskConfig(
            title=mapping.task_title,
            task_type=TaskType.SEQ,
            input_index=1,
            output_index=2,
            labels=sorted(seen_labels),
        )
    else:
        task = TaskConfig(
            title=mapping.task_title,
            task_type=TaskType.CLASS,
            input_index=1,
            labels=sorted(seen_labels),
        )
    return Corpus(utterances), task


def standoff_to_bio(doc: StandoffDocument) -> StandoffConversion:
    """Whitespace-tokenize a standoff document and BIO-encode its spans.

    Spans are snapped outward to whole tokens (the same rule as interactive
    selection); every adjusted span is reported, never silently changed.
    Spans that collide after snapping are an error naming both.
    """
    matches = list(_TOKEN_RE.finditer(doc.text))
    tokens = [m.group() for m in matches]
    offsets = [(m.start(), m.end()) for m in matches]
    if doc.spans and not tokens:
        raise ConversionError("document has spans but no tokens")

    adjustments: list[SnapAdjustment] = []
    token_spans: list[tuple[tuple[int, int], CharSpan]] = []
    for char_span in doc.spans:
        snapped = snap_to_tokens(offsets, char_span.start, char_span.end, len(doc.text))
        snapped_chars = (offsets[snapped[0]][0], offsets[snapped[1] - 1][1])
        if snapped_chars != (char_span.start, char_span.end):
            adjustments.append(
                SnapAdjustment(char_span.label, (char_span.start, char_span.end), snapped_chars)
            )
        token_spans.append((snapped, char_span))

    token_spans.sort(key=lambda item: item[0])
    for (left_range, left), (right_range, right) in zip(token_spans, token_spans[1:]):
        if right_range[0] < left_range[1]:
            raise ConversionError(
                f"spans [{left.start}, {left.end}) {left.label!r} and "
                f"[{right.start}, {right.end}) {right.label!r} overlap after snapping"
            )
    try:
        spans = [Span(start, end, cs.label) for (start, end), cs in token_spans]
        tags = bio_encode(spans, len(tokens))
    except ValueError as exc:
        raise ConversionError(str(exc)) from None
    return StandoffConversion(tokens, tags, adjustments)


def bio_to_standoff(utt: Utterance, task: TaskConfig) -> StandoffDocument:
    """Project an utterance's BIO column onto character offsets over the
    space-joined input column."""
    if task.task_type is not TaskType.SEQ_BIO:
        raise ValueError(f"task {task.title!r} is not a seq_bio task")
    cells = []
    for position, token in enumerate(utt.tokens):
        value = token.get(task.input_index)
        if value is None:
            raise ValueError(f"token {position} has no input column {task.input_index}")
        cells.append(value)
    text, offsets = joined_offsets(cells)
    tags = [t.get(task.output_index) or "" for t in utt.tokens]
    char_spans = [
        CharSpan(offsets[s.start][0], offsets[s.end - 1][1], s.label)
        for s in bio_decode(tags)
    ]
    return StandoffDocument(text, char_spans)


_MACHAMP_TASK_TYPES = {
    TaskType.SEQ: "seq",
    TaskType.SEQ_BIO: "seq_bio",
    TaskType.CLASS: "classification",
    TaskType.SEQ2SEQ: "seq2seq",
}


def export_machamp(
    tasks: TaskSet, data_path: str, config_name: str = "machamp.json"
) -> tuple[str, str]:
    """Emit a MaChAmp dataset configuration plus the one-line training command.

    MaChAmp counts columns 0-based, so word-level tasks get
    ``column_idx = output_index - 1`` and utterance-level tasks get
    ``sent_idxs = [input_index - 1]``.  Output is deterministic.
    """
    if not len(tasks):
        raise ValueError("cannot export an empty task set")
    entries = {}
    word_idx: int | None = None
    for task in tasks:
        entry: dict = {"task_type": _MACHAMP_TASK_TYPES[task.task_type]}
        if task.task_type.is_word_level:
            if task.output_index is None:
                raise ValueError(f"task {task.title!r} is missing its output index")
            entry["column_idx"] = task.output_index - 1
            if word_idx is None:
                word_idx = task.input_index - 1
        else:
            entry["sent_idxs"] = [task.input_index - 1]
        entries[task.title] = entry

    dataset_name = PurePath(data_path).stem or "dataset"
    dataset: dict = {"train_data_path": data_path}
    if word_idx is not None:
        dataset["word_idx"] = word_idx
    dataset["tasks"] = entries
    config_text = json.dumps({dataset_name: dataset}, indent=2, ensure_ascii=False) + "\n"
    command_text = (
        f"python3 train.py --dataset_configs {config_name} --name {dataset_name}\n"
    )
    return config_text, command_text
