"""Annotation task configuration: task types, JSON config round-trip,
label inference from annotated corpora, and corpus/task cross-checks."""

import enum
import json
import warnings
from dataclasses import dataclass, field

from .conll import Corpus, Diagnostic


class ConfigError(ValueError):
    """Invalid task configuration; ``position`` is the offending task's index."""

    def __init__(self, message: str, position: int | None = None):
        prefix = f"task {position}: " if position is not None else ""
        super().__init__(prefix + message)
        self.position = position


class TaskType(enum.Enum):
    SEQ = "seq"
    SEQ_BIO = "seq_bio"
    CLASS = "class"
    SEQ2SEQ = "seq2seq"

    @property
    def is_word_level(self) -> bool:
        return self in (TaskType.SEQ, TaskType.SEQ_BIO)

    @classmethod
    def from_name(cls, name: str) -> "TaskType":
        if name == "span":  # accepted alias for the on-disk keyword
            return cls.SEQ_BIO
        try:
            return cls(name)
        except ValueError:
            raise ValueError(f"unknown task type {name!r}") from None


@dataclass
class TaskConfig:
    """One annotation task: where to read the text, where to write labels.

    Column indices are 1-based.  ``output_index`` must be set for word-level
    tasks (seq, seq_bio) and absent for utterance-level ones (class, seq2seq),
    whose annotations live in comment metadata keyed by the task title.
    ``default_label`` fills empty cells; it defaults to "O" for seq_bio.
    """

    title: str
    task_type: TaskType
    input_index: int = 1
    output_index: int | None = None
    labels: list[str] = field(default_factory=list)
    default_label: str | None = None
    id: int = 0

    def __post_init__(self):
        if not self.title:
            raise ValueError("task title must be non-empty")
        if "\n" in self.title or "\r" in self.title:
            raise ValueError("task title may not contain a line break")
        if " = " in self.title:
            raise ValueError("task title may not contain ' = '")
        if not isinstance(self.input_index, int) or self.input_index < 1:
            raise ValueError(f"input_index must be a positive integer, got {self.input_index!r}")
        if self.task_type.is_word_level:
            if not isinstance(self.output_index, int) or self.output_index < 1:
                raise ValueError(
                    f"{self.task_type.value} task needs a positive output_index"
                )
        elif self.output_index is not None:
            raise ValueError(f"{self.task_type.value} task takes no output_index")
        if self.task_type is TaskType.SEQ2SEQ and self.labels:
            raise ValueError("seq2seq task takes no labels")
        seen = set()
        for label in self.labels:
            if not label:
                raise ValueError("labels must be non-empty")
            if "\t" in label or "\n" in label or "\r" in label:
                raise ValueError(f"label {label!r} contains a tab or line break")
            if label in seen:
                raise ValueError(f"duplicate label {label!r}")
            seen.add(label)
        if not isinstance(self.id, int) or self.id < 0:
            raise ValueError(f"task id must be a non-negative integer, got {self.id!r}")
        if self.default_label is None and self.task_type is TaskType.SEQ_BIO:
            self.default_label = "O"


@dataclass
class TaskSet:
    """Ordered collection of tasks with unique titles and ids."""

    tasks: list[TaskConfig] = field(default_factory=list)

    def __post_init__(self):
        titles: dict[str, int] = {}
        ids: dict[int, int] = {}
        for position, task in enumerate(self.tasks):
            if task.title in titles:
                raise ConfigError(f"duplicate title {task.title!r}", position)
            if task.id in ids:
                raise ConfigError(f"duplicate id {task.id}", position)
            titles[task.title] = position
            ids[task.id] = position

    def __iter__(self):
        return iter(self.tasks)

    def __len__(self) -> int:
        return len(self.tasks)

    def by_id(self, task_id: int) -> TaskConfig:
        for task in self.tasks:
            if task.id == task_id:
                return task
        raise ValueError(f"no task with id {task_id}")

    def by_title(self, title: str) -> TaskConfig:
        for task in self.tasks:
            if task.title == title:
                return task
        raise ValueError(f"no task titled {title!r}")


_KNOWN_FIELDS = {"title", "type", "output_index", "input_index", "labels", "id", "default_label"}


def _parse_index(value, name: str, position: int) -> int:
    """Accept integer or string-encoded integer column indices."""
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be an integer", position)
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value, 10)
        except ValueError:
            pass
    raise ConfigError(f"{name} must be an integer, got {value!r}", position)


def _parse_task(obj, position: int) -> TaskConfig:
    if not isinstance(obj, dict):
        raise ConfigError("each task must be a JSON object", position)
    for name in obj:
        if name not in _KNOWN_FIELDS:
            warnings.warn(f"task {position}: ignoring unknown field {name!r}")

    if "title" not in obj:
        raise ConfigError("missing required field 'title'", position)
    title = obj["title"]
    if not isinstance(title, str):
        raise ConfigError("title must be a string", position)

    if "type" not in obj:
        raise ConfigError("missing required field 'type'", position)
    type_obj = obj["type"]
    type_name = type_obj.get("name") if isinstance(type_obj, dict) else type_obj
    if not isinstance(type_name, str):
        raise ConfigError("task type needs a string 'name'", position)
    try:
        task_type = TaskType.from_name(type_name)
    except ValueError as exc:
        raise ConfigError(str(exc), position) from None
    # "isWordLevel" is derivable from the type name and not trusted on input.

    if "input_index" not in obj:
        raise ConfigError("missing required field 'input_index'", position)
    input_index = _parse_index(obj["input_index"], "input_index", position)

    output_index = None
    if task_type.is_word_level:
        if "output_index" not in obj:
            raise ConfigError("missing required field 'output_index'", position)
        output_index = _parse_index(obj["output_index"], "output_index", position)
    elif "output_index" in obj:
        warnings.warn(
            f"task {position}: ignoring output_index on {task_type.value} task"
        )

    labels = obj.get("labels", [])
    if not isinstance(labels, list) or not all(isinstance(l, str) for l in labels):
        raise ConfigError("labels must be an array of strings", position)
    if task_type is TaskType.SEQ2SEQ and labels:
        warnings.warn(f"task {position}: ignoring labels on seq2seq task")
        labels = []

    task_id = _parse_index(obj["id"], "id", position) if "id" in obj else position

    default_label = obj.get("default_label")
    if default_label is not None and not isinstance(default_label, str):
        raise ConfigError("default_label must be a string", position)

    try:
        return TaskConfig(
            title=title,
            task_type=task_type,
            input_index=input_index,
            output_index=output_index,
            labels=list(labels),
            default_label=default_label,
            id=task_id,
        )
    except ValueError as exc:
        raise ConfigError(str(exc), position) from None


def parse_config(text: str) -> TaskSet:
    """Parse a JSON config document (an array of task objects) into a TaskSet.

    String-encoded column indices are accepted and normalized to integers;
    unknown fields are ignored with a warning; structural problems raise
    :class:`ConfigError` naming the offending task's position.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise ConfigError("config top level must be an array of tasks")
    return TaskSet([_parse_task(obj, position) for position, obj in enumerate(doc)])


def serialize_config(tasks: TaskSet) -> str:
    """Emit the JSON config format; ``parse_config`` of the result is identity.

    Column indices are emitted as strings for compatibility with existing
    config files.
    """
    out = []
    for task in tasks:
        obj: dict = {
            "title": task.title,
            "type": {"name": task.task_type.value, "isWordLevel": task.task_type.is_word_level},
        }
        if task.output_index is not None:
            obj["output_index"] = str(task.output_index)
        obj["input_index"] = str(task.input_index)
        obj["labels"] = list(task.labels)
        obj["id"] = task.id
        if task.default_label is not None:
            obj["default_label"] = task.default_label
        out.append(obj)
    return json.dumps(out, indent=2, ensure_ascii=False)


def _bio_entity_type(tag: str) -> str | None:
    """Entity type carried by a BIO tag; None for "O"/empty/typeless tags."""
    if tag in ("", "O"):
        return None
    if tag.startswith(("B-", "I-")):
        return tag[2:] or None
    return tag


def infer_labels(corpus: Corpus, task: TaskConfig) -> list[str]:
    """Collect the label inventory a task's existing annotations imply.

    seq: distinct non-empty output-column values; seq_bio: distinct entity
    types (B-/I- stripped, "O" dropped); class: distinct values of the
    metadata key equal to the task title.  Always sorted.
    """
    if task.task_type is TaskType.SEQ2SEQ:
        raise ValueError("seq2seq tasks have no label inventory to infer")
    found: set[str] = set()
    if task.task_type is TaskType.CLASS:
        for utt in corpus:
            value = utt.get_metadata(task.title)
            if value:
                found.add(value)
        return sorted(found)

    column_seen = False
    for utt in corpus:
        for token in utt.tokens:
            value = token.get(task.output_index)
            if value is None:
                continue
            column_seen = True
            if task.task_type is TaskType.SEQ:
                if value:
                    found.add(value)
            else:
                entity = _bio_entity_type(value)
                if entity:
                    found.add(entity)
    if not column_seen and corpus.token_count():
        raise ValueError(f"column absent: no token has column {task.output_index}")
    return sorted(found)


def validate_tasks(corpus: Corpus, tasks: TaskSet) -> list[Diagnostic]:
    """Cross-check a corpus against a TaskSet.

    Reports missing input columns (errors), missing output columns (warnings;
    a session creates them), malformed BIO cells, and labels present in the
    data but absent from the config.  A configured superset of the data's
    labels is fine.
    """
    diagnostics: list[Diagnostic] = []
    has_tokens = corpus.token_count() > 0
    max_width = corpus.max_width()
    for task in tasks:
        if has_tokens and task.input_index > max_width:
            diagnostics.append(
                Diagnostic(
                    "error",
                    "missing-column",
                    f"task {task.title!r}: input column {task.input_index} is absent",
                )
            )
        if not task.task_type.is_word_level:
            if task.labels:
                known = set(task.labels)
                extra = sorted(
                    v
                    for utt in corpus
                    if (v := utt.get_metadata(task.title)) and v not in known
                )
                if extra and task.task_type is TaskType.CLASS:
                    diagnostics.append(
                        Diagnostic(
                            "warning",
                            "unknown-label",
                            f"task {task.title!r}: data uses unconfigured label(s) {extra}",
                        )
                    )
            continue

        if has_tokens and task.output_index > max_width:
            diagnostics.append(
                Diagnostic(
                    "warning",
                    "missing-column",
                    f"task {task.title!r}: output column {task.output_index} is absent",
                )
            )
            continue

        known = set(task.labels)
        if task.default_label:
            known.add(task.default_label)
        unknown: set[str] = set()
        malformed = 0
        first_bad: str | None = None
        for utt in corpus:
            for token in utt.tokens:
                value = token.get(task.output_index)
                if not value:
                    continue
                if task.task_type is TaskType.SEQ:
                    if value not in known:
                        unknown.add(value)
                else:
                    if value != "O" and not (value.startswith(("B-", "I-")) and value[2:]):
                        malformed += 1
                        first_bad = first_bad or value
                    else:
                        entity = _bio_entity_type(value)
                        if entity and entity not in task.labels:
                            unknown.add(entity)
        if malformed:
            diagnostics.append(
                Diagnostic(
                    "warning",
                    "malformed-bio",
                    f"task {task.title!r}: {malformed} cell(s) are neither 'O' nor "
                    f"B-/I- tags (e.g. {first_bad!r})",
                )
            )
        if unknown:
            diagnostics.append(
                Diagnostic(
                    "warning",
                    "unknown-label",
                    f"task {task.title!r}: data uses unconfigured label(s) {sorted(unknown)}",
                )
            )
    return diagnostics
