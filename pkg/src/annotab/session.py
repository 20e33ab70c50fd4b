"""Mutable annotation session over a corpus and a task set.

A Session is a single-writer state machine: token/span/class/seq2seq edits,
per-(utterance, task) status tracking, progress counts, label search and
keyboard-mode selection, and export.  Statuses persist inside the corpus as
``status:<task title>`` metadata comments so that a saved file re-opens with
its progress intact.
"""

import enum
from dataclasses import dataclass
from datetime import datetime

from .conll import Corpus, Utterance, serialize_corpus
from .spans import Span, bio_decode, bio_encode, joined_offsets, snap_to_tokens
from .tasks import TaskConfig, TaskSet, TaskType, validate_tasks

STATUS_KEY_PREFIX = "status:"
KEYBOARD_MODE = "keyboard"
SEARCH_MODE = "search"
_KEYBOARD_LIMIT = 10

EXPORT_BASENAME = "annotations"
EXPORT_EXTENSION = ".conll"


class SessionError(ValueError):
    """The corpus and task set cannot be opened together."""


class Status(enum.Enum):
    COMPLETED = "completed"
    WRONG = "wrong"
    UNSURE = "unsure"
    CLEARED = "cleared"


@dataclass
class Progress:
    """Per-status utterance counts for one task; the four always sum to the
    utterance count (cleared = no stored status)."""

    completed: int = 0
    wrong: int = 0
    unsure: int = 0
    cleared: int = 0

    @property
    def total(self) -> int:
        return self.completed + self.wrong + self.unsure + self.cleared


def _status_key(task: TaskConfig) -> str:
    return STATUS_KEY_PREFIX + task.title


def _display_cells(utt: Utterance, input_index: int) -> list[str]:
    cells = []
    for position, token in enumerate(utt.tokens):
        value = token.get(input_index)
        if value is None:
            raise ValueError(f"token {position} has no input column {input_index}")
        cells.append(value)
    return cells


def snap_selection(
    utt: Utterance, task: TaskConfig, char_start: int, char_end: int
) -> tuple[int, int]:
    """Snap a character selection over the space-joined input column outward
    to whole-token boundaries."""
    text, offsets = joined_offsets(_display_cells(utt, task.input_index))
    return snap_to_tokens(offsets, char_start, char_end, len(text))


def label_search(task: TaskConfig, query: str) -> list[str]:
    """Case-insensitive label lookup: prefix matches rank before substring
    matches, ties keep config order; an empty query returns all labels."""
    needle = query.lower()
    prefix = [label for label in task.labels if label.lower().startswith(needle)]
    rest = [
        label
        for label in task.labels
        if needle in label.lower() and not label.lower().startswith(needle)
    ]
    return prefix + rest


def annotation_mode(task: TaskConfig) -> str:
    """Keyboard mode for up to ten labels, search mode beyond that."""
    return KEYBOARD_MODE if len(task.labels) <= _KEYBOARD_LIMIT else SEARCH_MODE


def keyboard_map(task: TaskConfig) -> dict[str, str]:
    """Digit-key bindings in keyboard mode: "1".."9" for labels 1-9 and "0"
    for the tenth.  Empty in search mode."""
    if annotation_mode(task) != KEYBOARD_MODE:
        return {}
    keys = [str(d) for d in range(1, 10)] + ["0"]
    return {key: label for key, label in zip(keys, task.labels)}


def _ensure_output_column(corpus: Corpus, task: TaskConfig) -> None:
    """Pad tokens so the task's output column exists everywhere, filling the
    output cell with the task's default label and any intermediate new cells
    with the empty string."""
    fill = task.default_label or ""
    for utt in corpus:
        for token in utt.tokens:
            while token.width < task.output_index - 1:
                token.columns.append("")
            if token.width < task.output_index:
                token.columns.append(fill)


class Session:
    """Annotation state over a corpus + task set.  Build via :func:`open_session`."""

    def __init__(self, corpus: Corpus, tasks: TaskSet):
        self.corpus = corpus
        self.tasks = tasks
        self.cursor: int | None = 0 if len(corpus) else None
        self.active_task_id: int | None = tasks.tasks[0].id if len(tasks) else None
        self.statuses: dict[tuple[int, int], Status] = {}

    # -- structure ---------------------------------------------------------

    @property
    def utterance_count(self) -> int:
        return len(self.corpus)

    def _utterance(self, utt_index: int) -> Utterance:
        if not 0 <= utt_index < len(self.corpus):
            raise IndexError(f"utterance index {utt_index} out of range")
        return self.corpus.utterances[utt_index]

    def _task(self, task_id: int) -> TaskConfig:
        return self.tasks.by_id(task_id)

    def set_cursor(self, index: int) -> int:
        if not 0 <= index < len(self.corpus):
            raise IndexError(f"utterance index {index} out of range")
        self.cursor = index
        return self.cursor

    def move_cursor(self, delta: int) -> int | None:
        """Move by ``delta`` utterances, clamping at both ends."""
        if self.cursor is None:
            return None
        self.cursor = max(0, min(len(self.corpus) - 1, self.cursor + delta))
        return self.cursor

    def set_active_task(self, task_id: int) -> None:
        self._task(task_id)
        self.active_task_id = task_id

    # -- annotation --------------------------------------------------------

    def annotate_token(self, utt_index: int, token_index: int, task_id: int, label: str) -> None:
        """Write one seq label into the task's output column."""
        task = self._task(task_id)
        if task.task_type is not TaskType.SEQ:
            raise ValueError(f"task {task.title!r} is not a seq task")
        if label not in task.labels and label != task.default_label:
            raise ValueError(f"label {label!r} is not in task {task.title!r}'s inventory")
        utt = self._utterance(utt_index)
        if not 0 <= token_index < len(utt.tokens):
            raise IndexError(f"token index {token_index} out of range")
        utt.tokens[token_index].set(task.output_index, label)

    def annotate_span(
        self, utt_index: int, token_range: tuple[int, int], task_id: int, label: str
    ) -> None:
        """Replace any spans overlapping ``token_range`` with a new labeled
        span; the reserved label "O" only deletes."""
        task = self._task(task_id)
        if task.task_type is not TaskType.SEQ_BIO:
            raise ValueError(f"task {task.title!r} is not a seq_bio task")
        utt = self._utterance(utt_index)
        start, end = token_range
        n = len(utt.tokens)
        if not (0 <= start < end <= n):
            raise ValueError(f"invalid token range [{start}, {end}) for {n} tokens")
        spans = [s for s in self.spans(utt_index, task_id) if s.end <= start or s.start >= end]
        if label != "O":
            spans.append(Span(start, end, label))
        for position, tag in enumerate(bio_encode(spans, n)):
            utt.tokens[position].set(task.output_index, tag)

    def annotate_class(self, utt_index: int, task_id: int, label: str) -> None:
        task = self._task(task_id)
        if task.task_type is not TaskType.CLASS:
            raise ValueError(f"task {task.title!r} is not a class task")
        if label not in task.labels:
            raise ValueError(f"label {label!r} is not in task {task.title!r}'s inventory")
        self._utterance(utt_index).set_metadata(task.title, label)

    def annotate_seq2seq(self, utt_index: int, task_id: int, target_text: str) -> None:
        """Store the target text as utterance metadata; an empty string
        removes the annotation."""
        task = self._task(task_id)
        if task.task_type is not TaskType.SEQ2SEQ:
            raise ValueError(f"task {task.title!r} is not a seq2seq task")
        utt = self._utterance(utt_index)
        if target_text == "":
            utt.delete_metadata(task.title)
        else:
            utt.set_metadata(task.title, target_text)

    def spans(self, utt_index: int, task_id: int) -> list[Span]:
        """Decode the current spans of a seq_bio task for one utterance."""
        task = self._task(task_id)
        if task.task_type is not TaskType.SEQ_BIO:
            raise ValueError(f"task {task.title!r} is not a seq_bio task")
        utt = self._utterance(utt_index)
        return bio_decode([t.get(task.output_index) or "" for t in utt.tokens])

    def snap_selection(
        self, utt_index: int, task_id: int, char_start: int, char_end: int
    ) -> tuple[int, int]:
        return snap_selection(
            self._utterance(utt_index), self._task(task_id), char_start, char_end
        )

    def apply_default_label(self, task_id: int) -> int:
        """Fill every empty output cell of a word-level task with its default
        label; returns the number of cells filled."""
        task = self._task(task_id)
        if not task.task_type.is_word_level:
            raise ValueError(f"task {task.title!r} has no output column")
        if not task.default_label:
            raise ValueError(f"task {task.title!r} has no default label configured")
        filled = 0
        for utt in self.corpus:
            for token in utt.tokens:
                if token.get(task.output_index) == "":
                    token.set(task.output_index, task.default_label)
                    filled += 1
        return filled

    # -- status & progress -------------------------------------------------

    def set_status(self, utt_index: int, task_id: int, status: Status | str) -> None:
        """Record an annotator verdict; ``cleared`` removes the stored entry
        and its metadata line."""
        if isinstance(status, str):
            status = Status(status)
        task = self._task(task_id)
        utt = self._utterance(utt_index)
        if status is Status.CLEARED:
            self.statuses.pop((utt_index, task_id), None)
            utt.delete_metadata(_status_key(task))
        else:
            self.statuses[(utt_index, task_id)] = status
            utt.set_metadata(_status_key(task), status.value)

    def get_status(self, utt_index: int, task_id: int) -> Status:
        self._utterance(utt_index)
        self._task(task_id)
        return self.statuses.get((utt_index, task_id), Status.CLEARED)

    def get_progress(self, task_id: int) -> Progress:
        self._task(task_id)
        progress = Progress()
        for (_, tid), status in self.statuses.items():
            if tid != task_id:
                continue
            if status is Status.COMPLETED:
                progress.completed += 1
            elif status is Status.WRONG:
                progress.wrong += 1
            elif status is Status.UNSURE:
                progress.unsure += 1
        progress.cleared = len(self.corpus) - (
            progress.completed + progress.wrong + progress.unsure
        )
        return progress

    # -- export --------------------------------------------------------------

    def export(
        self,
        with_datetime: bool = False,
        clean: bool = False,
        now: datetime | None = None,
    ) -> tuple[str, str]:
        """Serialize the session corpus for download.

        ``clean`` strips all ``status:`` metadata from the output (the
        session keeps it).  ``with_datetime`` appends a timestamp to the
        filename; pass ``now`` to pin it.
        """
        corpus = self.corpus
        if clean:
            corpus = Corpus(
                [
                    Utterance(
                        [
                            c
                            for c in utt.comments
                            if not (
                                c.parsed_key and c.parsed_key.startswith(STATUS_KEY_PREFIX)
                            )
                        ],
                        utt.tokens,
                    )
                    for utt in self.corpus
                ]
            )
        name = EXPORT_BASENAME
        if with_datetime:
            stamp = (now or datetime.now()).strftime("%Y-%m-%dT%H-%M-%S")
            name += f"_{stamp}"
        return name + EXPORT_EXTENSION, serialize_corpus(corpus)


def open_session(corpus: Corpus, tasks: TaskSet) -> Session:
    """Open an annotation session.

    Fails on fatal corpus/task mismatches (missing input columns).  Absent
    output columns of word-level tasks are created, filled with the task's
    default label.  Statuses previously exported as ``status:<title>``
    metadata are restored.
    """
    fatal = [d for d in validate_tasks(corpus, tasks) if d.severity == "error"]
    if fatal:
        raise SessionError("; ".join(d.message for d in fatal))
    for task in tasks:
        if task.task_type.is_word_level:
            _ensure_output_column(corpus, task)
    session = Session(corpus, tasks)
    for utt_index, utt in enumerate(corpus):
        for task in tasks:
            value = utt.get_metadata(_status_key(task))
            if value in (Status.COMPLETED.value, Status.WRONG.value, Status.UNSURE.value):
                session.statuses[(utt_index, task.id)] = Status(value)
    return session
