"""Annotation engine: BIO codec, snapping, edits, statuses, export."""

import random
from datetime import datetime

import pytest
from hypothesis import given
from hypothesis import strategies as st

from annotab import (
    Corpus,
    Span,
    Status,
    TaskConfig,
    TaskSet,
    TaskType,
    Token,
    Utterance,
    annotation_mode,
    bio_decode,
    bio_encode,
    keyboard_map,
    label_search,
    open_session,
    parse_corpus,
    serialize_corpus,
    snap_selection,
)
from support import sample_corpus, sample_taskset


def full_taskset() -> TaskSet:
    """NER + POS + intent + translation over the sample corpus layout."""
    ner = sample_taskset().tasks[0]
    return TaskSet(
        [
            ner,
            TaskConfig(title="POS", task_type=TaskType.SEQ, input_index=2, output_index=3,
                       labels=["ADV", "AUX", "PRON", "PROPN", "PUNCT", "VERB"], id=1),
            TaskConfig(title="intent", task_type=TaskType.CLASS, input_index=2,
                       labels=["inform", "goodbye"], id=2),
            TaskConfig(title="translation", task_type=TaskType.SEQ2SEQ, input_index=2, id=3),
        ]
    )


# -- BIO codec ----------------------------------------------------------------


def test_bio_encode_single_span():
    assert bio_encode([Span(2, 3, "MISC")], 6) == ["O", "O", "B-MISC", "O", "O", "O"]


def test_bio_encode_empty():
    assert bio_encode([], 4) == ["O", "O", "O", "O"]


def test_bio_encode_adjacent_same_type():
    tags = bio_encode([Span(0, 1, "PER"), Span(1, 3, "PER")], 3)
    assert tags == ["B-PER", "B-PER", "I-PER"]
    assert bio_decode(tags) == [Span(0, 1, "PER"), Span(1, 3, "PER")]


def test_bio_encode_rejects_overlap_and_out_of_range():
    with pytest.raises(ValueError):
        bio_encode([Span(0, 2, "A"), Span(1, 3, "B")], 4)
    with pytest.raises(ValueError):
        bio_encode([Span(0, 5, "A")], 4)


def test_bio_decode_simple():
    assert bio_decode(["O", "O", "B-MISC", "O", "O", "O"]) == [Span(2, 3, "MISC")]
    assert bio_decode([]) == []


def test_bio_decode_repairs_leading_inside_tag():
    assert bio_decode(["I-PER", "I-PER", "O"]) == [Span(0, 2, "PER")]


def test_bio_decode_repairs_type_switch():
    assert bio_decode(["B-PER", "I-LOC"]) == [Span(0, 1, "PER"), Span(1, 2, "LOC")]


def test_bio_decode_reads_bare_tag_as_single_token_span():
    assert bio_decode(["MISC", "O"]) == [Span(0, 1, "MISC")]


def test_bio_decode_treats_empty_and_typeless_cells_as_outside():
    assert bio_decode(["", "B-X", "I-", "B-"]) == [Span(1, 2, "X")]


# Exhaustive oracle: enumerate every valid span set and every well-formed tag
# sequence for small n, independently of the codec under test.

TYPES = ("X", "Y")
ALPHABET = ["O", "B-X", "I-X", "B-Y", "I-Y"]


def all_span_sets(n, types=TYPES):
    def from_position(pos):
        yield []
        for start in range(pos, n):
            for end in range(start + 1, n + 1):
                for label in types:
                    head = Span(start, end, label)
                    for rest in from_position(end):
                        yield [head] + rest
    return from_position(0)


def is_well_formed(tags):
    for i, tag in enumerate(tags):
        if tag.startswith("I-"):
            if i == 0 or tags[i - 1] not in (f"B-{tag[2:]}", f"I-{tag[2:]}"):
                return False
    return True


def all_tag_sequences(n):
    if n == 0:
        yield []
        return
    for head in ALPHABET:
        for rest in all_tag_sequences(n - 1):
            yield [head] + rest


@pytest.mark.parametrize("n", range(0, 6))
def test_bio_decode_inverts_encode_exhaustively(n):
    for spans in all_span_sets(n):
        assert bio_decode(bio_encode(spans, n)) == spans


@pytest.mark.parametrize("n", range(0, 6))
def test_bio_encode_inverts_decode_on_well_formed_tags(n):
    for tags in all_tag_sequences(n):
        if is_well_formed(tags):
            assert bio_encode(bio_decode(tags), n) == tags


# -- snapping -----------------------------------------------------------------


def test_snap_partial_token_selection():
    utt = sample_corpus().utterances[0]
    task = TaskConfig(title="NER", task_type=TaskType.SEQ_BIO, input_index=2, output_index=4)
    # display text: "What ? Eevee is evolving !"; "Eev" occupies chars 7-10
    assert snap_selection(utt, task, 7, 10) == (2, 3)


def test_snap_whole_text():
    utt = sample_corpus().utterances[0]
    task = TaskConfig(title="NER", task_type=TaskType.SEQ_BIO, input_index=2, output_index=4)
    assert snap_selection(utt, task, 0, len("What ? Eevee is evolving !")) == (0, 6)


def test_snap_zero_width_inside_first_token():
    utt = sample_corpus().utterances[0]
    task = TaskConfig(title="NER", task_type=TaskType.SEQ_BIO, input_index=2, output_index=4)
    assert snap_selection(utt, task, 0, 0) == (0, 1)


def test_snap_separator_selection_goes_to_following_token():
    utt = sample_corpus().utterances[0]
    task = TaskConfig(title="NER", task_type=TaskType.SEQ_BIO, input_index=2, output_index=4)
    assert snap_selection(utt, task, 4, 5) == (1, 2)
    assert snap_selection(utt, task, 4, 4) == (1, 2)


def test_snap_out_of_range():
    utt = sample_corpus().utterances[0]
    task = TaskConfig(title="NER", task_type=TaskType.SEQ_BIO, input_index=2, output_index=4)
    with pytest.raises(ValueError):
        snap_selection(utt, task, 0, 999)


# -- session lifecycle ----------------------------------------------------------


def test_open_session_defaults():
    session = open_session(sample_corpus(), sample_taskset())
    assert session.cursor == 0
    assert session.active_task_id == 0
    assert session.utterance_count == 2


def test_open_session_empty_corpus():
    session = open_session(Corpus([]), sample_taskset())
    assert session.cursor is None
    progress = session.get_progress(0)
    assert progress.total == 0


def test_open_session_creates_missing_output_column():
    corpus = parse_corpus("a\nb\n")
    tasks = TaskSet(
        [TaskConfig(title="NER", task_type=TaskType.SEQ_BIO, input_index=1, output_index=2)]
    )
    session = open_session(corpus, tasks)
    assert [t.columns for t in corpus.utterances[0].tokens] == [["a", "O"], ["b", "O"]]
    assert session.spans(0, 0) == []


def test_open_session_rejects_missing_input_column():
    tasks = TaskSet(
        [TaskConfig(title="X", task_type=TaskType.SEQ, input_index=9, output_index=3)]
    )
    with pytest.raises(ValueError):
        open_session(sample_corpus(), tasks)


def test_open_session_restores_statuses():
    corpus = sample_corpus()
    tasks = sample_taskset()
    session = open_session(corpus, tasks)
    session.set_status(0, 0, Status.COMPLETED)
    _, text = session.export()
    reopened = open_session(parse_corpus(text), sample_taskset())
    assert reopened.get_status(0, 0) is Status.COMPLETED
    assert reopened.get_status(1, 0) is Status.CLEARED


# -- edits ---------------------------------------------------------------------


def test_annotate_token_idempotent():
    session = open_session(sample_corpus(), full_taskset())
    session.annotate_token(1, 0, 1, "VERB")
    assert session.corpus.utterances[1].tokens[0].columns[2] == "VERB"
    session.annotate_token(1, 0, 1, "PRON")
    assert session.corpus.utterances[1].tokens[0].columns[2] == "PRON"


def test_annotate_token_rejects_unknown_label_and_wrong_type():
    session = open_session(sample_corpus(), full_taskset())
    with pytest.raises(ValueError):
        session.annotate_token(0, 0, 1, "XYZ")
    with pytest.raises(ValueError):
        session.annotate_token(0, 0, 0, "VERB")  # task 0 is seq_bio


def test_annotate_span_writes_bio_column():
    session = open_session(sample_corpus(), full_taskset())
    session.annotate_span(0, (2, 3), 0, "MISC")
    column = [t.columns[3] for t in session.corpus.utterances[0].tokens]
    assert column == ["O", "O", "B-MISC", "O", "O", "O"]


def test_annotate_span_with_o_deletes():
    session = open_session(sample_corpus(), full_taskset())
    session.annotate_span(0, (2, 3), 0, "O")
    column = [t.columns[3] for t in session.corpus.utterances[0].tokens]
    assert column == ["O"] * 6


def test_annotate_span_overwrites_overlaps():
    session = open_session(sample_corpus(), full_taskset())
    session.annotate_span(0, (1, 4), 0, "PER")
    assert session.spans(0, 0) == [Span(1, 4, "PER")]
    column = [t.columns[3] for t in session.corpus.utterances[0].tokens]
    assert column == ["O", "B-PER", "I-PER", "I-PER", "O", "O"]


def test_annotate_span_keeps_touching_spans():
    session = open_session(sample_corpus(), full_taskset())
    session.annotate_span(0, (0, 2), 0, "PER")
    session.annotate_span(0, (2, 3), 0, "MISC")
    assert session.spans(0, 0) == [Span(0, 2, "PER"), Span(2, 3, "MISC")]


def test_annotate_span_invalid_range():
    session = open_session(sample_corpus(), full_taskset())
    with pytest.raises(ValueError):
        session.annotate_span(0, (3, 3), 0, "PER")
    with pytest.raises(ValueError):
        session.annotate_span(0, (0, 99), 0, "PER")


def test_annotate_class_sets_metadata():
    session = open_session(sample_corpus(), full_taskset())
    session.annotate_class(0, 2, "inform")
    utt = session.corpus.utterances[0]
    assert utt.get_metadata("intent") == "inform"
    session.annotate_class(0, 2, "goodbye")
    assert utt.get_metadata("intent") == "goodbye"
    assert sum(1 for c in utt.comments if c.parsed_key == "intent") == 1
    with pytest.raises(ValueError):
        session.annotate_class(0, 2, "unconfigured")


def test_annotate_seq2seq_round_trips_values_with_separator():
    session = open_session(sample_corpus(), full_taskset())
    session.annotate_seq2seq(0, 3, "Was? Eevee entwickelt sich!")
    assert session.corpus.utterances[0].get_metadata("translation") == (
        "Was? Eevee entwickelt sich!"
    )
    session.annotate_seq2seq(0, 3, "a = b = c")
    _, text = session.export()
    reparsed = parse_corpus(text)
    assert reparsed.utterances[0].get_metadata("translation") == "a = b = c"
    session.annotate_seq2seq(0, 3, "")
    assert session.corpus.utterances[0].get_metadata("translation") is None


def test_annotate_seq2seq_rejects_newlines():
    session = open_session(sample_corpus(), full_taskset())
    with pytest.raises(ValueError):
        session.annotate_seq2seq(0, 3, "two\nlines")


def test_edits_do_not_touch_other_columns():
    session = open_session(sample_corpus(), full_taskset())
    before = [list(t.columns) for t in session.corpus.utterances[0].tokens]
    session.annotate_span(0, (0, 2), 0, "PER")
    after = [list(t.columns) for t in session.corpus.utterances[0].tokens]
    for b, a in zip(before, after):
        assert b[:3] == a[:3]  # id, form, POS untouched


def test_apply_default_label():
    corpus = parse_corpus("a\nb\nc\n\nd\n")
    tasks = TaskSet(
        [TaskConfig(title="T", task_type=TaskType.SEQ, input_index=1, output_index=2,
                    labels=["x"], default_label="pending")]
    )
    session = open_session(corpus, tasks)
    # open_session already filled the fresh column with the default
    assert session.apply_default_label(0) == 0
    session.corpus.utterances[0].tokens[0].set(2, "")
    assert session.apply_default_label(0) == 1
    assert session.apply_default_label(0) == 0


def test_apply_default_label_requires_default():
    tasks = TaskSet(
        [TaskConfig(title="POS", task_type=TaskType.SEQ, input_index=2, output_index=3)]
    )
    session = open_session(sample_corpus(), tasks)
    with pytest.raises(ValueError):
        session.apply_default_label(0)


# -- status and progress ---------------------------------------------------------


def test_progress_counts():
    session = open_session(sample_corpus(), sample_taskset())
    session.set_status(0, 0, Status.COMPLETED)
    progress = session.get_progress(0)
    assert (progress.completed, progress.wrong, progress.unsure, progress.cleared) == (1, 0, 0, 1)


def test_status_cleared_removes_entry():
    session = open_session(sample_corpus(), sample_taskset())
    session.set_status(0, 0, Status.WRONG)
    session.set_status(0, 0, Status.CLEARED)
    assert session.statuses == {}
    assert session.get_progress(0).cleared == 2
    assert "status:" not in session.export()[1]


@given(st.lists(st.tuples(st.integers(0, 1), st.sampled_from(list(Status))), max_size=30))
def test_progress_counts_always_sum(moves):
    session = open_session(sample_corpus(), sample_taskset())
    for utt_index, status in moves:
        session.set_status(utt_index, 0, status)
        assert session.get_progress(0).total == 2


def test_set_status_accepts_strings():
    session = open_session(sample_corpus(), sample_taskset())
    session.set_status(1, 0, "unsure")
    assert session.get_status(1, 0) is Status.UNSURE


# -- search and modes --------------------------------------------------------------


def test_label_search_prefix_before_substring():
    task = TaskConfig(title="X", task_type=TaskType.CLASS, labels=["PERSON", "SUPER"])
    assert label_search(task, "per") == ["PERSON", "SUPER"]


def test_label_search_sample_labels():
    task = sample_taskset().tasks[0]
    assert label_search(task, "m") == ["MISC"]
    assert label_search(task, "") == ["LOC", "MISC", "ORG", "PER"]
    assert label_search(task, "zz") == []


def test_annotation_mode_boundary():
    def make(n):
        return TaskConfig(title="X", task_type=TaskType.CLASS, labels=[f"l{i}" for i in range(n)])

    assert annotation_mode(make(4)) == "keyboard"
    assert annotation_mode(make(10)) == "keyboard"
    assert annotation_mode(make(11)) == "search"


def test_keyboard_map_bindings():
    task = sample_taskset().tasks[0]
    assert keyboard_map(task) == {"1": "LOC", "2": "MISC", "3": "ORG", "4": "PER"}
    ten = TaskConfig(title="X", task_type=TaskType.CLASS, labels=[f"l{i}" for i in range(10)])
    assert keyboard_map(ten)["0"] == "l9"
    eleven = TaskConfig(title="Y", task_type=TaskType.CLASS, labels=[f"l{i}" for i in range(11)])
    assert keyboard_map(eleven) == {}


# -- export ------------------------------------------------------------------------


def test_export_filename_plain():
    session = open_session(sample_corpus(), sample_taskset())
    name, _ = session.export(with_datetime=False)
    assert name == "annotations.conll"


def test_export_filename_with_datetime():
    session = open_session(sample_corpus(), sample_taskset())
    name, _ = session.export(with_datetime=True, now=datetime(2024, 1, 2, 3, 4, 5))
    assert name == "annotations_2024-01-02T03-04-05.conll"


def test_export_clean_strips_status_metadata():
    session = open_session(sample_corpus(), sample_taskset())
    session.set_status(0, 0, Status.UNSURE)
    _, dirty = session.export()
    assert "status:NER = unsure" in dirty
    _, clean = session.export(clean=True)
    assert "status:" not in clean
    # the session itself keeps the status
    assert session.get_status(0, 0) is Status.UNSURE


def test_export_reopen_restores_everything():
    session = open_session(sample_corpus(), full_taskset())
    session.annotate_span(0, (3, 5), 0, "LOC")
    session.annotate_token(1, 3, 1, "PUNCT")
    session.annotate_class(1, 2, "goodbye")
    session.annotate_seq2seq(0, 3, "Que?")
    session.set_status(0, 0, Status.COMPLETED)
    session.set_status(1, 2, Status.UNSURE)
    _, text = session.export()
    reopened = open_session(parse_corpus(text), full_taskset())
    assert serialize_corpus(reopened.corpus) == text
    assert reopened.statuses == session.statuses
    for task_id in range(4):
        assert reopened.get_progress(task_id) == session.get_progress(task_id)


# -- navigation ---------------------------------------------------------------------


def test_cursor_moves_and_clamps():
    session = open_session(sample_corpus(), sample_taskset())
    assert session.move_cursor(1) == 1
    assert session.move_cursor(1) == 1  # clamped at last utterance
    assert session.move_cursor(-5) == 0
    session.set_cursor(1)
    assert session.cursor == 1
    with pytest.raises(IndexError):
        session.set_cursor(2)


def test_set_active_task_validates_id():
    session = open_session(sample_corpus(), full_taskset())
    session.set_active_task(2)
    assert session.active_task_id == 2
    with pytest.raises(ValueError):
        session.set_active_task(99)


# -- randomized persistence property --------------------------------------------------


def test_random_edit_sequences_survive_export_and_reopen():
    rng = random.Random(991)
    session = open_session(sample_corpus(), full_taskset())
    statuses = list(Status)
    for _ in range(600):
        utt_index = rng.randrange(2)
        n = len(session.corpus.utterances[utt_index].tokens)
        op = rng.randrange(5)
        if op == 0:
            start = rng.randrange(n)
            end = rng.randint(start + 1, n)
            session.annotate_span(
                utt_index, (start, end), 0, rng.choice(["LOC", "MISC", "ORG", "PER", "O"])
            )
        elif op == 1:
            session.annotate_token(
                utt_index, rng.randrange(n), 1,
                rng.choice(["ADV", "AUX", "PRON", "PROPN", "PUNCT", "VERB"]),
            )
        elif op == 2:
            session.annotate_class(utt_index, 2, rng.choice(["inform", "goodbye"]))
        elif op == 3:
            session.annotate_seq2seq(utt_index, 3, rng.choice(["", "ok then", "a = b"]))
        else:
            session.set_status(utt_index, rng.choice([0, 1, 2, 3]), rng.choice(statuses))
        for task_id in range(4):
            assert session.get_progress(task_id).total == 2
    _, text = session.export()
    reopened = open_session(parse_corpus(text), full_taskset())
    assert serialize_corpus(reopened.corpus) == text
    assert reopened.statuses == session.statuses
