"""Format bridges: raw text, JSON-lines, standoff offsets, MaChAmp export."""

import json
import random

import pytest

from annotab import (
    CharSpan,
    ConversionError,
    FieldMapping,
    StandoffDocument,
    TaskSet,
    TaskType,
    bio_to_standoff,
    export_machamp,
    import_jsonl,
    import_raw_text,
    standoff_to_bio,
)
from support import random_bio_corpus, sample_corpus, sample_taskset


# -- raw text -----------------------------------------------------------------


def test_import_raw_text_single_utterance():
    corpus = import_raw_text("Smell ya later !")
    assert len(corpus) == 1
    assert [t.columns for t in corpus.utterances[0].tokens] == [
        ["Smell"], ["ya"], ["later"], ["!"],
    ]


def test_import_raw_text_empty():
    assert len(import_raw_text("")) == 0
    assert len(import_raw_text(" \n\t\n  \n")) == 0


def test_import_raw_text_whitespace_rules():
    corpus = import_raw_text("a  b\n\nc")
    assert [len(u.tokens) for u in corpus] == [2, 1]


def test_import_raw_text_joins_lines_within_block():
    corpus = import_raw_text("a b\nc d\n\ne")
    assert [len(u.tokens) for u in corpus] == [4, 1]


def test_import_raw_text_retokenizes_stably():
    corpus = import_raw_text("What ?  Eevee\tis evolving !")
    tokens = [t.columns[0] for t in corpus.utterances[0].tokens]
    assert import_raw_text(" ".join(tokens)).utterances[0].tokens == corpus.utterances[0].tokens


def test_import_raw_text_rejects_hash_tokens():
    with pytest.raises(ConversionError):
        import_raw_text("#hashtag rules")


# -- JSON lines ----------------------------------------------------------------


def test_import_jsonl_class_records():
    records = [{"text": ["Smell", "ya", "later", "!"], "label": "goodbye"}]
    corpus, task = import_jsonl(records, FieldMapping("text", "label", "intent"))
    assert corpus.utterances[0].get_metadata("intent") == "goodbye"
    assert [t.columns for t in corpus.utterances[0].tokens] == [
        ["Smell"], ["ya"], ["later"], ["!"],
    ]
    assert task.task_type is TaskType.CLASS
    assert task.labels == ["goodbye"]
    assert task.title == "intent"


def test_import_jsonl_empty():
    corpus, task = import_jsonl([], FieldMapping("text", "label", "intent"))
    assert len(corpus) == 0
    assert task.labels == []


def test_import_jsonl_tag_lists_make_a_seq_task():
    records = [
        {"tokens": ["a", "b"], "tags": ["X", "Y"]},
        {"tokens": "c d", "tags": ["X", "X"]},
    ]
    corpus, task = import_jsonl(records, FieldMapping("tokens", "tags", "chunk"))
    assert task.task_type is TaskType.SEQ
    assert task.output_index == 2
    assert task.labels == ["X", "Y"]
    assert [t.columns for t in corpus.utterances[1].tokens] == [["c", "X"], ["d", "X"]]


def test_import_jsonl_length_mismatch_names_record():
    records = [{"t": ["a", "b", "c"], "l": ["X", "Y"]}]
    with pytest.raises(ConversionError, match="record 0"):
        import_jsonl(records, FieldMapping("t", "l", "chunk"))


def test_import_jsonl_missing_field_names_record():
    with pytest.raises(ConversionError, match="record 1"):
        import_jsonl([{"text": "a"}, {"nope": "b"}], FieldMapping("text", None, "x"))


def test_import_jsonl_mixed_arity_rejected():
    records = [{"t": "a", "l": "pos"}, {"t": "b", "l": ["neg"]}]
    with pytest.raises(ConversionError, match="record 1"):
        import_jsonl(records, FieldMapping("t", "l", "x"))


def test_import_jsonl_numeric_labels_become_strings():
    corpus, task = import_jsonl([{"t": "hi there", "l": 3}], FieldMapping("t", "l", "cls"))
    assert corpus.utterances[0].get_metadata("cls") == "3"
    assert task.labels == ["3"]


def test_import_jsonl_preserves_record_and_token_order():
    records = [{"t": f"w{i} v{i}"} for i in range(5)]
    corpus, _ = import_jsonl(records, FieldMapping("t", None, "x"))
    assert [u.tokens[0].columns[0] for u in corpus] == [f"w{i}" for i in range(5)]


# -- standoff -------------------------------------------------------------------


def test_standoff_to_bio_aligned_span():
    doc = StandoffDocument("What ? Eevee is evolving !", [CharSpan(7, 12, "MISC")])
    result = standoff_to_bio(doc)
    assert result.tokens == ["What", "?", "Eevee", "is", "evolving", "!"]
    assert result.tags == ["O", "O", "B-MISC", "O", "O", "O"]
    assert result.adjustments == []


def test_standoff_to_bio_no_spans():
    result = standoff_to_bio(StandoffDocument("a b c", []))
    assert result.tags == ["O", "O", "O"]
    assert result.adjustments == []


def test_standoff_to_bio_snaps_outward_and_reports():
    doc = StandoffDocument("What ? Eevee is evolving !", [CharSpan(7, 10, "MISC")])
    result = standoff_to_bio(doc)
    assert result.tags == ["O", "O", "B-MISC", "O", "O", "O"]
    assert len(result.adjustments) == 1
    assert result.adjustments[0].original == (7, 10)
    assert result.adjustments[0].snapped == (7, 12)


def test_standoff_to_bio_collision_after_snapping():
    doc = StandoffDocument("longword here", [CharSpan(0, 2, "A"), CharSpan(3, 5, "B")])
    with pytest.raises(ConversionError, match="overlap after snapping"):
        standoff_to_bio(doc)


def test_standoff_document_validation():
    with pytest.raises(ValueError):
        StandoffDocument("abc", [CharSpan(0, 9, "A")])
    with pytest.raises(ValueError):
        StandoffDocument("abcdef", [CharSpan(0, 3, "A"), CharSpan(2, 5, "B")])
    StandoffDocument("abcdef", [CharSpan(0, 3, "A"), CharSpan(3, 5, "B")])  # touching is fine


def test_standoff_json_round_trip():
    doc = StandoffDocument("a b c", [CharSpan(0, 1, "X")])
    assert StandoffDocument.from_json(doc.to_json()) == doc
    with pytest.raises(ConversionError):
        StandoffDocument.from_json("{}")


def test_bio_to_standoff_sample_utterance():
    utt = sample_corpus().utterances[0]
    task = sample_taskset().tasks[0]
    # the config displays column 1 (token ids); project over the form column instead
    task = type(task)(title="NER", task_type=TaskType.SEQ_BIO, input_index=2,
                      output_index=4, labels=task.labels, id=0)
    doc = bio_to_standoff(utt, task)
    assert doc.text == "What ? Eevee is evolving !"
    assert doc.spans == [CharSpan(7, 12, "MISC")]


def test_bio_to_standoff_all_outside():
    utt = sample_corpus().utterances[1]
    task = sample_taskset().tasks[0]
    assert bio_to_standoff(utt, task).spans == []


def test_standoff_round_trip_on_random_corpora():
    rng = random.Random(2024)
    from annotab import TaskConfig

    task = TaskConfig(title="NER", task_type=TaskType.SEQ_BIO, input_index=1, output_index=2)
    corpus = random_bio_corpus(rng, 60)
    for utt in corpus:
        original = [t.columns[1] for t in utt.tokens]
        result = standoff_to_bio(bio_to_standoff(utt, task))
        assert result.tags == original
        assert result.adjustments == []


# -- MaChAmp --------------------------------------------------------------------


def test_export_machamp_sample_taskset():
    config_text, command_text = export_machamp(sample_taskset(), "train.conll")
    config = json.loads(config_text)
    dataset = config["train"]
    assert dataset["train_data_path"] == "train.conll"
    assert dataset["word_idx"] == 0
    assert dataset["tasks"]["NER"] == {"task_type": "seq_bio", "column_idx": 3}
    assert command_text.startswith("python3 train.py ")
    assert "machamp.json" in command_text


def test_export_machamp_is_deterministic():
    first = export_machamp(sample_taskset(), "train.conll")
    second = export_machamp(sample_taskset(), "train.conll")
    assert first == second


def test_export_machamp_class_task_uses_sent_idxs():
    from annotab import TaskConfig

    tasks = TaskSet(
        [TaskConfig(title="intent", task_type=TaskType.CLASS, input_index=2, labels=["a"], id=0)]
    )
    config = json.loads(export_machamp(tasks, "data.conll")[0])
    entry = config["data"]["tasks"]["intent"]
    assert entry == {"task_type": "classification", "sent_idxs": [1]}
    assert "word_idx" not in config["data"]


def test_export_machamp_rejects_empty_taskset():
    with pytest.raises(ValueError):
        export_machamp(TaskSet([]), "x.conll")
