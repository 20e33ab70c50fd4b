"""JSON message boundary for driving a Session.

Requests are ``{"op": <name>, "args": {...}}``; every request gets exactly
one reply, either ``{"ok": true, "result": ...}`` or ``{"ok": false,
"error": {"code": ..., "message": ...}}``.  Unknown operations yield a
structured error, never silence.  Used by the ``serve-ui`` host and by any
external controller (e.g. a browser UI) so that the engine stays the single
source of annotation truth.
"""

import json
from datetime import datetime

from .session import Session, Status, annotation_mode, keyboard_map, label_search
from .tasks import serialize_config


def _task(session: Session, args: dict):
    return session.tasks.by_id(_int_arg(args, "task_id"))


def _int_arg(args: dict, name: str) -> int:
    value = args.get(name)
    if isinstance(value, bool) or not isinstance(value, int):
        raise _BadArgs(f"argument {name!r} must be an integer")
    return value


def _str_arg(args: dict, name: str, default: str | None = None) -> str:
    value = args.get(name, default)
    if not isinstance(value, str):
        raise _BadArgs(f"argument {name!r} must be a string")
    return value


class _BadArgs(Exception):
    pass


def _op_get_state(session: Session, args: dict):
    return {
        "cursor": session.cursor,
        "active_task_id": session.active_task_id,
        "utterance_count": session.utterance_count,
    }


def _op_get_tasks(session: Session, args: dict):
    return json.loads(serialize_config(session.tasks))


def _op_get_utterance(session: Session, args: dict):
    index = _int_arg(args, "index")
    if not 0 <= index < session.utterance_count:
        raise IndexError(f"utterance index {index} out of range")
    utt = session.corpus.utterances[index]
    return {
        "comments": [c.raw for c in utt.comments],
        "metadata": utt.metadata(),
        "tokens": [list(t.columns) for t in utt.tokens],
    }


def _op_set_cursor(session: Session, args: dict):
    return {"cursor": session.set_cursor(_int_arg(args, "index"))}


def _op_move_cursor(session: Session, args: dict):
    return {"cursor": session.move_cursor(_int_arg(args, "delta"))}


def _op_set_active_task(session: Session, args: dict):
    session.set_active_task(_int_arg(args, "task_id"))
    return {"active_task_id": session.active_task_id}


def _op_annotate_token(session: Session, args: dict):
    session.annotate_token(
        _int_arg(args, "utt_index"),
        _int_arg(args, "token_index"),
        _int_arg(args, "task_id"),
        _str_arg(args, "label"),
    )
    return None


def _op_annotate_span(session: Session, args: dict):
    session.annotate_span(
        _int_arg(args, "utt_index"),
        (_int_arg(args, "start"), _int_arg(args, "end")),
        _int_arg(args, "task_id"),
        _str_arg(args, "label"),
    )
    return None


def _op_annotate_class(session: Session, args: dict):
    session.annotate_class(
        _int_arg(args, "utt_index"), _int_arg(args, "task_id"), _str_arg(args, "label")
    )
    return None


def _op_annotate_seq2seq(session: Session, args: dict):
    session.annotate_seq2seq(
        _int_arg(args, "utt_index"), _int_arg(args, "task_id"), _str_arg(args, "text")
    )
    return None


def _op_set_status(session: Session, args: dict):
    try:
        status = Status(_str_arg(args, "status"))
    except ValueError:
        raise _BadArgs(f"unknown status {args.get('status')!r}") from None
    session.set_status(_int_arg(args, "utt_index"), _int_arg(args, "task_id"), status)
    return None


def _op_get_status(session: Session, args: dict):
    status = session.get_status(_int_arg(args, "utt_index"), _int_arg(args, "task_id"))
    return {"status": status.value}


def _op_get_progress(session: Session, args: dict):
    progress = session.get_progress(_int_arg(args, "task_id"))
    return {
        "completed": progress.completed,
        "wrong": progress.wrong,
        "unsure": progress.unsure,
        "cleared": progress.cleared,
    }


def _op_label_search(session: Session, args: dict):
    return {"labels": label_search(_task(session, args), _str_arg(args, "query", ""))}


def _op_annotation_mode(session: Session, args: dict):
    return {"mode": annotation_mode(_task(session, args))}


def _op_keyboard_map(session: Session, args: dict):
    return {"map": keyboard_map(_task(session, args))}


def _op_snap_selection(session: Session, args: dict):
    start, end = session.snap_selection(
        _int_arg(args, "utt_index"),
        _int_arg(args, "task_id"),
        _int_arg(args, "char_start"),
        _int_arg(args, "char_end"),
    )
    return {"start": start, "end": end}


def _op_get_spans(session: Session, args: dict):
    spans = session.spans(_int_arg(args, "utt_index"), _int_arg(args, "task_id"))
    return {"spans": [{"start": s.start, "end": s.end, "label": s.label} for s in spans]}


def _op_apply_default_label(session: Session, args: dict):
    return {"filled": session.apply_default_label(_int_arg(args, "task_id"))}


def _op_export(session: Session, args: dict):
    now = None
    if "now" in args:
        try:
            now = datetime.fromisoformat(_str_arg(args, "now"))
        except ValueError:
            raise _BadArgs(f"argument 'now' is not an ISO datetime: {args['now']!r}") from None
    filename, text = session.export(
        with_datetime=bool(args.get("with_datetime", False)),
        clean=bool(args.get("clean", False)),
        now=now,
    )
    return {"filename": filename, "text": text}


_OPS = {
    "get_state": _op_get_state,
    "get_tasks": _op_get_tasks,
    "get_utterance": _op_get_utterance,
    "set_cursor": _op_set_cursor,
    "move_cursor": _op_move_cursor,
    "set_active_task": _op_set_active_task,
    "annotate_token": _op_annotate_token,
    "annotate_span": _op_annotate_span,
    "annotate_class": _op_annotate_class,
    "annotate_seq2seq": _op_annotate_seq2seq,
    "set_status": _op_set_status,
    "get_status": _op_get_status,
    "get_progress": _op_get_progress,
    "label_search": _op_label_search,
    "annotation_mode": _op_annotation_mode,
    "keyboard_map": _op_keyboard_map,
    "snap_selection": _op_snap_selection,
    "get_spans": _op_get_spans,
    "apply_default_label": _op_apply_default_label,
    "export": _op_export,
}


def _error(code: str, message: str) -> dict:
    return {"ok": False, "error": {"code": code, "message": message}}


def handle_message(session: Session, message) -> dict:
    """Dispatch one SessionMessage against the session and build the reply."""
    if not isinstance(message, dict):
        return _error("bad_message", "message must be an object")
    op = message.get("op")
    if not isinstance(op, str):
        return _error("bad_message", "message needs a string 'op'")
    args = message.get("args", {})
    if not isinstance(args, dict):
        return _error("bad_args", "'args' must be an object")
    handler = _OPS.get(op)
    if handler is None:
        return _error("unknown_op", f"unknown operation {op!r}")
    try:
        result = handler(session, args)
    except _BadArgs as exc:
        return _error("bad_args", str(exc))
    except IndexError as exc:
        return _error("out_of_range", str(exc))
    except ValueError as exc:
        return _error("invalid_argument", str(exc))
    return {"ok": True, "result": result}


def replay(session: Session, messages) -> list[dict]:
    """Apply a recorded message log in order; returns the replies."""
    return [handle_message(session, message) for message in messages]
