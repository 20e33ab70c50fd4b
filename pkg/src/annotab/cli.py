"""Command-line front door: validate, convert, stats, infer-labels,
export-machamp, serve-ui.

Exit codes: 0 success, 1 malformed input, 2 unreadable/unwritable file,
64 usage errors.
"""

import argparse
import json
import os
import sys
from datetime import datetime
from pathlib import Path

from . import report
from .conll import Corpus, ParseError, Token, Utterance, parse_corpus, serialize_corpus, validate_corpus
from .convert import (
    ConversionError,
    FieldMapping,
    StandoffDocument,
    export_machamp,
    import_jsonl,
    import_raw_text,
    standoff_to_bio,
)
from .session import STATUS_KEY_PREFIX, open_session
from .tasks import ConfigError, TaskSet, parse_config, serialize_config, validate_tasks

USAGE_ERROR = 64


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _color_enabled() -> bool:
    return sys.stdout.isatty() and not os.environ.get("ANNOT_NO_COLOR")


def _paint(text: str, code: str) -> str:
    return f"\033[{code}m{text}\033[0m" if _color_enabled() else text


def _fail(message: str, code: int) -> int:
    print(_paint(f"error: {message}", "31"), file=sys.stderr)
    return code


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_tasks(path: str) -> TaskSet:
    return parse_config(_read_text(path))


def _write_output(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _cmd_validate(args) -> int:
    corpus = parse_corpus(_read_text(args.input))
    tasks = _load_tasks(args.tasks) if args.tasks else TaskSet([])
    output_columns = tuple(
        t.output_index for t in tasks if t.output_index is not None
    )
    diagnostics = validate_corpus(corpus, output_columns) + validate_tasks(corpus, tasks)
    for diag in diagnostics:
        color = "31" if diag.severity == "error" else "33"
        print(_paint(str(diag), color))
    errors = sum(1 for d in diagnostics if d.severity == "error")
    warnings = len(diagnostics) - errors
    print(f"{errors} errors, {warnings} warnings")
    return 0 if errors == 0 else 1


def _strip_statuses(corpus: Corpus) -> None:
    for utt in corpus:
        for key in list(utt.metadata()):
            if key.startswith(STATUS_KEY_PREFIX):
                utt.delete_metadata(key)


def _timestamped(path: str, when: datetime) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}_{when.strftime('%Y-%m-%dT%H-%M-%S')}{p.suffix}"))


def _cmd_convert(args) -> int:
    raw = _read_text(args.input)
    if args.source == "raw":
        corpus = import_raw_text(raw)
    elif args.source == "jsonl":
        records = [json.loads(line) for line in raw.splitlines() if line.strip()]
        mapping = FieldMapping(args.text_field, args.label_field, args.task_title)
        corpus, task = import_jsonl(records, mapping)
        if args.tasks_out:
            Path(args.tasks_out).write_text(
                serialize_config(TaskSet([task])) + "\n", encoding="utf-8"
            )
    elif args.source == "standoff":
        doc = StandoffDocument.from_json(raw)
        result = standoff_to_bio(doc)
        for adjustment in result.adjustments:
            print(_paint(f"snapped: {adjustment}", "33"), file=sys.stderr)
        corpus = Corpus(
            [Utterance(tokens=[Token([tok, tag]) for tok, tag in zip(result.tokens, result.tags)])]
        ) if result.tokens else Corpus([])
    else:  # conll: parse + re-emit canonical form
        corpus = parse_corpus(raw)

    if args.clean:
        _strip_statuses(corpus)
    out = args.out
    if out and args.datetime:
        out = _timestamped(out, datetime.now())
    _write_output(out, serialize_corpus(corpus))
    if out:
        print(f"wrote {out}", file=sys.stderr)
    return 0


def _cmd_stats(args) -> int:
    corpus = parse_corpus(_read_text(args.input))
    stats = report.corpus_stats(corpus)
    print(f"{stats.utterances} utterances, {stats.tokens} tokens")
    tasks = _load_tasks(args.tasks) if args.tasks else TaskSet([])
    for task in tasks:
        histogram = report.label_histogram(corpus, task)
        print(f"{task.title} ({task.task_type.value}):")
        for label, count in histogram.items():
            print(f"  {label}\t{count}")
    if args.report_dir:
        written = report.write_report(corpus, tasks, Path(args.report_dir))
        for path in written:
            print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_infer_labels(args) -> int:
    from .tasks import TaskType, infer_labels

    corpus = parse_corpus(_read_text(args.input))
    tasks = _load_tasks(args.tasks)
    for task in tasks:
        if task.task_type is TaskType.SEQ2SEQ:
            continue
        labels = infer_labels(corpus, task)
        print(f"{task.title}: {json.dumps(labels, ensure_ascii=False)}")
    return 0


def _cmd_export_machamp(args) -> int:
    tasks = _load_tasks(args.tasks)
    out = Path(args.out)
    config_text, command_text = export_machamp(tasks, args.input, config_name=out.name)
    out.write_text(config_text, encoding="utf-8")
    command_path = out.with_suffix(".cmd")
    command_path.write_text(command_text, encoding="utf-8")
    print(f"wrote {out}", file=sys.stderr)
    print(f"wrote {command_path}", file=sys.stderr)
    print(command_text, end="")
    return 0


def _cmd_serve_ui(args) -> int:
    from .server import serve

    corpus = parse_corpus(_read_text(args.input))
    tasks = _load_tasks(args.tasks) if args.tasks else TaskSet([])
    session = open_session(corpus, tasks)
    ui_dir = Path(args.ui_dir) if args.ui_dir else None
    if ui_dir is not None and not ui_dir.is_dir():
        return _fail(f"UI directory not found: {ui_dir}", 2)
    serve(session, ui_dir, args.port)
    return 0


def build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="annotab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a corpus (and optionally its task config)")
    p.add_argument("input")
    p.add_argument("--tasks", help="task config JSON")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("convert", help="import raw/jsonl/standoff data as tab-separated text")
    p.add_argument("input")
    p.add_argument("--from", dest="source", required=True,
                   choices=["raw", "jsonl", "standoff", "conll"])
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--text-field", default="text", help="jsonl: record key holding the text")
    p.add_argument("--label-field", default=None, help="jsonl: record key holding labels")
    p.add_argument("--task-title", default="label", help="jsonl: title for the resulting task")
    p.add_argument("--tasks-out", help="jsonl: also write the inferred task config here")
    p.add_argument("--datetime", action="store_true",
                   help="append the current datetime to the output filename")
    p.add_argument("--clean", action="store_true", help="strip status metadata from the output")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("stats", help="utterance/token counts and label histograms")
    p.add_argument("input")
    p.add_argument("--tasks", help="task config JSON")
    p.add_argument("--report-dir", help="also write TSV tables and PNG charts here")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("infer-labels", help="print the label inventory each task's data implies")
    p.add_argument("input")
    p.add_argument("--tasks", required=True, help="task config JSON")
    p.set_defaults(func=_cmd_infer_labels)

    p = sub.add_parser("export-machamp", help="write a MaChAmp dataset config and train command")
    p.add_argument("input", help="training data path to reference in the config")
    p.add_argument("--tasks", required=True, help="task config JSON")
    p.add_argument("--out", default="machamp.json", help="config output path")
    p.set_defaults(func=_cmd_export_machamp)

    p = sub.add_parser("serve-ui", help="host the browser UI and corpus on loopback")
    p.add_argument("input")
    p.add_argument("--tasks", help="task config JSON")
    p.add_argument("--port", type=int, default=8577)
    p.add_argument("--ui-dir", help="directory with the built UI bundle")
    p.set_defaults(func=_cmd_serve_ui)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        return _fail(f"cannot read {exc.filename}: no such file", 2)
    except PermissionError as exc:
        return _fail(f"cannot access {exc.filename}: permission denied", 2)
    except IsADirectoryError as exc:
        return _fail(f"{exc.filename} is a directory", 2)
    except UnicodeDecodeError as exc:
        return _fail(f"input is not valid UTF-8: {exc}", 1)
    except (ParseError, ConfigError, ConversionError, ValueError) as exc:
        # json.JSONDecodeError is a ValueError, so malformed JSON lands here too
        return _fail(str(exc), 1)


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
