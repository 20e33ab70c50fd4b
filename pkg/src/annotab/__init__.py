"""annotab: token-level text annotation on tab-separated (CoNLL-like) files."""

from .conll import (
    CommentLine,
    Corpus,
    Diagnostic,
    ParseError,
    Token,
    Utterance,
    add_column,
    parse_corpus,
    remove_column,
    serialize_corpus,
    validate_corpus,
)
from .convert import (
    CharSpan,
    ConversionError,
    FieldMapping,
    SnapAdjustment,
    StandoffConversion,
    StandoffDocument,
    bio_to_standoff,
    export_machamp,
    import_jsonl,
    import_raw_text,
    standoff_to_bio,
)
from .session import (
    Progress,
    Session,
    SessionError,
    Status,
    annotation_mode,
    keyboard_map,
    label_search,
    open_session,
    snap_selection,
)
from .spans import Span, bio_decode, bio_encode
from .tasks import (
    ConfigError,
    TaskConfig,
    TaskSet,
    TaskType,
    infer_labels,
    parse_config,
    serialize_config,
    validate_tasks,
)

__version__ = "0.1.0"

__all__ = [
    "CharSpan",
    "CommentLine",
    "ConfigError",
    "ConversionError",
    "Corpus",
    "Diagnostic",
    "FieldMapping",
    "ParseError",
    "Progress",
    "Session",
    "SessionError",
    "SnapAdjustment",
    "Span",
    "StandoffConversion",
    "StandoffDocument",
    "Status",
    "TaskConfig",
    "TaskSet",
    "TaskType",
    "Token",
    "Utterance",
    "add_column",
    "annotation_mode",
    "bio_decode",
    "bio_encode",
    "bio_to_standoff",
    "export_machamp",
    "import_jsonl",
    "import_raw_text",
    "infer_labels",
    "keyboard_map",
    "label_search",
    "open_session",
    "parse_config",
    "parse_corpus",
    "remove_column",
    "serialize_config",
    "serialize_corpus",
    "snap_selection",
    "standoff_to_bio",
    "validate_corpus",
    "validate_tasks",
]
