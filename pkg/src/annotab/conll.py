"""Tab-separated (CoNLL-like) corpus model: parse, edit, serialize.

The on-disk format puts one token per line with tab-separated columns,
"#"-prefixed comment lines above the token block, and blank lines between
utterances.  Parsing is tolerant (ragged rows, repeated blank lines,
CRLF endings); serialization always emits the canonical form, so
``parse_corpus(serialize_corpus(c)) == c`` for every corpus value.
"""

from dataclasses import dataclass, field

_LINE_BREAKS = ("\n", "\r")


class ParseError(ValueError):
    """Unparseable corpus text; ``line`` is the offending 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class Diagnostic:
    """A validation finding. ``utterance`` is the 0-based utterance index."""

    severity: str  # "error" or "warning"
    code: str
    message: str
    utterance: int | None = None

    def __str__(self):
        where = f" (utterance {self.utterance + 1})" if self.utterance is not None else ""
        return f"{self.severity}: {self.message}{where}"


@dataclass
class Token:
    """One corpus row: an ordered list of column values.

    Only line-representable rows are allowed: at least one column, no tab or
    line break inside a value, not a single empty column (that would be a
    blank line), and the first column must not start with "#" (that would be
    a comment line).
    """

    columns: list[str]

    def __post_init__(self):
        if not self.columns:
            raise ValueError("token must have at least one column")
        for value in self.columns:
            if "\t" in value or any(br in value for br in _LINE_BREAKS):
                raise ValueError(f"column value {value!r} contains a tab or line break")
        if len(self.columns) == 1 and self.columns[0] == "":
            raise ValueError("a lone empty column is indistinguishable from a blank line")
        if self.columns[0].startswith("#"):
            raise ValueError(
                "first column may not start with '#' (the line would re-parse as a comment)"
            )

    @property
    def width(self) -> int:
        return len(self.columns)

    def get(self, index: int) -> str | None:
        """Value of the 1-based column ``index``, or None if the row is narrower."""
        if 1 <= index <= len(self.columns):
            return self.columns[index - 1]
        return None

    def set(self, index: int, value: str) -> None:
        """Overwrite the 1-based column ``index`` (which must exist)."""
        if not 1 <= index <= len(self.columns):
            raise IndexError(f"token has no column {index}")
        if "\t" in value or any(br in value for br in _LINE_BREAKS):
            raise ValueError(f"column value {value!r} contains a tab or line break")
        if index == 1:
            if value.startswith("#"):
                raise ValueError("first column may not start with '#'")
            if value == "" and len(self.columns) == 1:
                raise ValueError("a lone empty column is indistinguishable from a blank line")
        self.columns[index - 1] = value


@dataclass
class CommentLine:
    """A comment line; ``raw`` is the text after the "# " prefix.

    Comments of the form ``key = value`` (split on the first " = ") carry
    utterance metadata; everything else is preserved verbatim.
    """

    raw: str

    def __post_init__(self):
        if any(br in self.raw for br in _LINE_BREAKS):
            raise ValueError("comment text must be a single line")

    @property
    def parsed_key(self) -> str | None:
        key, sep, _ = self.raw.partition(" = ")
        return key if sep and key else None

    @property
    def parsed_value(self) -> str | None:
        key, sep, value = self.raw.partition(" = ")
        return value if sep and key else None


@dataclass
class Utterance:
    """Comment lines plus token rows for one sentence/segment.

    Token-less utterances are tolerated so that comment-only blocks (e.g.
    pure classification data built from raw text) can be represented.
    """

    comments: list[CommentLine] = field(default_factory=list)
    tokens: list[Token] = field(default_factory=list)

    def metadata(self) -> dict[str, str]:
        """First-wins mapping view of the ``key = value`` comments."""
        out: dict[str, str] = {}
        for comment in self.comments:
            key = comment.parsed_key
            if key is not None and key not in out:
                out[key] = comment.parsed_value
        return out

    def get_metadata(self, key: str) -> str | None:
        for comment in self.comments:
            if comment.parsed_key == key:
                return comment.parsed_value
        return None

    def set_metadata(self, key: str, value: str) -> None:
        """Overwrite the first ``key = ...`` comment (dropping any duplicates) or append one."""
        _check_metadata_key(key)
        if any(br in value for br in _LINE_BREAKS):
            raise ValueError("metadata value may not contain a line break")
        replacement = CommentLine(f"{key} = {value}")
        kept: list[CommentLine] = []
        replaced = False
        for comment in self.comments:
            if comment.parsed_key == key:
                if not replaced:
                    kept.append(replacement)
                    replaced = True
                continue
            kept.append(comment)
        if not replaced:
            kept.append(replacement)
        self.comments = kept

    def delete_metadata(self, key: str) -> bool:
        """Remove every ``key = ...`` comment; returns True if any was present."""
        kept = [c for c in self.comments if c.parsed_key != key]
        removed = len(kept) != len(self.comments)
        self.comments = kept
        return removed


@dataclass
class Corpus:
    """An ordered list of utterances, round-trippable to tab-separated text."""

    utterances: list[Utterance] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.utterances)

    def __iter__(self):
        return iter(self.utterances)

    def token_count(self) -> int:
        return sum(len(u.tokens) for u in self.utterances)

    def max_width(self) -> int:
        return max((t.width for u in self.utterances for t in u.tokens), default=0)


def _check_metadata_key(key: str) -> None:
    if not key:
        raise ValueError("metadata key must be non-empty")
    if any(br in key for br in _LINE_BREAKS):
        raise ValueError("metadata key may not contain a line break")
    if " = " in key:
        raise ValueError("metadata key may not contain ' = '")


def parse_corpus(text: str) -> Corpus:
    """Parse full file contents into a Corpus.

    Comment lines must precede token lines within an utterance block; a
    comment after token rows raises :class:`ParseError` with its line number.
    One or more blank lines end an utterance; a trailing blank line is not
    required.  A trailing CR is stripped from every line (CRLF tolerance).
    """
    utterances: list[Utterance] = []
    comments: list[CommentLine] = []
    tokens: list[Token] = []

    def flush():
        if comments or tokens:
            utterances.append(Utterance(list(comments), list(tokens)))
        comments.clear()
        tokens.clear()

    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.removesuffix("\r")
        if line == "":
            flush()
        elif line.startswith("#"):
            if tokens:
                raise ParseError("comment line after token lines in the same utterance", lineno)
            raw = line[1:]
            if raw.startswith(" "):
                raw = raw[1:]
            try:
                comments.append(CommentLine(raw))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from exc
        else:
            try:
                tokens.append(Token(line.split("\t")))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from exc
    flush()
    return Corpus(utterances)


def serialize_corpus(corpus: Corpus) -> str:
    """Emit canonical text: "# "-prefixed comments, tab-joined token rows,
    exactly one blank line between utterances, and a trailing newline."""
    blocks = []
    for index, utt in enumerate(corpus.utterances):
        if not utt.comments and not utt.tokens:
            raise ValueError(f"utterance {index + 1} has neither comments nor tokens")
        lines = [f"# {c.raw}" for c in utt.comments]
        lines.extend("\t".join(t.columns) for t in utt.tokens)
        blocks.append("\n".join(lines))
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


def add_column(corpus: Corpus, fill: str) -> int:
    """Append a trailing column with value ``fill`` to every token.

    Ragged utterances are first padded to their own maximum width with
    ``fill``.  Returns the new 1-based column index (previous corpus-wide
    maximum width + 1).
    """
    if "\t" in fill or any(br in fill for br in _LINE_BREAKS):
        raise ValueError("fill value may not contain a tab or line break")
    new_index = corpus.max_width() + 1
    for utt in corpus.utterances:
        if not utt.tokens:
            continue
        target = max(t.width for t in utt.tokens)
        for token in utt.tokens:
            token.columns.extend([fill] * (target - token.width))
            token.columns.append(fill)
    return new_index


def remove_column(corpus: Corpus, index: int) -> None:
    """Delete the 1-based column ``index`` from every token wide enough to have it.

    Narrower tokens are untouched.  Raises if no token has the column, or if
    removal would leave some token without representable content.
    """
    if index < 1 or index > corpus.max_width():
        raise ValueError(f"no such column: {index}")
    for utt in corpus.utterances:
        for token in utt.tokens:
            if token.width < index:
                continue
            remaining = token.columns[: index - 1] + token.columns[index:]
            if not remaining or remaining == [""]:
                raise ValueError(f"removing column {index} would leave an empty token")
            if remaining[0].startswith("#"):
                raise ValueError(
                    f"removing column {index} would leave a token starting with '#'"
                )
    for utt in corpus.utterances:
        for token in utt.tokens:
            if token.width >= index:
                del token.columns[index - 1]


def get_metadata(utt: Utterance, key: str) -> str | None:
    return utt.get_metadata(key)


def set_metadata(utt: Utterance, key: str, value: str) -> None:
    utt.set_metadata(key, value)


def validate_corpus(corpus: Corpus, output_columns: tuple[int, ...] = ()) -> list[Diagnostic]:
    """Non-mutating checks: ragged rows, duplicate metadata keys, and empty
    cells in the given (1-based) output columns."""
    diagnostics: list[Diagnostic] = []
    for index, utt in enumerate(corpus.utterances):
        widths = {t.width for t in utt.tokens}
        if len(widths) > 1:
            diagnostics.append(
                Diagnostic(
                    "warning",
                    "ragged-columns",
                    f"utterance {index + 1} has ragged column counts {sorted(widths)}",
                    utterance=index,
                )
            )
        seen: set[str] = set()
        for comment in utt.comments:
            key = comment.parsed_key
            if key is None:
                continue
            if key in seen:
                diagnostics.append(
                    Diagnostic(
                        "warning",
                        "duplicate-key",
                        f"utterance {index + 1} repeats metadata key {key!r}",
                        utterance=index,
                    )
                )
            seen.add(key)
        for column in output_columns:
            empty = sum(1 for t in utt.tokens if t.get(column) == "")
            if empty:
                diagnostics.append(
                    Diagnostic(
                        "warning",
                        "empty-cells",
                        f"utterance {index + 1} has {empty} empty cell(s) in column {column}",
                        utterance=index,
                    )
                )
    return diagnostics
