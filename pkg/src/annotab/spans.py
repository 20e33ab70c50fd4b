"""Token spans, the BIO tag codec, and character-offset snapping."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Span:
    """Half-open token interval [start, end) carrying an entity type.

    The label is the bare type, never B-/I- prefixed, and never the reserved
    outside tag "O".
    """

    start: int
    end: int
    label: str

    def __post_init__(self):
        if self.start < 0 or self.end <= self.start:
            raise ValueError(f"invalid span interval [{self.start}, {self.end})")
        if not self.label or self.label == "O":
            raise ValueError("span label must be non-empty and not the reserved 'O'")
        if self.label.startswith(("B-", "I-")):
            raise ValueError(f"span label {self.label!r} must not carry a B-/I- prefix")


def bio_encode(spans: list[Span], n: int) -> list[str]:
    """Encode non-overlapping spans as ``n`` BIO tags.

    Position i gets "B-<label>" at a span start, "I-<label>" inside a span,
    and "O" elsewhere.  Overlapping spans (or spans outside [0, n)) are
    rejected.
    """
    tags = ["O"] * n
    previous_end = 0
    for span in sorted(spans, key=lambda s: (s.start, s.end)):
        if span.end > n:
            raise ValueError(f"span [{span.start}, {span.end}) exceeds token count {n}")
        if span.start < previous_end:
            raise ValueError(f"overlapping spans at token {span.start}")
        previous_end = span.end
        tags[span.start] = f"B-{span.label}"
        for i in range(span.start + 1, span.end):
            tags[i] = f"I-{span.label}"
    return tags


def bio_decode(tags: list[str]) -> list[Span]:
    """Decode a BIO tag sequence into spans sorted by start.

    Malformed input is repaired rather than rejected: an I-tag without a
    matching open span starts a new one, a bare tag (no B-/I- prefix, not
    "O") is read as a single-token B-tag, and empty or typeless cells count
    as outside.
    """
    spans: list[Span] = []
    open_start: int | None = None
    open_label: str | None = None

    def close(end: int):
        nonlocal open_start, open_label
        if open_start is not None:
            spans.append(Span(open_start, end, open_label))
        open_start = open_label = None

    for i, tag in enumerate(tags):
        if tag in ("", "O", "B-", "I-"):
            close(i)
        elif tag.startswith("B-"):
            close(i)
            open_start, open_label = i, tag[2:]
        elif tag.startswith("I-"):
            if open_label != tag[2:]:
                close(i)
                open_start, open_label = i, tag[2:]
        else:
            close(i)
            open_start, open_label = i, tag
            close(i + 1)
    close(len(tags))
    return spans


def joined_offsets(texts: list[str]) -> tuple[str, list[tuple[int, int]]]:
    """Join token texts with single spaces; return the display string and the
    half-open character offsets of each token within it."""
    offsets = []
    position = 0
    for text in texts:
        offsets.append((position, position + len(text)))
        position += len(text) + 1
    return " ".join(texts), offsets


def snap_to_tokens(
    offsets: list[tuple[int, int]], char_start: int, char_end: int, text_length: int
) -> tuple[int, int]:
    """Snap a character selection outward to whole-token boundaries.

    Returns the minimal half-open token interval covering every token whose
    character span intersects [char_start, char_end).  A zero-width selection
    inside a token selects that token; a selection entirely between tokens
    snaps to the following token (or the last token at the very end of the
    text).
    """
    if not offsets:
        raise ValueError("cannot snap a selection: no tokens")
    if not 0 <= char_start <= char_end <= text_length:
        raise ValueError(
            f"selection [{char_start}, {char_end}) out of range for text of length {text_length}"
        )
    if char_start == char_end:
        for i, (start, end) in enumerate(offsets):
            if start <= char_start < end:
                return (i, i + 1)
        for i, (start, _) in enumerate(offsets):
            if start >= char_start:
                return (i, i + 1)
        return (len(offsets) - 1, len(offsets))
    hits = [
        i
        for i, (start, end) in enumerate(offsets)
        if start < char_end and end > char_start
    ]
    if hits:
        return (hits[0], hits[-1] + 1)
    for i, (start, _) in enumerate(offsets):
        if start >= char_end:
            return (i, i + 1)
    return (len(offsets) - 1, len(offsets))
