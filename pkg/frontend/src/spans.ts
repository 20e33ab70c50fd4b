/** Token spans, the BIO tag codec, and character-offset snapping. */

export interface Span {
  start: number;
  end: number;
  /** Bare entity type: never B-/I- prefixed, never the reserved "O". */
  label: string;
}

export function checkSpan(span: Span): void {
  if (span.start < 0 || span.end <= span.start) {
    throw new Error(`invalid span interval [${span.start}, ${span.end})`);
  }
  if (!span.label || span.label === "O") {
    throw new Error("span label must be non-empty and not the reserved 'O'");
  }
  if (span.label.startsWith("B-") || span.label.startsWith("I-")) {
    throw new Error(`span label ${JSON.stringify(span.label)} must not carry a B-/I- prefix`);
  }
}

export function bioEncode(spans: Span[], n: number): string[] {
  const tags = new Array<string>(n).fill("O");
  const ordered = [...spans].sort((a, b) => a.start - b.start || a.end - b.end);
  let previousEnd = 0;
  for (const span of ordered) {
    checkSpan(span);
    if (span.end > n) throw new Error(`span [${span.start}, ${span.end}) exceeds token count ${n}`);
    if (span.start < previousEnd) throw new Error(`overlapping spans at token ${span.start}`);
    previousEnd = span.end;
    tags[span.start] = `B-${span.label}`;
    for (let i = span.start + 1; i < span.end; i++) tags[i] = `I-${span.label}`;
  }
  return tags;
}

/**
 * Decode BIO tags into spans sorted by start.  Malformed input is repaired:
 * an I-tag without a matching open span starts one, a bare non-O tag reads
 * as a single-token span, empty and typeless cells count as outside.
 */
export function bioDecode(tags: string[]): Span[] {
  const spans: Span[] = [];
  let openStart: number | null = null;
  let openLabel = "";

  const close = (end: number) => {
    if (openStart !== null) spans.push({ start: openStart, end, label: openLabel });
    openStart = null;
    openLabel = "";
  };

  tags.forEach((tag, i) => {
    if (tag === "" || tag === "O" || tag === "B-" || tag === "I-") {
      close(i);
    } else if (tag.startsWith("B-")) {
      close(i);
      openStart = i;
      openLabel = tag.slice(2);
    } else if (tag.startsWith("I-")) {
      if (openStart === null || openLabel !== tag.slice(2)) {
        close(i);
        openStart = i;
        openLabel = tag.slice(2);
      }
    } else {
      close(i);
      openStart = i;
      openLabel = tag;
      close(i + 1);
    }
  });
  close(tags.length);
  return spans;
}

/** Join token texts with single spaces; return text and per-token offsets. */
export function joinedOffsets(texts: string[]): { text: string; offsets: [number, number][] } {
  const offsets: [number, number][] = [];
  let position = 0;
  for (const text of texts) {
    offsets.push([position, position + text.length]);
    position += text.length + 1;
  }
  return { text: texts.join(" "), offsets };
}

/**
 * Snap a character selection outward to whole-token boundaries: the minimal
 * token interval covering every intersecting token.  A zero-width selection
 * inside a token selects it; a selection entirely between tokens snaps to
 * the following token (or the last token at the end of the text).
 */
export function snapToTokens(
  offsets: [number, number][],
  charStart: number,
  charEnd: number,
  textLength: number,
): [number, number] {
  if (!offsets.length) throw new Error("cannot snap a selection: no tokens");
  if (!(0 <= charStart && charStart <= charEnd && charEnd <= textLength)) {
    throw new Error(
      `selection [${charStart}, ${charEnd}) out of range for text of length ${textLength}`,
    );
  }
  if (charStart === charEnd) {
    for (let i = 0; i < offsets.length; i++) {
      const [start, end] = offsets[i];
      if (start <= charStart && charStart < end) return [i, i + 1];
    }
    for (let i = 0; i < offsets.length; i++) {
      if (offsets[i][0] >= charStart) return [i, i + 1];
    }
    return [offsets.length - 1, offsets.length];
  }
  const hits: number[] = [];
  for (let i = 0; i < offsets.length; i++) {
    const [start, end] = offsets[i];
    if (start < charEnd && end > charStart) hits.push(i);
  }
  if (hits.length) return [hits[0], hits[hits.length - 1] + 1];
  for (let i = 0; i < offsets.length; i++) {
    if (offsets[i][0] >= charEnd) return [i, i + 1];
  }
  return [offsets.length - 1, offsets.length];
}
