/**
 * Tab-separated (CoNLL-like) corpus model.
 *
 * One token per line, tab-separated columns, "# " comment lines above the
 * token block, blank lines between utterances.  Mirrors the engine's file
 * contract exactly: serialize(parse(text)) is byte-identity on canonical
 * files and parse(serialize(corpus)) is value-identity always.
 */

export interface Utterance {
  /** Comment text without the leading "# ". */
  comments: string[];
  /** Token rows; each row is its ordered column values. */
  tokens: string[][];
}

export type Corpus = Utterance[];

export class ParseError extends Error {
  constructor(message: string, readonly line: number) {
    super(`line ${line}: ${message}`);
  }
}

function checkCell(value: string): string | null {
  if (value.includes("\t")) return "column value contains a tab";
  if (value.includes("\n") || value.includes("\r")) return "column value contains a line break";
  return null;
}

/** Reject rows that would not re-parse as the same row. */
export function checkTokenRow(columns: string[]): string | null {
  if (columns.length === 0) return "token must have at least one column";
  for (const value of columns) {
    const problem = checkCell(value);
    if (problem) return problem;
  }
  if (columns.length === 1 && columns[0] === "") {
    return "a lone empty column is indistinguishable from a blank line";
  }
  if (columns[0].startsWith("#")) {
    return "first column may not start with '#'";
  }
  return null;
}

export function parseCorpus(text: string): Corpus {
  const corpus: Corpus = [];
  let comments: string[] = [];
  let tokens: string[][] = [];

  const flush = () => {
    if (comments.length || tokens.length) corpus.push({ comments, tokens });
    comments = [];
    tokens = [];
  };

  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    let line = lines[i];
    if (line.endsWith("\r")) line = line.slice(0, -1);
    if (line === "") {
      flush();
    } else if (line.startsWith("#")) {
      if (tokens.length) {
        throw new ParseError("comment line after token lines in the same utterance", i + 1);
      }
      let raw = line.slice(1);
      if (raw.startsWith(" ")) raw = raw.slice(1);
      if (raw.includes("\r")) throw new ParseError("comment contains a carriage return", i + 1);
      comments.push(raw);
    } else {
      const columns = line.split("\t");
      const problem = checkTokenRow(columns);
      if (problem) throw new ParseError(problem, i + 1);
      tokens.push(columns);
    }
  }
  flush();
  return corpus;
}

export function serializeCorpus(corpus: Corpus): string {
  const blocks = corpus.map((utt, index) => {
    if (!utt.comments.length && !utt.tokens.length) {
      throw new Error(`utterance ${index + 1} has neither comments nor tokens`);
    }
    const lines = utt.comments.map((raw) => `# ${raw}`);
    for (const token of utt.tokens) lines.push(token.join("\t"));
    return lines.join("\n");
  });
  return blocks.length ? blocks.join("\n\n") + "\n" : "";
}

/** Key of a "key = value" comment (split on the first " = "), else null. */
export function parsedKey(raw: string): string | null {
  const at = raw.indexOf(" = ");
  return at > 0 ? raw.slice(0, at) : null;
}

export function parsedValue(raw: string): string | null {
  const at = raw.indexOf(" = ");
  return at > 0 ? raw.slice(at + 3) : null;
}

export function getMetadata(utt: Utterance, key: string): string | null {
  for (const raw of utt.comments) {
    if (parsedKey(raw) === key) return parsedValue(raw);
  }
  return null;
}

export function metadata(utt: Utterance): Map<string, string> {
  const out = new Map<string, string>();
  for (const raw of utt.comments) {
    const key = parsedKey(raw);
    if (key !== null && !out.has(key)) out.set(key, parsedValue(raw)!);
  }
  return out;
}

function checkMetadataKey(key: string): void {
  if (!key) throw new Error("metadata key must be non-empty");
  if (key.includes("\n") || key.includes("\r")) {
    throw new Error("metadata key may not contain a line break");
  }
  if (key.includes(" = ")) throw new Error("metadata key may not contain ' = '");
}

/** Overwrite the first "key = ..." comment (dropping duplicates) or append. */
export function setMetadata(utt: Utterance, key: string, value: string): void {
  checkMetadataKey(key);
  if (value.includes("\n") || value.includes("\r")) {
    throw new Error("metadata value may not contain a line break");
  }
  const replacement = `${key} = ${value}`;
  const kept: string[] = [];
  let replaced = false;
  for (const raw of utt.comments) {
    if (parsedKey(raw) === key) {
      if (!replaced) {
        kept.push(replacement);
        replaced = true;
      }
      continue;
    }
    kept.push(raw);
  }
  if (!replaced) kept.push(replacement);
  utt.comments = kept;
}

export function deleteMetadata(utt: Utterance, key: string): boolean {
  const kept = utt.comments.filter((raw) => parsedKey(raw) !== key);
  const removed = kept.length !== utt.comments.length;
  utt.comments = kept;
  return removed;
}

export function maxWidth(corpus: Corpus): number {
  let width = 0;
  for (const utt of corpus) {
    for (const token of utt.tokens) width = Math.max(width, token.length);
  }
  return width;
}

export function tokenCount(corpus: Corpus): number {
  return corpus.reduce((n, utt) => n + utt.tokens.length, 0);
}

/**
 * Append a trailing column filled with `fill`; ragged utterances are first
 * padded to their own max width.  Returns the new 1-based column index.
 */
export function addColumn(corpus: Corpus, fill: string): number {
  const problem = checkCell(fill);
  if (problem) throw new Error(problem);
  const newIndex = maxWidth(corpus) + 1;
  for (const utt of corpus) {
    if (!utt.tokens.length) continue;
    const target = Math.max(...utt.tokens.map((t) => t.length));
    for (const token of utt.tokens) {
      while (token.length < target) token.push(fill);
      token.push(fill);
    }
  }
  return newIndex;
}

/** Delete the 1-based column from every token wide enough to have it. */
export function removeColumn(corpus: Corpus, index: number): void {
  if (index < 1 || index > maxWidth(corpus)) throw new Error(`no such column: ${index}`);
  for (const utt of corpus) {
    for (const token of utt.tokens) {
      if (token.length < index) continue;
      const remaining = token.slice(0, index - 1).concat(token.slice(index));
      const problem = checkTokenRow(remaining);
      if (problem) throw new Error(`removing column ${index}: ${problem}`);
    }
  }
  for (const utt of corpus) {
    for (const token of utt.tokens) {
      if (token.length >= index) token.splice(index - 1, 1);
    }
  }
}

/** Build a single-column corpus from plain text (blank lines split utterances). */
export function importRawText(text: string): Corpus {
  const corpus: Corpus = [];
  let block: string[] = [];
  const flush = () => {
    const tokens = block.join(" ").split(/\s+/).filter((t) => t.length);
    if (tokens.length) {
      for (const tok of tokens) {
        const problem = checkTokenRow([tok]);
        if (problem) throw new Error(`utterance ${corpus.length + 1}: ${problem}`);
      }
      corpus.push({ comments: [], tokens: tokens.map((t) => [t]) });
    }
    block = [];
  };
  for (const line of text.split("\n")) {
    if (line.trim() === "") flush();
    else block.push(line);
  }
  flush();
  return corpus;
}
