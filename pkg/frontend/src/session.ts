/**
 * The in-browser annotation engine: a single-writer session over a corpus
 * and its tasks.  Statuses persist inside the corpus as "status:<title>"
 * metadata comments, so files round-trip between sessions and hosts.
 */

import {
  Corpus,
  Utterance,
  deleteMetadata,
  getMetadata,
  parsedKey,
  serializeCorpus,
  setMetadata,
  tokenCount,
  maxWidth,
} from "./conll.js";
import { Span, bioDecode, bioEncode, joinedOffsets, snapToTokens } from "./spans.js";
import { TaskConfig, isWordLevel } from "./tasks.js";

export const STATUS_KEY_PREFIX = "status:";
export const EXPORT_BASENAME = "annotations";
export const EXPORT_EXTENSION = ".conll";

export type StatusValue = "completed" | "wrong" | "unsure" | "cleared";
export const STATUS_VALUES: StatusValue[] = ["completed", "wrong", "unsure", "cleared"];

export interface Progress {
  completed: number;
  wrong: number;
  unsure: number;
  cleared: number;
}

export type Mode = "keyboard" | "search";
const KEYBOARD_LIMIT = 10;

export function annotationMode(task: TaskConfig): Mode {
  return task.labels.length <= KEYBOARD_LIMIT ? "keyboard" : "search";
}

/** Digit bindings "1".."9","0" for up to ten labels; empty in search mode. */
export function keyboardMap(task: TaskConfig): Record<string, string> {
  if (annotationMode(task) !== "keyboard") return {};
  const keys = ["1", "2", "3", "4", "5", "6", "7", "8", "9", "0"];
  const map: Record<string, string> = {};
  task.labels.forEach((label, i) => {
    if (i < keys.length) map[keys[i]] = label;
  });
  return map;
}

/** Prefix matches first, then substring matches, config order within each. */
export function labelSearch(task: TaskConfig, query: string): string[] {
  const needle = query.toLowerCase();
  const prefix = task.labels.filter((l) => l.toLowerCase().startsWith(needle));
  const rest = task.labels.filter(
    (l) => l.toLowerCase().includes(needle) && !l.toLowerCase().startsWith(needle),
  );
  return prefix.concat(rest);
}

function statusKey(task: TaskConfig): string {
  return STATUS_KEY_PREFIX + task.title;
}

function displayCells(utt: Utterance, inputIndex: number): string[] {
  return utt.tokens.map((token, position) => {
    const value = token[inputIndex - 1];
    if (value === undefined) {
      throw new Error(`token ${position} has no input column ${inputIndex}`);
    }
    return value;
  });
}

export function snapSelection(
  utt: Utterance,
  task: TaskConfig,
  charStart: number,
  charEnd: number,
): [number, number] {
  const { text, offsets } = joinedOffsets(displayCells(utt, task.inputIndex));
  return snapToTokens(offsets, charStart, charEnd, text.length);
}

function pad2(n: number): string {
  return String(n).padStart(2, "0");
}

function timestamp(now: Date): string {
  return (
    `${now.getFullYear()}-${pad2(now.getMonth() + 1)}-${pad2(now.getDate())}` +
    `T${pad2(now.getHours())}-${pad2(now.getMinutes())}-${pad2(now.getSeconds())}`
  );
}

export class SessionError extends Error {}

export class Session {
  corpus: Corpus;
  tasks: TaskConfig[];
  cursor: number | null;
  activeTaskId: number | null;
  /** (utterance index, task id) -> status; cleared is never stored. */
  statuses: Map<string, StatusValue>;

  constructor(corpus: Corpus, tasks: TaskConfig[]) {
    this.corpus = corpus;
    this.tasks = tasks;
    this.cursor = corpus.length ? 0 : null;
    this.activeTaskId = tasks.length ? tasks[0].id : null;
    this.statuses = new Map();
  }

  get utteranceCount(): number {
    return this.corpus.length;
  }

  task(taskId: number): TaskConfig {
    const task = this.tasks.find((t) => t.id === taskId);
    if (!task) throw new Error(`no task with id ${taskId}`);
    return task;
  }

  utterance(uttIndex: number): Utterance {
    if (!Number.isInteger(uttIndex) || uttIndex < 0 || uttIndex >= this.corpus.length) {
      throw new RangeError(`utterance index ${uttIndex} out of range`);
    }
    return this.corpus[uttIndex];
  }

  setCursor(index: number): number {
    this.utterance(index);
    this.cursor = index;
    return index;
  }

  moveCursor(delta: number): number | null {
    if (this.cursor === null) return null;
    this.cursor = Math.max(0, Math.min(this.corpus.length - 1, this.cursor + delta));
    return this.cursor;
  }

  setActiveTask(taskId: number): void {
    this.task(taskId);
    this.activeTaskId = taskId;
  }

  annotateToken(uttIndex: number, tokenIndex: number, taskId: number, label: string): void {
    const task = this.task(taskId);
    if (task.type !== "seq") throw new Error(`task '${task.title}' is not a seq task`);
    if (!task.labels.includes(label) && label !== task.defaultLabel) {
      throw new Error(`label ${JSON.stringify(label)} is not in task '${task.title}'s inventory`);
    }
    const utt = this.utterance(uttIndex);
    if (tokenIndex < 0 || tokenIndex >= utt.tokens.length) {
      throw new RangeError(`token index ${tokenIndex} out of range`);
    }
    utt.tokens[tokenIndex][task.outputIndex! - 1] = label;
  }

  spans(uttIndex: number, taskId: number): Span[] {
    const task = this.task(taskId);
    if (task.type !== "seq_bio") throw new Error(`task '${task.title}' is not a seq_bio task`);
    const utt = this.utterance(uttIndex);
    return bioDecode(utt.tokens.map((t) => t[task.outputIndex! - 1] ?? ""));
  }

  /** Overlapping spans are removed; the reserved label "O" only deletes. */
  annotateSpan(
    uttIndex: number,
    range: [number, number],
    taskId: number,
    label: string,
  ): void {
    const task = this.task(taskId);
    if (task.type !== "seq_bio") throw new Error(`task '${task.title}' is not a seq_bio task`);
    const utt = this.utterance(uttIndex);
    const [start, end] = range;
    const n = utt.tokens.length;
    if (!(0 <= start && start < end && end <= n)) {
      throw new Error(`invalid token range [${start}, ${end}) for ${n} tokens`);
    }
    const kept = this.spans(uttIndex, taskId).filter((s) => s.end <= start || s.start >= end);
    if (label !== "O") kept.push({ start, end, label });
    const tags = bioEncode(kept, n);
    utt.tokens.forEach((token, i) => {
      token[task.outputIndex! - 1] = tags[i];
    });
  }

  annotateClass(uttIndex: number, taskId: number, label: string): void {
    const task = this.task(taskId);
    if (task.type !== "class") throw new Error(`task '${task.title}' is not a class task`);
    if (!task.labels.includes(label)) {
      throw new Error(`label ${JSON.stringify(label)} is not in task '${task.title}'s inventory`);
    }
    setMetadata(this.utterance(uttIndex), task.title, label);
  }

  annotateSeq2seq(uttIndex: number, taskId: number, targetText: string): void {
    const task = this.task(taskId);
    if (task.type !== "seq2seq") throw new Error(`task '${task.title}' is not a seq2seq task`);
    const utt = this.utterance(uttIndex);
    if (targetText === "") deleteMetadata(utt, task.title);
    else setMetadata(utt, task.title, targetText);
  }

  snapSelection(
    uttIndex: number,
    taskId: number,
    charStart: number,
    charEnd: number,
  ): [number, number] {
    return snapSelection(this.utterance(uttIndex), this.task(taskId), charStart, charEnd);
  }

  applyDefaultLabel(taskId: number): number {
    const task = this.task(taskId);
    if (!isWordLevel(task.type)) throw new Error(`task '${task.title}' has no output column`);
    if (!task.defaultLabel) {
      throw new Error(`task '${task.title}' has no default label configured`);
    }
    let filled = 0;
    for (const utt of this.corpus) {
      for (const token of utt.tokens) {
        if (token[task.outputIndex! - 1] === "") {
          token[task.outputIndex! - 1] = task.defaultLabel;
          filled++;
        }
      }
    }
    return filled;
  }

  setStatus(uttIndex: number, taskId: number, status: StatusValue): void {
    if (!STATUS_VALUES.includes(status)) throw new Error(`unknown status ${String(status)}`);
    const task = this.task(taskId);
    const utt = this.utterance(uttIndex);
    const key = `${uttIndex}:${taskId}`;
    if (status === "cleared") {
      this.statuses.delete(key);
      deleteMetadata(utt, statusKey(task));
    } else {
      this.statuses.set(key, status);
      setMetadata(utt, statusKey(task), status);
    }
  }

  getStatus(uttIndex: number, taskId: number): StatusValue {
    this.utterance(uttIndex);
    this.task(taskId);
    return this.statuses.get(`${uttIndex}:${taskId}`) ?? "cleared";
  }

  getProgress(taskId: number): Progress {
    this.task(taskId);
    const progress: Progress = { completed: 0, wrong: 0, unsure: 0, cleared: 0 };
    for (const [key, status] of this.statuses) {
      if (parseInt(key.split(":")[1], 10) !== taskId) continue;
      if (status === "completed") progress.completed++;
      else if (status === "wrong") progress.wrong++;
      else if (status === "unsure") progress.unsure++;
    }
    progress.cleared =
      this.corpus.length - (progress.completed + progress.wrong + progress.unsure);
    return progress;
  }

  /** Serialize for download; `clean` strips status metadata from the output only. */
  export(withDatetime = false, clean = false, now?: Date): { filename: string; text: string } {
    let corpus = this.corpus;
    if (clean) {
      corpus = this.corpus.map((utt) => ({
        comments: utt.comments.filter((raw) => {
          const key = parsedKey(raw);
          return !(key !== null && key.startsWith(STATUS_KEY_PREFIX));
        }),
        tokens: utt.tokens,
      }));
    }
    let name = EXPORT_BASENAME;
    if (withDatetime) name += `_${timestamp(now ?? new Date())}`;
    return { filename: name + EXPORT_EXTENSION, text: serializeCorpus(corpus) };
  }
}

function ensureOutputColumn(corpus: Corpus, task: TaskConfig): void {
  const fill = task.defaultLabel ?? "";
  for (const utt of corpus) {
    for (const token of utt.tokens) {
      while (token.length < task.outputIndex! - 1) token.push("");
      if (token.length < task.outputIndex!) token.push(fill);
    }
  }
}

/**
 * Open a session: fail on missing input columns, create absent output
 * columns filled with the default label, restore persisted statuses.
 */
export function openSession(corpus: Corpus, tasks: TaskConfig[]): Session {
  const width = maxWidth(corpus);
  if (tokenCount(corpus) > 0) {
    for (const task of tasks) {
      if (task.inputIndex > width) {
        throw new SessionError(
          `task '${task.title}': input column ${task.inputIndex} is absent`,
        );
      }
    }
  }
  for (const task of tasks) {
    if (isWordLevel(task.type)) ensureOutputColumn(corpus, task);
  }
  const session = new Session(corpus, tasks);
  corpus.forEach((utt, uttIndex) => {
    for (const task of tasks) {
      const value = getMetadata(utt, statusKey(task));
      if (value === "completed" || value === "wrong" || value === "unsure") {
        session.statuses.set(`${uttIndex}:${task.id}`, value);
      }
    }
  });
  return session;
}
