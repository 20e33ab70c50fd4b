/** Task configuration: the JSON config format and label inference. */

import { Corpus, getMetadata } from "./conll.js";

export type TaskTypeName = "seq" | "seq_bio" | "class" | "seq2seq";

export const TASK_TYPES: TaskTypeName[] = ["seq", "seq_bio", "class", "seq2seq"];

export interface TaskConfig {
  title: string;
  type: TaskTypeName;
  /** 1-based column of the display text. */
  inputIndex: number;
  /** 1-based column of token-level annotations; null for class/seq2seq. */
  outputIndex: number | null;
  labels: string[];
  defaultLabel: string | null;
  id: number;
}

export class ConfigError extends Error {}

export function isWordLevel(type: TaskTypeName): boolean {
  return type === "seq" || type === "seq_bio";
}

export function checkTask(task: TaskConfig): string | null {
  if (!task.title) return "task title must be non-empty";
  if (task.title.includes(" = ") || /[\n\r]/.test(task.title)) {
    return "task title may not contain ' = ' or line breaks";
  }
  if (!Number.isInteger(task.inputIndex) || task.inputIndex < 1) {
    return "input index must be a positive integer";
  }
  if (isWordLevel(task.type)) {
    if (task.outputIndex === null || !Number.isInteger(task.outputIndex) || task.outputIndex < 1) {
      return `${task.type} task needs a positive output index`;
    }
  } else if (task.outputIndex !== null) {
    return `${task.type} task takes no output index`;
  }
  if (task.type === "seq2seq" && task.labels.length) return "seq2seq task takes no labels";
  const seen = new Set<string>();
  for (const label of task.labels) {
    if (!label) return "labels must be non-empty";
    if (/[\t\n\r]/.test(label)) return `label ${JSON.stringify(label)} contains a tab or line break`;
    if (seen.has(label)) return `duplicate label ${JSON.stringify(label)}`;
    seen.add(label);
  }
  if (!Number.isInteger(task.id) || task.id < 0) return "task id must be a non-negative integer";
  return null;
}

function parseIndex(value: unknown, name: string, position: number): number {
  if (typeof value === "number" && Number.isInteger(value)) return value;
  if (typeof value === "string" && /^-?\d+$/.test(value.trim())) return parseInt(value, 10);
  throw new ConfigError(`task ${position}: ${name} must be an integer`);
}

const KNOWN_FIELDS = new Set([
  "title", "type", "output_index", "input_index", "labels", "id", "default_label",
]);

function parseTask(obj: unknown, position: number): TaskConfig {
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ConfigError(`task ${position}: each task must be a JSON object`);
  }
  const record = obj as Record<string, unknown>;
  for (const name of Object.keys(record)) {
    if (!KNOWN_FIELDS.has(name)) console.warn(`task ${position}: ignoring unknown field '${name}'`);
  }
  const title = record.title;
  if (typeof title !== "string") throw new ConfigError(`task ${position}: missing string 'title'`);

  let typeName = record.type;
  if (typeof typeName === "object" && typeName !== null) {
    typeName = (typeName as Record<string, unknown>).name;
  }
  if (typeName === "span") typeName = "seq_bio"; // accepted alias
  if (typeof typeName !== "string" || !TASK_TYPES.includes(typeName as TaskTypeName)) {
    throw new ConfigError(`task ${position}: unknown task type ${JSON.stringify(typeName)}`);
  }
  const type = typeName as TaskTypeName;

  if (!("input_index" in record)) {
    throw new ConfigError(`task ${position}: missing required field 'input_index'`);
  }
  const inputIndex = parseIndex(record.input_index, "input_index", position);

  let outputIndex: number | null = null;
  if (isWordLevel(type)) {
    if (!("output_index" in record)) {
      throw new ConfigError(`task ${position}: missing required field 'output_index'`);
    }
    outputIndex = parseIndex(record.output_index, "output_index", position);
  } else if ("output_index" in record) {
    console.warn(`task ${position}: ignoring output_index on ${type} task`);
  }

  let labels = record.labels ?? [];
  if (!Array.isArray(labels) || !labels.every((l) => typeof l === "string")) {
    throw new ConfigError(`task ${position}: labels must be an array of strings`);
  }
  if (type === "seq2seq" && labels.length) {
    console.warn(`task ${position}: ignoring labels on seq2seq task`);
    labels = [];
  }

  const id = "id" in record ? parseIndex(record.id, "id", position) : position;
  let defaultLabel = record.default_label ?? null;
  if (defaultLabel !== null && typeof defaultLabel !== "string") {
    throw new ConfigError(`task ${position}: default_label must be a string`);
  }
  if (defaultLabel === null && type === "seq_bio") defaultLabel = "O";

  const task: TaskConfig = {
    title,
    type,
    inputIndex,
    outputIndex,
    labels: labels as string[],
    defaultLabel: defaultLabel as string | null,
    id,
  };
  const problem = checkTask(task);
  if (problem) throw new ConfigError(`task ${position}: ${problem}`);
  return task;
}

export function checkTaskSet(tasks: TaskConfig[]): void {
  const titles = new Set<string>();
  const ids = new Set<number>();
  tasks.forEach((task, position) => {
    if (titles.has(task.title)) {
      throw new ConfigError(`task ${position}: duplicate title ${JSON.stringify(task.title)}`);
    }
    if (ids.has(task.id)) throw new ConfigError(`task ${position}: duplicate id ${task.id}`);
    titles.add(task.title);
    ids.add(task.id);
  });
}

export function parseConfig(text: string): TaskConfig[] {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (exc) {
    throw new ConfigError(`config is not valid JSON: ${exc}`);
  }
  if (!Array.isArray(doc)) throw new ConfigError("config top level must be an array of tasks");
  const tasks = doc.map((obj, position) => parseTask(obj, position));
  checkTaskSet(tasks);
  return tasks;
}

export function serializeConfig(tasks: TaskConfig[]): string {
  const out = tasks.map((task) => {
    const obj: Record<string, unknown> = {
      title: task.title,
      type: { name: task.type, isWordLevel: isWordLevel(task.type) },
    };
    if (task.outputIndex !== null) obj.output_index = String(task.outputIndex);
    obj.input_index = String(task.inputIndex);
    obj.labels = task.labels;
    obj.id = task.id;
    if (task.defaultLabel !== null) obj.default_label = task.defaultLabel;
    return obj;
  });
  return JSON.stringify(out, null, 2);
}

function bioEntityType(tag: string): string | null {
  if (tag === "" || tag === "O") return null;
  if (tag.startsWith("B-") || tag.startsWith("I-")) return tag.slice(2) || null;
  return tag;
}

/** Label inventory implied by a task's existing annotations, sorted. */
export function inferLabels(corpus: Corpus, task: TaskConfig): string[] {
  if (task.type === "seq2seq") throw new Error("seq2seq tasks have no label inventory to infer");
  const found = new Set<string>();
  if (task.type === "class") {
    for (const utt of corpus) {
      const value = getMetadata(utt, task.title);
      if (value) found.add(value);
    }
    return [...found].sort();
  }
  let columnSeen = false;
  let anyTokens = false;
  for (const utt of corpus) {
    for (const token of utt.tokens) {
      anyTokens = true;
      const value = token[task.outputIndex! - 1];
      if (value === undefined) continue;
      columnSeen = true;
      if (task.type === "seq") {
        if (value) found.add(value);
      } else {
        const entity = bioEntityType(value);
        if (entity) found.add(entity);
      }
    }
  }
  if (!columnSeen && anyTokens) {
    throw new Error(`column absent: no token has column ${task.outputIndex}`);
  }
  return [...found].sort();
}
