/**
 * The SessionMessage boundary: the UI never touches a Session directly, it
 * sends `{op, args}` requests and consumes `{ok, result}` or
 * `{ok: false, error}` replies.  The same wire contract is spoken by the
 * loopback host's POST /api/message endpoint, so the UI works identically
 * against the in-browser engine and a remote session.
 */

import { metadata } from "./conll.js";
import { Session, StatusValue, annotationMode, keyboardMap, labelSearch } from "./session.js";
import { serializeConfig } from "./tasks.js";

export interface SessionMessage {
  op: string;
  args?: Record<string, unknown>;
}

export type Reply =
  | { ok: true; result: unknown }
  | { ok: false; error: { code: string; message: string } };

class BadArgs extends Error {}

function intArg(args: Record<string, unknown>, name: string): number {
  const value = args[name];
  if (typeof value !== "number" || !Number.isInteger(value)) {
    throw new BadArgs(`argument '${name}' must be an integer`);
  }
  return value;
}

function strArg(args: Record<string, unknown>, name: string, fallback?: string): string {
  const value = args[name] ?? fallback;
  if (typeof value !== "string") throw new BadArgs(`argument '${name}' must be a string`);
  return value;
}

type Handler = (session: Session, args: Record<string, unknown>) => unknown;

const OPS: Record<string, Handler> = {
  get_state: (session) => ({
    cursor: session.cursor,
    active_task_id: session.activeTaskId,
    utterance_count: session.utteranceCount,
  }),
  get_tasks: (session) => JSON.parse(serializeConfig(session.tasks)),
  get_utterance: (session, args) => {
    const utt = session.utterance(intArg(args, "index"));
    return {
      comments: [...utt.comments],
      metadata: Object.fromEntries(metadata(utt)),
      tokens: utt.tokens.map((t) => [...t]),
    };
  },
  set_cursor: (session, args) => ({ cursor: session.setCursor(intArg(args, "index")) }),
  move_cursor: (session, args) => ({ cursor: session.moveCursor(intArg(args, "delta")) }),
  set_active_task: (session, args) => {
    session.setActiveTask(intArg(args, "task_id"));
    return { active_task_id: session.activeTaskId };
  },
  annotate_token: (session, args) => {
    session.annotateToken(
      intArg(args, "utt_index"),
      intArg(args, "token_index"),
      intArg(args, "task_id"),
      strArg(args, "label"),
    );
    return null;
  },
  annotate_span: (session, args) => {
    session.annotateSpan(
      intArg(args, "utt_index"),
      [intArg(args, "start"), intArg(args, "end")],
      intArg(args, "task_id"),
      strArg(args, "label"),
    );
    return null;
  },
  annotate_class: (session, args) => {
    session.annotateClass(
      intArg(args, "utt_index"),
      intArg(args, "task_id"),
      strArg(args, "label"),
    );
    return null;
  },
  annotate_seq2seq: (session, args) => {
    session.annotateSeq2seq(
      intArg(args, "utt_index"),
      intArg(args, "task_id"),
      strArg(args, "text"),
    );
    return null;
  },
  set_status: (session, args) => {
    session.setStatus(
      intArg(args, "utt_index"),
      intArg(args, "task_id"),
      strArg(args, "status") as StatusValue,
    );
    return null;
  },
  get_status: (session, args) => ({
    status: session.getStatus(intArg(args, "utt_index"), intArg(args, "task_id")),
  }),
  get_progress: (session, args) => {
    const p = session.getProgress(intArg(args, "task_id"));
    return { completed: p.completed, wrong: p.wrong, unsure: p.unsure, cleared: p.cleared };
  },
  label_search: (session, args) => ({
    labels: labelSearch(session.task(intArg(args, "task_id")), strArg(args, "query", "")),
  }),
  annotation_mode: (session, args) => ({
    mode: annotationMode(session.task(intArg(args, "task_id"))),
  }),
  keyboard_map: (session, args) => ({
    map: keyboardMap(session.task(intArg(args, "task_id"))),
  }),
  snap_selection: (session, args) => {
    const [start, end] = session.snapSelection(
      intArg(args, "utt_index"),
      intArg(args, "task_id"),
      intArg(args, "char_start"),
      intArg(args, "char_end"),
    );
    return { start, end };
  },
  get_spans: (session, args) => ({
    spans: session.spans(intArg(args, "utt_index"), intArg(args, "task_id")),
  }),
  apply_default_label: (session, args) => ({
    filled: session.applyDefaultLabel(intArg(args, "task_id")),
  }),
  export: (session, args) => {
    let now: Date | undefined;
    if (typeof args.now === "string") {
      now = new Date(args.now);
      if (Number.isNaN(now.getTime())) {
        throw new BadArgs(`argument 'now' is not an ISO datetime: ${args.now}`);
      }
    }
    return session.export(Boolean(args.with_datetime), Boolean(args.clean), now);
  },
};

function error(code: string, message: string): Reply {
  return { ok: false, error: { code, message } };
}

/** Dispatch one message; every request gets exactly one structured reply. */
export function handleMessage(session: Session, message: unknown): Reply {
  if (typeof message !== "object" || message === null || Array.isArray(message)) {
    return error("bad_message", "message must be an object");
  }
  const { op, args } = message as SessionMessage;
  if (typeof op !== "string") return error("bad_message", "message needs a string 'op'");
  const actualArgs = args ?? {};
  if (typeof actualArgs !== "object" || Array.isArray(actualArgs)) {
    return error("bad_args", "'args' must be an object");
  }
  const handler = OPS[op];
  if (!handler) return error("unknown_op", `unknown operation '${op}'`);
  try {
    return { ok: true, result: handler(session, actualArgs) };
  } catch (exc) {
    if (exc instanceof BadArgs) return error("bad_args", exc.message);
    if (exc instanceof RangeError) return error("out_of_range", exc.message);
    return error("invalid_argument", exc instanceof Error ? exc.message : String(exc));
  }
}

/** Apply a recorded message log in order; returns the replies. */
export function replay(session: Session, messages: SessionMessage[]): Reply[] {
  return messages.map((message) => handleMessage(session, message));
}
