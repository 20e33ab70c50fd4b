import { describe, expect, it } from "vitest";

import { parseCorpus } from "../src/conll.js";
import { SessionMessage, handleMessage, replay } from "../src/protocol.js";
import { openSession } from "../src/session.js";
import { parseConfig } from "../src/tasks.js";
import { SAMPLE_CONLL, SAMPLE_TASKS } from "./fixtures.js";

function freshSession() {
  return openSession(parseCorpus(SAMPLE_CONLL), parseConfig(SAMPLE_TASKS));
}

describe("message dispatch", () => {
  it("answers every request with exactly one structured reply", () => {
    const reply = handleMessage(freshSession(), { op: "get_state" });
    expect(reply).toEqual({
      ok: true,
      result: { cursor: 0, active_task_id: 0, utterance_count: 2 },
    });
  });

  it("rejects unknown ops and bad args structurally", () => {
    const session = freshSession();
    expect(handleMessage(session, { op: "frobnicate" })).toMatchObject({
      ok: false,
      error: { code: "unknown_op" },
    });
    expect(handleMessage(session, { op: "set_cursor", args: { index: "x" } })).toMatchObject({
      ok: false,
      error: { code: "bad_args" },
    });
    expect(handleMessage(session, { op: "set_cursor", args: { index: 99 } })).toMatchObject({
      ok: false,
      error: { code: "out_of_range" },
    });
    expect(handleMessage(session, 42)).toMatchObject({ ok: false });
  });

  it("snaps, annotates, and reads through the boundary", () => {
    const session = freshSession();
    const snapped = handleMessage(session, {
      op: "snap_selection",
      args: { utt_index: 0, task_id: 0, char_start: 3, char_end: 4 },
    });
    expect(snapped).toEqual({ ok: true, result: { start: 2, end: 3 } });
    handleMessage(session, {
      op: "annotate_span",
      args: { utt_index: 0, start: 2, end: 3, task_id: 0, label: "PER" },
    });
    const spans = handleMessage(session, {
      op: "get_spans",
      args: { utt_index: 0, task_id: 0 },
    });
    expect(spans).toEqual({
      ok: true,
      result: { spans: [{ start: 2, end: 3, label: "PER" }] },
    });
  });
});

function interactionLog(): SessionMessage[] {
  const labels = ["LOC", "MISC", "ORG", "PER"];
  const statuses = ["completed", "wrong", "unsure", "cleared"];
  const log: SessionMessage[] = [];
  for (let i = 0; i < 20; i++) {
    const utt = i % 2;
    log.push({ op: "set_cursor", args: { index: utt } });
    log.push({
      op: "annotate_span",
      args: {
        utt_index: utt,
        start: i % 3,
        end: (i % 3) + 1,
        task_id: 0,
        label: labels[i % labels.length],
      },
    });
    log.push({
      op: "set_status",
      args: { utt_index: utt, task_id: 0, status: statuses[i % statuses.length] },
    });
  }
  log.push({ op: "export", args: { with_datetime: false } });
  return log;
}

describe("replay determinism", () => {
  it("replaying a 50+ message log yields a byte-identical export", () => {
    const log = interactionLog();
    expect(log.length).toBeGreaterThanOrEqual(50);
    const first = replay(freshSession(), structuredClone(log));
    const second = replay(freshSession(), structuredClone(log));
    expect(first).toEqual(second);
    const exported = first[first.length - 1];
    expect(exported.ok).toBe(true);
    if (exported.ok) {
      const again = second[second.length - 1];
      expect(again.ok && (again.result as { text: string }).text).toBe(
        (exported.result as { text: string }).text,
      );
    }
  });
});
