/**
 * Annotation page: a keyboard-first view over one utterance at a time.
 *
 * All reads and writes go through the SessionMessage transport; this page
 * keeps only view state (cursor mirror, selection, pending label, search
 * query) and re-renders from the engine after every change, so the engine
 * stays the single source of annotation truth.
 */

import { download } from "./download.js";
import { Reply, SessionMessage } from "./protocol.js";
import { Mode, StatusValue } from "./session.js";
import { Transport } from "./transport.js";

interface TaskView {
  title: string;
  type: { name: string; isWordLevel: boolean };
  input_index: string;
  output_index?: string;
  labels: string[];
  id: number;
}

interface UtteranceView {
  comments: string[];
  metadata: Record<string, string>;
  tokens: string[][];
}

interface ViewState {
  cursor: number;
  activeTaskId: number;
  /** Character range of the current selection over the display text. */
  selection: [number, number] | null;
  mode: Mode;
  searchQuery: string;
  pendingLabel: string | null;
}

const STATUS_BUTTONS: { status: StatusValue; glyph: string }[] = [
  { status: "completed", glyph: "✓ completed" },
  { status: "wrong", glyph: "✗ wrong" },
  { status: "unsure", glyph: "? unsure" },
  { status: "cleared", glyph: "○ cleared" },
];

const SPAN_COLORS = ["#cfe8ff", "#ffe3c2", "#d8f5d0", "#f5d0e8", "#e4dcff", "#fdf3b8"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function spanColor(label: string): string {
  let hash = 0;
  for (const ch of label) hash = (hash * 31 + ch.charCodeAt(0)) & 0xffff;
  return SPAN_COLORS[hash % SPAN_COLORS.length];
}

export interface AnnotatePageOptions {
  onBack?(): void;
}

export interface AnnotateController {
  refresh(): Promise<void>;
  dispose(): void;
  root: HTMLElement;
}

export async function renderAnnotationPage(
  root: HTMLElement,
  send: Transport,
  options: AnnotatePageOptions = {},
): Promise<AnnotateController> {
  root.innerHTML = "";
  root.className = "annotate-page";

  const errorBox = el("div", "error-box");
  errorBox.hidden = true;

  async function call(message: SessionMessage): Promise<Reply> {
    const reply = await send(message);
    if (!reply.ok) {
      errorBox.textContent = `${reply.error.code}: ${reply.error.message}`;
      errorBox.hidden = false;
    }
    return reply;
  }

  function result<T>(reply: Reply): T {
    if (!reply.ok) throw new Error(reply.error.message);
    return reply.result as T;
  }

  const stateReply = result<{ cursor: number | null; active_task_id: number | null; utterance_count: number }>(
    await call({ op: "get_state" }),
  );
  const tasks = result<TaskView[]>(await call({ op: "get_tasks" }));
  if (stateReply.cursor === null || !tasks.length) {
    root.append(el("p", "summary", "Nothing to annotate: the corpus or task list is empty."));
    return { refresh: async () => undefined, dispose: () => undefined, root };
  }

  const view: ViewState = {
    cursor: stateReply.cursor,
    activeTaskId: stateReply.active_task_id ?? tasks[0].id,
    selection: null,
    mode: "keyboard",
    searchQuery: "",
    pendingLabel: null,
  };

  const header = el("header", "topbar");
  const taskBar = el("div", "task-bar");
  const progressBar = el("div", "progress-bar");
  progressBar.id = "progress-bar";
  header.append(taskBar, progressBar);

  const exportRow = el("div", "export-row");
  const datetimeToggle = el("input") as HTMLInputElement;
  datetimeToggle.type = "checkbox";
  datetimeToggle.id = "datetime-toggle";
  const datetimeLabel = el("label", undefined, "append datetime");
  datetimeLabel.htmlFor = "datetime-toggle";
  datetimeLabel.prepend(datetimeToggle);
  const exportButton = el("button", "primary", "Export");
  exportButton.id = "export-button";
  exportButton.addEventListener("click", async () => {
    const reply = await call({ op: "export", args: { with_datetime: datetimeToggle.checked } });
    if (reply.ok) {
      const { filename, text } = reply.result as { filename: string; text: string };
      download(filename, text);
    }
  });
  exportRow.append(datetimeLabel, exportButton);
  if (options.onBack) {
    const backButton = el("button", undefined, "Setup");
    backButton.addEventListener("click", () => options.onBack?.());
    exportRow.prepend(backButton);
  }
  header.append(exportRow);

  const counter = el("div", "counter");
  const tokenStrip = el("div", "token-strip");
  tokenStrip.id = "token-strip";
  const utteranceMeta = el("div", "utterance-meta");
  const labelPanel = el("div", "label-panel");
  const searchPopup = el("div", "search-popup");
  searchPopup.hidden = true;

  const navBar = el("div", "nav-bar");
  const prevButton = el("button", undefined, "◀");
  prevButton.title = "previous utterance (←)";
  prevButton.addEventListener("click", () => moveCursor(-1));
  const nextButton = el("button", undefined, "▶");
  nextButton.title = "next utterance (→)";
  nextButton.addEventListener("click", () => moveCursor(1));
  const statusGroup = el("div", "status-group");
  for (const { status, glyph } of STATUS_BUTTONS) {
    const button = el("button", `status-button status-${status}`, glyph);
    button.dataset.status = status;
    button.addEventListener("click", () => setStatus(status));
    statusGroup.append(button);
  }
  navBar.append(prevButton, statusGroup, nextButton);

  root.append(header, errorBox, counter, utteranceMeta, tokenStrip, labelPanel, searchPopup, navBar);

  function activeTask(): TaskView {
    return tasks.find((t) => t.id === view.activeTaskId) ?? tasks[0];
  }

  async function moveCursor(delta: number): Promise<void> {
    const reply = await call({ op: "move_cursor", args: { delta } });
    if (reply.ok) {
      view.cursor = (reply.result as { cursor: number }).cursor;
      view.selection = null;
      view.pendingLabel = null;
      await refresh();
    }
  }

  async function setStatus(status: StatusValue): Promise<void> {
    const reply = await call({
      op: "set_status",
      args: { utt_index: view.cursor, task_id: view.activeTaskId, status },
    });
    if (reply.ok) await refresh();
  }

  async function applyLabelToRange(label: string, range: [number, number]): Promise<void> {
    const task = activeTask();
    if (task.type.name === "seq_bio") {
      await call({
        op: "annotate_span",
        args: {
          utt_index: view.cursor,
          start: range[0],
          end: range[1],
          task_id: task.id,
          label,
        },
      });
    } else if (task.type.name === "seq") {
      for (let i = range[0]; i < range[1]; i++) {
        await call({
          op: "annotate_token",
          args: { utt_index: view.cursor, token_index: i, task_id: task.id, label },
        });
      }
    }
    view.selection = null;
    closeSearch();
    await refresh();
  }

  async function applyLabel(label: string): Promise<void> {
    const task = activeTask();
    if (task.type.name === "class") {
      await call({
        op: "annotate_class",
        args: { utt_index: view.cursor, task_id: task.id, label },
      });
      await refresh();
      return;
    }
    if (view.selection) {
      const snapped = await call({
        op: "snap_selection",
        args: {
          utt_index: view.cursor,
          task_id: task.id,
          char_start: view.selection[0],
          char_end: view.selection[1],
        },
      });
      if (snapped.ok) {
        const { start, end } = snapped.result as { start: number; end: number };
        await applyLabelToRange(label, [start, end]);
      }
      return;
    }
    // word-level task with no selection yet: arm the label, apply on click;
    // re-selecting the armed label disarms it (clickable Escape equivalent)
    view.pendingLabel = view.pendingLabel === label ? null : label;
    renderLabels();
  }

  // --- search popup -----------------------------------------------------------

  let searchRange: [number, number] | null = null;
  const searchInput = el("input") as HTMLInputElement;
  searchInput.id = "label-search-input";
  searchInput.placeholder = "search labels…";
  const searchResults = el("ul", "search-results");
  searchPopup.append(searchInput, searchResults);

  function closeSearch(): void {
    searchPopup.hidden = true;
    searchRange = null;
    view.searchQuery = "";
    searchInput.value = "";
  }

  async function openSearch(range: [number, number]): Promise<void> {
    searchRange = range;
    searchPopup.hidden = false;
    await updateSearchResults();
    searchInput.focus();
  }

  async function updateSearchResults(): Promise<void> {
    view.searchQuery = searchInput.value;
    const reply = await call({
      op: "label_search",
      args: { task_id: view.activeTaskId, query: view.searchQuery },
    });
    searchResults.innerHTML = "";
    if (!reply.ok) return;
    for (const label of (reply.result as { labels: string[] }).labels) {
      const item = el("li", "search-result", label);
      item.addEventListener("click", () => confirmSearch(label));
      searchResults.append(item);
    }
  }

  async function confirmSearch(label: string): Promise<void> {
    const task = activeTask();
    if (task.type.name === "class") {
      closeSearch();
      await applyLabel(label);
    } else if (searchRange) {
      await applyLabelToRange(label, searchRange);
    }
  }

  searchInput.addEventListener("input", () => void updateSearchResults());
  searchInput.addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      const first = searchResults.querySelector("li");
      if (first?.textContent) void confirmSearch(first.textContent);
      event.preventDefault();
    } else if (event.key === "Escape") {
      closeSearch();
    }
    event.stopPropagation();
  });

  // --- selection handling -------------------------------------------------------

  async function handleRangeSelected(range: [number, number]): Promise<void> {
    if (view.mode === "search") {
      await openSearch(range);
    } else if (view.pendingLabel) {
      await applyLabelToRange(view.pendingLabel, range);
    }
  }

  async function onTokenClick(index: number): Promise<void> {
    const task = activeTask();
    if (task.type.name === "class" || task.type.name === "seq2seq") return;
    await handleRangeSelected([index, index + 1]);
  }

  function domSelectionOffsets(): [number, number] | null {
    const selection = window.getSelection?.();
    if (!selection || selection.rangeCount === 0 || selection.isCollapsed) return null;
    const range = selection.getRangeAt(0);
    const offsetOf = (node: Node, offset: number): number | null => {
      let element: HTMLElement | null =
        node.nodeType === Node.TEXT_NODE ? node.parentElement : (node as HTMLElement);
      while (element && element !== tokenStrip && element.dataset?.start === undefined) {
        element = element.parentElement;
      }
      if (!element || element === tokenStrip) return null;
      return parseInt(element.dataset.start!, 10) + offset;
    };
    const start = offsetOf(range.startContainer, range.startOffset);
    const end = offsetOf(range.endContainer, range.endOffset);
    if (start === null || end === null || start === end) return null;
    return start <= end ? [start, end] : [end, start];
  }

  tokenStrip.addEventListener("mouseup", async () => {
    const offsets = domSelectionOffsets();
    if (!offsets) return;
    const reply = await call({
      op: "snap_selection",
      args: {
        utt_index: view.cursor,
        task_id: view.activeTaskId,
        char_start: offsets[0],
        char_end: offsets[1],
      },
    });
    if (reply.ok) {
      const { start, end } = reply.result as { start: number; end: number };
      view.selection = null;
      await handleRangeSelected([start, end]);
    }
  });

  // --- keyboard ------------------------------------------------------------------

  const keydownHandler = (event: KeyboardEvent) => {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) return;
    if (event.key === "ArrowRight") {
      event.preventDefault();
      void moveCursor(1);
    } else if (event.key === "ArrowLeft") {
      event.preventDefault();
      void moveCursor(-1);
    } else if (event.key === "Escape") {
      view.pendingLabel = null;
      closeSearch();
      renderLabels();
    } else if (/^[0-9]$/.test(event.key) && view.mode === "keyboard") {
      const map = keyMap;
      const label = map[event.key];
      if (label) {
        event.preventDefault();
        void applyLabel(label);
      }
    }
  };
  document.addEventListener("keydown", keydownHandler);

  // --- rendering -------------------------------------------------------------------

  let keyMap: Record<string, string> = {};

  function renderTaskBar(): void {
    taskBar.innerHTML = "";
    for (const task of tasks) {
      const button = el(
        "button",
        task.id === view.activeTaskId ? "task-tab active" : "task-tab",
        task.title,
      );
      button.dataset.taskId = String(task.id);
      button.addEventListener("click", async () => {
        await call({ op: "set_active_task", args: { task_id: task.id } });
        view.activeTaskId = task.id;
        view.pendingLabel = null;
        closeSearch();
        await refresh();
      });
      taskBar.append(button);
    }
  }

  async function renderProgress(): Promise<void> {
    const reply = await call({ op: "get_progress", args: { task_id: view.activeTaskId } });
    progressBar.innerHTML = "";
    if (!reply.ok) return;
    const counts = reply.result as Record<StatusValue, number>;
    const total = counts.completed + counts.wrong + counts.unsure + counts.cleared;
    progressBar.title =
      `${counts.completed} completed, ${counts.wrong} wrong, ` +
      `${counts.unsure} unsure, ${counts.cleared} cleared`;
    for (const status of ["completed", "wrong", "unsure", "cleared"] as StatusValue[]) {
      const segment = el("div", `progress-segment progress-${status}`);
      segment.style.width = total ? `${(counts[status] / total) * 100}%` : "0";
      segment.dataset.count = String(counts[status]);
      progressBar.append(segment);
    }
  }

  async function renderTokens(utterance: UtteranceView): Promise<void> {
    const task = activeTask();
    const inputIndex = parseInt(task.input_index, 10);
    tokenStrip.innerHTML = "";
    const texts = utterance.tokens.map((t) => t[inputIndex - 1] ?? "");
    let spans: { start: number; end: number; label: string }[] = [];
    if (task.type.name === "seq_bio") {
      const reply = await call({
        op: "get_spans",
        args: { utt_index: view.cursor, task_id: task.id },
      });
      if (reply.ok) spans = (reply.result as { spans: typeof spans }).spans;
    }
    const outputIndex = task.output_index ? parseInt(task.output_index, 10) : null;
    let charOffset = 0;
    texts.forEach((text, i) => {
      if (i > 0) {
        tokenStrip.append(document.createTextNode(" "));
        charOffset += 1;
      }
      const tokenEl = el("span", "token", text);
      tokenEl.dataset.index = String(i);
      tokenEl.dataset.start = String(charOffset);
      charOffset += text.length;
      const covering = spans.find((s) => s.start <= i && i < s.end);
      if (covering) {
        tokenEl.style.backgroundColor = spanColor(covering.label);
        tokenEl.classList.add("in-span");
        if (covering.start === i) {
          const chip = el("sup", "span-label", covering.label);
          tokenEl.append(chip);
        }
      } else if (task.type.name === "seq" && outputIndex !== null) {
        const cell = utterance.tokens[i][outputIndex - 1] ?? "";
        if (cell) {
          const chip = el("sup", "token-label", cell);
          tokenEl.append(chip);
        }
      }
      tokenEl.addEventListener("click", () => void onTokenClick(i));
      tokenStrip.append(tokenEl);
    });
  }

  function renderMeta(utterance: UtteranceView): void {
    const task = activeTask();
    utteranceMeta.innerHTML = "";
    if (task.type.name === "class") {
      const current = utterance.metadata[task.title];
      utteranceMeta.append(
        el("span", "meta-current", current ? `${task.title} = ${current}` : `${task.title}: (unset)`),
      );
    } else if (task.type.name === "seq2seq") {
      const field = el("textarea", "seq2seq-field") as HTMLTextAreaElement;
      field.id = "seq2seq-field";
      field.rows = 2;
      field.placeholder = "type the target text…";
      field.value = utterance.metadata[task.title] ?? "";
      field.addEventListener("change", async () => {
        await call({
          op: "annotate_seq2seq",
          args: { utt_index: view.cursor, task_id: task.id, text: field.value.replace(/[\n\r]/g, " ") },
        });
        await refresh();
      });
      utteranceMeta.append(field);
    } else {
      const pairs = Object.entries(utterance.metadata).filter(([k]) => !k.startsWith("status:"));
      if (pairs.length) {
        utteranceMeta.append(
          el("span", "meta-dim", pairs.map(([k, v]) => `${k} = ${v}`).join(" · ")),
        );
      }
    }
  }

  async function renderLabelsAsync(): Promise<void> {
    const task = activeTask();
    const modeReply = await call({ op: "annotation_mode", args: { task_id: task.id } });
    view.mode = modeReply.ok ? (modeReply.result as { mode: Mode }).mode : "keyboard";
    const mapReply = await call({ op: "keyboard_map", args: { task_id: task.id } });
    keyMap = mapReply.ok ? (mapReply.result as { map: Record<string, string> }).map : {};
    renderLabels();
  }

  function renderLabels(): void {
    labelPanel.innerHTML = "";
    const task = activeTask();
    if (task.type.name === "seq2seq") return;
    if (view.mode === "search") {
      labelPanel.append(
        el("p", "summary", `${task.labels.length} labels — select text to search`),
      );
      return;
    }
    const digits = Object.entries(keyMap);
    for (const [digit, label] of digits) {
      const button = el("button", "label-button");
      if (view.pendingLabel === label) button.classList.add("pending");
      const badge = el("kbd", undefined, digit);
      button.append(badge, document.createTextNode(` ${label}`));
      button.dataset.label = label;
      button.addEventListener("click", () => void applyLabel(label));
      labelPanel.append(button);
    }
    if (task.type.name === "seq_bio") {
      const clearButton = el("button", "label-button clear");
      clearButton.append(el("kbd", undefined, "O"), document.createTextNode(" clear span"));
      clearButton.addEventListener("click", () => void applyLabel("O"));
      labelPanel.append(clearButton);
    }
  }

  async function renderStatusButtons(): Promise<void> {
    const reply = await call({
      op: "get_status",
      args: { utt_index: view.cursor, task_id: view.activeTaskId },
    });
    const current = reply.ok ? (reply.result as { status: StatusValue }).status : "cleared";
    statusGroup.querySelectorAll("button").forEach((button) => {
      button.classList.toggle("active", button.dataset.status === current);
    });
  }

  async function refresh(): Promise<void> {
    const utteranceReply = await call({ op: "get_utterance", args: { index: view.cursor } });
    if (!utteranceReply.ok) return;
    const utterance = utteranceReply.result as UtteranceView;
    counter.textContent = `utterance ${view.cursor + 1} / ${stateReply.utterance_count}`;
    renderTaskBar();
    await renderProgress();
    renderMeta(utterance);
    await renderTokens(utterance);
    await renderLabelsAsync();
    await renderStatusButtons();
  }

  await refresh();

  return {
    refresh,
    dispose() {
      document.removeEventListener("keydown", keydownHandler);
    },
    root,
  };
}
