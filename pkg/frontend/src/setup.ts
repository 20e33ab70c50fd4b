/**
 * Setup page: import a corpus and a task configuration, edit tasks and
 * columns, preview the raw data, then hand off to the annotation page.
 */

import {
  Corpus,
  ParseError,
  addColumn,
  importRawText,
  maxWidth,
  parseCorpus,
  removeColumn,
  serializeCorpus,
  tokenCount,
} from "./conll.js";
import { download } from "./download.js";
import {
  TASK_TYPES,
  TaskConfig,
  TaskTypeName,
  checkTask,
  checkTaskSet,
  inferLabels,
  isWordLevel,
  parseConfig,
  serializeConfig,
} from "./tasks.js";

export interface SetupController {
  loadCorpusText(text: string, format?: "conll" | "raw"): void;
  loadConfigText(text: string): void;
  getCorpus(): Corpus;
  getTasks(): TaskConfig[];
  annotate(): void;
  root: HTMLElement;
}

interface SetupOptions {
  onAnnotate(corpus: Corpus, tasks: TaskConfig[]): void;
}

const PREVIEW_UTTERANCES = 5;

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

export function renderSetupPage(root: HTMLElement, options: SetupOptions): SetupController {
  let corpus: Corpus = [];
  let tasks: TaskConfig[] = [];
  let nextTaskId = 0;

  root.innerHTML = "";
  root.className = "setup-page";

  const errorBox = el("div", "error-box");
  errorBox.hidden = true;

  const showError = (message: string) => {
    errorBox.textContent = message;
    errorBox.hidden = false;
  };
  const clearError = () => {
    errorBox.hidden = true;
  };

  // --- import panel ---------------------------------------------------------

  const importPanel = el("section", "panel");
  importPanel.append(el("h2", undefined, "Data"));

  const formatSelect = el("select");
  for (const value of ["conll", "raw"]) {
    const option = el("option", undefined, value === "conll" ? "tab-separated" : "raw text");
    option.value = value;
    formatSelect.append(option);
  }

  const corpusInput = el("input") as HTMLInputElement;
  corpusInput.type = "file";
  corpusInput.id = "corpus-file";
  corpusInput.addEventListener("change", () => {
    const file = corpusInput.files?.[0];
    if (!file) return;
    file.text().then((text) =>
      controller.loadCorpusText(text, formatSelect.value as "conll" | "raw"),
    );
  });

  const importRow = el("div", "row");
  importRow.append(formatSelect, corpusInput);
  importPanel.append(importRow);

  const columnRow = el("div", "row");
  const addColumnButton = el("button", undefined, "Add column");
  addColumnButton.addEventListener("click", () => {
    const fill = window.prompt("Fill value for the new column", "") ?? "";
    try {
      addColumn(corpus, fill);
      clearError();
      renderPreview();
    } catch (exc) {
      showError(String(exc instanceof Error ? exc.message : exc));
    }
  });
  const removeColumnButton = el("button", undefined, "Remove column");
  removeColumnButton.addEventListener("click", () => {
    const answer = window.prompt("Column to remove (1-based)", String(maxWidth(corpus)));
    if (!answer) return;
    try {
      removeColumn(corpus, parseInt(answer, 10));
      clearError();
      renderPreview();
    } catch (exc) {
      showError(String(exc instanceof Error ? exc.message : exc));
    }
  });
  const exportDataButton = el("button", undefined, "Export data");
  exportDataButton.addEventListener("click", () => {
    download("data.conll", serializeCorpus(corpus));
  });
  columnRow.append(addColumnButton, removeColumnButton, exportDataButton);
  importPanel.append(columnRow);

  const previewBox = el("div", "preview");
  importPanel.append(previewBox);

  function renderPreview() {
    previewBox.innerHTML = "";
    const summary = el(
      "p",
      "summary",
      corpus.length
        ? `${corpus.length} utterances, ${tokenCount(corpus)} tokens, ${maxWidth(corpus)} columns`
        : "No data imported yet.",
    );
    summary.id = "preview-summary";
    previewBox.append(summary);
    const table = el("table", "preview-table");
    for (const utt of corpus.slice(0, PREVIEW_UTTERANCES)) {
      for (const raw of utt.comments) {
        const row = el("tr", "comment-row");
        const cell = el("td", undefined, `# ${raw}`);
        cell.colSpan = Math.max(1, maxWidth(corpus));
        row.append(cell);
        table.append(row);
      }
      for (const token of utt.tokens) {
        const row = el("tr");
        for (const value of token) row.append(el("td", undefined, value));
        table.append(row);
      }
      const gap = el("tr", "gap-row");
      gap.append(el("td"));
      table.append(gap);
    }
    previewBox.append(table);
  }

  // --- task panel -----------------------------------------------------------

  const taskPanel = el("section", "panel");
  taskPanel.append(el("h2", undefined, "Tasks"));
  const taskList = el("div", "task-list");
  taskPanel.append(taskList);

  const taskButtons = el("div", "row");
  const addTaskButton = el("button", undefined, "Add task");
  addTaskButton.addEventListener("click", () => {
    tasks.push({
      title: `task-${nextTaskId}`,
      type: "seq_bio",
      inputIndex: 1,
      outputIndex: maxWidth(corpus) + 1 || 2,
      labels: [],
      defaultLabel: "O",
      id: nextTaskId++,
    });
    renderTasks();
  });
  const configInput = el("input") as HTMLInputElement;
  configInput.type = "file";
  configInput.id = "config-file";
  configInput.addEventListener("change", () => {
    const file = configInput.files?.[0];
    if (!file) return;
    file.text().then((text) => controller.loadConfigText(text));
  });
  const exportConfigButton = el("button", undefined, "Export config");
  exportConfigButton.addEventListener("click", () => {
    download("tasks.json", serializeConfig(tasks) + "\n");
  });
  taskButtons.append(addTaskButton, configInput, exportConfigButton);
  taskPanel.append(taskButtons);

  function taskCard(task: TaskConfig, position: number): HTMLElement {
    const card = el("div", "task-card");

    const field = (labelText: string, input: HTMLElement) => {
      const wrap = el("label", "field");
      wrap.append(el("span", undefined, labelText), input);
      return wrap;
    };

    const titleInput = el("input") as HTMLInputElement;
    titleInput.value = task.title;
    titleInput.addEventListener("change", () => {
      task.title = titleInput.value;
      validateTasks();
    });

    const typeSelect = el("select") as HTMLSelectElement;
    for (const name of TASK_TYPES) {
      const option = el("option", undefined, name);
      option.value = name;
      typeSelect.append(option);
    }
    typeSelect.value = task.type;
    typeSelect.addEventListener("change", () => {
      task.type = typeSelect.value as TaskTypeName;
      if (!isWordLevel(task.type)) task.outputIndex = null;
      else task.outputIndex = task.outputIndex ?? maxWidth(corpus) + 1;
      if (task.type === "seq2seq") task.labels = [];
      if (task.type === "seq_bio" && task.defaultLabel === null) task.defaultLabel = "O";
      renderTasks();
    });

    const inputIndexInput = el("input") as HTMLInputElement;
    inputIndexInput.type = "number";
    inputIndexInput.min = "1";
    inputIndexInput.value = String(task.inputIndex);
    inputIndexInput.addEventListener("change", () => {
      task.inputIndex = parseInt(inputIndexInput.value, 10) || 1;
      validateTasks();
    });

    const outputIndexInput = el("input") as HTMLInputElement;
    outputIndexInput.type = "number";
    outputIndexInput.min = "1";
    outputIndexInput.disabled = !isWordLevel(task.type);
    outputIndexInput.value = task.outputIndex === null ? "" : String(task.outputIndex);
    outputIndexInput.addEventListener("change", () => {
      task.outputIndex = parseInt(outputIndexInput.value, 10) || null;
      validateTasks();
    });

    const labelsInput = el("input") as HTMLInputElement;
    labelsInput.className = "labels-input";
    labelsInput.value = task.labels.join(", ");
    labelsInput.disabled = task.type === "seq2seq";
    labelsInput.addEventListener("change", () => {
      task.labels = labelsInput.value
        .split(",")
        .map((label) => label.trim())
        .filter((label) => label.length);
      validateTasks();
    });

    const defaultInput = el("input") as HTMLInputElement;
    defaultInput.value = task.defaultLabel ?? "";
    defaultInput.addEventListener("change", () => {
      task.defaultLabel = defaultInput.value || null;
    });

    const importLabelsButton = el("button", undefined, "Import labels");
    importLabelsButton.addEventListener("click", () => {
      try {
        task.labels = inferLabels(corpus, task);
        labelsInput.value = task.labels.join(", ");
        clearError();
      } catch (exc) {
        showError(String(exc instanceof Error ? exc.message : exc));
      }
    });

    const removeButton = el("button", "danger", "Remove");
    removeButton.addEventListener("click", () => {
      tasks.splice(position, 1);
      renderTasks();
    });

    card.append(
      field("title", titleInput),
      field("type", typeSelect),
      field("input col", inputIndexInput),
      field("output col", outputIndexInput),
      field("labels", labelsInput),
      field("default", defaultInput),
      importLabelsButton,
      removeButton,
    );
    return card;
  }

  function renderTasks() {
    taskList.innerHTML = "";
    if (!tasks.length) taskList.append(el("p", "summary", "No tasks configured yet."));
    tasks.forEach((task, position) => taskList.append(taskCard(task, position)));
    validateTasks();
  }

  function validateTasks(): string | null {
    for (const task of tasks) {
      const problem = checkTask(task);
      if (problem) {
        showError(`task "${task.title}": ${problem}`);
        return problem;
      }
    }
    try {
      checkTaskSet(tasks);
    } catch (exc) {
      const message = exc instanceof Error ? exc.message : String(exc);
      showError(message);
      return message;
    }
    clearError();
    return null;
  }

  // --- footer ---------------------------------------------------------------

  const footer = el("div", "footer-row");
  const annotateButton = el("button", "primary", "Annotate");
  annotateButton.id = "annotate-button";
  annotateButton.addEventListener("click", () => controller.annotate());
  footer.append(annotateButton);

  root.append(el("h1", undefined, "annotab setup"), errorBox, importPanel, taskPanel, footer);
  renderPreview();
  renderTasks();

  const controller: SetupController = {
    loadCorpusText(text, format = "conll") {
      try {
        corpus = format === "raw" ? importRawText(text) : parseCorpus(text);
        clearError();
        renderPreview();
      } catch (exc) {
        if (exc instanceof ParseError) showError(exc.message);
        else showError(String(exc instanceof Error ? exc.message : exc));
      }
    },
    loadConfigText(text) {
      try {
        tasks = parseConfig(text);
        nextTaskId = Math.max(0, ...tasks.map((t) => t.id + 1));
        clearError();
        renderTasks();
      } catch (exc) {
        showError(String(exc instanceof Error ? exc.message : exc));
      }
    },
    getCorpus: () => corpus,
    getTasks: () => tasks,
    annotate() {
      if (validateTasks() !== null) return;
      if (!corpus.length) {
        showError("Import a corpus before annotating.");
        return;
      }
      options.onAnnotate(corpus, tasks);
    },
    root,
  };

  return controller;
}
