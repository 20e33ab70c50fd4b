/**
 * Entry point.  Two hosting modes:
 *
 *  - default: everything in-browser (setup page -> local engine), no server;
 *  - ?remote: the page is served by the CLI's loopback host and drives the
 *    server-side session over POST /api/message, skipping the setup page.
 */

import { renderAnnotationPage, AnnotateController } from "./annotate.js";
import { Corpus } from "./conll.js";
import { SessionMessage } from "./protocol.js";
import { openSession } from "./session.js";
import { renderSetupPage } from "./setup.js";
import { TaskConfig } from "./tasks.js";
import { httpTransport, localTransport } from "./transport.js";

export async function boot(root: HTMLElement): Promise<void> {
  const remote = new URLSearchParams(window.location.search).has("remote");
  if (remote) {
    await renderAnnotationPage(root, httpTransport());
    return;
  }

  let annotateController: AnnotateController | null = null;

  const showSetup = () => {
    annotateController?.dispose();
    annotateController = null;
    renderSetupPage(root, { onAnnotate: showAnnotate });
  };

  const showAnnotate = async (corpus: Corpus, tasks: TaskConfig[]) => {
    const log: SessionMessage[] = [];
    try {
      const session = openSession(corpus, tasks);
      const send = localTransport(session, log);
      // expose the log for debugging and replay checks
      (window as unknown as Record<string, unknown>).__annotabMessageLog = log;
      annotateController = await renderAnnotationPage(root, send, { onBack: showSetup });
    } catch (exc) {
      showSetup();
      const box = root.querySelector<HTMLElement>(".error-box");
      if (box) {
        box.textContent = exc instanceof Error ? exc.message : String(exc);
        box.hidden = false;
      }
    }
  };

  showSetup();
}

const appRoot = typeof document !== "undefined" ? document.getElementById("app") : null;
if (appRoot) void boot(appRoot);
