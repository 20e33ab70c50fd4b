/**
 * How SessionMessages reach a session.  The default transport runs the
 * engine in-browser (fully offline); the HTTP transport targets the
 * loopback host's /api/message endpoint.  Either way requests are
 * serialized so at most one message is ever in flight.
 */

import { Reply, SessionMessage, handleMessage } from "./protocol.js";
import { Session } from "./session.js";

export type Transport = (message: SessionMessage) => Promise<Reply>;

/** Drive an in-browser session; optionally record the message log. */
export function localTransport(session: Session, log?: SessionMessage[]): Transport {
  return async (message) => {
    log?.push(JSON.parse(JSON.stringify(message)));
    return handleMessage(session, message);
  };
}

/** POST each message to a session host. */
export function httpTransport(base = ""): Transport {
  let chain: Promise<unknown> = Promise.resolve();
  return (message) => {
    const next = chain.then(async (): Promise<Reply> => {
      const response = await fetch(`${base}/api/message`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(message),
      });
      return (await response.json()) as Reply;
    });
    chain = next.catch(() => undefined);
    return next;
  };
}
