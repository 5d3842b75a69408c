/**
 * Kernel connections.
 *
 * Every connection validates frames on receipt and refuses to send
 * schema-invalid messages.  RecordedConnection replays captured kernel
 * sessions so the whole client is testable without a live kernel.
 */

import {
  encodeClientMessage,
  parseServerFrame,
  type ClientMessage,
  type ServerFrame,
} from "./wire.js";

export interface Connection {
  send(msg: ClientMessage): void;
  onFrame(cb: (frame: ServerFrame) => void): void;
  onProtocolError(cb: (message: string) => void): void;
  close(): void;
}

type FrameCb = (frame: ServerFrame) => void;
type ErrorCb = (message: string) => void;

/** Browser WebSocket transport (also works with ws's WebSocket in Node). */
export class WebSocketConnection implements Connection {
  private frameCbs: FrameCb[] = [];
  private errorCbs: ErrorCb[] = [];
  private ws: WebSocket;

  constructor(url: string, socketFactory?: (url: string) => WebSocket) {
    this.ws = socketFactory ? socketFactory(url) : new WebSocket(url);
    this.ws.addEventListener("message", (event: MessageEvent) => {
      this.dispatchRaw(String(event.data));
    });
  }

  protected dispatchRaw(raw: string): void {
    const parsed = parseServerFrame(raw);
    if (parsed.ok) {
      for (const cb of this.frameCbs) {
        cb(parsed.frame);
      }
    } else {
      for (const cb of this.errorCbs) {
        cb(parsed.error);
      }
    }
  }

  send(msg: ClientMessage): void {
    this.ws.send(encodeClientMessage(msg));
  }

  onFrame(cb: FrameCb): void {
    this.frameCbs.push(cb);
  }

  onProtocolError(cb: ErrorCb): void {
    this.errorCbs.push(cb);
  }

  close(): void {
    this.ws.close();
  }
}

export interface RecordedExchange {
  /** the client message this exchange responds to */
  send: ClientMessage;
  /** raw frames the kernel answered with */
  recv: string[];
}

/**
 * Replays a recorded kernel session: each outgoing message must match
 * the next recorded one structurally, and its recorded responses are
 * dispatched.  When frozen, nothing comes back at all.
 */
export class RecordedConnection implements Connection {
  sent: ClientMessage[] = [];
  frozen = false;
  private cursor = 0;
  private frameCbs: FrameCb[] = [];
  private errorCbs: ErrorCb[] = [];

  constructor(private recording: RecordedExchange[], private strict = true) {}

  send(msg: ClientMessage): void {
    const encoded = encodeClientMessage(msg); // throws on schema violations
    this.sent.push(JSON.parse(encoded) as ClientMessage);
    if (this.frozen) {
      return;
    }
    const expected = this.recording[this.cursor];
    if (expected === undefined) {
      if (this.strict) {
        throw new Error(`unexpected message past end of recording: ${encoded}`);
      }
      return;
    }
    if (this.strict && expected.send.op !== msg.op) {
      throw new Error(`recorded ${expected.send.op} but client sent ${msg.op}`);
    }
    this.cursor += 1;
    for (const raw of expected.recv) {
      const parsed = parseServerFrame(raw);
      if (parsed.ok) {
        for (const cb of this.frameCbs) {
          cb(parsed.frame);
        }
      } else {
        for (const cb of this.errorCbs) {
          cb(parsed.error);
        }
      }
    }
  }

  onFrame(cb: FrameCb): void {
    this.frameCbs.push(cb);
  }

  onProtocolError(cb: ErrorCb): void {
    this.errorCbs.push(cb);
  }

  close(): void {
    this.frozen = true;
  }
}
