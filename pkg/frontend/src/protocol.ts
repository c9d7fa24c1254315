/**
 * Newline-delimited protocol client.
 *
 * The engine writes event lines before the response line of the command
 * that caused them, so every pending request collects events until its
 * response (matched id) arrives. Commands are sent strictly one at a
 * time; extra requests queue locally.
 */

import type {
  CommandResponse,
  EventMessage,
  ProtocolMessage,
  WorkspaceListing,
} from "./types.js";

export interface LineTransport {
  sendLine(line: string): void;
  onLine(handler: (line: string) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

export interface Exchange {
  response: CommandResponse;
  events: EventMessage[];
}

interface Pending {
  id: number;
  resolve(exchange: Exchange): void;
  reject(error: Error): void;
  send(): void;
}

export class ProtocolError extends Error {
  readonly code: string;

  constructor(code: string, message: string) {
    super(message);
    this.code = code;
  }
}

export function splitLines(buffer: string, chunk: string): [string, string[]] {
  const combined = buffer + chunk;
  const parts = combined.split("\n");
  const rest = parts.pop() ?? "";
  return [rest, parts.filter((line) => line.trim().length > 0)];
}

export class ProtocolClient {
  private transport: LineTransport;
  private nextId = 1;
  private queue: Pending[] = [];
  private inFlight: Pending | null = null;
  private pendingEvents: EventMessage[] = [];
  private eventHandlers: Array<(event: EventMessage) => void> = [];
  private closed = false;

  constructor(transport: LineTransport) {
    this.transport = transport;
    transport.onLine((line) => this.handleLine(line));
    transport.onClose(() => this.handleClose());
  }

  onEvent(handler: (event: EventMessage) => void): void {
    this.eventHandlers.push(handler);
  }

  /** Send one command; resolves with the response and its event lines. */
  request(cmd: string, args: Record<string, unknown> = {}): Promise<Exchange> {
    if (this.closed) {
      return Promise.reject(new ProtocolError("ConnectionClosed", "transport is closed"));
    }
    const id = this.nextId++;
    return new Promise<Exchange>((resolve, reject) => {
      const pending: Pending = {
        id,
        resolve,
        reject,
        send: () => this.transport.sendLine(JSON.stringify({ id, cmd, args })),
      };
      this.queue.push(pending);
      this.pump();
    });
  }

  /** Like request, but rejects with a ProtocolError when ok is false. */
  async call(cmd: string, args: Record<string, unknown> = {}): Promise<Exchange> {
    const exchange = await this.request(cmd, args);
    if (!exchange.response.ok) {
      const error = exchange.response.error ?? { code: "Unknown", message: "unknown error" };
      throw new ProtocolError(error.code, error.message);
    }
    return exchange;
  }

  async list(): Promise<WorkspaceListing> {
    const exchange = await this.call("list");
    return exchange.response.result as unknown as WorkspaceListing;
  }

  close(): void {
    this.closed = true;
    this.transport.close();
  }

  private pump(): void {
    if (this.inFlight === null && this.queue.length > 0) {
      this.inFlight = this.queue.shift() ?? null;
      this.pendingEvents = [];
      this.inFlight?.send();
    }
  }

  private handleLine(line: string): void {
    let message: ProtocolMessage;
    try {
      message = JSON.parse(line) as ProtocolMessage;
    } catch {
      return; // not ours to crash the UI over
    }
    if ("event" in message) {
      this.pendingEvents.push(message);
      for (const handler of this.eventHandlers) {
        handler(message);
      }
      return;
    }
    const pending = this.inFlight;
    if (pending === null) {
      return;
    }
    this.inFlight = null;
    const events = this.pendingEvents;
    this.pendingEvents = [];
    pending.resolve({ response: message, events });
    this.pump();
  }

  private handleClose(): void {
    this.closed = true;
    const failure = new ProtocolError("ConnectionClosed", "connection closed");
    if (this.inFlight) {
      this.inFlight.reject(failure);
      this.inFlight = null;
    }
    for (const pending of this.queue.splice(0)) {
      pending.reject(failure);
    }
  }
}

/** Browser transport: one protocol line per WebSocket text message. */
export class WebSocketTransport implements LineTransport {
  private socket: WebSocket;
  private buffer = "";
  private lineHandlers: Array<(line: string) => void> = [];
  private closeHandlers: Array<() => void> = [];

  constructor(url: string) {
    this.socket = new WebSocket(url);
    this.socket.onmessage = (message: MessageEvent<string>) => {
      const [rest, lines] = splitLines(this.buffer, String(message.data));
      this.buffer = rest;
      for (const line of lines) {
        for (const handler of this.lineHandlers) {
          handler(line);
        }
      }
    };
    this.socket.onclose = () => {
      for (const handler of this.closeHandlers) {
        handler();
      }
    };
  }

  ready(): Promise<void> {
    if (this.socket.readyState === WebSocket.OPEN) {
      return Promise.resolve();
    }
    return new Promise((resolve, reject) => {
      this.socket.addEventListener("open", () => resolve(), { once: true });
      this.socket.addEventListener("error", () => reject(new Error("websocket failed")), {
        once: true,
      });
    });
  }

  sendLine(line: string): void {
    this.socket.send(line + "\n");
  }

  onLine(handler: (line: string) => void): void {
    this.lineHandlers.push(handler);
  }

  onClose(handler: () => void): void {
    this.closeHandlers.push(handler);
  }

  close(): void {
    this.socket.close();
  }
}
