// Thin WebSocket wrapper: JSON framing, decode guard, auto-reconnect with
// a fresh-session banner. The constructor is injectable so tests can drive
// the same class with a Node client.

import { decodeServerMessage, type ClientMessage, type ServerMessage } from "./protocol";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  readyState: number;
}

export type SocketFactory = (url: string) => SocketLike;

const OPEN = 1;

export class PlaygroundSocket {
  private socket: SocketLike | null = null;
  private closed = false;
  private reconnectDelay = 500;

  onMessage: (msg: ServerMessage) => void = () => {};
  onSessionStart: () => void = () => {};
  onDisconnect: () => void = () => {};

  constructor(
    private url: string,
    private factory: SocketFactory = (u) => new WebSocket(u) as unknown as SocketLike,
  ) {}

  connect(): void {
    this.closed = false;
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.reconnectDelay = 500;
      this.onSessionStart();
    };
    socket.onmessage = (event) => {
      const msg = decodeServerMessage(String(event.data));
      if (msg) this.onMessage(msg);
    };
    socket.onclose = () => {
      this.socket = null;
      this.onDisconnect();
      if (!this.closed) {
        setTimeout(() => this.connect(), this.reconnectDelay);
        this.reconnectDelay = Math.min(this.reconnectDelay * 2, 10_000);
      }
    };
  }

  send(message: ClientMessage): boolean {
    if (!this.socket || this.socket.readyState !== OPEN) return false;
    this.socket.send(JSON.stringify(message));
    return true;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
