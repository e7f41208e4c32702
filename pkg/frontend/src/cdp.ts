import WebSocket from "ws";

/** JSON-RPC message exchanged over the devtools wire protocol. */
interface CdpMessage {
  id?: number;
  method?: string;
  params?: Record<string, unknown>;
  sessionId?: string;
  result?: unknown;
  error?: { code: number; message: string };
}

type EventListener = (msg: CdpMessage) => void;

/** Thin client for the devtools remote-debugging protocol. */
export class CdpConnection {
  private nextId = 1;
  private pending = new Map<
    number,
    { resolve: (value: unknown) => void; reject: (err: Error) => void }
  >();
  private listeners = new Set<EventListener>();

  private constructor(private ws: WebSocket) {
    ws.on("message", (data) => this.onMessage(data.toString()));
  }

  static connect(wsUrl: string): Promise<CdpConnection> {
    return new Promise((resolve, reject) => {
      const ws = new WebSocket(wsUrl);
      ws.once("open", () => resolve(new CdpConnection(ws)));
      ws.once("error", (err) => reject(err));
    });
  }

  private onMessage(raw: string): void {
    let msg: CdpMessage;
    try {
      msg = JSON.parse(raw) as CdpMessage;
    } catch {
      return;
    }
    if (msg.id !== undefined && this.pending.has(msg.id)) {
      const entry = this.pending.get(msg.id)!;
      this.pending.delete(msg.id);
      if (msg.error) {
        entry.reject(new Error(`${msg.error.message} (code ${msg.error.code})`));
      } else {
        entry.resolve(msg.result);
      }
      return;
    }
    if (msg.method) {
      for (const listener of this.listeners) listener(msg);
    }
  }

  send<T = Record<string, unknown>>(
    method: string,
    params: Record<string, unknown> = {},
    sessionId?: string,
  ): Promise<T> {
    const id = this.nextId++;
    const payload: CdpMessage = { id, method, params };
    if (sessionId) payload.sessionId = sessionId;
    return new Promise<T>((resolve, reject) => {
      this.pending.set(id, { resolve: resolve as (v: unknown) => void, reject });
      this.ws.send(JSON.stringify(payload));
    });
  }

  /** Resolve with the event's params the next time `method` fires for the session. */
  waitForEvent(
    method: string,
    sessionId: string | undefined,
    timeoutMs: number,
  ): Promise<Record<string, unknown>> {
    return new Promise((resolve, reject) => {
      const listener: EventListener = (msg) => {
        if (msg.method !== method) return;
        if (sessionId && msg.sessionId !== sessionId) return;
        cleanup();
        resolve(msg.params ?? {});
      };
      const timer = setTimeout(() => {
        cleanup();
        reject(new Error(`timed out after ${timeoutMs}ms waiting for ${method}`));
      }, timeoutMs);
      const cleanup = () => {
        clearTimeout(timer);
        this.listeners.delete(listener);
      };
      this.listeners.add(listener);
    });
  }

  close(): void {
    this.ws.close();
  }
}

/** Resolve the browser's websocket debugger URL from its HTTP endpoint. */
export async function discoverWebSocketUrl(endpoint: string): Promise<string> {
  const response = await fetch(new URL("/json/version", endpoint));
  if (!response.ok) {
    throw new Error(`endpoint ${endpoint} answered ${response.status}`);
  }
  const body = (await response.json()) as { webSocketDebuggerUrl?: string };
  if (!body.webSocketDebuggerUrl) {
    throw new Error("endpoint did not report a webSocketDebuggerUrl");
  }
  return body.webSocketDebuggerUrl;
}
