// Thin typed client for the engine's HTTP + push API.

import type { DatasetInfo, LayoutPayload, RevisionEvent, SessionCreated } from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function parseError(response: Response): Promise<never> {
  let detail = `${response.status}`;
  try {
    const body = await response.json();
    detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
  } catch {
    // leave the status code
  }
  throw new ApiError(response.status, detail);
}

export interface DragWire {
  item_id: string;
  x: number;
  y: number;
}

export class Client {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!response.ok && response.status !== 202) return parseError(response);
    return (await response.json()) as T;
  }

  listDatasets(): Promise<DatasetInfo[]> {
    return this.request("/datasets");
  }

  createSession(dataset: string): Promise<SessionCreated> {
    return this.request("/sessions", { method: "POST", body: JSON.stringify({ dataset }) });
  }

  getSession(sessionId: string): Promise<LayoutPayload> {
    return this.request(`/sessions/${sessionId}`);
  }

  /** Commit a drag batch. A 202 means the solve is still running; the
   * returned payload arrives on the events channel instead. */
  postOli(sessionId: string, drags: DragWire[]): Promise<LayoutPayload | { revision: number }> {
    return this.request(`/sessions/${sessionId}/oli`, {
      method: "POST",
      body: JSON.stringify({ drags }),
    });
  }

  putWeight(sessionId: string, index: number, value: number): Promise<LayoutPayload | { revision: number }> {
    return this.request(`/sessions/${sessionId}/weights/${index}`, {
      method: "PUT",
      body: JSON.stringify({ value }),
    });
  }

  maximizeWeight(sessionId: string, index: number): Promise<LayoutPayload | { revision: number }> {
    return this.request(`/sessions/${sessionId}/weights/${index}/maximize`, { method: "POST" });
  }

  resetSession(sessionId: string): Promise<LayoutPayload | { revision: number }> {
    return this.request(`/sessions/${sessionId}/reset`, { method: "POST" });
  }

  thumbnailUrl(dataset: string, itemId: string): string {
    return `${this.baseUrl}/datasets/${dataset}/thumbs/${itemId}.png`;
  }
}

export type WebSocketFactory = (url: string) => WebSocket;

/** Revision-ordered event subscription with automatic re-sync.
 *
 * On connection loss the client polls the session once to catch up (the
 * payload carries its revision; stale ones are ignored upstream) and
 * reconnects.
 */
export class EventsChannel {
  private closed = false;
  private socket: WebSocket | null = null;

  constructor(
    private readonly client: Client,
    private readonly sessionId: string,
    private readonly onEvent: (event: RevisionEvent) => void,
    private readonly makeSocket: WebSocketFactory = (url) => new WebSocket(url),
    private readonly reconnectDelayMs = 500,
  ) {}

  start(): void {
    if (this.closed) return;
    const base = this.client.baseUrl || (typeof location !== "undefined" ? location.origin : "");
    const wsBase = base.replace(/^http/, "ws");
    const socket = this.makeSocket(`${wsBase}/sessions/${this.sessionId}/events`);
    this.socket = socket;
    socket.onmessage = (message) => {
      this.onEvent(JSON.parse(message.data as string) as RevisionEvent);
    };
    socket.onclose = () => {
      if (this.closed) return;
      void this.resync();
      setTimeout(() => this.start(), this.reconnectDelayMs);
    };
  }

  private async resync(): Promise<void> {
    try {
      const payload = await this.client.getSession(this.sessionId);
      this.onEvent({ revision: payload.revision, payload });
    } catch {
      // next reconnect will retry
    }
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
