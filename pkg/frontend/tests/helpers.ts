import type { LayoutPayload } from "../src/types.js";

export function makePayload(revision: number, n = 8, d = 4, jitter = 0): LayoutPayload {
  return {
    revision,
    positions: Array.from({ length: n }, (_, i) => ({
      item_id: `item-${i}`,
      x: Math.cos((2 * Math.PI * i) / n) + jitter * i,
      y: Math.sin((2 * Math.PI * i) / n),
    })),
    weights: Array.from({ length: d }, () => 1.0),
    solve: { converged: true, iterations: 3, final_objective: 0.01 },
    warning: null,
  };
}

export interface FetchCall {
  url: string;
  method: string;
  body?: unknown;
}

/** fetch stub: routes by "METHOD path-suffix", records every call. */
export function stubFetch(
  routes: Record<string, (call: FetchCall) => { status?: number; body: unknown }>,
) {
  const calls: FetchCall[] = [];
  const impl = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    const method = init?.method ?? "GET";
    const call: FetchCall = {
      url,
      method,
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    };
    calls.push(call);
    for (const [key, handler] of Object.entries(routes)) {
      const [routeMethod, suffix] = key.split(" ", 2) as [string, string];
      if (method === routeMethod && new URL(url, "http://test").pathname.endsWith(suffix)) {
        const { status = 200, body } = handler(call);
        return new Response(JSON.stringify(body), {
          status,
          headers: { "content-type": "application/json" },
        });
      }
    }
    return new Response(JSON.stringify({ detail: `no route for ${method} ${url}` }), {
      status: 404,
    });
  };
  globalThis.fetch = impl as typeof fetch;
  return calls;
}

export class FakeWebSocket {
  static instances: FakeWebSocket[] = [];
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: (() => void) | null = null;
  closed = false;

  constructor(readonly url: string) {
    FakeWebSocket.instances.push(this);
  }

  push(event: unknown): void {
    this.onmessage?.({ data: JSON.stringify(event) });
  }

  close(): void {
    this.closed = true;
    this.onclose?.();
  }
}

export function mockRect(el: Element, width = 640, height = 480): void {
  (el as HTMLElement).getBoundingClientRect = () =>
    ({ left: 0, top: 0, right: width, bottom: height, width, height, x: 0, y: 0, toJSON: () => ({}) }) as DOMRect;
}

export function pointerEvent(type: string, x: number, y: number): MouseEvent {
  // jsdom has no PointerEvent constructor; listeners match on type strings
  return new MouseEvent(type, { clientX: x, clientY: y, bubbles: true });
}
