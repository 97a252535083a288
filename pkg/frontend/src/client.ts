import type { Cell, MoveLog, SessionView } from "./types.js";

export interface SessionConfig {
  scene: unknown;
  m?: number;
  controller?: string;
  start: { pursuers: Cell[]; evaders: Cell[] };
  k_max?: number;
  seed?: number;
  dt?: number;
}

export class HttpError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

type FetchFn = typeof fetch;

async function toJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      detail = ((await response.json()) as { detail?: string }).detail ?? detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new HttpError(response.status, detail);
  }
  return (await response.json()) as T;
}

export async function createSession(
  base: string,
  config: SessionConfig,
  fetchFn: FetchFn = fetch,
): Promise<SessionView> {
  const response = await fetchFn(`${base}/sessions`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(config),
  });
  return toJson<SessionView>(response);
}

export async function submitMove(
  base: string,
  sessionId: string,
  cell: Cell,
  fetchFn: FetchFn = fetch,
): Promise<SessionView> {
  const response = await fetchFn(`${base}/sessions/${sessionId}/moves`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ cell }),
  });
  return toJson<SessionView>(response);
}

export async function fetchLog(
  base: string,
  sessionId: string,
  fetchFn: FetchFn = fetch,
): Promise<MoveLog> {
  const response = await fetchFn(`${base}/sessions/${sessionId}/log`);
  return toJson<MoveLog>(response);
}

export interface Stream {
  close(): void;
}

type SocketFactory = (url: string) => WebSocket;

/** Subscribe to the per-session push stream; every frame is a full view. */
export function openStream(
  base: string,
  sessionId: string,
  onView: (view: SessionView) => void,
  socketFactory: SocketFactory = (url) => new WebSocket(url),
): Stream {
  const wsBase = base.replace(/^http/, "ws");
  const socket = socketFactory(`${wsBase}/sessions/${sessionId}/stream`);
  socket.onmessage = (event: MessageEvent) => {
    onView(JSON.parse(String(event.data)) as SessionView);
  };
  return { close: () => socket.close() };
}
