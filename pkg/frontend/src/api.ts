// Thin fetch wrapper over the gridqa HTTP API. All answering happens on
// the server; this module only moves JSON and surfaces the server's own
// error taxonomy as ApiError values.

import type {
  AnswerDoc,
  AskMode,
  HealthDoc,
  NeighborhoodDoc,
  SchemaDoc,
  SessionDoc,
} from "./types.js";
import { validateAnswerDoc } from "./validate.js";

export class ApiError extends Error {
  code: string;
  status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.status = status;
  }
}

async function decode(resp: Response): Promise<unknown> {
  let body: unknown;
  try {
    body = await resp.json();
  } catch {
    throw new ApiError("internal", `non-JSON response (HTTP ${resp.status})`, resp.status);
  }
  if (!resp.ok) {
    const err = (body as { error?: { code?: string; message?: string } }).error;
    throw new ApiError(err?.code ?? "internal", err?.message ?? `HTTP ${resp.status}`, resp.status);
  }
  return body;
}

export interface AskOptions {
  session?: string;
  mode?: AskMode;
  deps?: string;
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetcher: typeof fetch = fetch,
  ) {}

  private async get(path: string): Promise<unknown> {
    const resp = await this.fetcher(`${this.base}${path}`);
    return decode(resp);
  }

  private async post(path: string, body: unknown): Promise<unknown> {
    const resp = await this.fetcher(`${this.base}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return decode(resp);
  }

  async ask(question: string, opts: AskOptions = {}): Promise<AnswerDoc> {
    const body: Record<string, unknown> = { question };
    if (opts.session) body.session = opts.session;
    if (opts.mode) body.mode = opts.mode;
    if (opts.deps) body.deps = opts.deps;
    return validateAnswerDoc(await this.post("/api/ask", body));
  }

  async createSession(): Promise<SessionDoc> {
    return (await this.post("/api/session", {})) as SessionDoc;
  }

  async anchor(session: string, vertex: string): Promise<SessionDoc> {
    return (await this.post(`/api/session/${encodeURIComponent(session)}/anchor`, { vertex })) as SessionDoc;
  }

  async schema(): Promise<SchemaDoc> {
    return (await this.get("/api/schema")) as SchemaDoc;
  }

  async neighborhood(vertex: string, hops = 1): Promise<NeighborhoodDoc> {
    const q = `vertex=${encodeURIComponent(vertex)}&hops=${hops}`;
    return (await this.get(`/api/graph/neighborhood?${q}`)) as NeighborhoodDoc;
  }

  async health(): Promise<HealthDoc> {
    return (await this.get("/api/health")) as HealthDoc;
  }
}
