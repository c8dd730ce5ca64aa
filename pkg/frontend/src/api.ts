/**
 * Typed client for the studio service's /v1 JSON API.
 *
 * Every non-2xx response carries `{code, message, details}`; it surfaces
 * as an ApiRequestError so callers can branch on `code` (dead_end,
 * token_not_allowed, ...) without string matching.
 */

export interface SessionDescriptor {
  session_id: string;
  model: string;
  filters: string[];
  context_text: string;
  context_ids: number[];
  allowed_count: number;
  undo_depth: number;
}

export interface ContinuationFeatures {
  length: number;
  syllables: number | null;
  stress: string | null;
  rhyme_key: string | null;
}

export interface ContinuationEntry {
  token_id: number;
  surface: string;
  probability: number;
  features: ContinuationFeatures;
}

export interface ContinuationList {
  allowed_count: number;
  entries: ContinuationEntry[];
}

export interface RejectedToken {
  token_id: number;
  surface: string;
  probability: number;
  rejected_by: string;
}

export interface FilterField {
  key: string;
  arg: string | null;
  requires: string[];
  description: string;
}

export interface FilterSchema {
  filters: FilterField[];
  presets: Record<string, string[]>;
}

export type Action =
  | { type: "accept"; token_id?: number; token?: string; forced?: boolean }
  | { type: "generate"; n: number; backtrack?: number }
  | { type: "undo"; steps: number }
  | { type: "set_filters"; filters: string[] };

export class ApiRequestError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly details: Record<string, unknown>,
    readonly status: number,
  ) {
    super(message);
  }

  get deadEndDiagnostics(): RejectedToken[] {
    return (this.details.diagnostics as RejectedToken[]) ?? [];
  }
}

async function parse<T>(resp: Response): Promise<T> {
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    throw new ApiRequestError(
      (body as { code?: string }).code ?? "http_error",
      (body as { message?: string }).message ?? `HTTP ${resp.status}`,
      (body as { details?: Record<string, unknown> }).details ?? {},
      resp.status,
    );
  }
  return body as T;
}

export class StudioApi {
  constructor(readonly base: string) {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  async health(): Promise<{ status: string; models: string[] }> {
    return parse(await fetch(this.url("/v1/health")));
  }

  async filterSchema(): Promise<FilterSchema> {
    return parse(await fetch(this.url("/v1/filters")));
  }

  async createSession(req: {
    model: string;
    filters?: string[];
    sampling?: string;
    seed?: number;
  }): Promise<SessionDescriptor> {
    return parse(
      await fetch(this.url("/v1/sessions"), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(req),
      }),
    );
  }

  async getSession(id: string): Promise<SessionDescriptor> {
    return parse(await fetch(this.url(`/v1/sessions/${id}`)));
  }

  async continuations(id: string, m = 10): Promise<ContinuationList> {
    return parse(
      await fetch(this.url(`/v1/sessions/${id}/continuations?m=${m}`)),
    );
  }

  async act(id: string, action: Action): Promise<SessionDescriptor> {
    return parse(
      await fetch(this.url(`/v1/sessions/${id}/actions`), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ action }),
      }),
    );
  }

  async deleteSession(id: string): Promise<void> {
    await fetch(this.url(`/v1/sessions/${id}`), { method: "DELETE" });
  }
}
