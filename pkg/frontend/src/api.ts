/** Typed client for the synthesis service. Deferred solves (202 + poll URL)
 * are followed transparently at a fixed 500 ms interval. */

import type {
  DesignDoc,
  ExplainDoc,
  ExplainRequestBody,
  QueryDoc,
  ServiceErrorBody,
} from "./types.js";

export interface ResponseLike {
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<ResponseLike>;

export class ServiceError extends Error {
  constructor(
    public status: number,
    public body: ServiceErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

const POLL_INTERVAL_MS = 500;

function defaultSleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike,
    private sleep: (ms: number) => Promise<void> = defaultSleep,
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    return this.settle(response);
  }

  /** Follow 202 poll documents until the job settles. */
  private async settle(response: ResponseLike): Promise<unknown> {
    let current = response;
    while (current.status === 202) {
      const body = (await current.json()) as { poll: string };
      await this.sleep(POLL_INTERVAL_MS);
      current = await this.fetchFn(this.baseUrl + body.poll, { method: "GET" });
    }
    if (current.status === 204) return undefined;
    const payload = await current.json();
    if (current.status >= 400) {
      throw new ServiceError(current.status, payload as ServiceErrorBody);
    }
    return payload;
  }

  async createSession(catalog?: unknown): Promise<string> {
    const body = catalog === undefined ? {} : { catalog };
    const doc = (await this.request("POST", "/v1/sessions", body)) as { session: string };
    return doc.session;
  }

  async putQuery(session: string, query: QueryDoc): Promise<void> {
    await this.request("PUT", `/v1/sessions/${session}/query`, query);
  }

  async synthesize(session: string, query?: QueryDoc): Promise<DesignDoc> {
    const body = query === undefined ? {} : { query };
    return (await this.request(
      "POST",
      `/v1/sessions/${session}/synthesize`,
      body,
    )) as DesignDoc;
  }

  async explain(session: string, request: ExplainRequestBody): Promise<ExplainDoc> {
    return (await this.request(
      "POST",
      `/v1/sessions/${session}/explain`,
      request,
    )) as ExplainDoc;
  }

  async latestDesign(session: string): Promise<DesignDoc> {
    return (await this.request(
      "GET",
      `/v1/sessions/${session}/designs/latest`,
    )) as DesignDoc;
  }

  async deleteSession(session: string): Promise<void> {
    await this.request("DELETE", `/v1/sessions/${session}`);
  }
}
