import { readFileSync } from "node:fs";

import type { FetchLike, ResponseLike } from "../src/api.js";

export function fixture<T>(name: string): T {
  const url = new URL(`../fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export interface RecordedCall {
  method: string;
  url: string;
  body?: unknown;
}

/** Scripted fetch double: responds per (method, path-suffix) rules, records
 * every call so tests can count PUT/POST traffic exactly. */
export function fakeFetch(
  rules: { method: string; path: string; status?: number; body: unknown }[],
): { fetchFn: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    calls.push({
      method,
      url,
      body: init?.body === undefined ? undefined : JSON.parse(init.body),
    });
    for (const rule of rules) {
      if (rule.method === method && url.includes(rule.path)) {
        const response: ResponseLike = {
          status: rule.status ?? 200,
          json: async () => rule.body,
        };
        return response;
      }
    }
    return { status: 404, json: async () => ({ code: "no-rule", message: url, details: [] }) };
  };
  return { fetchFn, calls };
}
