import { FetchLike } from '../src/api';
import { CatalogItem } from '../src/types';

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

/** Route-based fetch mock; records every call it serves. */
export function mockFetch(
  routes: Record<string, (init?: RequestInit) => Response | Promise<Response>>,
): FetchLike & { calls: Array<{ url: string; body: unknown }> } {
  const calls: Array<{ url: string; body: unknown }> = [];
  const fn = (async (url: string, init?: RequestInit) => {
    const route = Object.keys(routes).find((r) => url.endsWith(r));
    if (!route) throw new Error(`unmocked url ${url}`);
    calls.push({ url, body: init?.body ? JSON.parse(String(init.body)) : undefined });
    if (init?.signal?.aborted) {
      throw new DOMException('aborted', 'AbortError');
    }
    return routes[route]!(init);
  }) as FetchLike & { calls: typeof calls };
  fn.calls = calls;
  return fn;
}

export function makeItem(overrides: Partial<CatalogItem> = {}): CatalogItem {
  return {
    question: 'Who improved the engine?',
    answer: 'Watt',
    sentence_index: 0,
    qg_log_prob: -1.2,
    qa_score: -0.5,
    ...overrides,
  };
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
