// Thin API client with latest-wins semantics: at most one in-flight request
// per endpoint; a newer request aborts the older one so slider storms can
// never resolve out of order.

export class AbortedRequest extends Error {
  constructor() {
    super("superseded by a newer request");
  }
}

export class ApiError extends Error {
  status: number;
  body: unknown;

  constructor(status: number, body: unknown) {
    super(`request failed with status ${status}`);
    this.status = status;
    this.body = body;
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  private base: string;
  private fetchImpl: FetchLike;
  private inflight = new Map<string, AbortController>();

  constructor(base = "", fetchImpl: FetchLike = fetch) {
    this.base = base;
    this.fetchImpl = fetchImpl;
  }

  async post<T>(endpoint: string, body: unknown): Promise<{ payload: T; status: number }> {
    this.inflight.get(endpoint)?.abort();
    const controller = new AbortController();
    this.inflight.set(endpoint, controller);
    let response: Response;
    try {
      response = await this.fetchImpl(this.base + endpoint, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
        signal: controller.signal,
      });
    } catch (err) {
      if (controller.signal.aborted) {
        throw new AbortedRequest();
      }
      throw err;
    } finally {
      if (this.inflight.get(endpoint) === controller) {
        this.inflight.delete(endpoint);
      }
    }
    const payload = (await response.json()) as T;
    // 207: partial simulate results (some multipliers diverged) - still renderable
    if (response.status !== 200 && response.status !== 207) {
      throw new ApiError(response.status, payload);
    }
    return { payload, status: response.status };
  }

  async getDefaultConfig<T>(): Promise<T | null> {
    const response = await this.fetchImpl(this.base + "/config/default", { method: "GET" });
    if (!response.ok) {
      return null;
    }
    return (await response.json()) as T;
  }
}

export function debounce<A extends unknown[]>(fn: (...args: A) => void, ms: number): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) {
      clearTimeout(timer);
    }
    timer = setTimeout(() => fn(...args), ms);
  };
}
