import {
  RecourseRequestBody,
  RecourseResponse,
  SchemaResponse,
  ScoreResponse,
} from './types';

export class ApiError extends Error {
  constructor(public status: number, public errors: string[]) {
    super(`request failed (${status}): ${errors.join('; ')}`);
  }
}

/** Thin fetch wrapper over the recourse service; no client-side math. */
export class ApiClient {
  constructor(private readonly baseUrl: string) {}

  async schema(): Promise<SchemaResponse> {
    const res = await fetch(`${this.baseUrl}/schema`);
    if (!res.ok) {
      throw new ApiError(res.status, ['schema fetch failed']);
    }
    return (await res.json()) as SchemaResponse;
  }

  async score(x: number[]): Promise<ScoreResponse> {
    const res = await fetch(`${this.baseUrl}/score`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ x }),
    });
    const body = await res.json();
    if (!res.ok) {
      throw new ApiError(res.status, body.errors ?? ['score failed']);
    }
    return body as ScoreResponse;
  }

  /** Returns the body for both 200 (found) and 422 (honest search failure). */
  async recourse(request: RecourseRequestBody): Promise<RecourseResponse> {
    const res = await fetch(`${this.baseUrl}/recourse`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(request),
    });
    const body = await res.json();
    if (res.status !== 200 && res.status !== 422) {
      throw new ApiError(res.status, body.errors ?? ['recourse failed']);
    }
    return body as RecourseResponse;
  }
}
