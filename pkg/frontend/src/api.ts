/**
 * Minimal fetch client for the binflip service.
 *
 * Every helper resolves to the parsed JSON body or throws an ApiError
 * carrying the server's error code and message (or a transport message when
 * the request never produced a JSON body).
 */

import type {
  Condition,
  DistributionsResponse,
  ExplainResponse,
  InstanceSummary,
  InstancesResponse,
  MetaResponse,
} from './types.js';

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = 'ApiError';
    this.status = status;
    this.code = code;
  }
}

export interface ExplainRequest {
  instance: number | number[];
  locks: string[];
  w?: number;
  l?: number;
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(base + path, init);
  } catch (err) {
    throw new ApiError(0, 'network_error', err instanceof Error ? err.message : String(err));
  }
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    // fall through; non-JSON bodies are only acceptable for errors
  }
  if (!response.ok) {
    const wrapped = body as { error?: { code?: string; message?: string } } | null;
    throw new ApiError(
      response.status,
      wrapped?.error?.code ?? 'http_error',
      wrapped?.error?.message ?? `request failed with status ${response.status}`,
    );
  }
  if (body === null) {
    throw new ApiError(response.status, 'bad_body', 'response body is not JSON');
  }
  return body as T;
}

export class BinflipClient {
  constructor(private readonly base: string = '') {}

  getMeta(): Promise<MetaResponse> {
    return request(this.base, '/api/v1/meta');
  }

  getInstances(offset = 0, limit = 50): Promise<InstancesResponse> {
    return request(this.base, `/api/v1/instances?offset=${offset}&limit=${limit}`);
  }

  getSummary(index: number): Promise<InstanceSummary> {
    return request(this.base, `/api/v1/instances/${index}/summary`);
  }

  explain(req: ExplainRequest): Promise<ExplainResponse> {
    return request(this.base, '/api/v1/explain', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(req),
    });
  }

  getDistributions(condition: Condition): Promise<DistributionsResponse> {
    return request(this.base, `/api/v1/distributions?condition=${condition}`);
  }
}
