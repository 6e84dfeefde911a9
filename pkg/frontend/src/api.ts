/** Typed client for the session API; every method maps to exactly one
 * endpoint and returns the server's JSON or throws an ApiError carrying
 * the status code and the server's error text verbatim. */

import type { SuggestionDto, TreeDto, VerifyResultDto } from './types.js';

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private base: string = '',
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: object): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { 'Content-Type': 'application/json' };
      init.body = JSON.stringify({ api: 1, ...body });
    }
    const response = await this.fetchImpl(this.base + path, init);
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, payload.error ?? response.statusText);
    }
    return payload as T;
  }

  async createSession(spec: string): Promise<string> {
    const out = await this.request<{ session: string }>('POST', '/sessions', { spec });
    return out.session;
  }

  async getTree(session: string): Promise<TreeDto> {
    const out = await this.request<{ tree: TreeDto }>('GET', `/sessions/${session}/tree`);
    return out.tree;
  }

  apply(session: string, node: number, law: string): Promise<unknown> {
    return this.request('POST', `/sessions/${session}/nodes/${node}/apply`, { law });
  }

  verify(session: string, node: number): Promise<VerifyResultDto> {
    return this.request('POST', `/sessions/${session}/nodes/${node}/verify`);
  }

  backtrack(session: string, node: number, reason: string): Promise<unknown> {
    return this.request('POST', `/sessions/${session}/nodes/${node}/backtrack`, { reason });
  }

  async suggest(session: string, node: number): Promise<SuggestionDto> {
    const out = await this.request<{ proposal: SuggestionDto }>(
      'POST', `/sessions/${session}/nodes/${node}/suggest`);
    return out.proposal;
  }

  async getProgram(session: string): Promise<string> {
    const out = await this.request<{ program: string }>(
      'GET', `/sessions/${session}/program`);
    return out.program;
  }
}
