/**
 * Thin typed client for the session API. The fetch implementation is
 * injectable so tests can replay recorded traffic.
 */

import type { ApiErrorBody, InterviewEntry, SessionDoc, WhatifResponse } from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(body.message);
    this.name = 'ApiError';
  }
}

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string = '',
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { 'content-type': 'application/json' } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const response = await this.fetchFn(this.baseUrl + path, init);
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, payload as ApiErrorBody);
    }
    return payload as T;
  }

  createSession(name: string, alpha = 0.05): Promise<SessionDoc> {
    return this.request('POST', '/api/sessions', { name, alpha });
  }

  getSession(sessionId: string): Promise<SessionDoc> {
    return this.request('GET', `/api/sessions/${sessionId}`);
  }

  appendInterview(sessionId: string, entry: InterviewEntry): Promise<SessionDoc> {
    return this.request('POST', `/api/sessions/${sessionId}/interviews`, entry);
  }

  undo(sessionId: string): Promise<SessionDoc> {
    return this.request('POST', `/api/sessions/${sessionId}/undo`);
  }

  whatif(sessionId: string, pattern: number[], ruleK = 3): Promise<WhatifResponse> {
    return this.request('POST', `/api/sessions/${sessionId}/whatif`, {
      pattern,
      rule_k: ruleK,
    });
  }

  async exportCsv(sessionId: string): Promise<string> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/sessions/${sessionId}/export?format=csv`,
      { method: 'GET' },
    );
    if (!response.ok) {
      throw new ApiError(response.status, (await response.json()) as ApiErrorBody);
    }
    return response.text();
  }
}
