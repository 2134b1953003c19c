// Typed client for the report service. The submission body is assembled from
// exactly three fields; there is no code path that could attach anything
// else (coordinates included) to the wire payload.

import { signHeaders } from './auth.js';

export interface CatalogTag {
  id: string;
  label: string;
}

export interface CatalogQuestion {
  id: string;
  text: string;
  multi_select: boolean;
  tags: CatalogTag[];
}

export interface CatalogSurvey {
  id: string;
  name: string;
  questions: CatalogQuestion[];
}

export interface SchemaResponse {
  version: string;
  surveys: CatalogSurvey[];
}

export type Resolution = 'country' | 'province' | 'city';

export interface Designation {
  country: string;
  province?: string;
  city?: string;
  resolution: Resolution;
}

export interface SubmitResult {
  status: 'pending' | 'released';
}

export interface Violation {
  code: string;
  message: string;
  element: string;
}

export interface CooccurrenceCell {
  tag_a: string;
  tag_b: string;
  count: number;
  percent_given_b: number;
}

export interface CooccurrenceTable {
  question_a: string;
  question_b: string;
  base: number;
  cells: CooccurrenceCell[];
}

export interface GeographyRow {
  name: string;
  count: number;
}

export class ApiError extends Error {
  constructor(
    message: string,
    public status: number,
    public violations: Violation[] = [],
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private sharedKey: string,
    private fetchFn: FetchLike = (...args) => globalThis.fetch(...args),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!resp.ok) throw new ApiError(`GET ${path} failed`, resp.status);
    return (await resp.json()) as T;
  }

  getSchema(): Promise<SchemaResponse> {
    return this.getJson('/api/v1/schema');
  }

  async submitReport(
    schemaVersion: string,
    selections: string[],
    designation: Designation,
  ): Promise<SubmitResult> {
    const body = JSON.stringify({
      schema_version: schemaVersion,
      selections: [...selections].sort(),
      designation,
    });
    const headers = await signHeaders(this.sharedKey, body);
    const resp = await this.fetchFn(`${this.baseUrl}/api/v1/reports`, {
      method: 'POST',
      headers: { ...headers, 'Content-Type': 'application/json' },
      body,
    });
    const doc = await resp.json();
    if (resp.status === 200 || resp.status === 202) return doc as SubmitResult;
    throw new ApiError(
      doc.detail ?? doc.code ?? 'submission rejected',
      resp.status,
      doc.violations ?? [],
    );
  }

  tagCounts(): Promise<{ counts: Record<string, number> }> {
    return this.getJson('/api/v1/aggregates/tag-counts');
  }

  cooccurrence(questionA: string, questionB: string): Promise<CooccurrenceTable> {
    const params = new URLSearchParams({ question_a: questionA, question_b: questionB });
    return this.getJson(`/api/v1/aggregates/cooccurrence?${params}`);
  }

  geography(): Promise<{ rows: GeographyRow[] }> {
    return this.getJson('/api/v1/aggregates/geography');
  }

  geographyProvinces(country: string): Promise<{ rows: GeographyRow[] }> {
    const params = new URLSearchParams({ level: 'province', country });
    return this.getJson(`/api/v1/aggregates/geography?${params}`);
  }
}
