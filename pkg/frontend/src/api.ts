/** Client for the threat-modeling HTTP API.
 *
 * The session id and any provider keys live only inside this object (and
 * therefore in page memory): nothing here touches localStorage,
 * sessionStorage, IndexedDB, or cookies. Concurrent generation requests
 * for the same stage are coalesced onto one in-flight promise.
 */

import type {
  DreadEntry,
  GherkinSuite,
  MitigationSetResponse,
  ProfileDraft,
  ThreatModelResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

type FetchLike = typeof fetch;

async function parseError(response: Response): Promise<never> {
  let detail = `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { detail?: string };
    if (body.detail) detail = body.detail;
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  private sessionId: string | null = null;
  private inflight = new Map<string, Promise<unknown>>();

  constructor(
    private baseUrl: string = '',
    private fetchImpl: FetchLike = fetch,
  ) {}

  get hasSession(): boolean {
    return this.sessionId !== null;
  }

  private async post<T>(path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: body === undefined ? '{}' : JSON.stringify(body),
    });
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  /** One request per key at a time; later callers share the first promise. */
  private coalesced<T>(key: string, start: () => Promise<T>): Promise<T> {
    const pending = this.inflight.get(key);
    if (pending) return pending as Promise<T>;
    const promise = Promise.resolve()
      .then(start)
      .finally(() => this.inflight.delete(key));
    this.inflight.set(key, promise);
    return promise;
  }

  async createSession(keys: {
    llm_api_key?: string;
    nvd_api_key?: string;
    otx_api_key?: string;
  }): Promise<string> {
    const body = await this.post<{ session_id: string }>('/api/session', keys);
    this.sessionId = body.session_id;
    return body.session_id;
  }

  async destroySession(): Promise<void> {
    if (!this.sessionId) return;
    const sid = this.sessionId;
    this.sessionId = null;
    await this.fetchImpl(`${this.baseUrl}/api/session/${sid}`, { method: 'DELETE' });
  }

  private session(): string {
    if (!this.sessionId) throw new ApiError(401, 'no active session');
    return this.sessionId;
  }

  generateThreatModel(profile: ProfileDraft): Promise<ThreatModelResponse> {
    return this.coalesced('threat-model', () =>
      this.post<ThreatModelResponse>(
        `/api/session/${this.session()}/threat-model`,
        serializeProfile(profile),
      ),
    );
  }

  generateDread(runId: string): Promise<{ dread: DreadEntry[] }> {
    return this.coalesced(`dread:${runId}`, () =>
      this.post(`/api/session/${this.session()}/run/${runId}/dread`),
    );
  }

  generateMitigations(runId: string): Promise<{ mitigations: MitigationSetResponse }> {
    return this.coalesced(`mitigations:${runId}`, () =>
      this.post(`/api/session/${this.session()}/run/${runId}/mitigations`),
    );
  }

  generateTestCases(runId: string): Promise<{ test_cases: { suites: GherkinSuite[] } }> {
    return this.coalesced(`test-cases:${runId}`, () =>
      this.post(`/api/session/${this.session()}/run/${runId}/test-cases`),
    );
  }

  generateAttackTree(runId: string): Promise<{ attack_tree: { mermaid_source: string } }> {
    return this.coalesced(`attack-tree:${runId}`, () =>
      this.post(`/api/session/${this.session()}/run/${runId}/attack-tree`),
    );
  }

  async fetchReportPdf(runId: string): Promise<Blob> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/session/${this.session()}/run/${runId}/report.pdf`,
    );
    if (!response.ok) await parseError(response);
    return response.blob();
  }
}

export function serializeProfile(draft: ProfileDraft): Record<string, unknown> {
  return {
    description: draft.description,
    app_type: draft.app_type,
    industry_sector: draft.industry_sector,
    data_sensitivity: draft.data_sensitivity || 'Medium',
    internet_facing: draft.internet_facing ?? true,
    employee_range: draft.employee_range || 'Unknown',
    compliance: draft.compliance,
    auth_methods: draft.auth_methods,
    technical_ability: draft.technical_ability,
    technologies: draft.technologies.filter((t) => t.name.trim() !== ''),
  };
}
