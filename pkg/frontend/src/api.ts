/**
 * Typed client for the grading service HTTP+JSON API.
 *
 * Every wrapper mirrors one endpoint verbatim; no request or response field
 * is added, renamed, or dropped on this side. Configuration is a single base
 * URL (empty string = same origin, the normal case when the bundle is served
 * by `precise serve --static`).
 */

// ============ Wire Types ============

export type ItemView = {
  item_id: string;
  text: string;
  position: number;
  total: number;
  // present only in reliability studies: the source report shown alongside
  companion_text?: string;
};

export type DoneMarker = { done: true };

export type NextResponse = ItemView | DoneMarker;

export type ScoreAck = { accepted: true; sequence: number };

export type GraderProgress = { scored: number; total: number };

export type Progress = {
  study_id: string;
  state: string;
  scored: number;
  total: number;
  per_grader: Record<string, GraderProgress>;
};

export type RubricLabel = { score: number; label: string; description: string };

export type RubricInfo = { kind: string; labels: RubricLabel[] };

export type ArmSummary = {
  counts: Record<string, number>;
  total: number;
  mean: number | null;
  fractions: Record<string, number>;
};

export type RankTest = {
  statistic: number;
  degrees_of_freedom: number | null;
  p_value: number;
  method: string;
  z_value: number | null;
  note: string | null;
};

export type GridRow = {
  item_id: string;
  pair_ref: string;
  arm: string;
  scores: Record<string, number | null>;
};

export type ResultsBundle = {
  study_id: string;
  rubric: RubricInfo;
  state: string;
  n_items: number;
  n_graders: number;
  graders: string[];
  arms: Record<string, ArmSummary>;
  agreement: { percent: number[][]; kappa: (number | null)[][] };
  mann_whitney: RankTest | null;
  grid: GridRow[];
  score_count: number;
};

export type CreateStudyRequest = {
  rubric: string;
  pairs_path: string;
  grader_tokens: string[];
  seed?: number;
};

export type CreateStudyResponse = {
  study_id: string;
  reveal_key: string;
  grader_tokens: string[];
  n_items: number;
};

// ============ Errors ============

/** Non-2xx response; `message` is the server's own error text when it sent one. */
export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.name = 'ApiError';
    this.status = status;
  }
}

export function isDone(resp: NextResponse): resp is DoneMarker {
  return 'done' in resp && resp.done === true;
}

// ============ Transport ============

let baseUrl = '';

export function setBaseUrl(url: string): void {
  // trailing slashes would double up against the absolute /api paths
  baseUrl = url.replace(/\/+$/, '');
}

export function getBaseUrl(): string {
  return baseUrl;
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(baseUrl + path, init);
  let body: unknown = null;
  try {
    body = await res.json();
  } catch {
    // non-JSON body; fall through to the generic message below
  }
  if (!res.ok) {
    const detail =
      body !== null && typeof body === 'object' && typeof (body as { error?: unknown }).error === 'string'
        ? (body as { error: string }).error
        : `HTTP ${res.status}`;
    throw new ApiError(res.status, detail);
  }
  return body as T;
}

function getJson<T>(path: string): Promise<T> {
  return request<T>(path, { headers: { Accept: 'application/json' } });
}

function postJson<T>(path: string, payload: unknown): Promise<T> {
  return request<T>(path, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json', Accept: 'application/json' },
    body: JSON.stringify(payload),
  });
}

// ============ Endpoints ============

export function createStudy(body: CreateStudyRequest): Promise<CreateStudyResponse> {
  return postJson<CreateStudyResponse>('/api/studies', body);
}

export function fetchNext(studyId: string, token: string): Promise<NextResponse> {
  return getJson<NextResponse>(
    `/api/studies/${encodeURIComponent(studyId)}/next?token=${encodeURIComponent(token)}`,
  );
}

export function submitScore(
  studyId: string,
  token: string,
  itemId: string,
  score: number,
): Promise<ScoreAck> {
  return postJson<ScoreAck>(`/api/studies/${encodeURIComponent(studyId)}/scores`, {
    token,
    item_id: itemId,
    score,
  });
}

export function fetchProgress(studyId: string): Promise<Progress> {
  return getJson<Progress>(`/api/studies/${encodeURIComponent(studyId)}/progress`);
}

export function fetchResults(studyId: string, reveal?: string): Promise<ResultsBundle> {
  const suffix = reveal ? `?reveal=${encodeURIComponent(reveal)}` : '';
  return getJson<ResultsBundle>(`/api/studies/${encodeURIComponent(studyId)}/results${suffix}`);
}
