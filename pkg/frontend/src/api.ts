/** Typed client for the review service's HTTP+JSON API.
 *
 * The UI talks to the service exclusively through these calls; it never
 * computes server-owned numbers (progress counters, totals) on its own.
 */

export type Verdict = "confirm" | "reject" | "uncertain";

export interface QueueItem {
  rank: number;
  doc_id: string;
  score: number;
  century: number;
  model_fingerprint: string;
  text_excerpt: string;
  full_text_available: boolean;
  current_verdict: Verdict | null;
  disagreement: boolean;
}

export interface QueuePage {
  items: QueueItem[];
  total: number;
  offset: number;
  limit: number;
}

export interface Progress {
  century: number;
  evaluated: number;
  confirmed: number;
  rejected: number;
  conflicts: number;
  remaining: number;
  confirmation_rate: number;
  rate_defined: boolean;
}

export interface AnnotationRecord {
  doc_id: string;
  verdict: Verdict;
  annotator: string;
  timestamp: string;
  round: number;
}

export type VerdictOutcome =
  | { kind: "created"; record: AnnotationRecord }
  | { kind: "unchanged"; record: AnnotationRecord }
  | { kind: "conflict"; existing: AnnotationRecord; message: string };

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly errorCode: string,
    message: string,
  ) {
    super(message);
  }
}

async function asJson(resp: Response): Promise<unknown> {
  if (!resp.ok) {
    let code = "HttpError";
    let message = `${resp.status} ${resp.statusText}`;
    try {
      const body = (await resp.json()) as { error_code?: string; message?: string };
      code = body.error_code ?? code;
      message = body.message ?? message;
    } catch {
      /* non-JSON error body; keep the status line */
    }
    throw new ApiError(resp.status, code, message);
  }
  return resp.json();
}

export class ReviewApi {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  async getQueue(century: number, offset: number, limit: number): Promise<QueuePage> {
    const params = new URLSearchParams({
      century: String(century),
      offset: String(offset),
      limit: String(limit),
    });
    const resp = await this.fetchFn(`${this.base}/api/queue?${params}`);
    return (await asJson(resp)) as QueuePage;
  }

  async getText(docId: string): Promise<string> {
    const resp = await this.fetchFn(
      `${this.base}/api/doc/${encodeURIComponent(docId)}/text`,
    );
    if (!resp.ok) {
      throw new ApiError(resp.status, "UnknownDocId", `no text for ${docId}`);
    }
    return resp.text();
  }

  async getProgress(century: number): Promise<Progress> {
    const resp = await this.fetchFn(`${this.base}/api/progress?century=${century}`);
    return (await asJson(resp)) as Progress;
  }

  /** Posts a verdict; a 409 is a normal outcome (same annotator already
   * recorded a different verdict this round) and carries the existing
   * record so the annotator can resolve it, not an exception. */
  async postVerdict(
    docId: string,
    verdict: Verdict,
    annotator: string,
  ): Promise<VerdictOutcome> {
    const resp = await this.fetchFn(`${this.base}/api/verdict`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ doc_id: docId, verdict, annotator }),
    });
    if (resp.status === 409) {
      const body = (await resp.json()) as {
        existing: AnnotationRecord;
        message: string;
      };
      return { kind: "conflict", existing: body.existing, message: body.message };
    }
    if (!resp.ok) {
      return asJson(resp) as never; // throws ApiError with the body's code
    }
    const record = (await resp.json()) as AnnotationRecord;
    return { kind: resp.status === 201 ? "created" : "unchanged", record };
  }
}
