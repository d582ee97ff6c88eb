/** Typed client for the verification API. The UI never computes scores
 * locally; every number, bucket, and classification below comes from the
 * server's canonical JSON. */

export type SourceCategory =
  | "news"
  | "blog"
  | "wiki"
  | "social_media"
  | "scientific_medical_article"
  | "government_website"
  | "other";

export type Verdict = "supported" | "not_supported" | "irrelevant";
export type BucketName = "low" | "medium" | "high";

export interface PipelineConfig {
  llm_profile: string;
  retrieval_mode: "sparse" | "dense";
  top_n_results: number;
  top_k_passages: number;
  context_window_m: number;
  threshold_t: string;
  count_irrelevant_in_total: boolean;
  parallelism: number;
}

export interface Claim {
  id: string;
  sentence_index: number;
  text: string;
  query: string;
}

export interface Sentence {
  index: number;
  text: string;
  status: "verified" | "no_claims" | "unverified";
  claims: Claim[];
  error?: string;
}

export interface Evidence {
  id: string;
  claim_id: string;
  url: string;
  hostname: string;
  category: SourceCategory;
  text: string;
  relevance_score: string;
  snippet_fallback: boolean;
}

export interface Judgment {
  claim_id: string;
  evidence_id: string;
  verdict: Verdict;
  rationale: string;
}

export interface ScoreEntry {
  support: number;
  total: number;
  value: string;
  bucket: BucketName;
  classification: "factual" | "not_factual";
}

export interface OverallScore {
  num: number;
  den: number;
  value: string;
  bucket: BucketName;
}

export interface Report {
  job_id: string;
  input_text: string;
  config: PipelineConfig;
  sentences: Sentence[];
  evidence: Evidence[];
  judgments: Judgment[];
  sentence_scores: Record<string, ScoreEntry>;
  overall_score: OverallScore | null;
}

export interface Breakdown {
  sentence_scores: Record<string, ScoreEntry>;
  per_sentence_counts: Record<string, { support: number; total: number }>;
  overall_score: OverallScore | null;
  pooled_score: OverallScore | null;
}

export interface SelectionMaskBody {
  excluded_evidence_ids: string[];
  excluded_categories: string[];
}

export interface JobProgress {
  state: string;
  progress?: { completed_units: number; total_units: number };
  error?: string;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function requireOk(response: Response): Promise<Response> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.error === "string") detail = body.error;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, detail);
  }
  return response;
}

export class ApiClient {
  constructor(private base: string) {}

  async health(): Promise<{ status: string; mode: string }> {
    return (await requireOk(await fetch(`${this.base}/api/health`))).json();
  }

  async defaults(): Promise<PipelineConfig> {
    return (await requireOk(await fetch(`${this.base}/api/defaults`))).json();
  }

  async submit(text: string, config?: Partial<PipelineConfig>): Promise<string> {
    const body: Record<string, unknown> = { text };
    if (config && Object.keys(config).length > 0) body.config = config;
    const response = await requireOk(
      await fetch(`${this.base}/api/jobs`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      }),
    );
    return (await response.json()).job_id as string;
  }

  /** One poll; a finished job returns the report, otherwise progress. */
  async poll(jobId: string): Promise<Report | JobProgress> {
    const response = await requireOk(await fetch(`${this.base}/api/jobs/${jobId}`));
    return response.json();
  }

  async recompute(jobId: string, mask: SelectionMaskBody): Promise<Breakdown> {
    const response = await requireOk(
      await fetch(`${this.base}/api/jobs/${jobId}/recompute`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(mask),
      }),
    );
    return response.json();
  }
}

export function isReport(value: Report | JobProgress): value is Report {
  return (value as Report).job_id !== undefined;
}
