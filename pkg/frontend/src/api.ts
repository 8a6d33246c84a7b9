/**
 * Thin typed client for the processing service. Audio is fetched as plain
 * WAV bytes; everything else is JSON.
 */

export interface ProgramSummary {
  id: string;
  programme_name: string;
}

export interface ProgramMetadata {
  programme_name: string;
  mix_loudness_lufs: number | null;
  stems: {
    dialogue: { loudness_lufs: number | null };
    background: { loudness_lufs: number | null };
  };
  bounds: { dialogue_gain_min_db: number; dialogue_gain_max_db: number };
  presets: { name: string; global_atten_db: number; duck_extra_db: number }[];
  manifest: Record<string, unknown>;
}

export interface JobStatus {
  id: string;
  state: "queued" | "running" | "done" | "failed";
  artifacts: Record<string, string>;
  error?: string;
}

export type StemName = "dialogue" | "background" | "mix";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function getJson<T>(url: string, fetchFn: typeof fetch): Promise<T> {
  const resp = await fetchFn(url);
  if (!resp.ok) {
    throw new ApiError(resp.status, `${url}: ${resp.status}`);
  }
  return (await resp.json()) as T;
}

export class ServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  listPrograms(): Promise<ProgramSummary[]> {
    return getJson(`${this.baseUrl}/programs`, this.fetchFn);
  }

  programMetadata(id: string): Promise<ProgramMetadata> {
    return getJson(`${this.baseUrl}/programs/${id}/metadata`, this.fetchFn);
  }

  jobStatus(id: string): Promise<JobStatus> {
    return getJson(`${this.baseUrl}/jobs/${id}`, this.fetchFn);
  }

  async submitJob(spec: Record<string, unknown>): Promise<JobStatus> {
    const resp = await this.fetchFn(`${this.baseUrl}/jobs`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(spec),
    });
    if (!resp.ok) {
      throw new ApiError(resp.status, `submit: ${resp.status}`);
    }
    return (await resp.json()) as JobStatus;
  }

  stemUrl(id: string, stem: StemName): string {
    return `${this.baseUrl}/programs/${id}/stems/${stem}.wav`;
  }

  async fetchStem(id: string, stem: StemName): Promise<ArrayBuffer> {
    const resp = await this.fetchFn(this.stemUrl(id, stem));
    if (!resp.ok) {
      throw new ApiError(resp.status, `stem ${stem}: ${resp.status}`);
    }
    return resp.arrayBuffer();
  }
}
