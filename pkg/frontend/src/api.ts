// REST client for the stress service. Each action type carries a sequence
// number; responses superseded by a newer request of the same type resolve
// to null so stale results are never displayed.

export interface InferResponse {
  normal: string | null;
  stress: string;
  mask: string;
  latency_ms: number;
  warnings: string[];
}

export interface AggregateResponse {
  aggregated: string;
  selected_pixels: [number, number][];
  per_force_count: number;
  warnings: string[];
}

export interface HealthResponse {
  status: string;
  checkpoints: { category: string; epoch: number; resolution: number }[];
}

export class ServiceError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`service error ${status}: ${detail}`);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  private seq: Record<string, number> = {};

  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async post<T>(kind: string, path: string, body: unknown): Promise<T | null> {
    const ticket = (this.seq[kind] ?? 0) + 1;
    this.seq[kind] = ticket;
    const response = await this.fetchImpl(this.baseUrl + path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = (await response.json()) as { detail?: string };
        if (payload.detail) detail = String(payload.detail);
      } catch {
        // body was not JSON; keep the status text
      }
      throw new ServiceError(response.status, detail);
    }
    const payload = (await response.json()) as T;
    if (this.seq[kind] !== ticket) {
      return null; // a newer request of this kind superseded us
    }
    return payload;
  }

  health(): Promise<HealthResponse> {
    return this.fetchImpl(this.baseUrl + '/health').then((r) => {
      if (!r.ok) throw new ServiceError(r.status, r.statusText);
      return r.json() as Promise<HealthResponse>;
    });
  }

  infer(sketchPngB64: string, x: number, y: number, category?: string) {
    return this.post<InferResponse>('infer', '/api/v1/infer', {
      sketch: sketchPngB64,
      force_xy: [x, y],
      ...(category ? { category } : {}),
    });
  }

  aggregate(
    sketchPngB64: string,
    region: { cx: number; cy: number; radius: number; angle_tol_deg?: number; max_points?: number },
    category?: string,
  ) {
    return this.post<AggregateResponse>('aggregate', '/api/v1/aggregate', {
      sketch: sketchPngB64,
      region,
      ...(category ? { category } : {}),
    });
  }
}
