/** Typed client for the inference service. */

import type {
  Evidence,
  ImpossibleEvidencePayload,
  ModelInfo,
  MpePayload,
  PosteriorPayload,
  ScanPayload,
  ScenarioPayload,
  TornadoPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status: number,
    public readonly payload: unknown,
  ) {
    super(message);
  }

  get impossibleEvidence(): ImpossibleEvidencePayload | null {
    const p = this.payload as ImpossibleEvidencePayload | null;
    return p && p.error === "impossible_evidence" ? p : null;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const message =
      body && typeof body === "object" && "message" in body
        ? String((body as { message: unknown }).message)
        : `${response.status} ${response.statusText}`;
    throw new ApiError(message, response.status, body);
  }
  return body as T;
}

function post<T>(url: string, payload: unknown): Promise<T> {
  return request<T>(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  });
}

export class ApiClient {
  constructor(public readonly baseUrl: string = "") {}

  getModel(): Promise<ModelInfo> {
    return request<ModelInfo>(`${this.baseUrl}/model`);
  }

  query(target: string, evidence: Evidence): Promise<PosteriorPayload> {
    return post<PosteriorPayload>(`${this.baseUrl}/query`, { target, evidence });
  }

  mpe(evidence: Evidence): Promise<MpePayload> {
    return post<MpePayload>(`${this.baseUrl}/mpe`, { evidence });
  }

  scenario(label: string, target: string, evidence: Evidence): Promise<ScenarioPayload> {
    return post<ScenarioPayload>(`${this.baseUrl}/scenario`, { label, target, evidence });
  }

  scan(target: string, top = 10): Promise<ScanPayload> {
    const params = new URLSearchParams({ target, top: String(top) });
    return request<ScanPayload>(`${this.baseUrl}/scan?${params}`);
  }

  tornado(
    target: string,
    state: string,
    evidence: Evidence,
    window: number,
    topK: number,
  ): Promise<TornadoPayload> {
    return post<TornadoPayload>(`${this.baseUrl}/tornado`, {
      target,
      state,
      evidence,
      window,
      top_k: topK,
    });
  }
}
