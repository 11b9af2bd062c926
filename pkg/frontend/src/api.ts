import type {
  CatalogPayload,
  PreviewPayload,
  PreviewRequest,
  RankingReport,
  RankRequest,
  StudyRunRequest,
  StudyStatus,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`API error ${status}: ${JSON.stringify(detail)}`);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(base + path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await res.json().catch(() => null);
  if (!res.ok) {
    throw new ApiError(res.status, body && (body as { detail?: unknown }).detail);
  }
  return body as T;
}

/** Thin typed client over the documented HTTP/JSON API. */
export class FluidrankClient {
  constructor(public base: string = "") {}

  catalog(): Promise<CatalogPayload> {
    return request(this.base, "/api/catalog");
  }

  rank(req: RankRequest): Promise<RankingReport> {
    return request(this.base, "/api/rank", { method: "POST", body: JSON.stringify(req) });
  }

  preview(req: PreviewRequest): Promise<PreviewPayload> {
    return request(this.base, "/api/preview", { method: "POST", body: JSON.stringify(req) });
  }

  runStudy(req: StudyRunRequest): Promise<{ report_id: string }> {
    return request(this.base, "/api/study/run", { method: "POST", body: JSON.stringify(req) });
  }

  studyStatus(reportId: string): Promise<StudyStatus> {
    return request(this.base, `/api/study/${reportId}`);
  }
}
