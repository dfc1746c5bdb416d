import type {
  AutoResult,
  CandidateJson,
  NodeJson,
  SessionCreated,
  Subsets,
  TreeJson,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

const SUBSET_KEYS = ["p1", "p2", "p3", "p4"] as const;

/** Thin client over fetch; every method is one request. */
export class Api {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.base + path, init);
    let data: unknown = null;
    try {
      data = await resp.json();
    } catch {
      data = null;
    }
    if (!resp.ok) {
      const message =
        data !== null &&
        typeof data === "object" &&
        typeof (data as { error?: unknown }).error === "string"
          ? (data as { error: string }).error
          : `request failed with status ${resp.status}`;
      throw new ApiError(resp.status, message);
    }
    return data as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  health(): Promise<{ ok: boolean }> {
    return this.request("/api/health");
  }

  createSession(specText: string): Promise<SessionCreated> {
    return this.post("/api/session", { spec_text: specText });
  }

  tree(sid: string): Promise<TreeJson> {
    return this.request(`/api/session/${sid}/tree`);
  }

  candidates(sid: string, subsets: Subsets): Promise<CandidateJson[]> {
    const query = new URLSearchParams();
    for (const key of SUBSET_KEYS) {
      const value = subsets[key];
      if (value !== undefined) {
        query.set(key, value.join(","));
      }
    }
    const qs = query.toString();
    const suffix = qs ? `?${qs}` : "";
    return this.request(`/api/session/${sid}/candidates${suffix}`);
  }

  apply(sid: string, index: number): Promise<{ current: string; node: NodeJson }> {
    return this.post(`/api/session/${sid}/apply`, { candidate_index: index });
  }

  back(sid: string, nodeId: string): Promise<{ current: string; node: NodeJson }> {
    return this.post(`/api/session/${sid}/back`, { node_id: nodeId });
  }

  auto(
    sid: string,
    alpha: number,
    all: boolean,
    subsets: Subsets,
  ): Promise<AutoResult> {
    const body: Record<string, unknown> = { alpha, all };
    for (const key of SUBSET_KEYS) {
      const value = subsets[key];
      if (value !== undefined) {
        body[key] = value;
      }
    }
    return this.post(`/api/session/${sid}/auto`, body);
  }
}
