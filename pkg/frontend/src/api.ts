/** Typed client for the annotation service. Node paths are encoded with "~"
 * in URLs; every request except login carries the bearer token. */

export interface AnnotationDoc {
  id: string;
  source_layer_path: string;
  target_unit_id: string;
  start: number;
  end: number;
  kind: string;
  subtype: string | null;
  quoted_form: string | null;
  note: string | null;
}

export interface LayerDoc {
  path: string;
  label: string;
  text: string;
  revision: number;
  depth: number;
  annotations?: AnnotationDoc[];
  layers?: LayerDoc[];
}

export interface ReadingDoc {
  witness_id: string;
  unit_id: string;
  text: string;
}

export interface UnitDoc {
  id: string;
  kind: string;
  base_text: string;
  token_count: number;
  tokens?: string[];
  readings?: ReadingDoc[];
  layers?: LayerDoc[];
}

export interface WorkSummary {
  id: string;
  title: string;
  script: string;
  unit_ids: string[];
}

export interface WorkDoc extends WorkSummary {
  units: UnitDoc[];
}

export interface SupportDoc {
  layer_label: string;
  unit_ids: string[];
  total_tokens: number;
  supported_count: number;
  supported_token_indices: Record<string, number[]>;
  percentage: number;
}

export interface TransmissionDoc {
  unit_id: string;
  layers: Record<string, {
    uniform: boolean;
    variations: { token_index: number; base_form: string; quoted_form: string }[];
  }>;
  archetype_hints: string[];
}

export interface TaxonomyDoc {
  Direct: string[];
  Indirect: string[];
}

export interface TreeDoc {
  newick: string;
  matrix: { taxa: string[]; distances: number[][] };
  method: string;
  sources: string;
  clamped: boolean;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail?: unknown,
  ) {
    super(message);
  }
}

export const encodePath = (path: string): string => path.split("/").join("~");

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ThtApi {
  token: string | null = null;

  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    params?: Record<string, string>,
  ): Promise<T> {
    let url = this.baseUrl + path;
    if (params) {
      url += "?" + new URLSearchParams(params).toString();
    }
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchFn(url, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const data = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const code = data?.code ?? `Http${response.status}`;
      const message = data?.message ?? response.statusText;
      throw new ApiError(response.status, code, message, data?.detail);
    }
    return data as T;
  }

  async login(username: string, password: string): Promise<void> {
    const doc = await this.request<{ token: string }>(
      "POST", "/api/login", { username, password });
    this.token = doc.token;
  }

  listWorks(): Promise<{ works: WorkSummary[] }> {
    return this.request("GET", "/api/works");
  }

  getWork(id: string): Promise<WorkDoc> {
    return this.request("GET", `/api/works/${encodeURIComponent(id)}`);
  }

  getNode(path: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/api/nodes/${encodePath(path)}`);
  }

  addLayer(parentPath: string, label: string, text: string): Promise<LayerDoc> {
    return this.request("POST", `/api/nodes/${encodePath(parentPath)}/layers`,
      { label, text });
  }

  editLayer(path: string, text: string, expectedRevision: number): Promise<LayerDoc> {
    return this.request("PUT", `/api/layers/${encodePath(path)}`,
      { text, expected_revision: expectedRevision });
  }

  annotate(layerPath: string, body: {
    unit_id: string; start: number; end: number; kind: string;
    subtype?: string | null; quoted_form?: string | null; note?: string | null;
  }): Promise<AnnotationDoc> {
    return this.request("POST",
      `/api/layers/${encodePath(layerPath)}/evidence`, body);
  }

  listEvidence(layerPath: string): Promise<{ annotations: AnnotationDoc[] }> {
    return this.request("GET", `/api/layers/${encodePath(layerPath)}/evidence`);
  }

  supportReport(workId: string, unitIds: string[], layer: string): Promise<SupportDoc> {
    return this.request("GET",
      `/api/works/${encodeURIComponent(workId)}/reports/support`,
      undefined, { units: unitIds.join(","), layer });
  }

  transmissionReport(workId: string, unitId: string): Promise<TransmissionDoc> {
    return this.request("GET",
      `/api/works/${encodeURIComponent(workId)}/reports/transmission`,
      undefined, { unit: unitId });
  }

  taxonomy(): Promise<TaxonomyDoc> {
    return this.request("GET", "/api/taxonomy");
  }

  config(): Promise<{ sibling_limit: number }> {
    return this.request("GET", "/api/config");
  }

  requestTree(workId: string, body: {
    sources: string; method: string; units?: string[] | null;
  }): Promise<TreeDoc> {
    return this.request("POST",
      `/api/works/${encodeURIComponent(workId)}/trees`, body);
  }
}
