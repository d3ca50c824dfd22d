// Typed client for the qrewrite session service. Mirrors the server's JSON
// shapes one-to-one; every state change round-trips through the service.

export interface GateJson {
  kind: string;
  controls: { wire: number; polarity: string }[];
  targets: number[];
  bit: number | null;
}

export interface CircuitJson {
  cqc: string;
  num_qubits: number;
  num_bits: number;
  hash: string;
  gates: GateJson[];
}

export interface SessionSummary {
  id: string;
  revision: number;
  policy: string;
  history_length: number;
  badge: string;
  circuit: CircuitJson;
  matches_summary?: Record<string, number>;
}

export interface MatchJson {
  rule: string;
  at: number[];
  wires?: number[];
  reverse?: boolean;
  variant?: string;
}

export interface RuleInfoJson {
  rule: string;
  pattern: string;
  replacement: string;
  wires: string;
  notes: string;
}

export interface VerifyResponse {
  badge: string;
  report?: {
    equivalent: boolean;
    phase_re: number;
    phase_im: number;
    max_deviation: number;
  };
  against?: string;
}

export interface FamilyVerdictJson {
  family: string;
  confirmed: boolean;
  witness: string;
  frame?: string;
  reduced_circuit?: string;
  input?: string;
  cut?: number[];
  rank?: number;
}

export interface ApplyRequest extends MatchJson {
  revision: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ExplorerApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = `${response.status}`;
      try {
        const body = await response.json();
        detail = body.error ?? body.detail ?? JSON.stringify(body);
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(source: string, policy = "opaque"): Promise<SessionSummary> {
    return this.post<SessionSummary>("/sessions", { source, policy });
  }

  getSession(id: string): Promise<SessionSummary> {
    return this.request<SessionSummary>(`/sessions/${id}`);
  }

  matches(
    id: string,
    rule: string,
    reverse = false,
  ): Promise<{ revision: number; matches: MatchJson[] }> {
    const query = new URLSearchParams({ rule, reverse: String(reverse) });
    return this.request(`/sessions/${id}/matches?${query}`);
  }

  apply(id: string, req: ApplyRequest): Promise<SessionSummary> {
    return this.post<SessionSummary>(`/sessions/${id}/apply`, {
      rule: req.rule,
      at: req.at,
      wires: req.wires ?? [],
      reverse: req.reverse ?? false,
      variant: req.variant ?? "",
      revision: req.revision,
    });
  }

  undo(id: string): Promise<SessionSummary> {
    return this.post<SessionSummary>(`/sessions/${id}/undo`, {});
  }

  verify(id: string): Promise<VerifyResponse> {
    return this.request<VerifyResponse>(`/sessions/${id}/verify`);
  }

  classify(id: string): Promise<FamilyVerdictJson> {
    return this.request<FamilyVerdictJson>(`/sessions/${id}/classify`);
  }

  rules(): Promise<RuleInfoJson[]> {
    return this.request<RuleInfoJson[]>("/rules");
  }

  async diagramSvg(id: string): Promise<string> {
    const response = await this.fetchFn(
      `${this.baseUrl}/sessions/${id}/diagram.svg`,
    );
    if (!response.ok) {
      throw new ApiError(response.status, "diagram unavailable");
    }
    return response.text();
  }
}
