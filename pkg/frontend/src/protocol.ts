// Wire types for the cinebot turn API. Mirrors docs/wire_protocol.md; the
// client never invents payloads, it only echoes what the server issued.

export interface WireButton {
  label: string;
  // Opaque to the client: either {act: {...}} or {command: "/restart"}.
  payload: unknown;
}

export interface RecommendationCard {
  id: string;
  title: string;
  year: number;
  rating: number;
  plot: string;
  item_url: string;
  cover_url: string;
}

export interface TurnResponse {
  session_id: string;
  utterances: string[];
  buttons: WireButton[];
  agent_stage: string;
  acts: unknown[];
  recap: string | null;
  recommendation: RecommendationCard | null;
}

export interface CreateSessionResponse {
  session_id: string;
  response: TurnResponse;
}

export interface TranscriptRecord {
  t: string;
  turn: number;
  author: "user" | "agent";
  utterance?: string | null;
  utterances?: string[];
  payload?: unknown;
  acts: unknown[];
}

export interface Transcript {
  session_id: string;
  seed: number;
  created_at: number;
  turns: TranscriptRecord[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown>; text(): Promise<string> }>;

export class ChatClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {}

  private async request<T>(path: string, init?: Parameters<FetchLike>[1]): Promise<T> {
    let response: Awaited<ReturnType<FetchLike>>;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    if (response.status >= 400) {
      let detail = `HTTP ${response.status}`;
      try {
        const body = (await response.json()) as { error?: string };
        if (body && body.error) detail = body.error;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(seed?: number): Promise<CreateSessionResponse> {
    return this.request<CreateSessionResponse>("/api/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(seed === undefined ? {} : { seed }),
    });
  }

  postUtterance(sessionId: string, utterance: string): Promise<TurnResponse> {
    return this.request<TurnResponse>(`/api/sessions/${sessionId}/turns`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ utterance }),
    });
  }

  // The payload is forwarded exactly as issued by the server.
  postPayload(sessionId: string, payload: unknown): Promise<TurnResponse> {
    return this.request<TurnResponse>(`/api/sessions/${sessionId}/turns`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ payload }),
    });
  }

  transcript(sessionId: string): Promise<Transcript> {
    return this.request<Transcript>(`/api/sessions/${sessionId}/transcript`);
  }
}
