// View model for the chat: all state the UI renders, no dialogue logic.
// The buttons shown are always exactly the ones from the latest turn
// response, and one turn at a time is in flight.

import {
  ApiError,
  ChatClient,
  RecommendationCard,
  TurnResponse,
  WireButton,
} from "./protocol.js";

export interface Message {
  author: "user" | "agent" | "system";
  text: string;
  timestamp: number;
  card?: RecommendationCard;
}

export type ConnectionStatus = "idle" | "connecting" | "ready" | "waiting" | "error" | "closed";

export interface RetryableError {
  message: string;
  retry: () => Promise<void>;
}

type Listener = () => void;

export class ChatViewModel {
  messages: Message[] = [];
  buttons: WireButton[] = [];
  sessionId: string | null = null;
  status: ConnectionStatus = "idle";
  recommendation: RecommendationCard | null = null;
  recap: string | null = null;
  lastError: RetryableError | null = null;

  private listeners: Listener[] = [];

  constructor(
    private client: ChatClient,
    private now: () => number = Date.now,
  ) {}

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  get busy(): boolean {
    return this.status === "waiting" || this.status === "connecting";
  }

  async start(seed?: number): Promise<void> {
    this.status = "connecting";
    this.lastError = null;
    this.emit();
    try {
      const created = await this.client.createSession(seed);
      this.sessionId = created.session_id;
      this.applyResponse(created.response);
    } catch (err) {
      this.fail(err, () => this.start(seed));
    }
  }

  async sendText(text: string): Promise<void> {
    const trimmed = text.trim();
    if (!trimmed || this.busy || !this.sessionId) return;
    // optimistic user bubble; stale buttons disappear immediately
    this.messages.push({ author: "user", text: trimmed, timestamp: this.now() });
    this.buttons = [];
    this.status = "waiting";
    this.lastError = null;
    this.emit();
    try {
      this.applyResponse(await this.client.postUtterance(this.sessionId, trimmed));
    } catch (err) {
      this.fail(err, () => this.resend(() => this.client.postUtterance(this.sessionId!, trimmed)));
    }
  }

  async sendButton(index: number): Promise<void> {
    if (this.busy || !this.sessionId) return;
    const button = this.buttons[index];
    if (!button) return;
    this.messages.push({ author: "user", text: button.label, timestamp: this.now() });
    this.buttons = [];
    this.status = "waiting";
    this.lastError = null;
    this.emit();
    try {
      this.applyResponse(await this.client.postPayload(this.sessionId, button.payload));
    } catch (err) {
      this.fail(err, () => this.resend(() => this.client.postPayload(this.sessionId!, button.payload)));
    }
  }

  async resume(sessionId: string): Promise<void> {
    this.status = "connecting";
    this.emit();
    try {
      const transcript = await this.client.transcript(sessionId);
      this.sessionId = sessionId;
      this.messages = [];
      for (const record of transcript.turns) {
        if (record.author === "user") {
          const text = record.utterance ?? "[button]";
          this.messages.push({ author: "user", text, timestamp: this.now() });
        } else {
          for (const utterance of record.utterances ?? []) {
            this.messages.push({ author: "agent", text: utterance, timestamp: this.now() });
          }
        }
      }
      // buttons are not part of the transcript; typing still works
      this.buttons = [];
      this.status = "ready";
      this.emit();
    } catch (err) {
      this.fail(err, () => this.resume(sessionId));
    }
  }

  private async resend(call: () => Promise<TurnResponse>): Promise<void> {
    this.status = "waiting";
    this.lastError = null;
    this.emit();
    try {
      this.applyResponse(await call());
    } catch (err) {
      this.fail(err, () => this.resend(call));
    }
  }

  private applyResponse(response: TurnResponse): void {
    for (const utterance of response.utterances) {
      this.messages.push({ author: "agent", text: utterance, timestamp: this.now() });
    }
    if (response.recommendation) {
      this.recommendation = response.recommendation;
      const last = this.messages[this.messages.length - 1];
      if (last && last.author === "agent") last.card = response.recommendation;
    }
    this.recap = response.recap;
    this.buttons = response.buttons;
    this.status = response.agent_stage === "closing" ? "closed" : "ready";
    this.emit();
  }

  private fail(err: unknown, retry: () => Promise<void>): void {
    const message = err instanceof ApiError ? err.message : String(err);
    this.status = "error";
    this.lastError = { message, retry };
    this.messages.push({
      author: "system",
      text: `Something went wrong: ${message}`,
      timestamp: this.now(),
    });
    this.emit();
  }
}
