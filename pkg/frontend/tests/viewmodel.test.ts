import { describe, expect, it } from "vitest";

import { ChatClient, FetchLike, TurnResponse } from "../src/protocol.js";
import { ChatViewModel } from "../src/viewmodel.js";

function turn(partial: Partial<TurnResponse>): TurnResponse {
  return {
    session_id: "s1",
    utterances: ["ok"],
    buttons: [],
    agent_stage: "eliciting",
    acts: [],
    recap: null,
    recommendation: null,
    ...partial,
  };
}

interface Scripted {
  fetch: FetchLike;
  calls: { path: string; body: string | undefined }[];
}

function scripted(responses: unknown[], failures = 0): Scripted {
  const calls: Scripted["calls"] = [];
  let sessionCounter = 0;
  let remainingFailures = failures;
  const fetchImpl: FetchLike = async (input, init) => {
    calls.push({ path: input, body: init?.body });
    if (remainingFailures > 0 && input.includes("/turns")) {
      remainingFailures -= 1;
      return { status: 500, json: async () => ({ error: "boom" }), text: async () => "boom" };
    }
    if (input.endsWith("/api/sessions")) {
      sessionCounter += 1;
      return {
        status: 201,
        json: async () => ({
          session_id: `s${sessionCounter}`,
          response: turn({
            session_id: `s${sessionCounter}`,
            utterances: ["Hello! Type /help to see what I can do."],
            agent_stage: "greeting",
          }),
        }),
        text: async () => "",
      };
    }
    const next = responses.shift() ?? turn({});
    return { status: 200, json: async () => next, text: async () => "" };
  };
  return { fetch: fetchImpl, calls };
}

describe("ChatViewModel", () => {
  it("start renders the welcome message with the help affordance", async () => {
    const vm = new ChatViewModel(new ChatClient("", scripted([]).fetch));
    await vm.start();
    expect(vm.status).toBe("ready");
    expect(vm.messages).toHaveLength(1);
    expect(vm.messages[0].author).toBe("agent");
    expect(vm.messages[0].text).toContain("/help");
  });

  it("two starts create two independent sessions", async () => {
    const script = scripted([]);
    const a = new ChatViewModel(new ChatClient("", script.fetch));
    const b = new ChatViewModel(new ChatClient("", script.fetch));
    await a.start();
    await b.start();
    expect(a.sessionId).not.toBe(b.sessionId);
  });

  it("sendText appends an optimistic user bubble and clears stale buttons", async () => {
    const script = scripted([
      turn({ utterances: ["noted"], buttons: [{ label: "B", payload: { command: "/x" } }] }),
    ]);
    const vm = new ChatViewModel(new ChatClient("", script.fetch));
    await vm.start();
    vm.buttons = [{ label: "stale", payload: {} }];

    let sawOptimistic = false;
    vm.onChange(() => {
      if (vm.status === "waiting") {
        sawOptimistic =
          vm.messages[vm.messages.length - 1].text === "action movies" && vm.buttons.length === 0;
      }
    });
    await vm.sendText("action movies");
    expect(sawOptimistic).toBe(true);
    expect(vm.messages.map((m) => m.text)).toEqual([
      expect.stringContaining("Hello"),
      "action movies",
      "noted",
    ]);
    expect(vm.buttons.map((b) => b.label)).toEqual(["B"]);
  });

  it("buttons shown are exactly those of the latest response", async () => {
    const script = scripted([
      turn({ buttons: [{ label: "one", payload: 1 }, { label: "two", payload: 2 }] }),
      turn({ buttons: [{ label: "three", payload: 3 }] }),
    ]);
    const vm = new ChatViewModel(new ChatClient("", script.fetch));
    await vm.start();
    await vm.sendText("a");
    expect(vm.buttons.map((b) => b.label)).toEqual(["one", "two"]);
    await vm.sendText("b");
    expect(vm.buttons.map((b) => b.label)).toEqual(["three"]);
  });

  it("sendButton forwards the payload opaquely, byte for byte", async () => {
    const payload = { act: { intent: "accept", author: "user", constraints: [], feedback: "accepted" } };
    const script = scripted([
      turn({ buttons: [{ label: "I like this recommendation.", payload }] }),
      turn({ utterances: ["great"] }),
    ]);
    const vm = new ChatViewModel(new ChatClient("", script.fetch));
    await vm.start();
    await vm.sendText("x");
    await vm.sendButton(0);
    const sent = script.calls[script.calls.length - 1].body!;
    expect(sent).toBe(JSON.stringify({ payload }));
    expect(vm.messages[vm.messages.length - 2].text).toBe("I like this recommendation.");
  });

  it("turn failure shows a retryable error and recovers on retry", async () => {
    const script = scripted([turn({ utterances: ["after retry"] })], 1);
    const vm = new ChatViewModel(new ChatClient("", script.fetch));
    await vm.start();
    await vm.sendText("hello");
    expect(vm.status).toBe("error");
    expect(vm.lastError).not.toBeNull();
    expect(vm.messages[vm.messages.length - 1].author).toBe("system");
    await vm.lastError!.retry();
    expect(vm.status).toBe("ready");
    expect(vm.messages[vm.messages.length - 1].text).toBe("after retry");
  });

  it("only one turn is in flight at a time", async () => {
    let release!: () => void;
    const gate = new Promise<void>((resolve) => (release = resolve));
    const fetchImpl: FetchLike = async (input) => {
      if (input.endsWith("/api/sessions")) {
        return {
          status: 201,
          json: async () => ({ session_id: "s1", response: turn({ agent_stage: "greeting" }) }),
          text: async () => "",
        };
      }
      await gate;
      return { status: 200, json: async () => turn({}), text: async () => "" };
    };
    const vm = new ChatViewModel(new ChatClient("", fetchImpl));
    await vm.start();
    const first = vm.sendText("one");
    expect(vm.busy).toBe(true);
    await vm.sendText("two"); // dropped: a turn is already in flight
    release();
    await first;
    const userMessages = vm.messages.filter((m) => m.author === "user");
    expect(userMessages.map((m) => m.text)).toEqual(["one"]);
  });

  it("a closing stage locks the conversation", async () => {
    const script = scripted([turn({ agent_stage: "closing", utterances: ["bye"] })]);
    const vm = new ChatViewModel(new ChatClient("", script.fetch));
    await vm.start();
    await vm.sendText("bye");
    expect(vm.status).toBe("closed");
  });

  it("recommendation cards attach to the agent bubble", async () => {
    const card = {
      id: "mv1",
      title: "Example",
      year: 1999,
      rating: 8.1,
      plot: "things happen",
      item_url: "https://example.test/mv1",
      cover_url: "",
    };
    const script = scripted([turn({ recommendation: card, agent_stage: "awaiting_feedback" })]);
    const vm = new ChatViewModel(new ChatClient("", script.fetch));
    await vm.start();
    await vm.sendText("anything");
    expect(vm.recommendation).toEqual(card);
    expect(vm.messages[vm.messages.length - 1].card).toEqual(card);
  });
});
