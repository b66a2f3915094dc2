import { beforeEach, describe, expect, it, vi } from "vitest";

import { ChatApp } from "../src/app.js";
import type { FetchLike } from "../src/api.js";
import type { AskBody, AskResponse } from "../src/types.js";

function ok(body: AskResponse): Response {
  return new Response(JSON.stringify(body), {
    status: 200,
    headers: { "content-type": "application/json" },
  });
}

const sixOneEightFlow: Record<string, AskResponse> = {
  "618": {
    status: "recommended",
    answer: null,
    recommendations: [
      { display: "618的报名流程?", payload: "618的报名流程?" },
      { display: "618的活动攻略?", payload: "618的活动攻略?" },
      { display: "618的收费规则?", payload: "618的收费规则?" },
    ],
  },
  "618的报名流程?": {
    status: "answered",
    answer: {
      kind: "simple_text",
      text: "在商家后台-活动报名页选择618大促",
      explanation: [],
      tips: null,
    },
    recommendations: [],
  },
};

function stubFetch(
  handler: (body: AskBody) => AskResponse | Response,
): { fetchFn: FetchLike; calls: AskBody[] } {
  const calls: AskBody[] = [];
  const fetchFn: FetchLike = async (_url, init) => {
    const body = JSON.parse(String(init?.body)) as AskBody;
    calls.push(body);
    const result = handler(body);
    return result instanceof Response ? result : ok(result);
  };
  return { fetchFn, calls };
}

function mountApp(fetchFn: FetchLike): { app: ChatApp; root: HTMLElement } {
  document.body.innerHTML = '<div id="chat-root"></div>';
  const root = document.getElementById("chat-root")!;
  const app = new ChatApp(fetchFn, "");
  app.mount(root);
  return { app, root };
}

beforeEach(() => {
  sessionStorage.clear();
});

describe("ChatApp", () => {
  it("renders chips for 618 and answers when a chip is clicked", async () => {
    const { fetchFn, calls } = stubFetch((body) => sixOneEightFlow[body.question]);
    const { app, root } = mountApp(fetchFn);

    await app.submit("618");
    const chips = root.querySelectorAll("button.chip");
    expect(chips).toHaveLength(3);
    expect(root.querySelectorAll(".turn.bot")).toHaveLength(1);

    (chips[0] as HTMLButtonElement).click();
    await vi.waitFor(() => {
      expect(root.querySelector(".answer-text")).not.toBeNull();
    });
    expect(root.querySelector(".answer-text")?.textContent).toContain("商家后台");
    // chip click resubmits the payload verbatim
    expect(calls.map((c) => c.question)).toEqual(["618", "618的报名流程?"]);
  });

  it("shares one session id across all submits in a tab", async () => {
    const { fetchFn, calls } = stubFetch((body) => sixOneEightFlow[body.question]);
    const { app } = mountApp(fetchFn);
    await app.submit("618");
    await app.submit("618的报名流程?");
    expect(calls).toHaveLength(2);
    expect(calls[0].session_id).toBe(calls[1].session_id);
    expect(calls[0].session_id).toBe(app.sessionId);
    expect(calls[0].session_id.length).toBeGreaterThan(8);
  });

  it("appends turns and never rewrites earlier ones", async () => {
    const { fetchFn } = stubFetch((body) => sixOneEightFlow[body.question]);
    const { app, root } = mountApp(fetchFn);
    await app.submit("618");
    const firstTurnNode = root.querySelectorAll(".turn")[0];
    await app.submit("618的报名流程?");
    expect(root.querySelectorAll(".turn")).toHaveLength(4);
    expect(root.querySelectorAll(".turn")[0]).toBe(firstTurnNode);
    expect(app.turns.map((t) => t.role)).toEqual(["user", "bot", "user", "bot"]);
  });

  it("disables input while a request is in flight", async () => {
    let release!: () => void;
    const gate = new Promise<void>((resolve) => (release = resolve));
    const fetchFn: FetchLike = async () => {
      await gate;
      return ok(sixOneEightFlow["618"]);
    };
    const { app, root } = mountApp(fetchFn);
    const input = root.querySelector("input")!;
    const submitting = app.submit("618");
    expect(input.disabled).toBe(true);
    release();
    await submitting;
    expect(input.disabled).toBe(false);
  });

  it("offers an inline retry on 5xx and preserves the conversation", async () => {
    let failures = 1;
    const { fetchFn, calls } = stubFetch((body) => {
      if (failures > 0) {
        failures -= 1;
        return new Response("boom", { status: 500 });
      }
      return sixOneEightFlow[body.question];
    });
    const { app, root } = mountApp(fetchFn);

    await app.submit("618");
    const retry = root.querySelector("button.retry");
    expect(retry).not.toBeNull();
    expect(root.querySelector(".error")?.textContent).toContain("500");

    (retry as HTMLButtonElement).click();
    await vi.waitFor(() => {
      expect(root.querySelectorAll("button.chip")).toHaveLength(3);
    });
    // one user turn, the error turn stays, plus the successful bot turn
    expect(root.querySelectorAll(".turn.user")).toHaveLength(1);
    expect(root.querySelectorAll(".turn.bot")).toHaveLength(2);
    expect(calls.map((c) => c.question)).toEqual(["618", "618"]);
  });

  it("ignores empty input without calling the service", async () => {
    const { fetchFn, calls } = stubFetch((body) => sixOneEightFlow[body.question]);
    const { app, root } = mountApp(fetchFn);
    await app.submit("   ");
    expect(calls).toHaveLength(0);
    expect(root.querySelectorAll(".turn")).toHaveLength(0);
  });

  it("renders a visible fallback turn for unknown statuses", async () => {
    const { fetchFn } = stubFetch(() => ({
      status: "mystery",
      answer: null,
      recommendations: [],
    }));
    const { app, root } = mountApp(fetchFn);
    await app.submit("anything");
    const bot = root.querySelector(".turn.bot");
    expect(bot).not.toBeNull();
    expect(bot!.textContent).toContain("mystery");
  });
});
