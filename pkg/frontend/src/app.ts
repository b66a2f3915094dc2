import { AskError, postAsk, type FetchLike } from "./api.js";
import { apiBase } from "./config.js";
import { renderResponse } from "./render.js";
import type { AskResponse } from "./types.js";

export interface ChatTurn {
  role: "user" | "bot";
  node: HTMLElement;
  timestamp: number;
}

function newSessionId(): string {
  const key = "kgqa-session-id";
  try {
    const stored = sessionStorage.getItem(key);
    if (stored) return stored;
  } catch {
    // storage unavailable (private mode etc.); fall through
  }
  const id =
    typeof crypto !== "undefined" && "randomUUID" in crypto
      ? crypto.randomUUID().replace(/-/g, "")
      : Math.random().toString(36).slice(2) + Date.now().toString(36);
  try {
    sessionStorage.setItem(key, id);
  } catch {
    // ignore
  }
  return id;
}

export class ChatApp {
  readonly sessionId: string;
  readonly turns: ChatTurn[] = []; // append-only transcript
  private transcript!: HTMLElement;
  private input!: HTMLInputElement;
  private sendButton!: HTMLButtonElement;
  private inFlight = false;

  constructor(
    private readonly fetchFn: FetchLike = fetch,
    private readonly base: string = apiBase(),
  ) {
    this.sessionId = newSessionId();
  }

  mount(root: HTMLElement): void {
    root.innerHTML = "";
    this.transcript = document.createElement("div");
    this.transcript.className = "transcript";

    const composer = document.createElement("form");
    composer.className = "composer";
    this.input = document.createElement("input");
    this.input.type = "text";
    this.input.placeholder = "请输入您的问题…";
    this.sendButton = document.createElement("button");
    this.sendButton.type = "submit";
    this.sendButton.textContent = "发送";
    composer.append(this.input, this.sendButton);
    composer.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit(this.input.value);
    });

    root.append(this.transcript, composer);
  }

  private appendTurn(role: "user" | "bot", node: HTMLElement): ChatTurn {
    const wrapper = document.createElement("div");
    wrapper.className = `turn ${role}`;
    wrapper.appendChild(node);
    this.transcript.appendChild(wrapper);
    this.transcript.scrollTop = this.transcript.scrollHeight;
    const turn: ChatTurn = { role, node: wrapper, timestamp: Date.now() };
    this.turns.push(turn);
    return turn;
  }

  private setBusy(busy: boolean): void {
    this.inFlight = busy;
    this.input.disabled = busy;
    this.sendButton.disabled = busy;
  }

  async submit(question: string): Promise<void> {
    const trimmed = question.trim();
    if (!trimmed || this.inFlight) return;

    const userNode = document.createElement("p");
    userNode.textContent = trimmed;
    this.appendTurn("user", userNode);
    this.input.value = "";
    await this.send(trimmed);
  }

  private async send(question: string): Promise<void> {
    this.setBusy(true);
    try {
      const response: AskResponse = await postAsk(
        this.base,
        { question, session_id: this.sessionId },
        this.fetchFn,
      );
      this.appendTurn("bot", renderResponse(response, (payload) => void this.submit(payload)));
    } catch (err) {
      const failure = document.createElement("div");
      failure.className = "error";
      const label = document.createElement("p");
      label.textContent =
        err instanceof AskError ? `请求失败 (${err.message})` : "请求失败";
      const retry = document.createElement("button");
      retry.type = "button";
      retry.className = "retry";
      retry.textContent = "重试";
      // retries reuse the question without duplicating the user turn
      retry.addEventListener("click", () => void this.send(question));
      failure.append(label, retry);
      this.appendTurn("bot", failure);
    } finally {
      this.setBusy(false);
    }
  }
}

export function bootstrap(): void {
  const root = document.getElementById("chat-root");
  if (root) {
    new ChatApp().mount(root);
  }
}

if (typeof document !== "undefined" && document.getElementById("chat-root")) {
  bootstrap();
}
