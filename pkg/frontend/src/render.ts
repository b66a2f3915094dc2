import type { AnswerPayload, AskResponse, Recommendation } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderTabs(answer: AnswerPayload): HTMLElement {
  const container = el("div", "tabs");
  const entries = answer.tabs ?? [];
  const body = el("div", "tab-body");
  const showEntry = (index: number) => {
    body.textContent = entries[index]?.body ?? "";
    container
      .querySelectorAll("button.tab")
      .forEach((btn, i) => btn.classList.toggle("active", i === index));
  };
  if (entries.length > 1) {
    const bar = el("div", "tab-bar");
    entries.forEach((entry, index) => {
      const tab = el("button", "tab", entry.key);
      tab.type = "button";
      tab.addEventListener("click", () => showEntry(index));
      bar.appendChild(tab);
    });
    container.appendChild(bar);
  }
  container.appendChild(body);
  if (entries.length > 0) showEntry(0);
  return container;
}

function renderTable(answer: AnswerPayload): HTMLElement {
  const wrapper = el("div", "table-answer");
  const table = el("table", "cvt-table");
  const columns = answer.columns ?? [];
  const head = el("thead");
  const headRow = el("tr");
  for (const column of columns) {
    headRow.appendChild(el("th", undefined, column));
  }
  head.appendChild(headRow);
  table.appendChild(head);

  const body = el("tbody");
  const highlighted = answer.highlighted_cell ?? null;
  (answer.rows ?? []).forEach((row, rowIndex) => {
    const tr = el("tr");
    for (const column of columns) {
      const td = el("td", undefined, String(row[column] ?? ""));
      if (highlighted && highlighted.row === rowIndex && highlighted.column === column) {
        td.classList.add("highlighted");
      }
      tr.appendChild(td);
    }
    body.appendChild(tr);
  });
  table.appendChild(body);
  wrapper.appendChild(table);
  if ((answer.missing_conditions ?? []).length > 0) {
    wrapper.appendChild(
      el("p", "missing-note", `补充条件可精确到一行: ${answer.missing_conditions!.join("、")}`),
    );
  }
  return wrapper;
}

function renderExplanation(answer: AnswerPayload): HTMLElement | null {
  if (!answer.explanation || answer.explanation.length === 0) return null;
  const details = el("details", "explanation");
  details.appendChild(el("summary", undefined, "解释"));
  const list = el("ul");
  for (const step of answer.explanation) {
    list.appendChild(el("li", undefined, step.text));
  }
  details.appendChild(list);
  return details;
}

export function renderAnswer(answer: AnswerPayload): HTMLElement {
  const container = el("div", "answer");
  switch (answer.kind) {
    case "simple_text":
      container.appendChild(el("p", "answer-text", answer.text ?? ""));
      break;
    case "key_value_tabs":
      container.appendChild(renderTabs(answer));
      break;
    case "table":
      container.appendChild(renderTable(answer));
      break;
    case "no_answer":
      container.appendChild(el("p", "no-answer", `没有找到答案 (${answer.reason ?? ""})`));
      break;
    default:
      container.appendChild(el("p", "fallback", `无法展示的回答类型: ${answer.kind}`));
  }
  const explanation = renderExplanation(answer);
  if (explanation) container.appendChild(explanation);
  if (answer.tips) container.appendChild(el("p", "tips", answer.tips));
  return container;
}

export function renderChips(
  recommendations: Recommendation[],
  onPick: (payload: string) => void,
): HTMLElement {
  const container = el("div", "chips");
  for (const rec of recommendations.slice(0, 3)) {
    const chip = el("button", "chip", rec.display);
    chip.type = "button";
    chip.dataset.payload = rec.payload;
    chip.addEventListener("click", () => onPick(rec.payload));
    container.appendChild(chip);
  }
  return container;
}

export function renderResponse(
  response: AskResponse,
  onPick: (payload: string) => void,
): HTMLElement {
  switch (response.status) {
    case "answered":
      if (response.answer) return renderAnswer(response.answer);
      return el("p", "fallback", "回答缺失");
    case "recommended": {
      const container = el("div", "recommended");
      container.appendChild(el("p", undefined, "您可能想问:"));
      container.appendChild(renderChips(response.recommendations ?? [], onPick));
      return container;
    }
    case "no_match":
      return el("p", "no-match", "没有匹配的知识，请换个问法");
    default:
      return el("p", "fallback", `无法展示的回复状态: ${response.status}`);
  }
}
