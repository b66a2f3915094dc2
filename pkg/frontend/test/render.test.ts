import { describe, expect, it, vi } from "vitest";

import { renderAnswer, renderChips, renderResponse } from "../src/render.js";
import type { AnswerPayload, AskResponse } from "../src/types.js";

function tableAnswer(): AnswerPayload {
  return {
    kind: "table",
    schema_id: "floor_price_cvt",
    columns: ["subject", "participated_goods", "answer"],
    rows: [{ subject: "淘抢购", participated_goods: "是", answer: "计入 (Yes)" }],
    answer_column: "answer",
    highlighted_cell: { row: 0, column: "answer" },
    missing_conditions: [],
    explanation: [],
    tips: "最低价按活动期间实际成交价计算",
  };
}

describe("renderAnswer", () => {
  it("highlights exactly the cell named by the payload", () => {
    const node = renderAnswer(tableAnswer());
    const highlighted = node.querySelectorAll("td.highlighted");
    expect(highlighted).toHaveLength(1);
    expect(highlighted[0].textContent).toBe("计入 (Yes)");
    // the highlighted cell sits in the answer column of row 0
    const row = node.querySelectorAll("tbody tr")[0];
    const cells = Array.from(row.querySelectorAll("td"));
    expect(cells.indexOf(highlighted[0] as HTMLTableCellElement)).toBe(2);
  });

  it("renders no highlight when the payload has none", () => {
    const answer = tableAnswer();
    answer.highlighted_cell = null;
    answer.rows = [
      { subject: "淘抢购", participated_goods: "是", answer: "计入 (Yes)" },
      { subject: "聚划算", participated_goods: "是", answer: "不计入 (No)" },
    ];
    answer.missing_conditions = ["participated_goods"];
    const node = renderAnswer(answer);
    expect(node.querySelectorAll("td.highlighted")).toHaveLength(0);
    expect(node.querySelector(".missing-note")?.textContent).toContain("participated_goods");
    expect(node.querySelectorAll("tbody tr")).toHaveLength(2);
  });

  it("renders one tab per key and switches bodies on click", () => {
    const node = renderAnswer({
      kind: "key_value_tabs",
      tabs: [
        { key: "报名", body: "五月报名" },
        { key: "预热", body: "六月预热" },
        { key: "爆发", body: "六一八开卖" },
      ],
      explanation: [],
    });
    const tabs = node.querySelectorAll("button.tab");
    expect(tabs).toHaveLength(3);
    expect(node.querySelector(".tab-body")?.textContent).toBe("五月报名");
    (tabs[2] as HTMLButtonElement).click();
    expect(node.querySelector(".tab-body")?.textContent).toBe("六一八开卖");
    expect(tabs[2].classList.contains("active")).toBe(true);
  });

  it("renders a single key without a tab bar", () => {
    const node = renderAnswer({
      kind: "key_value_tabs",
      tabs: [{ key: "报名", body: "只有一段" }],
      explanation: [],
    });
    expect(node.querySelector(".tab-bar")).toBeNull();
    expect(node.querySelector(".tab-body")?.textContent).toBe("只有一段");
  });

  it("renders explanation steps collapsibly and tips", () => {
    const node = renderAnswer({
      kind: "simple_text",
      text: "可以",
      explanation: [
        { step_kind: "generalization", text: "优惠券是一种店铺级优惠。", bindings: {} },
        { step_kind: "table_lookup", text: "查询表。", bindings: {} },
      ],
      tips: "注意细则",
    });
    const details = node.querySelector("details.explanation");
    expect(details).not.toBeNull();
    expect(details!.querySelectorAll("li")).toHaveLength(2);
    expect(node.querySelector(".tips")?.textContent).toBe("注意细则");
  });

  it("renders a visible fallback for unknown kinds", () => {
    const node = renderAnswer({ kind: "hologram", explanation: [] });
    expect(node.querySelector(".fallback")?.textContent).toContain("hologram");
  });
});

describe("renderResponse", () => {
  it("caps chips at three and wires clicks to the payload", () => {
    const onPick = vi.fn();
    const recommendations = [1, 2, 3, 4].map((i) => ({
      display: `问题${i}`,
      payload: `payload${i}`,
    }));
    const node = renderChips(recommendations, onPick);
    const chips = node.querySelectorAll("button.chip");
    expect(chips).toHaveLength(3);
    (chips[1] as HTMLButtonElement).click();
    expect(onPick).toHaveBeenCalledWith("payload2");
  });

  it("renders a visible fallback for unknown statuses", () => {
    const response = { status: "galaxy", answer: null, recommendations: [] } as AskResponse;
    const node = renderResponse(response, () => {});
    expect(node.classList.contains("fallback")).toBe(true);
    expect(node.textContent).toContain("galaxy");
  });

  it("renders no_match visibly", () => {
    const node = renderResponse(
      { status: "no_match", answer: null, recommendations: [] },
      () => {},
    );
    expect(node.textContent).not.toBe("");
  });
});
