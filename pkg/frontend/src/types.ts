// Wire types of the /ask endpoint, mirrored verbatim.

export interface ExplanationStep {
  step_kind: string;
  text: string;
  bindings: Record<string, string>;
}

export interface TabEntry {
  key: string;
  body: string;
}

export interface HighlightedCell {
  row: number;
  column: string;
}

export interface AnswerPayload {
  kind: "simple_text" | "key_value_tabs" | "table" | "no_answer" | string;
  text?: string;
  tabs?: TabEntry[];
  schema_id?: string;
  columns?: string[];
  rows?: Record<string, string>[];
  answer_column?: string;
  highlighted_cell?: HighlightedCell | null;
  missing_conditions?: string[];
  reason?: string;
  explanation: ExplanationStep[];
  tips?: string | null;
}

export interface Recommendation {
  display: string;
  payload: string;
}

export interface AskResponse {
  status: "answered" | "recommended" | "no_match" | string;
  answer: AnswerPayload | null;
  recommendations: Recommendation[];
  debug?: unknown;
}

export interface AskBody {
  question: string;
  session_id: string;
  debug?: boolean;
}
