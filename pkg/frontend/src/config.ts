// API base URL resolution: a page can set window.KGQA_API_BASE before the
// app script loads; otherwise same-origin is assumed.

declare global {
  interface Window {
    KGQA_API_BASE?: string;
  }
}

export function apiBase(): string {
  if (typeof window !== "undefined" && window.KGQA_API_BASE) {
    return window.KGQA_API_BASE.replace(/\/$/, "");
  }
  return "";
}
