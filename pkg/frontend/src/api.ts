import type { AskBody, AskResponse } from "./types.js";

export class AskError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export async function postAsk(
  base: string,
  body: AskBody,
  fetchFn: FetchLike = fetch,
): Promise<AskResponse> {
  let response: Response;
  try {
    response = await fetchFn(`${base}/ask`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  } catch (err) {
    throw new AskError(`network failure: ${String(err)}`);
  }
  if (!response.ok) {
    throw new AskError(`service returned ${response.status}`, response.status);
  }
  return (await response.json()) as AskResponse;
}
