import { describe, expect, it, vi } from "vitest";

import { ApiError, ExplorerApi } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("ExplorerApi", () => {
  it("creates sessions with source and policy", async () => {
    const fetchFn = vi.fn(async () => jsonResponse({ id: "s1", revision: 0 }));
    const api = new ExplorerApi("http://svc", fetchFn);
    const session = await api.createSession("qubits 1\nh q0", "transparent");
    expect(session.id).toBe("s1");
    const [url, init] = fetchFn.mock.calls[0];
    expect(url).toBe("http://svc/sessions");
    expect(init?.method).toBe("POST");
    expect(JSON.parse(init?.body as string)).toEqual({
      source: "qubits 1\nh q0",
      policy: "transparent",
    });
  });

  it("encodes match queries", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse({ revision: 3, matches: [] }),
    );
    const api = new ExplorerApi("http://svc", fetchFn);
    await api.matches("s1", "HH_CANCEL", true);
    expect(fetchFn.mock.calls[0][0]).toBe(
      "http://svc/sessions/s1/matches?rule=HH_CANCEL&reverse=true",
    );
  });

  it("fills apply defaults", async () => {
    const fetchFn = vi.fn(async () => jsonResponse({ revision: 1 }));
    const api = new ExplorerApi("http://svc", fetchFn);
    await api.apply("s1", { rule: "HZH_TO_X", at: [0, 1, 2], revision: 0 });
    const body = JSON.parse(fetchFn.mock.calls[0][1]?.body as string);
    expect(body).toEqual({
      rule: "HZH_TO_X",
      at: [0, 1, 2],
      wires: [],
      reverse: false,
      variant: "",
      revision: 0,
    });
  });

  it("surfaces server error bodies", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse({ error: "line 2, column 1: unknown gate" }, 400),
    );
    const api = new ExplorerApi("http://svc", fetchFn);
    await expect(api.createSession("bad")).rejects.toThrowError(ApiError);
    await expect(api.createSession("bad")).rejects.toThrow("unknown gate");
  });

  it("surfaces revision conflicts with status 409", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse({ detail: "revision 0 is stale (current 2)" }, 409),
    );
    const api = new ExplorerApi("http://svc", fetchFn);
    try {
      await api.apply("s1", { rule: "HH_CANCEL", at: [0, 1], revision: 0 });
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(409);
    }
  });

  it("fetches diagrams as text", async () => {
    const fetchFn = vi.fn(
      async () => new Response("<svg></svg>", { status: 200 }),
    );
    const api = new ExplorerApi("http://svc", fetchFn);
    expect(await api.diagramSvg("s1")).toBe("<svg></svg>");
  });
});
