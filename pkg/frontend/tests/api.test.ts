import { describe, expect, it } from "vitest";

import { ApiError, ThtApi, encodePath } from "../src/api.js";

interface Captured {
  url: string;
  init?: RequestInit;
}

function clientWith(status: number, body: unknown): { api: ThtApi; calls: Captured[] } {
  const calls: Captured[] = [];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { api: new ThtApi("http://api", fetchFn), calls };
}

describe("ThtApi", () => {
  it("encodes node paths with tilde separators", () => {
    expect(encodePath("KV/1.1.1/Ny")).toBe("KV~1.1.1~Ny");
    expect(encodePath("KV")).toBe("KV");
  });

  it("sends the bearer token on authorized calls", async () => {
    const { api, calls } = clientWith(200, { works: [] });
    api.token = "tok-123";
    await api.listWorks();
    const headers = calls[0].init?.headers as Record<string, string>;
    expect(headers.Authorization).toBe("Bearer tok-123");
  });

  it("posts layer bodies to tilde-encoded URLs", async () => {
    const { api, calls } = clientWith(200, {});
    api.token = "t";
    await api.addLayer("KV/1.1.1/Ny", "Tp", "text");
    expect(calls[0].url).toBe("http://api/api/nodes/KV~1.1.1~Ny/layers");
    expect(JSON.parse(calls[0].init?.body as string)).toEqual(
      { label: "Tp", text: "text" });
  });

  it("builds report query strings", async () => {
    const { api, calls } = clientWith(200, {});
    api.token = "t";
    await api.supportReport("KV", ["1.1.1.1", "1.1.1.2"], "Ny");
    expect(calls[0].url).toBe(
      "http://api/api/works/KV/reports/support?units=1.1.1.1%2C1.1.1.2&layer=Ny");
  });

  it("stores the token after login", async () => {
    const { api } = clientWith(200, { token: "fresh" });
    await api.login("anno", "pw");
    expect(api.token).toBe("fresh");
  });

  it("raises ApiError with the machine-readable code", async () => {
    const { api } = clientWith(409, {
      code: "RevisionConflict", message: "stale", detail: null });
    api.token = "t";
    let failure: unknown;
    try {
      await api.editLayer("KV/1.1.1/Ny", "x", 1);
    } catch (error) {
      failure = error;
    }
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).status).toBe(409);
    expect((failure as ApiError).code).toBe("RevisionConflict");
  });
});
