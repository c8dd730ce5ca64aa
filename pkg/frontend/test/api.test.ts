import { describe, expect, it } from "vitest";

import { ApiRequestError, StudioApi } from "../src/api.js";

const BASE = process.env.CTGS_API ?? "http://127.0.0.1:8841";
const api = new StudioApi(BASE);

describe("studio api client", () => {
  it("reports health and registered models", async () => {
    const health = await api.health();
    expect(health.status).toBe("ok");
    expect(health.models).toContain("model");
    expect(health.models).toContain("uniform");
  });

  it("serves the documented presets verbatim", async () => {
    const schema = await api.filterSchema();
    expect(schema.presets["lipogram-e"]).toEqual(["ban_letters=e"]);
    expect(schema.presets["e-prime"]).toEqual(["eprime"]);
    const keys = schema.filters.map((f) => f.key);
    expect(keys).toContain("ban_letters");
    expect(keys).toContain("rhymes_with");
  });

  it("surfaces structured errors", async () => {
    const err = await api.getSession("not-a-session").catch((e) => e);
    expect(err).toBeInstanceOf(ApiRequestError);
    expect(err.code).toBe("unknown_session");
    expect(err.status).toBe(404);
  });

  it("rejects bad filter items with the offending item named", async () => {
    const err = await api
      .createSession({ model: "model", filters: ["syllables=banana"] })
      .catch((e) => e);
    expect(err).toBeInstanceOf(ApiRequestError);
    expect(err.code).toBe("filter_parse_error");
    expect(err.details.item).toBe("syllables=banana");
  });

  it("reports dead ends with rejecting-filter diagnostics", async () => {
    const session = await api.createSession({
      model: "model",
      filters: ["require_letters=q", "ban_letters=u"],
      seed: 1,
    });
    const err = await api.continuations(session.session_id).catch((e) => e);
    expect(err).toBeInstanceOf(ApiRequestError);
    expect(err.code).toBe("dead_end");
    expect(err.deadEndDiagnostics.length).toBeGreaterThan(0);
    expect(typeof err.deadEndDiagnostics[0].rejected_by).toBe("string");
    await api.deleteSession(session.session_id);
  });

  it("allows forced accepts but rejects banned non-forced ones", async () => {
    const session = await api.createSession({
      model: "model",
      filters: ["ban_letters=e"],
      seed: 2,
    });
    const id = session.session_id;
    const banned = await api
      .act(id, { type: "accept", token: "letter" })
      .catch((e) => e);
    expect(banned).toBeInstanceOf(ApiRequestError);
    expect(banned.code).toBe("token_not_allowed");

    const forced = await api.act(id, {
      type: "accept",
      token: "letter",
      forced: true,
    });
    expect(forced.context_text).toBe("letter");
    await api.deleteSession(id);
  });
});
