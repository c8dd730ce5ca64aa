/**
 * Scripted end-to-end test of the studio surface against the live
 * service: every interaction goes through the rendered DOM, and the
 * displayed text is cross-checked against the server's session state at
 * every step.
 */

import { beforeEach, describe, expect, it } from "vitest";

import { StudioApi } from "../src/api.js";
import { Studio } from "../src/studio.js";

const BASE = process.env.CTGS_API ?? "http://127.0.0.1:8841";
const api = new StudioApi(BASE);

async function until(cond: () => boolean, ms = 8000): Promise<void> {
  const start = Date.now();
  while (!cond()) {
    if (Date.now() - start > ms) throw new Error("timed out waiting for the UI");
    await new Promise((r) => setTimeout(r, 10));
  }
}

async function mountWithPreset(preset: string, seed = 5) {
  const presets = (await api.filterSchema()).presets;
  expect(presets[preset]).toBeDefined();
  const descriptor = await api.createSession({
    model: "model",
    filters: presets[preset],
    sampling: "topp:0.9",
    seed,
  });
  const root = document.createElement("div");
  document.body.appendChild(root);
  const studio = new Studio(root, api, descriptor);
  await studio.refreshContinuations();
  return { root, studio, id: descriptor.session_id };
}

function displayedText(root: HTMLElement): string {
  return root.querySelector("#text")?.textContent ?? "";
}

function undoDepth(root: HTMLElement): number {
  return Number(root.querySelector("#undo-depth")?.textContent?.split(" ")[0]);
}

beforeEach(() => {
  document.body.textContent = "";
});

describe("studio loop with the lipogram-e preset", () => {
  it("picks the top entry 10 times, mirrors the server, never shows an e, and undoes", async () => {
    const { root, id } = await mountWithPreset("lipogram-e");
    const seen: string[] = [];

    for (let step = 0; step < 10; step++) {
      const serverBefore = await api.getSession(id);
      expect(displayedText(root)).toBe(serverBefore.context_text);
      expect(displayedText(root)).not.toMatch(/e/i);
      seen.push(displayedText(root));

      const top = root.querySelector<HTMLButtonElement>(
        "#continuations li .word",
      );
      expect(top).not.toBeNull();
      const picked = top!.textContent!;
      top!.click();
      await until(() => undoDepth(root) === step + 1);

      const serverAfter = await api.getSession(id);
      expect(displayedText(root)).toBe(serverAfter.context_text);
      expect(displayedText(root)).not.toMatch(/e/i);
      expect(displayedText(root).endsWith(picked)).toBe(true);
    }

    // undo restores each prior state, checked against the server each time
    for (let step = 9; step >= 0; step--) {
      root.querySelector<HTMLButtonElement>("#undo")!.click();
      await until(() => undoDepth(root) === step);
      expect(displayedText(root)).toBe(seen[step]);
      expect(displayedText(root)).toBe((await api.getSession(id)).context_text);
    }
    await api.deleteSession(id);
  });

  it("generates through the mask and keeps the text e-free", async () => {
    const { root, id } = await mountWithPreset("lipogram-e", 11);
    root.querySelector<HTMLButtonElement>("#generate")!.click();
    await until(() => undoDepth(root) === 5);
    expect(displayedText(root)).not.toMatch(/e/i);
    expect(displayedText(root)).toBe((await api.getSession(id)).context_text);
    await api.deleteSession(id);
  });

  it("submits typed words as forced accepts the server records", async () => {
    const { root, studio, id } = await mountWithPreset("lipogram-e", 3);
    await studio.typeWords("keeper");
    expect(displayedText(root)).toBe("keeper");
    expect(displayedText(root)).toBe((await api.getSession(id)).context_text);
    // the filter stays active for machine continuations
    expect(root.querySelectorAll("#continuations li").length).toBeGreaterThan(0);
    for (const li of root.querySelectorAll("#continuations li .word")) {
      expect(li.textContent).not.toMatch(/e/i);
    }
    await api.deleteSession(id);
  });
});

describe("filter panel", () => {
  it("marks the sidebar stale on edits and applies on the button", async () => {
    const { root, studio, id } = await mountWithPreset("lipogram-e", 7);
    const sidebar = () => root.querySelector("#sidebar")!;
    expect(sidebar().classList.contains("stale")).toBe(false);

    studio.onFilterEdit("ban_letters=e\nlength_min=4");
    expect(root.querySelector("#sidebar")!.classList.contains("stale")).toBe(true);

    root.querySelector<HTMLButtonElement>("#apply-filters")!.click();
    await until(
      () =>
        !root.querySelector("#sidebar")!.classList.contains("stale") &&
        (root.querySelector("#active-filters")!.textContent ?? "").includes(
          "length_min=4",
        ),
    );
    const server = await api.getSession(id);
    expect(server.filters).toEqual(["ban_letters=e", "length_min=4"]);
    for (const word of root.querySelectorAll("#continuations li .word")) {
      expect(word.textContent!.length).toBeGreaterThanOrEqual(4);
    }
    await api.deleteSession(id);
  });

  it("renders dead-end diagnostics instead of a list", async () => {
    const { root, studio, id } = await mountWithPreset("lipogram-e", 9);
    studio.onFilterEdit("require_letters=q\nban_letters=u");
    await studio.commitFilters();
    await until(() => root.querySelector("#dead-end") !== null);
    const banner = root.querySelector("#dead-end")!;
    expect(banner.textContent).toContain("Dead end");
    expect(banner.querySelectorAll("li").length).toBeGreaterThan(0);
    expect(banner.textContent).toContain("require_letters=q");
    expect(root.querySelector("#continuations")).toBeNull();
    await api.deleteSession(id);
  });
});
