/** Boot: session creation form, then the studio itself. */

import { StudioApi } from "./api.js";
import { Studio } from "./studio.js";

function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get("api");
  return param ?? "";
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const api = new StudioApi(apiBase());

  let models: string[];
  let presets: Record<string, string[]>;
  try {
    [models, presets] = await Promise.all([
      api.health().then((h) => h.models),
      api.filterSchema().then((s) => s.presets),
    ]);
  } catch (err) {
    root.textContent = `cannot reach the studio service: ${err}`;
    return;
  }

  const form = document.createElement("form");
  form.id = "create-session";
  const modelSelect = document.createElement("select");
  modelSelect.id = "model";
  for (const m of models) {
    const opt = document.createElement("option");
    opt.value = opt.textContent = m;
    modelSelect.appendChild(opt);
  }
  const presetSelect = document.createElement("select");
  presetSelect.id = "preset";
  const none = document.createElement("option");
  none.value = "";
  none.textContent = "(no preset)";
  presetSelect.appendChild(none);
  for (const name of Object.keys(presets)) {
    const opt = document.createElement("option");
    opt.value = opt.textContent = name;
    presetSelect.appendChild(opt);
  }
  const seedInput = document.createElement("input");
  seedInput.id = "seed";
  seedInput.type = "number";
  seedInput.value = "0";
  const start = document.createElement("button");
  start.textContent = "Start writing";
  form.append("model ", modelSelect, " preset ", presetSelect, " seed ", seedInput, start);
  root.appendChild(form);

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void (async () => {
      const filters = presetSelect.value ? presets[presetSelect.value] : [];
      const descriptor = await api.createSession({
        model: modelSelect.value,
        filters,
        sampling: "topp:0.9",
        seed: Number(seedInput.value) || 0,
      });
      root.textContent = "";
      const studio = new Studio(root, api, descriptor);
      await studio.refreshContinuations();
    })();
  });
}

void boot();
