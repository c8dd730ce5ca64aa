/**
 * The studio surface: filter panel on the left, the evolving text in the
 * middle, and the ranked continuation sidebar on the right.
 *
 * The server is the single source of truth. Every user action issues
 * exactly one mutate call and the view re-renders only from the server's
 * response; the continuation list is never filtered or re-ranked on the
 * client. Pending filter edits grey the sidebar out until Apply commits
 * them (refreshes after edits are debounced by 250 ms).
 */

import {
  ApiRequestError,
  ContinuationEntry,
  RejectedToken,
  SessionDescriptor,
  StudioApi,
} from "./api.js";

export const FILTER_DEBOUNCE_MS = 250;

export interface ViewState {
  descriptor: SessionDescriptor;
  continuations: ContinuationEntry[] | null;
  allowedCount: number | null;
  deadEnd: RejectedToken[] | null;
  pendingFilters: string;
  stale: boolean;
  networkError: string | null;
  actionError: string | null;
  history: string[]; // prior context texts, for the undo affordance
}

function badge(text: string): HTMLElement {
  const el = document.createElement("span");
  el.className = "badge";
  el.textContent = text;
  return el;
}

export class Studio {
  readonly state: ViewState;
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private refreshTicket = 0;

  constructor(
    private root: HTMLElement,
    private api: StudioApi,
    descriptor: SessionDescriptor,
    private listSize = 12,
  ) {
    this.state = {
      descriptor,
      continuations: null,
      allowedCount: null,
      deadEnd: null,
      pendingFilters: descriptor.filters.join("\n"),
      stale: false,
      networkError: null,
      actionError: null,
      history: [],
    };
    this.render();
  }

  /** Fetch the ranked continuation list for the committed filter set. */
  async refreshContinuations(): Promise<void> {
    const ticket = ++this.refreshTicket;
    try {
      const list = await this.api.continuations(
        this.state.descriptor.session_id,
        this.listSize,
      );
      if (ticket !== this.refreshTicket) return; // a newer refresh superseded us
      this.state.continuations = list.entries;
      this.state.allowedCount = list.allowed_count;
      this.state.deadEnd = null;
      this.state.networkError = null;
    } catch (err) {
      if (ticket !== this.refreshTicket) return;
      if (err instanceof ApiRequestError && err.code === "dead_end") {
        this.state.continuations = null;
        this.state.allowedCount = 0;
        this.state.deadEnd = err.deadEndDiagnostics;
        this.state.networkError = null;
      } else if (err instanceof ApiRequestError) {
        this.state.actionError = err.message;
      } else {
        // keep the current list; offer a retry instead of guessing
        this.state.networkError = String(err);
      }
    }
    this.state.stale = false;
    this.render();
  }

  private async mutate(run: () => Promise<SessionDescriptor>): Promise<void> {
    this.state.actionError = null;
    try {
      const before = this.state.descriptor.context_text;
      const descriptor = await run();
      if (descriptor.context_ids.length > this.state.descriptor.context_ids.length) {
        this.state.history.push(before);
      }
      this.state.descriptor = descriptor;
      this.state.pendingFilters = descriptor.filters.join("\n");
    } catch (err) {
      if (err instanceof ApiRequestError) {
        this.state.actionError = err.message;
        if (err.code === "dead_end") this.state.deadEnd = err.deadEndDiagnostics;
      } else {
        this.state.networkError = String(err);
      }
      this.render();
      return;
    }
    await this.refreshContinuations();
  }

  /** Accept one server-listed continuation. */
  async pick(tokenId: number): Promise<void> {
    await this.mutate(() =>
      this.api.act(this.state.descriptor.session_id, {
        type: "accept",
        token_id: tokenId,
      }),
    );
  }

  /** Free typing: each word goes in as an explicit forced accept. */
  async typeWords(text: string): Promise<void> {
    const words = text.split(/\s+/).filter((w) => w.length > 0);
    for (const word of words) {
      await this.mutate(() =>
        this.api.act(this.state.descriptor.session_id, {
          type: "accept",
          token: word,
          forced: true,
        }),
      );
      if (this.state.actionError) break;
    }
  }

  async generate(n: number): Promise<void> {
    await this.mutate(() =>
      this.api.act(this.state.descriptor.session_id, { type: "generate", n }),
    );
  }

  async undo(): Promise<void> {
    await this.mutate(() =>
      this.api.act(this.state.descriptor.session_id, { type: "undo", steps: 1 }),
    );
    this.state.history.pop();
    this.render();
  }

  /** Filter textarea edits mark the sidebar stale until Apply commits. */
  onFilterEdit(text: string): void {
    this.state.pendingFilters = text;
    this.state.stale = true;
    this.render();
  }

  applyFilters(): void {
    if (this.debounceTimer) clearTimeout(this.debounceTimer);
    this.debounceTimer = setTimeout(() => {
      void this.commitFilters();
    }, FILTER_DEBOUNCE_MS);
  }

  async commitFilters(): Promise<void> {
    const filters = this.state.pendingFilters
      .split("\n")
      .map((f) => f.trim())
      .filter((f) => f.length > 0);
    await this.mutate(() =>
      this.api.act(this.state.descriptor.session_id, {
        type: "set_filters",
        filters,
      }),
    );
  }

  usePreset(items: string[]): void {
    this.state.pendingFilters = items.join("\n");
    this.state.stale = true;
    this.render();
  }

  render(): void {
    const s = this.state;
    this.root.textContent = "";

    const header = document.createElement("header");
    header.innerHTML =
      `<strong>${s.descriptor.model}</strong>` +
      ` <span id="allowed-count">${s.allowedCount ?? s.descriptor.allowed_count} allowed</span>` +
      ` <span id="undo-depth">${s.descriptor.undo_depth} steps</span>`;
    this.root.appendChild(header);

    const main = document.createElement("div");
    main.className = "studio";

    // -- filter panel ----------------------------------------------------
    const panel = document.createElement("section");
    panel.className = "filters";
    const textarea = document.createElement("textarea");
    textarea.id = "filter-items";
    textarea.value = s.pendingFilters;
    textarea.addEventListener("input", () => this.onFilterEdit(textarea.value));
    const apply = document.createElement("button");
    apply.id = "apply-filters";
    apply.textContent = "Apply filters";
    apply.addEventListener("click", () => this.applyFilters());
    const active = document.createElement("div");
    active.id = "active-filters";
    active.textContent = s.descriptor.filters.join(", ") || "(no filters)";
    panel.append(active, textarea, apply);
    main.appendChild(panel);

    // -- text canvas -----------------------------------------------------
    const canvas = document.createElement("section");
    canvas.className = "canvas";
    const text = document.createElement("div");
    text.id = "text";
    text.textContent = s.descriptor.context_text;
    const typeBox = document.createElement("input");
    typeBox.id = "free-type";
    typeBox.placeholder = "type words (forced past the filters)";
    typeBox.addEventListener("keydown", (ev) => {
      if ((ev as KeyboardEvent).key === "Enter" && typeBox.value.trim()) {
        const value = typeBox.value;
        typeBox.value = "";
        void this.typeWords(value);
      }
    });
    const controls = document.createElement("div");
    const undoBtn = document.createElement("button");
    undoBtn.id = "undo";
    undoBtn.textContent = "Undo";
    undoBtn.disabled = s.descriptor.undo_depth === 0;
    undoBtn.addEventListener("click", () => void this.undo());
    const genBtn = document.createElement("button");
    genBtn.id = "generate";
    genBtn.textContent = "Generate 5";
    genBtn.addEventListener("click", () => void this.generate(5));
    controls.append(undoBtn, genBtn);
    canvas.append(text, typeBox, controls);
    if (s.actionError) {
      const err = document.createElement("div");
      err.className = "action-error";
      err.textContent = s.actionError;
      canvas.appendChild(err);
    }
    main.appendChild(canvas);

    // -- continuation sidebar ---------------------------------------------
    const sidebar = document.createElement("aside");
    sidebar.id = "sidebar";
    if (s.stale) sidebar.classList.add("stale");
    if (s.networkError) {
      const warn = document.createElement("div");
      warn.className = "network-error";
      warn.textContent = `connection problem: ${s.networkError}`;
      const retry = document.createElement("button");
      retry.id = "retry";
      retry.textContent = "Retry";
      retry.addEventListener("click", () => void this.refreshContinuations());
      warn.appendChild(retry);
      sidebar.appendChild(warn);
    }
    if (s.deadEnd) {
      const banner = document.createElement("div");
      banner.id = "dead-end";
      banner.innerHTML = "<strong>Dead end:</strong> every token is filtered out.";
      const table = document.createElement("ul");
      for (const d of s.deadEnd) {
        const li = document.createElement("li");
        li.textContent = `${d.surface} (p=${d.probability.toFixed(4)}) rejected by ${d.rejected_by}`;
        table.appendChild(li);
      }
      banner.appendChild(table);
      sidebar.appendChild(banner);
    } else if (s.continuations) {
      const list = document.createElement("ul");
      list.id = "continuations";
      for (const entry of s.continuations) {
        const li = document.createElement("li");
        li.className = "continuation";
        li.dataset.tokenId = String(entry.token_id);
        const word = document.createElement("button");
        word.className = "word";
        word.textContent = entry.surface;
        word.addEventListener("click", () => void this.pick(entry.token_id));
        li.appendChild(word);
        li.appendChild(badge(entry.probability.toFixed(4)));
        if (entry.features.syllables !== null) {
          li.appendChild(badge(`${entry.features.syllables} syl`));
        }
        if (entry.features.rhyme_key) {
          li.appendChild(badge(entry.features.rhyme_key));
        }
        list.appendChild(li);
      }
      sidebar.appendChild(list);
    }
    main.appendChild(sidebar);
    this.root.appendChild(main);
  }
}
