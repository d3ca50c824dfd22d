// DOM wiring for the explorer. All circuit state lives on the server; this
// file only renders responses and forwards clicks.

import { ApiError, ExplorerApi, type MatchJson } from "./api.js";
import {
  afterApply,
  afterUndo,
  highlightMatch,
  initialState,
  selectRule,
  withBadge,
  withDiagram,
  withError,
  withMatches,
  withPalette,
  withSession,
  type ViewState,
} from "./state.js";
import { runTour, type TourData } from "./tour.js";

const SAMPLE_SOURCE = `qubits 2
h q0
z q0
h q0
cx q0 q1`;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

class Explorer {
  private state: ViewState = initialState();
  private busy = false;

  constructor(private readonly api: ExplorerApi) {}

  async start(): Promise<void> {
    el<HTMLTextAreaElement>("source").value = SAMPLE_SOURCE;
    this.state = withPalette(this.state, await this.api.rules());
    el<HTMLButtonElement>("load").addEventListener("click", () =>
      this.guard(() => this.load()),
    );
    el<HTMLButtonElement>("undo").addEventListener("click", () =>
      this.guard(() => this.undo()),
    );
    el<HTMLButtonElement>("tour").addEventListener("click", () =>
      this.guard(() => this.tour()),
    );
    el<HTMLSelectElement>("palette").addEventListener("change", () =>
      this.guard(() => this.refreshMatches()),
    );
    this.render();
  }

  /** One request in flight per session: the badge must stay truthful. */
  private async guard(action: () => Promise<void>): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    try {
      await action();
      this.state = withError(this.state, "");
    } catch (err) {
      const message =
        err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
      this.state = withError(this.state, message);
    } finally {
      this.busy = false;
      this.render();
    }
  }

  private async load(): Promise<void> {
    const source = el<HTMLTextAreaElement>("source").value;
    const summary = await this.api.createSession(source);
    this.state = withSession(this.state, summary);
    await this.refreshDiagram();
  }

  private async refreshDiagram(): Promise<void> {
    if (!this.state.sessionId) return;
    const svg = await this.api.diagramSvg(this.state.sessionId);
    this.state = withDiagram(this.state, svg);
  }

  private async refreshMatches(): Promise<void> {
    const rule = el<HTMLSelectElement>("palette").value || null;
    this.state = selectRule(this.state, rule);
    if (!this.state.sessionId || !rule) return;
    const found = await this.api.matches(this.state.sessionId, rule);
    this.state = withMatches(this.state, found.matches);
  }

  private async applyMatch(match: MatchJson): Promise<void> {
    if (!this.state.sessionId) return;
    const summary = await this.api.apply(this.state.sessionId, {
      ...match,
      revision: this.state.revision,
    });
    this.state = afterApply(this.state, summary, match);
    await this.refreshDiagram();
    await this.refreshMatches();
  }

  private async undo(): Promise<void> {
    if (!this.state.sessionId) return;
    const summary = await this.api.undo(this.state.sessionId);
    this.state = afterUndo(this.state, summary);
    await this.refreshDiagram();
    await this.refreshMatches();
  }

  private async tour(): Promise<void> {
    const response = await fetch("../tours/bv_10110011.json");
    const tour = (await response.json()) as TourData;
    el<HTMLTextAreaElement>("source").value = tour.snapshots[0].cqc;
    await this.load();
    const result = await runTour(this.api, tour, ({ summary, step }) => {
      this.state = afterApply(this.state, summary, step);
    });
    // Point the view at the tour's session so the timeline stays truthful.
    const summary = await this.api.getSession(result.sessionId);
    this.state = withSession(this.state, summary);
    this.state = withBadge(this.state, { badge: result.badges.at(-1) ?? "" });
    this.state = {
      ...this.state,
      sessionId: result.sessionId,
      cqc: result.finalCqc,
    };
    await this.refreshDiagram();
  }

  private render(): void {
    el("badge").textContent = this.state.badge || "-";
    el("badge").className = this.state.badge.startsWith("verified")
      ? "badge ok"
      : "badge";
    el("error").textContent = this.state.error ?? "";
    el("cqc").textContent = this.state.cqc;

    const palette = el<HTMLSelectElement>("palette");
    if (palette.options.length <= 1) {
      for (const info of this.state.palette) {
        const option = document.createElement("option");
        option.value = info.rule;
        option.textContent = `${info.rule}: ${info.pattern} => ${info.replacement}`;
        palette.appendChild(option);
      }
    }

    const list = el("matches");
    list.replaceChildren();
    for (const match of this.state.matches) {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.textContent = `${match.rule} at [${match.at.join(", ")}]`;
      button.addEventListener("mouseenter", () => {
        this.state = highlightMatch(this.state, match);
        this.paintHighlights();
      });
      button.addEventListener("click", () =>
        this.guard(() => this.applyMatch(match)),
      );
      item.appendChild(button);
      list.appendChild(item);
    }

    const timeline = el("timeline");
    timeline.replaceChildren();
    for (const entry of this.state.timeline) {
      const item = document.createElement("li");
      item.textContent = `${entry.label} [${entry.badge}] #${entry.hash}`;
      timeline.appendChild(item);
    }

    el("diagram").innerHTML = this.state.svg;
    this.paintHighlights();
  }

  private paintHighlights(): void {
    const root = el("diagram");
    for (const group of root.querySelectorAll("g.gate")) {
      const index = Number(group.getAttribute("data-index"));
      group.classList.toggle(
        "highlight",
        this.state.highlighted.includes(index),
      );
    }
  }
}

export function main(baseUrl = "http://127.0.0.1:8077"): void {
  new Explorer(new ExplorerApi(baseUrl)).start().catch((err) => {
    el("error").textContent = `service unreachable: ${err}`;
  });
}

declare global {
  interface Window {
    qrewriteExplorerMain: typeof main;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  window.qrewriteExplorerMain = main;
}
