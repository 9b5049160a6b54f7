/** Browser entry point: wires the service client, workbench state, and the
 * render functions into one page. All reasoning stays server-side. */

import { ApiClient } from "./api.js";
import { renderDesign } from "./design_view.js";
import { renderExplanation } from "./explain_view.js";
import { PriorityListController } from "./priorities.js";
import { WorkbenchState } from "./state.js";
import { h, mount, on, VNode } from "./vdom.js";
import type { DesignDoc, ExplainRequestBody, QueryDoc } from "./types.js";

export class Workbench {
  readonly state = new WorkbenchState();
  readonly priorities: PriorityListController;
  private explanationPanel: VNode | null = null;

  constructor(
    private api: ApiClient,
    private root: Element,
  ) {
    this.priorities = new PriorityListController(
      this.state,
      this.api,
      () => this.redraw(),
      (error) => this.showError(error),
    );
  }

  async start(query: QueryDoc): Promise<void> {
    this.state.sessionId = await this.api.createSession();
    this.state.setQuery(query);
    const design = await this.api.synthesize(this.state.sessionId, query);
    this.state.recordResult(query, design);
    this.redraw();
  }

  async whatIf(request: ExplainRequestBody): Promise<void> {
    if (!this.state.sessionId) throw new Error("no live session");
    const doc = await this.api.explain(this.state.sessionId, request);
    this.explanationPanel = renderExplanation(doc, this.state.lastDesign, {
      onApplyPins: (pins) => {
        void this.resynthesize(this.state.applyPins(pins));
      },
      onExcludeSystem: (systemId) => {
        void this.resynthesize(this.state.excludeSystem(systemId));
      },
    });
    this.redraw();
  }

  async restoreSnapshot(index: number): Promise<void> {
    const snapshot = this.state.restore(index);
    await this.resynthesize(snapshot.query);
  }

  private async resynthesize(draft: QueryDoc | null): Promise<void> {
    if (!draft || !this.state.sessionId) return;
    await this.api.putQuery(this.state.sessionId, draft);
    const design = await this.api.synthesize(this.state.sessionId);
    this.state.recordResult(draft, design);
    this.explanationPanel = null;
    this.redraw();
  }

  private showError(error: unknown): void {
    this.explanationPanel = h(
      "div",
      { class: "banner banner-error" },
      error instanceof Error ? error.message : String(error),
    );
    this.redraw();
  }

  redraw(): void {
    this.root.innerHTML = "";
    const design: DesignDoc | null = this.state.lastDesign;
    const historyItems: VNode[] = [];
    for (let i = 0; i < this.state.historyLength(); i += 1) {
      const link = h("li", { class: "history-entry" }, `revision ${i + 1}`);
      on(link, "click", () => {
        void this.restoreSnapshot(i);
      });
      historyItems.push(link);
    }
    const page = h(
      "main",
      { class: "workbench" },
      h("h1", {}, "architecture workbench"),
      this.priorities.render(),
      design ? renderDesign(design) : h("p", {}, "no design yet"),
      this.explanationPanel,
      h("ol", { class: "history" }, ...historyItems),
    );
    mount(page, this.root);
  }
}

export async function boot(rootSelector: string, baseUrl: string, query: QueryDoc) {
  const root = document.querySelector(rootSelector);
  if (!root) throw new Error(`no element matches ${rootSelector}`);
  const client = new ApiClient(baseUrl, (url, init) =>
    fetch(url, init).then((r) => ({ status: r.status, json: () => r.json() })),
  );
  const workbench = new Workbench(client, root);
  await workbench.start(query);
  return workbench;
}
