/** Drag-ordered priority list. A completed drop commits exactly one
 * PUT (query draft) + POST (synthesize) pair and appends one history
 * snapshot; a no-op drop touches nothing. */

import { ApiClient } from "./api.js";
import { WorkbenchState, priorityLabel } from "./state.js";
import { h, on, VNode } from "./vdom.js";
import type { DesignDoc } from "./types.js";

export class PriorityListController {
  private dragIndex: number | null = null;
  busy = false;

  constructor(
    private state: WorkbenchState,
    private api: ApiClient,
    private onDesign: (design: DesignDoc) => void = () => {},
    private onError: (error: unknown) => void = () => {},
  ) {}

  onDragStart(index: number): void {
    this.dragIndex = index;
  }

  /** Returns true when a synthesis round-trip was committed. */
  async onDrop(index: number): Promise<boolean> {
    const from = this.dragIndex;
    this.dragIndex = null;
    if (from === null || this.busy) return false;
    const draft = this.state.reorderPriorities(from, index);
    if (draft === null) return false; // no-op reorder: no traffic, no history
    if (!this.state.sessionId) throw new Error("no live session");
    this.busy = true;
    try {
      await this.api.putQuery(this.state.sessionId, draft);
      const design = await this.api.synthesize(this.state.sessionId);
      this.state.recordResult(draft, design);
      this.onDesign(design);
      return true;
    } catch (error) {
      this.onError(error);
      return false;
    } finally {
      this.busy = false;
    }
  }

  render(): VNode {
    const entries = this.state.priorities();
    const items = entries.map((entry, index) => {
      const item = h(
        "li",
        {
          class: "priority-item",
          draggable: "true",
          "data-index": String(index),
          "data-priority": String(entry.priority),
        },
        `${entry.priority}. ${priorityLabel(entry)}`,
      );
      on(item, "dragstart", () => this.onDragStart(index));
      on(item, "drop", () => {
        void this.onDrop(index);
      });
      return item;
    });
    return h("ol", { class: "priority-list" }, ...items);
  }
}
