/** Workbench state: the query draft under edit, the latest design, and an
 * append-only history of (query, design) snapshots. Every value shown in the
 * UI originates from a service document. */

import type { DesignDoc, OptimizeEntry, QueryDoc } from "./types.js";

export interface Snapshot {
  query: QueryDoc;
  design: DesignDoc;
}

function deepCopy<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

export function priorityLabel(entry: OptimizeEntry): string {
  if (entry.target === "TOTAL_COST") return "TOTAL_COST";
  return `${entry.target.workload}:${entry.target.objective}`;
}

export class WorkbenchState {
  sessionId: string | null = null;
  queryDoc: QueryDoc | null = null;
  lastDesign: DesignDoc | null = null;
  private history: Snapshot[] = [];

  setQuery(query: QueryDoc): void {
    this.queryDoc = deepCopy(query);
  }

  /** Priority entries sorted by ascending priority (1 = highest). */
  priorities(): OptimizeEntry[] {
    if (!this.queryDoc) return [];
    return [...this.queryDoc.optimize].sort((a, b) => a.priority - b.priority);
  }

  /**
   * Move the entry at `from` in the sorted priority list to position `to`
   * and renumber 1..n. Returns the updated draft, or null for a no-op.
   */
  reorderPriorities(from: number, to: number): QueryDoc | null {
    if (!this.queryDoc) return null;
    const sorted = this.priorities();
    if (
      from === to ||
      from < 0 ||
      to < 0 ||
      from >= sorted.length ||
      to >= sorted.length
    ) {
      return null;
    }
    const order = [...sorted];
    const moved = order.splice(from, 1)[0]!;
    order.splice(to, 0, moved);
    const draft = deepCopy(this.queryDoc);
    draft.optimize = order.map((entry, index) => ({
      target: deepCopy(entry.target),
      priority: index + 1,
    }));
    this.queryDoc = draft;
    return deepCopy(draft);
  }

  /** Merge device pins into the draft (feeding the next synthesis). */
  applyPins(pins: Record<string, string>): QueryDoc | null {
    if (!this.queryDoc) return null;
    const draft = deepCopy(this.queryDoc);
    draft.pins = { ...draft.pins, ...pins };
    this.queryDoc = draft;
    return deepCopy(draft);
  }

  excludeSystem(systemId: string): QueryDoc | null {
    if (!this.queryDoc) return null;
    const draft = deepCopy(this.queryDoc);
    if (!draft.excluded_systems.includes(systemId)) {
      draft.excluded_systems = [...draft.excluded_systems, systemId];
    }
    this.queryDoc = draft;
    return deepCopy(draft);
  }

  /** Record a confirmed (query, design) pair; history is append-only. */
  recordResult(query: QueryDoc, design: DesignDoc): void {
    this.queryDoc = deepCopy(query);
    this.lastDesign = deepCopy(design);
    this.history.push({ query: deepCopy(query), design: deepCopy(design) });
  }

  historyLength(): number {
    return this.history.length;
  }

  /** Deep copies, so restored drafts can be edited without mutating history. */
  restore(index: number): Snapshot {
    const snapshot = this.history[index];
    if (!snapshot) throw new Error(`no history entry ${index}`);
    this.queryDoc = deepCopy(snapshot.query);
    this.lastDesign = deepCopy(snapshot.design);
    return { query: deepCopy(snapshot.query), design: deepCopy(snapshot.design) };
  }

  serializeHistory(): string {
    return JSON.stringify(this.history);
  }

  loadHistory(serialized: string): void {
    this.history = JSON.parse(serialized) as Snapshot[];
  }
}
