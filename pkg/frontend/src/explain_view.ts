/** Explanation panel: conflicts grouped by server-assigned categories;
 * alternatives as a side-by-side diff with worsened objectives flagged.
 * Either outcome offers a one-click follow-up feeding the next synthesis. */

import { h, on, VNode } from "./vdom.js";
import type { DesignDoc, ExplainDoc } from "./types.js";

const CATEGORY_TITLES: Record<string, string> = {
  WORKLOAD_MISMATCH: "Workload mismatch",
  OBJECTIVE_MISALIGNMENT: "Objective misalignment",
  INSUFFICIENT_INVENTORY: "Insufficient inventory",
  SYSTEM_INCOMPATIBILITY: "System incompatibility",
};

export interface ExplainActions {
  /** Pin the alternative's hardware into the draft and re-synthesize. */
  onApplyPins?: (pins: Record<string, string>) => void;
  /** Exclude the blocked preference from the catalog and re-synthesize. */
  onExcludeSystem?: (systemId: string) => void;
}

export function renderExplanation(
  doc: ExplainDoc,
  baseDesign: DesignDoc | null,
  actions: ExplainActions = {},
): VNode {
  if (doc.outcome === "ALREADY_OPTIMAL") {
    return h(
      "div",
      { class: "toast toast-info" },
      `${doc.request.preferred} is already the selection for ${doc.request.role}; ` +
        `nothing outranks it on ${doc.ordering_consulted}.`,
    );
  }
  if (doc.outcome === "CONFLICT") {
    return renderConflict(doc, actions);
  }
  return renderAlternative(doc, baseDesign, actions);
}

function renderConflict(doc: ExplainDoc, actions: ExplainActions): VNode {
  const groups: VNode[] = [];
  for (const category of doc.categories ?? []) {
    const atoms = (doc.atoms ?? []).filter((a) => a.categories.includes(category));
    groups.push(
      h(
        "div",
        { class: "conflict-group", "data-category": category },
        h("h3", {}, CATEGORY_TITLES[category] ?? category),
        h(
          "ul",
          {},
          ...atoms.map((atom) =>
            h(
              "li",
              { class: "conflict-atom", "data-atom": atom.id },
              atom.label ? h("span", { class: "atom-label" }, atom.label) : null,
              h("code", { class: "atom-clause" }, atom.clause),
            ),
          ),
        ),
      ),
    );
  }
  const exclude = h(
    "button",
    { class: "action-exclude" },
    `exclude ${doc.request.preferred} and re-synthesize`,
  );
  if (actions.onExcludeSystem) {
    on(exclude, "click", () => actions.onExcludeSystem!(doc.request.preferred));
  }
  return h(
    "section",
    { class: "explanation conflict" },
    h(
      "h2",
      {},
      `Why ${doc.request.preferred} is not selected for ${doc.request.workload}`,
    ),
    ...groups,
    exclude,
  );
}

function renderAlternative(
  doc: ExplainDoc,
  baseDesign: DesignDoc | null,
  actions: ExplainActions,
): VNode {
  const alternative = doc.alternative!;
  const rows: VNode[] = [];
  for (const workload of Object.keys(alternative.systems).sort()) {
    const altAssignments = alternative.systems[workload]!;
    const baseAssignments = baseDesign?.systems[workload] ?? {};
    for (const role of Object.keys(altAssignments).sort()) {
      const before = baseAssignments[role] ?? "-";
      const after = altAssignments[role]!;
      rows.push(
        h(
          "tr",
          {
            class: before === after ? "diff-row" : "diff-row changed",
            "data-role": role,
          },
          h("td", { class: "cell-role" }, role),
          h("td", { class: "cell-before" }, before),
          h("td", { class: "cell-after" }, after),
        ),
      );
    }
  }
  const flags = (doc.tradeoffs ?? [])
    .filter((t) => t.worsened)
    .map((t) =>
      h(
        "div",
        { class: "flag flag-worsened", "data-objective": t.objective },
        `${t.objective}: ${String(t.old_value)} -> ${String(t.new_value)}`,
      ),
    );
  const apply = h("button", { class: "action-apply-pins" }, "apply as new pins");
  if (actions.onApplyPins) {
    on(apply, "click", () => actions.onApplyPins!({ ...alternative.hardware }));
  }
  return h(
    "section",
    { class: "explanation alternative" },
    h("h2", {}, `A feasible alternative deploys ${doc.request.preferred}`),
    h(
      "table",
      { class: "diff-table" },
      h(
        "thead",
        {},
        h("tr", {}, h("th", {}, "role"), h("th", {}, "current"), h("th", {}, "alternative")),
      ),
      h("tbody", {}, ...rows),
    ),
    ...flags,
    apply,
  );
}
