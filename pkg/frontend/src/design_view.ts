/** Tabular rendering of a design document: role table, hardware table,
 * warning banners, cost badge. Values pass through verbatim. */

import { h, VNode } from "./vdom.js";
import type { DesignDoc } from "./types.js";

export function isDesignDoc(doc: unknown): doc is DesignDoc {
  if (typeof doc !== "object" || doc === null) return false;
  const d = doc as Record<string, unknown>;
  return (
    typeof d["systems"] === "object" &&
    d["systems"] !== null &&
    typeof d["hardware"] === "object" &&
    d["hardware"] !== null &&
    (typeof d["total_cost"] === "number" || typeof d["total_cost"] === "string")
  );
}

export function renderDesign(doc: unknown): VNode {
  if (!isDesignDoc(doc)) {
    return h(
      "div",
      { class: "banner banner-error" },
      "malformed design document: expected systems, hardware, and total_cost",
    );
  }
  const children: VNode[] = [];

  for (const warning of doc.warnings ?? []) {
    children.push(
      h(
        "div",
        { class: "banner banner-warning", "data-source": warning.source },
        `${warning.source}: ${warning.text}`,
      ),
    );
  }

  children.push(
    h("span", { class: "cost-badge" }, `Total cost = ${String(doc.total_cost)}`),
  );

  const systemRows: VNode[] = [];
  for (const workload of Object.keys(doc.systems).sort()) {
    const assignments = doc.systems[workload]!;
    for (const role of Object.keys(assignments).sort()) {
      systemRows.push(
        h(
          "tr",
          { "data-workload": workload, "data-role": role },
          h("td", { class: "cell-workload" }, workload),
          h("td", { class: "cell-role" }, role),
          h("td", { class: "cell-system" }, assignments[role]!),
        ),
      );
    }
  }
  if (systemRows.length > 0) {
    children.push(
      h(
        "table",
        { class: "systems-table" },
        h(
          "thead",
          {},
          h("tr", {}, h("th", {}, "workload"), h("th", {}, "role"), h("th", {}, "system")),
        ),
        h("tbody", {}, ...systemRows),
      ),
    );
  }

  const hardwareRows = Object.keys(doc.hardware)
    .sort()
    .map((device) =>
      h(
        "tr",
        { "data-device": device },
        h("td", { class: "cell-device" }, device),
        h("td", { class: "cell-hardware" }, doc.hardware[device]!),
      ),
    );
  children.push(
    h(
      "table",
      { class: "hardware-table" },
      h("thead", {}, h("tr", {}, h("th", {}, "device"), h("th", {}, "hardware"))),
      h("tbody", {}, ...hardwareRows),
    ),
  );

  if (doc.dropped_optional && doc.dropped_optional.length > 0) {
    children.push(
      h(
        "div",
        { class: "banner banner-info" },
        `dropped optional constraints: ${doc.dropped_optional.join(", ")}`,
      ),
    );
  }

  return h("section", { class: "design-view" }, ...children);
}
