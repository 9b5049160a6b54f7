/** A minimal virtual node layer: render functions stay pure and testable,
 * and the browser entry point materializes real elements from the tree. */

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: (VNode | string)[];
  handlers: Record<string, () => void>;
}

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  ...children: (VNode | string | null | undefined)[]
): VNode {
  return {
    tag,
    attrs,
    children: children.filter((c): c is VNode | string => c !== null && c !== undefined),
    handlers: {},
  };
}

export function on(node: VNode, event: string, handler: () => void): VNode {
  node.handlers[event] = handler;
  return node;
}

export function textOf(node: VNode | string): string {
  if (typeof node === "string") return node;
  return node.children.map(textOf).join("");
}

/** Depth-first search by tag and/or class attribute. */
export function select(root: VNode, tag?: string, className?: string): VNode[] {
  const out: VNode[] = [];
  const visit = (node: VNode | string) => {
    if (typeof node === "string") return;
    const classes = (node.attrs["class"] ?? "").split(/\s+/);
    if ((!tag || node.tag === tag) && (!className || classes.includes(className))) {
      out.push(node);
    }
    node.children.forEach(visit);
  };
  visit(root);
  return out;
}

export function mount(node: VNode, parent: Element): Element {
  const el = document.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    el.setAttribute(key, value);
  }
  for (const [event, handler] of Object.entries(node.handlers)) {
    el.addEventListener(event, handler);
  }
  for (const child of node.children) {
    if (typeof child === "string") {
      el.appendChild(document.createTextNode(child));
    } else {
      mount(child, el);
    }
  }
  parent.appendChild(el);
  return el;
}
