import type { NodeJson, TreeJson } from "./types.js";

function statusOf(node: NodeJson): string {
  if (!node.consistent) {
    return "inconsistent";
  }
  return node.realizable ? "realizable" : "unrealizable";
}

function labelOf(node: NodeJson): string {
  if (node.formulas.length === 0) {
    return "root";
  }
  return node.formulas[node.formulas.length - 1]!;
}

/**
 * Render the session's refinement tree as nested lists.  Clicking a
 * node calls onSelect with its id; the caller decides what that means.
 */
export function renderTree(
  tree: TreeJson,
  onSelect: (id: string) => void,
  doc: Document = document,
): HTMLUListElement {
  const byId = new Map(tree.nodes.map((n) => [n.id, n]));

  const build = (node: NodeJson): HTMLLIElement => {
    const li = doc.createElement("li");
    const row = doc.createElement("div");
    const status = statusOf(node);
    row.className = `tree-node ${status}`;
    if (node.id === tree.current) {
      row.className += " current";
    }
    row.dataset["node"] = node.id;

    const id = doc.createElement("span");
    id.className = "node-id";
    id.textContent = node.id;
    const label = doc.createElement("span");
    label.className = "node-label";
    label.textContent = labelOf(node);
    const badge = doc.createElement("span");
    badge.className = `badge ${status}`;
    badge.textContent = status;
    row.append(id, label, badge);
    if (node.via !== "root") {
      const via = doc.createElement("span");
      via.className = "badge via";
      via.textContent = node.via;
      row.append(via);
    }
    row.addEventListener("click", () => onSelect(node.id));
    li.appendChild(row);

    const children = node.children
      .map((cid) => byId.get(cid))
      .filter((c): c is NodeJson => c !== undefined);
    if (children.length > 0) {
      const ul = doc.createElement("ul");
      for (const child of children) {
        ul.appendChild(build(child));
      }
      li.appendChild(ul);
    }
    return li;
  };

  const root = tree.nodes.find((n) => n.parent === null);
  const ul = doc.createElement("ul");
  ul.className = "tree";
  if (root) {
    ul.appendChild(build(root));
  }
  return ul;
}
