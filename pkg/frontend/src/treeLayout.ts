import type { TreeDoc, TreeNodeDoc } from "./types.js";

// The rule grammar must match the service exactly: leaf selections are sent
// back as these strings.
export function ruleOf(steps: Array<[string, 0 | 1]>, leafClass: "p" | "n"): string {
  if (steps.length === 0) return `* => ${leafClass}`;
  const chain = steps.map(([attribute, branch]) => `${attribute}=${branch}`).join(",");
  return `${chain} => ${leafClass}`;
}

export interface TreeRow {
  id: number;
  depth: number;
  /** branch label on the edge from the parent, e.g. "a3=1" */
  edge: string;
  /** split attribute, or "leaf p"/"leaf n" */
  label: string;
  badge: string; // "541p : 459n"
  isLeaf: boolean;
  rule?: string; // leaves only
  selected: boolean;
  /** sibling of a selected leaf: its rule disappears with the same collapse */
  sideEffect: boolean;
  collapsed: boolean;
  hasChildren: boolean;
}

/**
 * Flatten the tree document for a top-down indented view.  Pure: selection
 * and collapse state come in, display rows come out.
 */
export function layoutTree(
  doc: TreeDoc,
  selected: ReadonlySet<string>,
  collapsedIds: ReadonlySet<number> = new Set(),
): TreeRow[] {
  const rows: TreeRow[] = [];

  const walk = (
    node: TreeNodeDoc,
    depth: number,
    edge: string,
    steps: Array<[string, 0 | 1]>,
    siblingSelected: boolean,
  ): void => {
    const isLeaf = node.kind === "leaf";
    const rule = isLeaf ? ruleOf(steps, node.class ?? "p") : undefined;
    const isSelected = rule !== undefined && selected.has(rule);
    rows.push({
      id: node.id,
      depth,
      edge,
      label: isLeaf ? `leaf ${node.class}` : `split ${node.attribute}`,
      badge: `${node.p}p : ${node.n}n`,
      isLeaf,
      rule,
      selected: isSelected,
      sideEffect: isLeaf && !isSelected && siblingSelected,
      collapsed: collapsedIds.has(node.id),
      hasChildren: !isLeaf,
    });
    if (isLeaf || collapsedIds.has(node.id) || !node.children) return;
    const [left, right] = node.children;
    const attribute = node.attribute ?? "?";
    const leafRule = (child: TreeNodeDoc, branch: 0 | 1): string | null =>
      child.kind === "leaf"
        ? ruleOf([...steps, [attribute, branch]], child.class ?? "p")
        : null;
    const leftRule = leafRule(left, 0);
    const rightRule = leafRule(right, 1);
    walk(
      left,
      depth + 1,
      `${attribute}=0`,
      [...steps, [attribute, 0]],
      rightRule !== null && selected.has(rightRule),
    );
    walk(
      right,
      depth + 1,
      `${attribute}=1`,
      [...steps, [attribute, 1]],
      leftRule !== null && selected.has(leftRule),
    );
  };

  walk(doc.root, 0, "", [], false);
  return rows;
}

/** All leaf rules of the tree in display order. */
export function leafRules(doc: TreeDoc): string[] {
  return layoutTree(doc, new Set())
    .filter((row) => row.rule !== undefined)
    .map((row) => row.rule as string);
}
