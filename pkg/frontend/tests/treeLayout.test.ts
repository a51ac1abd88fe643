import { describe, expect, it } from "vitest";

import { layoutTree, leafRules, ruleOf } from "../src/treeLayout.js";
import { treeResponse, uploadResponse } from "./fakeService.js";

const SENSITIVE = "a1=1,a2=1,a3=1,a4=1,a5=1 => p";

describe("ruleOf", () => {
  it("formats chains the way the service parses them", () => {
    expect(ruleOf([["a1", 1], ["a2", 0]], "p")).toBe("a1=1,a2=0 => p");
  });

  it("formats the empty path as a wildcard", () => {
    expect(ruleOf([], "n")).toBe("* => n");
  });
});

describe("layoutTree", () => {
  it("reproduces the service's own rule list", () => {
    expect(leafRules(treeResponse.tree)).toEqual(treeResponse.rules);
    expect(treeResponse.rules).toContain(SENSITIVE);
  });

  it("shows every node with its class counts verbatim", () => {
    const rows = layoutTree(treeResponse.tree, new Set());
    const root = rows[0]!;
    expect(root.badge).toBe("541p : 459n");
    expect(root.label).toBe("split a1");
    expect(rows).toHaveLength(11);
  });

  it("marks selected leaves", () => {
    const rows = layoutTree(treeResponse.tree, new Set([SENSITIVE]));
    const selected = rows.filter((row) => row.selected);
    expect(selected).toHaveLength(1);
    expect(selected[0]!.rule).toBe(SENSITIVE);
  });

  it("flags the sibling leaf that the same collapse hides", () => {
    const rows = layoutTree(treeResponse.tree, new Set([SENSITIVE]));
    const flagged = rows.filter((row) => row.sideEffect);
    expect(flagged).toHaveLength(1);
    // the sensitive leaf's sibling sits on the a5=0 branch
    expect(flagged[0]!.rule).toBe("a1=1,a2=1,a3=1,a4=1,a5=0 => n");
  });

  it("stops descending below collapsed nodes", () => {
    const rows = layoutTree(treeResponse.tree, new Set(), new Set([treeResponse.tree.root.id]));
    expect(rows).toHaveLength(1);
    expect(rows[0]!.collapsed).toBe(true);
  });

  it("upload and tree endpoints agree on the tree", () => {
    expect(uploadResponse.tree).toEqual(treeResponse.tree);
  });
});
