import { AppStore, MAX_RELAX } from "./store.js";
import { layoutTree } from "./treeLayout.js";
import type { ReportDoc, TreeDoc } from "./types.js";

// DOM rendering only; every number shown is read straight off the store's
// last service response.

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderTree(
  container: HTMLElement,
  doc: TreeDoc,
  selected: ReadonlySet<string>,
  onToggle: (rule: string) => void,
  collapsed: Set<number>,
): void {
  container.textContent = "";
  for (const row of layoutTree(doc, selected, collapsed)) {
    const line = el("div", row.isLeaf ? "node leaf" : "node split");
    line.style.paddingLeft = `${row.depth * 22}px`;
    if (row.hasChildren) {
      const toggle = el("span", "fold", collapsed.has(row.id) ? "+" : "−");
      toggle.addEventListener("click", () => {
        if (!collapsed.delete(row.id)) collapsed.add(row.id);
        renderTree(container, doc, selected, onToggle, collapsed);
      });
      line.append(toggle);
    }
    if (row.edge) line.append(el("span", "edge", row.edge + " →"));
    line.append(el("span", "label", row.label));
    line.append(el("span", "badge", row.badge));
    if (row.isLeaf && row.rule) {
      const rule = row.rule;
      line.classList.toggle("selected", row.selected);
      if (row.sideEffect) line.append(el("span", "side-effect", "hidden as side effect"));
      line.addEventListener("click", () => onToggle(rule));
      line.title = rule;
    }
    container.append(line);
  }
}

export function renderTradeoff(container: HTMLElement, store: AppStore): void {
  container.textContent = "";
  const series = store.tradeoffSeries;
  const max = Math.max(1, ...series.map((point) => point.totalAdded));
  for (let relax = 0; relax <= MAX_RELAX; relax += 1) {
    const point = series.find((p) => p.relax === relax);
    const bar = el("div", "bar");
    const fill = el("div", "fill");
    fill.style.height = point ? `${Math.round((point.totalAdded / max) * 100)}%` : "0";
    bar.append(fill);
    bar.append(el("div", "bar-label", point ? `${point.totalAdded}` : "·"));
    bar.append(el("div", "bar-x", `d=${relax}`));
    if (relax === store.state.relax) bar.classList.add("current");
    container.append(bar);
  }
}

export function renderReport(container: HTMLElement, report: ReportDoc | null): void {
  container.textContent = "";
  if (!report) return;
  const list = el("div", "report");
  for (const [rule, hidden] of Object.entries(report.hidden)) {
    list.append(el("div", hidden ? "ok" : "bad", `${hidden ? "hidden" : "STILL VISIBLE"}  ${rule}`));
  }
  for (const rule of report.side_effects) {
    list.append(el("div", "ok", `hidden as side effect  ${rule}`));
  }
  const table = el("table");
  const head = el("tr");
  for (const title of ["node", "target", "achieved", "exact", "entropy Δ"]) {
    head.append(el("th", undefined, title));
  }
  table.append(head);
  for (const node of report.nodes) {
    const tr = el("tr");
    tr.append(el("td", undefined, String(node.node)));
    tr.append(el("td", undefined, node.target));
    tr.append(el("td", undefined, `${node.achieved[0]}p/${node.achieved[1]}n`));
    tr.append(el("td", undefined, node.exact ? "yes" : "no"));
    tr.append(el("td", undefined, node.entropy_delta.toExponential(2)));
    table.append(tr);
  }
  list.append(table);
  list.append(el("div", "totals", `added instances: ${report.total_added}`));
  list.append(
    el(
      "div",
      "totals",
      `similarity ${report.syntactic_similarity.toFixed(4)} · agreement ${report.semantic_agreement.toFixed(4)}`,
    ),
  );
  for (const warning of report.warnings) {
    list.append(el("div", "warn", warning));
  }
  container.append(list);
}

export function downloadCsv(filename: string, text: string): void {
  const blob = new Blob([text], { type: "text/csv" });
  const url = URL.createObjectURL(blob);
  const anchor = el("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}
