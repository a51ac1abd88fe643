import { ApiClient } from "./api.js";
import { AppStore, MAX_RELAX } from "./store.js";
import { downloadCsv, renderReport, renderTradeoff, renderTree } from "./view.js";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const store = new AppStore(new ApiClient(""));
const collapsed = new Set<number>();

const fileInput = byId<HTMLInputElement>("csv-file");
const treeBox = byId<HTMLElement>("tree");
const beforeBox = byId<HTMLElement>("tree-before");
const slider = byId<HTMLInputElement>("relax");
const relaxValue = byId<HTMLElement>("relax-value");
const addedReadout = byId<HTMLElement>("added");
const chart = byId<HTMLElement>("tradeoff");
const reportBox = byId<HTMLElement>("report");
const commitButton = byId<HTMLButtonElement>("commit");
const status = byId<HTMLElement>("status");

slider.max = String(MAX_RELAX);

fileInput.addEventListener("change", async () => {
  const file = fileInput.files?.[0];
  if (!file) return;
  try {
    await store.loadSession(await file.text());
    status.textContent = "session ready: click leaves to mark them sensitive";
  } catch (error) {
    status.textContent = `upload failed: ${(error as Error).message}`;
  }
});

slider.addEventListener("input", () => {
  store.setRelax(Number(slider.value));
});

commitButton.addEventListener("click", async () => {
  const before = store.state.tree;
  try {
    const csv = await store.commitAndExport();
    downloadCsv("sanitized.csv", csv);
    if (before) {
      beforeBox.parentElement?.classList.remove("hidden");
      renderTree(beforeBox, before, new Set(), () => undefined, new Set());
    }
    status.textContent = "committed; sanitized dataset downloaded";
  } catch (error) {
    status.textContent = `commit failed: ${(error as Error).message}`;
  }
});

store.subscribe((state) => {
  if (state.tree) {
    renderTree(treeBox, state.tree, state.selected, (rule) => store.toggleLeaf(rule), collapsed);
  }
  relaxValue.textContent = String(state.relax);
  slider.value = String(state.relax);
  const total = store.totalAdded;
  addedReadout.textContent = state.previewPending
    ? "…"
    : total === null
      ? "—"
      : `added: ${total}`;
  renderTradeoff(chart, store);
  renderReport(reportBox, state.committed?.report ?? state.preview?.report ?? null);
  commitButton.disabled = !store.commitEnabled;
  if (state.error) status.textContent = state.error;
});
