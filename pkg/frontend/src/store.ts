import { ApiClient } from "./api.js";
import type { PreviewResponse, SessionInfo, TreeDoc } from "./types.js";

export const PREVIEW_DEBOUNCE_MS = 250;
export const MAX_RELAX = 3;

export interface TradeoffPoint {
  relax: number;
  totalAdded: number;
}

export interface AppState {
  session: string | null;
  datasetHash: string | null;
  tree: TreeDoc | null;
  rules: string[];
  selected: Set<string>;
  relax: number;
  previewPending: boolean;
  preview: PreviewResponse | null;
  /** total-added per relax value, filled by successive previews */
  tradeoff: Map<number, number>;
  committed: PreviewResponse | null;
  exportedCsv: string | null;
  error: string | null;
}

type Listener = (state: AppState) => void;

/**
 * All client state and service traffic.  Debounces preview calls, keeps at
 * most one in flight (latest wins), and derives nothing numeric on its own:
 * every displayed figure is a field of the last service response.
 */
export class AppStore {
  readonly state: AppState = {
    session: null,
    datasetHash: null,
    tree: null,
    rules: [],
    selected: new Set(),
    relax: 0,
    previewPending: false,
    preview: null,
    tradeoff: new Map(),
    committed: null,
    exportedCsv: null,
    error: null,
  };

  private listeners: Listener[] = [];
  private debounceHandle: ReturnType<typeof setTimeout> | null = null;
  private generation = 0;
  private inFlight: AbortController | null = null;

  constructor(private readonly api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  async loadSession(csvText: string): Promise<SessionInfo> {
    const info = await this.api.createSession(csvText);
    this.state.session = info.session;
    this.state.datasetHash = info.dataset_hash;
    this.state.tree = info.tree;
    this.state.rules = info.rules;
    this.state.selected = new Set();
    this.state.preview = null;
    this.state.committed = null;
    this.state.exportedCsv = null;
    this.state.tradeoff = new Map();
    this.state.error = null;
    this.emit();
    return info;
  }

  /** Attach to an existing session (e.g. after a reload). */
  async attachSession(session: string): Promise<void> {
    const doc = await this.api.getTree(session);
    this.state.session = session;
    this.state.datasetHash = doc.dataset_hash;
    this.state.tree = doc.tree;
    this.state.rules = doc.rules;
    this.emit();
  }

  toggleLeaf(rule: string): void {
    if (this.state.selected.has(rule)) {
      this.state.selected.delete(rule);
    } else {
      this.state.selected.add(rule);
    }
    this.state.tradeoff = new Map(); // totals belong to one selection set
    this.state.preview = null;
    this.requestPreview();
    this.emit();
  }

  setRelax(relax: number): void {
    this.state.relax = Math.max(0, Math.min(MAX_RELAX, Math.round(relax)));
    this.requestPreview();
    this.emit();
  }

  get commitEnabled(): boolean {
    return this.state.selected.size > 0 && this.state.preview !== null;
  }

  relaxBody(): { requests: string[]; relax: Record<string, number> } {
    const relax: Record<string, number> = {};
    if (this.state.relax > 0) relax["root"] = this.state.relax;
    return { requests: [...this.state.selected].sort(), relax };
  }

  /** Debounced: slider drags and rapid clicks collapse into one call. */
  requestPreview(): void {
    if (this.debounceHandle !== null) clearTimeout(this.debounceHandle);
    if (this.state.session === null || this.state.selected.size === 0) {
      this.state.preview = null;
      this.state.previewPending = false;
      this.emit();
      return;
    }
    this.state.previewPending = true;
    this.debounceHandle = setTimeout(() => {
      this.debounceHandle = null;
      void this.firePreview();
    }, PREVIEW_DEBOUNCE_MS);
    this.emit();
  }

  private async firePreview(): Promise<void> {
    const session = this.state.session;
    if (session === null) return;
    const generation = ++this.generation;
    this.inFlight?.abort();
    const controller = new AbortController();
    this.inFlight = controller;
    const relaxValue = this.state.relax;
    try {
      const preview = await this.api.preview(session, this.relaxBody(), controller.signal);
      if (generation !== this.generation) return; // a newer request superseded this one
      this.state.preview = preview;
      this.state.datasetHash = preview.dataset_hash;
      this.state.tradeoff.set(relaxValue, preview.plan.total_added);
      this.state.previewPending = false;
      this.state.error = null;
    } catch (error) {
      if (generation !== this.generation) return;
      if ((error as Error).name === "AbortError") return;
      this.state.previewPending = false;
      this.state.error = (error as Error).message;
    }
    this.emit();
  }

  /** The number on the "added instances" readout; null until a preview lands. */
  get totalAdded(): number | null {
    return this.state.preview?.plan.total_added ?? null;
  }

  get tradeoffSeries(): TradeoffPoint[] {
    return [...this.state.tradeoff.entries()]
      .map(([relax, totalAdded]) => ({ relax, totalAdded }))
      .sort((a, b) => a.relax - b.relax);
  }

  async commitAndExport(): Promise<string> {
    const session = this.state.session;
    const hash = this.state.preview?.dataset_hash ?? this.state.datasetHash;
    if (session === null || hash === null || !this.commitEnabled) {
      throw new Error("nothing to commit: select at least one leaf and wait for the preview");
    }
    const committed = await this.api.commit(session, { ...this.relaxBody(), dataset_hash: hash });
    this.state.committed = committed;
    this.state.datasetHash = committed.dataset_hash;
    const csv = await this.api.exportCsv(session);
    this.state.exportedCsv = csv;
    // the session now holds the sanitized dataset; refresh the tree view
    await this.attachSession(session);
    this.emit();
    return csv;
  }
}
