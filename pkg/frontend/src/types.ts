// Shapes of the service's JSON responses.  The client never derives numbers
// itself: everything rendered comes verbatim from these payloads.

export interface TreeNodeDoc {
  id: number;
  p: number;
  n: number;
  kind: "split" | "leaf";
  attribute?: string;
  class?: "p" | "n";
  children?: [TreeNodeDoc, TreeNodeDoc];
}

export interface TreeDoc {
  schema: string[];
  root: TreeNodeDoc;
}

export interface SessionInfo {
  session: string;
  dataset_hash: string;
  tree: TreeDoc;
  rules: string[];
}

export interface TreeResponse {
  dataset_hash: string;
  tree: TreeDoc;
  rules: string[];
}

export interface PlanNodeDoc {
  node: number;
  target: string;
  post_swap: [number, number];
  equation: { a: number; b: number; c: number };
  cumulative: [number, number];
  local: [number, number];
  relaxed_from: string | null;
  synthetic_rows: [number, number];
}

export interface PlanDoc {
  requests: string[];
  swapped_indices: number[];
  nodes: PlanNodeDoc[];
  total_added: number;
  warnings: string[];
  side_effects: string[];
}

export interface ReportNodeDoc {
  node: number;
  target: string;
  achieved: [number, number];
  exact: boolean;
  entropy_delta: number;
  gain_delta: number;
  added: [number, number];
}

export interface ReportDoc {
  hidden: Record<string, boolean>;
  all_hidden: boolean;
  side_effects: string[];
  nodes: ReportNodeDoc[];
  total_added: number;
  syntactic_similarity: number;
  semantic_agreement: number;
  warnings: string[];
}

export interface PreviewResponse {
  dataset_hash: string;
  plan: PlanDoc;
  report: ReportDoc;
}

export interface ServiceErrorBody {
  code: string;
  message: string;
  node_id?: number;
}
