/** Service document shapes. The UI renders these verbatim and computes no
 * domain results of its own. */

export interface DesignDoc {
  "kepler-spec": number;
  systems: Record<string, Record<string, string>>;
  hardware: Record<string, string>;
  total_cost: number;
  ledgers: Record<
    string,
    Record<string, { capacity: number; consumed: number; breakdown: Record<string, number> }>
  >;
  warnings: { source: string; text: string }[];
  dropped_optional: string[];
  objectives: {
    priority: number;
    target: string;
    achieved: number;
    rank_vector: Record<string, { system: string; rank: number }>;
  }[];
}

export interface OptimizeEntry {
  target: "TOTAL_COST" | { workload: string; objective: string };
  priority: number;
}

export interface QueryDoc {
  "kepler-spec": number;
  topology: unknown;
  workloads: { id: string; [key: string]: unknown }[];
  optimize: OptimizeEntry[];
  constraints: unknown[];
  pins: Record<string, string>;
  excluded_hardware: string[];
  excluded_systems: string[];
}

export interface ConflictAtomDoc {
  id: string;
  clause: string;
  categories: string[];
  label?: string;
  origin: Record<string, string>;
}

export interface TradeoffDoc {
  objective: string;
  priority: number;
  old_value: number;
  new_value: number;
  worsened: boolean;
  old_vector: Record<string, { system: string; rank: number }>;
  new_vector: Record<string, { system: string; rank: number }>;
}

export interface ExplainDoc {
  "kepler-spec": number;
  outcome: "ALTERNATIVE" | "CONFLICT" | "ALREADY_OPTIMAL";
  request: {
    workload: string;
    role: string;
    preferred: string;
    objective: string;
    flexible: string[];
  };
  ordering_consulted: string;
  dominators: string[];
  categories?: string[];
  atoms?: ConflictAtomDoc[];
  alternative?: DesignDoc;
  tradeoffs?: TradeoffDoc[];
  rendered?: string;
}

export interface ExplainRequestBody {
  workload: string;
  role: string;
  prefer: string;
  objective: string;
  flexible?: string[];
}

export interface ServiceErrorBody {
  code: string;
  message: string;
  details: string[];
}
