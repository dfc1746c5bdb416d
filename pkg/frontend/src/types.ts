// Shapes of the JSON payloads the server sends and receives.

export interface CsState {
  id: number;
  predicate: string;
}

export interface CounterStrategy {
  states: CsState[];
  edges: [number, number][];
  initial: number;
}

export interface NodeJson {
  id: string;
  parent: string | null;
  formulas: string[];
  realizable: boolean;
  consistent: boolean;
  via: string;
  children: string[];
  counterstrategy: CounterStrategy | null;
}

export interface TreeJson {
  id: string;
  current: string;
  nodes: NodeJson[];
}

export interface SessionCreated {
  id: string;
  realizable: boolean;
  vacuous: boolean;
  consistent: boolean;
  node: NodeJson;
}

export interface CandidateJson {
  index: number;
  formula: string;
  consistent: boolean;
}

export interface SearchReportJson {
  alpha: number;
  mode: string;
  refinements: string[][];
  counterstrategies_processed: number;
  candidates_generated: number;
  inconsistent_nodes: number;
  candidate_time_ms: number;
  total_time_ms: number;
}

export interface AutoResult {
  report: SearchReportJson;
  leaves: string[];
  current: string;
}

/**
 * Projection subsets for the four candidate shapes.  undefined means
 * every environment variable; an empty array switches the shape off.
 */
export interface Subsets {
  p1?: string[];
  p2?: string[];
  p3?: string[];
  p4?: string[];
}
