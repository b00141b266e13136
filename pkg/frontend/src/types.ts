export interface FeatureSpec {
  name: string;
  mutable: boolean;
  direction: 'free' | 'down_only' | 'up_only';
  likelihood: 'count' | 'positive_continuous' | 'real';
  lower: number | null;
  upper: number | null;
}

export interface Anchors {
  min: number;
  p25: number;
  p50: number;
  p75: number;
  max: number;
}

export interface SchemaResponse {
  features: FeatureSpec[];
  label: string;
  anchors: Record<string, Anchors>;
  base_id: string;
}

export interface ScoreEntry {
  id: string;
  score: number;
  decision: 1 | -1;
  holdout_accuracy: number | null;
}

export interface ScoreResponse {
  scores: ScoreEntry[];
}

export interface RecourseResult {
  found: boolean;
  x: number[];
  x_cf: number[];
  action: number[];
  validity: Record<string, number>;
  method: string;
  evaluations_used: number;
  norm_cost: number;
  latent_code?: number[];
}

export interface CostReport {
  cost_total: number;
  cost_max: number;
  norm_cost: number;
}

export interface RecourseResponse {
  result: RecourseResult;
  costs: CostReport | null;
}

export interface RecourseRequestBody {
  x: number[];
  method: string;
  targets: string[];
  objective?: string;
  seed: number;
}

export type SessionEventType =
  | 'edit'
  | 'undo'
  | 'select_targets'
  | 'rescore'
  | 'recourse'
  | 'apply';

export interface SessionEvent {
  type: SessionEventType;
  payload: Record<string, unknown>;
  ts: number;
}

export interface SessionLog {
  initial_x: number[];
  events: SessionEvent[];
}
