/**
 * Wire types for the binflip HTTP API (schema_version 1).
 *
 * Field names and shapes mirror the server's canonical JSON exactly; do not
 * rename members here without a schema version bump on the service side.
 */

export type ClassName = 'positive' | 'negative';
export type Correctness = 'TP' | 'FP' | 'TN' | 'FN' | 'UNKNOWN';
export type Condition = 'all' | 'positive' | 'negative';
export type SearchStatus =
  | 'FLIPPED'
  | 'LOCAL_OPTIMUM'
  | 'CONSTRAINTS_EXHAUSTED'
  | 'MAX_ITERATIONS';

export interface ModelMetrics {
  accuracy: number;
  tp: number;
  fp: number;
  tn: number;
  fn: number;
}

export interface MetaResponse {
  schema_version: number;
  feature_names: string[];
  n_bins: number;
  w: number;
  l: number;
  initial_locks: string[];
  n_rows: number;
  model_metrics: ModelMetrics | null;
}

export interface InstanceRow {
  index: number;
  probability: number;
  probability_display: string;
  predicted_class: ClassName;
  correctness: Correctness;
}

export interface InstancesResponse {
  schema_version: number;
  total: number;
  offset: number;
  limit: number;
  instances: InstanceRow[];
}

export interface InstanceSummary {
  schema_version: number;
  index: number;
  values: number[];
  bins: number[];
  z_scores: number[];
  probability: number;
  probability_display: string;
  predicted_class: ClassName;
  correctness: Correctness;
  sorted_order: number[];
}

export interface FeatureChange {
  feature: string;
  from_value: number;
  from_bin: number;
  to_bin: number;
  to_value: number;
}

export interface TraceMove {
  feature: string;
  from_bin: number;
  to_bin: number;
  new_value: number;
  probability_after: number;
}

export interface ExplainResponse {
  schema_version: number;
  status: SearchStatus;
  direction: ClassName;
  original_probability: number;
  original_probability_display: string;
  final_probability: number;
  final_probability_display: string;
  changes: FeatureChange[];
  trace: TraceMove[];
  instance_index: number;
  locks: string[];
  w: number;
  l: number;
}

export interface FeatureHistogram {
  feature: string;
  counts: number[];
  opacities: number[];
}

export interface DistributionsResponse {
  schema_version: number;
  condition: Condition;
  n_bins: number;
  features: FeatureHistogram[];
}

export interface ApiErrorBody {
  schema_version: number;
  error: { code: string; message: string };
}
