/** Hand-built API payloads for the pure rendering tests. */

import type {
  DistributionsResponse,
  ExplainResponse,
  InstanceSummary,
  MetaResponse,
} from '../src/types.js';

export const N_BINS = 10;

export function makeMeta(featureNames: string[], overrides: Partial<MetaResponse> = {}): MetaResponse {
  return {
    schema_version: 1,
    feature_names: featureNames,
    n_bins: N_BINS,
    w: 5,
    l: 5,
    initial_locks: [],
    n_rows: 100,
    model_metrics: { accuracy: 0.9, tp: 40, fp: 5, tn: 50, fn: 5 },
    ...overrides,
  };
}

export function makeSummary(
  featureCount: number,
  overrides: Partial<InstanceSummary> = {},
): InstanceSummary {
  const zeros = Array.from({ length: featureCount }, () => 0);
  return {
    schema_version: 1,
    index: 0,
    values: zeros.slice(),
    bins: Array.from({ length: featureCount }, () => 5),
    z_scores: zeros.slice(),
    probability: 0.25,
    probability_display: '0.2500',
    predicted_class: 'negative',
    correctness: 'TN',
    sorted_order: Array.from({ length: featureCount }, (_, i) => i),
    ...overrides,
  };
}

export function makeHistogram(
  featureNames: string[],
  overrides: Partial<DistributionsResponse> = {},
): DistributionsResponse {
  return {
    schema_version: 1,
    condition: 'all',
    n_bins: N_BINS,
    features: featureNames.map((feature) => ({
      feature,
      counts: Array.from({ length: N_BINS }, () => 1),
      opacities: Array.from({ length: N_BINS }, (_, b) => b / (N_BINS - 1)),
    })),
    ...overrides,
  };
}

export function makeResult(overrides: Partial<ExplainResponse> = {}): ExplainResponse {
  return {
    schema_version: 1,
    status: 'FLIPPED',
    direction: 'negative',
    original_probability: 0.25,
    original_probability_display: '0.2500',
    final_probability: 0.61,
    final_probability_display: '0.6100',
    changes: [],
    trace: [],
    instance_index: 0,
    locks: [],
    w: 5,
    l: 5,
    ...overrides,
  };
}

/** Render an HTML string into a detached element for querying. */
export function intoDom(html: string): HTMLElement {
  const host = document.createElement('div');
  host.innerHTML = html;
  return host;
}
