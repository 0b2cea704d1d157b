/**
 * Client-side view state and its pure transitions.
 *
 * The server is stateless per request, so everything the toggles control
 * lives here: the selected instance, the full lock set (sent verbatim with
 * every explain call), the sort switch, and the distribution condition.
 */

import type { Condition, ExplainResponse, InstanceSummary } from './types.js';

/** Hard display ceiling; beyond this the view keeps the top |z| features. */
export const MAX_COLUMNS = 30;

export interface ViewState {
  instanceIndex: number;
  locks: Set<string>;
  sortEnabled: boolean;
  distributionCondition: Condition;
  lastResult: ExplainResponse | null;
}

export function initialState(instanceIndex: number, initialLocks: string[]): ViewState {
  return {
    instanceIndex,
    locks: new Set(initialLocks),
    sortEnabled: false,
    distributionCondition: 'all',
    lastResult: null,
  };
}

export function toggleLock(state: ViewState, feature: string): ViewState {
  const locks = new Set(state.locks);
  if (locks.has(feature)) {
    locks.delete(feature);
  } else {
    locks.add(feature);
  }
  return { ...state, locks };
}

export function toggleSort(state: ViewState): ViewState {
  return { ...state, sortEnabled: !state.sortEnabled };
}

export function setCondition(state: ViewState, condition: Condition): ViewState {
  return { ...state, distributionCondition: condition };
}

export function setInstance(state: ViewState, instanceIndex: number): ViewState {
  return { ...state, instanceIndex, lastResult: null };
}

export function setResult(state: ViewState, result: ExplainResponse): ViewState {
  return { ...state, lastResult: result };
}

/**
 * Feature indices in display order: the summary's |z| ordering when sort is
 * on, natural column order otherwise. Either way the list is capped at
 * MAX_COLUMNS, keeping the features with the largest |z| so the most
 * informative columns survive the cut.
 */
export function displayOrder(summary: InstanceSummary, sortEnabled: boolean): number[] {
  const n = summary.z_scores.length;
  let kept: Set<number> | null = null;
  if (n > MAX_COLUMNS) {
    kept = new Set(summary.sorted_order.slice(0, MAX_COLUMNS));
  }
  const order = sortEnabled
    ? summary.sorted_order
    : Array.from({ length: n }, (_, i) => i);
  return kept === null ? order.slice() : order.filter((i) => kept.has(i));
}
