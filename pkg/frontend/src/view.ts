/**
 * Pure rendering: API data + view state in, HTML strings out.
 *
 * Nothing here touches the network or global document, which keeps every
 * visual rule unit-testable. Interaction wiring (event delegation over the
 * rendered markup) lives in main.ts.
 *
 * Layout notes:
 * - One vertical column per feature; bin 0 sits at the bottom, the top bin
 *   at the top, each bin an equal-height slot shaded by the histogram
 *   opacity for the active condition.
 * - The instance marker is placed on the continuous value: its z-score is
 *   mapped piecewise-linearly within the slot of its bin, with the open
 *   extreme bins treated as one interior-width wide. Markers therefore
 *   clamp to [-2 - w_z, 2 + w_z] where w_z = 4 / (n_bins - 2).
 * - Counterfactual arrows stack one arrowhead per bin step, green when the
 *   suggestion moves a negative instance toward positive, red for the
 *   reverse.
 */

import type {
  DistributionsResponse,
  ExplainResponse,
  FeatureChange,
  InstanceSummary,
  MetaResponse,
} from './types.js';
import type { ViewState } from './state.js';
import { displayOrder } from './state.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

/** Compact numeric display; full precision goes in the title attribute. */
export function fmtValue(v: number): string {
  if (Number.isInteger(v)) return String(v);
  const s = v.toPrecision(6);
  return s.includes('.') ? s.replace(/0+$/, '').replace(/\.$/, '') : s;
}

/**
 * Vertical marker position as a fraction of column height in [0, 1].
 *
 * `bin` is the server-assigned bin of the value and `z` its z-score; the
 * fraction interpolates within that bin's slot so the marker reflects the
 * continuous value, not just its bin.
 */
export function markerFraction(z: number, bin: number, nBins: number): number {
  const wz = 4 / (nBins - 2);
  const zlo = bin === 0 ? -2 - wz : -2 + (bin - 1) * wz;
  const within = Math.min(1, Math.max(0, (z - zlo) / wz));
  return (bin + within) / nBins;
}

function pct(fraction: number): string {
  return `${(fraction * 100).toFixed(2)}%`;
}

export function probabilityBar(summary: InstanceSummary): string {
  const cls = summary.predicted_class;
  return (
    `<div class="prob-bar" data-class="${cls}">` +
    `<div class="prob-fill ${cls}" style="width: ${pct(summary.probability)}"></div>` +
    `<span class="prob-label">${summary.probability_display} ${cls}</span>` +
    `</div>`
  );
}

export function correctnessBadge(summary: InstanceSummary): string {
  return `<span class="badge badge-${summary.correctness}">${summary.correctness}</span>`;
}

export function statusNotice(result: ExplainResponse): string {
  if (result.status === 'FLIPPED') {
    const to = result.direction === 'positive' ? 'negative' : 'positive';
    return (
      `<div class="result-line">flipped to ${to} at ` +
      `${result.final_probability_display} with ${result.changes.length} change(s)</div>`
    );
  }
  const reason =
    result.status === 'CONSTRAINTS_EXHAUSTED'
      ? 'no counterfactual within constraints'
      : result.status === 'LOCAL_OPTIMUM'
        ? 'no single-bin move improves the prediction; no counterfactual found'
        : 'search stopped at the iteration cap without flipping';
  return `<div class="status-notice" data-status="${result.status}">${reason}</div>`;
}

export function errorPanel(message: string): string {
  return `<div class="error-panel">request failed: ${escapeHtml(message)}</div>`;
}

function arrowheads(change: FeatureChange, nBins: number, green: boolean): string {
  const up = change.to_bin > change.from_bin;
  const color = green ? 'green' : 'red';
  const glyph = up ? '▲' : '▼';
  const step = up ? 1 : -1;
  const parts: string[] = [];
  for (let b = change.from_bin + step; b !== change.to_bin + step; b += step) {
    const center = (b + 0.5) / nBins;
    parts.push(
      `<span class="arrow ${up ? 'up' : 'down'} ${color}" style="bottom: ${pct(center)}"` +
        ` data-feature="${escapeHtml(change.feature)}">${glyph}</span>`,
    );
  }
  return parts.join('');
}

export interface ColumnData {
  feature: string;
  value: number;
  bin: number;
  z: number;
  opacities: number[];
  locked: boolean;
  change: FeatureChange | null;
  greenArrows: boolean;
}

export function featureColumn(col: ColumnData, nBins: number): string {
  const name = escapeHtml(col.feature);
  // a locked feature never shows a suggestion, whatever the payload says
  const change = col.locked ? null : col.change;
  const slots: string[] = [];
  for (let b = nBins - 1; b >= 0; b--) {
    const opacity = col.opacities[b] ?? 0;
    slots.push(`<div class="bin"><div class="shade" style="opacity: ${opacity}"></div></div>`);
  }
  const marker = `<div class="marker" style="bottom: ${pct(markerFraction(col.z, col.bin, nBins))}"></div>`;
  const arrows = change === null ? '' : arrowheads(change, nBins, col.greenArrows);
  const suggested =
    change === null
      ? ''
      : `<div class="value suggested" title="${change.to_value}">→ ${fmtValue(change.to_value)}</div>`;
  return (
    `<div class="column" data-feature="${name}">` +
    `<button class="lock" data-feature="${name}" data-locked="${col.locked}" ` +
    `aria-label="${col.locked ? 'unlock' : 'lock'} ${name}">${col.locked ? '\u{1f512}' : '\u{1f513}'}</button>` +
    `<div class="fname" title="${name}">${name}</div>` +
    `<div class="bins">${slots.join('')}${marker}${arrows}</div>` +
    `<div class="value current" title="${col.value}">${fmtValue(col.value)}</div>` +
    suggested +
    `</div>`
  );
}

export function renderColumns(
  summary: InstanceSummary,
  result: ExplainResponse | null,
  histogram: DistributionsResponse,
  state: ViewState,
  featureNames: string[],
): string {
  const nBins = histogram.n_bins;
  const byFeature = new Map<string, FeatureChange>();
  if (result !== null) {
    for (const c of result.changes) byFeature.set(c.feature, c);
  }
  const green = result !== null && result.direction === 'negative';
  const order = displayOrder(summary, state.sortEnabled);
  const columns = order.map((f) => {
    const feature = featureNames[f] ?? `feature ${f}`;
    return featureColumn(
      {
        feature,
        value: summary.values[f] ?? NaN,
        bin: summary.bins[f] ?? 0,
        z: summary.z_scores[f] ?? 0,
        opacities: histogram.features[f]?.opacities ?? [],
        locked: state.locks.has(feature),
        change: byFeature.get(feature) ?? null,
        greenArrows: green,
      },
      nBins,
    );
  });
  return `<div class="columns">${columns.join('')}</div>`;
}

export function renderHeader(
  meta: MetaResponse,
  summary: InstanceSummary,
  state: ViewState,
): string {
  const conditions = (['all', 'positive', 'negative'] as const)
    .map(
      (c) =>
        `<option value="${c}"${c === state.distributionCondition ? ' selected' : ''}>${c}</option>`,
    )
    .join('');
  return (
    `<header class="toolbar">` +
    `<div class="nav">` +
    `<button id="prev-instance" aria-label="previous instance">←</button>` +
    `<input id="instance-input" type="number" min="0" max="${meta.n_rows - 1}" value="${state.instanceIndex}">` +
    `<span class="nav-total">of ${meta.n_rows}</span>` +
    `<button id="next-instance" aria-label="next instance">→</button>` +
    `</div>` +
    probabilityBar(summary) +
    correctnessBadge(summary) +
    `<div class="controls">` +
    `<button id="sort-toggle" data-enabled="${state.sortEnabled}">sort by |z|</button>` +
    `<select id="condition-select" aria-label="distribution condition">${conditions}</select>` +
    `<button id="regenerate">regenerate explanation</button>` +
    `</div>` +
    `</header>`
  );
}

export function renderApp(
  meta: MetaResponse,
  summary: InstanceSummary,
  result: ExplainResponse | null,
  histogram: DistributionsResponse,
  state: ViewState,
  errorMessage: string | null,
): string {
  return (
    renderHeader(meta, summary, state) +
    (errorMessage !== null ? errorPanel(errorMessage) : '') +
    (result !== null ? statusNotice(result) : '') +
    renderColumns(summary, result, histogram, state, meta.feature_names)
  );
}
