import { describe, expect, it } from 'vitest';

import { initialState, setResult, toggleLock, toggleSort } from '../src/state.js';
import {
  errorPanel,
  fmtValue,
  markerFraction,
  probabilityBar,
  renderApp,
  renderColumns,
  statusNotice,
} from '../src/view.js';
import {
  N_BINS,
  intoDom,
  makeHistogram,
  makeMeta,
  makeResult,
  makeSummary,
} from './fixtures.js';

const NAMES = ['feature0', 'feature1', 'feature2'];

describe('probability bar', () => {
  it('fills to the probability and colors by predicted class', () => {
    const negative = intoDom(probabilityBar(makeSummary(3)));
    const fill = negative.querySelector<HTMLElement>('.prob-fill');
    expect(fill?.classList.contains('negative')).toBe(true);
    expect(fill?.style.width).toBe('25.00%');
    expect(negative.querySelector('.prob-label')?.textContent).toBe('0.2500 negative');

    const positive = intoDom(
      probabilityBar(
        makeSummary(3, {
          probability: 0.82,
          probability_display: '0.8200',
          predicted_class: 'positive',
          correctness: 'TP',
        }),
      ),
    );
    expect(positive.querySelector('.prob-fill')?.classList.contains('positive')).toBe(true);
  });
});

describe('status notice', () => {
  it('announces a missing counterfactual when constraints are exhausted', () => {
    const dom = intoDom(statusNotice(makeResult({ status: 'CONSTRAINTS_EXHAUSTED', changes: [] })));
    const notice = dom.querySelector('.status-notice');
    expect(notice?.textContent).toContain('no counterfactual within constraints');
  });

  it('summarizes a flip', () => {
    const dom = intoDom(statusNotice(makeResult()));
    expect(dom.querySelector('.result-line')?.textContent).toContain('flipped to positive');
  });
});

describe('feature columns', () => {
  it('draws one green arrowhead per upward bin step for a negative instance', () => {
    const state = initialState(0, []);
    const result = makeResult({
      changes: [
        { feature: 'feature1', from_value: 0.0, from_bin: 4, to_bin: 6, to_value: 1.25 },
      ],
    });
    const dom = intoDom(
      renderColumns(makeSummary(3, { bins: [5, 4, 5] }), result, makeHistogram(NAMES), state, NAMES),
    );
    const arrows = dom.querySelectorAll('.arrow');
    expect(arrows).toHaveLength(2);
    for (const arrow of arrows) {
      expect(arrow.classList.contains('up')).toBe(true);
      expect(arrow.classList.contains('green')).toBe(true);
      expect(arrow.getAttribute('data-feature')).toBe('feature1');
    }
    const column = dom.querySelector('.column[data-feature="feature1"]');
    expect(column?.querySelector('.value.current')?.textContent).toBe('0');
    expect(column?.querySelector('.value.suggested')?.textContent).toContain('1.25');
  });

  it('draws red downward arrowheads for a positive instance, one per step', () => {
    const state = initialState(0, []);
    const result = makeResult({
      direction: 'positive',
      changes: [
        { feature: 'feature0', from_value: 2.0, from_bin: 8, to_bin: 5, to_value: 0.4 },
      ],
    });
    const summary = makeSummary(3, { predicted_class: 'positive', bins: [8, 5, 5] });
    const dom = intoDom(renderColumns(summary, result, makeHistogram(NAMES), state, NAMES));
    const arrows = dom.querySelectorAll('.arrow.down.red');
    expect(arrows).toHaveLength(3);
  });

  it('shows no arrows when nothing changed', () => {
    const state = initialState(0, []);
    const result = makeResult({ status: 'CONSTRAINTS_EXHAUSTED', changes: [] });
    const dom = intoDom(renderColumns(makeSummary(3), result, makeHistogram(NAMES), state, NAMES));
    expect(dom.querySelectorAll('.arrow')).toHaveLength(0);
    expect(dom.querySelectorAll('.value.suggested')).toHaveLength(0);
  });

  it('never shows a suggestion on a locked column, whatever the payload says', () => {
    const state = toggleLock(initialState(0, []), 'feature1');
    const result = makeResult({
      changes: [
        { feature: 'feature1', from_value: 0.0, from_bin: 4, to_bin: 6, to_value: 1.25 },
      ],
    });
    const dom = intoDom(renderColumns(makeSummary(3), result, makeHistogram(NAMES), state, NAMES));
    expect(dom.querySelectorAll('.arrow')).toHaveLength(0);
    expect(dom.querySelector('.column[data-feature="feature1"] .value.suggested')).toBeNull();
    expect(
      dom.querySelector('.lock[data-feature="feature1"]')?.getAttribute('data-locked'),
    ).toBe('true');
  });

  it('orders columns by |z| when sorting is on', () => {
    const summary = makeSummary(3, { z_scores: [0.1, -2.0, 1.0], sorted_order: [1, 2, 0] });
    const state = toggleSort(initialState(0, []));
    const dom = intoDom(renderColumns(summary, null, makeHistogram(NAMES), state, NAMES));
    const order = [...dom.querySelectorAll('.column')].map((c) => c.getAttribute('data-feature'));
    expect(order).toEqual(['feature1', 'feature2', 'feature0']);
  });

  it('shades each bin with the histogram opacity, top bin first', () => {
    const state = initialState(0, []);
    const dom = intoDom(renderColumns(makeSummary(3), null, makeHistogram(NAMES), state, NAMES));
    const shades = dom.querySelectorAll<HTMLElement>('.column[data-feature="feature0"] .shade');
    expect(shades).toHaveLength(N_BINS);
    // fixture opacity for bin b is b/9; DOM order is bin 9 down to bin 0
    expect(shades[0]?.style.opacity).toBe('1');
    expect(shades[N_BINS - 1]?.style.opacity).toBe('0');
  });
});

describe('marker placement', () => {
  it('maps z through the bin slots piecewise linearly', () => {
    // z = 0 in bin 5 of 10 sits exactly mid-column
    expect(markerFraction(0, 5, N_BINS)).toBeCloseTo(0.5, 12);
    // bottom of bin 1 is the -2 sigma cut
    expect(markerFraction(-2, 1, N_BINS)).toBeCloseTo(0.1, 12);
    // far outliers clamp inside the open extreme bins
    expect(markerFraction(-50, 0, N_BINS)).toBe(0);
    expect(markerFraction(50, N_BINS - 1, N_BINS)).toBe(1);
  });
});

describe('full app rendering', () => {
  it('renders header, notice, and columns together', () => {
    const meta = makeMeta(NAMES);
    const summary = makeSummary(3);
    const state = setResult(initialState(0, []), makeResult());
    const dom = intoDom(
      renderApp(meta, summary, state.lastResult, makeHistogram(NAMES), state, null),
    );
    expect(dom.querySelector('.toolbar')).not.toBeNull();
    expect(dom.querySelector('#regenerate')).not.toBeNull();
    expect(dom.querySelectorAll('.column')).toHaveLength(3);
    expect(dom.querySelector('.badge')?.textContent).toBe('TN');
    expect(dom.querySelector('.error-panel')).toBeNull();
  });

  it('keeps the columns visible under an error panel', () => {
    const meta = makeMeta(NAMES);
    const dom = intoDom(
      renderApp(meta, makeSummary(3), null, makeHistogram(NAMES), initialState(0, []), 'boom'),
    );
    expect(dom.querySelector('.error-panel')?.textContent).toContain('boom');
    expect(dom.querySelectorAll('.column')).toHaveLength(3);
  });

  it('escapes error text', () => {
    const dom = intoDom(errorPanel('<script>alert(1)</script>'));
    expect(dom.querySelector('script')).toBeNull();
    expect(dom.querySelector('.error-panel')?.textContent).toContain('<script>');
  });
});

describe('numeric display', () => {
  it('prints integers bare and trims float noise', () => {
    expect(fmtValue(3)).toBe('3');
    expect(fmtValue(89.9792653536148)).toBe('89.9793');
    expect(fmtValue(0.25)).toBe('0.25');
  });
});
