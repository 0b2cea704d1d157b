/**
 * App controller: owns the ViewState, talks to the service, and re-renders
 * on every data or state change.
 *
 * Explain calls are serialized: while one is in flight, further regenerate
 * requests coalesce into a single queued run that fires with the latest
 * state once the current call settles. Lock toggles and the sort switch are
 * client-side until the user explicitly regenerates.
 */

import { ApiError, BinflipClient } from './api.js';
import type {
  Condition,
  DistributionsResponse,
  ExplainResponse,
  InstanceSummary,
  MetaResponse,
} from './types.js';
import {
  initialState,
  setCondition,
  setInstance,
  setResult,
  toggleLock,
  toggleSort,
  type ViewState,
} from './state.js';
import { errorPanel, renderApp } from './view.js';

export class App {
  private state!: ViewState;
  private meta!: MetaResponse;
  private summary!: InstanceSummary;
  private histogram!: DistributionsResponse;
  private errorMessage: string | null = null;
  private explainInFlight = false;
  private explainQueued = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: BinflipClient,
  ) {}

  /** Latest explanation, exposed so tests can observe round-trip completion. */
  get lastResult(): ExplainResponse | null {
    return this.state?.lastResult ?? null;
  }

  async start(): Promise<void> {
    try {
      this.meta = await this.client.getMeta();
      this.state = initialState(0, this.meta.initial_locks);
      this.histogram = await this.client.getDistributions(this.state.distributionCondition);
      this.summary = await this.client.getSummary(this.state.instanceIndex);
    } catch (err) {
      this.root.innerHTML = errorPanel(this.describe(err));
      return;
    }
    this.root.addEventListener('click', (ev) => this.onClick(ev));
    this.root.addEventListener('change', (ev) => this.onChange(ev));
    await this.refetchExplanation();
  }

  private describe(err: unknown): string {
    if (err instanceof ApiError) return `${err.code}: ${err.message}`;
    return err instanceof Error ? err.message : String(err);
  }

  private render(): void {
    this.root.innerHTML = renderApp(
      this.meta,
      this.summary,
      this.state.lastResult,
      this.histogram,
      this.state,
      this.errorMessage,
    );
  }

  /** Run the explanation for the current instance with the full lock set. */
  private async refetchExplanation(): Promise<void> {
    if (this.explainInFlight) {
      this.explainQueued = true;
      return;
    }
    this.explainInFlight = true;
    try {
      const result = await this.client.explain({
        instance: this.state.instanceIndex,
        locks: [...this.state.locks].sort(),
      });
      this.state = setResult(this.state, result);
      this.errorMessage = null;
    } catch (err) {
      // keep the previous rendering underneath the error panel
      this.errorMessage = this.describe(err);
    } finally {
      this.explainInFlight = false;
    }
    this.render();
    if (this.explainQueued) {
      this.explainQueued = false;
      await this.refetchExplanation();
    }
  }

  private async selectInstance(index: number): Promise<void> {
    const clamped = Math.min(Math.max(index, 0), this.meta.n_rows - 1);
    this.state = setInstance(this.state, clamped);
    try {
      this.summary = await this.client.getSummary(clamped);
      this.errorMessage = null;
    } catch (err) {
      this.errorMessage = this.describe(err);
      this.render();
      return;
    }
    await this.refetchExplanation();
  }

  private async selectCondition(condition: Condition): Promise<void> {
    this.state = setCondition(this.state, condition);
    try {
      // shading changes; the last explanation result stays untouched
      this.histogram = await this.client.getDistributions(condition);
      this.errorMessage = null;
    } catch (err) {
      this.errorMessage = this.describe(err);
    }
    this.render();
  }

  private onClick(ev: Event): void {
    const target = ev.target as HTMLElement | null;
    if (target === null) return;
    const lock = target.closest<HTMLElement>('.lock');
    if (lock?.dataset.feature !== undefined) {
      this.state = toggleLock(this.state, lock.dataset.feature);
      this.render();
      return;
    }
    switch (target.closest('button')?.id) {
      case 'sort-toggle':
        this.state = toggleSort(this.state);
        this.render();
        break;
      case 'regenerate':
        void this.refetchExplanation();
        break;
      case 'prev-instance':
        void this.selectInstance(this.state.instanceIndex - 1);
        break;
      case 'next-instance':
        void this.selectInstance(this.state.instanceIndex + 1);
        break;
    }
  }

  private onChange(ev: Event): void {
    const target = ev.target as HTMLElement | null;
    if (target === null) return;
    if (target.id === 'condition-select') {
      void this.selectCondition((target as HTMLSelectElement).value as Condition);
    } else if (target.id === 'instance-input') {
      const value = Number((target as HTMLInputElement).value);
      if (Number.isInteger(value)) void this.selectInstance(value);
    }
  }
}

export function mount(root: HTMLElement, baseUrl = ''): App {
  const app = new App(root, new BinflipClient(baseUrl));
  void app.start();
  return app;
}

declare global {
  interface Window {
    __BINFLIP_NO_AUTOMOUNT__?: boolean;
  }
}

if (typeof document !== 'undefined' && !window.__BINFLIP_NO_AUTOMOUNT__) {
  const root = document.getElementById('app');
  if (root !== null) mount(root);
}
