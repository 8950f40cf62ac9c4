/**
 * One-item-at-a-time grading flow.
 *
 * The loop is: fetch next -> show the blinded text with the rubric's three
 * buttons -> submit -> advance. A submission stays pending until the server
 * acknowledges it; every input path is gated on that, so a double click or a
 * held key can never produce a second score event for the same item. The
 * done marker swaps the screen for a completion notice.
 */

import { ApiError, fetchNext, submitScore } from './api.js';
import type { NextResponse, ScoreAck } from './api.js';
import { rubricForView } from './rubric.js';
import { applyAck, applyNext, newSession, progressOf, type SessionState } from './session.js';

export type GradingDeps = {
  fetchNext(studyId: string, token: string): Promise<NextResponse>;
  submitScore(studyId: string, token: string, itemId: string, score: number): Promise<ScoreAck>;
};

const liveDeps: GradingDeps = { fetchNext, submitScore };

// ============ DOM Helpers ============

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  // textContent keeps report text inert; items may contain < and &
  if (text !== undefined) node.textContent = text;
  return node;
}

// ============ Flow Controller ============

export class GradingFlow {
  private state: SessionState;
  private busy = false;
  private readonly root: HTMLElement;
  private readonly deps: GradingDeps;
  private readonly onKey: (ev: KeyboardEvent) => void;

  constructor(root: HTMLElement, studyId: string, token: string, deps: GradingDeps = liveDeps) {
    this.root = root;
    this.deps = deps;
    this.state = newSession(studyId, token);
    this.onKey = (ev) => {
      // auto-repeat from a held key must not score the following item
      if (ev.repeat) return;
      if (ev.key === '0' || ev.key === '1' || ev.key === '2') {
        void this.choose(Number(ev.key));
      }
    };
  }

  get session(): SessionState {
    return this.state;
  }

  async start(): Promise<void> {
    document.addEventListener('keydown', this.onKey);
    await this.loadNext(true);
  }

  destroy(): void {
    document.removeEventListener('keydown', this.onKey);
  }

  private async loadNext(initial: boolean): Promise<void> {
    this.busy = true;
    try {
      const resp = await this.deps.fetchNext(this.state.studyId, this.state.graderToken);
      this.state = applyNext(this.state, resp);
      this.busy = false;
      if (this.state.done) {
        this.renderCompletion();
      } else {
        this.renderItem();
      }
    } catch (err) {
      this.busy = false;
      if (err instanceof ApiError) {
        // a bad token or study id cannot be recovered from inside the flow
        this.renderFatal(err.message);
      } else if (initial) {
        this.renderFatal('Network problem while contacting the study server.', () =>
          this.loadNext(true),
        );
      } else {
        this.showBanner('Network problem while fetching the next text.', () =>
          this.loadNext(false),
        );
      }
    }
  }

  private async choose(score: number): Promise<void> {
    if (this.busy || this.state.view === null) return;
    this.busy = true;
    this.setButtonsEnabled(false);
    this.hideBanner();
    try {
      await this.deps.submitScore(
        this.state.studyId,
        this.state.graderToken,
        this.state.view.item_id,
        score,
      );
      this.state = applyAck(this.state);
      this.busy = false;
      await this.loadNext(false);
    } catch (err) {
      this.busy = false;
      this.setButtonsEnabled(true);
      if (err instanceof ApiError) {
        // rejected: same item stays up with the server's reason
        this.showBanner(err.message);
      } else {
        this.showBanner('Network problem while submitting the score.', () => this.choose(score));
      }
    }
  }

  // ============ Screens ============

  private renderItem(): void {
    const view = this.state.view;
    if (view === null) return;
    const rubric = rubricForView(view);
    this.root.replaceChildren();

    const { position, total } = progressOf(this.state);
    const progress = el('div', 'progress');
    const fill = el('div', 'progress-fill');
    fill.style.width = total > 0 ? `${(100 * (position - 1)) / total}%` : '0%';
    progress.append(fill, el('span', 'progress-text', `Text ${position} of ${total}`));
    this.root.append(progress);

    const panes = el('div', view.companion_text !== undefined ? 'panes split' : 'panes');
    if (view.companion_text !== undefined) {
      const companion = el('section', 'pane');
      companion.append(el('h3', undefined, 'Source report'), el('p', 'pane-text', view.companion_text));
      panes.append(companion);
      const summary = el('section', 'pane');
      summary.append(el('h3', undefined, 'Summary'), el('p', 'pane-text', view.text));
      panes.append(summary);
    } else {
      const single = el('section', 'pane');
      single.append(el('p', 'pane-text', view.text));
      panes.append(single);
    }
    this.root.append(panes);

    const banner = el('div', 'banner');
    banner.hidden = true;
    this.root.append(banner);

    const choices = el('div', 'choices');
    for (const entry of rubric.labels) {
      const button = el('button', 'choice') as HTMLButtonElement;
      button.type = 'button';
      button.dataset.score = String(entry.score);
      button.append(
        el('span', 'choice-key', String(entry.score)),
        el('span', 'choice-label', entry.label),
        el('span', 'choice-desc', entry.description),
      );
      button.addEventListener('click', () => void this.choose(entry.score));
      choices.append(button);
    }
    this.root.append(choices);
    this.root.append(el('p', 'hint', 'Keys 0, 1 and 2 submit a score directly.'));
  }

  private renderCompletion(): void {
    this.root.replaceChildren();
    const screen = el('div', 'completion');
    screen.append(
      el('h2', undefined, 'Study complete'),
      el('p', undefined, `You have scored every text assigned to you (${this.state.submitted} this session). Thank you.`),
    );
    this.root.append(screen);
  }

  private renderFatal(message: string, retry?: () => Promise<void>): void {
    this.root.replaceChildren();
    const screen = el('div', 'fatal');
    screen.append(el('h2', undefined, 'Cannot grade'), el('p', 'fatal-message', message));
    if (retry) {
      const button = el('button', 'retry') as HTMLButtonElement;
      button.type = 'button';
      button.textContent = 'Retry';
      button.addEventListener('click', () => void retry());
      screen.append(button);
    }
    this.root.append(screen);
  }

  // ============ Banner & Buttons ============

  private showBanner(message: string, retry?: () => Promise<void>): void {
    const banner = this.root.querySelector<HTMLElement>('.banner');
    if (banner === null) {
      this.renderFatal(message, retry);
      return;
    }
    banner.replaceChildren();
    banner.append(el('span', 'banner-message', message));
    if (retry) {
      const button = el('button', 'retry') as HTMLButtonElement;
      button.type = 'button';
      button.textContent = 'Retry';
      button.addEventListener('click', () => void retry());
      banner.append(button);
    }
    banner.hidden = false;
  }

  private hideBanner(): void {
    const banner = this.root.querySelector<HTMLElement>('.banner');
    if (banner !== null) banner.hidden = true;
  }

  private setButtonsEnabled(enabled: boolean): void {
    for (const button of this.root.querySelectorAll<HTMLButtonElement>('button.choice')) {
      button.disabled = !enabled;
    }
  }
}
