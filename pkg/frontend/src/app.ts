/**
 * Entry point: routes by query string.
 *
 *   ?study=ID&token=TOKEN          grading session for one grader
 *   ?view=results&study=ID[&reveal=KEY]   results dashboard
 *   (no parameters)                landing page with both forms
 *
 * An optional &api=URL parameter points every request at another origin;
 * without it the client talks to whatever served it, which is the normal
 * deployment under `precise serve --static`.
 */

import { ApiError, fetchResults, setBaseUrl } from './api.js';
import { renderDashboard, renderRefusal } from './dashboard.js';
import { GradingFlow } from './grading.js';

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function field(labelText: string, name: string, placeholder: string): HTMLElement {
  const wrap = el('label', 'field');
  wrap.append(el('span', undefined, labelText));
  const input = document.createElement('input');
  input.name = name;
  input.placeholder = placeholder;
  input.autocomplete = 'off';
  wrap.append(input);
  return wrap;
}

function renderHome(root: HTMLElement, api: string): void {
  root.replaceChildren();
  root.append(el('h1', undefined, 'Grading studies'));

  const grade = document.createElement('form');
  grade.className = 'card';
  grade.append(el('h2', undefined, 'Grade'));
  grade.append(field('Study id', 'study', 'e.g. 3f2a9c1d05b4'));
  grade.append(field('Grader token', 'token', 'token handed out by the coordinator'));
  const gradeGo = el('button', 'go', 'Start grading') as HTMLButtonElement;
  gradeGo.type = 'submit';
  grade.append(gradeGo);
  grade.addEventListener('submit', (ev) => {
    ev.preventDefault();
    const data = new FormData(grade);
    navigate({ study: String(data.get('study') ?? ''), token: String(data.get('token') ?? ''), api });
  });
  root.append(grade);

  const results = document.createElement('form');
  results.className = 'card';
  results.append(el('h2', undefined, 'Results'));
  results.append(field('Study id', 'study', ''));
  results.append(field('Reveal key', 'reveal', 'only needed before the study completes'));
  const resultsGo = el('button', 'go', 'Open dashboard') as HTMLButtonElement;
  resultsGo.type = 'submit';
  results.append(resultsGo);
  results.addEventListener('submit', (ev) => {
    ev.preventDefault();
    const data = new FormData(results);
    navigate({
      view: 'results',
      study: String(data.get('study') ?? ''),
      reveal: String(data.get('reveal') ?? ''),
      api,
    });
  });
  root.append(results);
}

function navigate(params: Record<string, string>): void {
  const search = new URLSearchParams();
  for (const [key, value] of Object.entries(params)) {
    if (value !== '') search.set(key, value);
  }
  window.location.search = search.toString();
}

async function runResults(root: HTMLElement, study: string, reveal: string | null): Promise<void> {
  root.replaceChildren(el('p', 'loading', 'Loading results...'));
  try {
    const bundle = await fetchResults(study, reveal ?? undefined);
    renderDashboard(root, bundle);
  } catch (err) {
    if (err instanceof ApiError) {
      renderRefusal(root, err.message);
    } else {
      root.replaceChildren();
      const screen = el('div', 'fatal');
      screen.append(el('h2', undefined, 'Results unavailable'), el('p', undefined, 'Network problem while loading results.'));
      const retry = el('button', 'retry', 'Retry') as HTMLButtonElement;
      retry.type = 'button';
      retry.addEventListener('click', () => void runResults(root, study, reveal));
      screen.append(retry);
      root.append(screen);
    }
  }
}

export function main(root: HTMLElement): void {
  const params = new URLSearchParams(window.location.search);
  const api = params.get('api') ?? '';
  setBaseUrl(api);

  const study = params.get('study');
  const token = params.get('token');
  if (study && token) {
    void new GradingFlow(root, study, token).start();
    return;
  }
  if (study && params.get('view') === 'results') {
    void runResults(root, study, params.get('reveal'));
    return;
  }
  renderHome(root, api);
}

const appRoot = document.getElementById('app');
if (appRoot !== null) {
  main(appRoot);
}
