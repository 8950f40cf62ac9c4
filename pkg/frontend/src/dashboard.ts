/**
 * Post-completion results dashboard.
 *
 * Everything shown here is read straight out of the results endpoint
 * payload: per-arm score distributions as stacked bars, per-grader bars, the
 * item-by-grader heatmap, and the pairwise kappa matrix. The only work done
 * client side is tallying rows for display and ordering heatmap rows by
 * average grade; every statistic (means, fractions, kappa, the rank test)
 * comes from the server as-is.
 */

import type { GridRow, ResultsBundle } from './api.js';

const SCORE_KEYS = ['0', '1', '2'];

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function fmt(value: number | null, digits = 2): string {
  return value === null ? 'n/a' : value.toFixed(digits);
}

function fmtP(p: number): string {
  return p < 0.001 ? p.toExponential(2) : p.toFixed(4);
}

// ============ Payload Reshaping (display only) ============

/** Count each grader's scores from the raw grid; no statistics involved. */
export function tallyGraderCounts(bundle: ResultsBundle): Record<string, Record<string, number>> {
  const tally: Record<string, Record<string, number>> = {};
  for (const grader of bundle.graders) {
    tally[grader] = Object.fromEntries(SCORE_KEYS.map((k) => [k, 0]));
  }
  for (const row of bundle.grid) {
    for (const grader of bundle.graders) {
      const score = row.scores[grader];
      if (score !== null && score !== undefined) {
        tally[grader][String(score)] += 1;
      }
    }
  }
  return tally;
}

/** Grid rows grouped by arm, each group ordered by average grade (best first). */
export function orderedGrid(bundle: ResultsBundle): { arm: string; rows: GridRow[] }[] {
  const groups: { arm: string; rows: GridRow[] }[] = [];
  for (const arm of Object.keys(bundle.arms).sort()) {
    const rows = bundle.grid.filter((row) => row.arm === arm);
    const avg = (row: GridRow): number => {
      const scores = Object.values(row.scores).filter((s): s is number => s !== null);
      // unscored rows sink to the bottom of their arm
      return scores.length ? scores.reduce((a, b) => a + b, 0) / scores.length : -1;
    };
    rows.sort((a, b) => avg(b) - avg(a) || a.item_id.localeCompare(b.item_id));
    groups.push({ arm, rows });
  }
  return groups;
}

// ============ Chart Builders ============

function stackRow(label: string, counts: Record<string, number>, total: number): HTMLElement {
  const row = el('div', 'stack-row');
  row.append(el('span', 'stack-label', label));
  const bar = el('div', 'stack-bar');
  for (const key of SCORE_KEYS) {
    const count = counts[key] ?? 0;
    if (count === 0) continue;
    const segment = el('div', `seg seg-${key}`, String(count));
    segment.style.width = total > 0 ? `${(100 * count) / total}%` : '0%';
    segment.dataset.score = key;
    segment.dataset.count = String(count);
    bar.append(segment);
  }
  row.append(bar);
  return row;
}

export function armBars(bundle: ResultsBundle): HTMLElement {
  const section = el('section', 'chart arm-bars');
  section.append(el('h3', undefined, 'Scores by arm'));
  for (const arm of Object.keys(bundle.arms).sort()) {
    const summary = bundle.arms[arm];
    const row = stackRow(arm, summary.counts, summary.total);
    row.dataset.arm = arm;
    row.append(el('span', 'stack-note', `${summary.total} scores, mean ${fmt(summary.mean)}`));
    section.append(row);
  }
  section.append(legend(bundle));
  return section;
}

export function graderBars(bundle: ResultsBundle): HTMLElement {
  const section = el('section', 'chart grader-bars');
  section.append(el('h3', undefined, 'Scores by grader'));
  const tally = tallyGraderCounts(bundle);
  for (const grader of bundle.graders) {
    const counts = tally[grader];
    const total = SCORE_KEYS.reduce((sum, k) => sum + counts[k], 0);
    const row = stackRow(grader, counts, total);
    row.dataset.grader = grader;
    section.append(row);
  }
  return section;
}

function legend(bundle: ResultsBundle): HTMLElement {
  const box = el('div', 'legend');
  for (const entry of bundle.rubric.labels) {
    const item = el('span', 'legend-item');
    item.append(el('span', `swatch seg-${entry.score}`), el('span', undefined, `${entry.score} ${entry.label}`));
    box.append(item);
  }
  return box;
}

export function itemHeatmap(bundle: ResultsBundle): HTMLElement {
  const section = el('section', 'chart heatmap');
  section.append(el('h3', undefined, 'Item by grader'));
  const table = el('table', 'heat-table') as HTMLTableElement;
  const head = el('tr');
  head.append(el('th', undefined, 'item'));
  for (const grader of bundle.graders) {
    head.append(el('th', undefined, grader));
  }
  table.append(head);
  for (const group of orderedGrid(bundle)) {
    const divider = el('tr', 'arm-divider');
    const cell = el('th', undefined, group.arm) as HTMLTableCellElement;
    cell.colSpan = bundle.graders.length + 1;
    divider.append(cell);
    table.append(divider);
    for (const row of group.rows) {
      const tr = el('tr', 'heat-row');
      tr.dataset.item = row.item_id;
      tr.append(el('th', undefined, row.item_id));
      for (const grader of bundle.graders) {
        const score = row.scores[grader];
        const td = el(
          'td',
          score === null || score === undefined ? 'heat-cell heat-none' : `heat-cell heat-${score}`,
          score === null || score === undefined ? '' : String(score),
        );
        tr.append(td);
      }
      table.append(tr);
    }
  }
  const scroll = el('div', 'table-scroll');
  scroll.append(table);
  section.append(scroll);
  return section;
}

export function kappaTable(bundle: ResultsBundle): HTMLElement {
  const section = el('section', 'chart kappa');
  section.append(el('h3', undefined, "Grader agreement (Cohen's kappa)"));
  const table = el('table', 'kappa-table');
  const head = el('tr');
  head.append(el('th'));
  for (const grader of bundle.graders) {
    head.append(el('th', undefined, grader));
  }
  table.append(head);
  bundle.agreement.kappa.forEach((rowValues, i) => {
    const tr = el('tr');
    tr.append(el('th', undefined, bundle.graders[i]));
    rowValues.forEach((value, j) => {
      tr.append(el('td', i === j ? 'kappa-cell diag' : 'kappa-cell', fmt(value)));
    });
    table.append(tr);
  });
  section.append(table);
  return section;
}

// ============ Screens ============

export function renderDashboard(root: HTMLElement, bundle: ResultsBundle): void {
  root.replaceChildren();
  const header = el('div', 'dash-header');
  header.append(
    el('h2', undefined, `Study ${bundle.study_id}`),
    el(
      'p',
      'dash-meta',
      `${bundle.rubric.kind} rubric, ${bundle.n_items} items, ${bundle.n_graders} graders, ` +
        `${bundle.score_count} scores, state ${bundle.state}`,
    ),
  );
  root.append(header);
  root.append(armBars(bundle));
  if (bundle.mann_whitney !== null) {
    root.append(
      el(
        'p',
        'rank-test',
        `Arm comparison (${bundle.mann_whitney.method}): p = ${fmtP(bundle.mann_whitney.p_value)}`,
      ),
    );
  }
  root.append(graderBars(bundle));
  root.append(itemHeatmap(bundle));
  root.append(kappaTable(bundle));
}

/** Sealed results: show the server's refusal exactly as sent. */
export function renderRefusal(root: HTMLElement, message: string): void {
  root.replaceChildren();
  const screen = el('div', 'refusal');
  screen.append(el('h2', undefined, 'Results unavailable'), el('p', 'refusal-message', message));
  root.append(screen);
}
