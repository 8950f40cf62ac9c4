/**
 * The two grading rubrics, mirrored from the service vocabulary.
 *
 * The API never sends rubric labels while a study is open (graders see only
 * blinded item views), so the client carries the fixed vocabularies itself
 * and picks one from the shape of the view: reliability items always arrive
 * with a companion source report, understandability items never do.
 */

import type { ItemView, RubricLabel } from './api.js';

export type Rubric = {
  kind: 'reliability' | 'understandability';
  labels: RubricLabel[];
};

export const RELIABILITY: Rubric = {
  kind: 'reliability',
  labels: [
    { score: 0, label: 'Unreliable', description: 'The summary contradicts or omits findings of the source report.' },
    { score: 1, label: 'Inconsistent', description: 'The summary partly matches the source report but has gaps or errors.' },
    { score: 2, label: 'Appropriate', description: "The summary faithfully conveys the source report's findings." },
  ],
};

export const UNDERSTANDABILITY: Rubric = {
  kind: 'understandability',
  labels: [
    { score: 0, label: 'Not understandable', description: 'A lay reader cannot follow what the text says.' },
    { score: 1, label: 'Partially understandable', description: 'A lay reader follows some of the text but not all of it.' },
    { score: 2, label: 'Fully understandable', description: 'A lay reader can follow the whole text.' },
  ],
};

export function rubricForView(view: ItemView): Rubric {
  return view.companion_text !== undefined ? RELIABILITY : UNDERSTANDABILITY;
}
