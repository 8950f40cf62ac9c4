/**
 * Grader session state: a small mirror of what the server reports, nothing
 * more. The session holds the current blinded view exactly as received; the
 * server withholds which population each item came from, so no field here
 * could cache that. Transitions are pure functions so the flow controller
 * stays thin.
 */

import { isDone, type ItemView, type NextResponse } from './api.js';

export type SessionState = {
  studyId: string;
  graderToken: string;
  /** the blinded view being graded, or null before the first fetch / after done */
  view: ItemView | null;
  /** true once the server has answered next with the done marker */
  done: boolean;
  /** count of submissions this session has seen acknowledged */
  submitted: number;
};

export function newSession(studyId: string, graderToken: string): SessionState {
  return { studyId, graderToken, view: null, done: false, submitted: 0 };
}

/** Fold a next-item response into the session. */
export function applyNext(state: SessionState, resp: NextResponse): SessionState {
  if (isDone(resp)) {
    return { ...state, view: null, done: true };
  }
  return { ...state, view: resp, done: false };
}

/** Fold an acknowledged submission into the session. */
export function applyAck(state: SessionState): SessionState {
  return { ...state, submitted: state.submitted + 1 };
}

/** Position/total for the progress bar; 0/0 until a view has arrived. */
export function progressOf(state: SessionState): { position: number; total: number } {
  if (state.view === null) {
    return { position: 0, total: 0 };
  }
  return { position: state.view.position, total: state.view.total };
}
