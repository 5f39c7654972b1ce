/**
 * View state and its pure transitions. The state is a plain snapshot of
 * the last server responses plus the what-if draft; rendering is a pure
 * function of it, and reloading recovers everything from the session id.
 */

import type { ProjectionMethod, SessionDoc, WhatifResponse } from './types.js';

export interface WhatifView {
  draftText: string;
  projection: WhatifResponse | null;
  method: ProjectionMethod;
}

export interface ViewState {
  sessionId: string | null;
  doc: SessionDoc | null;
  whatif: WhatifView;
  error: string | null;
  duplicateId: string | null;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    doc: null,
    whatif: { draftText: '', projection: null, method: 'extrapolation' },
    error: null,
    duplicateId: null,
  };
}

/** A fresh document invalidates any earlier projection. */
export function withDoc(state: ViewState, doc: SessionDoc): ViewState {
  return {
    ...state,
    sessionId: doc.session_id,
    doc,
    whatif: { ...state.whatif, projection: null },
    error: null,
    duplicateId: null,
  };
}

export function withError(state: ViewState, message: string): ViewState {
  return { ...state, error: message };
}

export function withDuplicateId(state: ViewState, interviewId: string, message: string): ViewState {
  return { ...state, duplicateId: interviewId, error: message };
}

export function withProjection(state: ViewState, projection: WhatifResponse): ViewState {
  return { ...state, whatif: { ...state.whatif, projection }, error: null };
}

/** Switching the method only re-reads the stored projection. */
export function withMethod(state: ViewState, method: ProjectionMethod): ViewState {
  return { ...state, whatif: { ...state.whatif, method } };
}

export function withDraft(state: ViewState, draftText: string): ViewState {
  return { ...state, whatif: { ...state.whatif, draftText } };
}

/** The figure the what-if panel shows for the selected method. */
export function selectedAdditional(state: ViewState): number | null | undefined {
  const projection = state.whatif.projection;
  if (!projection) return undefined;
  return projection.additional_interviews[state.whatif.method];
}

/**
 * Parse a hand-typed 0/1 pattern. Commas and whitespace both separate;
 * anything else is rejected before it can reach the server.
 */
export function parsePattern(text: string): number[] {
  const tokens = text.split(/[\s,;]+/).filter((t) => t.length > 0);
  const pattern: number[] = [];
  for (const token of tokens) {
    if (token !== '0' && token !== '1') {
      throw new Error(`pattern tokens must be 0 or 1, got '${token}'`);
    }
    pattern.push(Number(token));
  }
  return pattern;
}

/** Parse the codes box: one code id per comma, blanks dropped. */
export function parseCodeIds(text: string): string[] {
  const seen = new Set<string>();
  const codes: string[] = [];
  for (const raw of text.split(',')) {
    const code = raw.trim();
    if (code.length === 0 || seen.has(code)) continue;
    seen.add(code);
    codes.push(code);
  }
  return codes;
}
