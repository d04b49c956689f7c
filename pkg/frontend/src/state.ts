// Screen state machines: pure, so interactions and keyboard shortcuts are
// testable without a DOM. The DOM layer only reflects these states.

import {
  BitextLabel,
  BitextPayload,
  Factual,
  WordpairLabel,
  WordpairPayload,
  factualAllowed,
  factualRequired,
  isEscape,
  validateBitext,
  validateWordpair,
} from './schema.js';

export interface BitextScreenState {
  label?: BitextLabel;
  factual?: Factual;
  grammarDiffers: boolean;
  comment: string;
}

export function freshBitextState(): BitextScreenState {
  return { grammarDiffers: false, comment: '' };
}

export function selectBitextLabel(state: BitextScreenState, label: BitextLabel): BitextScreenState {
  const next = { ...state, label };
  if (!factualAllowed(label)) {
    next.factual = undefined;
  }
  if (isEscape(label)) {
    // escape labels skip the rest of the questions
    next.grammarDiffers = false;
    next.comment = state.comment;
  }
  return next;
}

export function selectFactual(state: BitextScreenState, factual: Factual | undefined): BitextScreenState {
  if (state.label !== undefined && !factualAllowed(state.label)) {
    return state;
  }
  return { ...state, factual };
}

export function toggleGrammar(state: BitextScreenState): BitextScreenState {
  if (state.label !== undefined && isEscape(state.label)) {
    return state;
  }
  return { ...state, grammarDiffers: !state.grammarDiffers };
}

export function factualDropdownVisible(state: BitextScreenState): boolean {
  return state.label !== undefined && factualRequired(state.label);
}

export function otherControlsDisabled(state: BitextScreenState): boolean {
  return state.label !== undefined && isEscape(state.label);
}

export function bitextSubmitEnabled(state: BitextScreenState): boolean {
  if (state.label === undefined) {
    return false;
  }
  if (factualRequired(state.label) && state.factual === undefined) {
    return false;
  }
  return true;
}

export function buildBitextPayload(
  state: BitextScreenState,
  itemId: string,
  annotatorId: string,
): BitextPayload {
  if (!bitextSubmitEnabled(state) || state.label === undefined) {
    throw new Error('bitext screen state is not submittable');
  }
  const payload: BitextPayload = {
    item_id: itemId,
    annotator_id: annotatorId,
    label: state.label,
  };
  if (state.factual !== undefined && factualAllowed(state.label)) {
    payload.factual = state.factual;
  }
  if (state.grammarDiffers && !isEscape(state.label)) {
    payload.grammar_differs = true; // checkbox is yes-or-unset, never false
  }
  if (state.comment.trim()) {
    payload.comment = state.comment.trim();
  }
  const violations = validateBitext(payload);
  if (violations.length) {
    throw new Error(`client-side schema violation: ${violations.join('; ')}`);
  }
  return payload;
}

export interface WordpairScreenState {
  label?: WordpairLabel;
  posMismatch: boolean;
  partialMatch: boolean;
  comment: string;
}

export function freshWordpairState(): WordpairScreenState {
  return { posMismatch: false, partialMatch: false, comment: '' };
}

export function selectWordpairLabel(state: WordpairScreenState, label: WordpairLabel): WordpairScreenState {
  return { ...state, label };
}

export function wordpairSubmitEnabled(state: WordpairScreenState): boolean {
  return state.label !== undefined;
}

export function buildWordpairPayload(
  state: WordpairScreenState,
  itemId: string,
  annotatorId: string,
): WordpairPayload {
  if (!wordpairSubmitEnabled(state) || state.label === undefined) {
    throw new Error('word pair screen state is not submittable');
  }
  const payload: WordpairPayload = {
    item_id: itemId,
    annotator_id: annotatorId,
    label: state.label,
  };
  if (state.posMismatch) {
    payload.pos_mismatch = true;
  }
  if (state.partialMatch) {
    payload.partial_match = true;
  }
  if (state.comment.trim()) {
    payload.comment = state.comment.trim();
  }
  const violations = validateWordpair(payload);
  if (violations.length) {
    throw new Error(`client-side schema violation: ${violations.join('; ')}`);
  }
  return payload;
}

// keyboard shortcuts produce exactly the same state transitions as clicks
export function bitextKeyToLabel(key: string): BitextLabel | undefined {
  if (['1', '2', '3', '4', '5'].includes(key)) {
    return key as BitextLabel;
  }
  return undefined;
}

export function wordpairKeyToLabel(key: string): WordpairLabel | undefined {
  if (key === 'y') return 'yes';
  if (key === 'n') return 'no';
  if (key === 'u') return 'idk';
  return undefined;
}
