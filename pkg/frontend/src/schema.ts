// Annotation payload schemas, mirroring the server's validation rules so the
// client never submits anything the service would reject.

export type BitextLabel = 'idk' | 'n/a' | 'incomplete' | '1' | '2' | '3' | '4' | '5';
export type WordpairLabel = 'yes' | 'no' | 'idk';
export type Factual =
  | 'misses_details'
  | 'adds_details'
  | 'different_details'
  | 'minor_inconsistency'
  | 'major_inconsistency'
  | 'n/a';

export const BITEXT_LABELS: BitextLabel[] = ['idk', 'n/a', 'incomplete', '1', '2', '3', '4', '5'];
export const ESCAPE_LABELS: BitextLabel[] = ['idk', 'n/a', 'incomplete'];
export const WORDPAIR_LABELS: WordpairLabel[] = ['yes', 'no', 'idk'];
export const FACTUAL_VALUES: Factual[] = [
  'misses_details',
  'adds_details',
  'different_details',
  'minor_inconsistency',
  'major_inconsistency',
  'n/a',
];

export interface BitextPayload {
  item_id: string;
  annotator_id: string;
  label: BitextLabel;
  factual?: Factual;
  grammar_differs?: true;
  comment?: string;
}

export interface WordpairPayload {
  item_id: string;
  annotator_id: string;
  label: WordpairLabel;
  pos_mismatch?: true;
  partial_match?: true;
  comment?: string;
}

// factual is required exactly for 2-4; 5 and the escape labels forbid it;
// label 1 may carry it but nothing forces it
export function factualRequired(label: BitextLabel): boolean {
  return label === '2' || label === '3' || label === '4';
}

export function factualAllowed(label: BitextLabel): boolean {
  return factualRequired(label) || label === '1';
}

// escape labels skip every other control
export function isEscape(label: BitextLabel): boolean {
  return ESCAPE_LABELS.includes(label);
}

export function validateBitext(payload: BitextPayload): string[] {
  const violations: string[] = [];
  if (!BITEXT_LABELS.includes(payload.label)) {
    violations.push(`unknown label ${payload.label}`);
    return violations;
  }
  if (factualRequired(payload.label) && payload.factual === undefined) {
    violations.push(`label ${payload.label} requires the factual field`);
  }
  if (!factualAllowed(payload.label) && payload.factual !== undefined) {
    violations.push(`label ${payload.label} forbids the factual field`);
  }
  if (payload.factual !== undefined && !FACTUAL_VALUES.includes(payload.factual)) {
    violations.push(`unknown factual value ${payload.factual}`);
  }
  return violations;
}

export function validateWordpair(payload: WordpairPayload): string[] {
  const violations: string[] = [];
  if (!WORDPAIR_LABELS.includes(payload.label)) {
    violations.push(`unknown label ${payload.label}`);
  }
  return violations;
}
