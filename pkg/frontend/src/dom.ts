// DOM rendering for the two annotation screens. All decisions live in the
// state machines; this layer only reflects state and forwards events.

import {
  BITEXT_LABELS,
  FACTUAL_VALUES,
  BitextLabel,
  Factual,
  WORDPAIR_LABELS,
  WordpairLabel,
} from './schema.js';
import {
  BitextScreenState,
  WordpairScreenState,
  bitextKeyToLabel,
  bitextSubmitEnabled,
  buildBitextPayload,
  buildWordpairPayload,
  factualDropdownVisible,
  freshBitextState,
  freshWordpairState,
  otherControlsDisabled,
  selectBitextLabel,
  selectFactual,
  selectWordpairLabel,
  toggleGrammar,
  wordpairKeyToLabel,
  wordpairSubmitEnabled,
} from './state.js';

type SubmitHandler = (payload: unknown) => Promise<string | null>;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = '',
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text) node.textContent = text;
  return node;
}

export function renderBitextScreen(
  root: HTMLElement,
  item: { item_id: string; src_text: string; tgt_text: string },
  annotatorId: string,
  onSubmit: SubmitHandler,
): void {
  let state: BitextScreenState = freshBitextState();
  root.replaceChildren();

  const dialect = el('p', { class: 'sentence dialect' }, item.src_text);
  const standard = el('p', { class: 'sentence standard' }, item.tgt_text);
  const radios = el('div', { class: 'labels', role: 'radiogroup' });
  const radioInputs = new Map<BitextLabel, HTMLInputElement>();
  for (const label of BITEXT_LABELS) {
    const wrap = el('label', { class: 'label-option' });
    const input = el('input', { type: 'radio', name: 'label', value: label });
    input.addEventListener('change', () => {
      state = selectBitextLabel(state, label);
      refresh();
    });
    wrap.append(input, document.createTextNode(' ' + label));
    radios.append(wrap);
    radioInputs.set(label, input);
  }

  const factualWrap = el('div', { class: 'factual' });
  const factualSelect = el('select', { name: 'factual' });
  factualSelect.append(el('option', { value: '' }, 'how do the sentences differ?'));
  for (const value of FACTUAL_VALUES) {
    factualSelect.append(el('option', { value }, value.replace(/_/g, ' ')));
  }
  factualSelect.addEventListener('change', () => {
    state = selectFactual(state, (factualSelect.value || undefined) as Factual | undefined);
    refresh();
  });
  factualWrap.append(el('span', {}, 'Factual similarity: '), factualSelect);

  const grammarWrap = el('label', { class: 'grammar' });
  const grammarBox = el('input', { type: 'checkbox', name: 'grammar_differs' });
  grammarBox.addEventListener('change', () => {
    state = toggleGrammar(state);
    refresh();
  });
  grammarWrap.append(grammarBox, document.createTextNode(' Grammar differs?'));

  const comment = el('textarea', { name: 'comment', placeholder: 'free form comment' });
  comment.addEventListener('input', () => {
    state = { ...state, comment: comment.value };
    refresh();
  });

  const submit = el('button', { type: 'button' }, 'Submit');
  const error = el('p', { class: 'error' });
  submit.addEventListener('click', async () => {
    const payload = buildBitextPayload(state, item.item_id, annotatorId);
    error.textContent = (await onSubmit(payload)) ?? '';
  });

  function refresh(): void {
    factualWrap.style.display = factualDropdownVisible(state) ? '' : 'none';
    const disabled = otherControlsDisabled(state);
    factualSelect.disabled = disabled;
    grammarBox.disabled = disabled;
    grammarBox.checked = state.grammarDiffers;
    submit.disabled = !bitextSubmitEnabled(state);
  }

  root.addEventListener('keydown', (event) => {
    const label = bitextKeyToLabel(event.key);
    if (label) {
      radioInputs.get(label)?.click();
    }
  });

  root.append(dialect, standard, radios, factualWrap, grammarWrap, comment, submit, error);
  refresh();
}

export function renderWordpairScreen(
  root: HTMLElement,
  item: { item_id: string; dialect_word: string; standard_word: string },
  annotatorId: string,
  onSubmit: SubmitHandler,
): void {
  let state: WordpairScreenState = freshWordpairState();
  root.replaceChildren();

  // word pairs are shown without sentence context on purpose
  const words = el('p', { class: 'wordpair' }, `${item.dialect_word} — ${item.standard_word}`);
  const buttons = el('div', { class: 'labels' });
  const buttonByLabel = new Map<WordpairLabel, HTMLButtonElement>();
  for (const label of WORDPAIR_LABELS) {
    const button = el('button', { type: 'button', 'data-label': label }, label);
    button.addEventListener('click', () => {
      state = selectWordpairLabel(state, label);
      refresh();
    });
    buttons.append(button);
    buttonByLabel.set(label, button);
  }

  const posBox = el('input', { type: 'checkbox', name: 'pos_mismatch' });
  posBox.addEventListener('change', () => {
    state = { ...state, posMismatch: posBox.checked };
  });
  const partialBox = el('input', { type: 'checkbox', name: 'partial_match' });
  partialBox.addEventListener('change', () => {
    state = { ...state, partialMatch: partialBox.checked };
  });
  const posWrap = el('label', {});
  posWrap.append(posBox, document.createTextNode(' different part of speech'));
  const partialWrap = el('label', {});
  partialWrap.append(partialBox, document.createTextNode(' partial match'));

  const comment = el('textarea', { name: 'comment', placeholder: 'free form comment' });
  comment.addEventListener('input', () => {
    state = { ...state, comment: comment.value };
  });

  const submit = el('button', { type: 'button', class: 'submit' }, 'Submit');
  const error = el('p', { class: 'error' });
  submit.addEventListener('click', async () => {
    const payload = buildWordpairPayload(state, item.item_id, annotatorId);
    error.textContent = (await onSubmit(payload)) ?? '';
  });

  function refresh(): void {
    for (const [label, button] of buttonByLabel) {
      button.classList.toggle('selected', state.label === label);
    }
    submit.disabled = !wordpairSubmitEnabled(state);
  }

  root.addEventListener('keydown', (event) => {
    const label = wordpairKeyToLabel(event.key);
    if (label) {
      buttonByLabel.get(label)?.click();
    }
  });

  root.append(words, buttons, posWrap, partialWrap, comment, submit, error);
  refresh();
}
