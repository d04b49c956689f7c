// The 12 scripted interactions: every label branch of both screens drives
// the client state machine, and the resulting payload is POSTed to a live
// annotation service, which must accept all of them with zero schema
// violations.

import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { spawn, ChildProcess } from 'node:child_process';
import { mkdtempSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

import { AnnotationClient } from '../src/api.js';
import {
  buildBitextPayload,
  buildWordpairPayload,
  freshBitextState,
  freshWordpairState,
  selectBitextLabel,
  selectFactual,
  selectWordpairLabel,
  toggleGrammar,
} from '../src/state.js';
import { BitextLabel, Factual } from '../src/schema.js';

const PORT = 8750 + Math.floor(Math.random() * 400);
const SERVICE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const resp = await fetch(`${SERVICE}/tasks`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error('annotation service did not come up');
}

beforeAll(async () => {
  const storeDir = mkdtempSync(join(tmpdir(), 'annotation-ui-'));
  const bootstrap = [
    'import uvicorn',
    'from dialex.annotation import TaskStore, create_app',
    `store = TaskStore(${JSON.stringify(storeDir)})`,
    `uvicorn.run(create_app(store), host="127.0.0.1", port=${PORT}, log_level="warning")`,
  ].join('; ');
  server = spawn('python3', ['-c', bootstrap], { stdio: 'inherit' });
  await waitForService();

  const bitextItems = Array.from({ length: 8 }, (_, i) => ({
    item_id: `bt${i}`,
    src_text: `Dialekt Satz ${i}`,
    tgt_text: `Standard Satz ${i}`,
  }));
  const wordpairItems = Array.from({ length: 4 }, (_, i) => ({
    item_id: `wp${i}`,
    dialect_word: `Wort${i}`,
    standard_word: `Wort${i}`,
  }));
  for (const [kind, items] of [
    ['bitext', bitextItems],
    ['wordpair', wordpairItems],
  ] as const) {
    const resp = await fetch(`${SERVICE}/tasks`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ kind, items, control_size: 0, seed: 1, task_id: kind }),
    });
    expect(resp.status).toBe(201);
  }
}, 30000);

afterAll(() => {
  server?.kill();
});

describe('all 12 label branches are accepted by the live service', () => {
  const client = new AnnotationClient({ serviceUrl: SERVICE, annotatorId: 'ui-anno' });

  const bitextBranches: Array<{ label: BitextLabel; factual?: Factual; grammar?: boolean }> = [
    { label: 'idk' },
    { label: 'n/a' },
    { label: 'incomplete' },
    { label: '1' },
    { label: '2', factual: 'minor_inconsistency' },
    { label: '3', factual: 'different_details', grammar: true },
    { label: '4', factual: 'misses_details' },
    { label: '5' },
  ];

  bitextBranches.forEach((branch, i) => {
    it(`bitext label ${branch.label}`, async () => {
      let state = selectBitextLabel(freshBitextState(), branch.label);
      if (branch.factual) {
        state = selectFactual(state, branch.factual);
      }
      if (branch.grammar) {
        state = toggleGrammar(state);
      }
      const payload = buildBitextPayload(state, `bt${i}`, 'ui-anno');
      const result = await client.submit('bitext', payload);
      expect(result.violations ?? []).toEqual([]);
      expect(result.accepted).toBe(true);
    });
  });

  const wordpairBranches = [
    { label: 'yes' as const },
    { label: 'no' as const },
    { label: 'idk' as const },
    { label: 'yes' as const, partial: true },
  ];

  wordpairBranches.forEach((branch, i) => {
    it(`wordpair label ${branch.label}${branch.partial ? ' + partial_match' : ''}`, async () => {
      let state = selectWordpairLabel(freshWordpairState(), branch.label);
      if (branch.partial) {
        state = { ...state, partialMatch: true };
      }
      const payload = buildWordpairPayload(state, `wp${i}`, 'ui-anno');
      const result = await client.submit('wordpair', payload);
      expect(result.violations ?? []).toEqual([]);
      expect(result.accepted).toBe(true);
    });
  });

  it('the service saw every submission (export is complete)', async () => {
    const bitext = await fetch(`${SERVICE}/tasks/bitext/export`);
    const wordpair = await fetch(`${SERVICE}/tasks/wordpair/export`);
    const bitextLines = (await bitext.text()).trim().split('\n');
    const wordpairLines = (await wordpair.text()).trim().split('\n');
    expect(bitextLines.length).toBe(8);
    expect(wordpairLines.length).toBe(4);
  });
});
