// Session bootstrap: connect to the service, walk the selected task item by
// item, submit through the schema-checked state machines.

import { AnnotationClient, SessionConfig } from './api.js';
import { renderBitextScreen, renderWordpairScreen } from './dom.js';

interface Progress {
  served: number;
}

async function workLoop(client: AnnotationClient, taskId: string, kind: string, config: SessionConfig): Promise<void> {
  const root = document.getElementById('screen');
  const status = document.getElementById('status');
  if (!root || !status) throw new Error('missing #screen / #status');
  const progress: Progress = { served: 0 };

  const step = async (): Promise<void> => {
    const next = await client.nextItem(taskId);
    if (next.done || !next.item) {
      root.replaceChildren();
      status.textContent = `done — ${progress.served} items labeled in this session`;
      return;
    }
    progress.served += 1;
    status.textContent = `item ${progress.served}: ${String(next.item.item_id)}`;
    const onSubmit = async (payload: unknown): Promise<string | null> => {
      const result = await client.submit(taskId, payload as never);
      if (!result.accepted) {
        return `rejected by the service: ${(result.violations ?? []).join('; ')}`;
      }
      await step();
      return null;
    };
    if (kind === 'bitext') {
      renderBitextScreen(root, next.item as never, config.annotatorId, onSubmit);
    } else {
      renderWordpairScreen(root, next.item as never, config.annotatorId, onSubmit);
    }
    root.focus();
  };
  await step();
}

export async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const config: SessionConfig = {
    serviceUrl: params.get('service') ?? 'http://127.0.0.1:8750',
    annotatorId: params.get('annotator') ?? 'anno1',
    token: params.get('token') ?? undefined,
  };
  const client = new AnnotationClient(config);
  const tasks = await client.listTasks();
  const wanted = params.get('task');
  const task = tasks.find((t) => t.task_id === wanted) ?? tasks[0];
  if (!task) {
    document.getElementById('status')!.textContent = 'no tasks on the service';
    return;
  }
  await workLoop(client, task.task_id, task.kind, config);
}

if (typeof window !== 'undefined' && typeof document !== 'undefined') {
  window.addEventListener('DOMContentLoaded', () => {
    void start();
  });
}
