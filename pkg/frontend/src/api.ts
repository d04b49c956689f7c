// Minimal fetch client for the annotation service API.

import { BitextPayload, WordpairPayload } from './schema.js';

export interface SessionConfig {
  serviceUrl: string;
  annotatorId: string;
  token?: string;
}

export interface TaskSummary {
  task_id: string;
  kind: 'bitext' | 'wordpair';
  n_items: number;
  control_size: number;
}

export interface NextResponse {
  done: boolean;
  item?: Record<string, unknown>;
}

export interface SubmitResult {
  accepted: boolean;
  replaced?: boolean;
  violations?: string[];
}

export class AnnotationClient {
  constructor(private readonly config: SessionConfig) {}

  private headers(json = true): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers['Content-Type'] = 'application/json';
    if (this.config.token) headers['X-Annotation-Token'] = this.config.token;
    return headers;
  }

  private url(path: string): string {
    return this.config.serviceUrl.replace(/\/$/, '') + path;
  }

  async listTasks(): Promise<TaskSummary[]> {
    const resp = await fetch(this.url('/tasks'), { headers: this.headers(false) });
    if (!resp.ok) throw new Error(`GET /tasks failed: ${resp.status}`);
    const body = (await resp.json()) as { tasks: TaskSummary[] };
    return body.tasks;
  }

  async nextItem(taskId: string, scope: 'all' | 'control' = 'all'): Promise<NextResponse> {
    const params = new URLSearchParams({ annotator: this.config.annotatorId, scope });
    const resp = await fetch(this.url(`/tasks/${taskId}/next?${params}`), { headers: this.headers(false) });
    if (!resp.ok) throw new Error(`GET /next failed: ${resp.status}`);
    return (await resp.json()) as NextResponse;
  }

  async submit(taskId: string, payload: BitextPayload | WordpairPayload): Promise<SubmitResult> {
    const resp = await fetch(this.url(`/tasks/${taskId}/labels`), {
      method: 'POST',
      headers: this.headers(),
      body: JSON.stringify(payload),
    });
    if (resp.status === 422) {
      const body = (await resp.json()) as { violations?: string[] };
      return { accepted: false, violations: body.violations ?? [] };
    }
    if (!resp.ok) throw new Error(`POST /labels failed: ${resp.status}`);
    const body = (await resp.json()) as { replaced?: boolean };
    return { accepted: true, replaced: body.replaced };
  }
}
