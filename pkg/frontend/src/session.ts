import { ApiClient } from './api';
import {
  RecourseResponse,
  SchemaResponse,
  ScoreEntry,
  SessionEvent,
  SessionLog,
} from './types';

/**
 * The explorer's whole state: the current feature vector, an undo stack,
 * the last service responses, and an append-only event log.
 *
 * Every number the UI displays is a stored service response field; nothing
 * is recomputed client-side. Replaying the exported log from the initial
 * vector against the same service reproduces the final state exactly.
 */
export class Session {
  readonly initialX: number[];
  private x: number[];
  private readonly undoStack: number[][] = [];
  private readonly events: SessionEvent[] = [];
  private scores: ScoreEntry[] | null = null;
  private recourse = new Map<string, RecourseResponse>();
  private targets: string[];

  constructor(
    readonly schema: SchemaResponse,
    initialX: number[],
    private readonly client: ApiClient,
  ) {
    this.initialX = [...initialX];
    this.x = [...initialX];
    this.targets = [schema.base_id];
  }

  currentX(): number[] {
    return [...this.x];
  }

  currentScores(): ScoreEntry[] | null {
    return this.scores;
  }

  lastRecourse(method: string): RecourseResponse | undefined {
    return this.recourse.get(method);
  }

  selectedTargets(): string[] {
    return [...this.targets];
  }

  canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  private log(type: SessionEvent['type'], payload: Record<string, unknown>): void {
    this.events.push({ type, payload, ts: Date.now() });
  }

  edit(feature: string, value: number): void {
    const j = this.schema.features.findIndex((f) => f.name === feature);
    if (j < 0) {
      throw new Error(`unknown feature ${feature}`);
    }
    this.undoStack.push([...this.x]);
    this.x[j] = value;
    this.log('edit', { feature, value });
  }

  undo(): void {
    const prev = this.undoStack.pop();
    if (prev) {
      this.x = prev;
      this.log('undo', {});
    }
  }

  selectTargets(targets: string[]): void {
    this.targets = [...targets];
    this.log('select_targets', { targets: [...targets] });
  }

  async rescore(): Promise<ScoreEntry[]> {
    const response = await this.client.score(this.x);
    this.scores = response.scores;
    this.log('rescore', {});
    return response.scores;
  }

  async requestRecourse(method: string, seed: number, objective?: string):
      Promise<RecourseResponse> {
    const body = {
      x: [...this.x],
      method,
      targets: [...this.targets],
      seed,
      ...(objective ? { objective } : {}),
    };
    const response = await this.client.recourse(body);
    this.recourse.set(method, response);
    this.log('recourse', { method, seed, ...(objective ? { objective } : {}) });
    return response;
  }

  /** Push the suggestion's x_cf into the editor (undoable). */
  apply(method: string): void {
    const suggestion = this.recourse.get(method);
    if (!suggestion || !suggestion.result.found) {
      throw new Error(`no applicable ${method} suggestion`);
    }
    this.undoStack.push([...this.x]);
    this.x = [...suggestion.result.x_cf];
    this.log('apply', { method });
  }

  exportLog(): SessionLog {
    return {
      initial_x: [...this.initialX],
      events: this.events.map((e) => ({ ...e, payload: { ...e.payload } })),
    };
  }

  /** Re-drive an exported log against a (pure) service; no local shortcuts. */
  static async replay(
    log: SessionLog,
    schema: SchemaResponse,
    client: ApiClient,
  ): Promise<Session> {
    const session = new Session(schema, log.initial_x, client);
    for (const event of log.events) {
      switch (event.type) {
        case 'edit':
          session.edit(event.payload.feature as string, event.payload.value as number);
          break;
        case 'undo':
          session.undo();
          break;
        case 'select_targets':
          session.selectTargets(event.payload.targets as string[]);
          break;
        case 'rescore':
          await session.rescore();
          break;
        case 'recourse':
          await session.requestRecourse(
            event.payload.method as string,
            event.payload.seed as number,
            event.payload.objective as string | undefined,
          );
          break;
        case 'apply':
          session.apply(event.payload.method as string);
          break;
      }
    }
    return session;
  }
}
