/** Workbench state: an exact mirror of the server's tree.  Every
 * mutation goes to the server and the mirror is refreshed from the
 * response path — never mutated locally, so a reload reproduces the
 * identical view. */

import { ApiClient, ApiError } from './api.js';
import type { Env } from './parser.js';
import type { NodeDto, SuggestionDto, TreeDto } from './types.js';

export interface Banner {
  code: number;
  message: string;
}

export class WorkbenchState {
  session: string | null = null;
  tree: TreeDto | null = null;
  selected: number | null = null;
  program: string | null = null;
  banner: Banner | null = null;
  private listeners: Array<() => void> = [];

  constructor(public api: ApiClient) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  node(id: number): NodeDto | null {
    return this.tree?.nodes.find((n) => n.id === id) ?? null;
  }

  get selectedNode(): NodeDto | null {
    return this.selected === null ? null : this.node(this.selected);
  }

  envOf(node: NodeDto): Env {
    return { params: [...node.frame, ...node.constants],
             defs: this.tree?.defs ?? [] };
  }

  async start(spec: string): Promise<void> {
    await this.guard(async () => {
      this.session = await this.api.createSession(spec);
      this.program = null;
      await this.refresh();
      this.selected = this.tree?.root ?? null;
    });
  }

  async refresh(): Promise<void> {
    if (!this.session) return;
    this.tree = await this.api.getTree(this.session);
    if (this.selected !== null && !this.node(this.selected)) {
      this.selected = this.tree.root;
    }
    this.emit();
  }

  select(id: number): void {
    this.selected = id;
    this.emit();
  }

  /** Runs a server call; on failure the mirror is re-fetched so the
   * view always shows the server's state, and the error is kept for
   * display.  Returns whether the call succeeded. */
  async guard(action: () => Promise<void>): Promise<boolean> {
    this.banner = null;
    try {
      await action();
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        this.banner = { code: err.status, message: err.message };
      } else {
        this.banner = { code: 0, message: String(err) };
      }
      if (this.session) {
        try {
          await this.refresh();
        } catch {
          this.emit();
        }
      } else {
        this.emit();
      }
      return false;
    }
  }

  async submitLaw(nodeId: number, line: string): Promise<boolean> {
    return this.guard(async () => {
      await this.api.apply(this.session!, nodeId, line);
      await this.api.verify(this.session!, nodeId);
      await this.refresh();
    });
  }

  async verifyNode(nodeId: number): Promise<boolean> {
    return this.guard(async () => {
      await this.api.verify(this.session!, nodeId);
      await this.refresh();
    });
  }

  async backtrack(nodeId: number, reason: string): Promise<boolean> {
    return this.guard(async () => {
      await this.api.backtrack(this.session!, nodeId, reason);
      await this.refresh();
    });
  }

  async suggest(nodeId: number): Promise<SuggestionDto | null> {
    let proposal: SuggestionDto | null = null;
    await this.guard(async () => {
      proposal = await this.api.suggest(this.session!, nodeId);
    });
    return proposal;
  }

  async exportProgram(): Promise<boolean> {
    return this.guard(async () => {
      this.program = await this.api.getProgram(this.session!);
      await this.refresh();
    });
  }
}
