/** The workbench acceptance flow, driven through the DOM only, against
 * the real session server: refine the square root end to end, watch
 * the wrong initialization get refuted with a visible below-one
 * counterexample, backtrack, finish, and export a program identical to
 * the CLI artifact. */

import { execFileSync, spawn, type ChildProcess } from 'node:child_process';
import { mkdtempSync, readFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join, resolve } from 'node:path';
import { Window } from 'happy-dom';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { WorkbenchState } from '../src/state.js';
import { WorkbenchView } from '../src/view.js';

const REPO = resolve(__dirname, '..', '..');
const CORPUS = join(REPO, 'src', 'refinery', 'corpus');
const PYTHON = process.env.PYTHON ?? 'python3';

let server: ChildProcess;
let base = '';
let cliArtifact = '';

function waitForOutput(child: ChildProcess, pattern: RegExp): Promise<string> {
  return new Promise((resolvePromise, rejectPromise) => {
    let buffer = '';
    const timer = setTimeout(
      () => rejectPromise(new Error(`server did not start: ${buffer}`)), 30000);
    child.stdout!.on('data', (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(pattern);
      if (match) {
        clearTimeout(timer);
        resolvePromise(match[1]);
      }
    });
    child.stderr!.on('data', (chunk: Buffer) => { buffer += chunk.toString(); });
    child.on('exit', () => rejectPromise(new Error(`server exited: ${buffer}`)));
  });
}

beforeAll(async () => {
  // the artifact the CLI produces for the same problem
  const scratch = mkdtempSync(join(tmpdir(), 'refinery-ui-'));
  const artifactPath = join(scratch, 'sqrt.prog');
  execFileSync(PYTHON, [
    '-m', 'refinery.frontends.cli', 'refine', join(CORPUS, 'sqrt.spec'),
    '--script', join(CORPUS, 'sqrt.refine'),
    '--domains', join(CORPUS, 'sqrt.domains.json'),
    '--out', artifactPath,
    '--report', join(scratch, 'report.txt'),
  ], { cwd: REPO });
  cliArtifact = readFileSync(artifactPath, 'utf-8');

  server = spawn(PYTHON, [
    '-m', 'refinery.frontends.cli', 'serve', '--port', '0',
    '--oracle', 'heuristic',
    '--domains', join(CORPUS, 'sqrt.domains.json'),
  ], { cwd: REPO });
  const port = await waitForOutput(server, /listening on http:\/\/[^:]+:(\d+)/);
  base = `http://127.0.0.1:${port}`;
});

afterAll(() => {
  server?.kill();
});

function sleep(ms: number): Promise<void> {
  return new Promise((r) => setTimeout(r, ms));
}

async function waitFor<T>(probe: () => T | null | undefined | false,
                          what: string, timeout = 30000): Promise<T> {
  const deadline = Date.now() + timeout;
  for (;;) {
    const got = probe();
    if (got) return got;
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
    await sleep(25);
  }
}

describe('workbench end to end', () => {
  it('refines sqrt through the UI only and exports the CLI artifact', async () => {
    const window = new Window();
    const doc = window.document as unknown as Document;
    const root = doc.createElement('div') as unknown as HTMLElement;
    doc.body.appendChild(root as never);
    const state = new WorkbenchState(new ApiClient(base));
    const view = new WorkbenchView(state, root, doc);
    view.render();

    const q = <E extends HTMLElement>(selector: string) =>
      root.querySelector(selector) as E | null;
    const input = (id: string, value: string) => {
      const field = q<HTMLInputElement>(`#${id}`)!;
      field.value = value;
      field.dispatchEvent(new window.Event('input'));
    };
    const click = (selector: string) => {
      const el = q<HTMLElement>(selector);
      expect(el, selector).not.toBeNull();
      el!.click();
    };
    const selectNode = async (path: string) => {
      await waitFor(() => q(`li[data-path="${path}"]`), `node ${path}`);
      click(`li[data-path="${path}"]`);
      await waitFor(() => q('.detail-panel h2')?.textContent?.includes(path),
                    `detail of ${path}`);
    };
    const chooseLaw = (kind: string) => {
      const select = q<HTMLSelectElement>('#law-kind')!;
      select.value = kind;
      select.dispatchEvent(new window.Event('change'));
    };
    const submit = async () => {
      const button = await waitFor(() => {
        const b = q<HTMLButtonElement>('#submit-law');
        return b && !b.disabled ? b : null;
      }, 'enabled submit');
      button.click();
    };

    // start a session from the bundled spec
    const specText = readFileSync(join(CORPUS, 'sqrt.spec'), 'utf-8');
    await waitFor(() => q('#spec-input'), 'spec input');
    (q<HTMLTextAreaElement>('#spec-input')!).value = specText;
    click('#start-session');
    await waitFor(() => q('li[data-path="root"]'), 'session tree');

    // a suggestion prefills the form (the heuristic proposes a split)
    await selectNode('root');
    click('#suggest-law');
    await waitFor(() => {
      const field = q<HTMLInputElement>('#field-mid');
      return field && field.value ? field : null;
    }, 'suggestion prefill');

    // our own split carries e > 0 through the midpoint
    chooseLaw('seq');
    input('field-mid', 'x*x <= N /\\ N < y*y /\\ e > 0');
    await submit();
    await waitFor(() => q('li[data-path="root.0"]'), 'split children');

    // the motivating bug: y := N misses the upper bound below one
    await selectNode('root.0');
    chooseLaw('assign');
    input('field-bindings', 'x := 0, y := N');
    await submit();
    const cex = await waitFor(
      () => q('.obligation-refuted .cex-binding[data-name="N"]'),
      'a visible counterexample for N');
    const nValue = cex.getAttribute('data-value')!;
    expect(parseRational(nValue)).toBeLessThan(1);

    // backtrack and fix the initialization
    click('button.backtrack');
    await waitFor(() => q('#law-kind'), 'reopened form');
    const failures = await waitFor(() => q('.failures'), 'failure history');
    expect(failures.textContent).toContain('assign x := 0, y := N');
    chooseLaw('assign');
    input('field-bindings', 'x := 0, y := N + 1');
    await submit();
    await waitFor(() => q('li[data-path="root.0"]')?.className.includes(
      'status-closed'), 'part 1 closed');

    // the loop
    await selectNode('root.1');
    chooseLaw('iterate');
    input('field-I', 'x*x <= N /\\ N < y*y /\\ e > 0');
    input('field-G', 'y > x + e');
    input('field-V', 'y - x');
    await submit();
    await waitFor(() => q('li[data-path="root.1.0"]'), 'loop body');

    await selectNode('root.1.0');
    chooseLaw('ifelse');
    input('field-G', '(x + y) / 2 * (x + y) / 2 > N');
    await submit();
    await waitFor(() => q('li[data-path="root.1.0.0"]'), 'branches');

    await selectNode('root.1.0.0');
    chooseLaw('assign');
    input('field-bindings', 'y := (x + y) / 2');
    await submit();
    await waitFor(() => q('li[data-path="root.1.0.0"]')?.className.includes(
      'status-closed'), 'then branch closed');

    await selectNode('root.1.0.1');
    chooseLaw('assign');
    input('field-bindings', 'x := (x + y) / 2');
    await submit();
    await waitFor(() => q('li[data-path="root"]')?.className.includes(
      'status-closed'), 'root closed');

    // export and compare with the CLI artifact byte for byte
    click('#export-program');
    const program = await waitFor(() => q('#program-text'), 'exported program');
    expect(program.textContent).toBe(cliArtifact);
  });
});

function parseRational(text: string): number {
  const parts = text.split('/');
  if (parts.length === 2) return Number(parts[0]) / Number(parts[1]);
  return Number(text);
}
