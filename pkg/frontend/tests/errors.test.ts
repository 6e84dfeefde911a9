/** Error presentation and the no-hidden-state invariant, against a
 * mocked server. */

import { Window } from 'happy-dom';
import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { WorkbenchState } from '../src/state.js';
import { WorkbenchView } from '../src/view.js';
import type { TreeDto } from '../src/types.js';

const TREE: TreeDto = {
  root: 0,
  defs: [],
  nodes: [{
    id: 0,
    path: 'root',
    parent: null,
    frame: [{ name: 'x', type: 'float', kind: 'variant' },
            { name: 'y', type: 'float', kind: 'variant' }],
    constants: [{ name: 'N', type: 'float', kind: 'constant' },
                { name: 'e', type: 'float', kind: 'constant' }],
    pre: 'N >= 0 /\\ e > 0',
    post: 'x*x <= N /\\ N < y*y /\\ y <= x+e',
    law: null,
    law_kind: null,
    code: null,
    status: 'open',
    obligations: [],
    failures: [],
    children: [],
  }],
};

type Route = (body: unknown) => { status: number; payload: unknown };

function makeHarness(routes: Record<string, Route>) {
  const fetchImpl = async (url: string, init?: RequestInit) => {
    const method = init?.method ?? 'GET';
    const key = `${method} ${url}`;
    const route = routes[key];
    if (!route) throw new Error(`no mocked route for ${key}`);
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    const out = route(body);
    return new Response(JSON.stringify(out.payload), {
      status: out.status,
      headers: { 'Content-Type': 'application/json' },
    });
  };
  const window = new Window();
  const doc = window.document as unknown as Document;
  const root = doc.createElement('div') as unknown as HTMLElement;
  doc.body.appendChild(root as never);
  const state = new WorkbenchState(new ApiClient('', fetchImpl as never));
  const view = new WorkbenchView(state, root, doc);
  return { state, view, root };
}

const BASE_ROUTES: Record<string, Route> = {
  'POST /sessions': () => ({ status: 200, payload: { api: 1, session: 's1' } }),
  'GET /sessions/s1/tree': () => ({ status: 200, payload: { api: 1, tree: TREE } }),
};

describe('error presentation', () => {
  let harness: ReturnType<typeof makeHarness>;

  beforeEach(async () => {
    harness = makeHarness({
      ...BASE_ROUTES,
      'GET /sessions/s1/program': () => (
        { status: 409, payload: { api: 1, error: 'the refinement is not closed yet' } }),
      'POST /sessions/s1/nodes/0/apply': (body) => {
        const law = (body as { law: string }).law;
        if (law.includes('z')) {
          return { status: 422, payload: { api: 1, error: "ill-typed proposal: 'z'" } };
        }
        return { status: 404, payload: { api: 1, error: 'no node' } };
      },
      'GET /sessions/nope/tree': () => (
        { status: 404, payload: { api: 1, error: "no session 'nope'" } }),
    });
    await harness.state.start('spec text');
  });

  it('409 and 422 and 404 render distinct banner classes', async () => {
    await harness.state.exportProgram();
    harness.view.render();
    let banner = harness.root.querySelector('.banner');
    expect(banner?.className).toContain('banner-409');
    expect(banner?.textContent).toContain('not closed');

    await harness.state.submitLaw(0, 'assign z := 0');
    harness.view.render();
    banner = harness.root.querySelector('.banner');
    expect(banner?.className).toContain('banner-422');
    expect(banner?.textContent).toContain("'z'");

    await harness.state.guard(async () => {
      await harness.state.api.getTree('nope');
    });
    harness.view.render();
    banner = harness.root.querySelector('.banner');
    expect(banner?.className).toContain('banner-404');
  });

  it('a failed mutation leaves the mirrored view unchanged', async () => {
    harness.view.render();
    const before = harness.root.querySelector('.tree')!.innerHTML;
    await harness.state.submitLaw(0, 'assign z := 0');
    harness.view.render();
    const after = harness.root.querySelector('.tree')!.innerHTML;
    expect(after).toBe(before);
  });
});

describe('no hidden state', () => {
  it('refetching the tree reproduces the identical view', async () => {
    const harness = makeHarness(BASE_ROUTES);
    await harness.state.start('spec text');
    harness.view.render();
    const first = harness.root.innerHTML;
    await harness.state.refresh();  // what a page reload would do
    harness.view.render();
    expect(harness.root.innerHTML).toBe(first);
  });
});
