/** DOM rendering.  The whole workbench re-renders from the mirrored
 * tree on every change; the only local state is the law form being
 * typed.  Server errors surface verbatim: 422 diagnostics inline at
 * the form, other codes in a banner with a per-code style. */

import { LAW_FORMS, LawFormModel } from './lawform.js';
import type { WorkbenchState } from './state.js';
import type { NodeDto, ObligationDto } from './types.js';

export class WorkbenchView {
  private form: LawFormModel | null = null;
  private formNode: number | null = null;
  private serverDiagnostic: string | null = null;

  constructor(private state: WorkbenchState, private root: HTMLElement,
              private doc: Document) {
    state.onChange(() => this.render());
  }

  element(tag: string, className?: string, text?: string): HTMLElement {
    const el = this.doc.createElement(tag);
    if (className) el.className = className;
    if (text !== undefined) el.textContent = text;
    return el;
  }

  render(): void {
    this.root.textContent = '';
    if (this.state.banner) {
      const b = this.state.banner;
      const banner = this.element('div', `banner banner-${b.code}`,
                                  `error ${b.code}: ${b.message}`);
      banner.setAttribute('data-code', String(b.code));
      this.root.appendChild(banner);
    }
    if (!this.state.tree) {
      this.root.appendChild(this.renderStart());
      return;
    }
    const layout = this.element('div', 'layout');
    layout.appendChild(this.renderTreePanel());
    layout.appendChild(this.renderDetailPanel());
    this.root.appendChild(layout);
    this.root.appendChild(this.renderProgramPanel());
  }

  private renderStart(): HTMLElement {
    const panel = this.element('div', 'start-panel');
    panel.appendChild(this.element('h1', undefined, 'refinery workbench'));
    const spec = this.element('textarea', 'spec-input') as HTMLTextAreaElement;
    spec.id = 'spec-input';
    spec.rows = 8;
    spec.placeholder = 'name: ...\nvariants: x: int\npre: ...\npost: ...';
    panel.appendChild(spec);
    const start = this.element('button', 'start-session', 'start session');
    start.id = 'start-session';
    start.addEventListener('click', () => {
      void this.state.start(spec.value);
    });
    panel.appendChild(start);
    return panel;
  }

  private renderTreePanel(): HTMLElement {
    const panel = this.element('div', 'tree-panel');
    panel.appendChild(this.element('h2', undefined, 'specification tree'));
    const list = this.element('ul', 'tree');
    const tree = this.state.tree!;
    const render = (id: number, depth: number) => {
      const node = this.state.node(id)!;
      const item = this.element('li', `tree-node status-${node.status}`);
      item.setAttribute('data-node', String(id));
      item.setAttribute('data-path', node.path);
      if (this.state.selected === id) item.className += ' selected';
      item.style.marginLeft = `${depth * 14}px`;
      const badge = this.element('span', 'badge', node.status);
      const label = this.element('span', 'label',
                                 ` ${node.path}  ${node.law ?? '[open]'}`);
      item.appendChild(badge);
      item.appendChild(label);
      item.addEventListener('click', (event) => {
        event.stopPropagation();
        this.state.select(id);
      });
      list.appendChild(item);
      for (const child of node.children) render(child, depth + 1);
    };
    render(tree.root, 0);
    panel.appendChild(list);
    return panel;
  }

  private renderDetailPanel(): HTMLElement {
    const panel = this.element('div', 'detail-panel');
    const node = this.state.selectedNode;
    if (!node) {
      panel.appendChild(this.element('p', undefined, 'select a node'));
      return panel;
    }
    panel.appendChild(this.element('h2', undefined,
                                   `${node.path} (${node.status})`));
    const decls = this.element('div', 'decls');
    decls.appendChild(this.element('div', 'frame',
      'frame: ' + node.frame.map((p) => `${p.name}: ${p.type}`).join(', ')));
    if (node.constants.length) {
      decls.appendChild(this.element('div', 'constants',
        'constants: ' + node.constants.map((p) => `${p.name}: ${p.type}`).join(', ')));
    }
    panel.appendChild(decls);
    panel.appendChild(this.element('div', 'pre', `pre:  ${node.pre}`));
    panel.appendChild(this.element('div', 'post', `post: ${node.post}`));

    if (node.failures.length) {
      const failures = this.element('div', 'failures');
      failures.appendChild(this.element('h3', undefined, 'rejected proposals'));
      for (const failure of node.failures) {
        failures.appendChild(this.element('div', 'failure',
                                          `${failure.law}: ${failure.reason}`));
      }
      panel.appendChild(failures);
    }

    if (node.obligations.length) panel.appendChild(this.renderObligations(node));

    if (node.status === 'open') {
      panel.appendChild(this.renderLawForm(node));
    } else {
      const actions = this.element('div', 'actions');
      const verify = this.element('button', 'verify', 'verify');
      verify.addEventListener('click', () => {
        void this.state.verifyNode(node.id);
      });
      actions.appendChild(verify);
      const backtrack = this.element('button', 'backtrack', 'backtrack');
      backtrack.addEventListener('click', () => {
        void this.state.backtrack(node.id, 'user request');
      });
      actions.appendChild(backtrack);
      panel.appendChild(actions);
      if (node.code) {
        panel.appendChild(this.element('pre', 'code-fragment', node.code));
      }
    }
    return panel;
  }

  private renderObligations(node: NodeDto): HTMLElement {
    const box = this.element('div', 'obligations');
    box.appendChild(this.element('h3', undefined, 'proof obligations'));
    for (const ob of node.obligations) {
      const row = this.element('div', `obligation obligation-${ob.status}`);
      row.appendChild(this.element('span', 'ob-label',
        `${ob.label}: ${ob.status}` + (ob.backend ? ` (${ob.backend})` : '')));
      row.appendChild(this.element('div', 'ob-formula',
                                   `${ob.hypothesis} -> ${ob.conclusion}`));
      if (ob.counterexample) row.appendChild(this.renderCounterexample(ob));
      if (ob.reason) {
        row.appendChild(this.element('div', 'ob-reason', ob.reason));
      }
      box.appendChild(row);
    }
    return box;
  }

  private renderCounterexample(ob: ObligationDto): HTMLElement {
    const panel = this.element('div', 'counterexample');
    panel.appendChild(this.element('h4', undefined, 'counterexample'));
    for (const [name, value] of Object.entries(ob.counterexample!)) {
      const binding = this.element('div', 'cex-binding', `${name} := ${value}`);
      binding.setAttribute('data-name', name);
      binding.setAttribute('data-value', value);
      panel.appendChild(binding);
    }
    return panel;
  }

  private renderLawForm(node: NodeDto): HTMLElement {
    if (this.form === null || this.formNode !== node.id) {
      this.form = new LawFormModel(this.state.envOf(node));
      this.formNode = node.id;
      this.serverDiagnostic = null;
    }
    const form = this.form;
    const box = this.element('div', 'law-form');
    box.appendChild(this.element('h3', undefined, 'apply a law'));

    const kind = this.element('select', 'law-kind') as HTMLSelectElement;
    kind.id = 'law-kind';
    for (const law of LAW_FORMS) {
      const option = this.doc.createElement('option') as HTMLOptionElement;
      option.value = law.kind;
      option.textContent = `${law.kind} — ${law.title}`;
      if (law.kind === form.kind) option.selected = true;
      kind.appendChild(option);
    }
    kind.addEventListener('change', () => {
      form.setKind(kind.value);
      this.serverDiagnostic = null;
      this.render();
    });
    box.appendChild(kind);

    for (const field of form.spec.fields) {
      const row = this.element('div', 'form-row');
      const label = this.element('label', undefined, field.label);
      label.setAttribute('for', `field-${field.key}`);
      row.appendChild(label);
      const input = this.element('input', 'field-input') as HTMLInputElement;
      input.id = `field-${field.key}`;
      input.value = form.values[field.key] ?? '';
      input.addEventListener('input', () => {
        form.setField(field.key, input.value);
        this.serverDiagnostic = null;
        this.refreshFormValidity(box, form);
      });
      row.appendChild(input);
      const diag = this.element('span', 'diagnostic');
      diag.id = `diag-${field.key}`;
      diag.textContent = form.diagnostic(field.key) ?? '';
      row.appendChild(diag);
      box.appendChild(row);
    }

    if (this.serverDiagnostic) {
      box.appendChild(this.element('div', 'diagnostic server-diagnostic',
                                   this.serverDiagnostic));
    }

    const actions = this.element('div', 'actions');
    const submit = this.element(
      'button', 'submit-law', 'apply and verify') as HTMLButtonElement;
    submit.id = 'submit-law';
    submit.disabled = !form.valid;
    submit.addEventListener('click', () => {
      void (async () => {
        const ok = await this.state.submitLaw(node.id, form.buildLine());
        if (!ok && this.state.banner?.code === 422) {
          // keep the form, show the server's diagnostics at it
          this.form = form;
          this.formNode = node.id;
          this.serverDiagnostic = this.state.banner.message;
          this.render();
        }
      })();
    });
    actions.appendChild(submit);

    const suggest = this.element('button', 'suggest', 'suggest');
    suggest.id = 'suggest-law';
    suggest.addEventListener('click', () => {
      void (async () => {
        const proposal = await this.state.suggest(node.id);
        if (proposal) {
          form.loadLine(proposal.law);
          this.render();
        }
      })();
    });
    actions.appendChild(suggest);
    box.appendChild(actions);
    return box;
  }

  private refreshFormValidity(box: HTMLElement, form: LawFormModel): void {
    for (const field of form.spec.fields) {
      const diag = box.querySelector(`#diag-${field.key}`);
      if (diag) diag.textContent = form.diagnostic(field.key) ?? '';
    }
    const submit = box.querySelector('#submit-law') as HTMLButtonElement | null;
    if (submit) submit.disabled = !form.valid;
  }

  private renderProgramPanel(): HTMLElement {
    const panel = this.element('div', 'program-panel');
    const button = this.element('button', 'export', 'export program');
    button.id = 'export-program';
    button.addEventListener('click', () => {
      void this.state.exportProgram();
    });
    panel.appendChild(button);
    if (this.state.program !== null) {
      const code = this.element('pre', 'program', this.state.program);
      code.id = 'program-text';
      panel.appendChild(code);
    }
    return panel;
  }
}
