/** One form per law: its text fields, their live diagnostics, and the
 * script line it builds.  Submission is allowed only when every field
 * parses with the same grammar the server uses. */

import {
  checkBindings,
  checkFormula,
  checkLawLine,
  checkName,
  checkProgExpr,
  checkTypeName,
  splitMarkers,
  type Env,
} from './parser.js';
import type { ParamDto } from './types.js';

export type FieldGrammar =
  'formula' | 'progexpr' | 'bindings' | 'name' | 'type' | 'mode' | 'call';

export interface FieldSpec {
  key: string;
  label: string;
  grammar: FieldGrammar;
}

export interface LawSpec {
  kind: string;
  title: string;
  fields: FieldSpec[];
}

export const LAW_FORMS: LawSpec[] = [
  { kind: 'skip', title: 'skip', fields: [] },
  { kind: 'initskip', title: 'initialised skip', fields: [] },
  {
    kind: 'seq', title: 'sequential composition',
    fields: [{ key: 'mid', label: 'mid', grammar: 'formula' }],
  },
  {
    kind: 'flexseq', title: 'flexible sequential composition',
    fields: [
      { key: 'A', label: 'A', grammar: 'formula' },
      { key: 'B', label: 'B', grammar: 'formula' },
      { key: 'C', label: 'C', grammar: 'formula' },
      { key: 'D', label: 'D', grammar: 'formula' },
    ],
  },
  {
    kind: 'assign', title: 'assignment',
    fields: [{ key: 'bindings', label: 'bindings', grammar: 'bindings' }],
  },
  {
    kind: 'followassign', title: 'following assignment',
    fields: [{ key: 'bindings', label: 'bindings', grammar: 'bindings' }],
  },
  {
    kind: 'ifelse', title: 'alternation',
    fields: [{ key: 'G', label: 'guard G', grammar: 'progexpr' }],
  },
  {
    kind: 'iterate', title: 'iteration',
    fields: [
      { key: 'I', label: 'invariant I', grammar: 'formula' },
      { key: 'G', label: 'guard G', grammar: 'progexpr' },
      { key: 'V', label: 'variant V', grammar: 'formula' },
      { key: 'mode', label: 'mode', grammar: 'mode' },
    ],
  },
  {
    kind: 'traverse', title: 'traverse',
    fields: [
      { key: 'array', label: 'array', grammar: 'name' },
      { key: 'index', label: 'index', grammar: 'name' },
      { key: 'm', label: 'from m', grammar: 'formula' },
      { key: 'n', label: 'to n', grammar: 'formula' },
      { key: 'P', label: 'property P(l, i)', grammar: 'formula' },
    ],
  },
  {
    kind: 'expand', title: 'expand frame',
    fields: [
      { key: 'name', label: 'new variant', grammar: 'name' },
      { key: 'type', label: 'type', grammar: 'type' },
      { key: 'y0', label: 'initial value y0', grammar: 'formula' },
    ],
  },
  {
    kind: 'proccall', title: 'procedure call',
    fields: [{ key: 'call', label: 'name(args)', grammar: 'call' }],
  },
];

export class LawFormModel {
  kind = 'skip';
  values: Record<string, string> = {};

  constructor(private env: Env) {}

  get spec(): LawSpec {
    return LAW_FORMS.find((l) => l.kind === this.kind)!;
  }

  setKind(kind: string): void {
    if (!LAW_FORMS.some((l) => l.kind === kind)) {
      throw new Error(`unknown law kind '${kind}'`);
    }
    this.kind = kind;
    this.values = kind === 'iterate' ? { mode: 'initialised' } : {};
  }

  setField(key: string, value: string): void {
    this.values[key] = value;
  }

  /** Per-field diagnostic or null; the same grammar the server applies. */
  diagnostic(key: string): string | null {
    const field = this.spec.fields.find((f) => f.key === key);
    if (!field) return null;
    const value = this.values[key] ?? '';
    switch (field.grammar) {
      case 'formula': {
        const extra: ParamDto[] = [];
        if (this.kind === 'traverse' && key === 'P') {
          const index = (this.values['index'] ?? '').trim();
          if (index) extra.push({ name: index, type: 'nat', kind: 'variant' });
        }
        if (this.kind === 'expand' && key === 'y0') {
          const name = (this.values['name'] ?? '').trim();
          const type = (this.values['type'] ?? '').trim();
          if (name && type) extra.push({ name, type, kind: 'variant' });
        }
        return checkFormula(value, this.env, extra);
      }
      case 'progexpr':
        return checkProgExpr(value, this.env);
      case 'bindings':
        return checkBindings(value, this.env);
      case 'name':
        if (this.kind === 'traverse' && key === 'array') {
          const bad = checkName(value, this.env);
          if (bad) return bad;
          const param = this.env.params.find((p) => p.name === value.trim());
          if (!param) return `unknown array '${value.trim()}'`;
          if (!param.type.startsWith('array')) return `'${value.trim()}' is not an array`;
          return null;
        }
        return checkName(value, this.env, this.kind === 'expand');
      case 'type':
        return checkTypeName(value);
      case 'mode':
        return ['initialised', 'flexible'].includes((value || 'initialised').trim())
          ? null : `unknown mode '${value}'`;
      case 'call': {
        const line = `proccall ${value.trim()}`;
        return checkLawLine(line, this.env) && 'expected name(args) with program expressions';
      }
    }
  }

  get valid(): boolean {
    if (this.spec.fields.some((f) => this.diagnostic(f.key) !== null)) return false;
    return checkLawLine(this.buildLine(), this.env) === null;
  }

  /** The refinement-script line this form submits. */
  buildLine(): string {
    const v = (key: string) => (this.values[key] ?? '').trim();
    switch (this.kind) {
      case 'skip': return 'skip';
      case 'initskip': return 'initskip';
      case 'seq': return `seq mid: ${v('mid')}`;
      case 'flexseq':
        return `flexseq A: ${v('A')} B: ${v('B')} C: ${v('C')} D: ${v('D')}`;
      case 'assign': return `assign ${v('bindings')}`;
      case 'followassign': return `followassign ${v('bindings')}`;
      case 'ifelse': return `ifelse G: ${v('G')}`;
      case 'iterate':
        return `iterate I: ${v('I')} G: ${v('G')} V: ${v('V')} `
          + `mode: ${v('mode') || 'initialised'}`;
      case 'traverse':
        return `traverse ${v('array')} ${v('index')} m: ${v('m')} `
          + `n: ${v('n')} P: ${v('P')}`;
      case 'expand':
        return `expand ${v('name')}: ${v('type')} y0: ${v('y0')}`;
      case 'proccall': return `proccall ${v('call')}`;
      default: throw new Error(`unknown law kind '${this.kind}'`);
    }
  }

  /** Prefill from a suggestion's script line. */
  loadLine(line: string): void {
    const trimmed = line.trim();
    const space = trimmed.indexOf(' ');
    const word = space < 0 ? trimmed : trimmed.slice(0, space);
    const rest = space < 0 ? '' : trimmed.slice(space + 1).trim();
    this.setKind(word);
    switch (word) {
      case 'seq':
        this.values = { mid: splitMarkers(rest, ['mid'])['mid'] ?? '' };
        break;
      case 'flexseq': {
        const f = splitMarkers(rest, ['A', 'B', 'C', 'D']);
        this.values = { A: f['A'] ?? '', B: f['B'] ?? '', C: f['C'] ?? '',
                        D: f['D'] ?? '' };
        break;
      }
      case 'assign':
      case 'followassign':
        this.values = { bindings: rest };
        break;
      case 'ifelse':
        this.values = { G: splitMarkers(rest, ['G'])['G'] ?? '' };
        break;
      case 'iterate': {
        const f = splitMarkers(rest, ['I', 'G', 'V', 'mode']);
        this.values = { I: f['I'] ?? '', G: f['G'] ?? '', V: f['V'] ?? '',
                        mode: f['mode'] ?? 'initialised' };
        break;
      }
      case 'traverse': {
        const m = rest.indexOf('m:');
        const names = (m < 0 ? rest : rest.slice(0, m)).trim().split(/\s+/);
        const f = splitMarkers(m < 0 ? '' : rest.slice(m), ['m', 'n', 'P']);
        this.values = { array: names[0] ?? '', index: names[1] ?? '',
                        m: f['m'] ?? '', n: f['n'] ?? '', P: f['P'] ?? '' };
        break;
      }
      case 'expand': {
        const f = splitMarkers(rest, ['y0']);
        const decl = f[''] ?? '';
        const colon = decl.indexOf(':');
        this.values = {
          name: colon < 0 ? decl.trim() : decl.slice(0, colon).trim(),
          type: colon < 0 ? '' : decl.slice(colon + 1).trim(),
          y0: f['y0'] ?? '',
        };
        break;
      }
      case 'proccall':
        this.values = { call: rest };
        break;
      default:
        this.values = {};
    }
  }
}
