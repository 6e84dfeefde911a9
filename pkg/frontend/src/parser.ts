/** Local validation with the same grammar the server's scripts use:
 * specification formulas (with chained relations, quantifiers, slices,
 * `x_0` markers), program expressions, and whole law lines.  Submission
 * stays disabled until these parsers accept every field, so the server
 * sees only well-formed proposals. */

import type { DefDto, ParamDto } from './types.js';

export interface Env {
  params: ParamDto[];
  defs: DefDto[];
}

export class ParseFailure extends Error {
  constructor(message: string, public pos: number) {
    super(message);
  }
}

interface Token {
  kind: 'num' | 'name' | 'op' | 'end';
  text: string;
  pos: number;
}

const TWO_CHAR = ['/\\', '\\/', '->', '<=', '>=', '<>', '==', '!=', ':='];
const ONE_CHAR = '~<>=+-*/()[]:,!';

export function tokenize(text: string): Token[] {
  const tokens: Token[] = [];
  let i = 0;
  while (i < text.length) {
    const c = text[i];
    if (/\s/.test(c)) { i += 1; continue; }
    const two = text.slice(i, i + 2);
    if (TWO_CHAR.includes(two)) {
      tokens.push({ kind: 'op', text: two, pos: i });
      i += 2;
      continue;
    }
    if (/[0-9]/.test(c)) {
      let j = i;
      while (j < text.length && /[0-9.]/.test(text[j])) j += 1;
      tokens.push({ kind: 'num', text: text.slice(i, j), pos: i });
      i = j;
      continue;
    }
    if (/[A-Za-z_]/.test(c)) {
      let j = i;
      while (j < text.length && /[A-Za-z0-9_]/.test(text[j])) j += 1;
      tokens.push({ kind: 'name', text: text.slice(i, j), pos: i });
      i = j;
      continue;
    }
    if (ONE_CHAR.includes(c)) {
      tokens.push({ kind: 'op', text: c, pos: i });
      i += 1;
      continue;
    }
    throw new ParseFailure(`unexpected character '${c}'`, i);
  }
  tokens.push({ kind: 'end', text: '', pos: text.length });
  return tokens;
}

const REL_OPS = ['<', '<=', '=', '>', '>=', '<>'];
const CMP_OPS = ['==', '!=', '<', '<=', '>', '>='];
const TYPE_WORDS = ['bool', 'nat', 'int', 'float', 'array'];

class SpecParser {
  private pos = 0;
  private bound: string[] = [];

  constructor(private tokens: Token[], private env: Env) {}

  private peek(): Token { return this.tokens[this.pos]; }

  private advance(): Token { return this.tokens[this.pos++]; }

  private expect(text: string): Token {
    const t = this.peek();
    if (t.text !== text) {
      throw new ParseFailure(`expected '${text}', found '${t.text || 'end'}'`, t.pos);
    }
    return this.advance();
  }

  parseAll(): void {
    this.expr();
    const t = this.peek();
    if (t.kind !== 'end') throw new ParseFailure(`trailing input '${t.text}'`, t.pos);
  }

  expr(): void {
    const t = this.peek();
    if (t.kind === 'name' && (t.text === 'forall' || t.text === 'exists')) {
      this.quantified();
      return;
    }
    this.implication();
  }

  private quantified(): void {
    this.advance();
    this.expect('(');
    const name = this.peek();
    if (name.kind !== 'name') throw new ParseFailure('expected a bound name', name.pos);
    this.advance();
    this.expect(':');
    this.typeName();
    this.expect(')');
    this.expect(',');
    this.bound.push(name.text);
    try {
      this.expr();
    } finally {
      this.bound.pop();
    }
  }

  typeName(): void {
    let t = this.peek();
    if (t.kind !== 'name' || !TYPE_WORDS.includes(t.text)) {
      throw new ParseFailure(`expected a type, found '${t.text || 'end'}'`, t.pos);
    }
    while (t.text === 'array') {
      this.advance();
      t = this.peek();
      if (t.kind !== 'name' || !TYPE_WORDS.includes(t.text)) {
        throw new ParseFailure('expected an element type', t.pos);
      }
    }
    this.advance();
  }

  private implication(): void {
    this.disjunction();
    if (this.peek().text === '->') {
      this.advance();
      const t = this.peek();
      if (t.kind === 'name' && (t.text === 'forall' || t.text === 'exists')) {
        this.quantified();
      } else {
        this.implication();
      }
    }
  }

  private disjunction(): void {
    this.conjunction();
    while (this.peek().text === '\\/') {
      this.advance();
      this.conjunction();
    }
  }

  private conjunction(): void {
    this.negation();
    while (this.peek().text === '/\\') {
      this.advance();
      this.negation();
    }
  }

  private negation(): void {
    if (this.peek().text === '~') {
      this.advance();
      this.negation();
      return;
    }
    this.relation();
  }

  private relation(): void {
    this.arith();
    while (REL_OPS.includes(this.peek().text)) {
      this.advance();
      this.arith();
    }
  }

  private arith(): void {
    this.term();
    while (this.peek().text === '+' || this.peek().text === '-') {
      this.advance();
      this.term();
    }
  }

  private term(): void {
    this.factor();
    while (this.peek().text === '*' || this.peek().text === '/') {
      this.advance();
      this.factor();
    }
  }

  private factor(): void {
    if (this.peek().text === '-') {
      this.advance();
      this.factor();
      return;
    }
    this.postfix();
  }

  private postfix(): void {
    this.atom();
    for (;;) {
      const t = this.peek();
      if (t.text === '[') {
        this.advance();
        this.expr();
        if (this.peek().text === ':') {
          this.advance();
          this.expr();
        }
        this.expect(']');
      } else if (t.kind === 'name' && t.text === '_0') {
        this.advance();
      } else {
        return;
      }
    }
  }

  private atom(): void {
    const t = this.peek();
    if (t.kind === 'num') { this.advance(); return; }
    if (t.text === '(') {
      this.advance();
      this.expr();
      this.expect(')');
      return;
    }
    if (t.kind === 'name') {
      this.advance();
      this.nameRef(t);
      return;
    }
    throw new ParseFailure(`unexpected '${t.text || 'end'}'`, t.pos);
  }

  private nameRef(t: Token): void {
    const name = t.text;
    if (name === 'true' || name === 'false') return;
    const def = this.env.defs.find((d) => d.name === name);
    if (this.peek().text === '(' && (name === 'len' || name === 'store' || def)) {
      this.advance();
      let args = 1;
      this.expr();
      while (this.peek().text === ',') {
        this.advance();
        this.expr();
        args += 1;
      }
      this.expect(')');
      const want = name === 'len' ? 1 : name === 'store' ? 3 : def!.arity;
      if (args !== want) {
        throw new ParseFailure(`${name} takes ${want} argument(s)`, t.pos);
      }
      return;
    }
    if (this.resolves(name)) return;
    if (name.endsWith('_0') && name.length > 2 && this.resolves(name.slice(0, -2))) {
      return;
    }
    throw new ParseFailure(`unknown identifier '${name}'`, t.pos);
  }

  private resolves(name: string): boolean {
    return this.bound.includes(name) ||
      this.env.params.some((p) => p.name === name);
  }
}

class ProgParser {
  private pos = 0;

  constructor(private tokens: Token[], private env: Env) {}

  private peek(): Token { return this.tokens[this.pos]; }

  private advance(): Token { return this.tokens[this.pos++]; }

  private expect(text: string): void {
    const t = this.peek();
    if (t.text !== text) {
      throw new ParseFailure(`expected '${text}', found '${t.text || 'end'}'`, t.pos);
    }
    this.advance();
  }

  parseAll(): void {
    this.expr();
    const t = this.peek();
    if (t.kind !== 'end') throw new ParseFailure(`trailing input '${t.text}'`, t.pos);
  }

  expr(): void { this.or(); }

  private or(): void {
    this.and();
    while (this.peek().kind === 'name' && this.peek().text === 'or') {
      this.advance();
      this.and();
    }
  }

  private and(): void {
    this.not();
    while (this.peek().kind === 'name' && this.peek().text === 'and') {
      this.advance();
      this.not();
    }
  }

  private not(): void {
    if (this.peek().kind === 'name' && this.peek().text === 'not') {
      this.advance();
      this.not();
      return;
    }
    this.comparison();
  }

  private comparison(): void {
    this.arith();
    if (CMP_OPS.includes(this.peek().text)) {
      this.advance();
      this.arith();
    }
  }

  private arith(): void {
    this.term();
    while (this.peek().text === '+' || this.peek().text === '-') {
      this.advance();
      this.term();
    }
  }

  private term(): void {
    this.factor();
    while (this.peek().text === '*' || this.peek().text === '/') {
      this.advance();
      this.factor();
    }
  }

  private factor(): void {
    if (this.peek().text === '-') {
      this.advance();
      this.factor();
      return;
    }
    this.atom();
  }

  private atom(): void {
    const t = this.peek();
    if (t.kind === 'num') { this.advance(); return; }
    if (t.text === '(') {
      this.advance();
      this.expr();
      this.expect(')');
      return;
    }
    if (t.kind === 'name') {
      this.advance();
      if (t.text === 'true' || t.text === 'false') return;
      if (!this.env.params.some((p) => p.name === t.text)) {
        throw new ParseFailure(`unknown identifier '${t.text}'`, t.pos);
      }
      if (this.peek().text === '[') {
        this.advance();
        this.expr();
        if (this.peek().text === ':') {
          this.advance();
          this.expr();
        }
        this.expect(']');
      }
      return;
    }
    throw new ParseFailure(`unexpected '${t.text || 'end'}'`, t.pos);
  }
}

export function checkFormula(text: string, env: Env, extra: ParamDto[] = []): string | null {
  if (!text.trim()) return 'a formula is required';
  try {
    const scoped = { params: [...env.params, ...extra], defs: env.defs };
    new SpecParser(tokenize(text), scoped).parseAll();
    return null;
  } catch (err) {
    return err instanceof ParseFailure ? err.message : String(err);
  }
}

export function checkProgExpr(text: string, env: Env): string | null {
  if (!text.trim()) return 'an expression is required';
  try {
    new ProgParser(tokenize(text), env).parseAll();
    return null;
  } catch (err) {
    return err instanceof ParseFailure ? err.message : String(err);
  }
}

/** Split `x := e, a[i] := f` at top-level commas and validate each
 * binding's target (a frame variant, optionally indexed) and its
 * program-expression right-hand side. */
export function checkBindings(text: string, env: Env): string | null {
  if (!text.trim()) return 'at least one binding is required';
  const parts = splitTopLevel(text, ',');
  for (const part of parts) {
    const idx = part.indexOf(':=');
    if (idx < 0) return `binding needs ':=' in '${part.trim()}'`;
    let target = part.slice(0, idx).trim();
    const rhs = part.slice(idx + 2);
    let indexText: string | null = null;
    const bracket = target.indexOf('[');
    if (bracket >= 0) {
      if (!target.endsWith(']')) return `bad indexed target '${target}'`;
      indexText = target.slice(bracket + 1, -1);
      target = target.slice(0, bracket).trim();
    }
    const param = env.params.find((p) => p.name === target);
    if (!param) return `unknown assignment target '${target}'`;
    if (param.kind === 'constant') return `cannot assign to constant '${target}'`;
    if (indexText !== null) {
      const bad = checkProgExpr(indexText, env);
      if (bad) return `bad index for '${target}': ${bad}`;
    }
    const badRhs = checkProgExpr(rhs, env);
    if (badRhs) return badRhs;
  }
  return null;
}

export function checkName(text: string, env: Env, mustBeFresh = false): string | null {
  const name = text.trim();
  if (!/^[A-Za-z_][A-Za-z0-9_]*$/.test(name)) return 'expected a plain name';
  const known = env.params.some((p) => p.name === name);
  if (mustBeFresh && known) return `'${name}' is already declared`;
  return null;
}

export function checkTypeName(text: string): string | null {
  try {
    const parser = new SpecParser(tokenize(text), { params: [], defs: [] });
    parser.typeName();
    return null;
  } catch (err) {
    return err instanceof ParseFailure ? err.message : String(err);
  }
}

export function splitTopLevel(text: string, sep: string): string[] {
  const parts: string[] = [];
  let depth = 0;
  let start = 0;
  for (let i = 0; i < text.length; i += 1) {
    const c = text[i];
    if (c === '(' || c === '[') depth += 1;
    else if (c === ')' || c === ']') depth -= 1;
    else if (c === sep && depth === 0) {
      parts.push(text.slice(start, i));
      start = i + 1;
    }
  }
  parts.push(text.slice(start));
  return parts;
}

/** Split a law line's tail at top-level `marker:` keywords, mirroring
 * the server's script grammar; the chunk before the first marker is
 * returned under ''. */
export function splitMarkers(text: string, markers: string[]): Record<string, string> {
  const out: Record<string, string> = {};
  let depth = 0;
  let prevKey = '';
  let prevEnd = 0;
  let i = 0;
  while (i < text.length) {
    const c = text[i];
    if (c === '(' || c === '[') { depth += 1; i += 1; continue; }
    if (c === ')' || c === ']') { depth -= 1; i += 1; continue; }
    if (depth === 0 && /[A-Za-z_]/.test(c)) {
      let j = i;
      while (j < text.length && /[A-Za-z0-9_]/.test(text[j])) j += 1;
      const word = text.slice(i, j);
      const boundary = i === 0 || !/[A-Za-z0-9_]/.test(text[i - 1]);
      if (text[j] === ':' && markers.includes(word) && boundary) {
        out[prevKey] = text.slice(prevEnd, i).trim();
        prevKey = word;
        prevEnd = j + 1;
        i = j + 1;
        continue;
      }
      i = j;
      continue;
    }
    i += 1;
  }
  out[prevKey] = text.slice(prevEnd).trim();
  return out;
}

/** Validate one whole refinement-script line against the node's
 * declarations; returns null when the server should accept it. */
export function checkLawLine(line: string, env: Env): string | null {
  const trimmed = line.trim();
  if (!trimmed) return 'empty law line';
  const space = trimmed.indexOf(' ');
  const word = space < 0 ? trimmed : trimmed.slice(0, space);
  const rest = space < 0 ? '' : trimmed.slice(space + 1).trim();
  switch (word) {
    case 'skip':
    case 'initskip':
      return rest ? `unexpected parameters '${rest}'` : null;
    case 'seq': {
      const fields = splitMarkers(rest, ['mid']);
      if (!fields['mid']) return 'seq needs a mid: section';
      return checkFormula(fields['mid'], env);
    }
    case 'flexseq': {
      const fields = splitMarkers(rest, ['A', 'B', 'C', 'D']);
      for (const key of ['A', 'B', 'C', 'D']) {
        if (!fields[key]) return `flexseq needs a ${key}: section`;
        const bad = checkFormula(fields[key], env);
        if (bad) return `${key}: ${bad}`;
      }
      return null;
    }
    case 'assign':
    case 'followassign':
      return checkBindings(rest, env);
    case 'ifelse': {
      const fields = splitMarkers(rest, ['G']);
      if (!fields['G']) return 'ifelse needs a G: section';
      return checkProgExpr(fields['G'], env);
    }
    case 'iterate': {
      const fields = splitMarkers(rest, ['I', 'G', 'V', 'mode']);
      for (const key of ['I', 'G', 'V']) {
        if (!fields[key]) return `iterate needs a ${key}: section`;
      }
      return checkFormula(fields['I'], env)
        ?? checkProgExpr(fields['G'], env)
        ?? checkFormula(fields['V'], env)
        ?? (fields['mode'] && !['initialised', 'flexible'].includes(fields['mode'])
          ? `unknown mode '${fields['mode']}'` : null);
    }
    case 'traverse': {
      const m = rest.indexOf('m:');
      if (m < 0) return 'traverse needs an m: section';
      const names = rest.slice(0, m).trim().split(/\s+/);
      if (names.length !== 2) return 'traverse needs an array name and an index name';
      const [arrayName, indexName] = names;
      const arr = env.params.find((p) => p.name === arrayName);
      if (!arr) return `unknown array '${arrayName}'`;
      if (!arr.type.startsWith('array')) return `'${arrayName}' is not an array`;
      const fresh = checkName(indexName, env);
      if (fresh) return fresh;
      const fields = splitMarkers(rest.slice(m), ['m', 'n', 'P']);
      for (const key of ['m', 'n', 'P']) {
        if (!fields[key]) return `traverse needs a ${key}: section`;
      }
      const idxParam: ParamDto = { name: indexName, type: 'nat', kind: 'variant' };
      return checkFormula(fields['m'], env)
        ?? checkFormula(fields['n'], env)
        ?? checkFormula(fields['P'], env, [idxParam]);
    }
    case 'expand': {
      const fields = splitMarkers(rest, ['y0']);
      if (!fields['y0']) return 'expand needs a y0: section';
      const decl = fields[''] ?? '';
      const colon = decl.indexOf(':');
      if (colon < 0) return "expand needs 'name: type'";
      const name = decl.slice(0, colon).trim();
      const badName = checkName(name, env, true);
      if (badName) return badName;
      const badType = checkTypeName(decl.slice(colon + 1));
      if (badType) return badType;
      const param: ParamDto = { name, type: decl.slice(colon + 1).trim(), kind: 'variant' };
      return checkFormula(fields['y0'], env, [param]);
    }
    case 'proccall': {
      const open = rest.indexOf('(');
      if (open < 0 || !rest.endsWith(')')) return "proccall needs 'name(args)'";
      const inner = rest.slice(open + 1, -1).trim();
      if (!inner) return null;
      for (const part of splitTopLevel(inner, ',')) {
        const bad = checkProgExpr(part, env);
        if (bad) return bad;
      }
      return null;
    }
    default:
      return `unknown law '${word}'`;
  }
}
