import { describe, expect, it } from 'vitest';

import { LawFormModel } from '../src/lawform.js';
import type { Env } from '../src/parser.js';

const ENV: Env = {
  params: [
    { name: 'x', type: 'float', kind: 'variant' },
    { name: 'y', type: 'float', kind: 'variant' },
    { name: 'N', type: 'float', kind: 'constant' },
    { name: 'e', type: 'float', kind: 'constant' },
  ],
  defs: [],
};

describe('LawFormModel', () => {
  it('skip is valid with no fields', () => {
    const form = new LawFormModel(ENV);
    form.setKind('skip');
    expect(form.valid).toBe(true);
    expect(form.buildLine()).toBe('skip');
  });

  it('submit stays disabled until every field parses', () => {
    const form = new LawFormModel(ENV);
    form.setKind('seq');
    expect(form.valid).toBe(false);
    form.setField('mid', 'x*x <= N /\\ N <');
    expect(form.valid).toBe(false);
    expect(form.diagnostic('mid')).not.toBeNull();
    form.setField('mid', 'x*x <= N /\\ N < y*y');
    expect(form.diagnostic('mid')).toBeNull();
    expect(form.valid).toBe(true);
    expect(form.buildLine()).toBe('seq mid: x*x <= N /\\ N < y*y');
  });

  it('builds the iterate line with its mode', () => {
    const form = new LawFormModel(ENV);
    form.setKind('iterate');
    form.setField('I', 'x*x <= N /\\ N < y*y /\\ e > 0');
    form.setField('G', 'y > x + e');
    form.setField('V', 'y - x');
    expect(form.valid).toBe(true);
    expect(form.buildLine()).toBe(
      'iterate I: x*x <= N /\\ N < y*y /\\ e > 0 G: y > x + e V: y - x '
      + 'mode: initialised');
  });

  it('assignment diagnostics name the bad target', () => {
    const form = new LawFormModel(ENV);
    form.setKind('assign');
    form.setField('bindings', 'z := 0');
    expect(form.valid).toBe(false);
    expect(form.diagnostic('bindings')).toContain("'z'");
    form.setField('bindings', 'x := 0, y := N + 1');
    expect(form.valid).toBe(true);
    expect(form.buildLine()).toBe('assign x := 0, y := N + 1');
  });

  it('prefills from a suggestion line and round-trips', () => {
    const form = new LawFormModel(ENV);
    const line = 'iterate I: x*x <= N /\\ N < y*y /\\ e > 0 G: y > x + e '
      + 'V: y - x mode: initialised';
    form.loadLine(line);
    expect(form.kind).toBe('iterate');
    expect(form.values['I']).toBe('x*x <= N /\\ N < y*y /\\ e > 0');
    expect(form.values['mode']).toBe('initialised');
    expect(form.valid).toBe(true);
    expect(form.buildLine()).toBe(line);
  });

  it('prefills a skip suggestion', () => {
    const form = new LawFormModel(ENV);
    form.loadLine('skip');
    expect(form.kind).toBe('skip');
    expect(form.valid).toBe(true);
  });
});
