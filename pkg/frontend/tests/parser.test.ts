import { describe, expect, it } from 'vitest';

import {
  checkBindings,
  checkFormula,
  checkLawLine,
  checkProgExpr,
  splitMarkers,
  type Env,
} from '../src/parser.js';

const SQRT_ENV: Env = {
  params: [
    { name: 'x', type: 'float', kind: 'variant' },
    { name: 'y', type: 'float', kind: 'variant' },
    { name: 'N', type: 'float', kind: 'constant' },
    { name: 'e', type: 'float', kind: 'constant' },
  ],
  defs: [],
};

const ARR_ENV: Env = {
  params: [
    { name: 's', type: 'array int', kind: 'variant' },
    { name: 'i', type: 'nat', kind: 'variant' },
    { name: 'n', type: 'nat', kind: 'constant' },
    { name: 'c', type: 'int', kind: 'constant' },
  ],
  defs: [],
};

describe('formula grammar', () => {
  it('accepts the running example formulas', () => {
    expect(checkFormula('x*x <= N /\\ N < y*y /\\ y <= x+e', SQRT_ENV)).toBeNull();
    expect(checkFormula('x*x <= N < y*y', SQRT_ENV)).toBeNull();
    expect(checkFormula('N >= 0 /\\ e > 0', SQRT_ENV)).toBeNull();
    expect(checkFormula('x = x_0 /\\ y = y_0', SQRT_ENV)).toBeNull();
  });

  it('accepts quantifiers, slices, and builtins', () => {
    expect(checkFormula('forall (k:nat), k < n -> s[k] = c', ARR_ENV)).toBeNull();
    expect(checkFormula('len(s) = n /\\ s[0:n] = s[0:n]', ARR_ENV)).toBeNull();
    expect(checkFormula('exists (q:int), c = q * 2', ARR_ENV)).toBeNull();
    expect(checkFormula('store(s, 0, c)[0] = c', ARR_ENV)).toBeNull();
  });

  it('rejects unknown names with the offending identifier', () => {
    expect(checkFormula('x + z < y', SQRT_ENV)).toContain("'z'");
  });

  it('rejects syntax junk', () => {
    expect(checkFormula('x + + y', SQRT_ENV)).not.toBeNull();
    expect(checkFormula('forall x, x > 0', SQRT_ENV)).not.toBeNull();
    expect(checkFormula('', SQRT_ENV)).not.toBeNull();
  });

  it('resolves definitions with their arity', () => {
    const env: Env = { ...ARR_ENV, defs: [{ name: 'divides', arity: 2 }] };
    expect(checkFormula('divides(2, c)', env)).toBeNull();
    expect(checkFormula('divides(2)', env)).toContain('2 argument');
  });
});

describe('program expression grammar', () => {
  it('accepts guards and arithmetic', () => {
    expect(checkProgExpr('(x + y) / 2 * (x + y) / 2 > N', SQRT_ENV)).toBeNull();
    expect(checkProgExpr('y > x + e', SQRT_ENV)).toBeNull();
    expect(checkProgExpr('i < n and s[i] != c', ARR_ENV)).toBeNull();
  });

  it('rejects specification-only syntax', () => {
    expect(checkProgExpr('x /\\ y', SQRT_ENV)).not.toBeNull();
    expect(checkProgExpr('forall (i:nat), x > 0', SQRT_ENV)).not.toBeNull();
  });
});

describe('bindings', () => {
  it('accepts plain and indexed targets', () => {
    expect(checkBindings('x := 0, y := N + 1', SQRT_ENV)).toBeNull();
    expect(checkBindings('s[i+1] := s[i] + c', ARR_ENV)).toBeNull();
  });

  it('rejects unknown and constant targets', () => {
    expect(checkBindings('z := 0', SQRT_ENV)).toContain("'z'");
    expect(checkBindings('N := 0', SQRT_ENV)).toContain('constant');
  });
});

describe('law lines', () => {
  const LINES = [
    'skip',
    'initskip',
    'seq mid: x*x <= N /\\ N < y*y /\\ e > 0',
    'assign x := 0, y := N + 1',
    'followassign y := x + e',
    'ifelse G: (x + y) / 2 * (x + y) / 2 > N',
    'iterate I: x*x <= N /\\ N < y*y /\\ e > 0 G: y > x + e V: y - x mode: initialised',
    'flexseq A: N >= 0 B: x*x <= N C: x*x <= N D: x*x <= N',
    'expand z: nat y0: z_0',
  ];

  it.each(LINES)('accepts %s', (line) => {
    expect(checkLawLine(line, SQRT_ENV)).toBeNull();
  });

  it('accepts traverse against an array frame', () => {
    const line = 'traverse s k m: 0 n: n P: len(s) = n /\\ '
      + '(forall (j:nat), j < k -> s[j] = c)';
    expect(checkLawLine(line, ARR_ENV)).toBeNull();
  });

  it('rejects what the server would reject', () => {
    expect(checkLawLine('assign z := 0', SQRT_ENV)).toContain("'z'");
    expect(checkLawLine('seq', SQRT_ENV)).toContain('mid');
    expect(checkLawLine('iterate I: true G: y > x', SQRT_ENV)).toContain('V');
    expect(checkLawLine('traverse x i m: 0 n: 1 P: true', SQRT_ENV))
      .toContain('not an array');
    expect(checkLawLine('conjure something', SQRT_ENV)).toContain('unknown law');
  });
});

describe('marker splitting', () => {
  it('ignores colons inside brackets and parens', () => {
    const fields = splitMarkers(
      'I: (forall (j:nat), s[0:j] = s[0:j]) G: i < n V: n - i',
      ['I', 'G', 'V', 'mode']);
    expect(fields['I']).toBe('(forall (j:nat), s[0:j] = s[0:j])');
    expect(fields['G']).toBe('i < n');
    expect(fields['V']).toBe('n - i');
  });
});
