/** Wire types mirroring the session API's tree JSON. */

export interface ParamDto {
  name: string;
  type: string;
  kind: 'variant' | 'constant';
}

export interface ObligationDto {
  label: string;
  hypothesis: string;
  conclusion: string;
  status: 'pending' | 'proved' | 'refuted' | 'unknown';
  backend?: string;
  counterexample?: Record<string, string>;
  reason?: string;
}

export interface FailureDto {
  law: string;
  reason: string;
}

export interface NodeDto {
  id: number;
  path: string;
  parent: number | null;
  frame: ParamDto[];
  constants: ParamDto[];
  pre: string;
  post: string;
  law: string | null;
  law_kind: string | null;
  code: string | null;
  status: 'open' | 'refined' | 'closed' | 'failed';
  obligations: ObligationDto[];
  failures: FailureDto[];
  children: number[];
}

export interface DefDto {
  name: string;
  arity: number;
}

export interface TreeDto {
  root: number;
  defs: DefDto[];
  nodes: NodeDto[];
}

export interface VerifyResultDto {
  results: ObligationDto[];
  closed: boolean;
}

export interface SuggestionDto {
  law: string;
  rationale: string;
}
