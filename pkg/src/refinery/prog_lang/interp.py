"""Reference interpreter for the program language.

Numbers are exact rationals by default; binary64 mode evaluates all
arithmetic in machine floats and exists for testing floating-point
behaviour (a failing ``assert`` is how non-progress shows up there).
Execution is deterministic and step-counted so unproved programs
cannot hang the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ast import (
    Assert,
    Assign,
    Call,
    Hole,
    If,
    PBin,
    PBool,
    PIndex,
    PName,
    PNeg,
    PNot,
    PNum,
    PSlice,
    Pass,
    ProcDef,
    ProgError,
    ProgExpr,
    Seq,
    Statement,
    While,
)

DEFAULT_STEP_LIMIT = 10 ** 6

COMPLETED = "completed"
ASSERT_FAILED = "assert_failed"
STEP_LIMIT = "step_limit"


class InterpError(ProgError):
    pass


class DivByZero(InterpError):
    pass


class BadIndex(InterpError):
    pass


class UnboundVariable(InterpError):
    pass


class UndefinedProcedure(InterpError):
    pass


@dataclass
class RunOutcome:
    final: dict
    assert_count: int
    status: str  # completed | assert_failed | step_limit
    location: int | None = None      # line of the failing assert
    state: dict | None = None        # machine state at the failing assert

    @property
    def completed(self):
        return self.status == COMPLETED


class _AssertFailure(Exception):
    def __init__(self, location, state):
        self.location = location
        self.state = state


class _OutOfSteps(Exception):
    pass


class _Machine:
    def __init__(self, step_limit: int, float_mode: bool):
        self.steps_left = step_limit
        self.float_mode = float_mode
        self.procs: dict[str, ProcDef] = {}
        self.active_calls: set[str] = set()
        self.assert_count = 0

    def tick(self):
        if self.steps_left <= 0:
            raise _OutOfSteps
        self.steps_left -= 1

    # -- expressions --------------------------------------------------------

    def eval(self, e: ProgExpr, env: dict):
        if isinstance(e, PNum):
            return float(e.value) if self.float_mode else e.value
        if isinstance(e, PBool):
            return e.value
        if isinstance(e, PName):
            if e.name not in env:
                raise UnboundVariable(f"unbound variable {e.name!r}")
            return env[e.name]
        if isinstance(e, PNeg):
            return -self._num(e.expr, env)
        if isinstance(e, PNot):
            return not self._bool(e.expr, env)
        if isinstance(e, PBin):
            if e.op == "and":
                return self._bool(e.left, env) and self._bool(e.right, env)
            if e.op == "or":
                return self._bool(e.left, env) or self._bool(e.right, env)
            left = self.eval(e.left, env)
            right = self.eval(e.right, env)
            if e.op == "==":
                return left == right
            if e.op == "!=":
                return left != right
            if e.op in ("<", "<=", ">", ">="):
                _check_num(left)
                _check_num(right)
                return {"<": left < right, "<=": left <= right,
                        ">": left > right, ">=": left >= right}[e.op]
            _check_num(left)
            _check_num(right)
            if e.op == "+":
                return left + right
            if e.op == "-":
                return left - right
            if e.op == "*":
                return left * right
            if right == 0:
                raise DivByZero("division by zero")
            return left / right
        if isinstance(e, PIndex):
            arr = self._array(e.base, env)
            i = self._index(e.index, env, len(arr))
            return arr[i]
        if isinstance(e, PSlice):
            arr = self._array(e.base, env)
            lo = self._intval(e.lo, env)
            hi = self._intval(e.hi, env)
            if lo > hi or lo < 0 or hi > len(arr):
                raise BadIndex(f"slice [{lo}:{hi}) outside length {len(arr)}")
            return arr[lo:hi]
        raise TypeError(f"cannot evaluate {type(e).__name__}")

    def _num(self, e, env):
        v = self.eval(e, env)
        _check_num(v)
        return v

    def _bool(self, e, env):
        v = self.eval(e, env)
        if not isinstance(v, bool):
            raise InterpError("condition did not evaluate to a boolean")
        return v

    def _intval(self, e, env):
        v = self._num(e, env)
        if isinstance(v, float):
            if v != int(v):
                raise BadIndex(f"non-integer index {v}")
            return int(v)
        if v.denominator != 1:
            raise BadIndex(f"non-integer index {v}")
        return int(v)

    def _index(self, e, env, length):
        i = self._intval(e, env)
        if not 0 <= i < length:
            raise BadIndex(f"index {i} outside length {length}")
        return i

    def _array(self, name, env):
        if name not in env:
            raise UnboundVariable(f"unbound variable {name!r}")
        v = env[name]
        if not isinstance(v, tuple):
            raise InterpError(f"{name!r} is not an array")
        return v

    # -- statements ---------------------------------------------------------

    def run(self, s: Statement, env: dict):
        if isinstance(s, Pass):
            self.tick()
        elif isinstance(s, Assign):
            self.tick()
            value = self.eval(s.expr, env)
            if s.index is None:
                env[s.target] = value
            else:
                arr = self._array(s.target, env)
                i = self._index(s.index, env, len(arr))
                env[s.target] = arr[:i] + (value,) + arr[i + 1:]
        elif isinstance(s, Seq):
            for part in s.stmts:
                self.run(part, env)
        elif isinstance(s, While):
            while True:
                self.tick()
                if not self._bool(s.cond, env):
                    break
                self.run(s.body, env)
        elif isinstance(s, If):
            self.tick()
            if self._bool(s.cond, env):
                self.run(s.then, env)
            else:
                self.run(s.els, env)
        elif isinstance(s, Assert):
            self.tick()
            self.assert_count += 1
            if not self._bool(s.cond, env):
                raise _AssertFailure(s.line, dict(env))
        elif isinstance(s, ProcDef):
            self.tick()
            self.procs[s.name] = s
        elif isinstance(s, Call):
            self.tick()
            self.call(s, env)
        elif isinstance(s, Hole):
            raise InterpError(f"program still contains an unrefined fragment "
                              f"(slot {s.slot})")
        else:
            raise TypeError(f"cannot execute {type(s).__name__}")

    def call(self, s: Call, env: dict):
        proc = self.procs.get(s.name)
        if proc is None:
            raise UndefinedProcedure(f"call to undefined procedure {s.name!r}")
        if s.name in self.active_calls:
            raise InterpError(f"recursive call to {s.name!r}")
        if len(s.args) != len(proc.params):
            raise InterpError(f"{s.name} takes {len(proc.params)} argument(s), "
                              f"got {len(s.args)}")
        frame = {pname: self.eval(arg, env)
                 for (pname, _), arg in zip(proc.params, s.args)}
        self.active_calls.add(s.name)
        try:
            self.run(proc.body, frame)
        finally:
            self.active_calls.discard(s.name)
        # copy-out: plain-name arguments receive the final parameter values
        for (pname, _), arg in zip(proc.params, s.args):
            if isinstance(arg, PName):
                env[arg.name] = frame[pname]


def _check_num(v):
    if isinstance(v, bool) or not isinstance(v, (Fraction, float)):
        raise InterpError("expected a numeric value")


def interpret(p: Statement,
              inputs: dict,
              step_limit: int = DEFAULT_STEP_LIMIT,
              float_mode: bool = False) -> RunOutcome:
    """Execute p on a copy of inputs.

    Interpreter errors (division by zero, bad index, undefined
    procedure) raise InterpError; a failed assert and an exhausted step
    budget are reported in the outcome instead.
    """
    if step_limit <= 0:
        raise ValueError("step_limit must be positive")
    env = {k: _convert(v, float_mode) for k, v in inputs.items()}
    m = _Machine(step_limit, float_mode)
    try:
        m.run(p, env)
    except _AssertFailure as f:
        return RunOutcome(env, m.assert_count, ASSERT_FAILED, f.location, f.state)
    except _OutOfSteps:
        return RunOutcome(env, m.assert_count, STEP_LIMIT)
    return RunOutcome(env, m.assert_count, COMPLETED)


def _convert(v, float_mode):
    if isinstance(v, tuple):
        return tuple(_convert(x, float_mode) for x in v)
    if isinstance(v, bool):
        return v
    if isinstance(v, (int, float, Fraction)):
        return float(v) if float_mode else Fraction(v)
    return v
