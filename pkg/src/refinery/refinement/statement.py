"""Refinable specification statements: ``frame: [pre, post]``."""

from __future__ import annotations

from dataclasses import dataclass

from ..spec_lang import (
    Definition,
    SpecError,
    SpecExpr,
    TypedParam,
    free_vars,
    init_vars,
    render_spec_expr,
)


@dataclass(frozen=True)
class SpecStatement:
    frame: tuple[TypedParam, ...]       # the variants the program may change
    constants: tuple[TypedParam, ...]
    pre: SpecExpr
    post: SpecExpr

    def __post_init__(self):
        object.__setattr__(self, "frame", tuple(self.frame))
        object.__setattr__(self, "constants", tuple(self.constants))
        names = [p.name for p in self.frame] + [p.name for p in self.constants]
        if len(set(names)) != len(names):
            raise SpecError("frame and constant names must be distinct")
        frame_names = {p.name for p in self.frame}
        allowed = set(names)
        for label, e in (("pre", self.pre), ("post", self.post)):
            loose = free_vars(e) - allowed
            if loose:
                raise SpecError(f"{label} uses undeclared name(s) "
                                f"{', '.join(sorted(loose))}")
            loose_init = init_vars(e) - frame_names - {p.name for p in self.constants}
            if loose_init:
                raise SpecError(f"{label} takes initial values of undeclared "
                                f"name(s) {', '.join(sorted(loose_init))}")

    @property
    def env(self) -> tuple[TypedParam, ...]:
        return self.frame + self.constants

    @property
    def frame_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.frame)

    def frame_param(self, name: str) -> TypedParam | None:
        for p in self.frame:
            if p.name == name:
                return p
        return None

    def render(self) -> str:
        frame = ", ".join(str(p) for p in self.frame)
        return f"{frame}: [{render_spec_expr(self.pre)}, {render_spec_expr(self.post)}]"


@dataclass(frozen=True)
class SpecFile:
    """A parsed problem file: name, declarations, pre/post, definitions."""

    name: str
    statement: SpecStatement
    defs: tuple[Definition, ...] = ()

    @property
    def defs_map(self):
        return {d.name: d for d in self.defs}
