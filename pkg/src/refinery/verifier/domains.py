"""Finite carriers for bounded checking: an interval per integer type,
a rational grid for floats, length-bounded arrays, and per-variable
overrides.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

from ..spec_lang import SpecError, SpecType

DEFAULT_FLOAT_GRID = tuple(Fraction(x) for x in
                           ("0", "1/2", "1", "3/2", "2", "3", "-1", "-1/2"))


class DomainError(SpecError):
    pass


@dataclass(frozen=True)
class DomainSpec:
    int_range: tuple[int, int] = (-2, 2)
    nat_range: tuple[int, int] = (0, 3)
    float_grid: tuple[Fraction, ...] = DEFAULT_FLOAT_GRID
    array_lens: tuple[int, int] = (0, 2)
    overrides: tuple[tuple[str, tuple], ...] = ()

    def __post_init__(self):
        if self.int_range[0] > self.int_range[1] or self.nat_range[0] > self.nat_range[1]:
            raise DomainError("empty integer carrier")
        if self.nat_range[0] < 0:
            raise DomainError("nat carrier must be nonnegative")
        if not self.float_grid:
            raise DomainError("empty float carrier")
        if len(set(self.float_grid)) != len(self.float_grid):
            raise DomainError("float grid values must be distinct")
        if self.array_lens[0] < 0 or self.array_lens[0] > self.array_lens[1]:
            raise DomainError("bad array length interval")

    def override_for(self, name: str):
        for key, values in self.overrides:
            if key == name:
                return values
        return None

    def carrier_size(self, ty: SpecType, name: str | None = None) -> int:
        values = self.override_for(name) if name else None
        if values is not None:
            return len(values)
        if ty.kind == "bool":
            return 2
        if ty.kind == "nat":
            return self.nat_range[1] - self.nat_range[0] + 1
        if ty.kind == "int":
            return self.int_range[1] - self.int_range[0] + 1
        if ty.kind == "float":
            return len(self.float_grid)
        if ty.kind == "array":
            per = self.carrier_size(ty.elem)
            return sum(per ** n for n in range(self.array_lens[0],
                                               self.array_lens[1] + 1))
        raise DomainError(f"no carrier for type {ty}")

    def carrier(self, ty: SpecType, name: str | None = None):
        """Deterministically ordered finite carrier for a type."""
        values = self.override_for(name) if name else None
        if values is not None:
            yield from values
            return
        if ty.kind == "bool":
            yield False
            yield True
        elif ty.kind == "nat":
            for i in range(self.nat_range[0], self.nat_range[1] + 1):
                yield Fraction(i)
        elif ty.kind == "int":
            for i in range(self.int_range[0], self.int_range[1] + 1):
                yield Fraction(i)
        elif ty.kind == "float":
            yield from self.float_grid
        elif ty.kind == "array":
            elem = list(self.carrier(ty.elem))
            for n in range(self.array_lens[0], self.array_lens[1] + 1):
                for combo in itertools.product(elem, repeat=n):
                    yield tuple(combo)
        else:
            raise DomainError(f"no carrier for type {ty}")

    def with_values(self, name: str, values) -> "DomainSpec":
        rest = tuple((k, v) for k, v in self.overrides if k != name)
        return DomainSpec(self.int_range, self.nat_range, self.float_grid,
                          self.array_lens, rest + ((name, tuple(values)),))


def parse_domains(data) -> DomainSpec:
    """DomainSpec from its JSON form, e.g.
    ``{"float": ["0","1/2"], "vars": {"N": ["0","1","4"]}}``."""
    if isinstance(data, str):
        data = json.loads(data)
    kwargs = {}
    if "int" in data:
        kwargs["int_range"] = (int(data["int"][0]), int(data["int"][1]))
    if "nat" in data:
        kwargs["nat_range"] = (int(data["nat"][0]), int(data["nat"][1]))
    if "float" in data:
        kwargs["float_grid"] = tuple(Fraction(str(x)) for x in data["float"])
    if "array_len" in data:
        kwargs["array_lens"] = (int(data["array_len"][0]), int(data["array_len"][1]))
    overrides = []
    for name, values in data.get("vars", {}).items():
        overrides.append((name, tuple(_parse_override(v) for v in values)))
    kwargs["overrides"] = tuple(overrides)
    return DomainSpec(**kwargs)


def _parse_override(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, list):
        return tuple(_parse_override(x) for x in v)
    return Fraction(str(v))


def render_domains(d: DomainSpec) -> dict:
    return {
        "int": list(d.int_range),
        "nat": list(d.nat_range),
        "float": [str(x) for x in d.float_grid],
        "array_len": list(d.array_lens),
        "vars": {name: [_render_value(v) for v in values]
                 for name, values in d.overrides},
    }


def _render_value(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, tuple):
        return [_render_value(x) for x in v]
    return str(v)
