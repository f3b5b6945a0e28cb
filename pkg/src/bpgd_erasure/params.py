"""Per-erasure-rate parameter tables and decoder presets.

The bundled tables give the prior scale ``c_opt`` and the damping factor
``gamma`` that were tuned for the three bundled codes. Lookups match the
rate against the tabulated ranges and fall back to the nearest range when
the rate lies between or beyond them.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from functools import lru_cache
from importlib import resources

from .bp import BpConfig

__all__ = [
    "TableEntry",
    "load_tables",
    "lookup",
    "BP_DECODERS",
    "DECODERS",
    "bp_config_for",
    "read_config",
]

DECODERS = ("bp", "bpgd", "bpgd-damped", "bpgd-adjllr", "bpgd-combined", "peeling",
            "pruned-peeling", "ml")
BP_DECODERS = DECODERS[:5]

_TOL = 1e-9


@dataclass(frozen=True)
class TableEntry:
    table: str
    code: str
    lo: float
    hi: float
    value: float

    def distance(self, p: float) -> float:
        if p < self.lo:
            return self.lo - p
        if p > self.hi:
            return p - self.hi
        return 0.0


def _parse_tables(text: str, source: str) -> tuple[TableEntry, ...]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ValueError(f"{source}:{lineno}: expected 5 fields, got {len(parts)}")
        table, code, lo, hi, value = parts
        entry = TableEntry(table, code, float(lo), float(hi), float(value))
        if entry.lo > entry.hi:
            raise ValueError(f"{source}:{lineno}: empty rate range")
        out.append(entry)
    return tuple(out)


@lru_cache(maxsize=None)
def load_tables(path: str | None = None) -> tuple[TableEntry, ...]:
    """Parse a table file; the bundled one by default."""
    if path is None:
        res = resources.files("bpgd_erasure").joinpath("data", "param_tables.txt")
        return _parse_tables(res.read_text(), "param_tables.txt")
    with open(path) as fh:
        return _parse_tables(fh.read(), str(path))


def lookup(table: str, code: str, p: float, tables=None) -> float | None:
    """Value for erasure rate ``p``, or None if the code has no such table.

    A rate inside a tabulated range returns that range's value; otherwise
    the nearest range wins, the lower one on an exact tie.
    """
    entries = [e for e in (tables or load_tables()) if e.table == table and e.code == code]
    if not entries:
        return None
    for e in entries:
        if e.lo - _TOL <= p <= e.hi + _TOL:
            return e.value
    return min(entries, key=lambda e: (e.distance(p), e.lo)).value


def bp_config_for(decoder: str, code: str | None, p: float, base: BpConfig = BpConfig(),
                  gamma: float | None = None, c_opt: float | None = None,
                  tables=None) -> BpConfig:
    """Resolve the BP settings of one decoder preset at one erasure rate.

    Explicit ``gamma`` / ``c_opt`` always win. Otherwise ``bpgd-damped``
    takes ``gamma`` from the damping table, ``bpgd-adjllr`` takes ``c_opt``
    from the prior-scale table, and ``bpgd-combined`` takes both from the
    joint table (prior scale falls back to the plain prior-scale table).
    Plain ``bp`` / ``bpgd`` and codes without tables use ``base``.
    """
    if decoder not in BP_DECODERS:
        raise ValueError(f"{decoder!r} is not a BP decoder")
    g, c = base.gamma, base.c_opt
    if code is not None:
        if decoder in ("bpgd-damped", "bpgd-combined"):
            g = _or(lookup("gamma", code, p, tables), g)
        if decoder == "bpgd-adjllr":
            c = _or(lookup("c_opt", code, p, tables), c)
        if decoder == "bpgd-combined":
            c = _or(lookup("c_opt_joint", code, p, tables), _or(lookup("c_opt", code, p, tables), c))
    if gamma is not None:
        g = gamma
    if c_opt is not None:
        c = c_opt
    return base.replace(gamma=float(g), c_opt=float(c))


def _or(value, default):
    return default if value is None else value


def read_config(path) -> dict:
    """Read ``key = value`` lines into BpConfig keyword arguments.

    Keys are BpConfig field names; ``#`` starts a comment. Unknown keys are
    rejected.
    """
    types = {f.name: f.type for f in fields(BpConfig)}
    out: dict = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key == "T":
                key = "iterations"
            if key not in types:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            kind = types[key]
            if kind in ("int", int):
                out[key] = int(value)
            elif kind in ("float", float):
                out[key] = float(value)
            else:
                out[key] = value
    return out
