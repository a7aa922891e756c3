"""Semigroup spec strings, Cayley table files and element ranges."""

from __future__ import annotations

import os
import re
from pathlib import Path

from .semigroup import (SemigroupError, adjoin_identity, adjoin_zero, from_cayley,
                        make_cyclic, make_free_monoid, make_int_plus, make_nat_plus,
                        make_semidirect_pm, make_semilattice_omega, make_symmetric3,
                        make_taimanov, make_trivial, product)


class SpecError(SemigroupError):
    def __init__(self, message, text=None, pos=None):
        if text is not None and pos is not None:
            message = f"{message} at position {pos}: {text!r}\n    {' ' * (pos + 1)}^"
        super().__init__(message)
        self.pos = pos


class CayleyFileError(SemigroupError):
    pass


def parse_cayley(text, name="cayley"):
    """Line 1: n; next n lines: the rows; optional ``identity=i`` / ``zero=i``."""
    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    lines = [l for l in lines if l]
    if not lines:
        raise CayleyFileError("empty Cayley file")
    try:
        n = int(lines[0])
    except ValueError:
        raise CayleyFileError(f"first line must be the order, got {lines[0]!r}") from None
    if n < 1:
        raise CayleyFileError("order must be positive")
    if len(lines) < n + 1:
        raise CayleyFileError(f"expected {n} rows, found {len(lines) - 1}")
    rows = []
    for k, line in enumerate(lines[1:n + 1], 2):
        try:
            row = [int(v) for v in line.split()]
        except ValueError:
            raise CayleyFileError(f"line {k}: non-integer entry") from None
        if len(row) != n:
            raise CayleyFileError(f"line {k}: expected {n} entries, found {len(row)}")
        if any(v < 0 or v >= n for v in row):
            raise CayleyFileError(f"line {k}: entry out of range 0..{n - 1}")
        rows.append(row)
    meta = {}
    for line in lines[n + 1:]:
        m = re.fullmatch(r"(identity|zero)\s*=\s*(\d+)", line)
        if not m:
            raise CayleyFileError(f"unrecognized metadata line {line!r}")
        meta[m.group(1)] = int(m.group(2))
    return from_cayley(rows, name=name, **meta)


def format_cayley(S):
    from .semigroup import as_table
    rows = as_table(S)
    out = [str(S.order)] + [" ".join(map(str, r)) for r in rows]
    if S.identity is not None:
        out.append(f"identity={S.identity}")
    if S.zero is not None:
        out.append(f"zero={S.zero}")
    return "\n".join(out) + "\n"


def load_cayley(path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise CayleyFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_cayley(text, name=p.stem)


BUILTINS = {
    "nat-plus": make_nat_plus,
    "int-plus": make_int_plus,
    "zpm": make_semidirect_pm,
    "taimanov": make_taimanov,
    "semilattice-omega": make_semilattice_omega,
    "s3": make_symmetric3,
    "trivial": make_trivial,
}
PARAM_BUILTINS = {"cyclic": make_cyclic, "free": make_free_monoid}


class _SpecParser:
    def __init__(self, text, base_dir=None):
        self.text = text
        self.pos = 0
        self.base_dir = base_dir

    def error(self, msg, pos=None):
        raise SpecError(msg, self.text, self.pos if pos is None else pos)

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self):
        S = self.term()
        if self.pos != len(self.text):
            self.error("unexpected trailing text")
        return S

    def term(self):
        start = self.pos
        m = re.compile(r"(product|adjoin0|adjoin1)\(").match(self.text, self.pos)
        if m:
            self.pos = m.end()
            left = self.term()
            if m.group(1) == "product":
                self.expect(",")
                right = self.term()
                self.expect(")")
                return product(left, right)
            self.expect(")")
            return adjoin_zero(left) if m.group(1) == "adjoin0" else adjoin_identity(left)
        if self.text.startswith("builtin:", self.pos):
            self.pos += len("builtin:")
            m = re.compile(r"[a-z0-9-]+(:\d+)?").match(self.text, self.pos)
            if not m:
                self.error("expected a builtin name")
            word = m.group(0)
            name, _, arg = word.partition(":")
            if name in PARAM_BUILTINS:
                if not arg:
                    self.error(f"builtin {name} needs a parameter, e.g. {name}:2")
                try:
                    S = PARAM_BUILTINS[name](int(arg))
                except ValueError as exc:
                    self.error(str(exc))
            elif name in BUILTINS and not arg:
                S = BUILTINS[name]()
            else:
                self.error(f"unknown builtin {word!r}")
            self.pos = m.end()
            return S
        if self.text.startswith("cayley:", self.pos):
            self.pos += len("cayley:")
            m = re.compile(r"[^,()]+").match(self.text, self.pos)
            if not m:
                self.error("expected a file path")
            path = Path(m.group(0))
            if self.base_dir is not None and not path.is_absolute() and not path.exists():
                path = Path(self.base_dir) / path
            try:
                S = load_cayley(path)
            except CayleyFileError as exc:
                self.error(str(exc), start)
            self.pos = m.end()
            return S
        self.error("expected builtin:, cayley:, product(, adjoin0( or adjoin1(")


def parse_spec(text, base_dir=None):
    """Build a handle from a spec string such as ``product(builtin:cyclic:2,cayley:s3.tbl)``."""
    return _SpecParser(text.strip(), base_dir).parse()


def parse_elements(text, S=None):
    """``0..10`` (inclusive), ``1,4,7``, a mix of both, or ``all`` (finite handles)."""
    text = text.strip()
    if text == "all":
        if S is None or not S.is_finite:
            raise SpecError("'all' needs a finite semigroup")
        return list(range(S.order))
    if text in ("", "none"):
        return []
    out = []
    for part in text.split(","):
        part = part.strip()
        m = re.fullmatch(r"(\d+)\.\.(\d+)", part)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if hi < lo:
                raise SpecError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        elif part.isdigit():
            out.append(int(part))
        else:
            raise SpecError(f"cannot parse element list {text!r}")
    if S is not None:
        out = [S.check(x) for x in out]
    return sorted(set(out))


def default_window(S, requested=None):
    """Requested size, else the order of a finite handle, else $POLYBOUND_WINDOW (100)."""
    if requested is not None:
        return requested
    if S.is_finite:
        return S.order
    env = os.environ.get("POLYBOUND_WINDOW")
    if env:
        try:
            return int(env)
        except ValueError:
            raise SpecError(f"POLYBOUND_WINDOW must be an integer, got {env!r}") from None
    return 100
