"""Model files: a small text format naming spaces, maps, and sets.

A document is a sequence of declarations.  Point order in a ``space``
or ``topology`` block fixes the bitmask index order used everywhere
downstream, so it is preserved verbatim.

    # three-point chain
    space Q3 {
      points: 1 2 3;
      vicinity 1: {1};
      vicinity 2: {1 2};
      vicinity 3: {2 3};
    }

    topology S2 {
      points: x y;
      opens: {} {y} {x y};
    }

    map f: Q3 -> S2 { 1 -> x; 2 -> y; 3 -> y; }

    builtin U = urysohn
    builtin R2 = discrete_ray(2)

    set B = grid(G; cols>0)
    set A = grid(G; cols=0) | atom(pinf)

Set expressions combine strand terms with ``|`` (union), ``&``
(intersection), ``\\`` (difference), ``~`` (complement, relative to
the space) and parentheses; precedence ``~`` > ``&`` > ``\\`` > ``|``,
binary operators left-associative.  ``{a b}`` is a finite literal
naming points (atoms, on a symbolic space); ``all`` and ``empty`` are
constants; a bare name refers to another ``set`` declaration.

Interval clauses accept comparison forms (``rows>3``, ``cols!=0``)
and range lists (``rows=1..4,7``, ``ray(R; 3..)``); both normalize to
the same range-list form, which is what the canonical printer emits.
Line comments start with ``#``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .defsets import DefSet, GroundSchema
from .errors import (
    AxiomViolation,
    ParseError,
    ResolutionError,
    UnknownBuiltin,
    UnknownPoint,
    WorkbenchError,
)
from .finite import FinitePretop, FiniteTopology, validate_space
from .intervals import IntervalSet
from .maps import SpaceMap
from .symbolic import SymbolicPretop, builtin

# -- set-expression syntax tree ----------------------------------------------
#
# Interval specs are stored pre-normalized: a tuple of (lo, hi) pairs
# with None for an open end, sorted, disjoint, non-adjacent; None in
# place of the tuple means the whole axis.  Equal documents therefore
# compare equal structurally, which the round-trip law relies on.


@dataclass(frozen=True)
class AtomTerm:
    name: str


@dataclass(frozen=True)
class RayTerm:
    name: str
    parts: tuple | None = None


@dataclass(frozen=True)
class GridTerm:
    name: str
    rows: tuple | None = None
    cols: tuple | None = None


@dataclass(frozen=True)
class FiniteLit:
    names: tuple


@dataclass(frozen=True)
class Const:
    which: str  # "all" | "empty"


@dataclass(frozen=True)
class SetRef:
    name: str


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str  # "|" | "&" | "\\"
    left: object
    right: object


# -- declarations -------------------------------------------------------------


@dataclass(frozen=True)
class SpaceDecl:
    name: str
    space: FinitePretop


@dataclass(frozen=True)
class TopologyDecl:
    name: str
    topology: FiniteTopology


@dataclass(frozen=True)
class MapDecl:
    name: str
    source: str
    target: str
    entries: tuple  # ((source point, target point), ...) as declared
    line: int = 0

    def __eq__(self, other):
        if not isinstance(other, MapDecl):
            return NotImplemented
        return (self.name, self.source, self.target, self.entries) == (
            other.name,
            other.source,
            other.target,
            other.entries,
        )

    def __hash__(self):
        return hash((self.name, self.source, self.target, self.entries))


@dataclass(frozen=True)
class BuiltinDecl:
    name: str
    kind: str  # "urysohn" | "half_grid" | "discrete_ray"
    arg: int | None = None

    @property
    def key(self) -> str:
        return self.kind if self.arg is None else f"{self.kind}({self.arg})"


@dataclass(frozen=True)
class SetDecl:
    name: str
    expr: object
    line: int = 0

    def __eq__(self, other):
        if not isinstance(other, SetDecl):
            return NotImplemented
        return (self.name, self.expr) == (other.name, other.expr)

    def __hash__(self):
        return hash((self.name, self.expr))


class ModelDocument:
    """Parsed declarations with every name resolved.

    Equality is structural on the declarations, so a canonical
    reprint parses back to an equal document.
    """

    def __init__(self, declarations):
        self.declarations = tuple(declarations)
        self._by_name = {}
        for d in self.declarations:
            if d.name in self._by_name:
                raise ResolutionError(f"name {d.name!r} declared twice")
            self._by_name[d.name] = d
        self._maps = {}
        self._resolve()

    def __eq__(self, other):
        if not isinstance(other, ModelDocument):
            return NotImplemented
        return self.declarations == other.declarations

    def __hash__(self):
        return hash(self.declarations)

    # -- lookups -------------------------------------------------------------

    def _decl(self, name: str, kinds: tuple, what: str):
        d = self._by_name.get(name)
        if d is None or not isinstance(d, kinds):
            raise ResolutionError(f"no {what} named {name!r}")
        return d

    def finite(self, name: str) -> FinitePretop:
        """A finite space by name; topologies give their vicinity form."""
        d = self._decl(name, (SpaceDecl, TopologyDecl), "finite space")
        return d.space if isinstance(d, SpaceDecl) else d.topology.to_pretop()

    def topology(self, name: str) -> FiniteTopology:
        return self._decl(name, (TopologyDecl,), "topology").topology

    def symbolic(self, name: str) -> SymbolicPretop:
        return builtin(self._decl(name, (BuiltinDecl,), "builtin").key)

    def space(self, name: str):
        """Finite or symbolic space by name."""
        d = self._decl(name, (SpaceDecl, TopologyDecl, BuiltinDecl), "space")
        if isinstance(d, BuiltinDecl):
            return builtin(d.key)
        return self.finite(name)

    def map(self, name: str) -> SpaceMap:
        self._decl(name, (MapDecl,), "map")
        return self._maps[name]

    def set_expr(self, name: str):
        return self._decl(name, (SetDecl,), "set").expr

    def names(self, cls) -> tuple:
        return tuple(d.name for d in self.declarations if isinstance(d, cls))

    # -- resolution ------------------------------------------------------------

    def _resolve(self):
        for d in self.declarations:
            if isinstance(d, MapDecl):
                self._maps[d.name] = self._resolve_map(d)
            elif isinstance(d, SetDecl):
                self._check_refs(d.name, d.expr, (d.name,))

    def _resolve_map(self, d: MapDecl) -> SpaceMap:
        where = f"line {d.line}: map {d.name!r}"
        try:
            src = self.finite(d.source)
            dst = self.finite(d.target)
        except ResolutionError as e:
            raise ResolutionError(f"{where}: {e}") from None
        table = {}
        for p, q in d.entries:
            if p not in src.points:
                raise ResolutionError(f"{where}: source has no point {p!r}")
            if q not in dst.points:
                raise ResolutionError(f"{where}: target has no point {q!r}")
            table[p] = q
        missing = [p for p in src.points if p not in table]
        if missing:
            raise ResolutionError(f"{where}: no image for point {missing[0]!r}")
        return SpaceMap.from_table(src, dst, table)

    def _check_refs(self, root: str, expr, stack: tuple):
        if isinstance(expr, SetRef):
            d = self._by_name.get(expr.name)
            if not isinstance(d, SetDecl):
                raise ResolutionError(f"set {root!r} refers to unknown set {expr.name!r}")
            if expr.name in stack:
                raise ResolutionError(f"circular set definition through {expr.name!r}")
            self._check_refs(root, d.expr, stack + (expr.name,))
        elif isinstance(expr, Not):
            self._check_refs(root, expr.arg, stack)
        elif isinstance(expr, BinOp):
            self._check_refs(root, expr.left, stack)
            self._check_refs(root, expr.right, stack)


# -- lexer ---------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r\n]+|\#[^\n]*)
      | (?P<op>->|\.\.|>=|<=|!=|[{}():;=,|&\\~<>])
      | (?P<int>-?\d+)
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "op" | "int" | "name" | "eof"
    value: str
    line: int
    col: int


def _lex(text: str) -> list:
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"stray character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            out.append(_Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    out.append(_Token("eof", "", line, col))
    return out


# -- parser ----------------------------------------------------------------------

_CMP_LOW = {">": lambda n: (n + 1, None), ">=": lambda n: (n, None)}
_CMP_HIGH = {"<": lambda n: (None, n - 1), "<=": lambda n: (None, n)}


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    # -- token plumbing -----------------------------------------------------

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.col)

    def advance(self) -> _Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def expect_op(self, value: str) -> _Token:
        t = self.tok
        if t.kind != "op" or t.value != value:
            self._fail(f"expected {value!r}, found {t.value!r}" if t.kind != "eof" else f"expected {value!r}, found end of file")
        return self.advance()

    def at_op(self, *values) -> bool:
        return self.tok.kind == "op" and self.tok.value in values

    def point_name(self) -> _Token:
        t = self.tok
        if t.kind not in ("name", "int"):
            self._fail(f"expected a name, found {t.value!r}")
        return self.advance()

    def ident(self) -> _Token:
        t = self.tok
        if t.kind != "name":
            self._fail(f"expected an identifier, found {t.value!r}")
        return self.advance()

    def integer(self) -> int:
        t = self.tok
        if t.kind != "int":
            self._fail(f"expected an integer, found {t.value!r}")
        self.advance()
        return int(t.value)

    # -- document ---------------------------------------------------------------

    def document(self) -> ModelDocument:
        decls = []
        seen = {}
        while self.tok.kind != "eof":
            t = self.tok
            if t.kind != "name":
                self._fail(f"expected a declaration, found {t.value!r}")
            handler = {
                "space": self.space_decl,
                "topology": self.topology_decl,
                "map": self.map_decl,
                "builtin": self.builtin_decl,
                "set": self.set_decl,
            }.get(t.value)
            if handler is None:
                self._fail(f"unknown declaration keyword {t.value!r}")
            d = handler()
            if d.name in seen:
                self._fail(f"name {d.name!r} already declared", t)
            seen[d.name] = d
            decls.append(d)
        return ModelDocument(decls)

    def space_decl(self) -> SpaceDecl:
        head = self.advance()
        name = self.point_name().value
        self.expect_op("{")
        points = self.points_line()
        table = {}
        lines = {}
        while not self.at_op("}"):
            t = self.ident()
            if t.value != "vicinity":
                self._fail("expected a vicinity line", t)
            p = self.point_name()
            if p.value not in points:
                raise ResolutionError(
                    f"line {p.line}: space {name!r} has no point {p.value!r}"
                )
            if p.value in table:
                self._fail(f"duplicate vicinity line for {p.value!r}", p)
            self.expect_op(":")
            table[p.value] = self.brace_names(points, name)
            lines[p.value] = p.line
            self.expect_op(";")
        self.expect_op("}")
        for p in points:
            if p not in table:
                raise ResolutionError(
                    f"line {head.line}: space {name!r} gives no vicinity for {p!r}"
                )
            if p not in table[p]:
                raise AxiomViolation(
                    f"line {lines[p]}: point {p!r} missing from its own vicinity"
                )
        return SpaceDecl(name, validate_space(points, table))

    def topology_decl(self) -> TopologyDecl:
        head = self.advance()
        name = self.point_name().value
        self.expect_op("{")
        points = self.points_line()
        t = self.ident()
        if t.value != "opens":
            self._fail("expected an opens line", t)
        self.expect_op(":")
        shell = FinitePretop(points, tuple(0 for _ in points))
        opens = []
        while self.at_op("{"):
            opens.append(shell.mask(self.brace_names(points, name)))
        self.expect_op(";")
        self.expect_op("}")
        try:
            topo = FiniteTopology(points, frozenset(opens)).validate()
        except WorkbenchError as e:
            raise type(e)(f"line {head.line}: {e}") from None
        return TopologyDecl(name, topo)

    def points_line(self) -> tuple:
        t = self.ident()
        if t.value != "points":
            self._fail("expected a points line", t)
        self.expect_op(":")
        points = []
        while self.tok.kind in ("name", "int"):
            p = self.point_name()
            if p.value in points:
                self._fail(f"duplicate point {p.value!r}", p)
            points.append(p.value)
        if not points:
            self._fail("a space needs at least one point")
        self.expect_op(";")
        return tuple(points)

    def brace_names(self, points: tuple, owner: str) -> tuple:
        self.expect_op("{")
        names = []
        while self.tok.kind in ("name", "int"):
            p = self.point_name()
            if p.value not in points:
                raise ResolutionError(
                    f"line {p.line}: space {owner!r} has no point {p.value!r}"
                )
            if p.value not in names:
                names.append(p.value)
        self.expect_op("}")
        return tuple(names)

    def map_decl(self) -> MapDecl:
        head = self.advance()
        name = self.point_name().value
        self.expect_op(":")
        source = self.point_name().value
        self.expect_op("->")
        target = self.point_name().value
        self.expect_op("{")
        entries = []
        seen = set()
        while not self.at_op("}"):
            p = self.point_name()
            if p.value in seen:
                self._fail(f"duplicate image for {p.value!r}", p)
            seen.add(p.value)
            self.expect_op("->")
            q = self.point_name()
            self.expect_op(";")
            entries.append((p.value, q.value))
        self.expect_op("}")
        return MapDecl(name, source, target, tuple(entries), head.line)

    def builtin_decl(self) -> BuiltinDecl:
        self.advance()
        name = self.point_name().value
        self.expect_op("=")
        kind = self.ident()
        if kind.value in ("urysohn", "half_grid"):
            return BuiltinDecl(name, kind.value)
        if kind.value == "discrete_ray":
            self.expect_op("(")
            arg = self.integer()
            self.expect_op(")")
            try:
                builtin(f"discrete_ray({arg})")
            except UnknownBuiltin as e:
                raise UnknownBuiltin(f"line {kind.line}: {e}") from None
            return BuiltinDecl(name, "discrete_ray", arg)
        self._fail(f"unknown builtin {kind.value!r}", kind)

    def set_decl(self) -> SetDecl:
        head = self.advance()
        name = self.point_name().value
        self.expect_op("=")
        return SetDecl(name, self.set_expr(), head.line)

    # -- set expressions -----------------------------------------------------

    def set_expr(self):
        node = self.diff_expr()
        while self.at_op("|"):
            self.advance()
            node = BinOp("|", node, self.diff_expr())
        return node

    def diff_expr(self):
        node = self.inter_expr()
        while self.at_op("\\"):
            self.advance()
            node = BinOp("\\", node, self.inter_expr())
        return node

    def inter_expr(self):
        node = self.unary_expr()
        while self.at_op("&"):
            self.advance()
            node = BinOp("&", node, self.unary_expr())
        return node

    def unary_expr(self):
        if self.at_op("~"):
            self.advance()
            return Not(self.unary_expr())
        return self.primary()

    def primary(self):
        if self.at_op("("):
            self.advance()
            node = self.set_expr()
            self.expect_op(")")
            return node
        if self.at_op("{"):
            self.advance()
            names = []
            while self.tok.kind in ("name", "int"):
                names.append(self.advance().value)
            self.expect_op("}")
            return FiniteLit(tuple(names))
        t = self.tok
        if t.kind != "name":
            self._fail(f"expected a set term, found {t.value!r}")
        self.advance()
        if t.value in ("all", "empty"):
            return Const(t.value)
        if t.value == "atom":
            self.expect_op("(")
            name = self.ident().value
            self.expect_op(")")
            return AtomTerm(name)
        if t.value == "ray":
            self.expect_op("(")
            name = self.ident().value
            parts = None
            if self.at_op(";"):
                self.advance()
                parts = self.interval_spec()
            self.expect_op(")")
            return RayTerm(name, parts)
        if t.value == "grid":
            self.expect_op("(")
            name = self.ident().value
            rows = cols = None
            while self.at_op(";"):
                self.advance()
                axis = self.ident()
                if axis.value not in ("rows", "cols"):
                    self._fail("expected rows or cols", axis)
                if (axis.value == "rows" and rows is not None) or (
                    axis.value == "cols" and cols is not None
                ):
                    self._fail(f"duplicate {axis.value} clause", axis)
                spec = self.interval_spec()
                if axis.value == "rows":
                    rows = spec
                else:
                    cols = spec
            self.expect_op(")")
            return GridTerm(name, rows, cols)
        return SetRef(t.value)

    def interval_spec(self) -> tuple | None:
        """Comparison or range-list form, normalized to sorted parts."""
        t = self.tok
        if self.at_op(">", ">=", "<", "<=", "!="):
            self.advance()
            n = self.integer()
            if t.value in _CMP_LOW:
                parts = [_CMP_LOW[t.value](n)]
            elif t.value in _CMP_HIGH:
                parts = [_CMP_HIGH[t.value](n)]
            else:
                parts = [(None, n - 1), (n + 1, None)]
            return self.normalize_parts(parts, t)
        if self.at_op("="):
            self.advance()
            return self.parts_list()
        return self.parts_list()

    def parts_list(self) -> tuple | None:
        parts = [self.one_part()]
        while self.at_op(","):
            self.advance()
            parts.append(self.one_part())
        return self.normalize_parts(parts, self.tok)

    def one_part(self) -> tuple:
        t = self.tok
        if self.at_op(".."):
            self.advance()
            hi = self.integer() if self.tok.kind == "int" else None
            return (None, hi)
        if t.kind != "int":
            self._fail(f"expected an interval, found {t.value!r}")
        lo = self.integer()
        if self.at_op(".."):
            self.advance()
            hi = self.integer() if self.tok.kind == "int" else None
            return (lo, hi)
        return (lo, lo)

    def normalize_parts(self, parts, tok) -> tuple | None:
        lo_key = lambda p: float("-inf") if p[0] is None else p[0]
        hi_key = lambda p: float("inf") if p[1] is None else p[1]
        for lo, hi in parts:
            if lo is not None and hi is not None and lo > hi:
                self._fail(f"empty interval {lo}..{hi}", tok)
        merged = []
        for part in sorted(parts, key=lambda p: (lo_key(p), hi_key(p))):
            if merged and lo_key(part) <= hi_key(merged[-1]) + 1:
                if hi_key(part) > hi_key(merged[-1]):
                    merged[-1] = (merged[-1][0], part[1])
            else:
                merged.append(part)
        if merged == [(None, None)]:
            return None
        return tuple(merged)


def parse_model(text: str) -> ModelDocument:
    return _Parser(_lex(text)).document()


def parse_set_expr(text: str):
    """A standalone set expression, as used by --set on the command line."""
    p = _Parser(_lex(text))
    node = p.set_expr()
    if p.tok.kind != "eof":
        p._fail(f"trailing input {p.tok.value!r}")
    return node


# -- evaluation ---------------------------------------------------------------


def eval_set(expr, space, doc: ModelDocument | None = None):
    """Evaluate an expression against a space.

    Returns a bitmask on a finite space and a DefSet on a symbolic
    one; complements are taken relative to the space's own points.
    """
    if isinstance(space, FiniteTopology):
        space = space.to_pretop()
    if isinstance(space, FinitePretop):
        return _eval_finite(expr, space, doc)
    return _eval_symbolic(expr, space, doc)


def _deref(expr: SetRef, doc: ModelDocument | None):
    if doc is None:
        raise ResolutionError(f"set reference {expr.name!r} needs a model file")
    return doc.set_expr(expr.name)


def _eval_finite(expr, space: FinitePretop, doc) -> int:
    if isinstance(expr, FiniteLit):
        mask = 0
        for name in expr.names:
            if name not in space.points:
                raise ResolutionError(f"space has no point {name!r}")
            mask |= 1 << space.points.index(name)
        return mask
    if isinstance(expr, Const):
        return space.full if expr.which == "all" else 0
    if isinstance(expr, SetRef):
        return _eval_finite(_deref(expr, doc), space, doc)
    if isinstance(expr, Not):
        return space.full & ~_eval_finite(expr.arg, space, doc)
    if isinstance(expr, BinOp):
        left = _eval_finite(expr.left, space, doc)
        right = _eval_finite(expr.right, space, doc)
        if expr.op == "|":
            return left | right
        if expr.op == "&":
            return left & right
        return left & ~right
    raise ResolutionError("strand terms need a symbolic space")


def _strand_defset(schema: GroundSchema, expr) -> DefSet:
    try:
        if isinstance(expr, AtomTerm):
            if not schema.has_atom(expr.name):
                raise UnknownPoint(f"no atom named {expr.name!r}")
            return DefSet.build(schema, atoms=[expr.name])
        if isinstance(expr, RayTerm):
            axis = schema.ray_axis(expr.name)
            sel = (
                IntervalSet.full(axis)
                if expr.parts is None
                else IntervalSet.from_pairs(axis, expr.parts)
            )
            return DefSet.build(schema, ray_parts={expr.name: sel})
        rows_ax, cols_ax = schema.grid_axes(expr.name)
        rows = (
            IntervalSet.full(rows_ax)
            if expr.rows is None
            else IntervalSet.from_pairs(rows_ax, expr.rows)
        )
        cols = (
            IntervalSet.full(cols_ax)
            if expr.cols is None
            else IntervalSet.from_pairs(cols_ax, expr.cols)
        )
        return DefSet.build(schema, grid_rects={expr.name: [(rows, cols)]})
    except UnknownPoint as e:
        raise ResolutionError(str(e)) from None


def _eval_symbolic(expr, space: SymbolicPretop, doc) -> DefSet:
    schema = space.schema
    carrier = space.carrier_set
    if isinstance(expr, (AtomTerm, RayTerm, GridTerm)):
        return _strand_defset(schema, expr) & carrier
    if isinstance(expr, FiniteLit):
        for name in expr.names:
            if not schema.has_atom(name):
                raise ResolutionError(f"no atom named {name!r}")
        return DefSet.build(schema, atoms=expr.names) & carrier
    if isinstance(expr, Const):
        return carrier if expr.which == "all" else DefSet.empty(schema)
    if isinstance(expr, SetRef):
        return _eval_symbolic(_deref(expr, doc), space, doc)
    if isinstance(expr, Not):
        return carrier - _eval_symbolic(expr.arg, space, doc)
    if isinstance(expr, BinOp):
        left = _eval_symbolic(expr.left, space, doc)
        right = _eval_symbolic(expr.right, space, doc)
        if expr.op == "|":
            return left | right
        if expr.op == "&":
            return left & right
        return left - right
    raise ResolutionError(f"cannot evaluate {expr!r} on a symbolic space")


# -- printing -------------------------------------------------------------------

_PREC = {"|": 1, "\\": 2, "&": 3}


def _parts_text(parts: tuple) -> str:
    out = []
    for lo, hi in parts:
        if lo is None and hi is None:
            out.append("..")
        elif lo is None:
            out.append(f"..{hi}")
        elif hi is None:
            out.append(f"{lo}..")
        elif lo == hi:
            out.append(str(lo))
        else:
            out.append(f"{lo}..{hi}")
    return ",".join(out)


def print_set_expr(expr) -> str:
    text, _ = _print_expr(expr)
    return text


def _print_expr(expr) -> tuple:
    """Text plus binding strength, for minimal parenthesization."""
    if isinstance(expr, AtomTerm):
        return f"atom({expr.name})", 5
    if isinstance(expr, RayTerm):
        if expr.parts is None:
            return f"ray({expr.name})", 5
        return f"ray({expr.name}; {_parts_text(expr.parts)})", 5
    if isinstance(expr, GridTerm):
        clauses = [expr.name]
        if expr.rows is not None:
            clauses.append(f"rows={_parts_text(expr.rows)}")
        if expr.cols is not None:
            clauses.append(f"cols={_parts_text(expr.cols)}")
        return f"grid({'; '.join(clauses)})", 5
    if isinstance(expr, FiniteLit):
        return "{" + " ".join(expr.names) + "}", 5
    if isinstance(expr, Const):
        return expr.which, 5
    if isinstance(expr, SetRef):
        return expr.name, 5
    if isinstance(expr, Not):
        text, prec = _print_expr(expr.arg)
        if prec < 4:
            text = f"({text})"
        return f"~{text}", 4
    left, lp = _print_expr(expr.left)
    right, rp = _print_expr(expr.right)
    p = _PREC[expr.op]
    if lp < p:
        left = f"({left})"
    if rp <= p:
        right = f"({right})"
    return f"{left} {expr.op} {right}", p


def _braces(names) -> str:
    return "{" + " ".join(names) + "}"


def print_model(doc: ModelDocument) -> str:
    blocks = []
    for d in doc.declarations:
        if isinstance(d, SpaceDecl):
            sp = d.space
            lines = [f"space {d.name} {{", f"  points: {' '.join(sp.points)};"]
            for i, p in enumerate(sp.points):
                lines.append(f"  vicinity {p}: {_braces(sp.names(sp.vicinity[i]))};")
            lines.append("}")
            blocks.append("\n".join(lines))
        elif isinstance(d, TopologyDecl):
            topo = d.topology
            shell = FinitePretop(topo.points, tuple(0 for _ in topo.points))
            opens = " ".join(_braces(shell.names(u)) for u in sorted(topo.opens))
            blocks.append(
                "\n".join(
                    [
                        f"topology {d.name} {{",
                        f"  points: {' '.join(topo.points)};",
                        f"  opens: {opens};",
                        "}",
                    ]
                )
            )
        elif isinstance(d, MapDecl):
            lines = [f"map {d.name}: {d.source} -> {d.target} {{"]
            for p, q in d.entries:
                lines.append(f"  {p} -> {q};")
            lines.append("}")
            blocks.append("\n".join(lines))
        elif isinstance(d, BuiltinDecl):
            rhs = d.kind if d.arg is None else f"{d.kind}({d.arg})"
            blocks.append(f"builtin {d.name} = {rhs}")
        else:
            blocks.append(f"set {d.name} = {print_set_expr(d.expr)}")
    return "\n\n".join(blocks) + "\n"


# -- canonical literals for answers ---------------------------------------------


def set_literal(d: DefSet) -> str:
    """Canonical expression text denoting a definable set.

    Evaluating the result on the schema's full carrier reproduces the
    set, which keeps golden answers byte-stable and reparseable.
    """
    if d.is_empty():
        return "empty"
    if d == DefSet.full(d.schema):
        return "all"
    terms = [f"atom({a})" for a in d.schema.atoms if a in d.atoms]
    for name, sel in d.rays:
        if sel.is_empty():
            continue
        if sel.is_full():
            terms.append(f"ray({name})")
        else:
            terms.append(f"ray({name}; {sel.describe()})")
    for name, groups in d.grids:
        for rows, cols in groups:
            clauses = [name]
            if not rows.is_full():
                clauses.append(f"rows={rows.describe()}")
            if not cols.is_full():
                clauses.append(f"cols={cols.describe()}")
            terms.append(f"grid({'; '.join(clauses)})")
    return " | ".join(terms)


def finite_literal(space: FinitePretop, mask: int) -> str:
    """Point-name braces for a mask, in declaration order."""
    return _braces(space.names(mask))
