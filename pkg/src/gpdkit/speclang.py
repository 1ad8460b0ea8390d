"""The .gpd description language: tokenizer, parser, elaborator, serializer.

A file is a sequence of declarations; each declares a named groupoid
(explicit tables, pair, group, action, union, restrict) or an event space.
Scoping is single pass: a declaration may only reference names declared
above it.

Explicit groupoid declarations list generating arrows only.  Elaboration
adds units and formal inverses (an arrow ``alpha`` may be referenced as
``alphaInv`` in composition rows, which materializes its inverse), then
derives every composition entry forced by the unit, inverse and
cancellation laws.  Whatever remains composable but undetermined is an
error: free generation could be infinite, so closure must be explicit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import constructors
from .errors import (
    DuplicateLabel,
    ElaborationError,
    EmptyRestriction,
    GroupoidAxiomError,
    GpdError,
    SpecSyntaxError,
    UnexpectedCharacter,
)
from .groupoid import FiniteGroupoid, GroupoidTables, build
from .schwinger import EventSpace, Frame, build_event_space

KEYWORDS = frozenset(
    "groupoid objects arrows comp pair group action union restrict "
    "eventspace frame identify".split()
)
_IDENT_CHARS = frozenset(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_+-"
)
_PUNCT_SINGLE = frozenset("{}:;,()~.=")


@dataclass(frozen=True)
class Token:
    kind: str  # NAME | KEYWORD | PUNCT | EOF
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    """Split source text into tokens with 1-based line/column positions."""
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c in " \t\r":
            i, col = i + 1, col + 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == "-" and i + 1 < n and text[i + 1] == ">":
            tokens.append(Token("PUNCT", "->", line, col))
            i, col = i + 2, col + 2
            continue
        if c in _PUNCT_SINGLE:
            tokens.append(Token("PUNCT", c, line, col))
            i, col = i + 1, col + 1
            continue
        if c in _IDENT_CHARS:
            start, start_col = i, col
            while i < n and text[i] in _IDENT_CHARS:
                if text[i] == "-" and i + 1 < n and text[i + 1] == ">":
                    break
                i += 1
                col += 1
            word = text[start:i]
            kind = "KEYWORD" if word in KEYWORDS else "NAME"
            tokens.append(Token(kind, word, line, start_col))
            continue
        raise UnexpectedCharacter(c, line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


# -- AST -----------------------------------------------------------------


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    end_line: int
    end_column: int


@dataclass(frozen=True)
class Arrow:
    label: str
    src: str
    tgt: str
    span: Span


@dataclass(frozen=True)
class CompRow:
    left: str
    right: str
    rhs_name: str | None  # exactly one of rhs_name / rhs_unit is set
    rhs_unit: str | None
    span: Span


@dataclass(frozen=True)
class ExplicitGroupoidDecl:
    name: str
    objects: tuple[str, ...]
    arrows: tuple[Arrow, ...]
    comp_rows: tuple[CompRow, ...]
    span: Span


@dataclass(frozen=True)
class PairDecl:
    name: str
    labels: tuple[str, ...]
    span: Span


@dataclass(frozen=True)
class GroupDecl:
    name: str
    identity: str
    rows: tuple[tuple[str, ...], ...]
    span: Span


@dataclass(frozen=True)
class ActionDecl:
    name: str
    group_ref: str
    points: tuple[str, ...]
    maps: tuple[tuple[str, str, str, Span], ...]
    span: Span


@dataclass(frozen=True)
class UnionDecl:
    name: str
    refs: tuple[str, ...]
    span: Span


@dataclass(frozen=True)
class RestrictDecl:
    name: str
    ref: str
    subset: tuple[str, ...]
    span: Span


@dataclass(frozen=True)
class EventSpaceDecl:
    name: str
    frames: tuple[tuple[str, tuple[str, ...], Span], ...]
    identifications: tuple[tuple[str, str, str, str, Span], ...]
    span: Span


Declaration = (
    ExplicitGroupoidDecl
    | PairDecl
    | GroupDecl
    | ActionDecl
    | UnionDecl
    | RestrictDecl
    | EventSpaceDecl
)


@dataclass(frozen=True)
class SpecAst:
    declarations: tuple[Declaration, ...]


# -- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        # name -> kind ("groupoid" | "group" | "eventspace"); single pass
        self.declared: dict[str, str] = {}

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def fail(self, expected: tuple[str, ...], tok: Token | None = None):
        tok = tok or self.peek()
        found = tok.text if tok.kind != "EOF" else "end of input"
        raise SpecSyntaxError(expected, found, tok.line, tok.column)

    def expect_punct(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "PUNCT" or tok.text != text:
            self.fail((repr(text),))
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind != "KEYWORD" or tok.text != word:
            self.fail((repr(word),))
        return self.advance()

    def expect_name(self, what: str = "name") -> Token:
        tok = self.peek()
        if tok.kind != "NAME":
            self.fail((what,))
        return self.advance()

    def prev_end(self) -> tuple[int, int]:
        tok = self.tokens[self.pos - 1]
        return tok.line, tok.column + len(tok.text)

    def span_from(self, start: Token) -> Span:
        el, ec = self.prev_end()
        return Span(start.line, start.column, el, ec)

    def declare(self, name_tok: Token, kind: str) -> str:
        if name_tok.text in self.declared:
            raise SpecSyntaxError(
                ("undeclared name",),
                f"{name_tok.text} (already declared)",
                name_tok.line,
                name_tok.column,
            )
        self.declared[name_tok.text] = kind
        return name_tok.text

    def reference(self, name_tok: Token, kinds: tuple[str, ...], what: str) -> str:
        if self.declared.get(name_tok.text) not in kinds:
            raise SpecSyntaxError(
                (what,),
                f"{name_tok.text} (not declared above)",
                name_tok.line,
                name_tok.column,
            )
        return name_tok.text

    def namelist(self) -> list[str]:
        names = [self.expect_name().text]
        while self.peek().kind == "PUNCT" and self.peek().text == ",":
            self.advance()
            names.append(self.expect_name().text)
        return names

    def parse_file(self) -> SpecAst:
        decls: list[Declaration] = []
        dispatch = {
            "groupoid": self.parse_explicit,
            "pair": self.parse_pair,
            "group": self.parse_group,
            "action": self.parse_action,
            "union": self.parse_union,
            "restrict": self.parse_restrict,
            "eventspace": self.parse_eventspace,
        }
        while self.peek().kind != "EOF":
            tok = self.peek()
            handler = dispatch.get(tok.text) if tok.kind == "KEYWORD" else None
            if handler is None:
                self.fail(tuple(sorted(dispatch)))
            decls.append(handler())
        return SpecAst(tuple(decls))

    def parse_explicit(self) -> ExplicitGroupoidDecl:
        start = self.expect_keyword("groupoid")
        name = self.declare(self.expect_name("groupoid name"), "groupoid")
        self.expect_punct("{")
        self.expect_keyword("objects")
        self.expect_punct(":")
        objects = self.namelist()
        self.expect_punct(";")
        self.expect_keyword("arrows")
        self.expect_punct(":")
        arrows = [self.parse_arrow()]
        self.expect_punct(";")
        while self.peek().kind == "NAME":
            arrows.append(self.parse_arrow())
            self.expect_punct(";")
        comp_rows: list[CompRow] = []
        if self.peek().kind == "KEYWORD" and self.peek().text == "comp":
            self.advance()
            self.expect_punct(":")
            comp_rows.append(self.parse_comp_row())
            self.expect_punct(";")
            while self.peek().kind == "NAME":
                comp_rows.append(self.parse_comp_row())
                self.expect_punct(";")
        self.expect_punct("}")
        return ExplicitGroupoidDecl(
            name, tuple(objects), tuple(arrows), tuple(comp_rows), self.span_from(start)
        )

    def parse_arrow(self) -> Arrow:
        start = self.expect_name("arrow label")
        self.expect_punct(":")
        src = self.expect_name("source object")
        self.expect_punct("->")
        tgt = self.expect_name("target object")
        return Arrow(start.text, src.text, tgt.text, self.span_from(start))

    def parse_comp_row(self) -> CompRow:
        start = self.expect_name("morphism name")
        self.expect_punct(".")
        right = self.expect_name("morphism name")
        self.expect_punct("=")
        tok = self.peek()
        if tok.kind == "NAME" and tok.text == "unit":
            after = self.tokens[self.pos + 1]
            if after.kind == "PUNCT" and after.text == "(":
                self.advance()
                self.expect_punct("(")
                obj = self.expect_name("object name")
                self.expect_punct(")")
                return CompRow(start.text, right.text, None, obj.text, self.span_from(start))
        rhs = self.expect_name("morphism name or unit(...)")
        return CompRow(start.text, right.text, rhs.text, None, self.span_from(start))

    def parse_pair(self) -> PairDecl:
        start = self.expect_keyword("pair")
        name = self.declare(self.expect_name("pair groupoid name"), "groupoid")
        self.expect_punct("{")
        labels = self.namelist()
        self.expect_punct("}")
        return PairDecl(name, tuple(labels), self.span_from(start))

    def parse_group(self) -> GroupDecl:
        start = self.expect_keyword("group")
        name = self.declare(self.expect_name("group name"), "group")
        self.expect_punct("{")
        identity = self.expect_name("identity element").text
        self.expect_punct(";")
        rows: list[tuple[str, ...]] = []
        while self.peek().kind == "NAME" and self.peek().text == "row":
            self.advance()
            self.expect_punct(":")
            rows.append(tuple(self.namelist()))
            self.expect_punct(";")
        if not rows:
            self.fail(("'row'",))
        self.expect_punct("}")
        return GroupDecl(name, identity, tuple(rows), self.span_from(start))

    def parse_action(self) -> ActionDecl:
        start = self.expect_keyword("action")
        name = self.declare(self.expect_name("action groupoid name"), "groupoid")
        self.expect_punct("{")
        ref_tok = self.expect_name("group name")
        group_ref = self.reference(ref_tok, ("group",), "declared group name")
        self.expect_punct(";")
        points = self.namelist()
        self.expect_punct(";")
        maps: list[tuple[str, str, str, Span]] = []
        while self.peek().kind == "NAME" and self.peek().text == "map":
            mstart = self.advance()
            g = self.expect_name("group element").text
            x = self.expect_name("point").text
            self.expect_punct("->")
            y = self.expect_name("point").text
            self.expect_punct(";")
            maps.append((g, x, y, self.span_from(mstart)))
        if not maps:
            self.fail(("'map'",))
        self.expect_punct("}")
        return ActionDecl(name, group_ref, tuple(points), tuple(maps), self.span_from(start))

    def parse_union(self) -> UnionDecl:
        start = self.expect_keyword("union")
        name_tok = self.expect_name("union name")
        self.expect_punct("{")
        refs = [
            self.reference(
                self.expect_name("groupoid name"),
                ("groupoid", "group"),
                "declared groupoid name",
            )
        ]
        while self.peek().kind == "PUNCT" and self.peek().text == ",":
            self.advance()
            refs.append(
                self.reference(
                    self.expect_name("groupoid name"),
                    ("groupoid", "group"),
                    "declared groupoid name",
                )
            )
        self.expect_punct("}")
        name = self.declare(name_tok, "groupoid")
        return UnionDecl(name, tuple(refs), self.span_from(start))

    def parse_restrict(self) -> RestrictDecl:
        start = self.expect_keyword("restrict")
        name_tok = self.expect_name("restriction name")
        self.expect_punct("{")
        ref_tok = self.expect_name("groupoid name")
        ref = self.reference(ref_tok, ("groupoid", "group"), "declared groupoid name")
        self.expect_punct(";")
        subset = self.namelist()
        self.expect_punct("}")
        name = self.declare(name_tok, "groupoid")
        return RestrictDecl(name, ref, tuple(subset), self.span_from(start))

    def parse_eventspace(self) -> EventSpaceDecl:
        start = self.expect_keyword("eventspace")
        name = self.declare(self.expect_name("event space name"), "eventspace")
        self.expect_punct("{")
        frames: list[tuple[str, tuple[str, ...], Span]] = []
        while self.peek().kind == "KEYWORD" and self.peek().text == "frame":
            fstart = self.advance()
            flabel = self.expect_name("frame label").text
            self.expect_punct("{")
            events = tuple(self.namelist())
            self.expect_punct("}")
            frames.append((flabel, events, self.span_from(fstart)))
        if not frames:
            self.fail(("'frame'",))
        idents: list[tuple[str, str, str, str, Span]] = []
        while self.peek().kind == "KEYWORD" and self.peek().text == "identify":
            istart = self.advance()
            fa = self.expect_name("frame label").text
            self.expect_punct(".")
            ea = self.expect_name("event label").text
            self.expect_punct("~")
            fb = self.expect_name("frame label").text
            self.expect_punct(".")
            eb = self.expect_name("event label").text
            self.expect_punct(";")
            idents.append((fa, ea, fb, eb, self.span_from(istart)))
        self.expect_punct("}")
        return EventSpaceDecl(name, tuple(frames), tuple(idents), self.span_from(start))


def parse(tokens: list[Token]) -> SpecAst:
    return _Parser(tokens).parse_file()


# -- elaboration -----------------------------------------------------------


def _err(kind: str, message: str, span: Span) -> ElaborationError:
    return ElaborationError(kind, message, span.line, span.column)


def _elaborate_explicit(decl: ExplicitGroupoidDecl) -> FiniteGroupoid:
    objects = list(decl.objects)
    if len(set(objects)) != len(objects):
        raise _err("duplicate_label", "object labels are not distinct", decl.span)
    obj_idx = {o: i for i, o in enumerate(objects)}
    n = len(objects)

    labels = [f"1_{o}" for o in objects]
    source = list(range(n))
    target = list(range(n))
    label_idx = {lab: i for i, lab in enumerate(labels)}
    arrow_idx: dict[str, int] = {}

    def add_morphism(label: str, src: int, tgt: int, span: Span) -> int:
        if label in label_idx:
            raise _err("duplicate_label", f"morphism label {label} already in use", span)
        k = len(labels)
        labels.append(label)
        label_idx[label] = k
        source.append(src)
        target.append(tgt)
        return k

    for arrow in decl.arrows:
        for endpoint in (arrow.src, arrow.tgt):
            if endpoint not in obj_idx:
                raise _err("unknown_name", f"unknown object {endpoint}", arrow.span)
        arrow_idx[arrow.label] = add_morphism(
            arrow.label, obj_idx[arrow.src], obj_idx[arrow.tgt], arrow.span
        )

    inverse: dict[int, int] = {i: i for i in range(n)}  # units are self-inverse

    def ensure_formal_inverse(base_label: str, span: Span) -> int:
        base = arrow_idx[base_label]
        if base in inverse:
            return inverse[base]
        formal = base_label + "Inv"
        if formal in label_idx:
            raise _err(
                "duplicate_label",
                f"{formal} is already declared; designate it as the inverse "
                f"of {base_label} with comp rows "
                f"{base_label} . {formal} = unit(...) and "
                f"{formal} . {base_label} = unit(...)",
                span,
            )
        k = add_morphism(formal, target[base], source[base], span)
        inverse[base] = k
        inverse[k] = base
        return k

    def resolve_morphism(name: str, span: Span) -> int:
        if name in arrow_idx:
            return arrow_idx[name]
        if name.endswith("Inv") and name[:-3] in arrow_idx:
            return ensure_formal_inverse(name[:-3], span)
        raise _err("unknown_name", f"unknown morphism {name}", span)

    comp: dict[tuple[int, int], int] = {}

    def put(i: int, j: int, k: int, span: Span, law: str = "") -> bool:
        old = comp.get((i, j))
        if old is None:
            comp[(i, j)] = k
            return True
        if old != k:
            raise _err(
                "axiom_violation",
                f"conflicting compositions: {labels[i]} . {labels[j]} = "
                f"{labels[old]} and {labels[k]}{law}",
                span,
            )
        return False

    for row in decl.comp_rows:
        i = resolve_morphism(row.left, row.span)
        j = resolve_morphism(row.right, row.span)
        if row.rhs_unit is not None:
            if row.rhs_unit not in obj_idx:
                raise _err("unknown_name", f"unknown object {row.rhs_unit}", row.span)
            k = obj_idx[row.rhs_unit]
        else:
            k = resolve_morphism(row.rhs_name, row.span)
        put(i, j, k, row.span)

    # pair every arrow with an inverse: a user-designated one if both unit
    # rows witness it, its formal <label>Inv otherwise; the unit at object
    # x sits at morphism index x throughout this construction
    for arrow in decl.arrows:
        gi = arrow_idx[arrow.label]
        if gi in inverse:
            continue
        witness = None
        for di in range(len(labels)):
            if comp.get((gi, di)) == target[gi] and comp.get((di, gi)) == source[gi]:
                if di not in inverse or inverse[di] == gi:
                    witness = di
                    break
        if witness is not None:
            inverse[gi] = witness
            inverse[witness] = gi
        else:
            ensure_formal_inverse(arrow.label, arrow.span)

    N = len(labels)
    # unit and inverse laws (axioms b and e) hold in any groupoid, so their
    # comp entries are forced; fill them in before closure is judged
    for j in range(N):
        put(target[j], j, j, decl.span, " (unit law, axiom b)")
        put(j, source[j], j, decl.span, " (unit law, axiom b)")
    for i, k in inverse.items():
        put(i, k, target[i], decl.span, " (inverse law, axiom e)")
        put(k, i, source[i], decl.span, " (inverse law, axiom e)")

    # cancellation closure: from i o j = k derive the three entries the
    # groupoid laws force; iterate to a fixpoint
    changed = True
    while changed:
        changed = False
        for (i, j), k in list(comp.items()):
            changed |= put(inverse[j], inverse[i], inverse[k], decl.span, " (inverses of a composite)")
            changed |= put(inverse[i], k, j, decl.span, " (cancellation)")
            changed |= put(k, inverse[j], i, decl.span, " (cancellation)")

    missing = [
        (i, j)
        for i in range(N)
        for j in range(N)
        if source[i] == target[j] and (i, j) not in comp
    ]
    if missing:
        shown = ", ".join(f"{labels[i]} . {labels[j]}" for i, j in missing[:4])
        more = "" if len(missing) <= 4 else f" (+{len(missing) - 4} more)"
        raise _err(
            "not_closed",
            f"composition not determined for {shown}{more}; add comp rows",
            decl.span,
        )

    tables = GroupoidTables(
        object_labels=objects,
        morphism_labels=labels,
        source=source,
        target=target,
        unit=list(range(n)),
        inverse=[inverse[i] for i in range(N)],
        comp=comp,
    )
    try:
        return build(tables)
    except GroupoidAxiomError as exc:
        raise _err("axiom_violation", str(exc), decl.span) from exc


def _elaborate_group(decl: GroupDecl) -> constructors.GroupTable:
    elements = decl.rows[0]
    if len(set(elements)) != len(elements):
        raise _err("duplicate_label", "group elements are not distinct", decl.span)
    if decl.identity != elements[0]:
        raise _err(
            "invalid_table",
            f"identity {decl.identity} must be the first element of the first row",
            decl.span,
        )
    m = len(elements)
    if len(decl.rows) != m:
        raise _err(
            "invalid_table",
            f"expected {m} Cayley rows (one per element), got {len(decl.rows)}",
            decl.span,
        )
    idx = {e: i for i, e in enumerate(elements)}
    mult = np.empty((m, m), dtype=np.int64)
    for i, row in enumerate(decl.rows):
        if len(row) != m:
            raise _err("invalid_table", f"row {i + 1} has {len(row)} entries, expected {m}", decl.span)
        for j, name in enumerate(row):
            if name not in idx:
                raise _err("unknown_name", f"unknown group element {name}", decl.span)
            mult[i, j] = idx[name]
    try:
        return constructors.GroupTable.from_mult(elements, 0, mult)
    except GpdError as exc:
        raise _err("invalid_table", str(exc), decl.span) from exc


def _elaborate_action(
    decl: ActionDecl, groups: dict[str, constructors.GroupTable]
) -> FiniteGroupoid:
    gt = groups[decl.group_ref]
    points = decl.points
    if len(set(points)) != len(points):
        raise _err("duplicate_label", "action points are not distinct", decl.span)
    pidx = {p: i for i, p in enumerate(points)}
    eidx = {e: i for i, e in enumerate(gt.element_labels)}
    act = np.full((gt.order, len(points)), -1, dtype=np.int64)
    act[gt.identity] = np.arange(len(points))
    for gname, xname, yname, span in decl.maps:
        if gname not in eidx:
            raise _err("unknown_name", f"unknown group element {gname}", span)
        if xname not in pidx or yname not in pidx:
            raise _err("unknown_name", f"unknown point in map {gname} {xname} -> {yname}", span)
        g, x, y = eidx[gname], pidx[xname], pidx[yname]
        old = int(act[g, x])
        if old not in (-1, y):
            raise _err(
                "invalid_table",
                f"conflicting images for {gname} {xname}",
                span,
            )
        act[g, x] = y
    holes = np.argwhere(act < 0)
    if holes.size:
        g, x = holes[0]
        raise _err(
            "invalid_table",
            f"action table incomplete: no map for {gt.element_labels[g]} {points[x]}",
            decl.span,
        )
    try:
        spec = constructors.ActionSpec(gt, points, act)
        return constructors.action_groupoid(spec)
    except GpdError as exc:
        raise _err("invalid_table", str(exc), decl.span) from exc


def elaborate(ast: SpecAst) -> dict[str, FiniteGroupoid | EventSpace]:
    """Turn a parsed file into validated values, in declaration order."""
    values: dict[str, FiniteGroupoid | EventSpace] = {}
    groups: dict[str, constructors.GroupTable] = {}
    for decl in ast.declarations:
        if isinstance(decl, ExplicitGroupoidDecl):
            values[decl.name] = _elaborate_explicit(decl)
        elif isinstance(decl, PairDecl):
            try:
                values[decl.name] = constructors.pair_groupoid(decl.labels)
            except DuplicateLabel as exc:
                raise _err("duplicate_label", str(exc), decl.span) from exc
        elif isinstance(decl, GroupDecl):
            gt = _elaborate_group(decl)
            groups[decl.name] = gt
            values[decl.name] = constructors.group_as_groupoid(gt)
        elif isinstance(decl, ActionDecl):
            values[decl.name] = _elaborate_action(decl, groups)
        elif isinstance(decl, UnionDecl):
            parts = [values[r] for r in decl.refs]
            out = parts[0]
            for p in parts[1:]:
                out = constructors.disjoint_union(out, p)
            values[decl.name] = out
        elif isinstance(decl, RestrictDecl):
            parent = values[decl.ref]
            subset = []
            for label in decl.subset:
                if label not in parent.object_labels:
                    raise _err(
                        "unknown_name",
                        f"{decl.ref} has no object {label}",
                        decl.span,
                    )
                subset.append(parent.object_labels.index(label))
            try:
                values[decl.name] = parent.restrict(subset)
            except EmptyRestriction as exc:
                raise _err("invalid_table", str(exc), decl.span) from exc
        elif isinstance(decl, EventSpaceDecl):
            try:
                frames = [Frame(lbl, events) for lbl, events, _ in decl.frames]
                idents = [
                    ((fa, ea), (fb, eb)) for fa, ea, fb, eb, _ in decl.identifications
                ]
                values[decl.name] = build_event_space(frames, idents)
            except GpdError as exc:
                if isinstance(exc, ElaborationError):
                    raise
                kind = "unknown_name" if "unknown" in str(exc) else "invalid_table"
                raise _err(kind, str(exc), decl.span) from exc
        else:  # pragma: no cover - parser produces no other nodes
            raise _err("invalid_table", f"unhandled declaration {decl!r}", decl.span)
    return values


def loads(text: str) -> dict[str, FiniteGroupoid | EventSpace]:
    return elaborate(parse(tokenize(text)))


def load(path) -> dict[str, FiniteGroupoid | EventSpace]:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


# -- serialization -----------------------------------------------------------


def _sanitize(label: str, taken: set[str], fallback: str = "x") -> str:
    clean = "".join(c if c in _IDENT_CHARS else "_" for c in label)
    if not clean:
        clean = fallback
    if clean in KEYWORDS or clean in ("unit", "row", "map"):
        clean = "n_" + clean
    candidate, k = clean, 1
    while candidate in taken:
        k += 1
        candidate = f"{clean}_{k}"
    taken.add(candidate)
    return candidate


def _serialize_groupoid(g: FiniteGroupoid, name: str) -> tuple[str, dict[int, str]]:
    """Emit declarations for g; also return morphism index -> emitted name."""
    taken: set[str] = set()
    decl_name = _sanitize(name, taken)
    obj_names = {}
    obj_taken: set[str] = set()
    for x, lab in enumerate(g.object_labels):
        obj_names[x] = _sanitize(lab, obj_taken)

    unit_set = {int(u) for u in g.unit}
    non_units = [i for i in range(g.n_morphisms) if i not in unit_set]

    if not non_units:
        # the explicit grammar requires at least one arrow; a units-only
        # groupoid is emitted as (a union of) singleton pair declarations
        morphism_names = {int(g.unit[x]): f"({obj_names[x]},{obj_names[x]})" for x in range(g.n_objects)}
        if g.n_objects == 1:
            return f"pair {decl_name} {{ {obj_names[0]} }}\n", morphism_names
        lines = []
        part_names = []
        for x in range(g.n_objects):
            pname = _sanitize(f"{decl_name}_part{x}", taken)
            part_names.append(pname)
            lines.append(f"pair {pname} {{ {obj_names[x]} }}")
        lines.append(f"union {decl_name} {{ {', '.join(part_names)} }}")
        # union prefixes labels, so the reconstructed unit names differ;
        # callers treat units-only round trips up to relabeling
        return "\n".join(lines) + "\n", morphism_names

    # pick one representative per inverse pair; prefer a label that does
    # not already end in Inv so alpha/alphaInv shaped pairs stay pretty
    reps: list[int] = []
    partner_of: dict[int, int] = {}
    seen: set[int] = set()
    for i in non_units:
        if i in seen:
            continue
        j = int(g.inverse[i])
        pair = sorted({i, j})
        cand = sorted(pair, key=lambda k: (g.morphism_labels[k].endswith("Inv"), k))
        rep = cand[0]
        reps.append(rep)
        seen.update(pair)
        if j != i:
            partner_of[rep] = j if rep == i else i

    arrow_taken = set()
    unit_labels = {f"1_{obj_names[x]}" for x in range(g.n_objects)}
    morphism_names: dict[int, str] = {
        int(g.unit[x]): f"1_{obj_names[x]}" for x in range(g.n_objects)
    }
    for rep in reps:
        base = None
        trial_taken = set(arrow_taken) | unit_labels
        while base is None:
            cand = _sanitize(g.morphism_labels[rep], trial_taken)
            if rep in partner_of and (cand + "Inv") in trial_taken | {cand}:
                continue  # the uniquifier will try the next suffix
            base = cand
        arrow_taken.add(base)
        if rep in partner_of:
            arrow_taken.add(base + "Inv")
            morphism_names[partner_of[rep]] = base + "Inv"
        morphism_names[rep] = base

    arrows = "; ".join(
        f"{morphism_names[rep]}: {obj_names[int(g.source[rep])]} -> "
        f"{obj_names[int(g.target[rep])]}"
        for rep in reps
    )
    rows = []
    for j, k, i in sorted(g.comp_items()):
        if j in unit_set or k in unit_set:
            continue
        if i in unit_set:
            rhs = f"unit({obj_names[int(g.source[i])]})"
        else:
            rhs = morphism_names[i]
        rows.append(f"{morphism_names[j]} . {morphism_names[k]} = {rhs}")
    lines = [f"groupoid {decl_name} {{"]
    lines.append(f"  objects: {', '.join(obj_names[x] for x in range(g.n_objects))};")
    lines.append(f"  arrows: {arrows};")
    if rows:
        lines.append(f"  comp: {'; '.join(rows)};")
    lines.append("}")
    return "\n".join(lines) + "\n", morphism_names


def _serialize_event_space(es: EventSpace, name: str) -> str:
    taken: set[str] = set()
    decl_name = _sanitize(name, taken)
    frame_names: dict[str, str] = {}
    frame_taken: set[str] = set()
    event_names: dict[tuple[str, str], str] = {}
    for f in es.frames:
        frame_names[f.label] = _sanitize(f.label, frame_taken)
        ev_taken: set[str] = set()
        for e in f.events:
            event_names[(f.label, e)] = _sanitize(e, ev_taken)
    lines = [f"eventspace {decl_name} {{"]
    for f in es.frames:
        evs = ", ".join(event_names[(f.label, e)] for e in f.events)
        lines.append(f"  frame {frame_names[f.label]} {{ {evs} }}")
    for (fa, ea), (fb, eb) in es.identifications:
        lines.append(
            f"  identify {frame_names[fa]} . {event_names[(fa, ea)]} ~ "
            f"{frame_names[fb]} . {event_names[(fb, eb)]};"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize(value: FiniteGroupoid | EventSpace, name: str = "G") -> str:
    """Canonical .gpd text for a validated value.

    Parsing and elaborating the output yields a value isomorphic to the
    input (labels may be sanitized; inverse partners are renamed to the
    representative's name plus Inv).
    """
    if isinstance(value, EventSpace):
        return _serialize_event_space(value, name)
    text, _ = _serialize_groupoid(value, name)
    return text


def serialize_with_names(value: FiniteGroupoid, name: str = "G") -> tuple[str, dict[int, str]]:
    """Like :func:`serialize` but also return the emitted morphism names."""
    return _serialize_groupoid(value, name)
