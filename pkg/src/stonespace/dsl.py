"""The ``.tsf`` workspace language.

Example::

    layout L { tracks = [P, Q] }
    family D over L { component stem = /(0+1)*/ cycle = "0" track = Q }
    family T = discretize(D, P)
    class Z = empty(L)
    check closure_cardinality(T) expect continuum
    check least_is(T, T) expect true

Declarations are evaluated in order and may only refer to earlier names.
Family expressions: ``union``, ``discretize``, ``adjoin_dense``,
``disjoint_union`` and ``minus``.  Class expressions: ``sigma(L, [..])``,
``closure``, ``empty``, ``full`` and ``union``.  Checks take positional
identifiers, then options after ``;`` (``class = C``, ``sigma = [..]``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from .automata import RegexError
from .core import Card, Layout, Point, StoneSpaceError
from .family import Family, LassoComponent, embed_track, family_difference, family_union
from .safety import ClosedSet


class DSLError(StoneSpaceError):
    def __init__(self, message: str, line: int = 0, col: int = 0, expected: frozenset[str] = frozenset(), filename: str = "<input>"):
        self.message = message
        self.line = line
        self.col = col
        self.expected = expected
        self.filename = filename
        text = f"{filename}:{line}:{col}: {message}"
        if expected:
            text += f" (expected one of: {', '.join(sorted(expected))})"
        super().__init__(text)


# -- tokens ------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.\-]*)
  | (?P<number>[0-9]+)
  | (?P<string>"[^"\n]*")
  | (?P<regex>/[^/\n]*/)
  | (?P<punct>[{}\[\](),;=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, number, string, regex, punct, eof
    text: str
    line: int
    col: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(text: str, filename: str = "<input>") -> list[Token]:
    out = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DSLError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, filename=filename)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


# -- syntax tree ------------------------------------------------------------------

@dataclass(frozen=True)
class LayoutDecl:
    name: str
    tracks: tuple[str, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ComponentDecl:
    stem: str
    cycle: str
    track: str | None = None


@dataclass(frozen=True)
class PointDecl:
    text: str


@dataclass(frozen=True)
class FamilyDecl:
    name: str
    layout: str
    members: tuple[ComponentDecl | PointDecl, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    op: str
    args: tuple[str | tuple[str, ...], ...]
    opts: tuple[tuple[str, str | tuple[str, ...]], ...] = ()

    def opt(self, key: str, default=None):
        return dict(self.opts).get(key, default)


@dataclass(frozen=True)
class FamilyExpr:
    name: str
    call: Call
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ClassDecl:
    name: str
    call: Call
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CheckDecl:
    call: Call
    expect: str
    line: int = field(default=0, compare=False)


class _Parser:
    def __init__(self, text: str, filename: str):
        self.filename = filename
        self.toks = tokenize(text, filename)
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def fail(self, expected: set[str], tok: Token | None = None):
        tok = tok or self.cur
        raise DSLError(f"unexpected {tok.describe()}", tok.line, tok.col, frozenset(expected), self.filename)

    def accept(self, text: str) -> bool:
        if self.cur.text == text and self.cur.kind in ("ident", "punct"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.cur
        if not self.accept(text):
            self.fail({repr(text)})
        return tok

    def take(self, kind: str) -> Token:
        tok = self.cur
        if tok.kind != kind:
            self.fail({kind})
        self.i += 1
        return tok

    def ident_list(self) -> tuple[str, ...]:
        self.expect("[")
        items = []
        if not self.accept("]"):
            items.append(self.take("ident").text)
            while self.accept(","):
                items.append(self.take("ident").text)
            self.expect("]")
        return tuple(items)

    def parse(self) -> list:
        decls = []
        while self.cur.kind != "eof":
            tok = self.cur
            if self.accept("layout"):
                decls.append(self.layout(tok))
            elif self.accept("family"):
                decls.append(self.family(tok))
            elif self.accept("class"):
                name = self.take("ident").text
                self.expect("=")
                decls.append(ClassDecl(name, self.call(), tok.line))
            elif self.accept("check"):
                call = self.call()
                self.expect("expect")
                value = self.cur
                if value.kind not in ("ident", "number"):
                    self.fail({"value"})
                self.i += 1
                decls.append(CheckDecl(call, value.text, tok.line))
            else:
                self.fail({"'layout'", "'family'", "'class'", "'check'"})
        return decls

    def layout(self, tok: Token) -> LayoutDecl:
        name = self.take("ident").text
        self.expect("{")
        self.expect("tracks")
        self.expect("=")
        tracks = self.ident_list()
        self.expect("}")
        return LayoutDecl(name, tracks, tok.line)

    def family(self, tok: Token):
        name = self.take("ident").text
        if self.accept("="):
            return FamilyExpr(name, self.call(), tok.line)
        if not self.accept("over"):
            self.fail({"'='", "'over'"})
        layout = self.take("ident").text
        self.expect("{")
        members = []
        while not self.accept("}"):
            if self.accept("component"):
                self.expect("stem")
                self.expect("=")
                stem = self.take("regex").text[1:-1]
                self.expect("cycle")
                self.expect("=")
                cycle = self.take("string").text[1:-1]
                track = None
                if self.accept("track"):
                    self.expect("=")
                    track = self.take("ident").text
                members.append(ComponentDecl(stem, cycle, track))
            elif self.accept("point"):
                members.append(PointDecl(self.take("string").text[1:-1]))
            else:
                self.fail({"'component'", "'point'", "'}'"})
        return FamilyDecl(name, layout, tuple(members), tok.line)

    def call(self) -> Call:
        op = self.take("ident").text
        self.expect("(")
        args = []
        opts = []
        if self.cur.kind == "ident" or self.cur.text == "[":
            args.append(self.arg())
            while self.accept(","):
                args.append(self.arg())
        if self.accept(";"):
            opts.append(self.option())
            while self.accept(","):
                opts.append(self.option())
        if not self.accept(")"):
            self.fail({"')'", "','", "';'"})
        return Call(op, tuple(args), tuple(opts))

    def arg(self) -> str | tuple[str, ...]:
        if self.cur.text == "[":
            return self.ident_list()
        return self.take("ident").text

    def option(self) -> tuple[str, str | tuple[str, ...]]:
        key = self.take("ident").text
        self.expect("=")
        if self.cur.text == "[":
            return key, self.ident_list()
        if self.cur.kind in ("ident", "number"):
            value = self.cur.text
            self.i += 1
            return key, value
        self.fail({"'['", "ident", "number"})


# -- serialization -------------------------------------------------------------


def _fmt_value(v: str | tuple[str, ...]) -> str:
    return f"[{', '.join(v)}]" if isinstance(v, tuple) else v


def _fmt_call(c: Call) -> str:
    text = ", ".join(_fmt_value(a) for a in c.args)
    if c.opts:
        text += "; " + ", ".join(f"{k} = {_fmt_value(v)}" for k, v in c.opts)
    return f"{c.op}({text})"


def serialize(ws: Workspace) -> str:
    lines = []
    for d in ws.decls:
        if isinstance(d, LayoutDecl):
            lines.append(f"layout {d.name} {{ tracks = [{', '.join(d.tracks)}] }}")
        elif isinstance(d, FamilyDecl):
            lines.append(f"family {d.name} over {d.layout} {{")
            for m in d.members:
                if isinstance(m, PointDecl):
                    lines.append(f'  point "{m.text}"')
                else:
                    track = f" track = {m.track}" if m.track else ""
                    lines.append(f'  component stem = /{m.stem}/ cycle = "{m.cycle}"{track}')
            lines.append("}")
        elif isinstance(d, FamilyExpr):
            lines.append(f"family {d.name} = {_fmt_call(d.call)}")
        elif isinstance(d, ClassDecl):
            lines.append(f"class {d.name} = {_fmt_call(d.call)}")
        else:
            lines.append(f"check {_fmt_call(d.call)} expect {d.expect}")
    return "\n".join(lines) + "\n"


# -- evaluation -----------------------------------------------------------------


@dataclass
class Workspace:
    decls: tuple
    layouts: dict[str, Layout] = field(default_factory=dict, compare=False)
    families: dict[str, Family] = field(default_factory=dict, compare=False)
    classes: dict[str, ClosedSet] = field(default_factory=dict, compare=False)
    filename: str = field(default="<input>", compare=False)

    @property
    def checks(self) -> list[CheckDecl]:
        return [d for d in self.decls if isinstance(d, CheckDecl)]

    def error(self, message: str, line: int) -> DSLError:
        return DSLError(message, line, 1, filename=self.filename)

    def family(self, name: str, line: int = 0) -> Family:
        if name not in self.families:
            raise self.error(f"unknown family {name!r}", line)
        return self.families[name]

    def klass(self, name: str, line: int = 0) -> ClosedSet:
        if name not in self.classes:
            raise self.error(f"unknown class {name!r}", line)
        return self.classes[name]

    def layout(self, name: str, line: int = 0) -> Layout:
        if name not in self.layouts:
            raise self.error(f"unknown layout {name!r}", line)
        return self.layouts[name]

    def default_family(self) -> str:
        if not self.families:
            raise StoneSpaceError("workspace declares no family")
        return list(self.families)[-1]


def _names(ws: Workspace, call: Call, line: int) -> list[str]:
    for a in call.args:
        if isinstance(a, tuple):
            raise ws.error(f"{call.op} expects names, not a list", line)
    return list(call.args)


def parse_spec(text: str, filename: str = "<input>") -> Workspace:
    decls = _Parser(text, filename).parse()
    ws = Workspace(tuple(decls), filename=filename)
    for d in decls:
        _define(ws, d)
    return ws


def parse_file(path) -> Workspace:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read(), str(path))


def _define(ws: Workspace, d) -> None:
    name = getattr(d, "name", None)
    if name is not None and (name in ws.layouts or name in ws.families or name in ws.classes):
        raise ws.error(f"duplicate definition of {name!r}", d.line)
    try:
        if isinstance(d, LayoutDecl):
            if len(set(d.tracks)) != len(d.tracks) or not d.tracks:
                raise ws.error(f"layout {d.name!r} needs distinct track names", d.line)
            ws.layouts[d.name] = Layout(d.tracks)
        elif isinstance(d, FamilyDecl):
            ws.families[d.name] = _family_literal(ws, d)
        elif isinstance(d, FamilyExpr):
            ws.families[d.name] = _family_expr(ws, d.call, d.line)
        elif isinstance(d, ClassDecl):
            ws.classes[d.name] = _class_expr(ws, d.call, d.line)
        elif isinstance(d, CheckDecl):
            if d.call.op not in CHECKS:
                raise ws.error(f"unknown check {d.call.op!r}", d.line)
    except DSLError:
        raise
    except RegexError as exc:
        raise ws.error(f"bad stem expression: {exc}", d.line) from exc
    except StoneSpaceError as exc:
        raise ws.error(str(exc), d.line) from exc


def _family_literal(ws: Workspace, d: FamilyDecl) -> Family:
    layout = ws.layout(d.layout, d.line)
    one = Layout(("R",))
    comps: list[Family] = [Family.empty(layout)]
    for m in d.members:
        if isinstance(m, PointDecl):
            comps.append(Family.from_points(layout, [Point.parse(m.text)]))
            continue
        comp = LassoComponent.make(m.stem, m.cycle)
        if m.track is None:
            comps.append(Family.of(layout, [comp]))
        else:
            comps.append(embed_track(Family.of(one, [comp]), layout, m.track))
    return family_union(comps)


def _sigma(call: Call) -> tuple[str, ...]:
    value = call.opt("sigma", ())
    return value if isinstance(value, tuple) else (value,)


def _family_expr(ws: Workspace, call: Call, line: int) -> Family:
    from .constructions import adjoin_dense, discretize, disjoint_e_union

    def fams(n: int | None = None):
        if n is not None and len(call.args) != n:
            raise ws.error(f"{call.op} takes {n} arguments", line)
        return [ws.family(a, line) for a in _names(ws, call, line)]

    if call.op == "union":
        return family_union(fams())
    if call.op == "disjoint_union":
        return disjoint_e_union(fams(), _sigma(call))
    if call.op == "minus":
        a, b = fams(2)
        return family_difference(a, b)
    if call.op in ("discretize", "adjoin_dense"):
        if len(_names(ws, call, line)) != 2:
            raise ws.error(f"{call.op} takes a family and a track", line)
        F = ws.family(call.args[0], line)
        fn = discretize if call.op == "discretize" else adjoin_dense
        return fn(F, call.args[1])
    raise ws.error(f"unknown family operation {call.op!r}", line)


def _class_expr(ws: Workspace, call: Call, line: int) -> ClosedSet:
    from .closure import closure
    from .family import sigma_class

    if call.op == "sigma":
        if len(call.args) != 2 or not isinstance(call.args[1], tuple):
            raise ws.error("sigma takes a layout and a track list", line)
        return sigma_class(ws.layout(call.args[0], line), call.args[1])
    if call.op == "closure" and len(_names(ws, call, line)) == 1:
        return closure(ws.family(call.args[0], line))
    if call.op in ("empty", "full") and len(_names(ws, call, line)) == 1:
        layout = ws.layout(call.args[0], line)
        return ClosedSet.empty(layout) if call.op == "empty" else ClosedSet.full(layout)
    if call.op == "union" and call.args:
        _names(ws, call, line)
        out = ws.klass(call.args[0], line)
        for a in call.args[1:]:
            out = out | ws.klass(a, line)
        return out
    raise ws.error(f"bad class expression {call.op!r}", line)


# -- checks -------------------------------------------------------------------------


@dataclass
class CheckResult:
    text: str
    expected: str
    actual: str
    line: int

    @property
    def passed(self) -> bool:
        return self.expected == self.actual

    def to_json(self) -> dict:
        return {"check": self.text, "expected": self.expected, "actual": self.actual, "passed": self.passed}


def _relativizer(ws: Workspace, call: Call, line: int) -> ClosedSet | None:
    name = call.opt("class")
    return None if name is None else ws.klass(name, line)


def _b(value: bool) -> str:
    return "true" if value else "false"


def _relation(lhs: Card, rhs: Card) -> str:
    return "equal" if lhs == rhs else ("less" if lhs < rhs else "greater")


def _check_value(ws: Workspace, call: Call, line: int) -> str:
    from . import closure as cl
    from . import genset, spectra
    from .constructions import disjointness_check

    fams = [ws.family(a, line) for a in _names(ws, call, line)]
    if not fams:
        raise ws.error(f"check {call.op} needs a family argument", line)
    F = fams[0]
    R = _relativizer(ws, call, line)
    R0 = R if R is not None else ClosedSet.empty(F.layout)
    kind = call.op
    if kind == "spectrum":
        return str(spectra.e_spectrum_theory(F) if R is None else spectra.relative_spectrum(F, R))
    if kind == "structure_spectrum":
        return str(spectra.e_spectrum_structure(F))
    if kind == "relative_spectrum":
        return str(spectra.relative_spectrum(F, R0))
    if kind == "closure_cardinality":
        return str(cl.closed_cardinality(cl.closure(F)))
    if kind == "cardinality":
        from .family import family_cardinality

        return str(family_cardinality(F))
    if kind == "least_gen":
        return _b(genset.least_generating_set(cl.closure(F), R0).exists)
    if kind == "least_is":
        from .family import family_equal, family_minus_closed

        v = genset.least_generating_set(cl.closure(F), R0)
        target = family_minus_closed(fams[-1], R0)
        return _b(v.exists and family_equal(v.least, target))
    if kind == "conditions":
        v = genset.least_generating_set(cl.closure(F), R0)
        return "agree" if len(set(v.conditions.values())) == 1 else "disagree"
    if kind == "status":
        if len(fams) != 2:
            raise ws.error("status takes the base family and a candidate", line)
        return genset.generating_status(cl.closure(F), fams[1], R0)
    if kind == "additivity":
        rep = spectra.additivity_check(fams, _sigma(call))
        return _relation(rep.lhs, rep.rhs)
    if kind == "absolute_additivity":
        rep = spectra.additivity_check(fams, _sigma(call), relative=False)
        return _relation(rep.lhs, rep.rhs)
    if kind == "singleton_split":
        rep = spectra.singleton_split(F)
        return _relation(rep.lhs, rep.rhs)
    if kind == "disjoint":
        if len(fams) != 2:
            raise ws.error("disjoint takes two families", line)
        return _b(disjointness_check(fams[0], fams[1], _sigma(call)))
    if kind == "union_criterion":
        rep = genset.union_least_gen_criterion(fams, _sigma(call))
        return "agree" if rep.agree else "disagree"
    if kind == "relative_union_criterion":
        rep = genset.union_least_gen_criterion(fams, _sigma(call))
        return "agree" if rep.relative_agree and rep.decomposition_ok is not False else "disagree"
    if kind == "dichotomy":
        return _b(genset.dichotomy_check(F, R0))
    if kind == "decompose":
        rep = genset.decomposition_report(cl.closure(F), R0)
        return "ok" if all(rep.values()) else "violated"
    if kind == "finite_extension":
        C = cl.closure(F)
        v = genset.least_generating_set(C, R0)
        G = v.least if v.exists else v.candidate
        p = genset.outside_point(C, F.layout)
        if p is None:
            return "vacuous"
        Tf = Family.from_points(F.layout, [p])
        return _b(genset.finite_extension_preserves(G, C, Tf, R0))
    raise ws.error(f"unknown check {kind!r}", line)


CHECKS: frozenset[str] = frozenset(
    """spectrum structure_spectrum relative_spectrum closure_cardinality cardinality least_gen
    least_is conditions status additivity absolute_additivity singleton_split disjoint
    union_criterion relative_union_criterion dichotomy decompose finite_extension""".split()
)


def run_check(ws: Workspace, d: CheckDecl) -> CheckResult:
    try:
        actual = _check_value(ws, d.call, d.line)
    except DSLError:
        raise
    except StoneSpaceError as exc:
        actual = f"error: {exc}"
    return CheckResult(f"{_fmt_call(d.call)}", d.expect, actual, d.line)


def run_checks(ws: Workspace, progress: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    results = []
    for d in ws.checks:
        r = run_check(ws, d)
        if progress:
            progress(r)
        results.append(r)
    return results
