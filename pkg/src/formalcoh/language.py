"""Manifest format and query language.

Manifest (line oriented, ``#`` starts a comment)::

    manifest  := { line NEWLINE }
    line      := ring | ideal | module | complex | options
    ring      := "RING" var { var } [ "CHAR" int ]
    ideal     := "IDEAL" name "=" ( "0" | monomial { "," monomial } )
    module    := "MODULE" name "=" expr
               | "MODULE" name NEWLINE { gen | rel } "END"
    gen       := "GEN" degree                 free generator in that degree
    rel       := "REL" relterm { ("+"|"-") relterm } [ "@" degree ]
    relterm   := [ scalar "*" ] [ monomial "*" ] "e" int     (generators count from 1)
    complex   := "COMPLEX" name "=" expr
    options   := "OPTIONS" { key "=" value }  key in box, stages, plateau
    degree    := "(" int { "," int } ")"

Queries and right-hand sides share one expression grammar::

    expr      := term { "+" term }            direct sum
    term      := call | "S" [ "(" ints ")" ] [ "/" ideal ] | "k" | ideal-lit
               | monomial | int | name
    call      := name [ "[" range "]" ] "(" [ args ] [ ";" args ] ")"
    args      := expr { "," expr }
    range     := int [ ".." int ]
    ideal-lit := "(" monomial { "," monomial } ")"
    monomial  := "1" | var [ "^" int ] { "*" var [ "^" int ] }

Whitespace is insignificant inside expressions; integers are signed
decimals.  Errors carry 1-based line and column numbers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import ParseError

# --- tokens --------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<range>\.\.)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<sym>[()\[\],;+\-*^/=@])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str   # int | ident | sym | range | end
    text: str
    col: int    # 1-based


def tokenize(text: str, line: int | None = None) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), pos + 1))
        pos = m.end()
    out.append(Token("end", "", len(text) + 1))
    return out


# --- AST -----------------------------------------------------------------

@dataclass(frozen=True)
class Name:
    id: str

    def __str__(self):
        return self.id


@dataclass(frozen=True)
class Int:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Monomial:
    powers: tuple  # ((var, exponent), ...); empty means 1

    def __str__(self):
        if not self.powers:
            return "1"
        return "*".join(v if e == 1 else f"{v}^{e}" for v, e in self.powers)


@dataclass(frozen=True)
class IdealLit:
    monomials: tuple  # of Monomial; (Int(0),) for the zero ideal

    def __str__(self):
        return "(" + ", ".join(str(m) for m in self.monomials) + ")"


@dataclass(frozen=True)
class Free:
    """S, or S(v) = S twisted so its generator sits in degree -v."""

    twist: tuple | None = None

    def __str__(self):
        return "S" if self.twist is None else "S(" + ",".join(str(c) for c in self.twist) + ")"


@dataclass(frozen=True)
class Quot:
    ideal: object

    def __str__(self):
        return f"S/{self.ideal}"


@dataclass(frozen=True)
class Residue:
    def __str__(self):
        return "k"


@dataclass(frozen=True)
class Sum:
    terms: tuple

    def __str__(self):
        return " + ".join(str(t) for t in self.terms)


@dataclass(frozen=True)
class Call:
    func: str
    index: tuple | None   # (lo, hi) or None
    groups: tuple         # tuple of tuples of expressions (split by ';')

    def __str__(self):
        s = self.func
        if self.index is not None:
            lo, hi = self.index
            s += f"[{lo}]" if lo == hi else f"[{lo}..{hi}]"
        return s + "(" + "; ".join(", ".join(str(e) for e in g) for g in self.groups) + ")"


# --- expression parser ---------------------------------------------------

class _Parser:
    def __init__(self, text: str, line: int | None = None, col_offset: int = 0):
        self.toks = tokenize(text, line)
        self.line = line
        self.off = col_offset
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"{msg}, found {what}", self.line, tok.col + self.off)

    def accept(self, text):
        if self.tok.text == text and self.tok.kind in ("sym", "range", "ident"):
            self.pos += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            self.error(f"expected {text!r}")

    def at_end(self):
        return self.tok.kind == "end"

    def signed_int(self) -> int:
        neg = self.accept("-")
        if self.tok.kind != "int":
            self.error("expected an integer")
        v = int(self.tok.text)
        self.pos += 1
        return -v if neg else v

    def degree(self) -> tuple:
        self.expect("(")
        vals = [self.signed_int()]
        while self.accept(","):
            vals.append(self.signed_int())
        self.expect(")")
        return tuple(vals)

    def monomial_after(self, first: str) -> Monomial:
        powers = [(first, self._power())]
        while self.tok.text == "*" and self.toks[self.pos + 1].kind == "ident":
            self.pos += 1
            v = self.tok.text
            self.pos += 1
            powers.append((v, self._power()))
        return Monomial(tuple(powers))

    def _power(self):
        if self.accept("^"):
            if self.tok.kind != "int":
                self.error("expected an exponent")
            e = int(self.tok.text)
            self.pos += 1
            return e
        return 1

    def monomial(self) -> object:
        if self.tok.kind == "int" and self.tok.text in ("0", "1"):
            v = int(self.tok.text)
            self.pos += 1
            return Monomial(()) if v == 1 else Int(0)
        if self.tok.kind != "ident":
            self.error("expected a monomial")
        v = self.tok.text
        self.pos += 1
        return self.monomial_after(v)

    def ideal_literal(self) -> IdealLit:
        self.expect("(")
        mons = [self.monomial()]
        while self.accept(","):
            mons.append(self.monomial())
        self.expect(")")
        return IdealLit(tuple(mons))

    def expr(self):
        terms = [self.term()]
        while self.accept("+"):
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        tok = self.tok
        if tok.kind == "int" or tok.text == "-":
            return Int(self.signed_int())
        if tok.text == "(":
            return self.ideal_literal()
        if tok.kind != "ident":
            self.error("expected an expression")
        name = tok.text
        self.pos += 1
        if name == "S":
            twist = None
            if self.tok.text == "(":
                twist = self.degree()
            if self.accept("/"):
                if twist is not None:
                    self.error("twisted quotients are written in a MODULE block")
                return Quot(self.ideal_ref())
            return Free(twist)
        if name == "k" and self.tok.text not in ("(", "["):
            return Residue()
        if self.tok.text in ("(", "["):
            return self.call(name)
        if self.tok.text in ("^", "*") and (self.tok.text == "^" or self.toks[self.pos + 1].kind == "ident"):
            return self.monomial_after(name)
        return Name(name)

    def ideal_ref(self):
        if self.tok.text == "(":
            return self.ideal_literal()
        if self.tok.kind == "ident":
            name = self.tok.text
            self.pos += 1
            return Name(name)
        self.error("expected an ideal")

    def call(self, name):
        index = None
        if self.accept("["):
            lo = self.signed_int()
            hi = lo
            if self.accept(".."):
                hi = self.signed_int()
            if hi < lo:
                self.error("empty index range")
            self.expect("]")
            index = (lo, hi)
        self.expect("(")
        groups = []
        cur = []
        if self.tok.text != ")":
            while True:
                if self.tok.text == ";":
                    groups.append(tuple(cur))
                    cur = []
                    self.pos += 1
                    continue
                cur.append(self.expr())
                if self.accept(","):
                    continue
                if self.tok.text == ";":
                    continue
                break
        groups.append(tuple(cur))
        self.expect(")")
        return Call(name, index, tuple(groups))


def parse_expression(text: str, line: int | None = None, col_offset: int = 0):
    p = _Parser(text, line, col_offset)
    e = p.expr()
    if not p.at_end():
        p.error("unexpected trailing input")
    return e


def parse_query(text: str):
    """AST of a query; raises ParseError with a 1-based column."""
    if not text.strip():
        raise ParseError("empty query", None, 1)
    return parse_expression(text)


# --- manifests -----------------------------------------------------------

@dataclass(frozen=True)
class RelTerm:
    scalar: Fraction
    monomial: Monomial
    gen: int       # 1-based


@dataclass
class ModuleDef:
    name: str
    expr: object = None               # short form
    gens: list = dc_field(default_factory=list)       # list of degrees
    rels: list = dc_field(default_factory=list)       # list of (terms, degree or None, line)
    line: int = 0


@dataclass
class Manifest:
    variables: list
    characteristic: int = 0
    ideals: dict = dc_field(default_factory=dict)     # name -> IdealLit
    modules: dict = dc_field(default_factory=dict)    # name -> ModuleDef
    complexes: dict = dc_field(default_factory=dict)  # name -> expression AST
    options: dict = dc_field(default_factory=dict)    # box, stages, plateau (as given)
    order: list = dc_field(default_factory=list)      # (kind, name) in definition order
    lines: dict = dc_field(default_factory=dict)      # name -> line number

    def names(self):
        return [n for _, n in self.order]


RESERVED = {"S", "k", "m", "e"}
_NAME = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


def _parse_scalar(text, line, col):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad scalar {text!r}", line, col)


def _parse_rel(text: str, line: int, col0: int):
    """relterm {(+|-) relterm} [@ degree]"""
    p = _Parser(text, line, col0)
    terms = []
    sign = 1
    if p.accept("-"):
        sign = -1
    while True:
        scalar = Fraction(1)
        if p.tok.kind == "int":
            num = p.tok.text
            p.pos += 1
            if p.accept("/"):
                if p.tok.kind != "int":
                    p.error("expected a denominator")
                num += "/" + p.tok.text
                p.pos += 1
            scalar = _parse_scalar(num, line, p.tok.col + col0)
            if not p.accept("*"):
                p.error("expected '*' after a scalar")
        mono = Monomial(())
        gen = None
        while True:
            if p.tok.kind != "ident":
                p.error("expected a variable or a generator e<k>")
            t = p.tok
            p.pos += 1
            g = re.fullmatch(r"e(\d+)", t.text)
            if g:
                gen = int(g.group(1))
                if gen < 1:
                    raise ParseError("generators are numbered from 1", line, t.col + col0)
                break
            e = p._power()
            mono = Monomial(mono.powers + ((t.text, e),))
            p.expect("*")
        terms.append(RelTerm(sign * scalar, mono, gen))
        if p.accept("+"):
            sign = 1
        elif p.accept("-"):
            sign = -1
        else:
            break
    degree = None
    if p.accept("@"):
        degree = p.degree()
    if not p.at_end():
        p.error("unexpected trailing input")
    return terms, degree


def _parse_box(value: str, line, col):
    """"lo..hi" for every coordinate, or "lo..hi,lo..hi,..." per coordinate."""
    parts = value.split(",")
    out = []
    for part in parts:
        m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", part)
        if not m:
            raise ParseError(f"bad box {value!r}; expected lo..hi", line, col)
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo > hi:
            raise ParseError(f"empty box interval {part.strip()!r}", line, col)
        out.append((lo, hi))
    return tuple(out)


def parse_manifest(text: str) -> Manifest:
    man = None
    block = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        kw, _, rest = body.partition(" ")
        rest_col = indent + len(kw) + 2 + (len(rest) - len(rest.lstrip()))
        rest = rest.strip()
        if block is not None:
            if kw == "END":
                if not block.gens:
                    raise ParseError(f"module {block.name} has no generators", ln, indent + 1)
                block = None
            elif kw == "GEN":
                block.gens.append(_Parser(rest, ln, rest_col - 1).degree())
            elif kw == "REL":
                terms, degree = _parse_rel(rest, ln, rest_col - 1)
                block.rels.append((terms, degree, ln))
            else:
                raise ParseError(f"expected GEN, REL or END inside MODULE {block.name}", ln, indent + 1)
            continue
        if kw == "RING":
            if man is not None:
                raise ParseError("RING given twice", ln, indent + 1)
            words = rest.split()
            char = 0
            if "CHAR" in words:
                k = words.index("CHAR")
                if k + 2 != len(words) or not words[k + 1].isdigit():
                    raise ParseError("expected CHAR <int> at the end of RING", ln, indent + 1)
                char = int(words[k + 1])
                words = words[:k]
            if not words:
                raise ParseError("RING needs at least one variable", ln, indent + 1)
            for w in words:
                if not _NAME.match(w) or w in RESERVED:
                    raise ParseError(f"bad variable name {w!r}", ln, indent + 1)
            if len(set(words)) != len(words):
                raise ParseError("repeated variable name", ln, indent + 1)
            man = Manifest(words, char)
            continue
        if man is None:
            raise ParseError("the manifest must start with RING", ln, indent + 1)
        if kw == "OPTIONS":
            for item in rest.split():
                key, eq, val = item.partition("=")
                col = indent + body.index(item) + 1
                if not eq:
                    raise ParseError(f"expected key=value, found {item!r}", ln, col)
                if key == "box":
                    man.options["box"] = _parse_box(val, ln, col)
                elif key in ("stages", "plateau"):
                    if not re.fullmatch(r"\d+", val) or int(val) < 1:
                        raise ParseError(f"{key} must be a positive integer", ln, col)
                    man.options[key] = int(val)
                else:
                    raise ParseError(f"unknown option {key!r}", ln, col)
            continue
        if kw not in ("IDEAL", "MODULE", "COMPLEX"):
            raise ParseError(f"unknown keyword {kw!r}", ln, indent + 1)
        name, eq, rhs = rest.partition("=")
        name = name.strip()
        if not _NAME.match(name) or name in RESERVED or name in man.variables:
            raise ParseError(f"bad or reserved name {name!r}", ln, rest_col)
        if name in man.lines:
            raise ParseError(f"name {name!r} already defined on line {man.lines[name]}", ln, rest_col)
        rhs_col = rest_col + len(rest) - len(rhs) + (len(rhs) - len(rhs.lstrip()))
        rhs = rhs.strip()
        man.lines[name] = ln
        if kw == "IDEAL":
            if not eq:
                raise ParseError("expected '=' after the ideal name", ln, rest_col)
            p = _Parser(rhs, ln, rhs_col - 1)
            mons = [p.monomial()]
            while p.accept(","):
                mons.append(p.monomial())
            if not p.at_end():
                p.error("unexpected trailing input")
            man.ideals[name] = IdealLit(tuple(mons))
            man.order.append(("IDEAL", name))
        elif kw == "MODULE":
            if eq:
                man.modules[name] = ModuleDef(name, parse_expression(rhs, ln, rhs_col - 1), line=ln)
            else:
                block = ModuleDef(name, line=ln)
                man.modules[name] = block
            man.order.append(("MODULE", name))
        else:
            if not eq:
                raise ParseError("expected '=' after the complex name", ln, rest_col)
            man.complexes[name] = parse_expression(rhs, ln, rhs_col - 1)
            man.order.append(("COMPLEX", name))
    if block is not None:
        raise ParseError(f"MODULE {block.name} is missing END", block.line, 1)
    if man is None:
        raise ParseError("empty manifest: expected RING", 1, 1)
    from .resolve import resolve_manifest
    resolve_manifest(man)  # reports unresolved names and degree errors
    return man


def render_manifest(man: Manifest) -> str:
    """Canonical text; parse_manifest(render_manifest(m)) is equivalent to m."""
    out = ["RING " + " ".join(man.variables) + (f" CHAR {man.characteristic}" if man.characteristic else "")]
    for kind, name in man.order:
        if kind == "IDEAL":
            out.append(f"IDEAL {name} = " + ", ".join(str(m) for m in man.ideals[name].monomials))
        elif kind == "COMPLEX":
            out.append(f"COMPLEX {name} = {man.complexes[name]}")
        else:
            md = man.modules[name]
            if md.expr is not None:
                out.append(f"MODULE {name} = {md.expr}")
                continue
            out.append(f"MODULE {name}")
            for g in md.gens:
                out.append("  GEN (" + ",".join(str(c) for c in g) + ")")
            for terms, degree, _ in md.rels:
                parts = []
                for t in terms:
                    s = f"{abs(t.scalar)}*" if abs(t.scalar) != 1 else ""
                    s += f"{t.monomial}*" if t.monomial.powers else ""
                    s += f"e{t.gen}"
                    parts.append(("- " if t.scalar < 0 else "+ ") + s)
                text = " ".join(parts)
                text = text[2:] if text.startswith("+ ") else "-" + text[2:]
                if degree is not None:
                    text += " @ (" + ",".join(str(c) for c in degree) + ")"
                out.append("  REL " + text)
            out.append("END")
    opts = []
    if "box" in man.options:
        opts.append("box=" + ",".join(f"{lo}..{hi}" for lo, hi in man.options["box"]))
    for key in ("stages", "plateau"):
        if key in man.options:
            opts.append(f"{key}={man.options[key]}")
    if opts:
        out.append("OPTIONS " + " ".join(opts))
    return "\n".join(out) + "\n"
