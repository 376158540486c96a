"""Multi-modal propositional language with compound accessibility programs,
and its translation into the relational fragment.

Modalities are indexed by *programs*: complement- and 1-free Boolean
terms over accessibility variables, interpreted as the union or
intersection of the component relations.  Propositions become right-ideal
relations ``(p ; 1)``, diamonds become compositions, boxes their duals;
the image of every well-formed formula lands inside the fragment the
prover decides.

Text grammar::

    formula := iff
    iff     := imp ('<->' imp)*
    imp     := disj ('->' imp)?
    disj    := conj ('|' conj)*
    conj    := unary ('&' unary)*
    unary   := '~' unary | '[' PROGRAM ']' unary | '<' PROGRAM '>' unary | atom
    atom    := IDENT | '(' formula ')'

``->`` and ``<->`` are desugared at parse time (``a -> b`` as ``~a | b``,
``a <-> b`` as ``(a -> b) & (b -> a)``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError
from ..terms import (Cmpl, Comp, ONE, RelTerm, Union as TUnion, Inter as TInter,
                     Var, is_plain_boolean, parse_term, render_term,
                     require_fragment, simplify_ones, term_variables)


@dataclass(frozen=True, slots=True)
class Prop:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Not:
    arg: "ModalFormula"

    def __repr__(self):
        return render_modal(self)


@dataclass(frozen=True, slots=True)
class And:
    left: "ModalFormula"
    right: "ModalFormula"

    def __repr__(self):
        return render_modal(self)


@dataclass(frozen=True, slots=True)
class Or:
    left: "ModalFormula"
    right: "ModalFormula"

    def __repr__(self):
        return render_modal(self)


@dataclass(frozen=True, slots=True)
class Box:
    program: RelTerm
    arg: "ModalFormula"

    def __repr__(self):
        return render_modal(self)


@dataclass(frozen=True, slots=True)
class Dia:
    program: RelTerm
    arg: "ModalFormula"

    def __repr__(self):
        return render_modal(self)


ModalFormula = Prop | Not | And | Or | Box | Dia

_IDENT_RE = re.compile(r"[a-z][a-z0-9_]*")


def render_modal(f):
    match f:
        case Prop(name):
            return name
        case Not(a):
            return "~" + render_modal(a)
        case And(l, r):
            return f"({render_modal(l)} & {render_modal(r)})"
        case Or(l, r):
            return f"({render_modal(l)} | {render_modal(r)})"
        case Box(prog, a):
            return f"[{render_term(prog)}]{render_modal(a)}"
        case Dia(prog, a):
            return f"<{render_term(prog)}>{render_modal(a)}"


def modal_depth(f):
    match f:
        case Prop():
            return 1
        case Not(a) | Box(_, a) | Dia(_, a):
            return 1 + modal_depth(a)
        case And(l, r) | Or(l, r):
            return 1 + max(modal_depth(l), modal_depth(r))


def propositions_of(f):
    """Proposition names occurring in ``f``, sorted."""
    out = set()

    def walk(g):
        match g:
            case Prop(name):
                out.add(name)
            case Not(a) | Box(_, a) | Dia(_, a):
                walk(a)
            case And(l, r) | Or(l, r):
                walk(l)
                walk(r)

    walk(f)
    return sorted(out)


def accessibility_of(f):
    """Accessibility variable names occurring in ``f``'s programs, sorted."""
    out = set()

    def walk(g):
        match g:
            case Prop():
                pass
            case Not(a):
                walk(a)
            case Box(prog, a) | Dia(prog, a):
                out.update(term_variables(prog))
                walk(a)
            case And(l, r) | Or(l, r):
                walk(l)
                walk(r)

    walk(f)
    return sorted(out)


def _byte_offset(text, pos):
    return len(text[:pos].encode("utf-8"))


class _ModalTokenizer:
    def __init__(self, text):
        self.tokens = []
        i, n = 0, len(text)
        while i < n:
            c = text[i]
            if c.isspace():
                i += 1
                continue
            off = _byte_offset(text, i)
            if text.startswith("<->", i):
                self.tokens.append(("<->", "<->", off))
                i += 3
            elif text.startswith("->", i):
                self.tokens.append(("->", "->", off))
                i += 2
            elif c in "~&|()":
                self.tokens.append((c, c, off))
                i += 1
            elif c == "[":
                i = self._program(text, i, "]", "box", off)
            elif c == "<":
                i = self._program(text, i, ">", "dia", off)
            else:
                m = _IDENT_RE.match(text, i)
                if not m:
                    raise ParseError(
                        f"unexpected character {text[i]!r}", off,
                        expected=("ident", "~", "(", "[", "<"),
                    )
                self.tokens.append(("ident", m.group(), off))
                i = m.end()
        self.tokens.append(("eof", "", _byte_offset(text, n)))
        self.pos = 0

    def _program(self, text, i, closer, kind, off):
        end = text.find(closer, i + 1)
        if end < 0:
            raise ParseError(f"missing {closer!r} for modality", off, expected=(closer,))
        body = text[i + 1:end]
        try:
            program = parse_term(body)
        except ParseError as exc:
            raise ParseError(
                f"bad program term: {exc.args[0]}",
                _byte_offset(text, i + 1) + exc.offset,
                expected=exc.expected,
            ) from None
        if not is_plain_boolean(program):
            raise ParseError(
                "modality programs must be complement- and 1-free Boolean terms",
                off,
                expected=("plain Boolean program",),
            )
        self.tokens.append((kind, program, off))
        return end + 1

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok


class _ModalParser:
    def __init__(self, tz):
        self.tz = tz

    def parse(self):
        f = self.iff()
        tok = self.tz.peek()
        if tok[0] != "eof":
            raise ParseError(f"trailing input {tok[1]!r}", tok[2],
                             expected=("&", "|", "->", "<->", "eof"))
        return f

    def iff(self):
        f = self.imp()
        while self.tz.peek()[0] == "<->":
            self.tz.next()
            g = self.imp()
            f = And(Or(Not(f), g), Or(Not(g), f))
        return f

    def imp(self):
        f = self.disj()
        if self.tz.peek()[0] == "->":
            self.tz.next()
            return Or(Not(f), self.imp())
        return f

    def disj(self):
        f = self.conj()
        while self.tz.peek()[0] == "|":
            self.tz.next()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.tz.peek()[0] == "&":
            self.tz.next()
            f = And(f, self.unary())
        return f

    def unary(self):
        tok = self.tz.peek()
        if tok[0] == "~":
            self.tz.next()
            return Not(self.unary())
        if tok[0] == "box":
            self.tz.next()
            return Box(tok[1], self.unary())
        if tok[0] == "dia":
            self.tz.next()
            return Dia(tok[1], self.unary())
        return self.atom()

    def atom(self):
        tok = self.tz.peek()
        if tok[0] == "ident":
            self.tz.next()
            return Prop(tok[1])
        if tok[0] == "(":
            self.tz.next()
            f = self.iff()
            closing = self.tz.peek()
            if closing[0] != ")":
                raise ParseError(
                    f"expected ')', found {closing[1]!r}" if closing[0] != "eof"
                    else "expected ')', found end of input",
                    closing[2], expected=(")",),
                )
            self.tz.next()
            return f
        raise ParseError(
            f"expected a formula, found {tok[1]!r}" if tok[0] != "eof"
            else "expected a formula, found end of input",
            tok[2], expected=("ident", "~", "(", "[", "<"),
        )


def parse_modal(text):
    """Parse modal input text; implication and biconditional are desugared."""
    return _ModalParser(_ModalTokenizer(text)).parse()


def translate_modal(f):
    """Relational image of ``f``: propositions as right-ideal relations,
    diamonds as compositions, boxes as their complemented duals.

    The result always lies in the prover's fragment; this is asserted.
    """
    term = simplify_ones(_translate(f))
    return require_fragment(term)


def _translate(f):
    match f:
        case Prop(name):
            return Comp(Var(name), ONE)
        case Not(a):
            return Cmpl(_translate(a))
        case And(l, r):
            return TInter(_translate(l), _translate(r))
        case Or(l, r):
            return TUnion(_translate(l), _translate(r))
        case Dia(prog, a):
            return Comp(prog, _translate(a))
        case Box(prog, a):
            return Cmpl(Comp(prog, Cmpl(_translate(a))))
