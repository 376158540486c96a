"""Relational terms: syntax tree, text grammar, and structural analyses.

Terms are immutable trees over relational variables and the universal
constant ``1``, built with complement ``-``, union ``|``, intersection
``&``, composition ``;`` and converse ``^``.  Structural equality is the
only term equality used anywhere in the package.

Grammar accepted by :func:`parse_term` (ASCII, with unicode aliases
``∪`` ``∩`` ``−`` ``⌣`` for ``|`` ``&`` ``-`` ``^``)::

    term  := disj
    disj  := conj ('|' conj)*
    conj  := comp ('&' comp)*
    comp  := unary (';' unary)*
    unary := '-' unary | atom '^'*
    atom  := '1' | IDENT | '(' term ')'

``-`` binds tighter than ``;``, which binds tighter than ``&``, which
binds tighter than ``|``; same-operator chains associate to the left.
Identifiers match ``[a-z][a-z0-9_]*``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from .errors import FragmentViolation, NotBoolean, ParseError

# Terms are compared and hashed constantly (branch histories, component
# sets, rule-application records), so every node caches its structural
# hash at construction and equality short-circuits on it.


class One:
    """The universal relation constant."""

    __slots__ = ("_hash",)
    __match_args__ = ()

    def __init__(self):
        self._hash = hash("One")

    def __eq__(self, other):
        return type(other) is One

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "1"


class Var:
    __slots__ = ("name", "_hash")
    __match_args__ = ("name",)

    def __init__(self, name):
        self.name = name
        self._hash = hash(("Var", name))

    def __eq__(self, other):
        return type(other) is Var and self.name == other.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return self.name


class _Unary:
    __slots__ = ("arg", "_hash")
    __match_args__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg
        self._hash = hash((type(self).__name__, arg._hash))

    def __eq__(self, other):
        return (self is other
                or (type(other) is type(self) and self._hash == other._hash
                    and self.arg == other.arg))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return render_term(self)


class _Binary:
    __slots__ = ("left", "right", "_hash")
    __match_args__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self._hash = hash((type(self).__name__, left._hash, right._hash))

    def __eq__(self, other):
        return (self is other
                or (type(other) is type(self) and self._hash == other._hash
                    and self.left == other.left and self.right == other.right))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return render_term(self)


class Cmpl(_Unary):
    __slots__ = ()


class Conv(_Unary):
    __slots__ = ()


class Union(_Binary):
    __slots__ = ()


class Inter(_Binary):
    __slots__ = ()


class Comp(_Binary):
    __slots__ = ()


RelTerm = One | Var | Cmpl | Union | Inter | Comp | Conv

ONE = One()
CMPL_ONE = Cmpl(ONE)

_IDENT_RE = re.compile(r"[a-z][a-z0-9_]*")

_ALIASES = {"∪": "|", "∩": "&", "−": "-", "⌣": "^"}


def _byte_offset(text, pos):
    return len(text[:pos].encode("utf-8"))


class _Tokenizer:
    """Token stream over the raw input; positions reported as byte offsets."""

    def __init__(self, text):
        self.text = text
        self.tokens = []  # (kind, value, byte_offset)
        i, n = 0, len(text)
        while i < n:
            c = text[i]
            if c.isspace():
                i += 1
                continue
            c = _ALIASES.get(c, c)
            if c in "|&;-^()":
                self.tokens.append((c, c, _byte_offset(text, i)))
                i += 1
            elif c == "1":
                self.tokens.append(("one", "1", _byte_offset(text, i)))
                i += 1
            else:
                m = _IDENT_RE.match(text, i)
                if not m:
                    raise ParseError(
                        f"unexpected character {text[i]!r}",
                        _byte_offset(text, i),
                        expected=("ident", "1", "(", "-"),
                    )
                self.tokens.append(("ident", m.group(), _byte_offset(text, i)))
                i = m.end()
        self.tokens.append(("eof", "", _byte_offset(text, n)))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, expected):
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(
                f"expected {kind!r}, found {tok[1]!r}" if tok[0] != "eof" else f"expected {kind!r}, found end of input",
                tok[2],
                expected=expected,
            )
        return self.next()


class _Parser:
    def __init__(self, tz):
        self.tz = tz

    def parse(self):
        t = self.disj()
        tok = self.tz.peek()
        if tok[0] != "eof":
            raise ParseError(
                f"trailing input {tok[1]!r}", tok[2], expected=("|", "&", ";", "^", "eof")
            )
        return t

    def disj(self):
        t = self.conj()
        while self.tz.peek()[0] == "|":
            self.tz.next()
            t = Union(t, self.conj())
        return t

    def conj(self):
        t = self.comp()
        while self.tz.peek()[0] == "&":
            self.tz.next()
            t = Inter(t, self.comp())
        return t

    def comp(self):
        t = self.unary()
        while self.tz.peek()[0] == ";":
            self.tz.next()
            t = Comp(t, self.unary())
        return t

    def unary(self):
        tok = self.tz.peek()
        if tok[0] == "-":
            self.tz.next()
            return Cmpl(self.unary())
        t = self.atom()
        while self.tz.peek()[0] == "^":
            self.tz.next()
            t = Conv(t)
        return t

    def atom(self):
        tok = self.tz.peek()
        if tok[0] == "one":
            self.tz.next()
            return ONE
        if tok[0] == "ident":
            self.tz.next()
            return Var(tok[1])
        if tok[0] == "(":
            self.tz.next()
            t = self.disj()
            self.tz.expect(")", expected=(")",))
            return t
        raise ParseError(
            f"expected a term, found {tok[1]!r}" if tok[0] != "eof" else "expected a term, found end of input",
            tok[2],
            expected=("ident", "1", "(", "-"),
        )


def parse_term(text):
    """Parse ``text`` into a :class:`RelTerm`.

    Raises :class:`ParseError` with the byte offset of the failure and the
    token kinds that would have been accepted there.
    """
    return _Parser(_Tokenizer(text)).parse()


def render_term(t):
    """Canonical fully-parenthesized text for ``t``; inverse of parse_term."""
    match t:
        case One():
            return "1"
        case Var(name):
            return name
        case Cmpl(arg):
            return "-" + _render_unary_arg(arg)
        case Union(l, r):
            return f"({render_term(l)} | {render_term(r)})"
        case Inter(l, r):
            return f"({render_term(l)} & {render_term(r)})"
        case Comp(l, r):
            return f"({render_term(l)} ; {render_term(r)})"
        case Conv(arg):
            return _render_conv_arg(arg) + "^"
    raise TypeError(f"not a relational term: {t!r}")


def _render_unary_arg(t):
    # Cmpl/Conv children need explicit parens: "-(-1)", "-(r^)".
    if isinstance(t, (Cmpl, Conv)):
        return f"({render_term(t)})"
    return render_term(t)


def _render_conv_arg(t):
    if isinstance(t, Cmpl):
        return f"({render_term(t)})"
    return render_term(t)


def term_size(t):
    """Number of nodes in the syntax tree."""
    match t:
        case One() | Var():
            return 1
        case Cmpl(a) | Conv(a):
            return 1 + term_size(a)
        case Union(l, r) | Inter(l, r) | Comp(l, r):
            return 1 + term_size(l) + term_size(r)


def term_depth(t):
    """Number of nodes on the longest root-to-leaf path (atoms have depth 1)."""
    match t:
        case One() | Var():
            return 1
        case Cmpl(a) | Conv(a):
            return 1 + term_depth(a)
        case Union(l, r) | Inter(l, r) | Comp(l, r):
            return 1 + max(term_depth(l), term_depth(r))


def term_variables(t):
    """Names of the relational variables occurring in ``t``, sorted."""
    out = set()

    def walk(u):
        match u:
            case Var(name):
                out.add(name)
            case Cmpl(a) | Conv(a):
                walk(a)
            case Union(l, r) | Inter(l, r) | Comp(l, r):
                walk(l)
                walk(r)

    walk(t)
    return sorted(out)


def simplify_ones(t):
    """Eliminate redundant occurrences of the constant ``1`` from ``t``.

    Applies, inside-out and to fixpoint, the identities

        (1|P) = (P|1) = 1       (-1|P) = (P|-1) = P
        (1&P) = (P&1) = P       (-1&P) = (P&-1) = -1
        -(-1) = 1

    The result is semantically equivalent to ``t`` and every Boolean
    subterm of it is 1, -1, or free of 1.  Linear in the size of ``t``.
    """
    match t:
        case One() | Var():
            return t
        case Cmpl(a):
            a2 = simplify_ones(a)
            if a2 == CMPL_ONE:
                return ONE
            return Cmpl(a2)
        case Union(l, r):
            l2, r2 = simplify_ones(l), simplify_ones(r)
            if l2 == ONE or r2 == ONE:
                return ONE
            if l2 == CMPL_ONE:
                return r2
            if r2 == CMPL_ONE:
                return l2
            return Union(l2, r2)
        case Inter(l, r):
            l2, r2 = simplify_ones(l), simplify_ones(r)
            if l2 == CMPL_ONE or r2 == CMPL_ONE:
                return CMPL_ONE
            if l2 == ONE:
                return r2
            if r2 == ONE:
                return l2
            return Inter(l2, r2)
        case Comp(l, r):
            return Comp(simplify_ones(l), simplify_ones(r))
        case Conv(a):
            return Conv(simplify_ones(a))


def is_boolean(t):
    """True iff ``t`` uses only complement, union and intersection."""
    match t:
        case One() | Var():
            return True
        case Cmpl(a):
            return is_boolean(a)
        case Union(l, r) | Inter(l, r):
            return is_boolean(l) and is_boolean(r)
        case _:
            return False


@lru_cache(maxsize=65536)
def nf_cmpl(t):
    """Complement normal form of a Boolean term.

    Pushes complements inward through the De Morgan laws and cancels
    double complements, so that every complement in the result wraps a
    variable or the constant.  Semantically equivalent to ``t``.
    Raises :class:`NotBoolean` if ``t`` contains composition or converse.
    """
    match t:
        case One() | Var():
            return t
        case Union(l, r):
            return Union(nf_cmpl(l), nf_cmpl(r))
        case Inter(l, r):
            return Inter(nf_cmpl(l), nf_cmpl(r))
        case Cmpl(a):
            match a:
                case One() | Var():
                    return t
                case Cmpl(b):
                    return nf_cmpl(b)
                case Inter(l, r):
                    return Union(nf_cmpl(Cmpl(l)), nf_cmpl(Cmpl(r)))
                case Union(l, r):
                    return Inter(nf_cmpl(Cmpl(l)), nf_cmpl(Cmpl(r)))
                case _:
                    raise NotBoolean(f"term contains a non-Boolean operator: {render_term(a)}")
        case _:
            raise NotBoolean(f"term contains a non-Boolean operator: {render_term(t)}")


@lru_cache(maxsize=65536)
def is_cnf(t):
    """True iff every complement in ``t`` acts on a variable or constant."""
    match t:
        case One() | Var():
            return True
        case Cmpl(One()) | Cmpl(Var()):
            return True
        case Cmpl(_):
            return False
        case Union(l, r) | Inter(l, r) | Comp(l, r):
            return is_cnf(l) and is_cnf(r)
        case Conv(a):
            return is_cnf(a)


def components(t):
    """The set of components of ``t``: every term a decomposition of ``t``
    can mention.  Always finite and contains ``t`` itself."""
    out = set()

    def walk(u):
        if u in out:
            return
        out.add(u)
        match u:
            case One() | Var() | Cmpl(One()) | Cmpl(Var()):
                pass
            case Cmpl(Cmpl(b)):
                walk(b)
            case Cmpl(Conv(b)):
                walk(Cmpl(b))
            case Cmpl(Union(l, r)) | Cmpl(Inter(l, r)) | Cmpl(Comp(l, r)):
                walk(Cmpl(l))
                walk(Cmpl(r))
            case Conv(b):
                walk(b)
            case Union(l, r) | Inter(l, r) | Comp(l, r):
                walk(l)
                walk(r)

    walk(t)
    return out


@dataclass(frozen=True, slots=True)
class TermClass:
    """Structural flags computed in one traversal."""

    is_plain_boolean: bool  # union/intersection of variables only
    is_cnf: bool
    is_fragment_s: bool  # usable as the right operand of a composition
    contains_one: bool
    contains_conv: bool


@lru_cache(maxsize=65536)
def classify(t):
    match t:
        case One():
            return TermClass(False, True, True, True, False)
        case Var():
            return TermClass(True, True, True, False, False)
        case Cmpl(a):
            ca = classify(a)
            cnf = isinstance(a, (One, Var))
            return TermClass(False, cnf and ca.is_cnf, ca.is_fragment_s and not isinstance(a, One),
                             ca.contains_one, ca.contains_conv)
        case Union(l, r) | Inter(l, r):
            cl, cr = classify(l), classify(r)
            return TermClass(
                cl.is_plain_boolean and cr.is_plain_boolean,
                cl.is_cnf and cr.is_cnf,
                cl.is_fragment_s and cr.is_fragment_s
                and not isinstance(l, One) and not isinstance(r, One),
                cl.contains_one or cr.contains_one,
                cl.contains_conv or cr.contains_conv,
            )
        case Comp(l, r):
            cl, cr = classify(l), classify(r)
            s_ok = cl.is_plain_boolean and (
                isinstance(r, One) or (cr.is_fragment_s and not isinstance(r, One))
            )
            return TermClass(False, cl.is_cnf and cr.is_cnf, s_ok,
                             cl.contains_one or cr.contains_one,
                             cl.contains_conv or cr.contains_conv)
        case Conv(a):
            ca = classify(a)
            return TermClass(False, ca.is_cnf, False, ca.contains_one, True)


def is_plain_boolean(t):
    """True iff ``t`` is built from variables with union/intersection only."""
    return classify(t).is_plain_boolean


@dataclass(frozen=True, slots=True)
class FragmentVerdict:
    accepted: bool
    offender: RelTerm | None = None
    clause: str | None = None

    def __bool__(self):
        return self.accepted


_ACCEPT = FragmentVerdict(True)


def fragment_check(t):
    """Decide membership of ``t`` in the decidable fragment.

    The fragment is closed under complement, union and intersection, and
    admits a composition ``(L ; S)`` only when ``L`` is the constant 1 or
    a complement- and 1-free Boolean term, and ``S`` is either 1 or a term
    in which 1 occurs only as the right operand of such compositions.
    Converse is never allowed.  ``t`` is expected to have been passed
    through :func:`simplify_ones` first.

    Returns a :class:`FragmentVerdict`; rejections carry the offending
    subterm and the violated clause.
    """
    match t:
        case One() | Var():
            return _ACCEPT
        case Conv():
            return FragmentVerdict(False, t, "converse is not allowed in the fragment")
        case Cmpl(a):
            return fragment_check(a)
        case Union(l, r) | Inter(l, r):
            v = fragment_check(l)
            return v if not v else fragment_check(r)
        case Comp(l, r):
            if not (isinstance(l, One) or is_plain_boolean(l)):
                return FragmentVerdict(
                    False, l,
                    "left operand of ';' must be 1 or a complement- and 1-free Boolean term",
                )
            if isinstance(r, One):
                return _ACCEPT
            return _check_comp_right(r)
    raise TypeError(f"not a relational term: {t!r}")


def _check_comp_right(t):
    # Inside a composition's right operand, 1 may occur only as the right
    # operand of a composition whose left operand is plain Boolean.
    match t:
        case One():
            return FragmentVerdict(
                False, t,
                "inside a composition's right operand, 1 may occur only as "
                "the right operand of a composition with a Boolean left operand",
            )
        case Var():
            return _ACCEPT
        case Conv():
            return FragmentVerdict(False, t, "converse is not allowed in the fragment")
        case Cmpl(a):
            return _check_comp_right(a)
        case Union(l, r) | Inter(l, r):
            v = _check_comp_right(l)
            return v if not v else _check_comp_right(r)
        case Comp(l, r):
            if not is_plain_boolean(l):
                return FragmentVerdict(
                    False, l,
                    "inside a composition's right operand, every composition "
                    "must have a complement- and 1-free Boolean left operand",
                )
            if isinstance(r, One):
                return _ACCEPT
            return _check_comp_right(r)


def require_fragment(t):
    """Raise :class:`FragmentViolation` unless ``t`` passes fragment_check."""
    verdict = fragment_check(t)
    if not verdict:
        raise FragmentViolation(
            f"{verdict.clause}: {render_term(verdict.offender)}", verdict.offender
        )
    return t
