"""Formulas ``x R y`` over object variables, and the literal-closure
machinery that gates composition decomposition in the engine.

A formula is *forced* by a set ``N`` of literals when it can be assembled
from literals of ``N`` using only unions (both sides forced) and
intersections (one side forced, the other in complement normal form).
``v_set`` collects the object variables a term can reach that way; the
engine consults it before instantiating a composition.
"""

from __future__ import annotations

from .errors import NotBoolean
from .terms import (Cmpl, Inter, One, Union, Var, is_boolean, is_cnf,
                    nf_cmpl, render_term)

ObjVar = str


class RelFormula:
    __slots__ = ("left", "term", "right", "_hash")
    __match_args__ = ("left", "term", "right")

    def __init__(self, left, term, right):
        self.left = left
        self.term = term
        self.right = right
        self._hash = hash((left, term, right))

    def __eq__(self, other):
        return (self is other
                or (type(other) is RelFormula and self._hash == other._hash
                    and self.left == other.left and self.right == other.right
                    and self.term == other.term))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"{self.left} {render_term(self.term)} {self.right}"


class FormulaSet:
    """Set of formulas with insertion-order iteration and O(1) membership."""

    __slots__ = ("_items",)

    def __init__(self, items=()):
        self._items = dict.fromkeys(items)

    def add(self, f):
        """Insert ``f``; returns True iff it was not already present."""
        if f in self._items:
            return False
        self._items[f] = None
        return True

    def update(self, items):
        for f in items:
            self.add(f)

    def __contains__(self, f):
        return f in self._items

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def copy(self):
        fs = FormulaSet()
        fs._items = dict(self._items)
        return fs

    def __repr__(self):
        return "{" + ", ".join(map(repr, self._items)) + "}"


def is_literal(f):
    """True iff the formula's term is 1, -1, a variable, or a negated variable."""
    match f.term:
        case One() | Var() | Cmpl(One()) | Cmpl(Var()):
            return True
        case _:
            return False


def is_nbool(f, n):
    """Whether ``f`` is directly forced by the literals of ``n``.

    Holds when ``f`` is a literal of ``n``; when its term is an
    intersection with one side forced and the other in complement normal
    form; or when its term is a union with both sides forced.  All
    subformulas keep the endpoints of ``f``.  Requires a Boolean term.
    """
    if not is_boolean(f.term):
        raise NotBoolean(f"not a Boolean term: {render_term(f.term)}")
    return _is_nbool(f.left, f.term, f.right, n)


def _is_nbool(x, t, y, n):
    match t:
        case One() | Var() | Cmpl(One()) | Cmpl(Var()):
            return RelFormula(x, t, y) in n
        case Inter(l, r):
            return (_is_nbool(x, l, y, n) and is_cnf(r)) or (
                _is_nbool(x, r, y, n) and is_cnf(l)
            )
        case Union(l, r):
            return _is_nbool(x, l, y, n) and _is_nbool(x, r, y, n)
        case _:
            return False


def has_nbool_construction(f, n):
    """Whether the complement normal form of ``f`` is forced by ``n``."""
    return _is_nbool(f.left, nf_cmpl(f.term), f.right, n)


def variables_of(n):
    """Object variables occurring in ``n``, in order of first occurrence."""
    seen = dict()
    for f in n:
        seen.setdefault(f.left, None)
        seen.setdefault(f.right, None)
    return list(seen)


def v_set(term, x, n):
    """The object variables ``z`` of ``n`` for which ``x term z`` is forced.

    Only variables textually present in ``n`` can carry a construction, so
    the search is restricted to them.  Requires ``term`` Boolean.
    """
    nf = nf_cmpl(term)
    return {z for z in variables_of(n) if _is_nbool(x, nf, z, n)}


def parse_formula(text, default_left="x", default_right="y"):
    """Parse ``"IDENT TERM IDENT"`` or a bare term.

    A bare term gets the distinguished endpoints; validity of ``x R y``
    does not depend on how the endpoints are named.
    """
    from .errors import ParseError
    from .terms import _Parser, _Tokenizer, parse_term

    try:
        return RelFormula(default_left, parse_term(text), default_right)
    except ParseError as bare_error:
        try:
            tz = _Tokenizer(text)
            left = tz.expect("ident", expected=("ident",))[1]
            term = _Parser(tz).disj()
            right = tz.expect("ident", expected=("ident",))[1]
            tz.expect("eof", expected=("eof",))
            return RelFormula(left, term, right)
        except ParseError as triple_error:
            raise (triple_error if triple_error.offset > bare_error.offset
                   else bare_error) from None
