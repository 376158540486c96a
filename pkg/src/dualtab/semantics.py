"""Finite models of the relational language, formula evaluation, and a
brute-force countermodel search used as an independent oracle.

A model is a finite universe plus an interpretation of relational
variables as sets of ordered pairs; the constant ``1`` always denotes the
full pair set and is never stored.  The oracle enumerates every
interpretation over universes of increasing size in a fixed order, so its
output is reproducible; internally it packs the interpretation space into
bit vectors so that exhausting three-element universes over three
variables stays cheap.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, UnboundVariable, UnknownVariableWarning
from .terms import (Cmpl, Comp, Conv, Inter, One, RelTerm, Union, Var,
                    render_term, term_variables)

_ELEMENT_NAMES = "abcdefgh"


@dataclass
class Model:
    universe: tuple[str, ...]
    interp: dict[str, set[tuple[str, str]]] = field(default_factory=dict)

    def __post_init__(self):
        self.universe = tuple(self.universe)
        self.interp = {name: {tuple(p) for p in pairs} for name, pairs in self.interp.items()}

    def all_pairs(self):
        return {(a, b) for a in self.universe for b in self.universe}

    def __eq__(self, other):
        return (
            isinstance(other, Model)
            and self.universe == other.universe
            and self.interp == other.interp
        )


Valuation = dict


def eval_term(model, t):
    """The set of pairs denoted by ``t`` in ``model``.

    Uninterpreted variables denote the empty relation; a warning is
    emitted so oracle cross-checks over mismatched vocabularies stay
    visible.
    """
    match t:
        case One():
            return model.all_pairs()
        case Var(name):
            if name not in model.interp:
                warnings.warn(
                    f"variable {name!r} has no interpretation; treating as empty",
                    UnknownVariableWarning,
                    stacklevel=2,
                )
                return set()
            return set(model.interp[name])
        case Cmpl(a):
            return model.all_pairs() - eval_term(model, a)
        case Union(l, r):
            return eval_term(model, l) | eval_term(model, r)
        case Inter(l, r):
            return eval_term(model, l) & eval_term(model, r)
        case Comp(l, r):
            lv, rv = eval_term(model, l), eval_term(model, r)
            by_mid = {}
            for c, b in rv:
                by_mid.setdefault(c, set()).add(b)
            return {(a, b) for a, c in lv for b in by_mid.get(c, ())}
        case Conv(a):
            return {(b, a2) for a2, b in eval_term(model, a)}


def satisfies(model, valuation, f):
    """Whether ``model`` under ``valuation`` satisfies the formula ``f``."""
    try:
        pair = (valuation[f.left], valuation[f.right])
    except KeyError as exc:
        raise UnboundVariable(f"valuation does not bind {exc.args[0]!r}") from None
    return pair in eval_term(model, f.term)


def falsifies_branch(model, valuation, branch):
    """Whether ``model``/``valuation`` falsify every formula ever on the branch.

    ``branch`` may be an engine branch (its full history is used) or any
    iterable of formulas.
    """
    formulas = getattr(branch, "history", branch)
    return all(not satisfies(model, valuation, f) for f in formulas)


# ---------------------------------------------------------------------------
# Model exchange format


def model_to_json(model, valuation):
    """Exchange form: universe as a name list, relations as sorted pair
    lists, valuation as a variable-to-element map."""
    index = {u: i for i, u in enumerate(model.universe)}
    return {
        "universe": list(model.universe),
        "relations": {
            name: [[a, b] for a, b in sorted(pairs, key=lambda p: (index[p[0]], index[p[1]]))]
            for name, pairs in sorted(model.interp.items())
        },
        "valuation": {v: valuation[v] for v in sorted(valuation)},
    }


def model_from_json(data):
    universe = tuple(data["universe"])
    elems = set(universe)
    interp = {}
    for name, pairs in data["relations"].items():
        rel = set()
        for pair in pairs:
            a, b = pair
            if a not in elems or b not in elems:
                raise ValueError(f"pair {pair!r} of relation {name!r} leaves the universe")
            rel.add((a, b))
        interp[name] = rel
    valuation = dict(data["valuation"])
    for var, elem in valuation.items():
        if elem not in elems:
            raise ValueError(f"valuation maps {var!r} outside the universe")
    return Model(universe, interp), valuation


# ---------------------------------------------------------------------------
# Brute-force countermodel oracle

_WORD_BITS = 64
_ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)
_INNER_BITS_MAX = 22  # packed axis capped at 2^22 combinations


def brute_force_countermodel(term, max_universe, *, budget_bits=28):
    """First model and valuation falsifying ``x term y``, or None.

    Enumerates universes of size 1..max_universe; for each size, every
    interpretation of the term's variables in lexicographic bitmask order
    (variables sorted by name, pairs ordered row-major); for each
    interpretation, valuations of the two endpoints in lexicographic
    order.  Returns the first falsifier in that order, re-checked through
    :func:`satisfies` before being returned.

    Refuses (``BudgetExceeded``) when ``variables * size**2`` exceeds
    ``budget_bits`` for a size that the search actually reaches.
    """
    names = term_variables(term)
    for n in range(1, max_universe + 1):
        if len(names) * n * n > budget_bits:
            raise BudgetExceeded(
                f"{len(names)} variables over a universe of {n} exceed the "
                f"oracle budget of {budget_bits} bits"
            )
        hit = _search_universe(term, names, n)
        if hit is not None:
            model, valuation = hit
            if satisfies(model, valuation, _query(term)):
                raise AssertionError("oracle witness failed its own re-check")
            return model, valuation
    return None


def _query(term):
    from .formulas import RelFormula

    return RelFormula("x", term, "y")


def _search_universe(term, names, n):
    universe = tuple(_ELEMENT_NAMES[:n])
    q = n * n
    k = len(names)

    n_inner = 0
    while n_inner < k and q * (n_inner + 1) <= _INNER_BITS_MAX:
        n_inner += 1
    outer_names = names[: k - n_inner]
    inner_names = names[k - n_inner:]

    combos = 1 << (q * n_inner)
    nwords = max(1, combos // _WORD_BITS)
    tail_mask = _ALL_ONES if combos >= _WORD_BITS else np.uint64((1 << combos) - 1)

    inner_rows = {
        name: np.stack([_bit_pattern(q * (n_inner - 1 - i) + p, nwords) for p in range(q)])
        for i, name in enumerate(inner_names)
    }
    ones = np.full((q, nwords), _ALL_ONES, dtype=np.uint64)
    zeros = np.zeros((q, nwords), dtype=np.uint64)

    for outer_masks in itertools.product(range(1 << q), repeat=len(outer_names)):
        outer = dict(zip(outer_names, outer_masks))
        rows = _eval_rows(term, inner_rows, outer, q, ones, zeros)
        falsity = np.bitwise_not(rows)
        falsity[:, -1] &= tail_mask
        merged = np.bitwise_or.reduce(falsity, axis=0)
        nz = np.nonzero(merged)[0]
        if nz.size == 0:
            continue
        w = int(nz[0])
        word = int(merged[w])
        bit = (word & -word).bit_length() - 1
        combo = w * _WORD_BITS + bit
        pair_idx = min(
            p for p in range(q) if (int(falsity[p, w]) >> bit) & 1
        )
        interp = dict(outer)
        for i, name in enumerate(inner_names):
            interp[name] = (combo >> (q * (n_inner - 1 - i))) & ((1 << q) - 1)
        model = Model(
            universe,
            {
                name: {
                    (universe[p // n], universe[p % n])
                    for p in range(q)
                    if (mask >> p) & 1
                }
                for name, mask in interp.items()
            },
        )
        valuation = {"x": universe[pair_idx // n], "y": universe[pair_idx % n]}
        return model, valuation
    return None


def _bit_pattern(j, nwords):
    """Packed table of 'bit j of the combination index is set'."""
    if j < 6:
        word = np.uint64(sum(1 << b for b in range(_WORD_BITS) if (b >> j) & 1))
        return np.full(nwords, word, dtype=np.uint64)
    block = (np.arange(nwords, dtype=np.uint64) >> np.uint64(j - 6)) & np.uint64(1)
    return np.where(block.astype(bool), _ALL_ONES, np.uint64(0))


def _eval_rows(t, inner_rows, outer, q, ones, zeros):
    match t:
        case One():
            return ones
        case Var(name):
            if name in inner_rows:
                return inner_rows[name]
            mask = outer[name]
            return np.stack([ones[0] if (mask >> p) & 1 else zeros[0] for p in range(q)])
        case Cmpl(a):
            return np.bitwise_not(_eval_rows(a, inner_rows, outer, q, ones, zeros))
        case Union(l, r):
            return _eval_rows(l, inner_rows, outer, q, ones, zeros) | _eval_rows(
                r, inner_rows, outer, q, ones, zeros
            )
        case Inter(l, r):
            return _eval_rows(l, inner_rows, outer, q, ones, zeros) & _eval_rows(
                r, inner_rows, outer, q, ones, zeros
            )
        case Comp(l, r):
            lv = _eval_rows(l, inner_rows, outer, q, ones, zeros)
            rv = _eval_rows(r, inner_rows, outer, q, ones, zeros)
            n = int(round(q ** 0.5))
            out = zeros.copy()
            for i in range(n):
                for j in range(n):
                    acc = out[i * n + j]
                    for c in range(n):
                        acc = acc | (lv[i * n + c] & rv[c * n + j])
                    out[i * n + j] = acc
            return out
        case Conv(a):
            av = _eval_rows(a, inner_rows, outer, q, ones, zeros)
            n = int(round(q ** 0.5))
            idx = [j * n + i for i in range(n) for j in range(n)]
            return av[idx]
    raise TypeError(f"not a relational term: {t!r}")
