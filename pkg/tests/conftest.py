import itertools
import random

import pytest
from hypothesis import strategies as st

from dualtab.terms import (Cmpl, Comp, Conv, Inter, ONE, Union, Var,
                           fragment_check, simplify_ones, term_depth)
from dualtab.semantics import Model

CORPUS_SEED = 20240809
CORPUS_VARS = ("r", "s", "t")
CORPUS_SIZE = 500
CORPUS_DEPTH = 5


def gen_plain_boolean(rng, depth):
    if depth <= 1 or rng.random() < 0.35:
        return Var(rng.choice(CORPUS_VARS))
    op = Union if rng.random() < 0.5 else Inter
    return op(gen_plain_boolean(rng, depth - 1), gen_plain_boolean(rng, depth - 1))


def gen_comp_right(rng, depth):
    if rng.random() < 0.25:
        return ONE
    return gen_h(rng, depth)


def gen_h(rng, depth):
    if depth <= 1:
        return Var(rng.choice(CORPUS_VARS))
    roll = rng.random()
    if roll < 0.30:
        return Cmpl(gen_h(rng, depth - 1))
    if roll < 0.50:
        op = Union if rng.random() < 0.5 else Inter
        return op(gen_h(rng, depth - 1), gen_h(rng, depth - 1))
    right = ONE if rng.random() < 0.45 else gen_h(rng, depth - 1)
    return Comp(gen_plain_boolean(rng, depth - 1), right)


def gen_fragment_term(rng, depth):
    if depth <= 1:
        return ONE if rng.random() < 0.05 else Var(rng.choice(CORPUS_VARS))
    roll = rng.random()
    if roll < 0.22:
        return Cmpl(gen_fragment_term(rng, depth - 1))
    if roll < 0.40:
        return Union(gen_fragment_term(rng, depth - 1), gen_fragment_term(rng, depth - 1))
    if roll < 0.55:
        return Inter(gen_fragment_term(rng, depth - 1), gen_fragment_term(rng, depth - 1))
    left = ONE if rng.random() < 0.5 else gen_plain_boolean(rng, depth - 1)
    return Comp(left, gen_comp_right(rng, depth - 1))


def build_corpus(seed=CORPUS_SEED, size=CORPUS_SIZE, depth=CORPUS_DEPTH):
    rng = random.Random(seed)
    seen = {}
    while len(seen) < size:
        term = simplify_ones(gen_fragment_term(rng, depth))
        assert fragment_check(term), "generator left the fragment"
        assert term_depth(term) <= depth
        seen.setdefault(term, None)
    return list(seen)


@pytest.fixture(scope="session")
def fragment_corpus():
    return build_corpus()


def all_models(names, size, universe=("a", "b", "c", "d")):
    """Every model over the given variables and universe prefix; small sizes only."""
    elems = universe[:size]
    pairs = [(a, b) for a in elems for b in elems]
    for combo in itertools.product(range(1 << len(pairs)), repeat=len(names)):
        yield Model(
            elems,
            {
                name: {pairs[i] for i in range(len(pairs)) if (mask >> i) & 1}
                for name, mask in zip(names, combo)
            },
        )


def term_strategy(variables=("p", "q", "r", "s"), with_comp=True, with_conv=True,
                  max_leaves=8):
    base = st.sampled_from([ONE] + [Var(v) for v in variables])

    def extend(children):
        options = [
            st.builds(Cmpl, children),
            st.builds(Union, children, children),
            st.builds(Inter, children, children),
        ]
        if with_comp:
            options.append(st.builds(Comp, children, children))
        if with_conv:
            options.append(st.builds(Conv, children))
        return st.one_of(*options)

    return st.recursive(base, extend, max_leaves=max_leaves)


def boolean_term_strategy(variables=("p", "q"), max_leaves=8):
    return term_strategy(variables, with_comp=False, with_conv=False,
                         max_leaves=max_leaves)


def fragment_term_strategy(depth=4):
    return st.integers(0, 2 ** 30).map(
        lambda seed: simplify_ones(gen_fragment_term(random.Random(seed), depth))
    )


@st.composite
def model_strategy(draw, names, max_size=3):
    size = draw(st.integers(1, max_size))
    elems = ("a", "b", "c")[:size]
    pairs = [(a, b) for a in elems for b in elems]
    interp = {}
    for name in names:
        mask = draw(st.integers(0, (1 << len(pairs)) - 1))
        interp[name] = {pairs[i] for i in range(len(pairs)) if (mask >> i) & 1}
    return Model(elems, interp)
