"""Reduction of relational entailment to a single validity question.

Premises and conclusion are relational terms, each read as the assertion
that it denotes the full relation.  The premises jointly entail the
conclusion exactly when

    (1 ; (-(R1 & ... & Rn) ; 1)) | R

is valid, so one prover call settles the entailment.  The fragment only
admits the encoded term when the complement normal form of the negated
premise intersection is a complement- and 1-free Boolean term, which is
the case for premises expressing inclusions such as ``r <= -(s1 | s2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import EmptyPremises, FragmentViolation, NotBoolean
from ..terms import (Cmpl, Comp, Inter, ONE, RelTerm, Union, is_plain_boolean,
                     nf_cmpl, render_term, require_fragment, simplify_ones)


@dataclass(frozen=True)
class EntailmentProblem:
    premises: tuple[RelTerm, ...]
    conclusion: RelTerm

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))


def encode_entailment(problem):
    """The fragment term whose validity decides the entailment.

    Raises :class:`EmptyPremises` without premises and
    :class:`FragmentViolation` when the encoding leaves the fragment
    (offending subterm attached).
    """
    if not problem.premises:
        raise EmptyPremises("entailment needs at least one premise")
    meet = problem.premises[-1]
    for p in reversed(problem.premises[:-1]):
        meet = Inter(p, meet)
    try:
        negated = nf_cmpl(Cmpl(meet))
    except NotBoolean:
        raise FragmentViolation(
            "premises must be Boolean terms: " + render_term(meet), meet
        ) from None
    if not is_plain_boolean(negated):
        raise FragmentViolation(
            "the negated premise intersection must normalize to a complement- "
            "and 1-free Boolean term, got " + render_term(negated),
            negated,
        )
    encoded = simplify_ones(Union(Comp(ONE, Comp(negated, ONE)), problem.conclusion))
    return require_fragment(encoded)
