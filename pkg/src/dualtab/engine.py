"""Dual-tableau decision procedure with blocking.

Given a fragment term ``P``, the engine builds a deduction tree for the
formula ``x P y``.  Nodes carry disjunctive formula sets; a node is closed
when it contains ``x' 1 y'`` or a formula together with its complement.
Branches are explored depth first, left successor first.  On each open
branch the engine repeatedly picks the smallest variable (in the branch
order) that still has work and applies, in order: the Boolean rules, the
complemented-composition rules, the composition rule gated by forced
literals, and the universal-composition rule instantiated with that
variable.  Complemented compositions are suppressed when an already
decomposed twin *blocks* them; the literals their decomposition would
have produced are recorded instead and feed the countermodel.

If every branch closes the tree is a proof.  Otherwise the first
saturated open branch yields a finite model and identity valuation that
falsify every formula ever on the branch, the input included.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import (BranchNotSaturated, EngineInvariantError, NotApplicable,
                     ResourceExhausted)
from .formulas import (FormulaSet, RelFormula, has_nbool_construction,
                       is_literal, v_set)
from .semantics import Model
from .terms import (Cmpl, Comp, Conv, Inter, One, Union, Var, components,
                    is_boolean, render_term, require_fragment, simplify_ones,
                    term_variables)

RULE_UNION = "union"
RULE_CMPL_UNION = "cmpl-union"
RULE_INTER = "inter"
RULE_CMPL_INTER = "cmpl-inter"
RULE_DOUBLE_CMPL = "double-cmpl"
RULE_CMPL_COMP = "cmpl-comp"  # x'-(B;S)y, S != 1: fresh z, both parts
RULE_CMPL_COMP_ONE = "cmpl-comp-one"  # x'-(B;1)y: fresh z, left part only
RULE_CMPL_COMP_UNIV = "cmpl-comp-univ"  # x-(1;S)y: fresh z, right part only
RULE_COMP_BOOL = "comp-bool"  # x'(B;S)y with z gated by forced literals
RULE_COMP_UNIV = "comp-univ"  # x(1;S)y with any branch variable

_BOOLEAN_RULES = (RULE_UNION, RULE_CMPL_UNION, RULE_INTER, RULE_CMPL_INTER,
                  RULE_DOUBLE_CMPL)
_COMP_RULES = (RULE_COMP_BOOL, RULE_COMP_UNIV)

GenRecord = namedtuple("GenRecord", "premise parent rule")


@lru_cache(maxsize=None)
def weight(t):
    """Recursive weight of a term; literals and constants weigh nothing."""
    match t:
        case One() | Var() | Cmpl(One()) | Cmpl(Var()):
            return 0
        case Union(l, r) | Inter(l, r) | Comp(l, r):
            return weight(l) + weight(r) + 1
        case Cmpl(Union(l, r)) | Cmpl(Inter(l, r)) | Cmpl(Comp(l, r)):
            return weight(Cmpl(l)) + weight(Cmpl(r)) + 1
        case Cmpl(Cmpl(a)):
            return weight(a) + 1
        case Conv(a) | Cmpl(Conv(a)):
            return weight(a) + 1


def boolean_rule(t):
    """Which Boolean decomposition applies to a term, or None."""
    match t:
        case Union(_, _):
            return RULE_UNION
        case Inter(_, _):
            return RULE_INTER
        case Cmpl(Cmpl(_)):
            return RULE_DOUBLE_CMPL
        case Cmpl(Union(_, _)):
            return RULE_CMPL_UNION
        case Cmpl(Inter(_, _)):
            return RULE_CMPL_INTER
        case _:
            return None


def comp_rule(t):
    """RULE_COMP_UNIV for (1;S) terms, RULE_COMP_BOOL for (B;S), else None."""
    match t:
        case Comp(One(), _):
            return RULE_COMP_UNIV
        case Comp(_, _):
            return RULE_COMP_BOOL
        case _:
            return None


def negcomp_rule(t):
    """Which complemented-composition rule fits a term.

    Returns one of the three rule tags, the string ``"inert"`` for
    ``-(1;1)`` (never decomposed), or None.
    """
    match t:
        case Cmpl(Comp(One(), One())):
            return "inert"
        case Cmpl(Comp(One(), _)):
            return RULE_CMPL_COMP_UNIV
        case Cmpl(Comp(_, One())):
            return RULE_CMPL_COMP_ONE
        case Cmpl(Comp(_, _)):
            return RULE_CMPL_COMP
        case _:
            return None


def is_axiomatic(node):
    """Whether a formula set contains ``x' 1 y'`` or a complementary pair."""
    formulas = getattr(node, "formulas", node)
    for f in formulas:
        if isinstance(f.term, One):
            return True
        if isinstance(f.term, Cmpl) and RelFormula(f.left, f.term.arg, f.right) in formulas:
            return True
    return False


class Branch:
    """State of one branch: current leaf set plus everything the rules consult.

    ``history`` is the union of all formula sets ever on the branch;
    ``vars`` lists object variables in introduction order; ``genealogy``
    records, for each generated variable, the premise that introduced it;
    ``lit_negcomp`` collects the renamed literals of blocked formulas;
    ``applied`` enforces the at-most-once-per-premise discipline.
    """

    __slots__ = ("node", "history", "vars", "genealogy", "lit_negcomp",
                 "applied", "decomposed_with", "dec_total", "_fresh",
                 "_forced_cache", "_blocked_cache", "node_axiomatic")

    def __init__(self, node, history, vars, genealogy, lit_negcomp, applied,
                 decomposed_with, dec_total, fresh):
        self.node = node
        self.history = history
        self.vars = vars
        self.genealogy = genealogy
        self.lit_negcomp = lit_negcomp
        self.applied = applied
        self.decomposed_with = decomposed_with
        self.dec_total = dec_total
        self._fresh = fresh
        self._forced_cache = {}
        self._blocked_cache = {}
        self.node_axiomatic = False

    @classmethod
    def initial(cls, formula):
        node = FormulaSet([formula])
        branch = cls(node, node.copy(), [formula.left, formula.right], {},
                     FormulaSet(), set(), {}, 0, [0])
        branch.node_axiomatic = is_axiomatic(node)
        return branch

    @property
    def root_left(self):
        return self.vars[0]

    @property
    def root_right(self):
        return self.vars[1]

    def alloc_var(self):
        self._fresh[0] += 1
        return f"z{self._fresh[0]}"

    def fork(self, node):
        twin = Branch(node, self.history.copy(), list(self.vars),
                      dict(self.genealogy), self.lit_negcomp.copy(),
                      set(self.applied), dict(self.decomposed_with),
                      self.dec_total, self._fresh)
        # cache entries are tagged with the history length they were
        # computed at, so sharing them across the fork point is sound
        twin._forced_cache = dict(self._forced_cache)
        twin._blocked_cache = dict(self._blocked_cache)
        return twin

    def is_descendant_of_right_root(self, z):
        y = self.root_right
        cur = z
        while cur in self.genealogy:
            rec = self.genealogy[cur]
            if rec.rule == RULE_CMPL_COMP_UNIV:
                return False
            if rec.parent == y:
                return True
            cur = rec.parent
        return False


def var_order(branch):
    """Total order on the branch variables.

    The left root endpoint comes first, then generated variables that are
    not descendants of the right endpoint in introduction order, then the
    right endpoint, then its descendants in introduction order.
    """
    x, y = branch.root_left, branch.root_right
    before, after = [], []
    for w in branch.vars[2:]:
        (after if branch.is_descendant_of_right_root(w) else before).append(w)
    return [x, *before, y, *after]


def _removed(node, f):
    return FormulaSet(g for g in node if g != f)


def apply_boolean(node, f):
    """Decompose a Boolean formula of ``node``.

    Returns the rule tag and one or two successor formula sets (two for
    the branching rules).  The premise is removed; conclusions keep the
    premise's endpoints.
    """
    formulas = getattr(node, "formulas", node)
    rule = boolean_rule(f.term)
    if rule is None or f not in formulas:
        raise NotApplicable(f"no Boolean rule applies to {f!r}")
    x, y = f.left, f.right
    match f.term:
        case Union(l, r):
            groups = [[RelFormula(x, l, y), RelFormula(x, r, y)]]
        case Inter(l, r):
            groups = [[RelFormula(x, l, y)], [RelFormula(x, r, y)]]
        case Cmpl(Cmpl(a)):
            groups = [[RelFormula(x, a, y)]]
        case Cmpl(Union(l, r)):
            groups = [[RelFormula(x, Cmpl(l), y)], [RelFormula(x, Cmpl(r), y)]]
        case Cmpl(Inter(l, r)):
            groups = [[RelFormula(x, Cmpl(l), y), RelFormula(x, Cmpl(r), y)]]
    successors = []
    for group in groups:
        succ = _removed(formulas, f)
        succ.update(group)
        successors.append(succ)
    return rule, successors


def blocker_literals(branch, blocker, w):
    """Literals produced on the branch by the Boolean decomposition of the
    blocker's left part with witness ``w``."""
    return [
        h for h in branch.history
        if h.left == blocker.left and h.right == w
        and isinstance(h.term, Cmpl) and isinstance(h.term.arg, Var)
    ]


def is_blocked(f, branch):
    """The first formula of the branch history blocking ``f``, or None.

    A twin with the same term and right endpoint blocks ``f`` when it was
    already decomposed with some witness ``w`` and every composition
    obligation of ``f``'s left variable that the renamed witness literals
    would trigger is mirrored on the twin's side.
    """
    y = f.right
    for g in branch.history:
        if g == f or g.term != f.term or g.right != y:
            continue
        if g not in branch.decomposed_with:
            continue
        w = branch.decomposed_with[g]
        renamed = FormulaSet(
            RelFormula(f.left, h.term, w) for h in blocker_literals(branch, g, w)
        )
        mirrored = True
        for h in branch.history:
            if h.left != f.left or h.right != y or comp_rule(h.term) != RULE_COMP_BOOL:
                continue
            b1 = h.term.left
            if has_nbool_construction(RelFormula(f.left, Cmpl(b1), w), renamed):
                if RelFormula(g.left, h.term, y) not in branch.history:
                    mirrored = False
                    break
        if mirrored:
            return g
    return None


def record_blocked_literals(branch, f, blocker):
    w = branch.decomposed_with[blocker]
    for h in blocker_literals(branch, blocker, w):
        branch.lit_negcomp.add(RelFormula(f.left, h.term, w))


def _extends_to_axiomatic(node, added):
    """Whether adding the given formulas closed an otherwise open node."""
    for f in added:
        if isinstance(f.term, One):
            return True
        if isinstance(f.term, Cmpl) and RelFormula(f.left, f.term.arg, f.right) in node:
            return True
        if RelFormula(f.left, Cmpl(f.term), f.right) in node:
            return True
    return False


def apply_negcomp(branch, f):
    """Decompose a complemented composition on the branch's current node.

    Returns ``(rule, successor set, fresh variable)``, or None when the
    formula is inert, blocked (the blocker's literals are recorded,
    renamed to ``f``'s left variable), or suppressed by the side condition
    of the ``-(1;S)`` rule.  The premise leaves the node; it stays in the
    branch history.
    """
    rule = negcomp_rule(f.term)
    if rule is None or f not in branch.node:
        raise NotApplicable(f"no complemented-composition rule applies to {f!r}")
    if rule == "inert":
        return None
    b, s = f.term.arg.left, f.term.arg.right
    if rule in (RULE_CMPL_COMP, RULE_CMPL_COMP_ONE):
        blocker = is_blocked(f, branch)
        if blocker is not None:
            record_blocked_literals(branch, f, blocker)
            return None
    else:  # RULE_CMPL_COMP_UNIV: suppressed once some generated z' has z'(-S)y
        for g in branch.history:
            if (g.term == Cmpl(s) and g.right == f.right
                    and g.left in branch.genealogy):
                return None
    z = branch.alloc_var()
    branch.vars.append(z)
    branch.genealogy[z] = GenRecord(f, f.left, rule)
    branch.decomposed_with[f] = z
    branch.applied.add((rule, f, None))
    succ = _removed(branch.node, f)
    if rule == RULE_CMPL_COMP:
        succ.add(RelFormula(f.left, Cmpl(b), z))
        succ.add(RelFormula(z, Cmpl(s), f.right))
    elif rule == RULE_CMPL_COMP_ONE:
        succ.add(RelFormula(f.left, Cmpl(b), z))
    else:
        succ.add(RelFormula(z, Cmpl(s), f.right))
    return rule, succ, z


def apply_comp_a(branch, f, z):
    """Instantiate ``x'(B;S)y`` with a variable from the forced-literal set.

    The node gains ``z S y`` and keeps the premise.
    """
    if comp_rule(f.term) != RULE_COMP_BOOL or f not in branch.node:
        raise NotApplicable(f"the literal-gated composition rule does not fit {f!r}")
    key = (RULE_COMP_BOOL, f, z)
    if key in branch.applied:
        raise NotApplicable(f"{f!r} was already decomposed with {z}")
    if z not in v_set(Cmpl(f.term.left), f.left, branch.history):
        raise NotApplicable(f"{z} is not forced for {f!r}")
    branch.applied.add(key)
    branch.dec_total += 1
    succ = branch.node.copy()
    succ.add(RelFormula(z, f.term.right, f.right))
    return succ


def apply_comp_b(branch, f, z):
    """Instantiate ``x(1;S)y`` with any branch variable ``z``.

    Not applicable when ``z S y`` already occurred on the branch.
    """
    if comp_rule(f.term) != RULE_COMP_UNIV or f not in branch.node:
        raise NotApplicable(f"the universal composition rule does not fit {f!r}")
    key = (RULE_COMP_UNIV, f, z)
    if key in branch.applied:
        raise NotApplicable(f"{f!r} was already decomposed with {z}")
    if z not in branch.vars:
        raise NotApplicable(f"{z} does not occur on the branch")
    conclusion = RelFormula(z, f.term.right, f.right)
    if conclusion in branch.history:
        raise NotApplicable(f"{conclusion!r} already occurred on the branch")
    branch.applied.add(key)
    branch.dec_total += 1
    succ = branch.node.copy()
    succ.add(conclusion)
    return succ


# ---------------------------------------------------------------------------
# Enabled-application scan (shared by the engine loop, saturation detection
# and model extraction).  The forced-variable sets and blocking verdicts are
# memoized per branch, keyed by the history length they were computed at;
# the history only ever grows, so a stale entry is simply recomputed.


def _forced_vars(branch, f):
    key = (f.term.left, f.left)
    version = len(branch.history)
    cached = branch._forced_cache.get(key)
    if cached is not None and cached[0] == version:
        return cached[1]
    forced = v_set(Cmpl(f.term.left), f.left, branch.history)
    branch._forced_cache[key] = (version, forced)
    return forced


def _blocked_by(branch, f):
    version = len(branch.history)
    cached = branch._blocked_cache.get(f)
    if cached is not None and cached[0] == version:
        return cached[1]
    blocker = is_blocked(f, branch)
    branch._blocked_cache[f] = (version, blocker)
    return blocker


def _boolean_enabled(branch, f):
    rule = boolean_rule(f.term)
    return rule is not None and (rule, f, None) not in branch.applied


def _negcomp_enabled(branch, f):
    rule = negcomp_rule(f.term)
    if rule in (None, "inert") or (rule, f, None) in branch.applied:
        return False
    if rule == RULE_CMPL_COMP_UNIV:
        s = f.term.arg.right
        return not any(
            g.term == Cmpl(s) and g.right == f.right and g.left in branch.genealogy
            for g in branch.history
        )
    return _blocked_by(branch, f) is None


def _comp_bool_candidates(branch, f):
    forced = _forced_vars(branch, f)
    for w in var_order(branch):
        if w in forced and (RULE_COMP_BOOL, f, w) not in branch.applied:
            yield w


def _comp_univ_applicable(branch, f, z):
    return ((RULE_COMP_UNIV, f, z) not in branch.applied
            and RelFormula(z, f.term.right, f.right) not in branch.history)


def _formula_enabled(branch, f):
    if is_literal(f):
        return False
    if _boolean_enabled(branch, f):
        return True
    if _negcomp_enabled(branch, f):
        return True
    rule = comp_rule(f.term)
    if rule == RULE_COMP_BOOL:
        return next(_comp_bool_candidates(branch, f), None) is not None
    if rule == RULE_COMP_UNIV:
        return any(_comp_univ_applicable(branch, f, z) for z in branch.vars)
    return False


def node_weight(branch):
    """Weight of the branch's current node: the summed term weights of its
    formulas, counting formulas that cannot currently be decomposed as 0."""
    return sum(
        weight(f.term) for f in branch.node if _formula_enabled(branch, f)
    )


def branch_saturated(branch):
    """True iff the branch is open and no rule application remains."""
    return not is_axiomatic(branch.node) and not any(
        _formula_enabled(branch, f) for f in branch.node
    )


def extract_model(branch):
    """Read the falsifying model off a saturated open branch.

    The universe is the branch's variable list; a pair belongs to the
    interpretation of a relational variable exactly when the branch (or
    the recorded literals of blocked formulas) carries the corresponding
    negated literal.  The valuation is the identity.
    """
    if not branch_saturated(branch):
        raise BranchNotSaturated(
            "model extraction needs a non-axiomatic branch with no applicable rule"
        )
    universe = tuple(branch.vars)
    literals = [f for f in branch.history if is_literal(f)]
    literals.extend(branch.lit_negcomp)
    names = sorted(set().union(*(term_variables(f.term) for f in branch.history)))
    interp = {name: set() for name in names}
    positive = set()
    for f in literals:
        match f.term:
            case One():
                raise EngineInvariantError("an open branch carries x' 1 y'")
            case Var(name):
                positive.add((name, f.left, f.right))
            case Cmpl(Var(name)):
                interp[name].add((f.left, f.right))
    for name, a, b in positive:
        if (a, b) in interp[name]:
            raise EngineInvariantError(
                f"contradictory literals for {name} on an open branch"
            )
    valuation = {w: w for w in universe}
    return Model(universe, interp), valuation


# ---------------------------------------------------------------------------
# Deduction tree and search driver


class Node:
    __slots__ = ("id", "parent", "formulas", "rule", "premise", "variable",
                 "closed", "children")

    def __init__(self, id, parent, formulas, rule=None, premise=None, variable=None):
        self.id = id
        self.parent = parent
        self.formulas = formulas
        self.rule = rule
        self.premise = premise
        self.variable = variable
        self.closed = False
        self.children = []


@dataclass
class DeductionTree:
    nodes: list = field(default_factory=list)
    steps: int = 0
    branch_count: int = 1
    max_vars: int = 0

    @property
    def root(self):
        return self.nodes[0]

    def new_node(self, parent, formulas, rule=None, premise=None, variable=None):
        node = Node(len(self.nodes), parent.id if parent else None, formulas,
                    rule, premise, variable)
        self.nodes.append(node)
        if parent is not None:
            parent.children.append(node.id)
        return node

    def to_json(self):
        return {
            "nodes": [
                {
                    "id": n.id,
                    "parent": n.parent,
                    "formulas": [
                        [f.left, render_term(f.term), f.right] for f in n.formulas
                    ],
                    "rule": n.rule,
                    "premise": (
                        [n.premise.left, render_term(n.premise.term), n.premise.right]
                        if n.premise is not None else None
                    ),
                    "variable": n.variable,
                    "closed": n.closed,
                    "children": list(n.children),
                }
                for n in self.nodes
            ]
        }


@dataclass
class Proof:
    tree: DeductionTree


@dataclass
class Countermodel:
    tree: DeductionTree
    branch: Branch
    model: Model
    valuation: dict


Verdict = Proof | Countermodel


class ProofSearch:
    """One run of the decision procedure on a single input term."""

    def __init__(self, term, *, max_steps=1_000_000, max_vars=10_000,
                 var_bound_factor=8, trace=None):
        prepared = simplify_ones(term)
        require_fragment(prepared)
        self.term = prepared
        self.max_steps = max_steps
        self.max_vars = max_vars
        self.trace = trace
        self.cp = components(prepared)
        self.var_bound = var_bound_factor * len(self.cp) ** 2
        self.tree = DeductionTree()
        self.root_formula = RelFormula("x", prepared, "y")
        self._stack = []

    def run(self):
        branch = Branch.initial(self.root_formula)
        root = self.tree.new_node(None, branch.node)
        self.tree.max_vars = len(branch.vars)
        return self._drive(branch, root)

    def _drive(self, branch, leaf):
        self._stack.append((branch, leaf))
        while self._stack:
            branch, leaf = self._stack.pop()
            leaf, status = self._expand(branch, leaf)
            if status == "open":
                model, valuation = extract_model(branch)
                return Countermodel(self.tree, branch, model, valuation)
        return Proof(self.tree)

    def _expand(self, branch, leaf):
        while True:
            if branch.node_axiomatic:
                leaf.closed = True
                return leaf, "closed"
            z = self._smallest_pending_var(branch)
            if z is None:
                self._finalize_open(branch)
                return leaf, "open"
            leaf = self._turn(branch, leaf, z)

    def _smallest_pending_var(self, branch):
        order = var_order(branch)
        for z in order:
            for f in branch.node:
                if f.left == z and (_boolean_enabled(branch, f)
                                    or _negcomp_enabled(branch, f)):
                    return z
                if (f.left == z and comp_rule(f.term) == RULE_COMP_BOOL
                        and next(_comp_bool_candidates(branch, f), None) is not None):
                    return z
            for f in branch.node:
                if (comp_rule(f.term) == RULE_COMP_UNIV
                        and _comp_univ_applicable(branch, f, z)):
                    return z
        return None

    def _turn(self, branch, leaf, z):
        while not branch.node_axiomatic:
            app = self._next_application(branch, z)
            if app is None:
                return leaf
            leaf = self._apply(branch, leaf, app)
        return leaf

    def _next_application(self, branch, z):
        for f in branch.node:
            if f.left == z and _boolean_enabled(branch, f):
                return ("boolean", f, None)
        for f in branch.node:
            if f.left == z and negcomp_rule(f.term) not in (None, "inert"):
                rule = negcomp_rule(f.term)
                if (rule, f, None) in branch.applied:
                    continue
                if _negcomp_enabled(branch, f):
                    return ("negcomp", f, None)
                if rule in (RULE_CMPL_COMP, RULE_CMPL_COMP_ONE):
                    blocker = _blocked_by(branch, f)
                    if blocker is not None:
                        record_blocked_literals(branch, f, blocker)
        for f in branch.node:
            if f.left == z and comp_rule(f.term) == RULE_COMP_BOOL:
                w = next(_comp_bool_candidates(branch, f), None)
                if w is not None:
                    return ("comp_a", f, w)
        for f in branch.node:
            if (comp_rule(f.term) == RULE_COMP_UNIV
                    and _comp_univ_applicable(branch, f, z)):
                return ("comp_b", f, z)
        return None

    def _apply(self, branch, leaf, app):
        kind, f, inst = app
        self.tree.steps += 1
        if self.tree.steps > self.max_steps:
            raise ResourceExhausted(f"step cap of {self.max_steps} exceeded")
        before_weight = (sum(weight(g.term) for g in branch.node)
                         if kind != "comp_a" and kind != "comp_b" else 0)
        before_dec = branch.dec_total

        parent_node = branch.node
        if kind == "boolean":
            rule, successors = apply_boolean(branch.node, f)
            branch.applied.add((rule, f, None))
            children = [
                self.tree.new_node(leaf, succ, rule, f, None) for succ in successors
            ]
            added = [
                [g for g in succ if g not in parent_node] for succ in successors
            ]
            self._emit(rule, f, None)
            if len(children) == 2:
                self.tree.branch_count += 1
                fork = branch.fork(children[1].formulas)
                fork.node_axiomatic = _extends_to_axiomatic(fork.node, added[1])
                self._admit(fork, children[1].formulas)
                self._check_progress(rule, branch, fork.node, before_weight, before_dec)
                self._stack.append((fork, children[1]))
            branch.node = children[0].formulas
            branch.node_axiomatic = _extends_to_axiomatic(branch.node, added[0])
            self._admit(branch, branch.node)
            self._check_progress(rule, branch, branch.node, before_weight, before_dec)
            return children[0]

        if kind == "negcomp":
            result = apply_negcomp(branch, f)
            if result is None:
                raise EngineInvariantError("scheduled a blocked or inert formula")
            rule, succ, fresh = result
            if len(branch.vars) > self.max_vars:
                raise ResourceExhausted(f"variable cap of {self.max_vars} exceeded")
            if len(branch.vars) > self.var_bound + 2:
                raise EngineInvariantError(
                    f"branch variables exceeded the bound {self.var_bound + 2}"
                )
            self.tree.max_vars = max(self.tree.max_vars, len(branch.vars))
            child = self.tree.new_node(leaf, succ, rule, f, fresh)
            added = [g for g in succ if g not in parent_node]
            branch.node = succ
            branch.node_axiomatic = _extends_to_axiomatic(succ, added)
            self._admit(branch, succ)
            self._check_progress(rule, branch, succ, before_weight, before_dec)
            self._emit(rule, f, fresh)
            return child

        if kind == "comp_a":
            succ = apply_comp_a(branch, f, inst)
            rule = RULE_COMP_BOOL
        else:
            succ = apply_comp_b(branch, f, inst)
            rule = RULE_COMP_UNIV
        child = self.tree.new_node(leaf, succ, rule, f, inst)
        added = [g for g in succ if g not in parent_node]
        branch.node = succ
        branch.node_axiomatic = _extends_to_axiomatic(succ, added)
        self._admit(branch, succ)
        self._check_progress(rule, branch, succ, before_weight, before_dec)
        self._emit(rule, f, inst)
        return child

    def _admit(self, branch, node):
        """Record a node's formulas in the branch history, checking the
        component and endpoint discipline every formula must respect."""
        for f in node:
            if f in branch.history:
                continue
            if f.term not in self.cp:
                raise EngineInvariantError(
                    f"formula term escaped the component set: {f!r}"
                )
            if not is_boolean(f.term) and f.right != branch.root_right:
                raise EngineInvariantError(
                    f"compositional formula with a generated right endpoint: {f!r}"
                )
            branch.history.add(f)

    def _check_progress(self, rule, branch, node, before_weight, before_dec):
        if rule in _COMP_RULES:
            if branch.dec_total <= before_dec:
                raise EngineInvariantError("composition step without progress")
        else:
            after = sum(weight(g.term) for g in node)
            if after >= before_weight:
                raise EngineInvariantError(
                    f"rule {rule} did not decrease the node weight"
                )

    def _finalize_open(self, branch):
        for f in branch.node:
            rule = negcomp_rule(f.term)
            if rule in (RULE_CMPL_COMP, RULE_CMPL_COMP_ONE) and f not in branch.decomposed_with:
                blocker = is_blocked(f, branch)
                if blocker is None:
                    raise EngineInvariantError(
                        f"undecomposed, unblocked formula on a saturated branch: {f!r}"
                    )
                record_blocked_literals(branch, f, blocker)
            if (not is_literal(f) and boolean_rule(f.term) is not None
                    and (boolean_rule(f.term), f, None) not in branch.applied):
                raise EngineInvariantError(
                    f"undecomposed Boolean formula on a saturated branch: {f!r}"
                )
        if node_weight(branch) != 0:
            raise EngineInvariantError("saturated leaf has nonzero weight")

    def _emit(self, rule, premise, variable):
        if self.trace is not None:
            self.trace({
                "rule": rule,
                "premise": repr(premise),
                "variable": variable,
            })


def run_procedure(term, *, max_steps=1_000_000, max_vars=10_000, trace=None):
    """Decide validity of ``x term y``.

    The term is simplified and fragment-checked first; a
    :class:`FragmentViolation` is raised for terms outside the fragment.
    Returns :class:`Proof` when every branch closes, otherwise the first
    saturated open branch as a :class:`Countermodel`.  Identical inputs
    produce identical trees.
    """
    return ProofSearch(term, max_steps=max_steps, max_vars=max_vars,
                       trace=trace).run()


def stats_of(verdict):
    tree = verdict.tree
    return {"steps": tree.steps, "branches": tree.branch_count,
            "variables": tree.max_vars}


def verdict_to_json(verdict):
    """Stable JSON form of a verdict: proof tree or countermodel plus stats."""
    from .semantics import model_to_json

    if isinstance(verdict, Proof):
        return {
            "verdict": "valid",
            "proof": verdict.tree.to_json(),
            "countermodel": None,
            "stats": stats_of(verdict),
        }
    return {
        "verdict": "invalid",
        "proof": None,
        "countermodel": model_to_json(verdict.model, verdict.valuation),
        "stats": stats_of(verdict),
    }
