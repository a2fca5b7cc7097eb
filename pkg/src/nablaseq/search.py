"""Fuel-bounded backward proof search for the cut-free calculi.

Search is deterministic: rules are tried in the fixed enumeration order of
applicable_instances, and the first completed proof wins.  Exhaustion makes
no unprovability claim; refutation belongs to the algebra oracle.

Subgoal outcomes are memoized: found proofs by sequent, failures by
(sequent, depth threshold).  With loop pruning enabled a memoized failure
may have been caused by a subsumption prune against a path ancestor, so the
memo extends the pruning assumption (contraction-collapsed repeats are
redundant) from paths to the whole search; the prune-on/off differential
test guards this on provable corpora.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .kernel import (
    CalculusId,
    InternalError,
    Node,
    ProofTree,
    check_proof,
    identity,
    iter_applicable,
    mk_id,
    mk_lbot,
    mk_lw,
    mk_lw1_many,
    mk_rtop,
    mk_rw,
)
from .syntax import Bot, Sequent, Top, strip_nabla

_INF_DEPTH = 10**9


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 30
    max_nabla_excess: int = 2
    max_nodes: int = 200_000

    def __post_init__(self):
        if self.max_depth < 1 or self.max_nabla_excess < 0 or self.max_nodes < 1:
            raise ValueError("search budget bounds must be positive")


@dataclass
class SearchReport:
    expansions: int = 0
    prunes: int = 0
    budget_hit: tuple[str, ...] = ()


@dataclass(frozen=True)
class Found:
    proof: ProofTree
    report: SearchReport = field(compare=False, default_factory=SearchReport)


@dataclass(frozen=True)
class Exhausted:
    report: SearchReport


SearchOutcome = Union[Found, Exhausted]


def _canon(s: Sequent) -> tuple:
    # contraction-collapsed form: duplicates in the antecedent are provably
    # redundant (Lc is height-preserving admissible), so loop detection may
    # ignore multiplicities
    return (frozenset(s.ant.distinct()), s.suc)


def _close_structurally(goal: Sequent, calc: CalculusId) -> Optional[ProofTree]:
    """A weakening straight to an axiom, when one applies; keeps the search
    out of the one-removal-at-a-time weakening lattice."""
    ant, suc = goal.ant, goal.suc
    weaken = mk_lw1_many if calc.is_stl else mk_lw
    if suc:
        head = suc[0]
        if isinstance(head, Top):
            return weaken(mk_rtop(), ant)
        if isinstance(head, Atom) and head in ant:
            leaf = mk_id(head) if calc.is_stl else mk_idp(head)
            return weaken(leaf, ant.remove(head))
        if calc.is_stl and head in ant:
            return weaken(mk_id(head), ant.remove(head))
        if Bot() in ant:
            return weaken(mk_rw(mk_lbot(), head), ant.remove(Bot()))
    elif Bot() in ant:
        return weaken(mk_lbot(), ant.remove(Bot()))
    return None


def _max_prefix(s: Sequent) -> int:
    try:
        return s._maxpre
    except AttributeError:
        value = max((strip_nabla(f).depth for f in s.all_formulas()), default=0)
        object.__setattr__(s, "_maxpre", value)
        return value


class _Searcher:
    def __init__(self, calc: CalculusId, budget: SearchBudget, nabla_limit: int, loop_prune: bool):
        self.calc = calc
        self.budget = budget
        self.nabla_limit = nabla_limit
        self.loop_prune = loop_prune
        self.expansions = 0
        self.prunes = 0
        self.hit: set[str] = set()
        self.path: dict[tuple, list] = {}
        self.budget_blown = False
        self.found_cache: dict[Sequent, ProofTree] = {}
        self.fail_cache: dict[Sequent, int] = {}

    def visit(self, goal: Sequent, depth: int) -> Optional[ProofTree]:
        cached = self.found_cache.get(goal)
        if cached is not None and cached.height <= depth:
            return cached
        if self.fail_cache.get(goal, -1) >= depth:
            return None
        if _max_prefix(goal) > self.nabla_limit:
            self.prunes += 1
            self.hit.add("nabla_excess")
            self.fail_cache[goal] = _INF_DEPTH
            return None
        key = None
        if self.loop_prune:
            # prune when a path ancestor has the same contraction-collapsed
            # form and the goal makes no progress (its antecedent contains the
            # ancestor's); strict sub-multiset descents are real progress
            key = _canon(goal)
            for anc_ant in self.path.get(key, ()):
                if goal.ant.contains_all(anc_ant):
                    self.prunes += 1
                    return None
        if self.expansions >= self.budget.max_nodes:
            self.hit.add("nodes")
            self.budget_blown = True
            return None
        self.expansions += 1
        closed = _close_structurally(goal, self.calc)
        if closed is not None and closed.height <= depth:
            self.found_cache[goal] = closed
            return closed
        if self.loop_prune:
            self.path.setdefault(key, []).append(goal.ant)

        proof: Optional[ProofTree] = None
        for inst, premises in iter_applicable(goal, self.calc):
            if premises and depth == 0:
                self.prunes += 1
                self.hit.add("depth")
                continue
            children = []
            for premise in premises:
                sub = self.visit(premise, depth - 1)
                if sub is None:
                    break
                children.append(sub)
            else:
                proof = Node(goal, inst, tuple(children))
                break

        if self.loop_prune:
            entries = self.path[key]
            entries.pop()
            if not entries:
                del self.path[key]
        if proof is not None:
            best = self.found_cache.get(goal)
            if best is None or proof.height < best.height:
                self.found_cache[goal] = proof
        elif not self.budget_blown:
            self.fail_cache[goal] = max(self.fail_cache.get(goal, -1), depth)
        return proof


def prove(
    goal: Sequent,
    calc: CalculusId,
    budget: SearchBudget = SearchBudget(),
    loop_prune: bool = True,
) -> SearchOutcome:
    """Search for a cut-free proof of goal within budget.

    Found proofs are re-checked before being returned; Exhausted reports the
    budget dimensions that fired (empty means the bounded space was covered).
    """
    if calc.allow_cut:
        raise ValueError("proof search never uses cut; pass a cut-free calculus")
    if calc.lstar_only and not goal.is_lstar():
        raise ValueError(f"goal is outside the language of {calc.base.value}")
    limit = _max_prefix(goal) + budget.max_nabla_excess
    searcher = _Searcher(calc, budget, limit, loop_prune)
    proof = searcher.visit(goal, budget.max_depth)
    report = SearchReport(searcher.expansions, searcher.prunes, tuple(sorted(searcher.hit)))
    if proof is None:
        return Exhausted(report)
    if proof.sequent != goal:
        raise InternalError("search returned a proof of the wrong sequent")
    err = check_proof(proof, calc)
    if err is not None:
        raise InternalError(f"search returned an ill-formed proof: {err[1]} at {err[0]}")
    return Found(proof, report)


def prove_formula(f, calc: CalculusId, budget: SearchBudget = SearchBudget()) -> SearchOutcome:
    return prove(Sequent.make([], f), calc, budget)
