"""Machine representation of the four sequent calculi and their proof trees.

Two rule families live side by side: the cut-free calculi (rules IdP, LW,
LAndN, ... with nabla exponents) and the cut-ful originals (Id, Lw, Lc, Cut,
LAnd1, ...).  Rules whose schema is literally shared (RAnd, ROr1, ROr2,
RDynImp, RHeytImp, Rw, LBot, RTop, N) carry a single identifier.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .syntax import (
    And,
    Atom,
    Bot,
    DynImp,
    HeytImp,
    Multiset,
    Nabla,
    Or,
    Sequent,
    Top,
    Formula,
    is_lstar,
    nabla_n,
    parse_formula,
    parse_sequent,
    print_formula,
    print_sequent,
    strip_nabla,
)


class ProofError(Exception):
    """A proof object or proof-building request is malformed."""


class InternalError(Exception):
    """A runtime-checked invariant of an algorithm was violated."""


class Base(enum.Enum):
    IKD = "ikd"
    IKDS = "ikds"
    STLNH = "stlnh"
    STLN = "stln"


@dataclass(frozen=True)
class CalculusId:
    base: Base
    allow_cut: bool
    allow_hypotheses: bool = False

    @property
    def lstar_only(self) -> bool:
        return self.base in (Base.IKDS, Base.STLN)

    @property
    def is_stl(self) -> bool:
        return self.base in (Base.STLNH, Base.STLN)

    def with_cut(self, allow_cut: bool = True) -> "CalculusId":
        return CalculusId(self.base, allow_cut, self.allow_hypotheses)

    def with_hypotheses(self, allow: bool = True) -> "CalculusId":
        return CalculusId(self.base, self.allow_cut, allow)


def ikd(allow_cut: bool = False, allow_hypotheses: bool = False) -> CalculusId:
    return CalculusId(Base.IKD, allow_cut, allow_hypotheses)


def ikds(allow_cut: bool = False, allow_hypotheses: bool = False) -> CalculusId:
    return CalculusId(Base.IKDS, allow_cut, allow_hypotheses)


def stlnh(allow_cut: bool = True, allow_hypotheses: bool = False) -> CalculusId:
    return CalculusId(Base.STLNH, allow_cut, allow_hypotheses)


def stln(allow_cut: bool = True, allow_hypotheses: bool = False) -> CalculusId:
    return CalculusId(Base.STLN, allow_cut, allow_hypotheses)


def calculus_from_name(name: str) -> CalculusId:
    table = {"ikd": ikd, "ikds": ikds, "stl": stlnh, "stlnh": stlnh, "stln": stln}
    try:
        return table[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown calculus {name!r} (use ikd, ikds, stl, stln)")


class Rule(enum.Enum):
    # axioms
    IDP = "IdP"
    ID = "Id"
    LBOT = "LBot"
    RTOP = "RTop"
    # structural
    LW = "LW"
    LW1 = "Lw"
    RW = "Rw"
    LC = "Lc"
    CUT = "Cut"
    # cut-free logical rules (nabla exponents)
    LAND_N = "LAndN"
    LOR_N = "LOrN"
    LDYNIMP_N = "LDynImpN"
    LHEYTIMP_N = "LHeytImpN"
    # cut-ful logical rules
    LAND1 = "LAnd1"
    LAND2 = "LAnd2"
    LOR = "LOr"
    LDYNIMP = "LDynImp"
    LHEYTIMP = "LHeytImp"
    # shared logical rules
    RAND = "RAnd"
    ROR1 = "ROr1"
    ROR2 = "ROr2"
    RDYNIMP = "RDynImp"
    RHEYTIMP = "RHeytImp"
    N = "N"


_SHARED = {
    Rule.LBOT, Rule.RTOP, Rule.RW,
    Rule.RAND, Rule.ROR1, Rule.ROR2, Rule.RDYNIMP, Rule.RHEYTIMP, Rule.N,
}
_IKD_ONLY = {Rule.IDP, Rule.LW, Rule.LAND_N, Rule.LOR_N, Rule.LDYNIMP_N, Rule.LHEYTIMP_N}
_STL_ONLY = {Rule.ID, Rule.LW1, Rule.LC, Rule.LAND1, Rule.LAND2, Rule.LOR, Rule.LDYNIMP, Rule.LHEYTIMP}
_HEYT_RULES = {Rule.LHEYTIMP_N, Rule.RHEYTIMP, Rule.LHEYTIMP}


def rules_of(calc: CalculusId) -> frozenset[Rule]:
    rules = set(_SHARED)
    rules |= _STL_ONLY if calc.is_stl else _IKD_ONLY
    if calc.allow_cut:
        rules.add(Rule.CUT)
    if calc.lstar_only:
        rules -= _HEYT_RULES
    return frozenset(rules)


# which optional RuleInstance fields each rule demands
_FIELDS = {
    Rule.IDP: frozenset(),
    Rule.ID: frozenset(),
    Rule.LBOT: frozenset(),
    Rule.RTOP: frozenset(),
    Rule.LW: frozenset({"intro"}),
    Rule.LW1: frozenset({"intro"}),
    Rule.RW: frozenset({"intro"}),
    Rule.LC: frozenset({"principal"}),
    Rule.CUT: frozenset({"cut_formula", "cut_exponent"}),
    Rule.LAND_N: frozenset({"n", "principal"}),
    Rule.LOR_N: frozenset({"n", "principal"}),
    Rule.LDYNIMP_N: frozenset({"n", "principal"}),
    Rule.LHEYTIMP_N: frozenset({"n", "principal"}),
    Rule.LAND1: frozenset({"principal"}),
    Rule.LAND2: frozenset({"principal"}),
    Rule.LOR: frozenset({"principal"}),
    Rule.LDYNIMP: frozenset({"principal"}),
    Rule.LHEYTIMP: frozenset({"principal"}),
    Rule.RAND: frozenset({"principal"}),
    Rule.ROR1: frozenset({"principal"}),
    Rule.ROR2: frozenset({"principal"}),
    Rule.RDYNIMP: frozenset({"principal"}),
    Rule.RHEYTIMP: frozenset({"principal"}),
    Rule.N: frozenset(),
}


@dataclass(frozen=True)
class RuleInstance:
    rule: Rule
    n: Optional[int] = None
    principal: Optional[Formula] = None
    intro: Optional[Multiset] = None
    cut_formula: Optional[Formula] = None
    cut_exponent: Optional[int] = None

    def present_fields(self) -> frozenset[str]:
        fields = set()
        if self.n is not None:
            fields.add("n")
        if self.principal is not None:
            fields.add("principal")
        if self.intro is not None:
            fields.add("intro")
        if self.cut_formula is not None:
            fields.add("cut_formula")
        if self.cut_exponent is not None:
            fields.add("cut_exponent")
        return frozenset(fields)


@dataclass(frozen=True)
class Hypothesis:
    sequent: Sequent

    @property
    def height(self) -> int:
        return 0


@dataclass(frozen=True)
class Node:
    sequent: Sequent
    inst: RuleInstance
    children: tuple["ProofTree", ...]
    height: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        h = 1 + max((c.height for c in self.children), default=-1)
        object.__setattr__(self, "height", max(h, 0))


ProofTree = Union[Hypothesis, Node]


def iter_nodes(t: ProofTree) -> Iterator[ProofTree]:
    yield t
    if isinstance(t, Node):
        for c in t.children:
            yield from iter_nodes(c)


def uses_rule(t: ProofTree, rule: Rule) -> bool:
    return any(isinstance(u, Node) and u.inst.rule is rule for u in iter_nodes(t))


def has_hypotheses(t: ProofTree) -> bool:
    return any(isinstance(u, Hypothesis) for u in iter_nodes(t))


# ---------------------------------------------------------------------------
# Instance checking


def _peel(f: Formula, n: int) -> Optional[Formula]:
    """Remove exactly n leading nablas, or None if fewer are present."""
    for _ in range(n):
        if not isinstance(f, Nabla):
            return None
        f = f.body
    return f


def _split_principal(f: Formula, n: int, head) -> Optional[tuple[Formula, Formula]]:
    """f must be nabla^n(A . B) with the given binary head; returns (A, B)."""
    core = _peel(f, n)
    if core is None or type(core) is not head:
        return None
    return core.left, core.right


def check_instance(
    conclusion: Sequent,
    inst: RuleInstance,
    premises: list[Sequent],
    calc: CalculusId,
) -> Optional[str]:
    """None iff conclusion/premises exactly match the schema of inst in calc;
    otherwise a description of the first mismatched constraint."""
    rule = inst.rule
    if rule not in rules_of(calc):
        return f"rule {rule.value} is not part of calculus {calc.base.value}" + (
            "" if calc.allow_cut or rule is not Rule.CUT else " (cut disallowed)"
        )
    if inst.present_fields() != _FIELDS[rule]:
        want = ", ".join(sorted(_FIELDS[rule])) or "none"
        return f"{rule.value} demands exactly fields: {want}"
    if calc.lstar_only:
        for s in [conclusion, *premises]:
            if not s.is_lstar():
                return f"Heyting implication is outside the language of {calc.base.value}"

    ant, suc = conclusion.ant, conclusion.suc

    def arity(k: int) -> Optional[str]:
        if len(premises) != k:
            return f"{rule.value} requires {k} premise{'s' if k != 1 else ''}"
        return None

    if rule is Rule.IDP:
        if err := arity(0):
            return err
        if len(ant) != 1 or not isinstance(ant.items[0], Atom) or suc != ant.items:
            return "IdP concludes exactly p |- p for an atom p"
        return None

    if rule is Rule.ID:
        if err := arity(0):
            return err
        if len(ant) != 1 or suc != ant.items:
            return "Id concludes exactly A |- A"
        return None

    if rule is Rule.LBOT:
        if err := arity(0):
            return err
        if ant.items != (Bot(),) or suc:
            return "LBot concludes exactly F |-"
        return None

    if rule is Rule.RTOP:
        if err := arity(0):
            return err
        if len(ant) != 0 or suc != (Top(),):
            return "RTop concludes exactly |- T"
        return None

    if rule in (Rule.LW, Rule.LW1):
        if err := arity(1):
            return err
        if rule is Rule.LW1 and len(inst.intro) != 1:
            return "Lw introduces exactly one formula"
        if not ant.contains_all(inst.intro):
            return "weakened formulas must occur in the conclusion antecedent"
        if premises[0] != Sequent(ant.difference(inst.intro), suc):
            return "LW premise must be the conclusion minus the introduced formulas"
        return None

    if rule is Rule.RW:
        if err := arity(1):
            return err
        if len(inst.intro) != 1:
            return "Rw introduces exactly one formula"
        if not suc or suc[0] != inst.intro.items[0]:
            return "Rw succedent must be the introduced formula"
        if premises[0] != Sequent(ant, ()):
            return "Rw premise must have the same antecedent and empty succedent"
        return None

    if rule is Rule.LC:
        if err := arity(1):
            return err
        a = inst.principal
        if a not in ant:
            return "contracted formula must occur in the conclusion antecedent"
        if premises[0] != Sequent(ant.add(a), suc):
            return "Lc premise must carry one extra copy of the contracted formula"
        return None

    if rule is Rule.CUT:
        if err := arity(2):
            return err
        n = inst.cut_exponent
        if n < 0:
            return "cut exponent must be a natural number"
        if calc.is_stl and n != 0:
            return "the cut rule of the cut-ful calculi has no nabla exponent"
        a = inst.cut_formula
        p1, p2 = premises
        if p1.suc != (a,):
            return "left cut premise must conclude the cut formula"
        na = nabla_n(a, n)
        if na not in p2.ant:
            return "right cut premise must contain nabla^n of the cut formula"
        phi = p2.ant.remove(na)
        if conclusion != Sequent(phi.union(nabla_n(g, n) for g in p1.ant), p2.suc):
            return "cut conclusion must be Phi, nabla^n Pi |- Lambda"
        return None

    if rule is Rule.LAND_N:
        if err := arity(1):
            return err
        parts = _split_principal(inst.principal, inst.n, And)
        if parts is None:
            return "LAndN principal must be nabla^n (A & B)"
        if inst.principal not in ant:
            return "principal must occur in the conclusion antecedent"
        a, b = parts
        gamma = ant.remove(inst.principal)
        if premises[0] != Sequent(gamma.add(nabla_n(a, inst.n), nabla_n(b, inst.n)), suc):
            return "LAndN premise must be Gamma, nabla^n A, nabla^n B |- Delta"
        return None

    if rule is Rule.LOR_N:
        if err := arity(2):
            return err
        parts = _split_principal(inst.principal, inst.n, Or)
        if parts is None:
            return "LOrN principal must be nabla^n (A | B)"
        if inst.principal not in ant:
            return "principal must occur in the conclusion antecedent"
        a, b = parts
        gamma = ant.remove(inst.principal)
        if premises[0] != Sequent(gamma.add(nabla_n(a, inst.n)), suc):
            return "first LOrN premise must be Gamma, nabla^n A |- Delta"
        if premises[1] != Sequent(gamma.add(nabla_n(b, inst.n)), suc):
            return "second LOrN premise must be Gamma, nabla^n B |- Delta"
        return None

    if rule is Rule.LDYNIMP_N:
        if err := arity(2):
            return err
        parts = _split_principal(inst.principal, inst.n + 1, DynImp)
        if parts is None:
            return "LDynImpN principal must be nabla^(n+1) (A -> B)"
        if inst.principal not in ant:
            return "principal must occur in the conclusion antecedent"
        a, b = parts
        if premises[0] != Sequent(ant, (nabla_n(a, inst.n),)):
            return "first LDynImpN premise must retain the principal and conclude nabla^n A"
        if premises[1] != Sequent(ant.add(nabla_n(b, inst.n)), suc):
            return "second LDynImpN premise must retain the principal and add nabla^n B"
        return None

    if rule is Rule.LHEYTIMP_N:
        if err := arity(2):
            return err
        parts = _split_principal(inst.principal, inst.n, HeytImp)
        if parts is None:
            return "LHeytImpN principal must be nabla^n (A => B)"
        if inst.principal not in ant:
            return "principal must occur in the conclusion antecedent"
        a, b = parts
        gamma = ant.remove(inst.principal)
        if premises[0] != Sequent(ant, (nabla_n(a, inst.n),)):
            return "first LHeytImpN premise must retain the principal and conclude nabla^n A"
        if premises[1] != Sequent(gamma.add(nabla_n(b, inst.n)), suc):
            return "second LHeytImpN premise must be Gamma, nabla^n B |- Delta"
        return None

    if rule in (Rule.LAND1, Rule.LAND2):
        if err := arity(1):
            return err
        if not isinstance(inst.principal, And):
            return f"{rule.value} principal must be a conjunction"
        if inst.principal not in ant:
            return "principal must occur in the conclusion antecedent"
        kept = inst.principal.left if rule is Rule.LAND1 else inst.principal.right
        if premises[0] != Sequent(ant.remove(inst.principal).add(kept), suc):
            return f"{rule.value} premise must replace the conjunction by one conjunct"
        return None

    if rule is Rule.LOR:
        if err := arity(2):
            return err
        if not isinstance(inst.principal, Or):
            return "LOr principal must be a disjunction"
        if inst.principal not in ant:
            return "principal must occur in the conclusion antecedent"
        gamma = ant.remove(inst.principal)
        if premises[0] != Sequent(gamma.add(inst.principal.left), suc):
            return "first LOr premise must be Gamma, A |- Delta"
        if premises[1] != Sequent(gamma.add(inst.principal.right), suc):
            return "second LOr premise must be Gamma, B |- Delta"
        return None

    if rule is Rule.LDYNIMP:
        if err := arity(2):
            return err
        if not (isinstance(inst.principal, Nabla) and isinstance(inst.principal.body, DynImp)):
            return "LDynImp principal must be #(A -> B)"
        if inst.principal not in ant:
            return "principal must occur in the conclusion antecedent"
        imp = inst.principal.body
        gamma = ant.remove(inst.principal)
        if premises[0] != Sequent(gamma, (imp.left,)):
            return "first LDynImp premise must be Gamma |- A"
        if premises[1] != Sequent(gamma.add(imp.right), suc):
            return "second LDynImp premise must be Gamma, B |- Delta"
        return None

    if rule is Rule.LHEYTIMP:
        if err := arity(2):
            return err
        if not isinstance(inst.principal, HeytImp):
            return "LHeytImp principal must be A => B"
        if inst.principal not in ant:
            return "principal must occur in the conclusion antecedent"
        gamma = ant.remove(inst.principal)
        if premises[0] != Sequent(gamma, (inst.principal.left,)):
            return "first LHeytImp premise must be Gamma |- A"
        if premises[1] != Sequent(gamma.add(inst.principal.right), suc):
            return "second LHeytImp premise must be Gamma, B |- Delta"
        return None

    if rule is Rule.RAND:
        if err := arity(2):
            return err
        if suc != (inst.principal,) or not isinstance(inst.principal, And):
            return "RAnd requires two premises and an A & B succedent"
        if premises[0] != Sequent(ant, (inst.principal.left,)):
            return "first RAnd premise must be Gamma |- A"
        if premises[1] != Sequent(ant, (inst.principal.right,)):
            return "second RAnd premise must be Gamma |- B"
        return None

    if rule in (Rule.ROR1, Rule.ROR2):
        if err := arity(1):
            return err
        if suc != (inst.principal,) or not isinstance(inst.principal, Or):
            return f"{rule.value} succedent must be A | B"
        kept = inst.principal.left if rule is Rule.ROR1 else inst.principal.right
        if premises[0] != Sequent(ant, (kept,)):
            return f"{rule.value} premise must conclude the chosen disjunct"
        return None

    if rule is Rule.RDYNIMP:
        if err := arity(1):
            return err
        if suc != (inst.principal,) or not isinstance(inst.principal, DynImp):
            return "RDynImp succedent must be A -> B"
        imp = inst.principal
        if premises[0] != Sequent(ant.map_nabla().add(imp.left), (imp.right,)):
            return "RDynImp premise must be #Gamma, A |- B with the whole context under nabla"
        return None

    if rule is Rule.RHEYTIMP:
        if err := arity(1):
            return err
        if suc != (inst.principal,) or not isinstance(inst.principal, HeytImp):
            return "RHeytImp succedent must be A => B"
        imp = inst.principal
        if premises[0] != Sequent(ant.add(imp.left), (imp.right,)):
            return "RHeytImp premise must be Gamma, A |- B"
        return None

    if rule is Rule.N:
        if err := arity(1):
            return err
        if any(not isinstance(f, Nabla) for f in ant):
            return "N conclusion antecedent must be entirely nabla-headed"
        if suc and not isinstance(suc[0], Nabla):
            return "N conclusion succedent must be nabla-headed (or empty)"
        inner = Sequent(
            Multiset(f.body for f in ant),
            (suc[0].body,) if suc else (),
        )
        if premises[0] != inner:
            return "N premise must be the conclusion with one nabla removed everywhere"
        return None

    raise AssertionError(f"unhandled rule {rule}")  # pragma: no cover


def check_proof(t: ProofTree, calc: CalculusId) -> Optional[tuple[tuple[int, ...], str]]:
    """None iff every node passes check_instance, hypotheses only appear when
    allowed, and the proof stays inside the calculus language.  Otherwise the
    path (child indices from the root) to the first failing node plus the
    violation."""
    stack: list[tuple[ProofTree, tuple[int, ...]]] = [(t, ())]
    while stack:
        node, path = stack.pop()
        if isinstance(node, Hypothesis):
            if not calc.allow_hypotheses:
                return path, "hypothesis leaves are not allowed in this calculus"
            if calc.lstar_only and not node.sequent.is_lstar():
                return path, "Heyting implication is outside the calculus language"
            continue
        err = check_instance(node.sequent, node.inst, [c.sequent for c in node.children], calc)
        if err is not None:
            return path, err
        for i, c in enumerate(node.children):
            stack.append((c, path + (i,)))
    return None


def endsequent(t: ProofTree) -> Sequent:
    return t.sequent


# ---------------------------------------------------------------------------
# Smart constructors.  Each computes the conclusion from the premises and the
# instance data, raising ProofError when shapes do not line up, so the
# transformation code cannot silently drift from the rule schemas.


def mk_idp(p: Union[str, Atom]) -> Node:
    a = Atom(p) if isinstance(p, str) else p
    return Node(Sequent.make([a], a), RuleInstance(Rule.IDP), ())


def mk_id(f: Formula) -> Node:
    return Node(Sequent.make([f], f), RuleInstance(Rule.ID), ())


def mk_lbot() -> Node:
    return Node(Sequent.make([Bot()]), RuleInstance(Rule.LBOT), ())


def mk_rtop() -> Node:
    return Node(Sequent.make([], Top()), RuleInstance(Rule.RTOP), ())


def mk_lw(child: ProofTree, intro) -> ProofTree:
    """LW; a no-op (returns the child) when intro is empty."""
    intro = intro if isinstance(intro, Multiset) else Multiset(intro)
    if not len(intro):
        return child
    s = child.sequent
    return Node(Sequent(s.ant.union(intro), s.suc), RuleInstance(Rule.LW, intro=intro), (child,))


def mk_lw1(child: ProofTree, f: Formula) -> Node:
    s = child.sequent
    return Node(
        Sequent(s.ant.add(f), s.suc),
        RuleInstance(Rule.LW1, intro=Multiset([f])),
        (child,),
    )


def mk_lw1_many(child: ProofTree, intro) -> ProofTree:
    for f in intro:
        child = mk_lw1(child, f)
    return child


def mk_rw(child: ProofTree, f: Formula) -> Node:
    s = child.sequent
    if s.suc:
        raise ProofError("Rw needs an empty-succedent premise")
    return Node(Sequent(s.ant, (f,)), RuleInstance(Rule.RW, intro=Multiset([f])), (child,))


def mk_lc(child: ProofTree, f: Formula) -> Node:
    s = child.sequent
    if s.ant.count(f) < 2:
        raise ProofError("Lc premise needs two copies of the contracted formula")
    return Node(Sequent(s.ant.remove(f), s.suc), RuleInstance(Rule.LC, principal=f), (child,))


def mk_cut(left: ProofTree, right: ProofTree, cut_formula: Formula, n: int = 0) -> Node:
    ls, rs = left.sequent, right.sequent
    if ls.suc != (cut_formula,):
        raise ProofError("left cut premise must conclude the cut formula")
    na = nabla_n(cut_formula, n)
    if na not in rs.ant:
        raise ProofError("right cut premise lacks nabla^n of the cut formula")
    conclusion = Sequent(rs.ant.remove(na).union(nabla_n(g, n) for g in ls.ant), rs.suc)
    inst = RuleInstance(Rule.CUT, cut_formula=cut_formula, cut_exponent=n)
    return Node(conclusion, inst, (left, right))


def mk_land_n(child: ProofTree, n: int, a: Formula, b: Formula) -> Node:
    principal = nabla_n(And(a, b), n)
    s = child.sequent
    gamma = s.ant.difference([nabla_n(a, n), nabla_n(b, n)])
    return Node(
        Sequent(gamma.add(principal), s.suc),
        RuleInstance(Rule.LAND_N, n=n, principal=principal),
        (child,),
    )


def mk_lor_n(c1: ProofTree, c2: ProofTree, n: int, a: Formula, b: Formula) -> Node:
    principal = nabla_n(Or(a, b), n)
    s1, s2 = c1.sequent, c2.sequent
    gamma = s1.ant.remove(nabla_n(a, n))
    if s2 != Sequent(gamma.add(nabla_n(b, n)), s1.suc):
        raise ProofError("LOrN premises must share the context and succedent")
    return Node(
        Sequent(gamma.add(principal), s1.suc),
        RuleInstance(Rule.LOR_N, n=n, principal=principal),
        (c1, c2),
    )


def mk_ldynimp_n(c1: ProofTree, c2: ProofTree, n: int, a: Formula, b: Formula) -> Node:
    principal = nabla_n(DynImp(a, b), n + 1)
    s1, s2 = c1.sequent, c2.sequent
    if s1.suc != (nabla_n(a, n),) or principal not in s1.ant:
        raise ProofError("first LDynImpN premise must retain the principal and prove nabla^n A")
    if s2.ant != s1.ant.add(nabla_n(b, n)):
        raise ProofError("second LDynImpN premise must add nabla^n B to the first's antecedent")
    return Node(
        Sequent(s1.ant, s2.suc),
        RuleInstance(Rule.LDYNIMP_N, n=n, principal=principal),
        (c1, c2),
    )


def mk_lheytimp_n(c1: ProofTree, c2: ProofTree, n: int, a: Formula, b: Formula) -> Node:
    principal = nabla_n(HeytImp(a, b), n)
    s1, s2 = c1.sequent, c2.sequent
    if s1.suc != (nabla_n(a, n),) or principal not in s1.ant:
        raise ProofError("first LHeytImpN premise must retain the principal and prove nabla^n A")
    gamma = s1.ant.remove(principal)
    if s2.ant != gamma.add(nabla_n(b, n)):
        raise ProofError("second LHeytImpN premise must be Gamma, nabla^n B")
    return Node(
        Sequent(s1.ant, s2.suc),
        RuleInstance(Rule.LHEYTIMP_N, n=n, principal=principal),
        (c1, c2),
    )


def mk_rand(c1: ProofTree, c2: ProofTree) -> Node:
    s1, s2 = c1.sequent, c2.sequent
    if s1.ant != s2.ant or not s1.suc or not s2.suc:
        raise ProofError("RAnd premises must share the antecedent and both conclude")
    principal = And(s1.suc[0], s2.suc[0])
    return Node(
        Sequent(s1.ant, (principal,)),
        RuleInstance(Rule.RAND, principal=principal),
        (c1, c2),
    )


def mk_ror1(child: ProofTree, b: Formula) -> Node:
    s = child.sequent
    if not s.suc:
        raise ProofError("ROr1 premise must conclude the left disjunct")
    principal = Or(s.suc[0], b)
    return Node(Sequent(s.ant, (principal,)), RuleInstance(Rule.ROR1, principal=principal), (child,))


def mk_ror2(child: ProofTree, a: Formula) -> Node:
    s = child.sequent
    if not s.suc:
        raise ProofError("ROr2 premise must conclude the right disjunct")
    principal = Or(a, s.suc[0])
    return Node(Sequent(s.ant, (principal,)), RuleInstance(Rule.ROR2, principal=principal), (child,))


def mk_rdynimp(child: ProofTree, a: Formula) -> Node:
    """R->: premise #Gamma, a |- b yields Gamma |- a -> b."""
    s = child.sequent
    if not s.suc:
        raise ProofError("RDynImp premise must have a succedent")
    rest = s.ant.remove(a)
    if any(not isinstance(f, Nabla) for f in rest):
        raise ProofError("RDynImp context must be entirely nabla-wrapped")
    principal = DynImp(a, s.suc[0])
    gamma = Multiset(f.body for f in rest)
    return Node(Sequent(gamma, (principal,)), RuleInstance(Rule.RDYNIMP, principal=principal), (child,))


def mk_rheytimp(child: ProofTree, a: Formula) -> Node:
    s = child.sequent
    if not s.suc:
        raise ProofError("RHeytImp premise must have a succedent")
    principal = HeytImp(a, s.suc[0])
    return Node(
        Sequent(s.ant.remove(a), (principal,)),
        RuleInstance(Rule.RHEYTIMP, principal=principal),
        (child,),
    )


def mk_n(child: ProofTree) -> Node:
    s = child.sequent
    return Node(
        Sequent(s.ant.map_nabla(), (Nabla(s.suc[0]),) if s.suc else ()),
        RuleInstance(Rule.N),
        (child,),
    )


def mk_n_times(child: ProofTree, k: int) -> ProofTree:
    for _ in range(k):
        child = mk_n(child)
    return child


def mk_land1(child: ProofTree, a: Formula, b: Formula) -> Node:
    principal = And(a, b)
    s = child.sequent
    return Node(
        Sequent(s.ant.remove(a).add(principal), s.suc),
        RuleInstance(Rule.LAND1, principal=principal),
        (child,),
    )


def mk_land2(child: ProofTree, a: Formula, b: Formula) -> Node:
    principal = And(a, b)
    s = child.sequent
    return Node(
        Sequent(s.ant.remove(b).add(principal), s.suc),
        RuleInstance(Rule.LAND2, principal=principal),
        (child,),
    )


def mk_lor(c1: ProofTree, c2: ProofTree, a: Formula, b: Formula) -> Node:
    principal = Or(a, b)
    s1, s2 = c1.sequent, c2.sequent
    gamma = s1.ant.remove(a)
    if s2 != Sequent(gamma.add(b), s1.suc):
        raise ProofError("LOr premises must share the context and succedent")
    return Node(
        Sequent(gamma.add(principal), s1.suc),
        RuleInstance(Rule.LOR, principal=principal),
        (c1, c2),
    )


def mk_ldynimp(c1: ProofTree, c2: ProofTree, a: Formula, b: Formula) -> Node:
    principal = Nabla(DynImp(a, b))
    s1, s2 = c1.sequent, c2.sequent
    if s1.suc != (a,):
        raise ProofError("first LDynImp premise must conclude A")
    if s2.ant != s1.ant.add(b):
        raise ProofError("second LDynImp premise must be Gamma, B |- Delta")
    return Node(
        Sequent(s1.ant.add(principal), s2.suc),
        RuleInstance(Rule.LDYNIMP, principal=principal),
        (c1, c2),
    )


def mk_lheytimp(c1: ProofTree, c2: ProofTree, a: Formula, b: Formula) -> Node:
    principal = HeytImp(a, b)
    s1, s2 = c1.sequent, c2.sequent
    if s1.suc != (a,):
        raise ProofError("first LHeytImp premise must conclude A")
    if s2.ant != s1.ant.add(b):
        raise ProofError("second LHeytImp premise must be Gamma, B |- Delta")
    return Node(
        Sequent(s1.ant.add(principal), s2.suc),
        RuleInstance(Rule.LHEYTIMP, principal=principal),
        (c1, c2),
    )


# ---------------------------------------------------------------------------
# Backward rule enumeration


def applicable_instances(goal: Sequent, calc: CalculusId) -> list[tuple[RuleInstance, list[Sequent]]]:
    """All backward rule applications at goal, in the fixed search order:
    axioms, invertible left rules, right rules, the implication left rules,
    N, LW (one removal at a time), Rw.  Cut and Lc are never enumerated."""
    return list(iter_applicable(goal, calc))


def iter_applicable(goal: Sequent, calc: CalculusId):
    """Lazy form of applicable_instances (the search hot path)."""
    return _enumerate_stl(goal, calc) if calc.is_stl else _enumerate_ikd(goal, calc)


def _enumerate_ikd(goal: Sequent, calc: CalculusId):
    ant, suc = goal.ant, goal.suc
    heyt = not calc.lstar_only

    # axioms
    if len(ant) == 1 and isinstance(ant.items[0], Atom) and suc == ant.items:
        yield RuleInstance(Rule.IDP), []
    if ant.items == (Bot(),) and not suc:
        yield RuleInstance(Rule.LBOT), []
    if not len(ant) and suc == (Top(),):
        yield RuleInstance(Rule.RTOP), []

    stripped = [(f, strip_nabla(f)) for f in ant.distinct()]

    for f, pre in stripped:
        if isinstance(pre.core, And):
            gamma = ant.remove(f)
            a, b = nabla_n(pre.core.left, pre.depth), nabla_n(pre.core.right, pre.depth)
            yield (
                RuleInstance(Rule.LAND_N, n=pre.depth, principal=f),
                [Sequent(gamma.add(a, b), suc)],
            )
    for f, pre in stripped:
        if isinstance(pre.core, Or):
            gamma = ant.remove(f)
            a, b = nabla_n(pre.core.left, pre.depth), nabla_n(pre.core.right, pre.depth)
            yield (
                RuleInstance(Rule.LOR_N, n=pre.depth, principal=f),
                [Sequent(gamma.add(a), suc), Sequent(gamma.add(b), suc)],
            )

    if suc:
        head = suc[0]
        if isinstance(head, And):
            yield (
                RuleInstance(Rule.RAND, principal=head),
                [Sequent(ant, (head.left,)), Sequent(ant, (head.right,))],
            )
        elif isinstance(head, Or):
            yield RuleInstance(Rule.ROR1, principal=head), [Sequent(ant, (head.left,))]
            yield RuleInstance(Rule.ROR2, principal=head), [Sequent(ant, (head.right,))]
        elif isinstance(head, DynImp):
            yield (
                RuleInstance(Rule.RDYNIMP, principal=head),
                [Sequent(ant.map_nabla().add(head.left), (head.right,))],
            )
        elif heyt and isinstance(head, HeytImp):
            yield (
                RuleInstance(Rule.RHEYTIMP, principal=head),
                [Sequent(ant.add(head.left), (head.right,))],
            )

    for f, pre in stripped:
        if isinstance(pre.core, DynImp) and pre.depth >= 1:
            n = pre.depth - 1
            a, b = nabla_n(pre.core.left, n), nabla_n(pre.core.right, n)
            yield (
                RuleInstance(Rule.LDYNIMP_N, n=n, principal=f),
                [Sequent(ant, (a,)), Sequent(ant.add(b), suc)],
            )
    if heyt:
        for f, pre in stripped:
            if isinstance(pre.core, HeytImp):
                n = pre.depth
                gamma = ant.remove(f)
                a, b = nabla_n(pre.core.left, n), nabla_n(pre.core.right, n)
                yield (
                    RuleInstance(Rule.LHEYTIMP_N, n=n, principal=f),
                    [Sequent(ant, (a,)), Sequent(gamma.add(b), suc)],
                )

    if all(isinstance(f, Nabla) for f in ant) and (not suc or isinstance(suc[0], Nabla)):
        inner = Sequent(Multiset(f.body for f in ant), (suc[0].body,) if suc else ())
        yield RuleInstance(Rule.N), [inner]

    for f in ant.distinct():
        yield RuleInstance(Rule.LW, intro=Multiset([f])), [Sequent(ant.remove(f), suc)]

    if suc:
        yield RuleInstance(Rule.RW, intro=Multiset([suc[0]])), [Sequent(ant, ())]


def _enumerate_stl(goal: Sequent, calc: CalculusId):
    ant, suc = goal.ant, goal.suc
    heyt = not calc.lstar_only

    if len(ant) == 1 and suc == ant.items:
        yield RuleInstance(Rule.ID), []
    if ant.items == (Bot(),) and not suc:
        yield RuleInstance(Rule.LBOT), []
    if not len(ant) and suc == (Top(),):
        yield RuleInstance(Rule.RTOP), []

    for f in ant.distinct():
        gamma = ant.remove(f)
        if isinstance(f, And):
            yield RuleInstance(Rule.LAND1, principal=f), [Sequent(gamma.add(f.left), suc)]
            yield RuleInstance(Rule.LAND2, principal=f), [Sequent(gamma.add(f.right), suc)]
        elif isinstance(f, Or):
            yield (
                RuleInstance(Rule.LOR, principal=f),
                [Sequent(gamma.add(f.left), suc), Sequent(gamma.add(f.right), suc)],
            )

    if suc:
        head = suc[0]
        if isinstance(head, And):
            yield (
                RuleInstance(Rule.RAND, principal=head),
                [Sequent(ant, (head.left,)), Sequent(ant, (head.right,))],
            )
        elif isinstance(head, Or):
            yield RuleInstance(Rule.ROR1, principal=head), [Sequent(ant, (head.left,))]
            yield RuleInstance(Rule.ROR2, principal=head), [Sequent(ant, (head.right,))]
        elif isinstance(head, DynImp):
            yield (
                RuleInstance(Rule.RDYNIMP, principal=head),
                [Sequent(ant.map_nabla().add(head.left), (head.right,))],
            )
        elif heyt and isinstance(head, HeytImp):
            yield (
                RuleInstance(Rule.RHEYTIMP, principal=head),
                [Sequent(ant.add(head.left), (head.right,))],
            )

    for f in ant.distinct():
        gamma = ant.remove(f)
        if isinstance(f, Nabla) and isinstance(f.body, DynImp):
            imp = f.body
            yield (
                RuleInstance(Rule.LDYNIMP, principal=f),
                [Sequent(gamma, (imp.left,)), Sequent(gamma.add(imp.right), suc)],
            )
        elif heyt and isinstance(f, HeytImp):
            yield (
                RuleInstance(Rule.LHEYTIMP, principal=f),
                [Sequent(gamma, (f.left,)), Sequent(gamma.add(f.right), suc)],
            )

    if all(isinstance(f, Nabla) for f in ant) and (not suc or isinstance(suc[0], Nabla)):
        inner = Sequent(Multiset(f.body for f in ant), (suc[0].body,) if suc else ())
        yield RuleInstance(Rule.N), [inner]

    for f in ant.distinct():
        yield RuleInstance(Rule.LW1, intro=Multiset([f])), [Sequent(ant.remove(f), suc)]

    if suc:
        yield RuleInstance(Rule.RW, intro=Multiset([suc[0]])), [Sequent(ant, ())]


# ---------------------------------------------------------------------------
# Derived proofs (cut-free calculi)


def identity(a: Formula) -> ProofTree:
    """Proof of a |- a, by structural recursion."""
    if isinstance(a, Atom):
        return mk_idp(a)
    if isinstance(a, Bot):
        return mk_rw(mk_lbot(), a)
    if isinstance(a, Top):
        return mk_lw(mk_rtop(), [a])
    if isinstance(a, Nabla):
        return mk_n(identity(a.body))
    if isinstance(a, And):
        left = mk_lw(identity(a.left), [a.right])
        right = mk_lw(identity(a.right), [a.left])
        return mk_land_n(mk_rand(left, right), 0, a.left, a.right)
    if isinstance(a, Or):
        left = mk_ror1(identity(a.left), a.right)
        right = mk_ror2(identity(a.right), a.left)
        return mk_lor_n(left, right, 0, a.left, a.right)
    if isinstance(a, DynImp):
        wrapped = Nabla(a)
        p1 = mk_lw(identity(a.left), [wrapped])
        p2 = mk_lw(identity(a.right), [wrapped, a.left])
        return mk_rdynimp(mk_ldynimp_n(p1, p2, 0, a.left, a.right), a.left)
    if isinstance(a, HeytImp):
        p1 = mk_lw(identity(a.left), [a])
        p2 = mk_lw(identity(a.right), [a.left])
        return mk_rheytimp(mk_lheytimp_n(p1, p2, 0, a.left, a.right), a.left)
    raise AssertionError(a)  # pragma: no cover


def mp(a: Formula, b: Formula) -> ProofTree:
    """Proof of a, #(a -> b) |- b."""
    wrapped = Nabla(DynImp(a, b))
    p1 = mk_lw(identity(a), [wrapped])
    p2 = mk_lw(identity(b), [wrapped, a])
    return mk_ldynimp_n(p1, p2, 0, a, b)


def nabla_box_left(t: ProofTree, a: Formula) -> ProofTree:
    """From Gamma, a |- Delta build Gamma, #!a |- Delta."""
    s = t.sequent
    if a not in s.ant:
        raise ProofError("nabla_box_left: formula not in the antecedent")
    gamma = s.ant.remove(a)
    wrapped = Nabla(DynImp(Top(), a))  # #!a
    p1 = mk_lw(mk_rtop(), gamma.add(wrapped))
    p2 = mk_lw(t, [wrapped])
    return mk_ldynimp_n(p1, p2, 0, Top(), a)


def box_mono(t: ProofTree) -> ProofTree:
    """From Gamma |- a build !Gamma |- !a."""
    s = t.sequent
    if not s.suc:
        raise ProofError("box_mono needs a succedent")
    result = t
    for g in list(s.ant):
        result = nabla_box_left(result, g)
    result = mk_lw(result, [Top()])
    return mk_rdynimp(result, Top())


def abstraction(t: ProofTree, sigma: Multiset, a: Formula) -> ProofTree:
    """From #Gamma, Sigma, a |- b build Gamma, !Sigma |- a -> b."""
    s = t.sequent
    if not s.suc:
        raise ProofError("abstraction needs a succedent")
    if not s.ant.contains_all(list(sigma) + [a]):
        raise ProofError("abstraction: sigma and the hypothesis must occur in the antecedent")
    result = t
    for g in sigma:
        result = nabla_box_left(result, g)
    return mk_rdynimp(result, a)


DERIVED_KINDS = ("identity", "mp", "nabla_box_left", "box_mono", "abstraction")


def derived_proof(kind: str, *args) -> ProofTree:
    """Dispatcher over the derived-proof constructors."""
    table = {
        "identity": identity,
        "mp": mp,
        "nabla_box_left": nabla_box_left,
        "box_mono": box_mono,
        "abstraction": abstraction,
    }
    if kind not in table:
        raise ValueError(f"unknown derived proof kind {kind!r} (one of {DERIVED_KINDS})")
    return table[kind](*args)


# ---------------------------------------------------------------------------
# JSON proof format


def proof_to_json(t: ProofTree) -> dict:
    if isinstance(t, Hypothesis):
        return {"hypothesis": print_sequent(t.sequent)}
    out: dict = {"sequent": print_sequent(t.sequent), "rule": t.inst.rule.value}
    if t.inst.n is not None:
        out["n"] = t.inst.n
    if t.inst.principal is not None:
        out["principal"] = print_formula(t.inst.principal)
    if t.inst.intro is not None:
        out["intro"] = [print_formula(f) for f in t.inst.intro]
    if t.inst.cut_formula is not None:
        out["cut_formula"] = print_formula(t.inst.cut_formula)
    if t.inst.cut_exponent is not None:
        out["cut_exponent"] = t.inst.cut_exponent
    out["premises"] = [proof_to_json(c) for c in t.children]
    return out


def proof_from_json(data: dict) -> ProofTree:
    if "hypothesis" in data:
        return Hypothesis(parse_sequent(data["hypothesis"]))
    try:
        rule = Rule(data["rule"])
    except (KeyError, ValueError):
        raise ProofError(f"unknown or missing rule in proof node: {data.get('rule')!r}")
    inst = RuleInstance(
        rule,
        n=data.get("n"),
        principal=parse_formula(data["principal"]) if "principal" in data else None,
        intro=Multiset(parse_formula(f) for f in data["intro"]) if "intro" in data else None,
        cut_formula=parse_formula(data["cut_formula"]) if "cut_formula" in data else None,
        cut_exponent=data.get("cut_exponent"),
    )
    children = tuple(proof_from_json(c) for c in data.get("premises", []))
    return Node(parse_sequent(data["sequent"]), inst, children)
