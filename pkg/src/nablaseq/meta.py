"""Admissible-rule extractors and interpolation.

The Visser extractors walk a cut-free proof from the root; at each step the
endsequent's shape admits only structural rules, the left implication rules
on the guard formulas, or the rule introducing the succedent head, so the
recursion terminates in one of the theorem's verdicts with a carried proof.

Interpolation is the usual split-antecedent induction; the dynamic
implication cases rely on the Heyting implication, which is why the
construction does not apply to the implication-only fragment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Optional, Union

from .kernel import (
    CalculusId,
    Hypothesis,
    Node,
    ProofError,
    ProofTree,
    Rule,
    check_proof,
    identity,
    ikds,
    mk_idp,
    mk_land_n,
    mk_lbot,
    mk_ldynimp_n,
    mk_lheytimp_n,
    mk_lor_n,
    mk_lw,
    mk_n,
    mk_rand,
    mk_rdynimp,
    mk_rheytimp,
    mk_ror1,
    mk_ror2,
    mk_rtop,
    mk_rw,
    nabla_box_left,
)
from .search import Exhausted, Found, SearchBudget, SearchOutcome, prove
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
    atoms,
    is_lstar,
    nabla_n,
    print_formula,
    sequent_atoms,
    strip_nabla,
)
from .transform import DeductionResult, deduction_export, deduction_import


# ---------------------------------------------------------------------------
# Disjunction property


@dataclass(frozen=True)
class Left:
    proof: ProofTree


@dataclass(frozen=True)
class Right:
    proof: ProofTree


def split_disjunction(t: ProofTree) -> Union[Left, Right]:
    """From a proof of |- A | B extract a proof of one disjunct."""
    s = t.sequent
    if len(s.ant) or not s.suc or not isinstance(s.suc[0], Or):
        raise ProofError("split_disjunction needs an endsequent |- A | B")
    verdict = visser_disjunctive(t, VisserAntecedent((), ()))
    if isinstance(verdict, LeftDisjunct):
        return Left(verdict.proof)
    if isinstance(verdict, RightDisjunct):
        return Right(verdict.proof)
    raise ProofError("empty-antecedent extraction cannot yield a premise verdict")


# ---------------------------------------------------------------------------
# Visser's rules


@dataclass(frozen=True)
class VisserAntecedent:
    """Guards nabla^m(A => B) (heyting_parts) and nabla^n(C -> D) (dyn_parts)."""

    heyting_parts: tuple[tuple[int, Formula, Formula], ...]
    dyn_parts: tuple[tuple[int, Formula, Formula], ...]

    def part_formulas(self) -> list[Formula]:
        heyt = [nabla_n(HeytImp(a, b), m) for m, a, b in self.heyting_parts]
        dyn = [nabla_n(DynImp(c, d), n) for n, c, d in self.dyn_parts]
        return heyt + dyn

    def gamma(self) -> Multiset:
        return Multiset(self.part_formulas())

    def to_formula(self) -> Formula:
        parts = self.part_formulas()
        if not parts:
            return Top()
        return reduce(And, parts)


@dataclass(frozen=True)
class HeytingPremise:
    index: int
    proof: ProofTree


@dataclass(frozen=True)
class DynPremise:
    index: int
    proof: ProofTree


@dataclass(frozen=True)
class LeftDisjunct:
    proof: ProofTree


@dataclass(frozen=True)
class RightDisjunct:
    proof: ProofTree


@dataclass(frozen=True)
class Residual:
    heyting_indices: tuple[int, ...]
    dyn_indices: tuple[int, ...]
    proof: ProofTree


VisserVerdict = Union[HeytingPremise, DynPremise, LeftDisjunct, RightDisjunct, Residual]


def _check_gamma(t: ProofTree, x: VisserAntecedent) -> None:
    if t.sequent.ant != x.gamma():
        raise ProofError("proof antecedent does not match the guard multiset")


def _node(t: ProofTree) -> Node:
    if isinstance(t, Hypothesis):
        raise ProofError("extractors need hypothesis-free proofs")
    if t.inst.rule is Rule.CUT:
        raise ProofError("extractors need cut-free proofs")
    return t


def _match_parts(x: VisserAntecedent, remaining: Multiset) -> tuple[VisserAntecedent, list[int], list[int]]:
    """Restrict x to a sub-multiset of its guard formulas (after LW), keeping
    the mapping back to original part indices."""
    pool = list(remaining)
    heyt_keep: list[int] = []
    dyn_keep: list[int] = []
    for i, (m, a, b) in enumerate(x.heyting_parts):
        f = nabla_n(HeytImp(a, b), m)
        if f in pool:
            pool.remove(f)
            heyt_keep.append(i)
    for j, (n, c, d) in enumerate(x.dyn_parts):
        f = nabla_n(DynImp(c, d), n)
        if f in pool:
            pool.remove(f)
            dyn_keep.append(j)
    if pool:
        raise ProofError("premise antecedent is not a sub-multiset of the guards")
    sub = VisserAntecedent(
        tuple(x.heyting_parts[i] for i in heyt_keep),
        tuple(x.dyn_parts[j] for j in dyn_keep),
    )
    return sub, heyt_keep, dyn_keep


def _relabel(verdict: VisserVerdict, heyt_keep: list[int], dyn_keep: list[int], widen: Multiset) -> VisserVerdict:
    """Map a sub-instance verdict back to the original indices, weakening the
    carried proof where its endsequent mentions the full guard multiset."""
    if isinstance(verdict, HeytingPremise):
        return HeytingPremise(heyt_keep[verdict.index], mk_lw(verdict.proof, widen))
    if isinstance(verdict, DynPremise):
        return DynPremise(dyn_keep[verdict.index], mk_lw(verdict.proof, widen))
    if isinstance(verdict, LeftDisjunct):
        return LeftDisjunct(mk_lw(verdict.proof, widen))
    if isinstance(verdict, RightDisjunct):
        return RightDisjunct(mk_lw(verdict.proof, widen))
    return Residual(
        tuple(heyt_keep[i] for i in verdict.heyting_indices),
        tuple(dyn_keep[j] for j in verdict.dyn_indices),
        verdict.proof,  # residual endsequents never mention the dropped guards
    )


def _principal_part(x: VisserAntecedent, principal: Formula, rule: Rule) -> int:
    if rule is Rule.LHEYTIMP_N:
        for i, (m, a, b) in enumerate(x.heyting_parts):
            if nabla_n(HeytImp(a, b), m) == principal:
                return i
    else:
        for j, (n, c, d) in enumerate(x.dyn_parts):
            if nabla_n(DynImp(c, d), n) == principal:
                return j
    raise ProofError("principal formula is not one of the guards")


def _rw_fallback(x: VisserAntecedent, child: ProofTree, head: Formula) -> VisserVerdict:
    """An Rw ending proves the guards inconsistent; answer with any premise
    verdict (or the bare residual when there are no guards at all)."""
    if x.heyting_parts:
        m, a, _ = x.heyting_parts[0]
        return HeytingPremise(0, mk_rw(child, nabla_n(a, m)))
    for j, (n, c, _) in enumerate(x.dyn_parts):
        if n >= 1:
            return DynPremise(j, mk_rw(child, nabla_n(c, n - 1)))
    if not x.dyn_parts:
        # empty guard: |- is provable only never; kept for totality
        if isinstance(head, Or):
            return LeftDisjunct(mk_rw(child, head.left))
        raise ProofError("cannot discharge an Rw ending without guards")
    raise ProofError("an Rw ending with exponent-0 dynamic guards is impossible")


def visser_disjunctive(t: ProofTree, x: VisserAntecedent) -> VisserVerdict:
    """Decompose a proof of Gamma_X |- E | F per the disjunctive rule family."""
    _check_gamma(t, x)
    s = t.sequent
    if not s.suc or not isinstance(s.suc[0], Or):
        raise ProofError("disjunctive extraction needs an E | F succedent")
    return _visser(t, x, ("disj", s.suc[0]))


def visser_implicative(t: ProofTree, x: VisserAntecedent, k: int) -> VisserVerdict:
    """Decompose a proof of Gamma_X |- nabla^k(E -> F)."""
    _check_gamma(t, x)
    head = _peel_head(t, k, DynImp)
    return _visser(t, x, ("imp", head, k))


def visser_heyting(t: ProofTree, x: VisserAntecedent, k: int) -> VisserVerdict:
    """Decompose a proof of Gamma_X |- nabla^k(E => F)."""
    _check_gamma(t, x)
    head = _peel_head(t, k, HeytImp)
    return _visser(t, x, ("heyt", head, k))


def _peel_head(t: ProofTree, k: int, shape) -> Formula:
    s = t.sequent
    if not s.suc:
        raise ProofError("extraction needs a succedent")
    core = s.suc[0]
    for _ in range(k):
        if not isinstance(core, Nabla):
            raise ProofError("succedent does not carry the stated nabla exponent")
        core = core.body
    if not isinstance(core, shape):
        raise ProofError(f"succedent core must be a {shape.__name__}")
    return core


def _visser(t: ProofTree, x: VisserAntecedent, mode: tuple) -> VisserVerdict:
    node = _node(t)
    rule = node.inst.rule

    if rule is Rule.LW:
        child = node.children[0]
        sub, heyt_keep, dyn_keep = _match_parts(x, child.sequent.ant)
        verdict = _visser(child, sub, mode)
        return _relabel(verdict, heyt_keep, dyn_keep, node.inst.intro)

    if rule is Rule.RW:
        head = mode[1]
        if mode[0] == "disj":
            return LeftDisjunct(mk_rw(node.children[0], head.left))
        return _rw_fallback(x, node.children[0], head)

    if rule is Rule.LHEYTIMP_N:
        i = _principal_part(x, node.inst.principal, rule)
        return HeytingPremise(i, node.children[0])

    if rule is Rule.LDYNIMP_N:
        j = _principal_part(x, node.inst.principal, rule)
        return DynPremise(j, node.children[0])

    if mode[0] == "disj":
        if rule is Rule.ROR1:
            return LeftDisjunct(node.children[0])
        if rule is Rule.ROR2:
            return RightDisjunct(node.children[0])
        raise ProofError(f"rule {rule.value} cannot end a guarded disjunction proof")

    if mode[0] == "imp":
        k = mode[2]
        if rule is Rule.RDYNIMP and k == 0:
            return Residual(
                tuple(range(len(x.heyting_parts))),
                tuple(range(len(x.dyn_parts))),
                node.children[0],
            )
        if rule is Rule.N and k >= 1:
            sub = VisserAntecedent(
                tuple((m - 1, a, b) for m, a, b in x.heyting_parts),
                tuple((n - 1, c, d) for n, c, d in x.dyn_parts),
            )
            verdict = _visser(node.children[0], sub, ("imp", mode[1], k - 1))
            return _reapply_n(verdict)
        raise ProofError(f"rule {rule.value} cannot end a guarded implication proof")

    k = mode[2]
    if rule is Rule.RHEYTIMP and k == 0:
        return Residual(
            tuple(range(len(x.heyting_parts))),
            tuple(range(len(x.dyn_parts))),
            node.children[0],
        )
    if rule is Rule.N and k >= 1:
        sub = VisserAntecedent(
            tuple((m - 1, a, b) for m, a, b in x.heyting_parts),
            tuple((n - 1, c, d) for n, c, d in x.dyn_parts),
        )
        verdict = _visser(node.children[0], sub, ("heyt", mode[1], k - 1))
        return _reapply_n(verdict)
    raise ProofError(f"rule {rule.value} cannot end a guarded Heyting implication proof")


def _reapply_n(verdict: VisserVerdict) -> VisserVerdict:
    # premise verdicts are re-wrapped under N; residual exponents are stable
    if isinstance(verdict, HeytingPremise):
        return HeytingPremise(verdict.index, mk_n(verdict.proof))
    if isinstance(verdict, DynPremise):
        return DynPremise(verdict.index, mk_n(verdict.proof))
    if isinstance(verdict, Residual):
        return verdict
    raise ProofError("disjunct verdicts cannot arise under N")


def visser_star(
    mode: str,
    t: ProofTree,
    x: VisserAntecedent,
    k: Optional[int] = None,
) -> VisserVerdict:
    """The implication-only variants: delegate to the full-language extractor
    and certify the carried proof in the restricted calculus."""
    if x.heyting_parts:
        raise ProofError("the restricted rules take dynamic-implication guards only")
    for f in list(t.sequent.all_formulas()):
        if not is_lstar(f):
            raise ProofError("Heyting implication is outside the restricted language")
    if mode == "disj":
        verdict = visser_disjunctive(t, x)
    elif mode == "imp":
        verdict = visser_implicative(t, x, k or 0)
    else:
        raise ValueError("visser_star mode is 'disj' or 'imp'")
    err = check_proof(verdict.proof, ikds())
    if err is not None:
        raise ProofError(f"extracted proof leaves the restricted calculus: {err[1]}")
    return verdict


# ---------------------------------------------------------------------------
# Maehara interpolation


@dataclass(frozen=True)
class InterpolationResult:
    interpolant: Formula
    left_proof: ProofTree
    right_proof: ProofTree
    trace: tuple[str, ...] = field(compare=False, default=())


def interpolate(t: ProofTree, gamma1: Multiset) -> InterpolationResult:
    """Maehara interpolant for a cut-free proof of Gamma1, Gamma2 |- Delta.

    gamma1 selects the antecedent occurrences forming the left part; the
    result carries checking proofs of Gamma1 |- C and Gamma2, C |- Delta with
    atoms(C) inside atoms(Gamma1) n atoms(Gamma2 u Delta).
    """
    if not t.sequent.ant.contains_all(gamma1):
        raise ProofError("gamma1 must be a sub-multiset of the endsequent antecedent")
    trace: list[str] = []
    c, left, right = _interp(t, gamma1, trace)
    return InterpolationResult(c, left, right, tuple(trace))


def _interp(t: ProofTree, g1: Multiset, trace: list[str]) -> tuple[Formula, ProofTree, ProofTree]:
    node = _node(t)
    rule = node.inst.rule
    s = node.sequent
    g2 = s.ant.difference(g1)

    if rule is Rule.IDP:
        p = s.ant.items[0]
        if p in g1:
            trace.append("IdP:g1")
            return p, mk_idp(p), mk_idp(p)
        trace.append("IdP:g2")
        return Top(), mk_rtop(), mk_lw(mk_idp(p), [Top()])

    if rule is Rule.LBOT:
        if Bot() in g1:
            trace.append("LBot:g1")
            return Bot(), mk_rw(mk_lbot(), Bot()), mk_lbot()
        trace.append("LBot:g2")
        return Top(), mk_rtop(), mk_lw(mk_lbot(), [Top()])

    if rule is Rule.RTOP:
        trace.append("RTop")
        return Top(), mk_rtop(), mk_lw(mk_rtop(), [Top()])

    if rule is Rule.LW:
        child = node.children[0]
        g1_child = _restrict(g1, child.sequent.ant)
        sigma1 = g1.difference(g1_child)
        sigma2 = node.inst.intro.difference(sigma1)
        trace.append("LW")
        c, left, right = _interp(child, g1_child, trace)
        return c, mk_lw(left, sigma1), mk_lw(right, sigma2)

    if rule is Rule.RW:
        trace.append("Rw")
        c, left, right = _interp(node.children[0], g1, trace)
        return c, left, mk_rw(right, node.inst.intro.items[0])

    if rule is Rule.RAND:
        trace.append("RAnd")
        d, l1, r1 = _interp(node.children[0], g1, trace)
        e, l2, r2 = _interp(node.children[1], g1, trace)
        c = And(d, e)
        right1 = mk_land_n(mk_lw(r1, [e]), 0, d, e)
        right2 = mk_land_n(mk_lw(r2, [d]), 0, d, e)
        return c, mk_rand(l1, l2), mk_rand(right1, right2)

    if rule is Rule.ROR1:
        trace.append("ROr1")
        c, left, right = _interp(node.children[0], g1, trace)
        return c, left, mk_ror1(right, node.inst.principal.right)

    if rule is Rule.ROR2:
        trace.append("ROr2")
        c, left, right = _interp(node.children[0], g1, trace)
        return c, left, mk_ror2(right, node.inst.principal.left)

    if rule is Rule.N:
        trace.append("N")
        g1_child = Multiset(f.body for f in g1)
        c, left, right = _interp(node.children[0], g1_child, trace)
        return Nabla(c), mk_n(left), mk_n(right)

    if rule is Rule.RDYNIMP:
        trace.append("R->")
        imp = node.inst.principal
        c, left, right = _interp(node.children[0], g1.map_nabla(), trace)
        boxed = DynImp(Top(), c)
        new_left = mk_rdynimp(mk_lw(left, [Top()]), Top())
        new_right = mk_rdynimp(nabla_box_left(right, c), imp.left)
        return boxed, new_left, new_right

    if rule is Rule.RHEYTIMP:
        trace.append("R=>")
        imp = node.inst.principal
        c, left, right = _interp(node.children[0], g1, trace)
        return c, left, mk_rheytimp(right, imp.left)

    principal = node.inst.principal
    n = node.inst.n
    core = strip_nabla(principal).core
    on_left = principal in g1

    if rule is Rule.LAND_N:
        trace.append("LAnd:g1" if on_left else "LAnd:g2")
        xa, xb = nabla_n(core.left, n), nabla_n(core.right, n)
        child = node.children[0]
        if on_left:
            g1_child = g1.remove(principal).add(xa, xb)
            c, left, right = _interp(child, g1_child, trace)
            return c, mk_land_n(left, n, core.left, core.right), right
        c, left, right = _interp(child, g1, trace)
        return c, left, mk_land_n(right, n, core.left, core.right)

    if rule is Rule.LOR_N:
        xa, xb = nabla_n(core.left, n), nabla_n(core.right, n)
        if on_left:
            trace.append("LOr:g1")
            gbase = g1.remove(principal)
            d, l1, r1 = _interp(node.children[0], gbase.add(xa), trace)
            e, l2, r2 = _interp(node.children[1], gbase.add(xb), trace)
            c = Or(d, e)
            left = mk_lor_n(mk_ror1(l1, e), mk_ror2(l2, d), n, core.left, core.right)
            right = mk_lor_n(r1, r2, 0, d, e)
            return c, left, right
        trace.append("LOr:g2")
        d, l1, r1 = _interp(node.children[0], g1, trace)
        e, l2, r2 = _interp(node.children[1], g1, trace)
        c = And(d, e)
        right1 = mk_land_n(mk_lw(r1, [e]), 0, d, e)
        right2 = mk_land_n(mk_lw(r2, [d]), 0, d, e)
        return c, mk_rand(l1, l2), mk_lor_n(right1, right2, n, core.left, core.right)

    if rule is Rule.LDYNIMP_N:
        xa, xb = nabla_n(core.left, n), nabla_n(core.right, n)
        if on_left:
            # first premise interpolates with the split reversed
            trace.append("L->:g1")
            d, dl, dr = _interp(node.children[0], g2, trace)
            e, el, er = _interp(node.children[1], g1.add(xb), trace)
            c = HeytImp(d, e)
            body = mk_ldynimp_n(dr, mk_lw(el, [d]), n, core.left, core.right)
            left = mk_rheytimp(body, d)
            right = mk_lheytimp_n(mk_lw(dl, [c]), er, 0, d, e)
            return c, left, right
        trace.append("L->:g2")
        d, dl, dr = _interp(node.children[0], g1, trace)
        e, el, er = _interp(node.children[1], g1, trace)
        c = And(d, e)
        first = mk_land_n(mk_lw(dr, [e]), 0, d, e)
        second = mk_land_n(mk_lw(er, [d]), 0, d, e)
        right = mk_ldynimp_n(first, second, n, core.left, core.right)
        return c, mk_rand(dl, el), right

    if rule is Rule.LHEYTIMP_N:
        xa, xb = nabla_n(core.left, n), nabla_n(core.right, n)
        if on_left:
            trace.append("L=>:g1")
            d, dl, dr = _interp(node.children[0], g2, trace)
            e, el, er = _interp(node.children[1], g1.remove(principal).add(xb), trace)
            c = HeytImp(d, e)
            body = mk_lheytimp_n(dr, mk_lw(el, [d]), n, core.left, core.right)
            left = mk_rheytimp(body, d)
            right = mk_lheytimp_n(mk_lw(dl, [c]), er, 0, d, e)
            return c, left, right
        trace.append("L=>:g2")
        d, dl, dr = _interp(node.children[0], g1, trace)
        e, el, er = _interp(node.children[1], g1, trace)
        c = And(d, e)
        first = mk_land_n(mk_lw(dr, [e]), 0, d, e)
        second = mk_land_n(mk_lw(er, [d]), 0, d, e)
        right = mk_lheytimp_n(first, second, n, core.left, core.right)
        return c, mk_rand(dl, el), right

    raise ProofError(f"rule {rule.value} is not supported by interpolation")


def _restrict(g1: Multiset, child_ant: Multiset) -> Multiset:
    """Occurrences of g1 surviving into child_ant (duplicates weakened away
    are assigned to the weakening)."""
    kept = []
    pool = list(child_ant)
    for f in g1:
        if f in pool:
            pool.remove(f)
            kept.append(f)
    return Multiset(kept)


def verify_interpolation(
    t: ProofTree, gamma1: Multiset, result: InterpolationResult, calc: CalculusId
) -> list[str]:
    """Independent audit: both proofs check, endsequents are as stated, and
    the variable condition holds."""
    problems = []
    s = t.sequent
    g2 = s.ant.difference(gamma1)
    want_left = Sequent(gamma1, (result.interpolant,))
    want_right = Sequent(g2.add(result.interpolant), s.suc)
    if result.left_proof.sequent != want_left:
        problems.append("left endsequent mismatch")
    if result.right_proof.sequent != want_right:
        problems.append("right endsequent mismatch")
    for name, proof in (("left", result.left_proof), ("right", result.right_proof)):
        err = check_proof(proof, calc)
        if err is not None:
            problems.append(f"{name} proof fails: {err[1]}")
    allowed = sequent_atoms(gamma1) & sequent_atoms(list(g2) + list(s.suc))
    if not atoms(result.interpolant) <= allowed:
        problems.append("variable condition violated")
    return problems


def interpolate_formula(
    a: Formula, b: Formula, budget: SearchBudget = SearchBudget(), calc: Optional[CalculusId] = None
) -> Union[InterpolationResult, Exhausted]:
    """Search for a proof of a |- b, then interpolate with Gamma1 = {a}."""
    from .kernel import ikd as _ikd

    calc = calc or _ikd()
    outcome = prove(Sequent.make([a], b), calc, budget)
    if isinstance(outcome, Exhausted):
        return outcome
    return interpolate(outcome.proof, Multiset([a]))


@dataclass(frozen=True)
class DeductiveInterpolant:
    interpolant: Formula
    left_witness: ProofTree  # hypothesis proof of |- C from |- A
    right_witness: ProofTree  # hypothesis proof of |- B from |- C
    sigma: Multiset


def deductive_interpolant(a: Formula, b: Formula, t: ProofTree) -> DeductiveInterpolant:
    """From a hypothesis proof witnessing |- A entails |- B, produce C with
    |- A entails |- C, |- C entails |- B, and atoms(C) in atoms(A) n atoms(B)."""
    if t.sequent != Sequent.make([], b):
        raise ProofError("the hypothesis proof must conclude |- B")
    exported: DeductionResult = deduction_export(t, a)
    result = interpolate(exported.proof, exported.sigma)
    c = result.interpolant
    left_witness = deduction_import(a, exported.sigma, result.left_proof)
    right_witness = deduction_import(c, Multiset([c]), result.right_proof)
    return DeductiveInterpolant(c, left_witness, right_witness, exported.sigma)
