"""Executable proof transformations: height-preserving inversion and
contraction, generalized cut elimination, translations between the cut-free
and cut-ful calculi, and the deduction theorem.

Cut elimination recurses on the lexicographic (rank of cut formula, sum of
heights) measure; every recursive call asserts strict decrease and raises
InternalError on violation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

from .kernel import (
    Hypothesis,
    InternalError,
    Node,
    ProofError,
    ProofTree,
    Rule,
    RuleInstance,
    box_mono,
    abstraction,
    identity,
    iter_nodes,
    mk_cut,
    mk_id,
    mk_land1,
    mk_land2,
    mk_land_n,
    mk_lbot,
    mk_lc,
    mk_ldynimp,
    mk_ldynimp_n,
    mk_lheytimp,
    mk_lheytimp_n,
    mk_lor,
    mk_lor_n,
    mk_lw,
    mk_lw1,
    mk_lw1_many,
    mk_n,
    mk_n_times,
    mk_rand,
    mk_rdynimp,
    mk_rheytimp,
    mk_ror1,
    mk_ror2,
    mk_rtop,
    mk_rw,
)
from .syntax import (
    And,
    DynImp,
    HeytImp,
    Multiset,
    Nabla,
    Or,
    Sequent,
    Top,
    Formula,
    box,
    nabla_n,
    print_formula,
    rank,
    strip_nabla,
)

_LEFT_PRINCIPAL = {Rule.LAND_N, Rule.LOR_N, Rule.LDYNIMP_N, Rule.LHEYTIMP_N}
_RIGHT_PRINCIPAL = {Rule.RTOP, Rule.RAND, Rule.ROR1, Rule.ROR2, Rule.RDYNIMP, Rule.RHEYTIMP}


def _as_node(t: ProofTree, what: str) -> Node:
    if isinstance(t, Hypothesis):
        raise ProofError(f"{what} does not operate on hypothesis leaves")
    if t.inst.rule is Rule.CUT:
        raise ProofError(f"{what} requires a cut-free proof")
    if t.inst.rule not in _LEFT_PRINCIPAL | _RIGHT_PRINCIPAL | {
        Rule.IDP, Rule.LBOT, Rule.RTOP, Rule.LW, Rule.RW, Rule.N,
    }:
        raise ProofError(f"{what} operates on proofs of the cut-free calculi")
    return t


def _rebuild(t: Node, children: tuple[ProofTree, ...]) -> ProofTree:
    """Re-apply t's rule to transformed children (context changes only)."""
    r = t.inst.rule
    if r is Rule.LW:
        return mk_lw(children[0], t.inst.intro)
    if r is Rule.RW:
        return mk_rw(children[0], t.inst.intro.items[0])
    if r is Rule.N:
        return mk_n(children[0])
    if r in (Rule.LAND_N, Rule.LOR_N, Rule.LDYNIMP_N, Rule.LHEYTIMP_N):
        n = t.inst.n
        core = strip_nabla(t.inst.principal).core
        a, b = core.left, core.right
        maker = {
            Rule.LAND_N: lambda: mk_land_n(children[0], n, a, b),
            Rule.LOR_N: lambda: mk_lor_n(children[0], children[1], n, a, b),
            Rule.LDYNIMP_N: lambda: mk_ldynimp_n(children[0], children[1], n, a, b),
            Rule.LHEYTIMP_N: lambda: mk_lheytimp_n(children[0], children[1], n, a, b),
        }[r]
        return maker()
    if r is Rule.RAND:
        return mk_rand(children[0], children[1])
    if r is Rule.ROR1:
        return mk_ror1(children[0], t.inst.principal.right)
    if r is Rule.ROR2:
        return mk_ror2(children[0], t.inst.principal.left)
    if r is Rule.RDYNIMP:
        return mk_rdynimp(children[0], t.inst.principal.left)
    if r is Rule.RHEYTIMP:
        return mk_rheytimp(children[0], t.inst.principal.left)
    raise InternalError(f"cannot rebuild rule {r.value}")


# ---------------------------------------------------------------------------
# Inversion


def _invert_replacements(target: Formula, mode: str) -> list[Formula]:
    pre = strip_nabla(target)
    n, core = pre.depth, pre.core
    if mode == "and":
        return [nabla_n(core.left, n), nabla_n(core.right, n)]
    if mode == "or_left":
        return [nabla_n(core.left, n)]
    if mode == "or_right":
        return [nabla_n(core.right, n)]
    return [nabla_n(core.right, n)]  # heyt


def _invert1(t: ProofTree, target: Formula, mode: str) -> ProofTree:
    node = _as_node(t, "inversion")
    rule = node.inst.rule
    if rule in _LEFT_PRINCIPAL and node.inst.principal == target:
        if mode == "and":
            return node.children[0]
        if mode == "or_left":
            return node.children[0]
        if mode == "or_right":
            return node.children[1]
        return node.children[1]  # heyt: second premise is Gamma, nabla^n B |- Delta
    if rule is Rule.LW and target in node.inst.intro:
        intro = node.inst.intro.remove(target).union(_invert_replacements(target, mode))
        return mk_lw(node.children[0], intro)
    if rule is Rule.N:
        return mk_n(_invert1(node.children[0], target.body, mode))
    if rule is Rule.RDYNIMP:
        child = _invert1(node.children[0], Nabla(target), mode)
        return mk_rdynimp(child, node.inst.principal.left)
    if not node.children:
        raise InternalError("inversion target cannot occur in an axiom")
    return _rebuild(node, tuple(_invert1(c, target, mode) for c in node.children))


def _check_invertible(t: ProofTree, target: Formula, head) -> None:
    if target not in t.sequent.ant:
        raise ProofError("inversion target does not occur in the endsequent antecedent")
    if type(strip_nabla(target).core) is not head:
        raise ProofError(f"inversion target must be nabla^n applied to {head.__name__}")


def invert_and(t: ProofTree, target: Formula) -> ProofTree:
    """Gamma, nabla^n(A & B) |- Delta  into  Gamma, nabla^n A, nabla^n B |- Delta."""
    _check_invertible(t, target, And)
    out = _invert1(t, target, "and")
    if out.height > t.height:
        raise InternalError("inversion increased the proof height")
    return out


def invert_or(t: ProofTree, target: Formula) -> tuple[ProofTree, ProofTree]:
    """Gamma, nabla^n(A | B) |- Delta into the pair with nabla^n A / nabla^n B."""
    _check_invertible(t, target, Or)
    left = _invert1(t, target, "or_left")
    right = _invert1(t, target, "or_right")
    if max(left.height, right.height) > t.height:
        raise InternalError("inversion increased the proof height")
    return left, right


def invert_heyt(t: ProofTree, target: Formula) -> ProofTree:
    """Gamma, nabla^n(A => B) |- Delta  into  Gamma, nabla^n B |- Delta."""
    _check_invertible(t, target, HeytImp)
    out = _invert1(t, target, "heyt")
    if out.height > t.height:
        raise InternalError("inversion increased the proof height")
    return out


def invert(t: ProofTree, target: Formula):
    """Dispatch on the target's core connective; the | case returns a pair."""
    core = strip_nabla(target).core
    if isinstance(core, And):
        return invert_and(t, target)
    if isinstance(core, Or):
        return invert_or(t, target)
    if isinstance(core, HeytImp):
        return invert_heyt(t, target)
    raise ProofError("invertible targets are nabla^n of &, | or =>")


# ---------------------------------------------------------------------------
# Contraction


def contract(t: ProofTree, dup: Formula) -> ProofTree:
    """Height-preserving contraction of one duplicated antecedent formula."""
    if t.sequent.ant.count(dup) < 2:
        raise ProofError("contraction needs two occurrences of the formula")
    out = _contract(t, dup)
    if out.height > t.height:
        raise InternalError("contraction increased the proof height")
    return out


def _contract(t: ProofTree, a: Formula) -> ProofTree:
    node = _as_node(t, "contraction")
    rule = node.inst.rule
    if rule is Rule.LW:
        intro = node.inst.intro
        if a in intro:
            return mk_lw(node.children[0], intro.remove(a))
        return mk_lw(_contract(node.children[0], a), intro)
    if rule is Rule.N:
        return mk_n(_contract(node.children[0], a.body))
    if rule is Rule.RDYNIMP:
        child = _contract(node.children[0], Nabla(a))
        return mk_rdynimp(child, node.inst.principal.left)
    if rule in _LEFT_PRINCIPAL and node.inst.principal == a:
        pre = strip_nabla(a)
        n, core = pre.depth, pre.core
        if rule is Rule.LAND_N:
            xa, xb = nabla_n(core.left, n), nabla_n(core.right, n)
            inv = _invert1(node.children[0], a, "and")
            return mk_land_n(_contract(_contract(inv, xa), xb), n, core.left, core.right)
        if rule is Rule.LOR_N:
            xa, xb = nabla_n(core.left, n), nabla_n(core.right, n)
            left = _contract(_invert1(node.children[0], a, "or_left"), xa)
            right = _contract(_invert1(node.children[1], a, "or_right"), xb)
            return mk_lor_n(left, right, n, core.left, core.right)
        if rule is Rule.LDYNIMP_N:
            left = _contract(node.children[0], a)
            right = _contract(node.children[1], a)
            return mk_ldynimp_n(left, right, n - 1, core.left, core.right)
        # LHeytImpN: invert the context copy inside the second premise
        xb = nabla_n(core.right, n)
        left = _contract(node.children[0], a)
        right = _contract(_invert1(node.children[1], a, "heyt"), xb)
        return mk_lheytimp_n(left, right, n, core.left, core.right)
    if not node.children:
        raise InternalError("axioms carry no duplicated antecedent formula")
    return _rebuild(node, tuple(_contract(c, a) for c in node.children))


def contract_to(t: ProofTree, target_ant: Multiset) -> ProofTree:
    """Contract surplus copies until the antecedent equals target_ant."""
    while t.sequent.ant != target_ant:
        for f in t.sequent.ant.distinct():
            if t.sequent.ant.count(f) > target_ant.count(f):
                t = contract(t, f)
                break
        else:
            raise InternalError("antecedent cannot be contracted to the requested multiset")
    return t


# ---------------------------------------------------------------------------
# Generalized cut elimination


def cut_once(d1: ProofTree, d2: ProofTree, n: int = 0) -> ProofTree:
    """From cut-free proofs of Pi |- A and Phi, nabla^n A |- Lambda build a
    cut-free proof of Phi, nabla^n Pi |- Lambda."""
    if not d1.sequent.suc:
        raise ProofError("left cut premise must have a succedent")
    a = d1.sequent.suc[0]
    if nabla_n(a, n) not in d2.sequent.ant:
        raise ProofError("right cut premise lacks nabla^n of the cut formula")
    return _cut(d1, d2, n, a, None)


def _measure(d1: ProofTree, d2: ProofTree, a: Formula) -> tuple[int, int]:
    return rank(a), d1.height + d2.height


def _cut(
    d1: ProofTree,
    d2: ProofTree,
    n: int,
    a: Formula,
    bound: Optional[tuple[int, int]],
) -> ProofTree:
    m = _measure(d1, d2, a)
    if bound is not None and not m < bound:
        raise InternalError(f"cut-elimination measure did not decrease: {m} vs {bound}")
    n1 = _as_node(d1, "cut elimination")
    n2 = _as_node(d2, "cut elimination")
    target = nabla_n(a, n)
    phi = n2.sequent.ant.remove(target)
    lam = n2.sequent.suc

    if n1.inst.rule not in _RIGHT_PRINCIPAL:
        return _cut_part1(n1, n2, n, a, m, phi, lam)
    if not (n2.inst.rule in _LEFT_PRINCIPAL and n2.inst.principal == target):
        return _cut_part2(n1, n2, n, a, m)
    return _cut_part3(n1, n2, n, a, m, phi, lam)


def _cut_part1(n1: Node, n2: Node, n: int, a: Formula, m, phi: Multiset, lam) -> ProofTree:
    """The cut formula is not principal on the left."""
    rule = n1.inst.rule
    if rule is Rule.IDP:
        # Pi = {p}, so the conclusion is n2's sequent verbatim
        return n2
    if rule is Rule.RW:
        base = mk_lw(mk_n_times(n1.children[0], n), phi)
        return mk_rw(base, lam[0]) if lam else base
    if rule is Rule.LW:
        rec = _cut(n1.children[0], n2, n, a, m)
        return mk_lw(rec, Multiset(nabla_n(g, n) for g in n1.inst.intro))
    pre = strip_nabla(n1.inst.principal) if n1.inst.principal is not None else None
    if rule is Rule.LAND_N:
        b, c = pre.core.left, pre.core.right
        rec = _cut(n1.children[0], n2, n, a, m)
        return mk_land_n(rec, n + n1.inst.n, b, c)
    if rule is Rule.LOR_N:
        b, c = pre.core.left, pre.core.right
        left = _cut(n1.children[0], n2, n, a, m)
        right = _cut(n1.children[1], n2, n, a, m)
        return mk_lor_n(left, right, n + n1.inst.n, b, c)
    if rule is Rule.LDYNIMP_N:
        b, c = pre.core.left, pre.core.right
        left = mk_lw(mk_n_times(n1.children[0], n), phi)
        right = _cut(n1.children[1], n2, n, a, m)
        return mk_ldynimp_n(left, right, n + n1.inst.n, b, c)
    if rule is Rule.LHEYTIMP_N:
        b, c = pre.core.left, pre.core.right
        left = mk_lw(mk_n_times(n1.children[0], n), phi)
        right = _cut(n1.children[1], n2, n, a, m)
        return mk_lheytimp_n(left, right, n + n1.inst.n, b, c)
    if rule is Rule.N:
        return _cut(n1.children[0], n2, n + 1, a.body, m)
    raise InternalError(f"unexpected left rule {rule.value} in cut part 1")


def _cut_part2(n1: Node, n2: Node, n: int, a: Formula, m) -> ProofTree:
    """Principal on the left but parametric on the right: push into d2."""
    rule = n2.inst.rule
    target = nabla_n(a, n)
    if rule is Rule.RW:
        rec = _cut(n1, n2.children[0], n, a, m)
        return mk_rw(rec, n2.inst.intro.items[0])
    if rule is Rule.LW:
        intro = n2.inst.intro
        if target in intro:
            pieces = intro.remove(target).union(nabla_n(g, n) for g in n1.sequent.ant)
            return mk_lw(n2.children[0], pieces)
        rec = _cut(n1, n2.children[0], n, a, m)
        return mk_lw(rec, intro)
    if rule is Rule.LAND_N:
        pre = strip_nabla(n2.inst.principal)
        rec = _cut(n1, n2.children[0], n, a, m)
        return mk_land_n(rec, n2.inst.n, pre.core.left, pre.core.right)
    if rule is Rule.LOR_N:
        pre = strip_nabla(n2.inst.principal)
        left = _cut(n1, n2.children[0], n, a, m)
        right = _cut(n1, n2.children[1], n, a, m)
        return mk_lor_n(left, right, n2.inst.n, pre.core.left, pre.core.right)
    if rule is Rule.LDYNIMP_N:
        pre = strip_nabla(n2.inst.principal)
        left = _cut(n1, n2.children[0], n, a, m)
        right = _cut(n1, n2.children[1], n, a, m)
        return mk_ldynimp_n(left, right, n2.inst.n, pre.core.left, pre.core.right)
    if rule is Rule.LHEYTIMP_N:
        pre = strip_nabla(n2.inst.principal)
        left = _cut(n1, n2.children[0], n, a, m)
        right = _cut(n1, n2.children[1], n, a, m)
        return mk_lheytimp_n(left, right, n2.inst.n, pre.core.left, pre.core.right)
    if rule is Rule.RAND:
        left = _cut(n1, n2.children[0], n, a, m)
        right = _cut(n1, n2.children[1], n, a, m)
        return mk_rand(left, right)
    if rule is Rule.ROR1:
        return mk_ror1(_cut(n1, n2.children[0], n, a, m), n2.inst.principal.right)
    if rule is Rule.ROR2:
        return mk_ror2(_cut(n1, n2.children[0], n, a, m), n2.inst.principal.left)
    if rule is Rule.RDYNIMP:
        rec = _cut(n1, n2.children[0], n + 1, a, m)
        return mk_rdynimp(rec, n2.inst.principal.left)
    if rule is Rule.RHEYTIMP:
        rec = _cut(n1, n2.children[0], n, a, m)
        return mk_rheytimp(rec, n2.inst.principal.left)
    if rule is Rule.N:
        if n == 0:
            raise InternalError("cut formula under N on the right forces n >= 1")
        rec = _cut(n1, n2.children[0], n - 1, a, m)
        return mk_n(rec)
    raise InternalError(f"unexpected right rule {rule.value} in cut part 2")


def _cut_part3(n1: Node, n2: Node, n: int, a: Formula, m, phi: Multiset, lam) -> ProofTree:
    """Principal on both sides; the cut formula is decomposed."""
    r1, r2 = n1.inst.rule, n2.inst.rule
    goal_ant = phi.union(nabla_n(g, n) for g in n1.sequent.ant)
    if r1 is Rule.RAND and r2 is Rule.LAND_N:
        b, c = a.left, a.right
        step1 = _cut(n1.children[0], n2.children[0], n, b, m)
        step2 = _cut(n1.children[1], step1, n, c, m)
        return contract_to(step2, goal_ant)
    if r1 is Rule.ROR1 and r2 is Rule.LOR_N:
        return contract_to(_cut(n1.children[0], n2.children[0], n, a.left, m), goal_ant)
    if r1 is Rule.ROR2 and r2 is Rule.LOR_N:
        return contract_to(_cut(n1.children[0], n2.children[1], n, a.right, m), goal_ant)
    if r1 is Rule.RDYNIMP and r2 is Rule.LDYNIMP_N:
        b, c = a.left, a.right
        t1 = _cut(n1, n2.children[1], n, a, m)
        d = _cut(n1.children[0], t1, n - 1, c, m)
        t2 = _cut(n1, n2.children[0], n, a, m)
        t3 = _cut(t2, d, 0, nabla_n(b, n - 1), m)
        return contract_to(t3, goal_ant)
    if r1 is Rule.RHEYTIMP and r2 is Rule.LHEYTIMP_N:
        b, c = a.left, a.right
        d = _cut(n1.children[0], n2.children[1], n, c, m)
        t2 = _cut(n1, n2.children[0], n, a, m)
        t3 = _cut(t2, d, 0, nabla_n(b, n), m)
        return contract_to(t3, goal_ant)
    raise InternalError(f"principal rules {r1.value}/{r2.value} cannot both own the cut formula")


def has_cut(t: ProofTree) -> bool:
    return any(isinstance(u, Node) and u.inst.rule is Rule.CUT for u in iter_nodes(t))


def _replace_at(t: ProofTree, path: tuple[int, ...], replacement: ProofTree) -> ProofTree:
    if not path:
        return replacement
    head, rest = path[0], path[1:]
    children = list(t.children)
    children[head] = _replace_at(children[head], rest, replacement)
    return Node(t.sequent, t.inst, tuple(children))


def _topmost_cut(t: ProofTree, path=()) -> Optional[tuple[tuple[int, ...], Node]]:
    if isinstance(t, Hypothesis):
        return None
    for i, c in enumerate(t.children):
        found = _topmost_cut(c, path + (i,))
        if found is not None:
            return found
    if t.inst.rule is Rule.CUT:
        return path, t
    return None


def eliminate_cuts(t: ProofTree, strategy: Literal["topmost", "bottommost"] = "topmost") -> ProofTree:
    """Remove every cut node, preserving the endsequent."""
    if strategy == "bottommost":
        return _elim_bottom(t)
    while True:
        found = _topmost_cut(t)
        if found is None:
            return t
        path, node = found
        spliced = cut_once(node.children[0], node.children[1], node.inst.cut_exponent)
        if spliced.sequent != node.sequent:
            raise InternalError("cut replacement changed the local sequent")
        t = _replace_at(t, path, spliced)


def _elim_bottom(t: ProofTree) -> ProofTree:
    if isinstance(t, Hypothesis):
        return t
    if t.inst.rule is Rule.CUT:
        left = _elim_bottom(t.children[0])
        right = _elim_bottom(t.children[1])
        return cut_once(left, right, t.inst.cut_exponent)
    children = tuple(_elim_bottom(c) for c in t.children)
    return Node(t.sequent, t.inst, children)


# ---------------------------------------------------------------------------
# Distribution proofs in the cut-ful calculi (used by the reverse translation)


def nabla_dist_proof(connective: str, n: int, a: Formula, b: Formula) -> ProofTree:
    """Proof of nabla^n(a . b) |- (nabla^n a) . (nabla^n b) in the cut-ful
    calculus (for -> the succedent is an implication, likewise =>)."""
    if connective == "&":
        left = mk_n_times(mk_land1(mk_id(a), a, b), n)
        right = mk_n_times(mk_land2(mk_id(b), a, b), n)
        return mk_rand(left, right)
    if connective == "|":
        return _dist_or(n, a, b)
    if connective == "->":
        base = mk_ldynimp(mk_id(a), mk_lw1(mk_id(b), a), a, b)
        return mk_rdynimp(mk_n_times(base, n), nabla_n(a, n))
    if connective == "=>":
        base = mk_lheytimp(mk_id(a), mk_lw1(mk_id(b), a), a, b)
        return mk_rheytimp(mk_n_times(base, n), nabla_n(a, n))
    raise ValueError(f"unknown connective {connective!r} (one of & | -> =>)")


def _unbox_once(c: Formula) -> ProofTree:
    """#(T -> c) |- c in the cut-ful calculus."""
    return mk_ldynimp(mk_rtop(), mk_id(c), Top(), c)


def _dist_or_once(a: Formula, b: Formula) -> ProofTree:
    """#(a | b) |- #a | #b."""
    c = Or(Nabla(a), Nabla(b))
    left = mk_rdynimp(mk_lw1(mk_ror1(mk_id(Nabla(a)), Nabla(b)), Top()), Top())
    right = mk_rdynimp(mk_lw1(mk_ror2(mk_id(Nabla(b)), Nabla(a)), Top()), Top())
    joined = mk_n(mk_lor(left, right, a, b))
    return mk_cut(joined, _unbox_once(c), Nabla(box(c)), 0)


def _dist_or(n: int, a: Formula, b: Formula) -> ProofTree:
    if n == 0:
        return mk_id(Or(a, b))
    proof = _dist_or_once(a, b)
    for k in range(1, n):
        step = _dist_or_once(nabla_n(a, k), nabla_n(b, k))
        proof = mk_cut(mk_n(proof), step, Nabla(Or(nabla_n(a, k), nabla_n(b, k))), 0)
    return proof


# ---------------------------------------------------------------------------
# Calculus translations


def stl_to_ikd(t: ProofTree) -> ProofTree:
    """Translate a cut-ful proof into a cut-free one with the same endsequent."""
    if isinstance(t, Hypothesis):
        raise ProofError("translation does not accept hypothesis leaves")
    rule = t.inst.rule
    kids = [stl_to_ikd(c) for c in t.children]
    if rule is Rule.ID:
        return identity(t.sequent.ant.items[0])
    if rule is Rule.IDP:
        return t
    if rule is Rule.LBOT:
        return mk_lbot()
    if rule is Rule.RTOP:
        return mk_rtop()
    if rule in (Rule.LW1, Rule.LW):
        return mk_lw(kids[0], t.inst.intro)
    if rule is Rule.RW:
        return mk_rw(kids[0], t.inst.intro.items[0])
    if rule is Rule.LC:
        return contract(kids[0], t.inst.principal)
    if rule is Rule.CUT:
        return cut_once(kids[0], kids[1], t.inst.cut_exponent)
    if rule is Rule.LAND1:
        p = t.inst.principal
        return mk_land_n(mk_lw(kids[0], [p.right]), 0, p.left, p.right)
    if rule is Rule.LAND2:
        p = t.inst.principal
        return mk_land_n(mk_lw(kids[0], [p.left]), 0, p.left, p.right)
    if rule is Rule.LOR:
        p = t.inst.principal
        return mk_lor_n(kids[0], kids[1], 0, p.left, p.right)
    if rule is Rule.LDYNIMP:
        p = t.inst.principal  # #(A -> B)
        imp = p.body
        left = mk_lw(kids[0], [p])
        right = mk_lw(kids[1], [p])
        return mk_ldynimp_n(left, right, 0, imp.left, imp.right)
    if rule is Rule.LHEYTIMP:
        p = t.inst.principal
        left = mk_lw(kids[0], [p])
        return mk_lheytimp_n(left, kids[1], 0, p.left, p.right)
    if rule is Rule.RAND:
        return mk_rand(kids[0], kids[1])
    if rule is Rule.ROR1:
        return mk_ror1(kids[0], t.inst.principal.right)
    if rule is Rule.ROR2:
        return mk_ror2(kids[0], t.inst.principal.left)
    if rule is Rule.RDYNIMP:
        return mk_rdynimp(kids[0], t.inst.principal.left)
    if rule is Rule.RHEYTIMP:
        return mk_rheytimp(kids[0], t.inst.principal.left)
    if rule is Rule.N:
        return mk_n(kids[0])
    # remaining cut-free-only rules have no business in a cut-ful proof
    raise ProofError(f"rule {rule.value} does not belong to the cut-ful calculi")


def ikd_to_stl(t: ProofTree) -> ProofTree:
    """Translate a cut-free proof into the cut-ful calculus (native cut used)."""
    if isinstance(t, Hypothesis):
        return t
    rule = t.inst.rule
    kids = [ikd_to_stl(c) for c in t.children]
    if rule is Rule.IDP:
        return mk_id(t.sequent.ant.items[0])
    if rule is Rule.LBOT:
        return mk_lbot()
    if rule is Rule.RTOP:
        return mk_rtop()
    if rule is Rule.LW:
        return mk_lw1_many(kids[0], t.inst.intro)
    if rule is Rule.RW:
        return mk_rw(kids[0], t.inst.intro.items[0])
    if rule is Rule.CUT:
        lifted = mk_n_times(kids[0], t.inst.cut_exponent)
        return mk_cut(lifted, kids[1], lifted.sequent.suc[0], 0)
    if rule is Rule.LAND_N:
        n = t.inst.n
        core = strip_nabla(t.inst.principal).core
        x, y = nabla_n(core.left, n), nabla_n(core.right, n)
        w = And(x, y)
        collapsed = mk_lc(mk_land2(mk_land1(kids[0], x, y), x, y), w)
        return mk_cut(nabla_dist_proof("&", n, core.left, core.right), collapsed, w, 0)
    if rule is Rule.LOR_N:
        n = t.inst.n
        core = strip_nabla(t.inst.principal).core
        x, y = nabla_n(core.left, n), nabla_n(core.right, n)
        joined = mk_lor(kids[0], kids[1], x, y)
        return mk_cut(nabla_dist_proof("|", n, core.left, core.right), joined, Or(x, y), 0)
    if rule is Rule.LDYNIMP_N:
        n = t.inst.n
        core = strip_nabla(t.inst.principal).core
        x, y = nabla_n(core.left, n), nabla_n(core.right, n)
        lifted = mk_n(nabla_dist_proof("->", n, core.left, core.right))
        d3 = mk_ldynimp(kids[0], kids[1], x, y)
        cut = mk_cut(lifted, d3, Nabla(DynImp(x, y)), 0)
        return mk_lc(cut, t.inst.principal)
    if rule is Rule.LHEYTIMP_N:
        n = t.inst.n
        core = strip_nabla(t.inst.principal).core
        x, y = nabla_n(core.left, n), nabla_n(core.right, n)
        d3 = mk_lheytimp(kids[0], mk_lw1(kids[1], t.inst.principal), x, y)
        cut = mk_cut(nabla_dist_proof("=>", n, core.left, core.right), d3, HeytImp(x, y), 0)
        return mk_lc(cut, t.inst.principal)
    if rule is Rule.RAND:
        return mk_rand(kids[0], kids[1])
    if rule is Rule.ROR1:
        return mk_ror1(kids[0], t.inst.principal.right)
    if rule is Rule.ROR2:
        return mk_ror2(kids[0], t.inst.principal.left)
    if rule is Rule.RDYNIMP:
        return mk_rdynimp(kids[0], t.inst.principal.left)
    if rule is Rule.RHEYTIMP:
        return mk_rheytimp(kids[0], t.inst.principal.left)
    if rule is Rule.N:
        return mk_n(kids[0])
    raise ProofError(f"rule {rule.value} does not belong to the cut-free calculi")


# ---------------------------------------------------------------------------
# Deduction theorem


@dataclass(frozen=True)
class DeductionResult:
    sigma: Multiset
    proof: ProofTree


_CONTEXT_SHARED = {
    Rule.LW, Rule.RW, Rule.LAND_N, Rule.LOR_N, Rule.LDYNIMP_N, Rule.LHEYTIMP_N,
    Rule.RAND, Rule.ROR1, Rule.ROR2, Rule.RHEYTIMP,
}


def deduction_export(t: ProofTree, assumption: Formula, eliminate: bool = True) -> DeductionResult:
    """Turn a proof from the hypothesis |- A into a hypothesis-free proof of
    Gamma, Sigma_A |- Delta where Sigma_A is a set of variants of A."""
    hyp = Sequent.make([], assumption)

    def walk(u: ProofTree) -> tuple[Multiset, ProofTree]:
        if isinstance(u, Hypothesis):
            if u.sequent != hyp:
                raise ProofError(
                    f"hypothesis leaf {u.sequent} differs from |- {print_formula(assumption)}"
                )
            return Multiset([assumption]), identity(assumption)
        rule = u.inst.rule
        if not u.children:
            return Multiset(), u
        if rule is Rule.N:
            sig, d = walk(u.children[0])
            return sig.map_nabla(), mk_n(d)
        if rule is Rule.RDYNIMP:
            sig, d = walk(u.children[0])
            return sig.map(box), abstraction(d, sig, u.inst.principal.left)
        if rule is Rule.CUT:
            s1, d1 = walk(u.children[0])
            s2, d2 = walk(u.children[1])
            k = u.inst.cut_exponent
            joined = mk_cut(d1, d2, u.inst.cut_formula, k)
            return s2.union(nabla_n(g, k) for g in s1), joined
        if rule in _CONTEXT_SHARED:
            parts = [walk(c) for c in u.children]
            sigma = Multiset()
            for sig, _ in parts:
                sigma = sigma.sup(sig)  # join: every child's sigma embeds
            widened = tuple(mk_lw(d, sigma.difference(sig)) for sig, d in parts)
            return sigma, _rebuild_with_context(u, widened)
        raise ProofError(f"rule {rule.value} is not part of the cut-ful extension")

    sigma, proof = walk(t)
    if eliminate:
        proof = eliminate_cuts(proof)
        target = t.sequent.ant.union(set(sigma))
        proof = contract_to(proof, target)
        sigma = Multiset(set(sigma))
    return DeductionResult(sigma, proof)


def _rebuild_with_context(t: Node, children: tuple[ProofTree, ...]) -> ProofTree:
    r = t.inst.rule
    if r is Rule.RHEYTIMP:
        return mk_rheytimp(children[0], t.inst.principal.left)
    return _rebuild(t, children)


def variant_derivation(assumption: Formula, variant: Formula) -> ProofTree:
    """Hypothesis derivation of |- variant from the single hypothesis
    |- assumption, by N steps and box monotonicity."""
    wraps = []
    g = variant
    while g != assumption:
        if isinstance(g, Nabla):
            wraps.append("nabla")
            g = g.body
        elif isinstance(g, DynImp) and g.left == Top():
            wraps.append("box")
            g = g.right
        else:
            raise ProofError(
                f"{print_formula(variant)} is not a variant of {print_formula(assumption)}"
            )
    d: ProofTree = Hypothesis(Sequent.make([], assumption))
    for wrap in reversed(wraps):
        d = mk_n(d) if wrap == "nabla" else box_mono(d)
    return d


def deduction_import(assumption: Formula, sigma: Multiset, t: ProofTree) -> ProofTree:
    """Cut each member of sigma against its derivation from |- assumption,
    yielding a hypothesis proof of Gamma |- Delta."""
    if not t.sequent.ant.contains_all(sigma):
        raise ProofError("sigma must occur in the proof's antecedent")
    result = t
    for b in sigma:
        result = mk_cut(variant_derivation(assumption, b), result, b, 0)
    return result
