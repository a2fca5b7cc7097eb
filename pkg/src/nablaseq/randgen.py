"""Seeded random generators for formulas, sequents, and forward-built proofs.

Forward proof generation grows trees from axiom (or hypothesis) leaves by
applying rules whose premise shapes are arranged via weakening, so every
generated tree checks by construction.  Used by the test corpora and the
experiment scripts.
"""

from __future__ import annotations

import random
from typing import Optional

from .kernel import (
    Hypothesis,
    ProofTree,
    mk_cut,
    mk_id,
    mk_idp,
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
    mk_n,
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
    nabla_n,
    strip_nabla,
)

DEFAULT_ATOMS = ("p", "q", "r")


def rand_formula(
    rng: random.Random,
    max_depth: int = 4,
    atom_names: tuple[str, ...] = DEFAULT_ATOMS,
    allow_heyt: bool = True,
) -> Formula:
    if max_depth <= 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.8:
            return Atom(rng.choice(atom_names))
        return Top() if roll < 0.9 else Bot()
    kinds = ["and", "or", "dyn", "nabla", "nabla"]
    if allow_heyt:
        kinds.append("heyt")
    kind = rng.choice(kinds)
    if kind == "nabla":
        return Nabla(rand_formula(rng, max_depth - 1, atom_names, allow_heyt))
    left = rand_formula(rng, max_depth - 1, atom_names, allow_heyt)
    right = rand_formula(rng, max_depth - 1, atom_names, allow_heyt)
    return {"and": And, "or": Or, "dyn": DynImp, "heyt": HeytImp}[kind](left, right)


def rand_sequent(
    rng: random.Random,
    max_depth: int = 4,
    max_ant: int = 3,
    atom_names: tuple[str, ...] = DEFAULT_ATOMS,
    allow_heyt: bool = True,
) -> Sequent:
    ant = [
        rand_formula(rng, max_depth, atom_names, allow_heyt)
        for _ in range(rng.randrange(max_ant + 1))
    ]
    suc = None
    if rng.random() < 0.9:
        suc = rand_formula(rng, max_depth, atom_names, allow_heyt)
    return Sequent.make(ant, suc)


def _rand_small(rng, atom_names, allow_heyt) -> Formula:
    return rand_formula(rng, 2, atom_names, allow_heyt)


def _axiom(rng: random.Random, atom_names, allow_heyt, stl: bool) -> ProofTree:
    roll = rng.random()
    if roll < 0.7:
        if stl:
            f = _rand_small(rng, atom_names, allow_heyt) if roll < 0.35 else Atom(rng.choice(atom_names))
            return mk_id(f)
        return mk_idp(rng.choice(atom_names))
    return mk_lbot() if roll < 0.85 else mk_rtop()


def _pick(rng: random.Random, ant: Multiset) -> Optional[Formula]:
    items = ant.items
    return rng.choice(items) if items else None


def rand_ikd_proof(
    rng: random.Random,
    steps: int = 8,
    atom_names: tuple[str, ...] = DEFAULT_ATOMS,
    allow_heyt: bool = True,
    max_ant: int = 6,
) -> ProofTree:
    """Forward-grown proof in the cut-free calculus."""
    t = _axiom(rng, atom_names, allow_heyt, stl=False)
    for _ in range(steps):
        t = _grow_ikd(rng, t, atom_names, allow_heyt, max_ant)
    return t


def _grow_ikd(rng, t: ProofTree, atom_names, allow_heyt, max_ant) -> ProofTree:
    s = t.sequent
    moves = ["lw"]
    if not s.suc:
        moves.append("rw")
    if len(s.ant) <= max_ant:
        moves.append("n")
    if s.suc:
        moves += ["ror1", "ror2", "land"]
        if allow_heyt:
            moves.append("rheyt")
    move = rng.choice(moves)
    if move == "lw":
        extra = [_rand_small(rng, atom_names, allow_heyt) for _ in range(rng.randrange(1, 3))]
        return mk_lw(t, extra)
    if move == "rw":
        return mk_rw(t, _rand_small(rng, atom_names, allow_heyt))
    if move == "n":
        return mk_n(t)
    if move == "ror1":
        return mk_ror1(t, _rand_small(rng, atom_names, allow_heyt))
    if move == "ror2":
        return mk_ror2(t, _rand_small(rng, atom_names, allow_heyt))
    if move == "rheyt":
        a = _rand_small(rng, atom_names, allow_heyt)
        return mk_rheytimp(mk_lw(t, [a]), a)
    if move == "land":
        # fuse two antecedent formulas under one L& with a shared prefix depth
        candidates = list(s.ant)
        if len(candidates) >= 2:
            f1 = rng.choice(candidates)
            f2 = rng.choice(s.ant.remove(f1).items)
            n = rng.randrange(min(strip_nabla(f1).depth, strip_nabla(f2).depth) + 1)
            return mk_land_n(t, n, _peel_to(f1, n), _peel_to(f2, n))
        return mk_lw(t, [_rand_small(rng, atom_names, allow_heyt)])
    raise AssertionError(move)


def _peel_to(f: Formula, n: int) -> Formula:
    for _ in range(n):
        f = f.body
    return f


def rand_ikd_proof_pair(rng, steps, atom_names=DEFAULT_ATOMS, allow_heyt=True) -> ProofTree:
    """Forward proof that also exercises the two-premise rules."""
    t1 = rand_ikd_proof(rng, steps // 2, atom_names, allow_heyt)
    t2 = rand_ikd_proof(rng, steps // 2, atom_names, allow_heyt)
    s1, s2 = t1.sequent, t2.sequent
    binary = []
    if s1.suc and s2.suc:
        binary += ["rand", "ldyn"]
        if allow_heyt:
            binary.append("lheyt")
    if s1.suc == s2.suc and s1.suc:
        binary.append("lor")
    if not binary:
        return mk_lw(t1, [rand_formula(rng, 2, atom_names, allow_heyt)])
    move = rng.choice(binary)
    if move == "rand":
        widened1 = mk_lw(t1, s2.ant)
        widened2 = mk_lw(t2, s1.ant)
        return mk_rand(widened1, widened2)
    if move == "lor":
        a = _rand_small(rng, atom_names, allow_heyt)
        b = _rand_small(rng, atom_names, allow_heyt)
        n = rng.randrange(2)
        left = mk_lw(t1, s2.ant.add(nabla_n(a, n)))
        right = mk_lw(t2, s1.ant.add(nabla_n(b, n)))
        return mk_lor_n(left, right, n, a, b)
    if move == "ldyn":
        pre = strip_nabla(s1.suc[0])
        n = rng.randrange(pre.depth + 1)
        a = _peel_to(s1.suc[0], n)
        b = _rand_small(rng, atom_names, allow_heyt)
        principal = nabla_n(DynImp(a, b), n + 1)
        left = mk_lw(t1, s2.ant.add(principal))
        right = mk_lw(t2, s1.ant.add(principal, nabla_n(b, n)))
        return mk_ldynimp_n(left, right, n, a, b)
    # lheyt
    pre = strip_nabla(s1.suc[0])
    n = rng.randrange(pre.depth + 1)
    a = _peel_to(s1.suc[0], n)
    b = _rand_small(rng, atom_names, allow_heyt)
    principal = nabla_n(HeytImp(a, b), n)
    left = mk_lw(t1, s2.ant.add(principal))
    right = mk_lw(t2, s1.ant.add(nabla_n(b, n)))
    return mk_lheytimp_n(left, right, n, a, b)


def rand_ikd_corpus(seed: int, count: int, steps: int = 8, allow_heyt: bool = True) -> list[ProofTree]:
    rng = random.Random(seed)
    out = []
    for i in range(count):
        if i % 3 == 2:
            out.append(rand_ikd_proof_pair(rng, steps, allow_heyt=allow_heyt))
        else:
            out.append(rand_ikd_proof(rng, steps, allow_heyt=allow_heyt))
    return out


# ---------------------------------------------------------------------------
# Forward generation in the cut-ful calculi


def rand_stl_proof(
    rng: random.Random,
    steps: int = 8,
    atom_names: tuple[str, ...] = DEFAULT_ATOMS,
    allow_heyt: bool = True,
    allow_cut: bool = True,
    max_ant: int = 6,
) -> ProofTree:
    pool = [_axiom(rng, atom_names, allow_heyt, stl=True) for _ in range(3)]
    for _ in range(steps):
        t = pool[rng.randrange(len(pool))]
        grown = _grow_stl(rng, t, pool, atom_names, allow_heyt, allow_cut, max_ant)
        pool[rng.randrange(len(pool))] = grown
    best = max(pool, key=lambda u: u.height)
    return best


def _grow_stl(rng, t: ProofTree, pool, atom_names, allow_heyt, allow_cut, max_ant) -> ProofTree:
    s = t.sequent
    small = lambda: _rand_small(rng, atom_names, allow_heyt)
    moves = ["lw"]
    if not s.suc:
        moves.append("rw")
    if len(s.ant) <= max_ant:
        moves.append("n")
    if any(s.ant.count(f) >= 2 for f in s.ant.distinct()):
        moves.append("lc")
    if len(s.ant):
        moves += ["land1", "land2"]
    if s.suc:
        moves += ["ror1", "ror2", "rand", "ldyn"]
        if allow_heyt:
            moves += ["rheyt", "lheyt"]
    if allow_cut and s.suc:
        moves.append("cut")
    move = rng.choice(moves)
    if move == "lw":
        return mk_lw1(t, small())
    if move == "rw":
        return mk_rw(t, small())
    if move == "n":
        return mk_n(t)
    if move == "lc":
        dups = [f for f in s.ant.distinct() if s.ant.count(f) >= 2]
        return mk_lc(t, rng.choice(dups))
    if move in ("land1", "land2"):
        f = _pick(rng, s.ant)
        other = small()
        if move == "land1":
            return mk_land1(t, f, other)
        return mk_land2(t, other, f)
    if move == "ror1":
        return mk_ror1(t, small())
    if move == "ror2":
        return mk_ror2(t, small())
    if move == "rand":
        u = pool[rng.randrange(len(pool))]
        if not u.sequent.suc:
            u = mk_rw(u, small())
        widened1 = mk_lw1_seq(t, u.sequent.ant)
        widened2 = mk_lw1_seq(u, s.ant)
        return mk_rand(widened1, widened2)
    if move == "ldyn":
        u = pool[rng.randrange(len(pool))]
        b = small()
        left = mk_lw1_seq(t, u.sequent.ant)
        right = mk_lw1_seq(mk_lw1(u, b), s.ant)
        return mk_ldynimp(left, right, s.suc[0], b)
    if move == "rheyt":
        a = small()
        return mk_rheytimp(mk_lw1(t, a), a)
    if move == "lheyt":
        u = pool[rng.randrange(len(pool))]
        b = small()
        left = mk_lw1_seq(t, u.sequent.ant)
        right = mk_lw1_seq(mk_lw1(u, b), s.ant)
        return mk_lheytimp(left, right, s.suc[0], b)
    if move == "cut":
        u = pool[rng.randrange(len(pool))]
        a = s.suc[0]
        return mk_cut(t, mk_lw1(u, a), a, 0)
    raise AssertionError(move)


def mk_lw1_seq(t: ProofTree, intro) -> ProofTree:
    for f in intro:
        t = mk_lw1(t, f)
    return t


def rand_stl_corpus(
    seed: int, count: int, steps: int = 10, allow_heyt: bool = True, allow_cut: bool = True
) -> list[ProofTree]:
    rng = random.Random(seed)
    return [
        rand_stl_proof(rng, steps, allow_heyt=allow_heyt, allow_cut=allow_cut)
        for _ in range(count)
    ]


# ---------------------------------------------------------------------------
# Hypothesis proofs (deduction-theorem corpora)


def rand_hyp_proof(
    rng: random.Random,
    assumption: Formula,
    steps: int = 6,
    atom_names: tuple[str, ...] = DEFAULT_ATOMS,
    allow_heyt: bool = True,
) -> ProofTree:
    """Forward proof in the cut-ful extension whose leaves may be |- A."""
    if rng.random() < 0.8:
        t: ProofTree = Hypothesis(Sequent.make([], assumption))
    else:
        t = _axiom(rng, atom_names, allow_heyt, stl=False)
    for _ in range(steps):
        s = t.sequent
        small = lambda: _rand_small(rng, atom_names, allow_heyt)
        moves = ["lw", "n"]
        if not s.suc:
            moves.append("rw")
        if s.suc:
            moves += ["ror1", "rand_self", "rdyn"]
        if s.suc and rng.random() < 0.5:
            moves.append("cut_hyp")
        move = rng.choice(moves)
        if move == "lw":
            t = mk_lw(t, [small()])
        elif move == "rw":
            t = mk_rw(t, small())
        elif move == "n":
            t = mk_n(t)
        elif move == "ror1":
            t = mk_ror1(t, small())
        elif move == "rand_self":
            t = mk_rand(t, t)
        elif move == "rdyn":
            a = small()
            t = mk_rdynimp(mk_lw(mk_n(t), [a]), a)
        elif move == "cut_hyp":
            hyp = Hypothesis(Sequent.make([], assumption))
            t = mk_cut(hyp, mk_lw(t, [assumption]), assumption, 0)
    return t
