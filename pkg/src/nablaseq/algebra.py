"""Brute-force enumeration of finite normal (Heyting) nabla-algebras and
sequent refutation against them.

An algebra is a bounded lattice with a unary map nabla preserving finite
meets and joins (endpoints included) whose dynamic implication is the right
adjoint: nabla(c) & a <= b  iff  c <= a -> b.  On non-distributive carriers
the adjoint may fail to exist; candidates are filtered by an exhaustive
adjunction check.  Heyting algebras additionally carry the meet residual.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

from .syntax import (
    And,
    Atom,
    Bot,
    DynImp,
    HeytImp,
    Nabla,
    Or,
    Sequent,
    Top,
    Formula,
    print_sequent,
    sequent_atoms,
)

MAX_SIZE = 6  # practical bound for exhaustive enumeration


@dataclass(frozen=True)
class FiniteNablaAlgebra:
    size: int
    leq: tuple[tuple[bool, ...], ...]
    meet: tuple[tuple[int, ...], ...]
    join: tuple[tuple[int, ...], ...]
    bot: int
    top: int
    nabla: tuple[int, ...]
    dyn_imp: tuple[tuple[int, ...], ...]
    heyt_imp: Optional[tuple[tuple[int, ...], ...]] = None

    @property
    def is_heyting(self) -> bool:
        return self.heyt_imp is not None

    def to_json(self) -> dict:
        out = {
            "size": self.size,
            "leq": [[int(v) for v in row] for row in self.leq],
            "meet": [list(row) for row in self.meet],
            "join": [list(row) for row in self.join],
            "bot": self.bot,
            "top": self.top,
            "nabla": list(self.nabla),
            "dyn_imp": [list(row) for row in self.dyn_imp],
        }
        if self.heyt_imp is not None:
            out["heyt_imp"] = [list(row) for row in self.heyt_imp]
        return out


@dataclass(frozen=True)
class Countermodel:
    algebra: FiniteNablaAlgebra
    valuation: tuple[tuple[str, int], ...]
    refuted: Sequent

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra.to_json(),
            "valuation": dict(self.valuation),
            "refuted": print_sequent(self.refuted),
        }


# ---------------------------------------------------------------------------
# Lattice enumeration.  Strict orders on {0..k-1} are enumerated in naturally
# labeled form (i < j whenever i precedes j), which covers every isomorphism
# class; canonical-form hashing removes relabeling duplicates.


def _transitive(above: list[int], k: int) -> bool:
    for i in range(k):
        reach = above[i]
        j = 0
        rest = reach
        while rest:
            if rest & 1:
                if above[j] & ~reach:
                    return False
            rest >>= 1
            j += 1
    return True


def _lattice_tables(leq) -> Optional[tuple]:
    k = len(leq)
    bots = [i for i in range(k) if all(leq[i][j] for j in range(k))]
    tops = [i for i in range(k) if all(leq[j][i] for j in range(k))]
    if len(bots) != 1 or len(tops) != 1:
        return None
    meet = [[0] * k for _ in range(k)]
    join = [[0] * k for _ in range(k)]
    for a in range(k):
        for b in range(k):
            lower = [c for c in range(k) if leq[c][a] and leq[c][b]]
            glb = [c for c in lower if all(leq[d][c] for d in lower)]
            if len(glb) != 1:
                return None
            meet[a][b] = glb[0]
            upper = [c for c in range(k) if leq[a][c] and leq[b][c]]
            lub = [c for c in upper if all(leq[c][d] for d in upper)]
            if len(lub) != 1:
                return None
            join[a][b] = lub[0]
    return (
        tuple(tuple(row) for row in leq),
        tuple(tuple(row) for row in meet),
        tuple(tuple(row) for row in join),
        bots[0],
        tops[0],
    )


def _canonical(leq) -> tuple:
    k = len(leq)
    best = None
    for perm in itertools.permutations(range(k)):
        mat = tuple(leq[perm[i]][perm[j]] for i in range(k) for j in range(k))
        if best is None or mat < best:
            best = mat
    return best


@lru_cache(maxsize=None)
def _lattices(k: int) -> tuple:
    """All bounded lattices on k elements, one per isomorphism class, as
    (leq, meet, join, bot, top) tuples in a deterministic order."""
    if k == 1:
        return (((True,),), ((0,),), ((0,),), 0, 0),
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    found = []
    seen = set()
    for bits in range(1 << len(pairs)):
        above = [1 << i for i in range(k)]  # reflexive
        for idx, (i, j) in enumerate(pairs):
            if bits >> idx & 1:
                above[i] |= 1 << j
        if not _transitive(above, k):
            continue
        leq = [[bool(above[i] >> j & 1) for j in range(k)] for i in range(k)]
        tables = _lattice_tables(leq)
        if tables is None:
            continue
        canon = _canonical(leq)
        if canon in seen:
            continue
        seen.add(canon)
        found.append(tables)
    return tuple(found)


def _is_distributive(meet, join, k: int) -> bool:
    return all(
        meet[a][join[b][c]] == join[meet[a][b]][meet[a][c]]
        for a in range(k)
        for b in range(k)
        for c in range(k)
    )


def _nabla_candidates(meet, join, bot: int, top: int, k: int) -> Iterator[tuple[int, ...]]:
    """Maps fixing bot/top that preserve binary meets and joins."""
    others = [i for i in range(k) if i not in (bot, top)]
    for values in itertools.product(range(k), repeat=len(others)):
        nabla = [0] * k
        nabla[bot], nabla[top] = bot, top
        for i, v in zip(others, values):
            nabla[i] = v
        if all(
            nabla[meet[a][b]] == meet[nabla[a]][nabla[b]]
            and nabla[join[a][b]] == join[nabla[a]][nabla[b]]
            for a in range(k)
            for b in range(k)
        ):
            yield tuple(nabla)


def _residual(pre, join, leq, k: int) -> Optional[tuple[tuple[int, ...], ...]]:
    """Largest r[a][b] with pre(c, a) <= b iff c <= r[a][b]; None if the
    adjunction fails for some triple."""
    table = [[0] * k for _ in range(k)]
    for a in range(k):
        for b in range(k):
            sup = None
            for c in range(k):
                if leq[pre(c, a)][b]:
                    sup = c if sup is None else join[sup][c]
            if sup is None:
                return None
            table[a][b] = sup
    for a in range(k):
        for b in range(k):
            for c in range(k):
                if leq[pre(c, a)][b] != leq[c][table[a][b]]:
                    return None
    return tuple(tuple(row) for row in table)


def enumerate_algebras(max_size: int, need_heyting: bool) -> Iterator[FiniteNablaAlgebra]:
    """Every normal nabla-algebra of carrier size <= max_size (Heyting ones
    only when need_heyting), deterministically ordered, deduplicated up to
    lattice isomorphism."""
    if max_size > MAX_SIZE:
        raise ValueError(f"enumeration is only practical up to size {MAX_SIZE}")
    for k in range(1, max_size + 1):
        for leq, meet, join, bot, top in _lattices(k):
            distributive = _is_distributive(meet, join, k)
            if need_heyting and not distributive:
                continue
            heyt = _residual(lambda c, a: meet[c][a], join, leq, k) if distributive else None
            if need_heyting and heyt is None:
                continue
            for nabla in _nabla_candidates(meet, join, bot, top, k):
                dyn = _residual(lambda c, a: meet[nabla[c]][a], join, leq, k)
                if dyn is None:
                    continue  # adjoint does not exist on this carrier
                yield FiniteNablaAlgebra(k, leq, meet, join, bot, top, nabla, dyn, heyt)


def validate_algebra(alg: FiniteNablaAlgebra) -> list[str]:
    """Re-verify every type invariant from scratch; empty list iff sound."""
    problems = []
    k, leq, meet, join = alg.size, alg.leq, alg.meet, alg.join
    for a in range(k):
        if not leq[a][a]:
            problems.append(f"leq not reflexive at {a}")
        for b in range(k):
            if leq[a][b] and leq[b][a] and a != b:
                problems.append(f"leq not antisymmetric at {a},{b}")
            for c in range(k):
                if leq[a][b] and leq[b][c] and not leq[a][c]:
                    problems.append(f"leq not transitive at {a},{b},{c}")
    for a in range(k):
        if not (leq[alg.bot][a] and leq[a][alg.top]):
            problems.append(f"bounds fail at {a}")
        for b in range(k):
            m, j = meet[a][b], join[a][b]
            if not (leq[m][a] and leq[m][b]) or any(
                leq[c][a] and leq[c][b] and not leq[c][m] for c in range(k)
            ):
                problems.append(f"meet wrong at {a},{b}")
            if not (leq[a][j] and leq[b][j]) or any(
                leq[a][c] and leq[b][c] and not leq[j][c] for c in range(k)
            ):
                problems.append(f"join wrong at {a},{b}")
    nb = alg.nabla
    if nb[alg.bot] != alg.bot or nb[alg.top] != alg.top:
        problems.append("nabla does not fix the endpoints")
    for a in range(k):
        for b in range(k):
            if nb[meet[a][b]] != meet[nb[a]][nb[b]]:
                problems.append(f"nabla not meet-preserving at {a},{b}")
            if nb[join[a][b]] != join[nb[a]][nb[b]]:
                problems.append(f"nabla not join-preserving at {a},{b}")
    for a in range(k):
        for b in range(k):
            for c in range(k):
                if leq[meet[nb[c]][a]][b] != leq[c][alg.dyn_imp[a][b]]:
                    problems.append(f"adjunction fails at {a},{b},{c}")
                if alg.heyt_imp is not None and leq[meet[c][a]][b] != leq[c][alg.heyt_imp[a][b]]:
                    problems.append(f"Heyting residuation fails at {a},{b},{c}")
    return problems


# ---------------------------------------------------------------------------
# Evaluation and refutation


def evaluate(f: Formula, alg: FiniteNablaAlgebra, valuation: dict[str, int]) -> int:
    if isinstance(f, Atom):
        return valuation[f.name]
    if isinstance(f, Top):
        return alg.top
    if isinstance(f, Bot):
        return alg.bot
    if isinstance(f, Nabla):
        return alg.nabla[evaluate(f.body, alg, valuation)]
    left = evaluate(f.left, alg, valuation)
    right = evaluate(f.right, alg, valuation)
    if isinstance(f, And):
        return alg.meet[left][right]
    if isinstance(f, Or):
        return alg.join[left][right]
    if isinstance(f, DynImp):
        return alg.dyn_imp[left][right]
    if alg.heyt_imp is None:
        raise ValueError("formula mentions => but the algebra has no Heyting implication")
    return alg.heyt_imp[left][right]


def sequent_value_holds(s: Sequent, alg: FiniteNablaAlgebra, valuation: dict[str, int]) -> bool:
    """Whether meet(antecedent) <= join(succedent) under the valuation; the
    empty antecedent reads as top and the empty succedent as bot."""
    left = alg.top
    for f in s.ant:
        left = alg.meet[left][evaluate(f, alg, valuation)]
    right = evaluate(s.suc[0], alg, valuation) if s.suc else alg.bot
    return alg.leq[left][right]


def is_valid_in(s: Sequent, alg: FiniteNablaAlgebra) -> bool:
    names = sorted(sequent_atoms(s.all_formulas()))
    for values in itertools.product(range(alg.size), repeat=len(names)):
        if not sequent_value_holds(s, alg, dict(zip(names, values))):
            return False
    return True


def refute(s: Sequent, max_size: int, need_heyting: bool) -> Optional[Countermodel]:
    """First countermodel in enumeration order, or None (no validity claim)."""
    if not need_heyting and not s.is_lstar():
        raise ValueError("sequents mentioning => require need_heyting=True")
    names = sorted(sequent_atoms(s.all_formulas()))
    for alg in enumerate_algebras(max_size, need_heyting):
        for values in itertools.product(range(alg.size), repeat=len(names)):
            valuation = dict(zip(names, values))
            if not sequent_value_holds(s, alg, valuation):
                return Countermodel(alg, tuple(sorted(valuation.items())), s)
    return None
