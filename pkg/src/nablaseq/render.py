"""Proof display: indented ASCII trees and standalone bussproofs LaTeX."""

from __future__ import annotations

from .kernel import Hypothesis, Node, ProofTree, Rule
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
)

_ASCII_NAMES = {
    Rule.IDP: "Id^p",
    Rule.ID: "Id",
    Rule.LBOT: "L⊥",
    Rule.RTOP: "R⊤",
    Rule.LW: "LW",
    Rule.LW1: "Lw",
    Rule.RW: "Rw",
    Rule.LC: "Lc",
    Rule.CUT: "cut",
    Rule.LAND_N: "L∧^{}",
    Rule.LOR_N: "L∨^{}",
    Rule.LDYNIMP_N: "L→^{}",
    Rule.LHEYTIMP_N: "L⊃^{}",
    Rule.LAND1: "L∧₁",
    Rule.LAND2: "L∧₂",
    Rule.LOR: "L∨",
    Rule.LDYNIMP: "L→",
    Rule.LHEYTIMP: "L⊃",
    Rule.RAND: "R∧",
    Rule.ROR1: "R∨₁",
    Rule.ROR2: "R∨₂",
    Rule.RDYNIMP: "R→",
    Rule.RHEYTIMP: "R⊃",
    Rule.N: "N",
}


def rule_label(t: Node) -> str:
    name = _ASCII_NAMES[t.inst.rule]
    if "{}" in name:
        return name.replace("{}", str(t.inst.n))
    if t.inst.rule is Rule.CUT and t.inst.cut_exponent:
        return f"cut^{t.inst.cut_exponent}"
    return name


def render_ascii(t: ProofTree, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(t, Hypothesis):
        return f"{pad}{print_sequent(t.sequent)}   [hyp]"
    lines = [f"{pad}{print_sequent(t.sequent)}   [{rule_label(t)}]"]
    for c in t.children:
        lines.append(render_ascii(c, indent + 1))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# LaTeX

_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 0, 1, 2, 3


def _latex_prec(f: Formula) -> int:
    if isinstance(f, (DynImp, HeytImp)):
        return _PREC_IMP
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    return _PREC_UNARY


def latex_formula(f: Formula, minimum: int = 0) -> str:
    p = _latex_prec(f)
    if isinstance(f, Atom):
        s = f.name
    elif isinstance(f, Top):
        s = r"\top"
    elif isinstance(f, Bot):
        s = r"\bot"
    elif isinstance(f, Nabla):
        s = r"\nabla " + latex_formula(f.body, _PREC_UNARY)
    elif isinstance(f, And):
        s = latex_formula(f.left, _PREC_AND) + r" \wedge " + latex_formula(f.right, _PREC_AND + 1)
    elif isinstance(f, Or):
        s = latex_formula(f.left, _PREC_OR) + r" \vee " + latex_formula(f.right, _PREC_OR + 1)
    elif isinstance(f, DynImp):
        s = latex_formula(f.left, _PREC_IMP + 1) + r" \to " + latex_formula(f.right, _PREC_IMP)
    else:
        s = latex_formula(f.left, _PREC_IMP + 1) + r" \supset " + latex_formula(f.right, _PREC_IMP)
    return "(" + s + ")" if p < minimum else s


def latex_sequent(s: Sequent) -> str:
    left = ", ".join(latex_formula(f) for f in s.ant)
    right = latex_formula(s.suc[0]) if s.suc else ""
    return f"{left} \\Rightarrow {right}".strip()


_LATEX_NAMES = {
    Rule.IDP: r"Id^{p}",
    Rule.ID: "Id",
    Rule.LBOT: r"L\bot",
    Rule.RTOP: r"R\top",
    Rule.LW: "LW",
    Rule.LW1: "Lw",
    Rule.RW: "Rw",
    Rule.LC: "Lc",
    Rule.CUT: "cut",
    Rule.LAND_N: r"L\wedge^{{{n}}}",
    Rule.LOR_N: r"L\vee^{{{n}}}",
    Rule.LDYNIMP_N: r"L{{\to}}^{{{n}}}",
    Rule.LHEYTIMP_N: r"L{{\supset}}^{{{n}}}",
    Rule.LAND1: r"L\wedge_1",
    Rule.LAND2: r"L\wedge_2",
    Rule.LOR: r"L\vee",
    Rule.LDYNIMP: r"L{\to}",
    Rule.LHEYTIMP: r"L{\supset}",
    Rule.RAND: r"R\wedge",
    Rule.ROR1: r"R\vee_1",
    Rule.ROR2: r"R\vee_2",
    Rule.RDYNIMP: r"R{\to}",
    Rule.RHEYTIMP: r"R{\supset}",
    Rule.N: "N",
}

_INFER = {0: r"\UnaryInfC", 1: r"\UnaryInfC", 2: r"\BinaryInfC"}


def _latex_node(t: ProofTree, out: list[str]) -> None:
    if isinstance(t, Hypothesis):
        out.append(r"\AxiomC{$\langle " + latex_sequent(t.sequent) + r" \rangle$}")
        return
    for c in t.children:
        _latex_node(c, out)
    name = _LATEX_NAMES[t.inst.rule]
    if "{n}" in name:
        name = name.format(n=t.inst.n)
    if not t.children:
        out.append(r"\AxiomC{}")
    out.append(rf"\RightLabel{{\scriptsize $({name})$}}")
    out.append(_INFER[len(t.children)] + "{$" + latex_sequent(t.sequent) + "$}")


def render_latex(t: ProofTree) -> str:
    body: list[str] = []
    _latex_node(t, body)
    lines = [
        r"\documentclass{article}",
        r"\usepackage{bussproofs}",
        r"\begin{document}",
        r"\begin{prooftree}",
        *body,
        r"\end{prooftree}",
        r"\end{document}",
    ]
    return "\n".join(lines) + "\n"


def render(t: ProofTree, fmt: str) -> str:
    if fmt == "ascii":
        return render_ascii(t) + "\n"
    if fmt == "latex":
        return render_latex(t)
    raise ValueError(f"unknown render format {fmt!r} (ascii or latex)")
