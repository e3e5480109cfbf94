"""Branching-time (CTL) property checking over the quotient graph.

Formulas speak about locations and register (dis)equalities — exactly the
observations the finite quotient preserves — under the usual boolean and
path operators with next (EX), until (EU), and always-on-some-path (EG) as
the core; the remaining operators are abbreviations expanded at
construction time.  Satisfaction sets are computed by the standard labeling
recursion: atoms read the matrix entries directly, EU is a least fixpoint
of ``Z ↦ f₁ ∪ (f₀ ∩ EX Z)``, EG a greatest fixpoint of ``Z ↦ f ∩ EX Z``
started at the full labeling of ``f``.  A class satisfies a formula exactly
when every valuation in it does, so answers transfer verbatim to the
infinite concrete system; the test suite checks this against an
explicit-state checker over bounded concrete graphs.

The public operations exchange plain sets of configurations; internally
everything runs on per-location boolean vectors aligned with the universe
enumeration, with results memoized per structurally-equal subformula.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from regmc.matrices import ZERO, RepConfig
from regmc.reach import QuotientGraph, _universe_array


@dataclass(frozen=True)
class AtLocation:
    location: str


@dataclass(frozen=True)
class RegEq:
    i: int
    j: int


@dataclass(frozen=True)
class RegEqConst:
    i: int
    c: int


@dataclass(frozen=True)
class Not:
    f: CtlFormula


@dataclass(frozen=True)
class And:
    f0: CtlFormula
    f1: CtlFormula


@dataclass(frozen=True)
class EX:
    f: CtlFormula


@dataclass(frozen=True)
class EU:
    f0: CtlFormula
    f1: CtlFormula


@dataclass(frozen=True)
class EG:
    f: CtlFormula


CtlFormula = AtLocation | RegEq | RegEqConst | Not | And | EX | EU | EG

FALSE = Not(RegEq(0, 0))
TRUE = Not(FALSE)

LabelSet = set[RepConfig]


def or_(f0: CtlFormula, f1: CtlFormula) -> CtlFormula:
    return Not(And(Not(f0), Not(f1)))


def implies(f0: CtlFormula, f1: CtlFormula) -> CtlFormula:
    return Not(And(f0, Not(f1)))


def ax(f: CtlFormula) -> CtlFormula:
    return Not(EX(Not(f)))


def ef(f: CtlFormula) -> CtlFormula:
    return EU(TRUE, f)


def ag(f: CtlFormula) -> CtlFormula:
    return Not(ef(Not(f)))


def af(f: CtlFormula) -> CtlFormula:
    return Not(EG(Not(f)))


Masks = dict[str, np.ndarray]


def _ap_masks(graph: QuotientGraph, atom: CtlFormula) -> Masks:
    ra = graph.ra
    n = ra.num_registers
    ua = _universe_array(n, ra.constants)
    if isinstance(atom, AtLocation):
        if atom.location not in ra.locations:
            raise ValueError(f"unknown location: {atom.location}")
        masks = graph._empty_masks()
        masks[atom.location][:] = True
        return masks
    if isinstance(atom, RegEq):
        if not (0 <= atom.i < n and 0 <= atom.j < n):
            raise ValueError(f"register index out of range: {atom}")
        row = ua[:, atom.i, atom.j] != ZERO
    elif isinstance(atom, RegEqConst):
        if not 0 <= atom.i < n:
            raise ValueError(f"register index out of range: {atom}")
        row = ua[:, atom.i, atom.i] == atom.c
    else:
        raise ValueError(f"not an atomic formula: {atom}")
    return {l: row.copy() for l in ra.locations}


def _masks_equal(a: Masks, b: Masks) -> bool:
    return all(np.array_equal(a[l], b[l]) for l in a)


def _eu_masks(graph: QuotientGraph, m0: Masks, m1: Masks) -> Masks:
    out = {l: m.copy() for l, m in m1.items()}
    while True:
        ex = graph._ex_masks(out)
        nxt = {l: m1[l] | (m0[l] & ex[l]) for l in out}
        if _masks_equal(nxt, out):
            return out
        out = nxt


def _eg_masks(graph: QuotientGraph, s: Masks) -> Masks:
    out = {l: m.copy() for l, m in s.items()}
    while True:
        ex = graph._ex_masks(out)
        nxt = {l: out[l] & ex[l] for l in out}
        if _masks_equal(nxt, out):
            return out
        out = nxt


def _eval(graph: QuotientGraph, f: CtlFormula, memo: dict[CtlFormula, Masks]) -> Masks:
    hit = memo.get(f)
    if hit is not None:
        return hit
    if isinstance(f, (AtLocation, RegEq, RegEqConst)):
        out = _ap_masks(graph, f)
    elif isinstance(f, Not):
        inner = _eval(graph, f.f, memo)
        out = {l: ~m for l, m in inner.items()}
    elif isinstance(f, And):
        m0 = _eval(graph, f.f0, memo)
        m1 = _eval(graph, f.f1, memo)
        out = {l: m0[l] & m1[l] for l in m0}
    elif isinstance(f, EX):
        out = graph._ex_masks(_eval(graph, f.f, memo))
    elif isinstance(f, EU):
        out = _eu_masks(graph, _eval(graph, f.f0, memo), _eval(graph, f.f1, memo))
    elif isinstance(f, EG):
        out = _eg_masks(graph, _eval(graph, f.f, memo))
    else:
        raise ValueError(f"not a formula: {f!r}")
    memo[f] = out
    return out


def compute_ap(graph: QuotientGraph, atom: CtlFormula) -> LabelSet:
    """Configurations satisfying one atom; rejects non-atomic input."""
    return graph._labelset(_ap_masks(graph, atom))


def compute_not(graph: QuotientGraph, s: LabelSet) -> LabelSet:
    """Complement within the graph's node set."""
    return graph._labelset({l: ~m for l, m in graph._masks_of(s).items()})


def compute_and(s0: LabelSet, s1: LabelSet) -> LabelSet:
    return s0 & s1


def compute_ex(graph: QuotientGraph, s: LabelSet) -> LabelSet:
    """Configurations with at least one successor in ``s``."""
    return graph._labelset(graph._ex_masks(graph._masks_of(s)))


def compute_eu(graph: QuotientGraph, s0: LabelSet, s1: LabelSet) -> LabelSet:
    """Least fixpoint of ``Z ↦ s1 ∪ (s0 ∩ EX Z)``."""
    return graph._labelset(_eu_masks(graph, graph._masks_of(s0), graph._masks_of(s1)))


def compute_eg(graph: QuotientGraph, s: LabelSet) -> LabelSet:
    """Greatest fixpoint of ``Z ↦ s ∩ EX Z``, started at ``s``."""
    return graph._labelset(_eg_masks(graph, graph._masks_of(s)))


def compute_ctl(graph: QuotientGraph, f: CtlFormula) -> LabelSet:
    """All configurations satisfying ``f``, by memoized structural labeling."""
    return graph._labelset(_eval(graph, f, {}))


def model_check(graph: QuotientGraph, f: CtlFormula) -> bool:
    """Whether every initial-location configuration satisfies ``f``."""
    sat = _eval(graph, f, {})
    return bool(sat[graph.ra.initial].all())
