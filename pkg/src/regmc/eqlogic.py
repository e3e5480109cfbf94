"""Conjunctive (dis)equality constraints over an infinite value domain.

Everything the analyses in this package decide ultimately reduces to
questions about finite conjunctions of atoms ``u = v`` / ``u != v``, where
each side is a register, a primed register (the value a register takes
after a step), an action parameter, or a concrete natural number.  Over an
infinite domain this fragment is decided by plain union-find: merge the
equality classes, then look for a contradiction among the disequalities and
the constants pinned to each class.

The closure is also *complete* for entailment: a consistent system forces
``u = v`` only when both sides land in the same class, and ``u != v`` only
when the two classes are linked by a disequality or pinned to distinct
constants.  Any other atom can be broken by some assignment, because fresh
values are always available.  ``tests/test_eqlogic.py`` checks both
directions against brute-force enumeration over a small domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

Var = tuple[str, int]
Pair = tuple[Var, Var]

_REG = "x"
_PRIMED = "x'"
_PAR = "p"
_CONST = "c"


def reg(i: int) -> Var:
    """Register ``x_i`` (0-based)."""
    return (_REG, i)


def primed(i: int) -> Var:
    """Post-step value of register ``x_i``."""
    return (_PRIMED, i)


def par(k: int) -> Var:
    """Action parameter ``p_k`` (1-based, matching the surface syntax)."""
    return (_PAR, k)


def const(c: int) -> Var:
    """The concrete natural ``c`` used as a term."""
    return (_CONST, c)


def is_const(v: Var) -> bool:
    return v[0] == _CONST


class Atom(NamedTuple):
    lhs: Var
    rhs: Var
    equal: bool


def eq(u: Var, v: Var) -> Atom:
    return Atom(u, v, True)


def ne(u: Var, v: Var) -> Atom:
    return Atom(u, v, False)


def negate(a: Atom) -> Atom:
    return Atom(a.lhs, a.rhs, not a.equal)


@dataclass(frozen=True)
class ConstraintSystem:
    """A finite conjunction of (dis)equality atoms over a variable universe."""

    universe: frozenset[Var] = frozenset()
    equalities: tuple[Pair, ...] = ()
    disequalities: tuple[Pair, ...] = ()

    def __post_init__(self) -> None:
        for u, v in self.equalities + self.disequalities:
            if u not in self.universe or v not in self.universe:
                raise ValueError(f"atom mentions variables outside the universe: {u}, {v}")

    def atoms(self) -> tuple[Atom, ...]:
        return tuple(Atom(u, v, True) for u, v in self.equalities) + tuple(
            Atom(u, v, False) for u, v in self.disequalities
        )


def system(atoms: Iterable[Atom] = ()) -> ConstraintSystem:
    """Build a system from atoms, with the universe inferred."""
    uni: set[Var] = set()
    eqs: list[Pair] = []
    neqs: list[Pair] = []
    for a in atoms:
        uni.add(a.lhs)
        uni.add(a.rhs)
        (eqs if a.equal else neqs).append((a.lhs, a.rhs))
    return ConstraintSystem(frozenset(uni), tuple(eqs), tuple(neqs))


def conjoin(s: ConstraintSystem, a: Atom) -> ConstraintSystem:
    """Append one atom, extending the universe as needed."""
    pair = (a.lhs, a.rhs)
    return ConstraintSystem(
        s.universe | {a.lhs, a.rhs},
        s.equalities + (pair,) if a.equal else s.equalities,
        s.disequalities if a.equal else s.disequalities + (pair,),
    )


def merge(*systems: ConstraintSystem) -> ConstraintSystem:
    """Conjunction of several systems, with exact-duplicate atoms dropped."""
    uni: set[Var] = set()
    eqs: dict[Pair, None] = {}
    neqs: dict[Pair, None] = {}
    for s in systems:
        uni |= s.universe
        for p in s.equalities:
            eqs.setdefault(p)
        for p in s.disequalities:
            neqs.setdefault(p)
    return ConstraintSystem(frozenset(uni), tuple(eqs), tuple(neqs))


@dataclass
class Closure:
    """Equality classes of a consistent system.

    Records, per class, the constant it is pinned to (if any), and the
    disequality edges between classes.  Variables never mentioned in the
    system are implicitly singleton classes, so queries accept arbitrary
    variables.
    """

    _rep: dict[Var, Var]
    _constant: dict[Var, int]
    _diseq: frozenset[frozenset[Var]]

    def class_of(self, v: Var) -> Var:
        return self._rep.get(v, v)

    def constant_of(self, v: Var) -> int | None:
        """The concrete value forced on ``v``, or None."""
        r = self.class_of(v)
        c = self._constant.get(r)
        if c is None and is_const(r):
            return r[1]
        return c

    def equal(self, u: Var, v: Var) -> bool:
        """Whether ``u = v`` is forced."""
        return self.class_of(u) == self.class_of(v)

    def disequal(self, u: Var, v: Var) -> bool:
        """Whether ``u != v`` is forced."""
        ru, rv = self.class_of(u), self.class_of(v)
        if ru == rv:
            return False
        if frozenset((ru, rv)) in self._diseq:
            return True
        cu, cv = self.constant_of(ru), self.constant_of(rv)
        return cu is not None and cv is not None and cu != cv


def closure(s: ConstraintSystem) -> Closure | None:
    """Close ``s`` under equality reasoning; None if inconsistent.

    Inconsistency means: some class is pinned to two distinct constants,
    or a disequality connects a class to itself.
    """
    parent: dict[Var, Var] = {}
    rank: dict[Var, int] = {}

    def find(v: Var) -> Var:
        if v not in parent:
            parent[v] = v
            rank[v] = 0
            return v
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def union(u: Var, v: Var) -> None:
        ru, rv = find(u), find(v)
        if ru == rv:
            return
        if rank[ru] < rank[rv]:
            ru, rv = rv, ru
        parent[rv] = ru
        if rank[ru] == rank[rv]:
            rank[ru] += 1

    for u, v in s.equalities:
        union(u, v)

    constant: dict[Var, int] = {}
    for v in list(parent):
        if is_const(v):
            r = find(v)
            prev = constant.get(r)
            if prev is not None and prev != v[1]:
                return None
            constant[r] = v[1]

    diseq: set[frozenset[Var]] = set()
    for u, v in s.disequalities:
        ru, rv = find(u), find(v)
        if ru == rv:
            return None
        diseq.add(frozenset((ru, rv)))

    return Closure({v: find(v) for v in parent}, constant, frozenset(diseq))


def is_consistent(s: ConstraintSystem) -> bool:
    return closure(s) is not None


def entails(s: ConstraintSystem, a: Atom) -> bool:
    """Whether every assignment satisfying ``s`` satisfies ``a``.

    Decided as: ``s`` conjoined with the negation of ``a`` is inconsistent.
    An inconsistent system entails everything.
    """
    return not is_consistent(conjoin(s, negate(a)))
