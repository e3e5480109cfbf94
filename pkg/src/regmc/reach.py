"""One-step successors and reachability over the finite quotient.

A step of the machine from class ``⟨l, R⟩`` is admitted by a transition when
the conjunction of its guard, the full (dis)equality description of the
canonical source valuation, and the assignment equations is satisfiable; the
successor classes are those whose description stays satisfiable alongside
that step formula.  ``post`` computes them without scanning the universe
per candidate: the congruence closure of the step formula forces a partial
skeleton on the updated registers — which pairs must match, which must
differ, which diagonal constants are required or ruled out — and unforced
entries (in particular whole rows of registers the transition leaves
unassigned, which may take any value) are free.  Filtering the universe by
the forced entries is exact because the valuation descriptions carry each
register's complete relationship to every other read register and constant.

``quotient_graph`` materializes the node set and shares successor work
across all matrices at a location: the forced skeleton depends only on the
sub-matrix over the registers the transition actually reads, so matrices
are grouped by that sub-matrix and each group is solved once.  Per group it
stores the compatible-successor index set, which lets reachability and the
branching-time operators run as boolean-vector passes rather than per-node
set operations.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from regmc import eqlogic
from regmc.core import RegisterAutomaton, RegisterTerm, Transition
from regmc.eqlogic import const, primed
from regmc.matrices import (
    ZERO,
    RepConfig,
    RepMatrix,
    canonical_valuation,
    formula_E_of_assignment,
    formula_E_of_valuation,
    system_of_guard,
    universe,
)

_INDEX_LIMIT = 4096  # compat sets up to this size are stored as index arrays


@lru_cache(maxsize=None)
def _universe_array(n: int, constants: tuple[int, ...]) -> np.ndarray:
    return np.array([m.rows for m in universe(n, constants)], dtype=np.int64)


@lru_cache(maxsize=None)
def _universe_index(n: int, constants: tuple[int, ...]) -> dict[RepMatrix, int]:
    return {m: k for k, m in enumerate(universe(n, constants))}


def _guard_registers(t: Transition) -> set[int]:
    out = set()
    for a in t.guard:
        for term in (a.left, a.right):
            if isinstance(term, RegisterTerm):
                out.add(term.index)
    return out


def _source_registers(t: Transition) -> set[int]:
    return {
        term.index for _, term in t.assignment.updates if isinstance(term, RegisterTerm)
    }


def _step_conditions(
    ra: RegisterAutomaton, t: Transition, w: tuple[int, ...]
) -> list[tuple[str, int, int]] | None:
    """Forced successor-matrix entries for one transition from valuation ``w``.

    Returns None when the step formula itself is unsatisfiable (the
    transition cannot fire from this class).  Otherwise each condition
    constrains one entry: ``eq``/``ne`` fix whether two updated registers
    are related, ``pin``/``avoid`` fix a diagonal against a constant.
    Registers outside the assignment are unconstrained.
    """
    step = eqlogic.merge(
        system_of_guard(t.guard),
        formula_E_of_valuation(w, ra.constants),
        formula_E_of_assignment(t.assignment),
    )
    clo = eqlogic.closure(step)
    if clo is None:
        return None
    targets = sorted(t.assignment.targets())
    conds: list[tuple[str, int, int]] = []
    for pos, i in enumerate(targets):
        pinned = clo.constant_of(primed(i))
        if pinned is not None:
            conds.append(("pin", i, pinned))
        else:
            for c in ra.constants:
                if clo.disequal(primed(i), const(c)):
                    conds.append(("avoid", i, c))
        for j in targets[pos + 1 :]:
            if clo.equal(primed(i), primed(j)):
                conds.append(("eq", i, j))
            elif clo.disequal(primed(i), primed(j)):
                conds.append(("ne", i, j))
    return conds


def _filter_universe(ua: np.ndarray, conds: list[tuple[str, int, int]]) -> np.ndarray:
    mask = np.ones(len(ua), dtype=bool)
    for kind, i, v in conds:
        if kind == "eq":
            mask &= ua[:, i, v] != ZERO
        elif kind == "ne":
            mask &= ua[:, i, v] == ZERO
        elif kind == "pin":
            mask &= ua[:, i, i] == v
        else:
            mask &= ua[:, i, i] != v
    return mask


def _validate_config(ra: RegisterAutomaton, c: RepConfig) -> None:
    if c.location not in ra.locations:
        raise ValueError(f"unknown location: {c.location}")
    if c.matrix.n != ra.num_registers:
        raise ValueError(
            f"matrix is over {c.matrix.n} registers, automaton has {ra.num_registers}"
        )


def post(ra: RegisterAutomaton, c: RepConfig) -> set[RepConfig]:
    """All one-step successor classes of ``c``.

    Raises ``ValueError`` for an unknown location, a matrix of the wrong
    size, or an inconsistent matrix.
    """
    _validate_config(ra, c)
    w = canonical_valuation(c.matrix, ra.constants)
    mats = universe(ra.num_registers, ra.constants)
    ua = _universe_array(ra.num_registers, ra.constants)
    out: set[RepConfig] = set()
    for t in ra.transitions:
        if t.source != c.location:
            continue
        conds = _step_conditions(ra, t, w)
        if conds is None:
            continue
        for k in np.nonzero(_filter_universe(ua, conds))[0]:
            out.add(RepConfig(t.target, mats[k]))
    return out


def _group_by_submatrix(
    ua: np.ndarray, reads: list[int]
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Group universe indices by their sub-matrix over the read registers."""
    m = len(ua)
    if not reads:
        return np.zeros(m, dtype=np.int32), [np.arange(m, dtype=np.int32)]
    flat = ua[:, reads][:, :, reads].reshape(m, -1)
    _, inverse = np.unique(flat, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1).astype(np.int32)
    order = np.argsort(inverse, kind="stable").astype(np.int32)
    boundaries = np.searchsorted(inverse[order], np.arange(inverse.max() + 1))
    return inverse, np.split(order, boundaries[1:].tolist())


def _is_full_identity(ra: RegisterAutomaton, t: Transition) -> bool:
    upd = t.assignment.updates
    return len(upd) == ra.num_registers and all(
        tgt == i and isinstance(term, RegisterTerm) and term.index == i
        for i, (tgt, term) in enumerate(upd)
    )


@dataclass
class _Kernel:
    """Per-transition successor machinery over universe indices.

    Either ``selfmask`` is set — the assignment is the identity on every
    register, so each source matrix steps exactly to itself wherever the
    guard is satisfiable — or the general form applies: ``key_of`` maps a
    universe index to its read-set group, ``members`` lists each group, and
    ``compat`` holds each group's successor indices (an int32 index array,
    a boolean vector for large sets, or None when the group cannot fire).
    """

    selfmask: np.ndarray | None = None
    key_of: np.ndarray | None = None
    members: list[np.ndarray] = field(default_factory=list)
    compat: list[np.ndarray | None] = field(default_factory=list)

    def successor_indices(self, u: int) -> np.ndarray:
        if self.selfmask is not None:
            return np.array([u], dtype=np.int32) if self.selfmask[u] else np.array([], dtype=np.int32)
        comp = self.compat[self.key_of[u]]
        if comp is None:
            return np.array([], dtype=np.int32)
        return comp if comp.dtype != np.bool_ else np.nonzero(comp)[0]


def _build_kernel(
    ra: RegisterAutomaton,
    t: Transition,
    mats: tuple[RepMatrix, ...],
    ua: np.ndarray,
) -> _Kernel:
    constants = ra.constants
    if _is_full_identity(ra, t):
        _, groups = _group_by_submatrix(ua, sorted(_guard_registers(t)))
        selfmask = np.zeros(len(ua), dtype=bool)
        for members in groups:
            w = canonical_valuation(mats[members[0]], constants)
            step = eqlogic.merge(
                system_of_guard(t.guard), formula_E_of_valuation(w, constants)
            )
            if eqlogic.is_consistent(step):
                selfmask[members] = True
        return _Kernel(selfmask=selfmask)
    reads = sorted(_guard_registers(t) | _source_registers(t))
    key_of, groups = _group_by_submatrix(ua, reads)
    compat: list[np.ndarray | None] = []
    for members in groups:
        w = canonical_valuation(mats[members[0]], constants)
        conds = _step_conditions(ra, t, w)
        if conds is None:
            compat.append(None)
            continue
        mask = _filter_universe(ua, conds)
        idx = np.nonzero(mask)[0].astype(np.int32)
        compat.append(idx if len(idx) <= _INDEX_LIMIT else mask)
    return _Kernel(key_of=key_of, members=groups, compat=compat)


@dataclass
class QuotientGraph:
    """The full abstract transition system of one automaton.

    Nodes are every (location, universe matrix) pair; edges are the
    one-step successor relation.  Successor work is shared per transition
    across matrices with the same read-set sub-matrix, and stored in vector
    form so whole-graph fixpoints run as boolean passes.
    """

    ra: RegisterAutomaton
    matrices: tuple[RepMatrix, ...]
    _index: dict[RepMatrix, int]
    _kernels: list[_Kernel]
    _node_cache: frozenset[RepConfig] | None = field(default=None, repr=False)

    @property
    def nodes(self) -> set[RepConfig]:
        if self._node_cache is None:
            self._node_cache = frozenset(
                RepConfig(l, m) for l in self.ra.locations for m in self.matrices
            )
        return set(self._node_cache)

    def edges(self, node: RepConfig) -> set[RepConfig]:
        u = self._node_index(node)
        out: set[RepConfig] = set()
        for t, ker in zip(self.ra.transitions, self._kernels):
            if t.source != node.location:
                continue
            out.update(
                RepConfig(t.target, self.matrices[k])
                for k in ker.successor_indices(u)
            )
        return out

    def _node_index(self, node: RepConfig) -> int:
        if node.location not in self.ra.locations:
            raise ValueError(f"unknown location: {node.location}")
        u = self._index.get(node.matrix)
        if u is None:
            raise ValueError("matrix is not a universe member")
        return u

    # --- boolean-vector plumbing shared with the branching-time operators ---

    def _empty_masks(self) -> dict[str, np.ndarray]:
        return {l: np.zeros(len(self.matrices), dtype=bool) for l in self.ra.locations}

    def _full_masks(self) -> dict[str, np.ndarray]:
        return {l: np.ones(len(self.matrices), dtype=bool) for l in self.ra.locations}

    def _masks_of(self, configs: Iterable[RepConfig]) -> dict[str, np.ndarray]:
        masks = self._empty_masks()
        for c in configs:
            masks[c.location][self._node_index(c)] = True
        return masks

    def _labelset(self, masks: dict[str, np.ndarray]) -> set[RepConfig]:
        return {
            RepConfig(l, self.matrices[k])
            for l, mask in masks.items()
            for k in np.nonzero(mask)[0]
        }

    def _ex_masks(self, target: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
        """Sources with at least one successor inside ``target``."""
        out = self._empty_masks()
        for t, ker in zip(self.ra.transitions, self._kernels):
            tm = target[t.target]
            res = out[t.source]
            if ker.selfmask is not None:
                res |= ker.selfmask & tm
                continue
            for members, comp in zip(ker.members, ker.compat):
                if comp is None or res[members].all():
                    continue
                hit = tm[comp].any() if comp.dtype != np.bool_ else (tm & comp).any()
                if hit:
                    res[members] = True
        return out

    def _reachable_masks(self) -> dict[str, np.ndarray]:
        reached = self._empty_masks()
        reached[self.ra.initial][:] = True
        changed = True
        while changed:
            changed = False
            for t, ker in zip(self.ra.transitions, self._kernels):
                src = reached[t.source]
                dst = reached[t.target]
                if ker.selfmask is not None:
                    add = ker.selfmask & src & ~dst
                    if add.any():
                        dst |= add
                        changed = True
                    continue
                for members, comp in zip(ker.members, ker.compat):
                    if comp is None or not src[members].any():
                        continue
                    if comp.dtype != np.bool_:
                        if not dst[comp].all():
                            dst[comp] = True
                            changed = True
                    else:
                        if (comp & ~dst).any():
                            dst |= comp
                            changed = True
        return reached


def quotient_graph(ra: RegisterAutomaton, threads: int | None = None) -> QuotientGraph:
    """Build the abstract transition system, once, for shared use.

    ``threads=None`` reads ``REGMC_THREADS`` (default 0).  0 or 1 builds
    sequentially; larger values fan independent per-transition kernels out
    to a thread pool.  The result is identical either way.
    """
    if threads is None:
        raw = os.environ.get("REGMC_THREADS", "0")
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"REGMC_THREADS must be a non-negative integer, got {raw!r}")
    if threads < 0:
        raise ValueError(f"thread count must be non-negative, got {threads}")
    mats = universe(ra.num_registers, ra.constants)
    ua = _universe_array(ra.num_registers, ra.constants)
    if threads > 1 and len(ra.transitions) > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(ra.transitions))) as pool:
            kernels = list(pool.map(lambda t: _build_kernel(ra, t, mats, ua), ra.transitions))
    else:
        kernels = [_build_kernel(ra, t, mats, ua) for t in ra.transitions]
    return QuotientGraph(ra, mats, _universe_index(ra.num_registers, ra.constants), kernels)


def reach(ra: RegisterAutomaton, target: RepConfig) -> bool:
    """Whether ``target`` is reachable from any initial-location class."""
    _validate_config(ra, target)
    canonical_valuation(target.matrix, ra.constants)  # rejects inconsistent targets
    graph = quotient_graph(ra)
    return bool(
        graph._reachable_masks()[target.location][graph._index[target.matrix]]
    )


def reachable_set(ra: RegisterAutomaton) -> set[RepConfig]:
    """Least set of classes containing every initial one and closed under post."""
    graph = quotient_graph(ra)
    return graph._labelset(graph._reachable_masks())
