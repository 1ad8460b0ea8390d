"""Canonical groupoid constructions: pairs, groups, actions, unions, restrictions.

The main orientation convention lives here and is worth spelling out once:
a pair morphism labeled "(x,y)" runs y -> x (source y, target x), so that
``(x,y) o (y,z) = (x,z)`` reads like matrix-unit multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .errors import DuplicateLabel, InvalidActionSpec, InvalidGroupTable
from .groupoid import FiniteGroupoid, GroupoidTables, build


@dataclass(frozen=True)
class GroupTable:
    """A finite group as labels plus a Cayley table, validated on creation."""

    element_labels: tuple[str, ...]
    identity: int
    mult: np.ndarray = field(compare=False)  # mult[i, j] = index of g_i g_j
    inv: np.ndarray = field(compare=False)

    def __post_init__(self):
        m = len(self.element_labels)
        if len(set(self.element_labels)) != m or m == 0:
            raise InvalidGroupTable("element labels must be nonempty and distinct")
        if self.mult.shape != (m, m):
            raise InvalidGroupTable(f"Cayley table shape {self.mult.shape} != ({m},{m})")
        if self.mult.min() < 0 or self.mult.max() >= m:
            raise InvalidGroupTable("Cayley table entries out of range")
        e = self.identity
        if not (0 <= e < m):
            raise InvalidGroupTable("identity index out of range")
        if not (np.all(self.mult[e] == np.arange(m)) and np.all(self.mult[:, e] == np.arange(m))):
            raise InvalidGroupTable(f"{self.element_labels[e]} is not a two-sided identity")
        for i in range(m):
            j = int(self.inv[i])
            if not (0 <= j < m) or self.mult[i, j] != e or self.mult[j, i] != e:
                raise InvalidGroupTable(f"no valid inverse recorded for {self.element_labels[i]}")
        for a in range(m):
            for b in range(m):
                ab = self.mult[a, b]
                for c in range(m):
                    if self.mult[ab, c] != self.mult[a, self.mult[b, c]]:
                        raise InvalidGroupTable(
                            f"associativity fails at ({self.element_labels[a]},"
                            f"{self.element_labels[b]},{self.element_labels[c]})"
                        )
        self.mult.flags.writeable = False
        self.inv.flags.writeable = False

    @property
    def order(self) -> int:
        return len(self.element_labels)

    @staticmethod
    def from_mult(element_labels, identity: int, mult: np.ndarray) -> "GroupTable":
        """Derive the inverse table from the Cayley table."""
        m = len(element_labels)
        mult = np.asarray(mult, dtype=np.int64)
        inv = np.full(m, -1, dtype=np.int64)
        for i in range(m):
            hits = np.flatnonzero(mult[i] == identity)
            if hits.size == 0:
                raise InvalidGroupTable(f"element {element_labels[i]} has no inverse")
            inv[i] = hits[0]
        return GroupTable(tuple(element_labels), identity, mult, inv)


def cyclic_group(n: int) -> GroupTable:
    labels = tuple("e" if k == 0 else f"g{k}" for k in range(n))
    mult = np.fromfunction(lambda i, j: (i + j) % n, (n, n), dtype=np.int64)
    return GroupTable.from_mult(labels, 0, mult.astype(np.int64))


def symmetric_group(n: int) -> GroupTable:
    """S_n as permutation tuples under apply-right-first composition."""
    elems = sorted(permutations(range(n)))
    idx = {p: i for i, p in enumerate(elems)}
    labels = tuple("s" + "".join(str(v) for v in p) for p in elems)
    m = len(elems)
    mult = np.empty((m, m), dtype=np.int64)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            mult[i, j] = idx[tuple(a[b[k]] for k in range(n))]
    return GroupTable.from_mult(labels, idx[tuple(range(n))], mult)


@dataclass(frozen=True)
class ActionSpec:
    """A group action act[g, x] -> point, validated on creation."""

    group: GroupTable
    set_labels: tuple[str, ...]
    act: np.ndarray = field(compare=False)  # shape (order, points)

    def __post_init__(self):
        p = len(self.set_labels)
        m = self.group.order
        if p == 0 or len(set(self.set_labels)) != p:
            raise InvalidActionSpec("point labels must be nonempty and distinct")
        if self.act.shape != (m, p):
            raise InvalidActionSpec(f"action table shape {self.act.shape} != ({m},{p})")
        if self.act.min() < 0 or self.act.max() >= p:
            raise InvalidActionSpec("action table entries out of range")
        e = self.group.identity
        if not np.all(self.act[e] == np.arange(p)):
            raise InvalidActionSpec("identity must act trivially")
        for g in range(m):
            for h in range(m):
                gh = self.group.mult[g, h]
                if not np.all(self.act[g, self.act[h]] == self.act[gh]):
                    raise InvalidActionSpec(
                        f"action incompatible with multiplication at "
                        f"({self.group.element_labels[g]},{self.group.element_labels[h]})"
                    )
        self.act.flags.writeable = False


def pair_groupoid(labels) -> FiniteGroupoid:
    """All ordered pairs over the labels; "(x,y)" runs y -> x."""
    labels = list(labels)
    if len(set(labels)) != len(labels):
        raise DuplicateLabel("pair groupoid labels must be distinct")
    n = len(labels)
    morphs = [(x, y) for x in range(n) for y in range(n)]
    idx = {m: i for i, m in enumerate(morphs)}
    comp = {}
    for (x, y) in morphs:
        for (y2, z) in morphs:
            if y == y2:
                comp[(idx[(x, y)], idx[(y2, z)])] = idx[(x, z)]
    tables = GroupoidTables(
        object_labels=labels,
        morphism_labels=[f"({labels[x]},{labels[y]})" for x, y in morphs],
        source=[y for _, y in morphs],
        target=[x for x, _ in morphs],
        unit=[idx[(x, x)] for x in range(n)],
        inverse=[idx[(y, x)] for x, y in morphs],
        comp=comp,
    )
    return build(tables)


def group_as_groupoid(gt: GroupTable, object_label: str = "pt") -> FiniteGroupoid:
    """One object; morphisms are the group elements; composition is total."""
    m = gt.order
    comp = {(i, j): int(gt.mult[i, j]) for i in range(m) for j in range(m)}
    tables = GroupoidTables(
        object_labels=[object_label],
        morphism_labels=list(gt.element_labels),
        source=[0] * m,
        target=[0] * m,
        unit=[gt.identity],
        inverse=gt.inv.tolist(),
        comp=comp,
    )
    return build(tables)


def action_groupoid(a: ActionSpec) -> FiniteGroupoid:
    """Morphisms (g,x) with source x and target g.x; composition multiplies
    the group parts: (g',gx) o (g,x) = (g'g, x)."""
    m = a.group.order
    p = len(a.set_labels)
    morphs = [(g, x) for g in range(m) for x in range(p)]
    idx = {gm: i for i, gm in enumerate(morphs)}
    comp = {}
    for (g2, x2) in morphs:
        for (g, x) in morphs:
            if x2 == a.act[g, x]:
                comp[(idx[(g2, x2)], idx[(g, x)])] = idx[(int(a.group.mult[g2, g]), x)]
    e = a.group.identity
    tables = GroupoidTables(
        object_labels=list(a.set_labels),
        morphism_labels=[
            f"({a.group.element_labels[g]},{a.set_labels[x]})" for g, x in morphs
        ],
        source=[x for _, x in morphs],
        target=[int(a.act[g, x]) for g, x in morphs],
        unit=[idx[(e, x)] for x in range(p)],
        inverse=[idx[(int(a.group.inv[g]), int(a.act[g, x]))] for g, x in morphs],
        comp=comp,
    )
    return build(tables)


def restrict(g: FiniteGroupoid, objects) -> FiniteGroupoid:
    return g.restrict(objects)


def disjoint_union(g1: FiniteGroupoid, g2: FiniteGroupoid) -> FiniteGroupoid:
    """Concatenate the two groupoids; labels are namespaced "L."/"R."."""
    n1, N1 = g1.n_objects, g1.n_morphisms
    comp = {(j, k): i for j, k, i in g1.comp_items()}
    comp.update({(j + N1, k + N1): i + N1 for j, k, i in g2.comp_items()})
    tables = GroupoidTables(
        object_labels=["L." + s for s in g1.object_labels]
        + ["R." + s for s in g2.object_labels],
        morphism_labels=["L." + s for s in g1.morphism_labels]
        + ["R." + s for s in g2.morphism_labels],
        source=g1.source.tolist() + [s + n1 for s in g2.source.tolist()],
        target=g1.target.tolist() + [t + n1 for t in g2.target.tolist()],
        unit=g1.unit.tolist() + [u + N1 for u in g2.unit.tolist()],
        inverse=g1.inverse.tolist() + [v + N1 for v in g2.inverse.tolist()],
        comp=comp,
    )
    return build(tables)
