"""Finite groupoids as validated index tables.

A groupoid is stored as integer tables over morphism indices 0..N-1 and
object indices 0..n-1: source, target, unit, inverse, and a partial
composition table ``comp``.  ``comp(i, j)`` encodes gamma_i o gamma_j
("first j, then i") and is defined exactly when ``source(i) == target(j)``.

Values are immutable once built.  The only way to obtain a
:class:`FiniteGroupoid` is through :func:`build`, which canonicalizes the
morphism order and runs the full (exhaustive) axiom validation, so every
downstream operation may assume the axioms hold.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np

from ._union_find import UnionFind
from .errors import (
    DuplicateLabel,
    EmptyGroupoid,
    EmptyRestriction,
    GroupoidAxiomError,
    IndexOutOfRange,
    NotComposable,
)

#: Above this morphism count the composition table is kept as a dict
#: instead of a dense N x N array.  Overridable via GPDKIT_MAX_N.
DENSE_COMP_LIMIT = 1024


def _dense_limit() -> int:
    raw = os.environ.get("GPDKIT_MAX_N")
    if raw is None:
        return DENSE_COMP_LIMIT
    try:
        return int(raw)
    except ValueError:
        return DENSE_COMP_LIMIT


@dataclass
class GroupoidTables:
    """Mutable candidate tables; feed to :func:`validate` or :func:`build`."""

    object_labels: list[str]
    morphism_labels: list[str]
    source: list[int]
    target: list[int]
    unit: list[int]
    inverse: list[int]
    comp: dict[tuple[int, int], int]

    def copy(self) -> "GroupoidTables":
        return GroupoidTables(
            list(self.object_labels),
            list(self.morphism_labels),
            list(self.source),
            list(self.target),
            list(self.unit),
            list(self.inverse),
            dict(self.comp),
        )


@dataclass(frozen=True)
class Violation:
    axiom: str  # closure | source-target | units | associativity | inverses | involution
    morphisms: tuple[int, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]

    def by_axiom(self, axiom: str) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.axiom == axiom)


@dataclass(frozen=True)
class OrbitPartition:
    orbit_of: tuple[int, ...]
    orbits: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class IsotropyGroup:
    """Morphisms x -> x with the induced multiplication, in local indices."""

    morphisms: tuple[int, ...]  # parent morphism indices, ascending
    table: np.ndarray = field(compare=False)  # table[a, b] = local index of m_a o m_b
    identity: int = 0  # local index of the unit

    @property
    def order(self) -> int:
        return len(self.morphisms)


@dataclass(frozen=True)
class Component:
    """A connected component with index maps back into its parent."""

    groupoid: "FiniteGroupoid"
    object_map: tuple[int, ...]  # component object index -> parent object index
    morphism_map: tuple[int, ...]  # component morphism index -> parent morphism index


def _check_index_consistency(t: GroupoidTables) -> None:
    n = len(t.object_labels)
    N = len(t.morphism_labels)
    if n == 0:
        raise EmptyGroupoid("groupoid needs at least one object")
    if len(set(t.object_labels)) != n:
        raise DuplicateLabel("object labels are not distinct")
    if len(set(t.morphism_labels)) != N:
        raise DuplicateLabel("morphism labels are not distinct")
    for name, arr, length, bound in (
        ("source", t.source, N, n),
        ("target", t.target, N, n),
        ("unit", t.unit, n, N),
        ("inverse", t.inverse, N, N),
    ):
        if len(arr) != length:
            raise IndexOutOfRange(f"{name} table has length {len(arr)}, expected {length}")
        for v in arr:
            if not (0 <= v < bound):
                raise IndexOutOfRange(f"{name} entry {v} out of range [0, {bound})")
    for (i, j), k in t.comp.items():
        if not (0 <= i < N and 0 <= j < N and 0 <= k < N):
            raise IndexOutOfRange(f"comp entry ({i},{j})->{k} out of range [0, {N})")


def validate(tables: GroupoidTables) -> ValidationReport:
    """Exhaustively check the groupoid axioms on candidate tables.

    Malformed tables (out-of-range indices, duplicate labels) raise; axiom
    failures are collected into the report.  The associativity loop visits
    every composable triple, which is cubic in N and intentionally so: at
    desk scale an exhaustive certificate beats a sampled one.
    """
    _check_index_consistency(tables)
    n = len(tables.object_labels)
    N = len(tables.morphism_labels)
    s, t = tables.source, tables.target
    unit, inv = tables.unit, tables.inverse
    comp = tables.comp
    out: list[Violation] = []

    def mlabel(i: int) -> str:
        return tables.morphism_labels[i]

    # closure: comp defined exactly on composable pairs
    for (i, j), _ in comp.items():
        if s[i] != t[j]:
            out.append(
                Violation(
                    "closure",
                    (i, j),
                    f"comp({mlabel(i)},{mlabel(j)}) defined but source/target differ",
                )
            )
    composable = np.asarray(s)[:, None] == np.asarray(t)[None, :]
    defined = np.zeros((N, N), dtype=bool)
    for (i, j) in comp:
        defined[i, j] = True
    for i, j in np.argwhere(composable & ~defined).tolist():
        out.append(
            Violation(
                "closure",
                (i, j),
                f"composable pair ({mlabel(i)},{mlabel(j)}) missing from comp",
            )
        )

    # axiom a: endpoints of a composite
    for (i, j), k in comp.items():
        if s[i] != t[j]:
            continue  # already a closure violation
        if s[k] != s[j] or t[k] != t[i]:
            out.append(
                Violation(
                    "source-target",
                    (i, j, k),
                    f"comp({mlabel(i)},{mlabel(j)})={mlabel(k)} has wrong endpoints (axiom a)",
                )
            )

    # axiom b plus unit endpoint condition
    for x in range(n):
        u = unit[x]
        if s[u] != x or t[u] != x:
            out.append(
                Violation("units", (u,), f"unit({tables.object_labels[x]}) is not a loop at its object")
            )
    for j in range(N):
        left = comp.get((unit[t[j]], j))
        right = comp.get((j, unit[s[j]]))
        if left != j or right != j:
            out.append(
                Violation("units", (j,), f"unit laws fail for {mlabel(j)} (axiom b)")
            )

    # axiom e and the involution property
    for i in range(N):
        if comp.get((i, inv[i])) != unit[t[i]] or comp.get((inv[i], i)) != unit[s[i]]:
            out.append(
                Violation("inverses", (i,), f"{mlabel(i)} o {mlabel(inv[i])} is not a unit (axiom e)")
            )
        if inv[inv[i]] != i:
            out.append(
                Violation("involution", (i,), f"inverse(inverse({mlabel(i)})) != {mlabel(i)}")
            )

    # axiom c: associativity over composable triples
    by_source: list[list[int]] = [[] for _ in range(n)]
    for i in range(N):
        by_source[s[i]].append(i)
    for (j, k), m in comp.items():
        if s[j] != t[k]:
            continue
        for i in by_source[t[j]]:
            ij = comp.get((i, j))
            lhs = comp.get((ij, k)) if ij is not None else None
            rhs = comp.get((i, m))
            if lhs is None and rhs is None:
                continue  # missing entries are closure violations, not axiom c
            if lhs != rhs:
                out.append(
                    Violation(
                        "associativity",
                        (i, j, k),
                        f"({mlabel(i)} o {mlabel(j)}) o {mlabel(k)} != "
                        f"{mlabel(i)} o ({mlabel(j)} o {mlabel(k)}) (axiom c)",
                    )
                )

    return ValidationReport(ok=not out, violations=tuple(out))


def _canonical_permutation(t: GroupoidTables) -> list[int]:
    """New index -> old index: units first (object order), then (target, source, label)."""
    unit_set = set(t.unit)
    order = [t.unit[x] for x in range(len(t.object_labels))]
    rest = [i for i in range(len(t.morphism_labels)) if i not in unit_set]
    rest.sort(key=lambda i: (t.target[i], t.source[i], t.morphism_labels[i]))
    return order + rest


class FiniteGroupoid:
    """An immutable, validated finite groupoid.

    Construct through :func:`build`; direct instantiation bypasses
    validation and is reserved for internal use.
    """

    __slots__ = (
        "object_labels",
        "morphism_labels",
        "source",
        "target",
        "unit",
        "inverse",
        "_comp_dense",
        "_comp_sparse",
        "comp_pairs",
        "canonical_hash",
    )

    def __init__(
        self,
        object_labels: tuple[str, ...],
        morphism_labels: tuple[str, ...],
        source: np.ndarray,
        target: np.ndarray,
        unit: np.ndarray,
        inverse: np.ndarray,
        comp: dict[tuple[int, int], int],
    ):
        self.object_labels = tuple(object_labels)
        self.morphism_labels = tuple(morphism_labels)
        self.source = source
        self.target = target
        self.unit = unit
        self.inverse = inverse
        for arr in (self.source, self.target, self.unit, self.inverse):
            arr.flags.writeable = False
        N = len(morphism_labels)
        items = sorted(comp.items())
        if N <= _dense_limit():
            dense = np.full((N, N), -1, dtype=np.int64)
            for (i, j), k in items:
                dense[i, j] = k
            dense.flags.writeable = False
            self._comp_dense = dense
            self._comp_sparse = None
        else:
            self._comp_dense = None
            self._comp_sparse = dict(items)
        # composable pairs as parallel index arrays (j, k, result i); the
        # workhorse of convolution, validation re-checks and regular matrices
        jj = np.fromiter((p[0] for p, _ in items), dtype=np.int64, count=len(items))
        kk = np.fromiter((p[1] for p, _ in items), dtype=np.int64, count=len(items))
        ii = np.fromiter((v for _, v in items), dtype=np.int64, count=len(items))
        for arr in (jj, kk, ii):
            arr.flags.writeable = False
        self.comp_pairs = (jj, kk, ii)
        self.canonical_hash = hashlib.sha256(self.to_json().encode()).hexdigest()

    # -- basic shape ---------------------------------------------------

    @property
    def n_objects(self) -> int:
        return len(self.object_labels)

    @property
    def n_morphisms(self) -> int:
        return len(self.morphism_labels)

    def __repr__(self) -> str:
        return f"FiniteGroupoid(n={self.n_objects}, N={self.n_morphisms})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGroupoid):
            return NotImplemented
        return (
            self.object_labels == other.object_labels
            and self.morphism_labels == other.morphism_labels
            and self.canonical_hash == other.canonical_hash
        )

    def __hash__(self) -> int:
        return hash(self.canonical_hash)

    # -- composition ---------------------------------------------------

    def comp_or_none(self, i: int, j: int) -> int | None:
        if not (0 <= i < self.n_morphisms and 0 <= j < self.n_morphisms):
            raise IndexOutOfRange(f"morphism index out of range: ({i},{j})")
        if self._comp_dense is not None:
            k = int(self._comp_dense[i, j])
            return None if k < 0 else k
        return self._comp_sparse.get((i, j))

    def compose(self, i: int, j: int) -> int:
        """gamma_i o gamma_j (first j, then i); NotComposable if undefined."""
        k = self.comp_or_none(i, j)
        if k is None:
            raise NotComposable(i, j)
        return k

    def comp_items(self):
        jj, kk, ii = self.comp_pairs
        return zip(jj.tolist(), kk.tolist(), ii.tolist())

    # -- structure -----------------------------------------------------

    def orbits(self) -> OrbitPartition:
        uf = UnionFind(self.n_objects)
        for i in range(self.n_morphisms):
            uf.union(int(self.source[i]), int(self.target[i]))
        groups = uf.groups()
        orbit_of = [0] * self.n_objects
        for oid, members in enumerate(groups):
            for x in members:
                orbit_of[x] = oid
        return OrbitPartition(tuple(orbit_of), tuple(tuple(m) for m in groups))

    def is_connected(self) -> bool:
        return len(self.orbits().orbits) == 1

    def is_principal(self) -> bool:
        pairs = set(zip(self.source.tolist(), self.target.tolist()))
        return len(pairs) == self.n_morphisms

    def isotropy_group(self, x: int) -> IsotropyGroup:
        if not (0 <= x < self.n_objects):
            raise IndexOutOfRange(f"object index {x} out of range")
        members = [
            i
            for i in range(self.n_morphisms)
            if self.source[i] == x and self.target[i] == x
        ]
        local = {m: a for a, m in enumerate(members)}
        m = len(members)
        table = np.empty((m, m), dtype=np.int64)
        for a, ga in enumerate(members):
            for b, gb in enumerate(members):
                table[a, b] = local[self.compose(ga, gb)]
        table.flags.writeable = False
        return IsotropyGroup(tuple(members), table, local[int(self.unit[x])])

    def decompose(self) -> list[Component]:
        """One full subgroupoid per orbit, with provenance index maps."""
        parts = self.orbits().orbits
        return [self._subgroupoid(list(objs)) for objs in parts]

    def restrict(self, objects) -> "FiniteGroupoid":
        """Full subgroupoid on the given object subset."""
        objs = sorted(set(int(x) for x in objects))
        if not objs:
            raise EmptyRestriction("cannot restrict to an empty object set")
        for x in objs:
            if not (0 <= x < self.n_objects):
                raise IndexOutOfRange(f"object index {x} out of range")
        return self._subgroupoid(objs).groupoid

    def _subgroupoid(self, objs: list[int]) -> Component:
        keep = set(objs)
        morphs = [
            i
            for i in range(self.n_morphisms)
            if self.source[i] in keep and self.target[i] in keep
        ]
        obj_new = {x: a for a, x in enumerate(objs)}
        mor_new = {i: a for a, i in enumerate(morphs)}
        comp = {}
        for j, k, i in self.comp_items():
            if j in mor_new and k in mor_new:
                comp[(mor_new[j], mor_new[k])] = mor_new[i]
        tables = GroupoidTables(
            object_labels=[self.object_labels[x] for x in objs],
            morphism_labels=[self.morphism_labels[i] for i in morphs],
            source=[obj_new[int(self.source[i])] for i in morphs],
            target=[obj_new[int(self.target[i])] for i in morphs],
            unit=[mor_new[int(self.unit[x])] for x in objs],
            inverse=[mor_new[int(self.inverse[i])] for i in morphs],
            comp=comp,
        )
        sub, perm = _build_with_permutation(tables)
        # perm maps new canonical index -> tables index -> parent index
        return Component(
            groupoid=sub,
            object_map=tuple(objs),
            morphism_map=tuple(morphs[p] for p in perm),
        )

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "objects": list(self.object_labels),
            "morphisms": [
                {
                    "label": self.morphism_labels[i],
                    "source": int(self.source[i]),
                    "target": int(self.target[i]),
                    "inverse": int(self.inverse[i]),
                }
                for i in range(self.n_morphisms)
            ],
            "comp": sorted([int(j), int(k), int(i)] for j, k, i in self.comp_items()),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    def to_tables(self) -> GroupoidTables:
        """A fresh mutable copy of the defining tables."""
        return GroupoidTables(
            list(self.object_labels),
            list(self.morphism_labels),
            self.source.tolist(),
            self.target.tolist(),
            self.unit.tolist(),
            self.inverse.tolist(),
            {(j, k): i for j, k, i in self.comp_items()},
        )


def _build_with_permutation(tables: GroupoidTables) -> tuple[FiniteGroupoid, list[int]]:
    report = validate(tables)
    if not report.ok:
        raise GroupoidAxiomError(report)
    perm = _canonical_permutation(tables)  # new -> old
    old2new = {old: new for new, old in enumerate(perm)}
    g = FiniteGroupoid(
        object_labels=tuple(tables.object_labels),
        morphism_labels=tuple(tables.morphism_labels[p] for p in perm),
        source=np.array([tables.source[p] for p in perm], dtype=np.int64),
        target=np.array([tables.target[p] for p in perm], dtype=np.int64),
        unit=np.array([old2new[u] for u in tables.unit], dtype=np.int64),
        inverse=np.array([old2new[tables.inverse[p]] for p in perm], dtype=np.int64),
        comp={
            (old2new[i], old2new[j]): old2new[k] for (i, j), k in tables.comp.items()
        },
    )
    return g, perm


def build(tables: GroupoidTables) -> FiniteGroupoid:
    """Validate candidate tables and freeze them into a groupoid.

    Morphisms are reindexed canonically: units at 0..n-1 in object order,
    the rest sorted by (target, source, label).  Raises
    :class:`GroupoidAxiomError` listing all violations on failure.
    """
    g, _ = _build_with_permutation(tables)
    return g


def from_json_dict(data: dict) -> FiniteGroupoid:
    morphs = data["morphisms"]
    tables = GroupoidTables(
        object_labels=list(data["objects"]),
        morphism_labels=[m["label"] for m in morphs],
        source=[int(m["source"]) for m in morphs],
        target=[int(m["target"]) for m in morphs],
        unit=[-1] * len(data["objects"]),
        inverse=[int(m["inverse"]) for m in morphs],
        comp={(int(i), int(j)): int(k) for i, j, k in data["comp"]},
    )
    # The unit table is not part of the JSON schema; recover unit(x) as the
    # loop at x that is a left unit for every morphism targeting x.  Any
    # remaining inconsistency is caught by the validation inside build().
    N = len(tables.morphism_labels)
    for x in range(len(tables.object_labels)):
        candidates = [
            u
            for u in range(N)
            if tables.source[u] == x
            and tables.target[u] == x
            and tables.comp.get((u, u)) == u
            and all(
                tables.comp.get((u, j)) == j
                for j in range(N)
                if tables.target[j] == x
            )
        ]
        if not candidates:
            raise IndexOutOfRange(f"no unit morphism found for object index {x}")
        tables.unit[x] = candidates[0]
    return build(tables)


def from_json(text: str) -> FiniteGroupoid:
    return from_json_dict(json.loads(text))


# Functional aliases; the methods carry the implementation.

def compose(g: FiniteGroupoid, i: int, j: int) -> int:
    return g.compose(i, j)


def orbits(g: FiniteGroupoid) -> OrbitPartition:
    return g.orbits()


def isotropy_group(g: FiniteGroupoid, x: int) -> IsotropyGroup:
    return g.isotropy_group(x)


def is_connected(g: FiniteGroupoid) -> bool:
    return g.is_connected()


def is_principal(g: FiniteGroupoid) -> bool:
    return g.is_principal()


def decompose(g: FiniteGroupoid) -> list[Component]:
    return g.decompose()
