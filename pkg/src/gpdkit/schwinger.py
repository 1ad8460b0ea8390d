"""Selective measurements over merged event frames and their 2-cell algebra.

A frame is a family of mutually distinguishable outcomes.  Events of
different frames may be identified; the resulting classes form the event
space.  A measurement symbol M(a', a) filters on outcome a and re-emits
with outcome a', so its source is a and its target a'.  Symbols compose
like transitions: M(a'', a') o M(a', a) = M(a'', a), and composing across
frames yields the bridging symbols whose pairs define transformations
(2-cells) between parallel transitions.

A 2-cell phi(a, a'; b, b') : M(a, a') => M(b, b') is determined by the
bridge pair M(b, a) and M(a', b'); it composes vertically (chaining
transformed transitions) and horizontally (composing the underlying
transitions), and the two laws satisfy the exchange identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._union_find import UnionFind
from .constructors import pair_groupoid
from .errors import (
    DuplicateLabel,
    IntraFrameIdentification,
    NotComposable,
    NotHorizontallyComposable,
    NotVerticallyComposable,
    ShapeMismatch,
    UnknownEvent,
)
from .groupoid import FiniteGroupoid


@dataclass(frozen=True)
class Frame:
    label: str
    events: tuple[str, ...]

    def __post_init__(self):
        if not self.events:
            raise UnknownEvent(f"frame {self.label} declares no events")
        if len(set(self.events)) != len(self.events):
            raise DuplicateLabel(f"frame {self.label} repeats an event label")


class EventSpace:
    """Frames plus cross-frame identifications, merged into event classes.

    Classes are numbered by first occurrence while scanning frames in
    declaration order; each class is named after its first member, e.g.
    "A.a2".
    """

    __slots__ = ("frames", "identifications", "classes", "class_labels", "_class_of")

    def __init__(self, frames, identifications=()):
        frames = tuple(frames)
        if len(set(f.label for f in frames)) != len(frames):
            raise DuplicateLabel("frame labels must be distinct")
        if not frames:
            raise UnknownEvent("an event space needs at least one frame")
        qualified = [(f.label, e) for f in frames for e in f.events]
        index = {q: i for i, q in enumerate(qualified)}
        uf = UnionFind(len(qualified))
        identifications = tuple(
            ((fa, ea), (fb, eb)) for (fa, ea), (fb, eb) in identifications
        )
        for qa, qb in identifications:
            for q in (qa, qb):
                if q not in index:
                    raise UnknownEvent(f"identification refers to unknown event {q[0]}.{q[1]}")
            if qa[0] == qb[0]:
                raise IntraFrameIdentification(
                    f"cannot identify {qa[0]}.{qa[1]} with {qb[0]}.{qb[1]}: "
                    "outcomes of one frame are distinct"
                )
            uf.union(index[qa], index[qb])
        groups = uf.groups()
        # transitive merges may still collapse two outcomes of one frame
        for members in groups:
            seen: dict[str, str] = {}
            for m in members:
                flabel, elabel = qualified[m]
                if flabel in seen:
                    raise IntraFrameIdentification(
                        f"identifications collapse {flabel}.{seen[flabel]} and "
                        f"{flabel}.{elabel}, outcomes of one frame"
                    )
                seen[flabel] = elabel
        self.frames = frames
        self.identifications = identifications
        self.classes = tuple(tuple(qualified[m] for m in members) for members in groups)
        self.class_labels = tuple(f"{c[0][0]}.{c[0][1]}" for c in self.classes)
        self._class_of = {
            q: cid for cid, members in enumerate(self.classes) for q in members
        }

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def class_of(self, frame_label: str, event_label: str) -> int:
        try:
            return self._class_of[(frame_label, event_label)]
        except KeyError:
            raise UnknownEvent(f"unknown event {frame_label}.{event_label}") from None

    def class_id(self, qualified: str) -> int:
        frame_label, _, event_label = qualified.partition(".")
        return self.class_of(frame_label, event_label)

    def __repr__(self) -> str:
        return f"EventSpace(frames={len(self.frames)}, classes={self.n_classes})"

    def to_json_dict(self) -> dict:
        return {
            "frames": [
                {"label": f.label, "events": list(f.events)} for f in self.frames
            ],
            "identifications": [
                [f"{fa}.{ea}", f"{fb}.{eb}"]
                for (fa, ea), (fb, eb) in self.identifications
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))


def build_event_space(frames, identifications=()) -> EventSpace:
    return EventSpace(frames, identifications)


def event_space_from_json(text: str) -> EventSpace:
    data = json.loads(text)
    frames = [Frame(f["label"], tuple(f["events"])) for f in data["frames"]]
    idents = []
    for qa, qb in data["identifications"]:
        fa, _, ea = qa.partition(".")
        fb, _, eb = qb.partition(".")
        idents.append(((fa, ea), (fb, eb)))
    return EventSpace(frames, idents)


@dataclass(frozen=True, slots=True)
class Measurement:
    """The symbol M(target, source): accept outcome `source`, emit `target`."""

    space: EventSpace
    target_class: int
    source_class: int

    def __post_init__(self):
        for c in (self.target_class, self.source_class):
            if not (0 <= c < self.space.n_classes):
                raise UnknownEvent(f"event class {c} out of range")

    @property
    def is_unit(self) -> bool:
        return self.target_class == self.source_class

    def inverse(self) -> "Measurement":
        return Measurement(self.space, self.source_class, self.target_class)

    def __str__(self) -> str:
        labels = self.space.class_labels
        if self.is_unit:
            return f"M({labels[self.target_class]})"
        return f"M({labels[self.target_class]},{labels[self.source_class]})"


def measurement(space: EventSpace, target: int | str, source: int | str) -> Measurement:
    t = space.class_id(target) if isinstance(target, str) else target
    s = space.class_id(source) if isinstance(source, str) else source
    return Measurement(space, t, s)


def unit_measurement(space: EventSpace, event: int | str) -> Measurement:
    return measurement(space, event, event)


def compose_measurements(m2: Measurement, m1: Measurement) -> Measurement:
    """m2 o m1 (first m1, then m2); annihilating pairs raise NotComposable.

    At the symbol level the mismatch M(a''', a'') o M(a', a) with a'' != a'
    has no measurement value; the algebra over the total groupoid absorbs
    it as the zero element instead.
    """
    if m1.space is not m2.space:
        raise UnknownEvent("measurements live on different event spaces")
    if m2.source_class != m1.target_class:
        raise NotComposable(m2.source_class, m1.target_class)
    return Measurement(m1.space, m2.target_class, m1.source_class)


def total_groupoid(space: EventSpace) -> FiniteGroupoid:
    """The pair groupoid over event classes; M(x, y) is the morphism "(x,y)"."""
    return pair_groupoid(space.class_labels)


def measurement_morphism_index(g: FiniteGroupoid, m: Measurement) -> int:
    labels = m.space.class_labels
    label = f"({labels[m.target_class]},{labels[m.source_class]})"
    return g.morphism_labels.index(label)


@dataclass(frozen=True, slots=True)
class TwoCell:
    """phi(a, a'; b, b'): M(a, a') => M(b, b'), whiskers M(b, a) and M(a', b')."""

    space: EventSpace
    a: int
    a_prime: int
    b: int
    b_prime: int

    @property
    def source_cell(self) -> Measurement:
        return Measurement(self.space, self.a, self.a_prime)

    @property
    def target_cell(self) -> Measurement:
        return Measurement(self.space, self.b, self.b_prime)

    @property
    def left_whisker(self) -> Measurement:
        return Measurement(self.space, self.b, self.a)

    @property
    def right_whisker(self) -> Measurement:
        return Measurement(self.space, self.a_prime, self.b_prime)

    def __str__(self) -> str:
        labels = self.space.class_labels
        return (
            f"phi({labels[self.a]},{labels[self.a_prime]};"
            f"{labels[self.b]},{labels[self.b_prime]})"
        )

    def to_json_dict(self) -> dict:
        return {
            "a": self.a,
            "a_prime": self.a_prime,
            "b": self.b,
            "b_prime": self.b_prime,
        }


def two_cell(
    space: EventSpace,
    a: int | str,
    a_prime: int | str,
    b: int | str,
    b_prime: int | str,
) -> TwoCell:
    ids = [
        space.class_id(v) if isinstance(v, str) else int(v)
        for v in (a, a_prime, b, b_prime)
    ]
    for c in ids:
        if not (0 <= c < space.n_classes):
            raise UnknownEvent(f"event class {c} out of range")
    return TwoCell(space, *ids)


def unit_cell(space: EventSpace, a: int, a_prime: int) -> TwoCell:
    return two_cell(space, a, a_prime, a, a_prime)


def horizontal_unit(space: EventSpace, a: int, b: int) -> TwoCell:
    """1_{ab}: from the trivial transition at a to the trivial transition at b."""
    return two_cell(space, a, a, b, b)


def vertical_inverse(cell: TwoCell) -> TwoCell:
    return TwoCell(cell.space, cell.b, cell.b_prime, cell.a, cell.a_prime)


def horizontal_inverse(cell: TwoCell) -> TwoCell:
    """The cell over the inverse transitions; composes to the horizontal unit."""
    return TwoCell(cell.space, cell.a_prime, cell.a, cell.b_prime, cell.b)


def vcomp(c1: TwoCell, c2: TwoCell) -> TwoCell:
    """First transform by c1, then by c2; needs c1's target 1-cell = c2's source."""
    if (c1.b, c1.b_prime) != (c2.a, c2.a_prime):
        raise NotVerticallyComposable(
            f"{c1} then {c2}: middle transitions do not match"
        )
    return TwoCell(c1.space, c1.a, c1.a_prime, c2.b, c2.b_prime)


def hcomp(c1: TwoCell, c2: TwoCell) -> TwoCell:
    """Compose the underlying transitions; needs shared middle events."""
    if c1.a_prime != c2.a or c1.b_prime != c2.b:
        raise NotHorizontallyComposable(
            f"{c1} beside {c2}: middle events do not match"
        )
    return TwoCell(c1.space, c1.a, c2.a_prime, c1.b, c2.b_prime)


@dataclass(frozen=True)
class ExchangeReport:
    lhs: TwoCell  # (phi ov psi) oh (phi' ov psi')
    rhs: TwoCell  # (phi oh phi') ov (psi oh psi')
    ok: bool


def check_exchange(
    phi: TwoCell, phi_p: TwoCell, psi: TwoCell, psi_p: TwoCell
) -> ExchangeReport:
    """Both bracketings of the 2x2 cell square must agree."""
    lhs = hcomp(vcomp(phi, psi), vcomp(phi_p, psi_p))
    rhs = vcomp(hcomp(phi, phi_p), hcomp(psi, psi_p))
    return ExchangeReport(lhs, rhs, lhs == rhs)


# -- matrix realization of 2-cells --------------------------------------


@dataclass(frozen=True)
class CellAggregate:
    """Factorized coefficients of a transformation family.

    The aggregate acts on coefficient matrices A (rows = target labels of
    transitions, columns = source labels) as A -> T^dagger A T'.
    """

    space: EventSpace
    t_left: np.ndarray
    t_right: np.ndarray

    def __post_init__(self):
        n = self.space.n_classes
        for name, m in (("T", self.t_left), ("T'", self.t_right)):
            if m.shape != (n, n):
                raise ShapeMismatch(f"{name} has shape {m.shape}, expected ({n},{n})")


def elementary_aggregate(cell: TwoCell) -> CellAggregate:
    """The rank-one factors realizing a single cell phi(a, a'; b, b')."""
    n = cell.space.n_classes
    t_left = np.zeros((n, n), dtype=np.complex128)
    t_right = np.zeros((n, n), dtype=np.complex128)
    t_left[cell.a, cell.b] = 1.0
    t_right[cell.a_prime, cell.b_prime] = 1.0
    return CellAggregate(cell.space, t_left, t_right)


def identity_aggregate(space: EventSpace) -> CellAggregate:
    eye = np.eye(space.n_classes, dtype=np.complex128)
    return CellAggregate(space, eye, eye.copy())


def measurement_basis_matrix(m: Measurement) -> np.ndarray:
    """Coefficient-matrix pattern of M(x, y): a single 1 at (row x, col y)."""
    n = m.space.n_classes
    out = np.zeros((n, n), dtype=np.complex128)
    out[m.target_class, m.source_class] = 1.0
    return out


def represent_cells(agg: CellAggregate, a: np.ndarray) -> np.ndarray:
    """Apply the transformation family: T^dagger A T'.

    For an elementary cell phi(a, a'; b, b') this sends the basis matrix of
    M(a, a') to the basis matrix of M(b, b') and annihilates every other
    basis transition.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = agg.space.n_classes
    if a.shape != (n, n):
        raise ShapeMismatch(f"A has shape {a.shape}, expected ({n},{n})")
    return agg.t_left.conj().T @ a @ agg.t_right
