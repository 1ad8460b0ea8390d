"""The convolution *-algebra of a finite groupoid.

Elements are complex coefficient vectors indexed by morphisms, i.e.
functions f: G -> C.  The product is convolution over the composition
table, the involution is f*(g) = conj(f(g^-1)), and the delta functions
at morphisms form the canonical basis.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import IndexOutOfRange, ParentMismatch
from .groupoid import FiniteGroupoid

EQ_TOL = 1e-12  # max-abs coefficient tolerance for element equality


class AlgebraElement:
    """A coefficient vector over the morphisms of a fixed parent groupoid."""

    __slots__ = ("groupoid", "coeffs")

    def __init__(self, groupoid: FiniteGroupoid, coeffs):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape != (groupoid.n_morphisms,):
            raise IndexOutOfRange(
                f"coefficient vector has shape {coeffs.shape}, "
                f"expected ({groupoid.n_morphisms},)"
            )
        self.groupoid = groupoid
        self.coeffs = coeffs.copy()
        self.coeffs.flags.writeable = False

    def __repr__(self) -> str:
        nonzero = int(np.count_nonzero(self.coeffs))
        return f"AlgebraElement(N={len(self.coeffs)}, nonzero={nonzero})"

    def _require_same_parent(self, other: "AlgebraElement") -> None:
        if self.groupoid is not other.groupoid and (
            self.groupoid.canonical_hash != other.groupoid.canonical_hash
        ):
            raise ParentMismatch("elements belong to different groupoids")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._require_same_parent(other)
        return AlgebraElement(self.groupoid, self.coeffs + other.coeffs)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._require_same_parent(other)
        return AlgebraElement(self.groupoid, self.coeffs - other.coeffs)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return convolve(self, other)
        return AlgebraElement(self.groupoid, self.coeffs * complex(other))

    def __rmul__(self, scalar) -> "AlgebraElement":
        return AlgebraElement(self.groupoid, complex(scalar) * self.coeffs)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.groupoid, -self.coeffs)

    def star(self) -> "AlgebraElement":
        return involute(self)

    def isclose(self, other: "AlgebraElement", tol: float = EQ_TOL) -> bool:
        self._require_same_parent(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= tol)

    def is_zero(self, tol: float = EQ_TOL) -> bool:
        return bool(np.max(np.abs(self.coeffs), initial=0.0) <= tol)

    def to_json_dict(self) -> dict:
        return {
            "groupoid_hash": self.groupoid.canonical_hash,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))


def element_from_json(g: FiniteGroupoid, text: str) -> AlgebraElement:
    data = json.loads(text)
    if data["groupoid_hash"] != g.canonical_hash:
        raise ParentMismatch("serialized element belongs to a different groupoid")
    return AlgebraElement(g, [complex(re, im) for re, im in data["coeffs"]])


def zero_element(g: FiniteGroupoid) -> AlgebraElement:
    return AlgebraElement(g, np.zeros(g.n_morphisms, dtype=np.complex128))


def delta(g: FiniteGroupoid, k: int) -> AlgebraElement:
    """The basis function that is 1 at morphism k and 0 elsewhere."""
    if not (0 <= k < g.n_morphisms):
        raise IndexOutOfRange(f"morphism index {k} out of range")
    coeffs = np.zeros(g.n_morphisms, dtype=np.complex128)
    coeffs[k] = 1.0
    return AlgebraElement(g, coeffs)


def unit_element(g: FiniteGroupoid) -> AlgebraElement:
    """Sum of the deltas at unit morphisms; the two-sided convolution identity."""
    coeffs = np.zeros(g.n_morphisms, dtype=np.complex128)
    coeffs[g.unit] = 1.0
    return AlgebraElement(g, coeffs)


def convolve(f1: AlgebraElement, f2: AlgebraElement) -> AlgebraElement:
    """(f1 * f2)(gamma_i) = sum over gamma_j o gamma_k = gamma_i of f1(j) f2(k)."""
    f1._require_same_parent(f2)
    g = f1.groupoid
    jj, kk, ii = g.comp_pairs
    out = np.zeros(g.n_morphisms, dtype=np.complex128)
    np.add.at(out, ii, f1.coeffs[jj] * f2.coeffs[kk])
    return AlgebraElement(g, out)


def involute(f: AlgebraElement) -> AlgebraElement:
    """f*(gamma) = conj(f(gamma^-1)); antilinear, and (f*g)* = g* * f*."""
    return AlgebraElement(f.groupoid, np.conj(f.coeffs[f.groupoid.inverse]))


def structure_constants(g: FiniteGroupoid) -> np.ndarray:
    """Dense (j, k) -> composite-index table with -1 where not composable.

    This is exactly the delta-basis multiplication table:
    delta_j * delta_k = delta_{table[j,k]} when the entry is >= 0, else 0.
    """
    N = g.n_morphisms
    table = np.full((N, N), -1, dtype=np.int64)
    jj, kk, ii = g.comp_pairs
    table[jj, kk] = ii
    table.flags.writeable = False
    return table
