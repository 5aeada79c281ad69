"""Axis-aligned unit-box geometry.

Everything here is about the unit box B = [0,1]^d and its shifted copy
B(z) = z + [0,1]^d.  The two quantities that drive the covariance formulas
are the overlap volume of the two boxes and the (d-1)-dimensional measure
of the shared piece of their boundaries.

The arithmetic is kept in plain Python scalars on purpose: passing
`fractions.Fraction` coordinates gives exact rational results, which the
test suite uses to check the lattice sum-to-zero identity without float
round-off.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Shift:
    """A box shift z in units of the box side, together with its dimension."""

    d: int
    z: tuple

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        object.__setattr__(self, "z", tuple(self.z))
        if len(self.z) != self.d:
            raise ValueError(f"shift has {len(self.z)} coordinates, expected d={self.d}")


def as_shift(z):
    """Coerce a Shift, scalar or coordinate sequence into a Shift."""
    if isinstance(z, Shift):
        return z
    try:
        coords = tuple(z)
    except TypeError:
        coords = (z,)
    return Shift(d=len(coords), z=coords)


def _edge_product(edges):
    # multiply in sorted order so the float result is exactly invariant
    # under coordinate permutations (multiplication is not associative)
    prod = 1
    for e in sorted(edges):
        prod = prod * e
    return prod


def overlap_volume(shift):
    """Lebesgue volume of B ∩ B(z): prod_i (1 - |z_i|)_+  in [0, 1]."""
    shift = as_shift(shift)
    edges = []
    for zi in shift.z:
        edge = 1 - abs(zi)
        if edge <= 0:
            return 0 * edge  # preserves exact type (Fraction stays Fraction)
        edges.append(edge)
    return _edge_product(edges)


def shared_face_measure(shift):
    """Measure of the shared boundary faces of B and B(z).

    Returns ``(measure, interiors_overlap)`` where ``measure`` is the
    (d-1)-dimensional volume of ∂B ∩ ∂B(z) and ``interiors_overlap`` tells
    whether the open boxes intersect.

    Faces of the two boxes coincide in a common hyperplane only where a
    coordinate satisfies |z_j| = 1 (one opposite face pair) or z_j = 0
    (both face pairs); the cross-section of each coincidence is the
    (d-1)-dimensional overlap rectangle, so its measure is
    prod_{i != j} (1 - |z_i|)_+.  Coordinates are classified by exact
    comparison: the covariance limit is genuinely discontinuous on these
    sets, so callers are expected to quantize z themselves.
    """
    shift = as_shift(shift)
    z = shift.z
    interiors_overlap = all(abs(zi) < 1 for zi in z)

    measure = 0
    for j, zj in enumerate(z):
        azj = abs(zj)
        if azj != 1 and zj != 0:
            continue
        edges = []
        for i, zi in enumerate(z):
            if i == j:
                continue
            edge = 1 - abs(zi)
            if edge <= 0:
                edges = None
                break
            edges.append(edge)
        cross = _edge_product(edges) if edges is not None else 0
        measure = measure + (cross if azj == 1 else 2 * cross)
    return measure, interiors_overlap
