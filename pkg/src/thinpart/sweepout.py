"""Discrete sweep-out machinery over a formal-current model.

Vertices live on the 1/3^j grids of the unit interval (or square); a
discrete family maps those vertices to formal currents, each a finite
combination of labelled patches with integer multiplicities.  The mass of
a difference uses the patchwise formula (patches are either identical or
disjoint), which is exact for this model by definition.  On top of the
combinatorics, area profiles of cusp pieces, tube pieces and fillers give
explicit width upper bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import filler as filler_mod
from . import tube_geometry
from .errors import DomainError
from .flat_torus import FlatTorusLattice, reduce_basis


# ----------------------------------------------------------- grid complex


@dataclass(frozen=True)
class GridVertex:
    """A 0-cell of the level-j complex on [0,1]^m, coordinates i/3^j."""

    level: int
    coords: tuple

    def __post_init__(self):
        if self.level < 0:
            raise DomainError("grid level must be nonnegative")
        if not self.coords:
            raise DomainError("vertex needs at least one coordinate")
        den = 3**self.level
        for c in self.coords:
            if not isinstance(c, Fraction):
                raise DomainError("vertex coordinates must be Fractions")
            if not 0 <= c <= 1:
                raise DomainError("vertex coordinates must lie in [0, 1]")
            if (c * den).denominator != 1:
                raise DomainError(
                    f"{c} is not a level-{self.level} grid coordinate"
                )

    @classmethod
    def from_indices(cls, level: int, *indices: int) -> "GridVertex":
        den = 3**level
        return cls(level, tuple(Fraction(i, den) for i in indices))

    @property
    def dim(self) -> int:
        return len(self.coords)


def grid_distance(x: GridVertex, y: GridVertex) -> int:
    """3^j * sum |x_i - y_i|, an exact integer."""
    if x.level != y.level or x.dim != y.dim:
        raise DomainError("vertices belong to different complexes")
    den = 3**x.level
    total = sum(abs(a - b) for a, b in zip(x.coords, y.coords)) * den
    return int(total)


def project_vertex(x: GridVertex, level: int) -> GridVertex:
    """Nearest level-``level`` vertex; midpoint ties round toward 0.

    (Uniqueness of the nearest vertex fails exactly at cell midpoints;
    the tie-break is part of the contract.)
    """
    if level > x.level:
        raise DomainError("can only project to a coarser or equal level")
    den = 3**level
    out = []
    for c in x.coords:
        scaled = c * den
        lo = scaled.numerator // scaled.denominator
        frac = scaled - lo
        if frac > Fraction(1, 2):
            lo += 1
        out.append(Fraction(lo, den))
    return GridVertex(level, tuple(out))


# --------------------------------------------------------- formal currents


@dataclass(frozen=True)
class FormalCurrent:
    """Integer combination of labelled patches: ((patch_id, mult, area), ...)."""

    patches: tuple

    def __post_init__(self):
        seen = {}
        for entry in self.patches:
            pid, mult, patch_area = entry
            if pid in seen:
                raise DomainError(f"duplicate patch id {pid!r}")
            if int(mult) != mult:
                raise DomainError("multiplicities must be integers")
            if patch_area < 0.0 or not math.isfinite(patch_area):
                raise DomainError("patch areas must be finite and nonnegative")
            seen[pid] = (int(mult), float(patch_area))
        object.__setattr__(self, "_table", seen)

    @classmethod
    def zero(cls) -> "FormalCurrent":
        return cls(())

    @classmethod
    def single(cls, pid, area: float, mult: int = 1) -> "FormalCurrent":
        return cls(((pid, mult, area),))

    @property
    def mass(self) -> float:
        return sum(abs(m) * a for m, a in self._table.values())

    def mass_of_difference(self, other: "FormalCurrent") -> float:
        """M(self - other) patchwise: sum |n_i - m_i| * area_i."""
        total = 0.0
        ids = set(self._table) | set(other._table)
        for pid in ids:
            n, a1 = self._table.get(pid, (0, None))
            m, a2 = other._table.get(pid, (0, None))
            if a1 is not None and a2 is not None:
                if abs(a1 - a2) > 1e-12 * max(a1, a2, 1e-300):
                    raise DomainError(
                        f"patch {pid!r} carries inconsistent areas {a1!r} != {a2!r}"
                    )
            area = a1 if a1 is not None else a2
            total += abs(n - m) * area
        return total

    def is_zero(self) -> bool:
        return all(m == 0 for m, _ in self._table.values())


# --------------------------------------------------------- discrete family


@dataclass(frozen=True)
class DiscreteFamily:
    """Map from the level-j vertices of [0,1] to formal currents."""

    level: int
    currents: tuple

    def __post_init__(self):
        if len(self.currents) != 3**self.level + 1:
            raise DomainError(
                f"a level-{self.level} family needs {3**self.level + 1} currents"
            )

    @property
    def is_zero_anchored(self) -> bool:
        """Whether the endpoints carry the zero current (families
        representing maps into (currents, {0}))."""
        return self.currents[0].is_zero() and self.currents[-1].is_zero()

    def vertex(self, i: int) -> GridVertex:
        return GridVertex.from_indices(self.level, i)

    def masses(self) -> np.ndarray:
        return np.array([c.mass for c in self.currents])


def fineness(fam: DiscreteFamily) -> float:
    """sup over vertex pairs of M(phi(x) - phi(y)) / d(x, y).

    The mass of a difference is a metric and the grid distance is
    additive along the line, so the supremum is attained on adjacent
    pairs (triangle inequality); adjacent pairs have distance 1.
    """
    if len(fam.currents) < 2:
        raise DomainError("fineness needs at least two vertices")
    return max(
        a.mass_of_difference(b)
        for a, b in zip(fam.currents, fam.currents[1:])
    )


def fineness_exhaustive(fam: DiscreteFamily) -> float:
    """O(n^2) reference evaluation of the same supremum (tests)."""
    best = 0.0
    n = len(fam.currents)
    for i in range(n):
        for j in range(i + 1, n):
            best = max(
                best, fam.currents[i].mass_of_difference(fam.currents[j]) / (j - i)
            )
    return best


def max_mass(obj) -> float:
    """Largest mass of a family, largest area of a profile, or max over a
    list of either."""
    if isinstance(obj, DiscreteFamily):
        return float(max(c.mass for c in obj.currents))
    if isinstance(obj, SweepoutProfile):
        return obj.width_upper_bound
    if isinstance(obj, FormalCurrent):
        return obj.mass
    try:
        return max(max_mass(x) for x in obj)
    except TypeError as exc:
        raise DomainError(f"cannot take max mass of {obj!r}") from exc


def interpolate_patches(a: FormalCurrent, b: FormalCurrent, k: int) -> DiscreteFamily:
    """A chain from a to b in k equal-mass steps, embedded at the
    smallest level j with 3^j >= k.

    Every patch is split into k equal-area sub-patches; step m switches
    the m-th sub-patch of every patch from its multiplicity in a to its
    multiplicity in b.  Step masses telescope exactly to M(a - b).
    """
    if k < 1:
        raise DomainError("need at least one interpolation step")
    level = 0
    while 3**level < k:
        level += 1

    ids = sorted(set(a._table) | set(b._table), key=repr)
    rows = []
    for pid in ids:
        n, area_a = a._table.get(pid, (0, None))
        m, area_b = b._table.get(pid, (0, None))
        if area_a is not None and area_b is not None:
            if abs(area_a - area_b) > 1e-12 * max(area_a, area_b, 1e-300):
                raise DomainError(f"patch {pid!r} carries inconsistent areas")
        area = area_a if area_a is not None else area_b
        rows.append((pid, n, m, area))

    def chain_current(t: int) -> FormalCurrent:
        patches = []
        for pid, n, m, area in rows:
            sub = area / k
            for piece in range(k):
                mult = m if piece < t else n
                if mult != 0:
                    patches.append((f"{pid}#{piece}/{k}", mult, sub))
        return FormalCurrent(tuple(patches))

    currents = [chain_current(min(i, k)) for i in range(3**level + 1)]
    return DiscreteFamily(level, tuple(currents))


# ------------------------------------------------------------ area profiles


@dataclass(frozen=True)
class ProfileSegment:
    kind: str
    label: str
    params: np.ndarray
    areas: np.ndarray

    @property
    def max_area(self) -> float:
        return float(self.areas.max())


@dataclass(frozen=True)
class SweepoutProfile:
    """Concatenated slice-area profile; the width upper bound is the
    largest sampled area."""

    segments: tuple

    @property
    def width_upper_bound(self) -> float:
        return max(seg.max_area for seg in self.segments)

    def samples(self):
        """(global_t, label, area) rows with a strictly increasing global
        parameter (each segment occupies a unit of parameter length)."""
        rows = []
        for offset, seg in enumerate(self.segments):
            p = seg.params
            span = p[-1] - p[0] if p[-1] > p[0] else 1.0
            for t, a in zip(p, seg.areas):
                rows.append((offset + (t - p[0]) / span, seg.label, float(a)))
        return rows

    def concat(self, other: "SweepoutProfile") -> "SweepoutProfile":
        return SweepoutProfile(self.segments + other.segments)


def _lattices_match(lat1: FlatTorusLattice, lat2: FlatTorusLattice,
                    rtol: float = 1e-6) -> bool:
    r1 = reduce_basis(lat1)
    r2 = reduce_basis(lat2)
    scale = max(r1.norm2, r2.norm2)
    return (
        abs(r1.a1 - r2.a1) <= rtol * scale
        and abs(abs(r1.a2) - abs(r2.a2)) <= rtol * scale
        and abs(r1.b2 - r2.b2) <= rtol * scale
    )


def profile(cusps=(), tubes=(), fillers=(), attachments=None,
            samples: int = 200) -> SweepoutProfile:
    """Slice-area profile of a thin-part description.

    ``cusps``: CuspParams pieces, areas exp(-2t) * |T_0| decreasing over
    the depth range.  ``tubes``: TubeParams, areas pi ell sinh(2r)
    increasing up to the tube radius.  ``fillers``: FillerSpec, slice
    areas decreasing from the boundary torus area.  ``attachments`` maps
    filler index -> cusp index; an attached filler must match the cusp's
    bottom torus lattice to 1e-6 relative.
    """
    if samples < 2:
        raise DomainError("need at least two samples per segment")
    attachments = dict(attachments or {})
    segs = []
    for idx, cusp in enumerate(cusps):
        ts = np.linspace(cusp.t0, cusp.t1, samples)
        areas = np.exp(-2.0 * ts) * cusp.lattice.area
        segs.append(ProfileSegment("cusp", f"cusp[{idx}]", ts, areas))
    for idx, tube in enumerate(tubes):
        rs = np.linspace(tube.radius / samples, tube.radius, samples)
        areas = np.array(
            [tube_geometry.slice_area(tube.length, float(r)) for r in rs]
        )
        segs.append(ProfileSegment("tube", f"tube[{idx}]", rs, areas))
    for idx, fil in enumerate(fillers):
        if idx in attachments:
            cusp = cusps[attachments[idx]]
            bottom = cusp.lattice.scaled(math.exp(-cusp.t1))
            if not _lattices_match(bottom, fil.lattice):
                raise DomainError(
                    f"filler[{idx}] does not glue to cusp[{attachments[idx]}]: "
                    "boundary lattices differ beyond 1e-6 relative"
                )
        ts = np.linspace(0.0, fil.depth + 1.0, samples, endpoint=False)
        areas = np.array(
            [filler_mod.slice_area(fil, float(t)) for t in ts]
        )
        segs.append(ProfileSegment("filler", f"filler[{idx}]", ts, areas))
    if not segs:
        raise DomainError("empty thin-part description")
    return SweepoutProfile(tuple(segs))
