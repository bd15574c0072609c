"""Metrics on T x [a, b] compared against a warped reference.

The reference metric is h(x3)^2 dsigma^2 + dx3^2 for a warping h > 0; a
second metric g = a_kl dx_k dx_l lives in the same orthonormal lattice
coordinates.  This module measures the comparison constants (the ratios
behind the hypotheses H1-H4), evaluates level-torus mean curvature, and
applies the blow-up rescaling
    b_kl(y) = a_kl(y1, y2, y3/lambda + s) * lambda^{n2(k,l)}
with rescaled warping h(y3/lambda + s)/h(s).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .fields import Field1D
from .flat_torus import FlatTorusLattice

_AXES = (1, 2, 3)


def n_p(*indices: int) -> int:
    """Count how many of the given 1-based indices are horizontal (1 or 2)."""
    for i in indices:
        if i not in _AXES:
            raise DomainError(f"coordinate index must be 1, 2 or 3, got {i!r}")
    return sum(1 for i in indices if i != 3)


class DiagonalCoefficients:
    """Coefficient field diag(a1(x3)^2, a2(x3)^2, 1)."""

    def __init__(self, a1: Field1D, a2: Field1D):
        self.a1 = a1
        self.a2 = a2

    def _sq(self, f: Field1D, t, order: int) -> float:
        if order == 0:
            return f(t) ** 2
        if order == 1:
            return 2.0 * f(t) * f.d1(t)
        if order == 2:
            return 2.0 * (f.d1(t) ** 2 + f(t) * f.d2(t))
        return 2.0 * (3.0 * f.d1(t) * f.d2(t) + f(t) * f.d3(t))

    def value(self, x1, x2, x3) -> np.ndarray:
        return np.diag([self._sq(self.a1, x3, 0), self._sq(self.a2, x3, 0), 1.0])

    def deriv(self, axes: tuple, x1, x2, x3) -> np.ndarray:
        if not axes:
            return self.value(x1, x2, x3)
        if any(a != 3 for a in axes):
            return np.zeros((3, 3))
        order = len(axes)
        out = np.zeros((3, 3))
        out[0, 0] = self._sq(self.a1, x3, order)
        out[1, 1] = self._sq(self.a2, x3, order)
        return out


class CallableCoefficients:
    """General symmetric coefficient field backed by a single callable.

    ``fn(x1, x2, x3, axes)`` must return the 3x3 matrix of partial
    derivatives ``d_axes a_kl`` (``axes`` a tuple of 1-based directions,
    empty for the plain value).
    """

    def __init__(self, fn):
        self.fn = fn

    def value(self, x1, x2, x3) -> np.ndarray:
        return np.asarray(self.fn(x1, x2, x3, ()), dtype=float)

    def deriv(self, axes: tuple, x1, x2, x3) -> np.ndarray:
        return np.asarray(self.fn(x1, x2, x3, tuple(axes)), dtype=float)


class _RescaledCoefficients:
    """Blow-up wrapper: value/derivative scaling by powers of lambda."""

    def __init__(self, base, s: float, lam: float):
        self.base = base
        self.s = s
        self.lam = lam
        lam_pow = np.array(
            [[lam**2, lam**2, lam], [lam**2, lam**2, lam], [lam, lam, 1.0]]
        )
        self._lam_pow = lam_pow

    def _pull(self, x3):
        return x3 / self.lam + self.s

    def value(self, x1, x2, x3) -> np.ndarray:
        return self.base.value(x1, x2, self._pull(x3)) * self._lam_pow

    def deriv(self, axes: tuple, x1, x2, x3) -> np.ndarray:
        raw = self.base.deriv(axes, x1, x2, self._pull(x3))
        n3 = sum(1 for a in axes if a == 3)
        return raw * self._lam_pow * self.lam ** (-n3)


@dataclass
class WarpedMetricSpec:
    """A metric on T x [x3_min, x3_max] with reference warping ``warping``.

    Diagonal specs carry ``a1``/``a2`` with a_kl = diag(a1^2, a2^2, 1);
    non-diagonal specs carry a general ``coefficients`` field instead.
    Immutable by convention; all evaluation is pure.
    """

    lattice: FlatTorusLattice
    x3_min: float
    x3_max: float
    warping: Field1D
    kind: str = "custom"
    a1: Field1D | None = None
    a2: Field1D | None = None
    coefficients: object | None = field(default=None, repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.x3_min) and math.isfinite(self.x3_max)):
            raise DomainError("interval endpoints must be finite")
        if self.x3_max <= self.x3_min:
            raise DomainError("empty x3 interval")
        if self.coefficients is None:
            if self.a1 is None or self.a2 is None:
                raise DomainError("diagonal spec needs a1 and a2 fields")
            self.coefficients = DiagonalCoefficients(self.a1, self.a2)

    # -- constructors ------------------------------------------------------

    @classmethod
    def flat(cls, lattice: FlatTorusLattice, x3_min: float = 0.0, x3_max: float = 1.0):
        one = Field1D.constant(1.0)
        return cls(lattice, x3_min, x3_max, one, kind="flat", a1=one, a2=one)

    @classmethod
    def diagonal(cls, lattice, x3_min, x3_max, a1: Field1D, a2: Field1D,
                 warping: Field1D | None = None, kind: str = "custom"):
        if warping is None:
            warping = Field1D.constant(1.0)
        return cls(lattice, x3_min, x3_max, warping, kind=kind, a1=a1, a2=a2)

    @classmethod
    def from_sampled(cls, lattice, x3, a1_samples, a2_samples, h_samples,
                     kind: str = "custom"):
        """Spline-backed diagonal spec from grids of a1, a2 and h values."""
        x3 = np.asarray(x3, dtype=float)
        return cls(
            lattice,
            float(x3[0]),
            float(x3[-1]),
            Field1D.from_samples(x3, h_samples),
            kind=kind,
            a1=Field1D.from_samples(x3, a1_samples),
            a2=Field1D.from_samples(x3, a2_samples),
        )

    # -- queries -----------------------------------------------------------

    @property
    def diagonal_form(self) -> bool:
        return self.a1 is not None and self.a2 is not None

    def contains(self, x3: float, slack: float = 1e-9) -> bool:
        width = self.x3_max - self.x3_min
        return (
            self.x3_min - slack * width <= x3 <= self.x3_max + slack * width
        )

    def require_inside(self, x3: float):
        if not self.contains(x3):
            raise DomainError(
                f"x3 = {x3!r} outside [{self.x3_min!r}, {self.x3_max!r}]"
            )

    def coefficient_matrix(self, x1: float, x2: float, x3: float) -> np.ndarray:
        return self.coefficients.value(x1, x2, x3)

    def coefficient_deriv(self, axes: tuple, x1: float, x2: float, x3: float) -> np.ndarray:
        return self.coefficients.deriv(tuple(axes), x1, x2, x3)

    def reference_matrix(self, x3: float) -> np.ndarray:
        h = float(self.warping(x3))
        return np.diag([h * h, h * h, 1.0])

    def to_json_dict(self) -> dict:
        if self.kind not in ("flat", "cusp"):
            raise DomainError(
                "only flat/cusp specs serialize from this module; tube specs "
                "serialize via their TubeParams, custom specs via samples"
            )
        return {
            "kind": self.kind,
            "lattice": self.lattice.to_json_dict(),
            "interval": [self.x3_min, self.x3_max],
        }


@dataclass(frozen=True)
class HypothesisReport:
    """Empirical suprema of the comparison ratios over a sample grid.

    The constants are measurements, not certified bounds; ``grid``
    records the resolution they were taken at.
    """

    a_h1: float
    a_h2: float
    a_h3: float
    h2_ratios: tuple  # (sup|h'|/h, sup|h''|/h, sup|h'''|/h)
    h3_ratios: tuple  # per derivative order 0..3
    h_monotone: bool
    mean_convex: bool
    grid: str
    npoints: int

    @property
    def constant(self) -> float:
        return max(self.a_h1, self.a_h2, self.a_h3)


def _deriv_multi_indices(order: int):
    return list(itertools.combinations_with_replacement(_AXES, order))


def _sample_points(spec: WarpedMetricSpec, n1: int, n2: int, n3: int):
    x3s = np.linspace(spec.x3_min, spec.x3_max, n3)
    if spec.diagonal_form:
        return [(0.0, 0.0, float(t)) for t in x3s]
    pts = []
    ss = np.linspace(0.0, 1.0, n1, endpoint=False)
    ts = np.linspace(0.0, 1.0, n2, endpoint=False)
    v1, v2 = spec.lattice.v1, spec.lattice.v2
    for s in ss:
        for t in ts:
            x1 = s * v1[0] + t * v2[0]
            x2 = s * v1[1] + t * v2[1]
            for x3 in x3s:
                pts.append((float(x1), float(x2), float(x3)))
    return pts


def _mean_convexity_indicator(spec: WarpedMetricSpec, x1, x2, x3) -> float:
    """(g_T)^{ab} Gamma^3_{ab}; positive when the mean curvature vector of
    the level torus points toward +x3."""
    G = spec.coefficient_matrix(x1, x2, x3)
    dG = [spec.coefficient_deriv((i,), x1, x2, x3) for i in _AXES]
    Ginv = np.linalg.inv(G)
    gT_inv = np.linalg.inv(G[:2, :2])
    total = 0.0
    for a in range(2):
        for b in range(2):
            gamma3 = 0.0
            for m in range(3):
                gamma3 += 0.5 * Ginv[2, m] * (
                    dG[a][b, m] + dG[b][a, m] - dG[m][a, b]
                )
            total += gT_inv[a, b] * gamma3
    return float(total)


def check_hypotheses(spec: WarpedMetricSpec, grid=24) -> HypothesisReport:
    """Measure the H1-H4 comparison ratios on a sample grid.

    ``grid`` is points per axis (scalar or (n1, n2, n3)); at least 8 per
    sampled axis.  Raises on a non-positive-definite coefficient sample,
    naming the offending point.
    """
    if np.isscalar(grid):
        n1 = n2 = n3 = int(grid)
    else:
        n1, n2, n3 = (int(g) for g in grid)
    if min(n1, n2, n3) < 8:
        raise DomainError("need at least 8 grid points per axis")

    points = _sample_points(spec, n1, n2, n3)
    sup_h1 = 0.0
    sup_h2 = [0.0, 0.0, 0.0]
    sup_h3 = [0.0, 0.0, 0.0, 0.0]
    h_monotone = True
    mean_convex = True
    conv_tol = 0.0

    for (x1, x2, x3) in points:
        G = spec.coefficient_matrix(x1, x2, x3)
        if not np.allclose(G, G.T, rtol=1e-10, atol=1e-14):
            raise DomainError(f"coefficient matrix not symmetric at {(x1, x2, x3)}")
        ev = np.linalg.eigvalsh(G)
        if ev[0] <= 0.0:
            raise DomainError(
                f"coefficient matrix not positive definite at {(x1, x2, x3)}"
            )
        h = float(spec.warping(x3))
        if h <= 0.0:
            raise DomainError(f"warping not positive at x3 = {x3!r}")

        D = np.diag([1.0 / h, 1.0 / h, 1.0])
        ratios = np.linalg.eigvalsh(D @ G @ D)
        sup_h1 = max(sup_h1, math.sqrt(ratios[-1]), 1.0 / math.sqrt(ratios[0]))

        derivs = (spec.warping.d1(x3), spec.warping.d2(x3), spec.warping.d3(x3))
        for i, d in enumerate(derivs):
            sup_h2[i] = max(sup_h2[i], abs(float(d)) / h)
        if float(derivs[0]) > conv_tol:
            h_monotone = False

        for order in range(4):
            best = sup_h3[order]
            for axes in _deriv_multi_indices(order):
                M = spec.coefficient_deriv(axes, x1, x2, x3)
                for k in range(3):
                    for l in range(k, 3):
                        n = n_p(k + 1, l + 1, *axes)
                        best = max(best, abs(float(M[k, l])) / h**n)
            sup_h3[order] = best

        ind = _mean_convexity_indicator(spec, x1, x2, x3)
        if ind < -1e-12:
            mean_convex = False

    if spec.diagonal_form:
        desc = f"x3: {n3} points (coefficients x1,x2-independent)"
    else:
        desc = f"{n1}x{n2}x{n3} points over fundamental domain x [a,b]"
    return HypothesisReport(
        a_h1=sup_h1,
        a_h2=max(sup_h2),
        a_h3=max(sup_h3),
        h2_ratios=tuple(sup_h2),
        h3_ratios=tuple(sup_h3),
        h_monotone=h_monotone,
        mean_convex=mean_convex,
        grid=desc,
        npoints=len(points),
    )


def level_torus_mean_curvature(spec: WarpedMetricSpec, s: float) -> float:
    """Mean curvature of T_s = {x3 = s}, positive when the mean curvature
    vector points toward +x3 (the slice-shrinking direction for cusps and
    tubes in depth coordinates): -(a1'/a1 + a2'/a2)(s) / 2."""
    if not spec.diagonal_form:
        raise DomainError("level_torus_mean_curvature supports diagonal specs only")
    spec.require_inside(s)
    a1, a2 = spec.a1, spec.a2
    return -0.5 * float(a1.d1(s) / a1(s) + a2.d1(s) / a2(s))


def blowup_rescale(spec: WarpedMetricSpec, s: float, lam: float) -> WarpedMetricSpec:
    """Blow up around the level x3 = s by the factor lambda.

    Coefficients become a_kl(y/lambda + s) * lambda^{n2(k,l)} on the
    transformed interval, the warping becomes h(y/lambda + s)/h(s).
    """
    spec.require_inside(s)
    if lam <= 0.0:
        raise DomainError("blow-up factor must be positive")
    y_min = lam * (spec.x3_min - s)
    y_max = lam * (spec.x3_max - s)
    if y_max <= y_min:
        raise DomainError("transformed interval is empty")
    h_s = float(spec.warping(s))
    new_h = spec.warping.compose_affine(1.0 / lam, s, 1.0 / h_s)
    kind = f"blowup({spec.kind})"
    if spec.diagonal_form:
        return WarpedMetricSpec(
            spec.lattice,
            y_min,
            y_max,
            new_h,
            kind=kind,
            a1=spec.a1.compose_affine(1.0 / lam, s, lam),
            a2=spec.a2.compose_affine(1.0 / lam, s, lam),
        )
    return WarpedMetricSpec(
        spec.lattice,
        y_min,
        y_max,
        new_h,
        kind=kind,
        coefficients=_RescaledCoefficients(spec.coefficients, s, lam),
    )


def spec_from_json(data: dict) -> WarpedMetricSpec:
    """Build a spec from a JSON descriptor {"kind": ..., ...}."""
    try:
        kind = data["kind"]
    except (KeyError, TypeError) as exc:
        raise DomainError("metric descriptor needs a 'kind'") from exc
    if kind == "flat":
        lat = FlatTorusLattice.from_json_dict(data["lattice"])
        lo, hi = data.get("interval", [0.0, 1.0])
        return WarpedMetricSpec.flat(lat, float(lo), float(hi))
    if kind == "cusp":
        from .tube_geometry import CuspParams, cusp_as_warped

        lat = FlatTorusLattice.from_json_dict(data["lattice"])
        lo, hi = data.get("interval", [0.0, 1.0])
        return cusp_as_warped(CuspParams(lat, float(lo), float(hi)))
    if kind == "tube":
        from .tube_geometry import TubeParams, meyerhoff_radius, tube_as_warped

        length = float(data["length"])
        twist = float(data.get("twist", 0.0))
        radius = data.get("radius", "meyerhoff")
        if radius == "meyerhoff":
            radius = meyerhoff_radius(length)
        params = TubeParams(length, twist, float(radius))
        return tube_as_warped(
            params,
            margin=float(data.get("margin", 0.5)),
            normalized=bool(data.get("normalized", False)),
        )
    if kind == "custom":
        lat = FlatTorusLattice.from_json_dict(data["lattice"])
        samples = data["samples"]
        return WarpedMetricSpec.from_sampled(
            lat, samples["x3"], samples["a1"], samples["a2"], samples["h"]
        )
    raise DomainError(f"unknown metric kind {kind!r}")
