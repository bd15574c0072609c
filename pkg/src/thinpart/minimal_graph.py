"""Graphs x3 = u(x1, x2) in a diagonal warped metric: area, first
variation, the minimal-surface operator, a damped-Newton solver, and the
uniform-graph rescaling bounds.

The area element is W = sqrt(a1^2 a2^2 + a2^2 u_x1^2 + a1^2 u_x2^2) with
a_i evaluated at u.  Discretely, the area is a sum of cell-midpoint values
of W; the Euler-Lagrange residual is minus the exact gradient of that sum
(per unit cell weight), which keeps the divergence term in conservative
form and makes the discrete integration-by-parts identity
    first_variation(u, v) = -<el_residual(u), v>
hold to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DomainError, SolveError
from .flat_torus import FlatTorusLattice
from .warped_metric import WarpedMetricSpec


@dataclass
class DiscreteGraph:
    """Grid sample of a graph function.

    ``periodic`` holds one flag per axis: a periodic axis wraps around,
    a non-periodic axis carries a Dirichlet boundary ring (included in
    ``values``).  ``origin`` is the coordinate of node [0, 0].
    """

    values: np.ndarray
    spacing: tuple
    periodic: tuple = (False, False)
    origin: tuple = (0.0, 0.0)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise DomainError("graph values must be a 2-d array")
        if min(self.values.shape) < 4:
            raise DomainError("need at least 4 grid points per axis")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("graph values must be finite")
        if isinstance(self.periodic, bool):
            self.periodic = (self.periodic, self.periodic)
        h1, h2 = self.spacing
        if h1 <= 0 or h2 <= 0:
            raise DomainError("grid spacing must be positive")

    # -- constructors ------------------------------------------------------

    @classmethod
    def on_torus(cls, lattice: FlatTorusLattice, shape, fn_or_values) -> "DiscreteGraph":
        """Periodic grid over the fundamental domain of a rectangular
        lattice (a2 = 0); sheared lattices are not supported by the
        finite-difference stencils."""
        if abs(lattice.a2) > 1e-9 * max(lattice.norm1, lattice.norm2):
            raise DomainError(
                "periodic graphs require a rectangular lattice (a2 = 0)"
            )
        n1, n2 = shape
        g = cls(
            _fill(fn_or_values, (n1, n2), (lattice.a1 / n1, lattice.b2 / n2), (0.0, 0.0)),
            (lattice.a1 / n1, lattice.b2 / n2),
            periodic=(True, True),
        )
        return g

    @classmethod
    def on_rectangle(cls, extent, shape, fn_or_values, origin=(0.0, 0.0),
                     periodic=(False, False)) -> "DiscreteGraph":
        """Grid over origin + [0, X1] x [0, X2]; per-axis periodicity.

        A periodic axis has nodes at i*h with h = X/n (no duplicated
        seam); a Dirichlet axis has nodes at i*h with h = X/(n-1),
        boundary included.
        """
        n1, n2 = shape
        X1, X2 = extent
        h1 = X1 / n1 if periodic[0] else X1 / (n1 - 1)
        h2 = X2 / n2 if periodic[1] else X2 / (n2 - 1)
        return cls(
            _fill(fn_or_values, (n1, n2), (h1, h2), origin),
            (h1, h2),
            periodic=periodic,
            origin=tuple(origin),
        )

    # -- coordinates and views ----------------------------------------------

    @property
    def shape(self):
        return self.values.shape

    def x1_coords(self) -> np.ndarray:
        return self.origin[0] + self.spacing[0] * np.arange(self.shape[0])

    def x2_coords(self) -> np.ndarray:
        return self.origin[1] + self.spacing[1] * np.arange(self.shape[1])

    def free_slices(self):
        s1 = slice(None) if self.periodic[0] else slice(1, -1)
        s2 = slice(None) if self.periodic[1] else slice(1, -1)
        return s1, s2

    def free_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[self.free_slices()] = True
        return mask

    def copy(self) -> "DiscreteGraph":
        return DiscreteGraph(
            self.values.copy(), self.spacing, self.periodic, self.origin
        )


def _fill(fn_or_values, shape, spacing, origin):
    if callable(fn_or_values):
        x1 = origin[0] + spacing[0] * np.arange(shape[0])
        x2 = origin[1] + spacing[1] * np.arange(shape[1])
        X1, X2 = np.meshgrid(x1, x2, indexing="ij")
        return np.asarray(fn_or_values(X1, X2), dtype=float) * np.ones(shape)
    vals = np.asarray(fn_or_values, dtype=float)
    if vals.shape == ():
        return np.full(shape, float(vals))
    if vals.shape != tuple(shape):
        raise DomainError(f"values shape {vals.shape} != grid shape {shape}")
    return vals.copy()


def _require_diagonal(spec: WarpedMetricSpec):
    if not spec.diagonal_form:
        raise DomainError("graph operations support diagonal specs only")


def _check_range(spec: WarpedMetricSpec, values: np.ndarray):
    width = spec.x3_max - spec.x3_min
    slack = 1e-9 * width
    lo, hi = float(values.min()), float(values.max())
    if lo < spec.x3_min - slack or hi > spec.x3_max + slack:
        raise DomainError(
            f"graph values [{lo!r}, {hi!r}] leave the spec range "
            f"[{spec.x3_min!r}, {spec.x3_max!r}]"
        )


def _cell_corners(g: DiscreteGraph):
    """Index arrays of the four corners of each cell (wrapping on
    periodic axes)."""
    n1, n2 = g.shape
    m1 = n1 if g.periodic[0] else n1 - 1
    m2 = n2 if g.periodic[1] else n2 - 1
    i0 = np.arange(m1)
    j0 = np.arange(m2)
    i1 = (i0 + 1) % n1
    j1 = (j0 + 1) % n2
    return i0, i1, j0, j1


def _triangles(g: DiscreteGraph):
    """Node stencils of the two linear triangles per grid cell.

    Each triangle is a list of (i_idx, j_idx, c_coef, x_coef, y_coef):
    the nodal coefficients producing the triangle's centroid value and
    its (constant) gradient.  Splitting cells kills the odd-even
    decoupling a pure cell-centered stencil would have; on the flat
    metric the assembled operator is the classic 5-point scheme.
    """
    i0, i1, j0, j1 = _cell_corners(g)
    h1, h2 = g.spacing
    third = 1.0 / 3.0
    lower = [
        (i0, j0, third, -1.0 / h1, -1.0 / h2),
        (i1, j0, third, +1.0 / h1, 0.0),
        (i0, j1, third, 0.0, +1.0 / h2),
    ]
    upper = [
        (i1, j0, third, 0.0, -1.0 / h2),
        (i0, j1, third, -1.0 / h1, 0.0),
        (i1, j1, third, +1.0 / h1, +1.0 / h2),
    ]
    return (lower, upper)


def _tri_fields(g: DiscreteGraph, tri, values=None):
    """Centroid value and gradient of a nodal field on one triangle set."""
    u = g.values if values is None else values
    uc = 0.0
    ux = 0.0
    uy = 0.0
    for (ii, jj, c, bx, by) in tri:
        uv = u[np.ix_(ii, jj)]
        uc = uc + c * uv
        if bx:
            ux = ux + bx * uv
        if by:
            uy = uy + by * uv
    return uc, ux, uy


def _coefficients(spec, uc):
    a1v = np.asarray(spec.a1(uc), dtype=float)
    a2v = np.asarray(spec.a2(uc), dtype=float)
    a1p = np.asarray(spec.a1.d1(uc), dtype=float)
    a2p = np.asarray(spec.a2.d1(uc), dtype=float)
    return a1v, a2v, a1p, a2p


def area(spec: WarpedMetricSpec, g: DiscreteGraph) -> float:
    """Graph area: centroid quadrature of the area element W over the
    triangulated grid."""
    _require_diagonal(spec)
    _check_range(spec, g.values)
    total = 0.0
    for tri in _triangles(g):
        uc, ux, uy = _tri_fields(g, tri)
        a1v, a2v, _, _ = _coefficients(spec, uc)
        W = np.sqrt((a1v * a2v) ** 2 + a2v**2 * ux**2 + a1v**2 * uy**2)
        total += float(np.sum(W))
    return total * 0.5 * g.spacing[0] * g.spacing[1]


def _gradient(spec: WarpedMetricSpec, g: DiscreteGraph) -> np.ndarray:
    """Exact gradient of the discrete area w.r.t. the nodal values
    (full-shape array; boundary entries are meaningful only as reactions)."""
    tri_w = 0.5 * g.spacing[0] * g.spacing[1]
    acc = np.zeros(g.shape)
    for tri in _triangles(g):
        uc, ux, uy = _tri_fields(g, tri)
        a1v, a2v, a1p, a2p = _coefficients(spec, uc)
        W = np.sqrt((a1v * a2v) ** 2 + a2v**2 * ux**2 + a1v**2 * uy**2)
        # dW/d(uc, ux, uy) at the centroids.
        wc = (
            a1v * a1p * a2v**2
            + a1v**2 * a2v * a2p
            + a2v * a2p * ux**2
            + a1v * a1p * uy**2
        ) / W
        wp = a2v**2 * ux / W
        wq = a1v**2 * uy / W
        for (ii, jj, c, bx, by) in tri:
            np.add.at(acc, np.ix_(ii, jj), (c * wc + bx * wp + by * wq) * tri_w)
    return acc


def el_residual(spec: WarpedMetricSpec, g: DiscreteGraph) -> np.ndarray:
    """Euler-Lagrange residual Div((a2^2 u_x1, a1^2 u_x2)/W) - bulk term
    on the free nodes (second-order, conservative form)."""
    _require_diagonal(spec)
    _check_range(spec, g.values)
    acc = _gradient(spec, g)
    h1, h2 = g.spacing
    return -acc[g.free_slices()] / (h1 * h2)


def first_variation(spec: WarpedMetricSpec, g: DiscreteGraph, v) -> float:
    """Derivative of the graph area along the variation v.

    v must vanish on Dirichlet boundary rings (or be periodic).  Equals
    -sum(el_residual * v * cell_weight) by construction.
    """
    _require_diagonal(spec)
    _check_range(spec, g.values)
    v = np.asarray(v, dtype=float)
    if v.shape != g.shape:
        raise DomainError(f"variation shape {v.shape} != graph shape {g.shape}")
    scale = float(np.max(np.abs(v))) or 1.0
    for axis in (0, 1):
        if not g.periodic[axis]:
            ring = np.concatenate(
                [np.take(v, 0, axis=axis).ravel(), np.take(v, -1, axis=axis).ravel()]
            )
            if np.max(np.abs(ring)) > 1e-12 * scale:
                raise DomainError("variation must vanish on the Dirichlet boundary")

    total = 0.0
    for tri in _triangles(g):
        uc, ux, uy = _tri_fields(g, tri)
        vc, vx, vy = _tri_fields(g, tri, v)
        a1v, a2v, a1p, a2p = _coefficients(spec, uc)
        W = np.sqrt((a1v * a2v) ** 2 + a2v**2 * ux**2 + a1v**2 * uy**2)
        integrand = (
            a1v * a1p * a2v**2 * vc
            + a1v**2 * a2v * a2p * vc
            + a2v * a2p * ux**2 * vc
            + a2v**2 * ux * vx
            + a1v * a1p * uy**2 * vc
            + a1v**2 * uy * vy
        ) / W
        total += float(np.sum(integrand))
    return total * 0.5 * g.spacing[0] * g.spacing[1]


def _hessian(spec: WarpedMetricSpec, g: DiscreteGraph) -> sp.csr_matrix:
    """Hessian of the discrete area restricted to the free nodes."""
    free = g.free_mask()
    free_index = -np.ones(g.shape, dtype=np.int64)
    free_index[free] = np.arange(int(free.sum()))
    nfree = int(free.sum())
    tri_w = 0.5 * g.spacing[0] * g.spacing[1]

    rows, cols, data = [], [], []
    for tri in _triangles(g):
        uc, ux, uy = _tri_fields(g, tri)
        a1v = np.asarray(spec.a1(uc), dtype=float)
        a2v = np.asarray(spec.a2(uc), dtype=float)
        a1p = np.asarray(spec.a1.d1(uc), dtype=float)
        a2p = np.asarray(spec.a2.d1(uc), dtype=float)
        a1s = np.asarray(spec.a1.d2(uc), dtype=float)
        a2s = np.asarray(spec.a2.d2(uc), dtype=float)

        prod = a1v * a2v
        dprod = a1p * a2v + a1v * a2p
        c0 = prod**2
        c0p = 2.0 * prod * dprod
        c0pp = 2.0 * (dprod**2 + prod * (a1s * a2v + 2.0 * a1p * a2p + a1v * a2s))
        c1 = a1v**2
        c1p = 2.0 * a1v * a1p
        c1pp = 2.0 * (a1p**2 + a1v * a1s)
        c2 = a2v**2
        c2p = 2.0 * a2v * a2p
        c2pp = 2.0 * (a2p**2 + a2v * a2s)

        p, q = ux, uy
        W = np.sqrt(c0 + c2 * p**2 + c1 * q**2)
        Wc = (c0p + c2p * p**2 + c1p * q**2) / (2.0 * W)
        Wp = c2 * p / W
        Wq = c1 * q / W
        second = {
            ("c", "c"): (c0pp + c2pp * p**2 + c1pp * q**2) / (2.0 * W) - Wc**2 / W,
            ("c", "x"): c2p * p / W - Wc * Wp / W,
            ("c", "y"): c1p * q / W - Wc * Wq / W,
            ("x", "x"): c2 / W - Wp**2 / W,
            ("x", "y"): -Wp * Wq / W,
            ("y", "y"): c1 / W - Wq**2 / W,
        }

        def entry(ka, kb):
            key = (ka, kb) if (ka, kb) in second else (kb, ka)
            return second[key]

        for (ia, ja, ca, bxa, bya) in tri:
            ra = free_index[np.ix_(ia, ja)]
            for (ib, jb, cb, bxb, byb) in tri:
                rb = free_index[np.ix_(ib, jb)]
                val = tri_w * (
                    ca * cb * entry("c", "c")
                    + (ca * bxb + bxa * cb) * entry("c", "x")
                    + (ca * byb + bya * cb) * entry("c", "y")
                    + bxa * bxb * entry("x", "x")
                    + (bxa * byb + bya * bxb) * entry("x", "y")
                    + bya * byb * entry("y", "y")
                )
                keep = (ra >= 0) & (rb >= 0)
                rows.append(ra[keep])
                cols.append(rb[keep])
                data.append(np.broadcast_to(val, ra.shape)[keep])
    H = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nfree, nfree),
    )
    return H.tocsr()


@dataclass
class SolveReport:
    iterations: int
    converged: bool
    residual_history: list = field(default_factory=list)
    pinned_mean: bool = False

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1] if self.residual_history else math.nan


def _linear_solve(H, rhs):
    try:
        lu = spla.splu(H.tocsc())
        delta = lu.solve(rhs)
    except (RuntimeError, ValueError):
        return None
    if not np.all(np.isfinite(delta)):
        return None
    check = H @ delta - rhs
    scale = float(np.linalg.norm(rhs)) or 1.0
    if np.linalg.norm(check) > 1e-6 * scale:
        return None
    return delta


def solve(spec: WarpedMetricSpec, init: DiscreteGraph, tol: float = 1e-10,
          max_iter: int = 60):
    """Damped Newton iteration on the area gradient until
    max|el_residual| <= tol.

    The initial iterate supplies the Dirichlet data (its boundary ring is
    held fixed) or the periodic topology.  On a singular linearization
    (flat periodic problems have a constant near-kernel) the mean of the
    update is pinned.  Raises SolveError with the residual history on
    failure.
    """
    _require_diagonal(spec)
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    g = init.copy()
    _check_range(spec, g.values)
    free = g.free_slices()
    h1, h2 = g.spacing
    cell_w = h1 * h2
    pinned = False
    history = []

    def residual_max(graph):
        return float(np.max(np.abs(_gradient(spec, graph)[free]))) / cell_w

    def merit(graph):
        F = _gradient(spec, graph)[free]
        return float(np.dot(F.ravel(), F.ravel()))

    for it in range(max_iter):
        rmax = residual_max(g)
        history.append(rmax)
        if rmax <= tol:
            return g, SolveReport(it, True, history, pinned)

        F = _gradient(spec, g)[free].ravel()
        H = _hessian(spec, g)
        # All-periodic problems on a vertically flat stretch have the
        # constants in the kernel; detect the near-kernel cheaply along
        # that direction and pin the mean of the update.
        near_kernel = False
        if all(g.periodic):
            n = H.shape[0]
            scale = float(np.max(np.abs(H.data))) if H.nnz else 1.0
            near_kernel = float(np.max(np.abs(H @ np.ones(n)))) < 1e-10 * scale
        delta = None if near_kernel else _linear_solve(H, -F)
        if delta is None:
            if any(g.periodic):
                # KKT system constraining the update to zero mean.
                n = H.shape[0]
                e = np.ones((n, 1))
                K = sp.bmat([[H, e], [e.T, None]], format="csc")
                try:
                    sol = spla.splu(K).solve(np.concatenate([-F, [0.0]]))
                except (RuntimeError, ValueError) as exc:
                    raise SolveError("singular Jacobian", history) from exc
                if not np.all(np.isfinite(sol)):
                    raise SolveError("singular Jacobian", history)
                delta = sol[:n]
                pinned = True
            else:
                raise SolveError("singular Jacobian", history)

        # Armijo backtracking on ||gradient||^2, with a steepest-descent
        # fallback when the Newton direction fails.
        phi0 = float(np.dot(F, F))
        accepted = False
        for direction in (delta, -F):
            alpha = 1.0
            if direction is not delta:
                nrm = float(np.linalg.norm(direction))
                if nrm > 0:
                    alpha = min(1.0, float(np.linalg.norm(delta)) / nrm + 1e-30)
            while alpha > 2.0**-30:
                trial = g.copy()
                trial.values[free] = g.values[free] + alpha * direction.reshape(
                    g.values[free].shape
                )
                lo = float(trial.values.min())
                hi = float(trial.values.max())
                if lo < spec.x3_min or hi > spec.x3_max:
                    alpha *= 0.5
                    continue
                if merit(trial) <= (1.0 - 1e-4 * alpha) * phi0:
                    g = trial
                    accepted = True
                    break
                alpha *= 0.5
            if accepted:
                break
        if not accepted:
            raise SolveError(
                f"line search stalled at residual {rmax:.3e}", history
            )

    history.append(residual_max(g))
    raise SolveError(
        f"no convergence after {max_iter} iterations; last residual "
        f"{history[-1]:.3e}", history
    )


def _node_derivatives(g: DiscreteGraph):
    """Centered first and second derivatives on the free nodes."""
    u = g.values
    h1, h2 = g.spacing
    if g.periodic[0]:
        up1, um1 = np.roll(u, -1, axis=0), np.roll(u, 1, axis=0)
    else:
        up1 = np.empty_like(u)
        um1 = np.empty_like(u)
        up1[:-1] = u[1:]
        um1[1:] = u[:-1]
        up1[-1] = um1[0] = np.nan
    if g.periodic[1]:
        vp1, vm1 = np.roll(u, -1, axis=1), np.roll(u, 1, axis=1)
    else:
        vp1 = np.empty_like(u)
        vm1 = np.empty_like(u)
        vp1[:, :-1] = u[:, 1:]
        vm1[:, 1:] = u[:, :-1]
        vp1[:, -1] = vm1[:, 0] = np.nan

    ux = (up1 - um1) / (2 * h1)
    uy = (vp1 - vm1) / (2 * h2)
    uxx = (up1 - 2 * u + um1) / h1**2
    uyy = (vp1 - 2 * u + vm1) / h2**2

    def shift(a, d1, d2):
        b = np.roll(a, -d1, axis=0) if g.periodic[0] else _slide(a, d1, 0)
        return np.roll(b, -d2, axis=1) if g.periodic[1] else _slide(b, d2, 1)

    uxy = (shift(u, 1, 1) - shift(u, 1, -1) - shift(u, -1, 1) + shift(u, -1, -1)) / (
        4 * h1 * h2
    )
    s = g.free_slices()
    return u[s], ux[s], uy[s], uxx[s], uyy[s], uxy[s]


def _slide(a, d, axis):
    out = np.full_like(a, np.nan)
    if d == 1:
        if axis == 0:
            out[:-1] = a[1:]
        else:
            out[:, :-1] = a[:, 1:]
    elif d == -1:
        if axis == 0:
            out[1:] = a[:-1]
        else:
            out[:, 1:] = a[:, :-1]
    else:
        out = a
    return out


def graph_mean_curvature(spec: WarpedMetricSpec, g: DiscreteGraph) -> np.ndarray:
    """Mean curvature of the graph surface from induced metric and second
    fundamental form, at the free nodes.  The normal is the upward one
    (positive x3 component); for a level torus this gives
    -(a1'/a1 + a2'/a2)/2."""
    _require_diagonal(spec)
    _check_range(spec, g.values)
    u, ux, uy, uxx, uyy, uxy = _node_derivatives(g)
    a1v = np.asarray(spec.a1(u), dtype=float)
    a2v = np.asarray(spec.a2(u), dtype=float)
    a1p = np.asarray(spec.a1.d1(u), dtype=float)
    a2p = np.asarray(spec.a2.d1(u), dtype=float)

    W2 = (a1v * a2v) ** 2 + a2v**2 * ux**2 + a1v**2 * uy**2
    W = np.sqrt(W2)
    ratio = a1v * a2v / W
    II11 = ratio * (uxx - a1v * a1p - 2.0 * (a1p / a1v) * ux**2)
    II12 = ratio * (uxy - (a1p / a1v + a2p / a2v) * ux * uy)
    II22 = ratio * (uyy - a2v * a2p - 2.0 * (a2p / a2v) * uy**2)
    G11 = a1v**2 + ux**2
    G12 = ux * uy
    G22 = a2v**2 + uy**2
    return (G22 * II11 - 2.0 * G12 * II12 + G11 * II22) / (2.0 * W2)


@dataclass(frozen=True)
class GraphBoundsParams:
    """Constants of the uniform-graph neighborhood bounds."""

    comparison: float   # metric comparison constant, >= 1
    intrinsic_radius: float
    curvature_bound: float
    tangency_level: float
    graph_constant: float  # the constant C sizing the graph neighborhood

    def __post_init__(self):
        if self.comparison < 1.0:
            raise DomainError("comparison constant must be >= 1")
        for name in ("intrinsic_radius", "curvature_bound", "graph_constant"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be positive")


@dataclass(frozen=True)
class BoundCheck:
    name: str
    supremum: float
    limit: float

    @property
    def ratio(self) -> float:
        return self.supremum / self.limit

    @property
    def ok(self) -> bool:
        return self.supremum <= self.limit * (1.0 + 1e-9)


@dataclass(frozen=True)
class RescaleReport:
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def __getitem__(self, name: str) -> BoundCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def rescale_graph(spec: WarpedMetricSpec, g: DiscreteGraph,
                  params: GraphBoundsParams):
    """Shrink the graph to unit scale, v(y) = u(y / h(t_bar)), and check
    the neighborhood bounds |u| <= A eps0, |grad u| <= h(t_bar),
    |Hess u| <= h(t_bar)^2 / C on the covering disk.

    The input must be a Dirichlet rectangle grid containing the disk of
    radius sqrt(2) C / h(t_bar) about the origin.  Returns the rescaled
    graph together with the bound report.
    """
    _require_diagonal(spec)
    if any(g.periodic):
        raise DomainError("rescale_graph expects a rectangle grid")
    h_t = float(spec.warping(params.tangency_level))
    if h_t <= 0:
        raise DomainError("warping must be positive at the tangency level")
    radius = math.sqrt(2.0) * params.graph_constant / h_t

    x1 = g.x1_coords()
    x2 = g.x2_coords()
    if (
        x1[0] > -radius or x1[-1] < radius or x2[0] > -radius or x2[-1] < radius
    ):
        raise DomainError(
            f"domain too small: need the disk of radius {radius!r} about 0"
        )

    u, ux, uy, uxx, uyy, uxy = _node_derivatives(g)
    X1, X2 = np.meshgrid(x1[1:-1], x2[1:-1], indexing="ij")
    mask = X1**2 + X2**2 <= radius**2
    grad = np.hypot(ux, uy)
    mean = 0.5 * (uxx + uyy)
    dev = np.sqrt(0.25 * (uxx - uyy) ** 2 + uxy**2)
    hess = np.abs(mean) + dev  # spectral norm of the symmetric Hessian

    checks = (
        BoundCheck("value", float(np.max(np.abs(u[mask]))),
                   params.comparison * params.intrinsic_radius),
        BoundCheck("gradient", float(np.max(grad[mask])), h_t),
        BoundCheck("hessian", float(np.max(hess[mask])),
                   h_t**2 / params.graph_constant),
    )
    rescaled = DiscreteGraph(
        g.values.copy(),
        (g.spacing[0] * h_t, g.spacing[1] * h_t),
        periodic=g.periodic,
        origin=(g.origin[0] * h_t, g.origin[1] * h_t),
    )
    return rescaled, RescaleReport(checks)
