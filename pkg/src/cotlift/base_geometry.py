"""Pointwise Riemannian data on the base manifold.

A manifold lives in a single chart: named coordinates, metric components
given as expressions, and a sampling box.  Everything downstream (metric,
Christoffel symbols, curvature, covariant derivatives) is evaluated at a
point by seeding the coordinates as jets and running the textbook formulas
through truncated Taylor arithmetic.

Index conventions used throughout the package:

* ``gamma[k, i, j]`` is the Christoffel symbol with upper index ``k``,
  Gamma^k_ij = (1/2) g^kl (d_i g_lj + d_j g_li - d_l g_ij);
* ``riem[k, l, i, j]`` is the curvature R^k_lij for the operator convention
  R(X, Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z, i.e. the Z slot is ``l``
  and the index formula is
  R^k_lij = d_i Gamma^k_jl - d_j Gamma^k_il
            + Gamma^k_im Gamma^m_jl - Gamma^k_jm Gamma^m_il;
* the gradient of a vector field is taken with the direction slot last,
  (grad X)^k_i = d_i X^k + Gamma^k_im X^m, i.e. (grad X)(Y) = D_Y X.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr
from .jets import Jet

DEFAULT_FIBER_INTERVAL = (-2.0, 2.0)
FIBER_EXCLUSION_RADIUS = 0.1


class GeometryError(Exception):
    """Base class for geometry failures."""


class MetricError(GeometryError):
    """Metric not positive definite at a sampled point."""

    def __init__(self, message: str, point=None) -> None:
        super().__init__(message)
        self.point = None if point is None else np.asarray(point, dtype=float)


class SamplingError(GeometryError):
    """Could not draw an admissible sample from the declared boxes."""

    def __init__(self, message: str, point=None) -> None:
        super().__init__(message)
        self.point = None if point is None else np.asarray(point, dtype=float)


class FieldRoleError(GeometryError):
    """A field of the wrong role was passed to an operation."""


# ---------------------------------------------------------------------------
# Manifold specification
# ---------------------------------------------------------------------------


@dataclass
class ManifoldSpec:
    """Chart data: coordinates, metric expressions, sampling boxes.

    ``metric_exprs`` is the full symmetric n x n table of parsed component
    expressions.  Base points are plain coordinate arrays; momenta sampled
    from ``fiber_box`` stay outside a ball of radius ``fiber_exclusion``
    around the zero section.
    """

    name: str
    dim: int
    coords: tuple[str, ...]
    metric_exprs: np.ndarray
    base_box: tuple[tuple[float, float], ...]
    fiber_box: tuple[tuple[float, float], ...]
    fiber_exclusion: float = FIBER_EXCLUSION_RADIUS

    @classmethod
    def build(
        cls,
        name: str,
        coords,
        metric: dict,
        domain: dict,
        fiber=None,
        fiber_exclusion: float = FIBER_EXCLUSION_RADIUS,
    ) -> "ManifoldSpec":
        """Assemble and validate a spec from upper-triangle metric strings.

        ``metric`` maps 0-based index pairs ``(i, j)`` with ``i <= j`` to
        expression strings (or parsed trees); missing off-diagonal entries
        default to zero.  ``domain`` maps each coordinate name to its
        sampling interval; ``fiber`` is one interval applied to every
        momentum component (default ``(-2, 2)``).
        """
        coords = tuple(coords)
        n = len(coords)
        if n < 1:
            raise GeometryError("a manifold needs at least one coordinate")
        if len(set(coords)) != n:
            raise GeometryError(f"duplicate coordinate names in {coords}")

        table = np.empty((n, n), dtype=object)
        zero = expr.Const(0.0)
        for i in range(n):
            for j in range(n):
                table[i, j] = zero
        for key, text in metric.items():
            i, j = key
            if not (0 <= i < n and 0 <= j < n):
                raise GeometryError(f"metric index {key} out of range for dim {n}")
            if i > j:
                raise GeometryError(f"give only the upper triangle, got {key}")
            try:
                node = text if not isinstance(text, str) else expr.parse(text, coords)
            except expr.ParseError as exc:
                raise GeometryError(
                    f"metric component {key} has an undeclared name or bad "
                    f"syntax: {exc}"
                ) from None
            unknown = expr.free_vars(node) - set(coords)
            if unknown:
                raise GeometryError(
                    f"metric component {key} uses undeclared names {sorted(unknown)}"
                )
            table[i, j] = node
            table[j, i] = node
        for i in range(n):
            if table[i, i] is zero:
                raise GeometryError(f"missing diagonal metric component ({i}, {i})")

        missing = [c for c in coords if c not in domain]
        if missing:
            raise GeometryError(f"no sampling interval for coordinates {missing}")
        base_box = tuple((float(domain[c][0]), float(domain[c][1])) for c in coords)
        for c, (lo, hi) in zip(coords, base_box):
            if not lo < hi:
                raise GeometryError(f"empty sampling interval for {c!r}: [{lo}, {hi}]")

        if fiber is None:
            fiber = DEFAULT_FIBER_INTERVAL
        flo, fhi = float(fiber[0]), float(fiber[1])
        if not flo < fhi:
            raise GeometryError(f"empty fiber interval [{flo}, {fhi}]")

        return cls(
            name=name,
            dim=n,
            coords=coords,
            metric_exprs=table,
            base_box=base_box,
            fiber_box=tuple((flo, fhi) for _ in range(n)),
            fiber_exclusion=float(fiber_exclusion),
        )


# ---------------------------------------------------------------------------
# Field specifications (vector fields, 1-forms, (1,1)-tensors, scalars)
# ---------------------------------------------------------------------------

_ROLE_SHAPES = {"vector": 1, "oneform": 1, "tensor": 2, "scalar": 0}


@dataclass
class FieldSpec:
    """Component expressions of a tensorial object over a coordinate chart."""

    role: str
    coords: tuple[str, ...]
    components: np.ndarray  # object array of parsed expressions
    name: str = ""

    @classmethod
    def _build(cls, role, coords, comps, name):
        coords = tuple(coords)
        arr = np.empty(np.shape(comps), dtype=object)
        flat_in = np.asarray(comps, dtype=object).reshape(-1)
        flat_out = arr.reshape(-1)
        for k, item in enumerate(flat_in):
            node = item if not isinstance(item, str) else expr.parse(item, coords)
            unknown = expr.free_vars(node) - set(coords)
            if unknown:
                raise FieldRoleError(
                    f"component uses undeclared names {sorted(unknown)}"
                )
            flat_out[k] = node
        expected = _ROLE_SHAPES[role]
        if arr.ndim != expected:
            raise FieldRoleError(
                f"{role} field needs a rank-{expected} component table, "
                f"got shape {arr.shape}"
            )
        if expected >= 1 and arr.shape[0] != len(coords):
            raise FieldRoleError(
                f"component count {arr.shape} does not match dim {len(coords)}"
            )
        if expected == 2 and arr.shape[0] != arr.shape[1]:
            raise FieldRoleError(f"tensor components must be square, got {arr.shape}")
        return cls(role=role, coords=coords, components=arr, name=name)

    @classmethod
    def vector(cls, coords, comps, name: str = "") -> "FieldSpec":
        return cls._build("vector", coords, list(comps), name)

    @classmethod
    def oneform(cls, coords, comps, name: str = "") -> "FieldSpec":
        return cls._build("oneform", coords, list(comps), name)

    @classmethod
    def tensor(cls, coords, rows, name: str = "") -> "FieldSpec":
        return cls._build("tensor", coords, [list(r) for r in rows], name)

    @classmethod
    def scalar(cls, coords, text, name: str = "") -> "FieldSpec":
        return cls._build("scalar", coords, np.asarray(text, dtype=object), name)


def require_role(f: FieldSpec, role: str, op: str) -> None:
    if f.role != role:
        raise FieldRoleError(f"{op} needs a {role} field, got {f.role!r}")


def field_values(f: FieldSpec, q) -> np.ndarray:
    """Evaluate all components at the base point ``q`` (plain floats)."""
    env = dict(zip(f.coords, np.asarray(q, dtype=float)))
    out = np.empty(f.components.shape)
    for idx in np.ndindex(*f.components.shape):
        out[idx] = expr.evaluate(f.components[idx], env)
    return out


def _as_jet(value, d: int, K: int) -> Jet:
    """Constant subexpressions evaluate to floats; promote them to jets."""
    if isinstance(value, Jet):
        return value
    return Jet.constant(float(value), d, K)


def field_jets(f: FieldSpec, q, order: int, nvars: int | None = None) -> np.ndarray:
    """Evaluate all components over seeded coordinate jets."""
    env = coordinate_jets(f.coords, q, order, nvars)
    d = len(f.coords) if nvars is None else nvars
    out = np.empty(f.components.shape, dtype=object)
    for idx in np.ndindex(*f.components.shape):
        out[idx] = _as_jet(expr.evaluate(f.components[idx], env), d, order)
    return out


def coordinate_jets(coords, q, order: int, nvars: int | None = None) -> dict:
    """Seed the chart coordinates as jet variables 0..n-1 of a d=nvars ring."""
    q = np.asarray(q, dtype=float)
    n = len(coords)
    d = n if nvars is None else nvars
    return {c: Jet.variable(i, q[i], d, order) for i, c in enumerate(coords)}


# ---------------------------------------------------------------------------
# Connection and curvature value containers
# ---------------------------------------------------------------------------


@dataclass
class ConnectionValue:
    """Connection coefficients at a point: ``gamma[c, a, b]`` = Gamma^c_ab."""

    dim: int
    gamma: np.ndarray
    label: str = ""

    def torsion(self) -> np.ndarray:
        return self.gamma - np.transpose(self.gamma, (0, 2, 1))


@dataclass
class CurvatureValue:
    """Curvature components ``riem[k, l, i, j]`` = R^k_lij (Z slot = l)."""

    dim: int
    riem: np.ndarray
    label: str = ""


# ---------------------------------------------------------------------------
# Metric, Christoffel symbols, curvature
# ---------------------------------------------------------------------------


def metric_values(M: ManifoldSpec, q) -> np.ndarray:
    env = dict(zip(M.coords, np.asarray(q, dtype=float)))
    n = M.dim
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = expr.evaluate(M.metric_exprs[i, j], env)
    return g


def check_positive_definite(M: ManifoldSpec, q) -> np.ndarray:
    g = metric_values(M, q)
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise MetricError(
            f"metric of {M.name!r} not positive definite at {np.asarray(q).tolist()}",
            point=q,
        ) from None
    return g


def metric_at(M: ManifoldSpec, q, order: int, nvars: int | None = None) -> np.ndarray:
    """Metric components as jets of the requested order, seeded at ``q``.

    ``nvars`` widens the jet ring (used when a computation also tracks
    momentum variables); the coordinates always occupy slots 0..n-1.
    """
    check_positive_definite(M, q)
    env = coordinate_jets(M.coords, q, order, nvars)
    n = M.dim
    d = n if nvars is None else nvars
    g = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = _as_jet(expr.evaluate(M.metric_exprs[i, j], env), d, order)
    return g


def _invert_jet_matrix(a: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse over the jet ring, pivoting on order-0 magnitude."""
    n = a.shape[0]
    work = [[a[i, j] for j in range(n)] for i in range(n)]
    probe = a[0, 0]
    ident = [
        [Jet.constant(1.0 if i == j else 0.0, probe.d, probe.K) for j in range(n)]
        for i in range(n)
    ]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(work[r][col].value))
        if work[piv][col].value == 0.0:
            raise MetricError("singular matrix in jet inversion")
        work[col], work[piv] = work[piv], work[col]
        ident[col], ident[piv] = ident[piv], ident[col]
        pivot = work[col][col]
        for j in range(n):
            work[col][j] = work[col][j] / pivot
            ident[col][j] = ident[col][j] / pivot
        for r in range(n):
            if r == col:
                continue
            factor = work[r][col]
            if factor.value == 0.0 and not factor.coeffs.any():
                continue
            for j in range(n):
                work[r][j] = work[r][j] - factor * work[col][j]
                ident[r][j] = ident[r][j] - factor * ident[col][j]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = ident[i][j]
    return out


def christoffel_jets(
    M: ManifoldSpec, q, order: int, nvars: int | None = None
) -> np.ndarray:
    """Christoffel symbols as jets of the given order (metric one order higher)."""
    g = metric_at(M, q, order + 1, nvars)
    n = M.dim
    ginv = _invert_jet_matrix(
        np.array([[g[i, j].truncate(order) for j in range(n)] for i in range(n)],
                 dtype=object)
    )
    dg = np.empty((n, n, n), dtype=object)  # dg[m, i, j] = d_m g_ij
    for m in range(n):
        for i in range(n):
            for j in range(i, n):
                dg[m, i, j] = dg[m, j, i] = g[i, j].derivative(m)
    gamma = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = 0.0
                for l in range(n):
                    acc = acc + ginv[k, l] * (dg[i, l, j] + dg[j, l, i] - dg[l, i, j])
                gamma[k, i, j] = gamma[k, j, i] = 0.5 * acc
    return gamma


def christoffel_at(M: ManifoldSpec, q) -> ConnectionValue:
    """Levi-Civita coefficients at ``q`` (plain floats)."""
    g = metric_at(M, q, 1)
    n = M.dim
    g0 = np.array([[g[i, j].value for j in range(n)] for i in range(n)])
    ginv = np.linalg.inv(g0)
    dg = np.empty((n, n, n))
    unit = np.eye(n, dtype=int)
    for m in range(n):
        for i in range(n):
            for j in range(i, n):
                dg[m, i, j] = dg[m, j, i] = g[i, j].partial(unit[m])
    gamma = np.empty((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = 0.0
                for l in range(n):
                    acc += ginv[k, l] * (dg[i, l, j] + dg[j, l, i] - dg[l, i, j])
                gamma[k, i, j] = gamma[k, j, i] = 0.5 * acc
    return ConnectionValue(dim=n, gamma=gamma, label=f"levi-civita[{M.name}]")


def connection_data_at(M: ManifoldSpec, q):
    """Christoffels, their first coordinate derivatives, and the curvature.

    Returns ``(gamma, dgamma, riem)`` with ``dgamma[m, k, i, j]`` =
    d_m Gamma^k_ij.  This is the full local input for building lifted
    connections at a point.
    """
    gj = christoffel_jets(M, q, 1)
    n = M.dim
    unit = np.eye(n, dtype=int)
    gamma = np.empty((n, n, n))
    dgamma = np.empty((n, n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                gamma[k, i, j] = gj[k, i, j].value
                for m in range(n):
                    dgamma[m, k, i, j] = gj[k, i, j].partial(unit[m])
    riem = _riemann_from_tables(gamma, dgamma)
    return gamma, dgamma, riem


def _riemann_from_tables(gamma, dgamma):
    """R^k_lij from Gamma and dGamma; generic over float or jet entries."""
    n = len(gamma)
    riem = np.empty((n, n, n, n), dtype=np.asarray(gamma).dtype)
    for k in range(n):
        for l in range(n):
            for i in range(n):
                for j in range(n):
                    acc = dgamma[i][k][j][l] - dgamma[j][k][i][l]
                    for m in range(n):
                        acc = acc + (
                            gamma[k][i][m] * gamma[m][j][l]
                            - gamma[k][j][m] * gamma[m][i][l]
                        )
                    riem[k, l, i, j] = acc
    return riem


def riemann_at(M: ManifoldSpec, q) -> CurvatureValue:
    _, _, riem = connection_data_at(M, q)
    return CurvatureValue(dim=M.dim, riem=riem, label=f"curvature[{M.name}]")


def riemann_jets(M: ManifoldSpec, q, order: int, nvars: int | None = None) -> np.ndarray:
    """Curvature components as jets of the given order."""
    gj = christoffel_jets(M, q, order + 1, nvars)
    n = M.dim
    gamma = [[[gj[k, i, j].truncate(order) for j in range(n)] for i in range(n)]
             for k in range(n)]
    dgamma = [[[[gj[k, i, j].derivative(m) for j in range(n)] for i in range(n)]
               for k in range(n)] for m in range(n)]
    out = np.empty((n, n, n, n), dtype=object)
    for k in range(n):
        for l in range(n):
            for i in range(n):
                for j in range(n):
                    acc = dgamma[i][k][j][l] - dgamma[j][k][i][l]
                    for m in range(n):
                        acc = acc + (
                            gamma[k][i][m] * gamma[m][j][l]
                            - gamma[k][j][m] * gamma[m][i][l]
                        )
                    out[k, l, i, j] = acc
    return out


def scalar_curvature_at(M: ManifoldSpec, q) -> float:
    """Contraction g^lj R^i_lij."""
    riem = riemann_at(M, q).riem
    ginv = np.linalg.inv(metric_values(M, q))
    return float(np.einsum("lj,ilij->", ginv, riem))


# ---------------------------------------------------------------------------
# Covariant derivatives of fields
# ---------------------------------------------------------------------------


def grad_vector_field_at(M: ManifoldSpec, X: FieldSpec, q) -> np.ndarray:
    """(grad X)^k_i = d_i X^k + Gamma^k_im X^m, so (grad X)(Y) = D_Y X."""
    require_role(X, "vector", "grad_vector_field_at")
    n = M.dim
    xj = field_jets(X, q, 1)
    gamma = christoffel_at(M, q).gamma
    unit = np.eye(n, dtype=int)
    out = np.empty((n, n))
    for k in range(n):
        for i in range(n):
            out[k, i] = xj[k].partial(unit[i]) + sum(
                gamma[k, i, m] * xj[m].value for m in range(n)
            )
    return out


def covariant_derivative_oneform_at(
    M: ManifoldSpec, alpha: FieldSpec, X: FieldSpec, q
) -> np.ndarray:
    """(D_X alpha)_i = X^m (d_m alpha_i - Gamma^k_mi alpha_k)."""
    require_role(alpha, "oneform", "covariant_derivative_oneform_at")
    require_role(X, "vector", "covariant_derivative_oneform_at")
    n = M.dim
    aj = field_jets(alpha, q, 1)
    xv = field_values(X, q)
    gamma = christoffel_at(M, q).gamma
    unit = np.eye(n, dtype=int)
    out = np.zeros(n)
    for i in range(n):
        for m in range(n):
            out[i] += xv[m] * (
                aj[i].partial(unit[m])
                - sum(gamma[k, m, i] * aj[k].value for k in range(n))
            )
    return out


def covariant_derivative_tensor_at(
    M: ManifoldSpec, T: FieldSpec, X: FieldSpec, q
) -> np.ndarray:
    """(D_X T)^k_l = X^m (d_m T^k_l + Gamma^k_ms T^s_l - Gamma^s_ml T^k_s)."""
    require_role(T, "tensor", "covariant_derivative_tensor_at")
    require_role(X, "vector", "covariant_derivative_tensor_at")
    n = M.dim
    tj = field_jets(T, q, 1)
    xv = field_values(X, q)
    gamma = christoffel_at(M, q).gamma
    unit = np.eye(n, dtype=int)
    out = np.zeros((n, n))
    for k in range(n):
        for l in range(n):
            for m in range(n):
                term = tj[k, l].partial(unit[m])
                for s in range(n):
                    term += gamma[k, m, s] * tj[s, l].value
                    term -= gamma[s, m, l] * tj[k, s].value
                out[k, l] += xv[m] * term
    return out


def lie_bracket_at(X: FieldSpec, Y: FieldSpec, q) -> np.ndarray:
    """[X, Y]^k = X^m d_m Y^k - Y^m d_m X^k."""
    require_role(X, "vector", "lie_bracket_at")
    require_role(Y, "vector", "lie_bracket_at")
    n = len(X.coords)
    xj = field_jets(X, q, 1)
    yj = field_jets(Y, q, 1)
    unit = np.eye(n, dtype=int)
    out = np.zeros(n)
    for k in range(n):
        for m in range(n):
            out[k] += xj[m].value * yj[k].partial(unit[m])
            out[k] -= yj[m].value * xj[k].partial(unit[m])
    return out


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def sample_base_point(
    M: ManifoldSpec, rng: np.random.Generator, max_tries: int = 1000
) -> np.ndarray:
    """Uniform draw from the base box, rejecting non-positive-definite spots."""
    last = None
    for _ in range(max_tries):
        q = np.array([rng.uniform(lo, hi) for lo, hi in M.base_box])
        last = q
        try:
            check_positive_definite(M, q)
        except MetricError:
            continue
        return q
    raise SamplingError(
        f"no positive definite sample for {M.name!r} after {max_tries} draws; "
        f"last draw {None if last is None else last.tolist()}",
        point=last,
    )


# ---------------------------------------------------------------------------
# Built-in catalog
# ---------------------------------------------------------------------------


def flat2() -> ManifoldSpec:
    """Euclidean plane."""
    return ManifoldSpec.build(
        "flat2",
        ("x", "y"),
        {(0, 0): "1", (1, 1): "1"},
        domain={"x": (-1.0, 1.0), "y": (-1.0, 1.0)},
    )


def sphere2() -> ManifoldSpec:
    """Unit sphere in polar angles; box stays clear of the poles."""
    return ManifoldSpec.build(
        "sphere2",
        ("theta", "phi"),
        {(0, 0): "1", (1, 1): "sin(theta)^2"},
        domain={"theta": (0.3, math.pi - 0.3), "phi": (-3.0, 3.0)},
    )


def halfplane2() -> ManifoldSpec:
    """Hyperbolic upper half-plane, g = y^-2 (dx^2 + dy^2)."""
    return ManifoldSpec.build(
        "halfplane2",
        ("x", "y"),
        {(0, 0): "1/y^2", (1, 1): "1/y^2"},
        domain={"x": (-1.0, 1.0), "y": (0.5, 2.0)},
    )


CATALOG = {"flat2": flat2, "sphere2": sphere2, "halfplane2": halfplane2}


def catalog_manifolds() -> list[ManifoldSpec]:
    return [factory() for factory in CATALOG.values()]
