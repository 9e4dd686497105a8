"""The induced chart on the cotangent bundle and the lifting operations.

A point of the bundle is (q, p) with q in the base chart and p the momentum
covector; the induced tangent basis is ordered (d/dx^1 .. d/dx^n,
d/dp_1 .. d/dp_n), so phase vectors have 2n components with the base block
first.

The canonical 1-form is theta = p_i dx^i and the symplectic form is its
exterior derivative, which in this basis is the constant matrix

    omega = [[0, -I], [I, 0]],    omega(d/dp_i, d/dx^j) = delta_ij.

Lift dictionary (components in the induced basis):

    tautological function of X:   X~(q, p) = p_k X^k(q)
    vertical lift of a 1-form:    v(alpha) = (0; alpha_i(q))
    vertical lift of a tensor:    v(T)     = (0; p_k T^k_i(q))
    Liouville field:              xi       = (0; p_i)
    complete lift of X:           c(X)     = (X^i; -p_k d_i X^k),
        the Hamiltonian field of X~ under omega(. , cX) = d X~
    horizontal lift of X:         h(X)     = (X^i; p_k Gamma^k_im X^m)
    connection map:               K(a; b)_i = b_i - p_k Gamma^k_mi a^m

Phase-space vector fields (needed for brackets and covariant derivatives of
lifts, whose components involve Christoffel symbols and therefore have no
closed-form expression tree) are represented as callables
``field(pt, order) -> list of 2n jets`` over the 2n seeded chart variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .base_geometry import (
    FieldSpec,
    GeometryError,
    ManifoldSpec,
    christoffel_at,
    christoffel_jets,
    field_jets,
    field_values,
    require_role,
    sample_base_point,
)
from .jets import Jet


@dataclass(eq=False)
class PhasePoint:
    """A point (q, p) of the cotangent bundle in the induced chart."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.q.shape != self.p.shape or self.q.ndim != 1:
            raise GeometryError(
                f"base and momentum must be 1-d of equal length, "
                f"got {self.q.shape} and {self.p.shape}"
            )

    @property
    def n(self) -> int:
        return len(self.q)

    @property
    def chart(self) -> np.ndarray:
        """All 2n chart values, base block first."""
        return np.concatenate([self.q, self.p])

    def same_point(self, other: "PhasePoint") -> bool:
        return np.array_equal(self.q, other.q) and np.array_equal(self.p, other.p)


@dataclass(eq=False)
class PhaseVector:
    """Tangent vector of the bundle at a tagged point, 2n components."""

    components: np.ndarray
    point: PhasePoint

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=float)
        if self.components.shape != (2 * self.point.n,):
            raise GeometryError(
                f"phase vector needs {2 * self.point.n} components, "
                f"got shape {self.components.shape}"
            )

    @property
    def base(self) -> np.ndarray:
        return self.components[: self.point.n]

    @property
    def fiber(self) -> np.ndarray:
        return self.components[self.point.n :]

    def _check_point(self, other: "PhaseVector"):
        if not self.point.same_point(other.point):
            raise GeometryError("phase vectors based at different points")

    def __add__(self, other: "PhaseVector") -> "PhaseVector":
        self._check_point(other)
        return PhaseVector(self.components + other.components, self.point)

    def __sub__(self, other: "PhaseVector") -> "PhaseVector":
        self._check_point(other)
        return PhaseVector(self.components - other.components, self.point)

    def __mul__(self, scalar) -> "PhaseVector":
        return PhaseVector(self.components * float(scalar), self.point)

    __rmul__ = __mul__


# ``field(pt, order)`` returns the 2n component jets over the 2n-variable ring
PhaseField = Callable[[PhasePoint, int], Sequence[Jet]]
ScalarPhaseField = Callable[[PhasePoint, int], Jet]


# ---------------------------------------------------------------------------
# Canonical structures
# ---------------------------------------------------------------------------


def theta_at(pt: PhasePoint) -> np.ndarray:
    """Tautological 1-form: components (p, 0)."""
    return np.concatenate([pt.p, np.zeros(pt.n)])


def omega_matrix(n: int) -> np.ndarray:
    """omega_ab = omega(e_a, e_b) in the induced basis: [[0, -I], [I, 0]]."""
    w = np.zeros((2 * n, 2 * n))
    w[:n, n:] = -np.eye(n)
    w[n:, :n] = np.eye(n)
    return w


def omega_inverse(n: int) -> np.ndarray:
    """Closed-form inverse [[0, I], [-I, 0]]; never inverted numerically."""
    w = np.zeros((2 * n, 2 * n))
    w[:n, n:] = np.eye(n)
    w[n:, :n] = -np.eye(n)
    return w


def omega_at(pt: PhasePoint) -> np.ndarray:
    return omega_matrix(pt.n)


def omega_pair(v: PhaseVector, w: PhaseVector) -> float:
    v._check_point(w)
    return float(v.components @ omega_matrix(v.point.n) @ w.components)


# ---------------------------------------------------------------------------
# Pointwise lifts
# ---------------------------------------------------------------------------


def tautological_at(X: FieldSpec, pt: PhasePoint) -> float:
    """X~(q, p) = <p, X(q)>."""
    require_role(X, "vector", "tautological_at")
    return float(pt.p @ field_values(X, pt.q))


def vlift_oneform_at(alpha: FieldSpec, pt: PhasePoint) -> PhaseVector:
    require_role(alpha, "oneform", "vlift_oneform_at")
    return PhaseVector(np.concatenate([np.zeros(pt.n), field_values(alpha, pt.q)]), pt)


def vlift_tensor_at(T: FieldSpec, pt: PhasePoint) -> PhaseVector:
    require_role(T, "tensor", "vlift_tensor_at")
    tv = field_values(T, pt.q)
    return PhaseVector(np.concatenate([np.zeros(pt.n), pt.p @ tv]), pt)


def vlift_tensor_values(tv: np.ndarray, pt: PhasePoint) -> PhaseVector:
    """Vertical lift of a pointwise (1,1)-tensor value table T^k_i."""
    return PhaseVector(np.concatenate([np.zeros(pt.n), pt.p @ np.asarray(tv)]), pt)


def liouville_at(pt: PhasePoint) -> PhaseVector:
    return PhaseVector(np.concatenate([np.zeros(pt.n), pt.p]), pt)


def complete_lift_at(X: FieldSpec, pt: PhasePoint) -> PhaseVector:
    """(X^i; -p_k d_i X^k), the Hamiltonian field of the tautological function."""
    require_role(X, "vector", "complete_lift_at")
    n = pt.n
    xj = field_jets(X, pt.q, 1)
    unit = np.eye(n, dtype=int)
    base = np.array([xj[i].value for i in range(n)])
    fiber = np.array(
        [-sum(pt.p[k] * xj[k].partial(unit[i]) for k in range(n)) for i in range(n)]
    )
    return PhaseVector(np.concatenate([base, fiber]), pt)


def horizontal_lift_at(M: ManifoldSpec, X: FieldSpec, pt: PhasePoint) -> PhaseVector:
    """(X^i; p_k Gamma^k_im X^m), annihilated by the connection map."""
    require_role(X, "vector", "horizontal_lift_at")
    n = pt.n
    xv = field_values(X, pt.q)
    gamma = christoffel_at(M, pt.q).gamma
    fiber = np.array(
        [
            sum(pt.p[k] * gamma[k, i, m] * xv[m] for k in range(n) for m in range(n))
            for i in range(n)
        ]
    )
    return PhaseVector(np.concatenate([xv, fiber]), pt)


def connection_map_at(M: ManifoldSpec, V: PhaseVector) -> np.ndarray:
    """K(a; b)_i = b_i - p_k Gamma^k_mi a^m, a covector on the base."""
    pt = V.point
    n = pt.n
    gamma = christoffel_at(M, pt.q).gamma
    return np.array(
        [
            V.fiber[i]
            - sum(pt.p[k] * gamma[k, m, i] * V.base[m] for k in range(n) for m in range(n))
            for i in range(n)
        ]
    )


# ---------------------------------------------------------------------------
# Phase-space vector fields as jet-evaluable callables
# ---------------------------------------------------------------------------


def _phase_seeds(pt: PhasePoint, order: int) -> list[Jet]:
    n = pt.n
    return [Jet.variable(a, pt.chart[a], 2 * n, order) for a in range(2 * n)]


def vertical_oneform_field(alpha: FieldSpec) -> PhaseField:
    require_role(alpha, "oneform", "vertical_oneform_field")

    def field(pt: PhasePoint, order: int):
        n = pt.n
        aj = field_jets(alpha, pt.q, order, nvars=2 * n)
        zero = Jet.constant(0.0, 2 * n, order)
        return [zero] * n + list(aj)

    return field


def vertical_tensor_field(T: FieldSpec) -> PhaseField:
    require_role(T, "tensor", "vertical_tensor_field")

    def field(pt: PhasePoint, order: int):
        n = pt.n
        tj = field_jets(T, pt.q, order, nvars=2 * n)
        seeds = _phase_seeds(pt, order)
        zero = Jet.constant(0.0, 2 * n, order)
        fiber = []
        for i in range(n):
            acc = zero
            for k in range(n):
                acc = acc + seeds[n + k] * tj[k, i]
            fiber.append(acc)
        return [zero] * n + fiber

    return field


def liouville_field() -> PhaseField:
    def field(pt: PhasePoint, order: int):
        n = pt.n
        seeds = _phase_seeds(pt, order)
        zero = Jet.constant(0.0, 2 * n, order)
        return [zero] * n + seeds[n:]

    return field


def complete_lift_field(X: FieldSpec) -> PhaseField:
    """Component jets of cX; the fiber block needs one extra derivative of X."""
    require_role(X, "vector", "complete_lift_field")

    def field(pt: PhasePoint, order: int):
        n = pt.n
        xj = field_jets(X, pt.q, order + 1, nvars=2 * n)
        seeds = _phase_seeds(pt, order)
        base = [xj[i].truncate(order) for i in range(n)]
        fiber = []
        for i in range(n):
            acc = Jet.constant(0.0, 2 * n, order)
            for k in range(n):
                acc = acc - seeds[n + k] * xj[k].derivative(i)
            fiber.append(acc)
        return base + fiber

    return field


def horizontal_lift_field(M: ManifoldSpec, X: FieldSpec) -> PhaseField:
    require_role(X, "vector", "horizontal_lift_field")

    def field(pt: PhasePoint, order: int):
        n = pt.n
        xj = field_jets(X, pt.q, order, nvars=2 * n)
        gj = christoffel_jets(M, pt.q, order, nvars=2 * n)
        seeds = _phase_seeds(pt, order)
        fiber = []
        for i in range(n):
            acc = Jet.constant(0.0, 2 * n, order)
            for k in range(n):
                for m in range(n):
                    acc = acc + seeds[n + k] * gj[k, i, m] * xj[m]
            fiber.append(acc)
        return list(xj) + fiber

    return field


def tautological_field(X: FieldSpec) -> ScalarPhaseField:
    require_role(X, "vector", "tautological_field")

    def field(pt: PhasePoint, order: int) -> Jet:
        n = pt.n
        xj = field_jets(X, pt.q, order, nvars=2 * n)
        seeds = _phase_seeds(pt, order)
        acc = Jet.constant(0.0, 2 * n, order)
        for k in range(n):
            acc = acc + seeds[n + k] * xj[k]
        return acc

    return field


def field_value_at(field: PhaseField, pt: PhasePoint) -> PhaseVector:
    comps = field(pt, 1)
    return PhaseVector(np.array([c.value for c in comps]), pt)


def directional_derivative_at(f: ScalarPhaseField, V: PhaseVector, pt: PhasePoint) -> float:
    """V applied to the scalar function f at pt."""
    jet = f(pt, 1)
    m = 2 * pt.n
    unit = np.eye(m, dtype=int)
    return float(sum(V.components[a] * jet.partial(unit[a]) for a in range(m)))


def phase_bracket_at(V: PhaseField, W: PhaseField, pt: PhasePoint) -> PhaseVector:
    """[V, W]^c = V^a d_a W^c - W^a d_a V^c at pt."""
    vj = V(pt, 1)
    wj = W(pt, 1)
    m = 2 * pt.n
    unit = np.eye(m, dtype=int)
    out = np.zeros(m)
    for c in range(m):
        for a in range(m):
            out[c] += vj[a].value * wj[c].partial(unit[a])
            out[c] -= wj[a].value * vj[c].partial(unit[a])
    return PhaseVector(out, pt)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def sample_phase_point(
    M: ManifoldSpec, rng: np.random.Generator, max_tries: int = 1000
) -> PhasePoint:
    """Uniform draw from base box x fiber box, momentum kept off the zero section."""
    q = sample_base_point(M, rng, max_tries=max_tries)
    last = None
    for _ in range(max_tries):
        p = np.array([rng.uniform(lo, hi) for lo, hi in M.fiber_box])
        last = p
        if np.linalg.norm(p) >= M.fiber_exclusion:
            return PhasePoint(q, p)
    raise GeometryError(
        f"could not draw momentum outside radius {M.fiber_exclusion} "
        f"for {M.name!r}; last draw {None if last is None else last.tolist()}"
    )
