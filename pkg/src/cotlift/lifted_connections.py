"""Connections on the cotangent bundle induced by the base geometry.

Three constructions, all living on the 2n-dimensional induced chart with
basis (d/dx^i; d/dp_i):

* the split-signature extension metric

      G = [[A, I], [I, 0]],    A_ij = -2 p_k Gamma^k_ij,

  whose Levi-Civita connection is the *complete* lift of the base
  connection (computed here by the standard Levi-Civita formula, with jets
  supplying the derivatives of G);

* the *balanced* lift, defined directly on the frame E_i = h(d/dx^i),
  F^j = d/dp_j by

      D_{F^i} F^j = 0,   D_{F^i} E_j = 0,   D_{E_i} F^j = -Gamma^j_ik F^k,
      D_{E_i} E_j = Gamma^k_ij E_k
                    + v( R(e_i, e_j)/2 + R(e_i, .)e_j/6 + R(e_j, .)e_i/6 )

  and expanded to coordinates by Leibniz bookkeeping (see
  :func:`_lift_from_frame`); it is torsion-free, homogeneous, symplectic,
  and its curvature satisfies a cyclic balance condition;

* *symplectification*: for any torsion-free lift D, the (1,2)-tensor N with
  omega(N(V, W), U) = (D_V omega)(W, U) corrects D to the symplectic
  connection D + N/3 + N^T/3.

The headline identity verified by this package: symplectifying the complete
lift reproduces the balanced lift.

All tables follow the layout of :mod:`cotlift.base_geometry`:
``gamma[c, a, b]`` with upper index first, ``riem[k, l, i, j]`` with the
argument slot second.  Coordinate indices a < n are base directions, a >= n
momentum directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base_geometry import (
    ConnectionValue,
    CurvatureValue,
    ManifoldSpec,
    christoffel_jets,
    connection_data_at,
)
from .cotangent import PhaseField, PhasePoint, PhaseVector
from .jets import Jet

CONNECTIONS = ("complete", "balanced", "symplectified")


@dataclass
class RiemannExtensionValue:
    """Extension metric at a point as a (2n, 2n) table of jets."""

    n: int
    order: int
    matrix: np.ndarray

    def value_matrix(self) -> np.ndarray:
        m = 2 * self.n
        out = np.empty((m, m))
        for a in range(m):
            for b in range(m):
                out[a, b] = self.matrix[a, b].value
        return out


@dataclass
class NTensorValue:
    """Symplectification tensor N^c_ab at a point; ``table[c, a, b]``."""

    dim: int
    table: np.ndarray
    label: str = ""


# ---------------------------------------------------------------------------
# Extension metric and its Levi-Civita connection (the complete lift)
# ---------------------------------------------------------------------------


def riemann_extension_at(M: ManifoldSpec, pt: PhasePoint, order: int) -> RiemannExtensionValue:
    n = M.dim
    gj = christoffel_jets(M, pt.q, order, nvars=2 * n)
    p = [Jet.variable(n + k, pt.p[k], 2 * n, order) for k in range(n)]
    zero = Jet.constant(0.0, 2 * n, order)
    one = Jet.constant(1.0, 2 * n, order)

    G = np.empty((2 * n, 2 * n), dtype=object)
    for a in range(2 * n):
        for b in range(2 * n):
            G[a, b] = zero
    for i in range(n):
        G[i, n + i] = G[n + i, i] = one
        for j in range(i, n):
            acc = zero
            for k in range(n):
                acc = acc + p[k] * gj[k, i, j]
            G[i, j] = G[j, i] = -2.0 * acc
    return RiemannExtensionValue(n=n, order=order, matrix=G)


def _extension_inverse(A, n: int, zero, one) -> np.ndarray:
    """Closed-form inverse [[0, I], [I, -A]] of the extension metric."""
    Ginv = np.empty((2 * n, 2 * n), dtype=object)
    for a in range(2 * n):
        for b in range(2 * n):
            Ginv[a, b] = zero
    for i in range(n):
        Ginv[i, n + i] = Ginv[n + i, i] = one
        for j in range(n):
            Ginv[n + i, n + j] = -A[i][j]
    return Ginv


def _levi_civita_table(Ginv, dG, m: int, out_dtype) -> np.ndarray:
    """Gamma^c_ab = (1/2) G^cd (d_a G_db + d_b G_da - d_d G_ab)."""
    out = np.empty((m, m, m), dtype=out_dtype)
    for c in range(m):
        for a in range(m):
            for b in range(a, m):
                acc = 0.0
                for d in range(m):
                    acc = acc + Ginv[c, d] * (dG[a][d][b] + dG[b][d][a] - dG[d][a][b])
                out[c, a, b] = out[c, b, a] = 0.5 * acc
    return out


def complete_connection_at(M: ManifoldSpec, pt: PhasePoint) -> ConnectionValue:
    """Levi-Civita connection of the extension metric, as plain floats."""
    n = M.dim
    m = 2 * n
    G = riemann_extension_at(M, pt, order=1).matrix
    unit = np.eye(m, dtype=int)
    dG = [[[G[a, b].partial(unit[d]) for b in range(m)] for a in range(m)]
          for d in range(m)]
    A = np.array([[G[i, j].value for j in range(n)] for i in range(n)])
    Ginv = np.zeros((m, m))
    Ginv[:n, n:] = np.eye(n)
    Ginv[n:, :n] = np.eye(n)
    Ginv[n:, n:] = -A
    gamma = _levi_civita_table(Ginv, dG, m, float)
    return ConnectionValue(dim=m, gamma=gamma, label=f"complete[{M.name}]")


def complete_connection_jets(M: ManifoldSpec, pt: PhasePoint, order: int = 1) -> np.ndarray:
    """Coefficients of the complete lift as jets (for curvature, homogeneity)."""
    n = M.dim
    m = 2 * n
    Gfull = riemann_extension_at(M, pt, order + 1).matrix
    zero = Jet.constant(0.0, m, order)
    one = Jet.constant(1.0, m, order)
    dG = [[[Gfull[a, b].derivative(d) for b in range(m)] for a in range(m)]
          for d in range(m)]
    At = [[Gfull[i, j].truncate(order) for j in range(n)] for i in range(n)]
    Ginv = _extension_inverse(At, n, zero, one)
    return _levi_civita_table(Ginv, dG, m, object)


# ---------------------------------------------------------------------------
# Frame-defined lifts: Leibniz expansion to coordinates
# ---------------------------------------------------------------------------


def _lift_from_frame(gamma, dgamma, fiber_block, p, n: int, zero, out_dtype) -> np.ndarray:
    """Coordinate coefficients of a lift given on the horizontal/vertical frame.

    Input frame data: D_{F^i} F^j = D_{F^i} E_j = 0,
    D_{E_i} F^j = -Gamma^j_ik F^k, and
    D_{E_i} E_j = Gamma^k_ij E_k + p_k B^k_l(i, j) F^l with
    ``fiber_block[k, l, i, j]`` = B^k_l(i, j).

    Expanding through d/dx^i = E_i - p_k Gamma^k_im F^m and d/dp_j = F^j
    (Leibniz in the second slot, function-linearity in the first; the
    derivative E_i(p_k Gamma^k_jl) feeds in dGamma) gives

        out[k,   i, j]   = Gamma^k_ij
        out[n+l, i, j]   = p_k ( B^k_l(i,j) - d_i Gamma^k_jl
                                 + Gamma^k_jm Gamma^m_il
                                 + Gamma^k_lm Gamma^m_ij )
        out[n+l, i, n+j] = out[n+l, n+j, i] = -Gamma^j_il

    with every other entry zero.  Works over floats and jets alike.
    """
    m = 2 * n
    out = np.empty((m, m, m), dtype=out_dtype)
    for c in range(m):
        for a in range(m):
            for b in range(m):
                out[c, a, b] = zero

    for k in range(n):
        for i in range(n):
            for j in range(n):
                out[k, i, j] = gamma[k][i][j]

    for l in range(n):
        for i in range(n):
            for j in range(n):
                acc = zero
                for k in range(n):
                    term = fiber_block[k][l][i][j] - dgamma[i][k][j][l]
                    for mm in range(n):
                        term = term + (
                            gamma[k][j][mm] * gamma[mm][i][l]
                            + gamma[k][l][mm] * gamma[mm][i][j]
                        )
                    acc = acc + p[k] * term
                out[n + l, i, j] = acc

    for l in range(n):
        for i in range(n):
            for j in range(n):
                out[n + l, i, n + j] = out[n + l, n + j, i] = -gamma[j][i][l]
    return out


def _balanced_block(riem, n: int, sign: float):
    """B^k_l(i,j) = sign * ( R^k_lij / 2 + R^k_jil / 6 + R^k_ijl / 6 )."""
    b = [[[[sign * (
        0.5 * riem[k][l][i][j]
        + riem[k][j][i][l] * (1.0 / 6.0)
        + riem[k][i][j][l] * (1.0 / 6.0)
    ) for j in range(n)] for i in range(n)] for l in range(n)] for k in range(n)]
    return b


def _complete_frame_block(riem, n: int):
    """B^k_l(i,j) = -R^k_ijl, the frame form of the complete lift."""
    return [[[[-riem[k][i][j][l] for j in range(n)] for i in range(n)]
             for l in range(n)] for k in range(n)]


def balanced_lift_at(
    M: ManifoldSpec, pt: PhasePoint, *, curvature_sign: int = 1
) -> ConnectionValue:
    """The torsion-free, symplectic, homogeneous lift with balanced curvature.

    ``curvature_sign`` flips the sign of the curvature entering the frame
    correction; +1 is the calibrated convention (see CONVENTIONS.md), -1 is
    exposed so the verification suite can demonstrate that the opposite
    convention fails.
    """
    n = M.dim
    gamma, dgamma, riem = connection_data_at(M, pt.q)
    block = _balanced_block(riem, n, float(curvature_sign))
    table = _lift_from_frame(gamma, dgamma, block, pt.p, n, 0.0, float)
    return ConnectionValue(dim=2 * n, gamma=table, label=f"balanced[{M.name}]")


def complete_connection_frame_at(M: ManifoldSpec, pt: PhasePoint) -> ConnectionValue:
    """Complete lift built through the frame route instead of the metric route.

    Independent cross-check: must agree with :func:`complete_connection_at`.
    """
    n = M.dim
    gamma, dgamma, riem = connection_data_at(M, pt.q)
    block = _complete_frame_block(riem, n)
    table = _lift_from_frame(gamma, dgamma, block, pt.p, n, 0.0, float)
    return ConnectionValue(dim=2 * n, gamma=table, label=f"complete-frame[{M.name}]")


def _connection_inputs_jets(M: ManifoldSpec, q, order: int):
    """gamma, dgamma, riem as jets over the 2n-variable ring at ``order``."""
    n = M.dim
    gj = christoffel_jets(M, q, order + 1, nvars=2 * n)
    gamma = [[[gj[k, i, j].truncate(order) for j in range(n)] for i in range(n)]
             for k in range(n)]
    dgamma = [[[[gj[k, i, j].derivative(m) for j in range(n)] for i in range(n)]
               for k in range(n)] for m in range(n)]
    riem = [[[[None] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
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
                    riem[k][l][i][j] = acc
    return gamma, dgamma, riem


def balanced_lift_jets(
    M: ManifoldSpec, pt: PhasePoint, order: int = 1, *, curvature_sign: int = 1
) -> np.ndarray:
    n = M.dim
    gamma, dgamma, riem = _connection_inputs_jets(M, pt.q, order)
    block = _balanced_block(riem, n, float(curvature_sign))
    p = [Jet.variable(n + k, pt.p[k], 2 * n, order) for k in range(n)]
    zero = Jet.constant(0.0, 2 * n, order)
    return _lift_from_frame(gamma, dgamma, block, p, n, zero, object)


# ---------------------------------------------------------------------------
# Symplectification
# ---------------------------------------------------------------------------


def nabla_omega(conn: ConnectionValue) -> np.ndarray:
    """(D_a omega)_bc = -Gamma^d_ab omega_dc - Gamma^d_ac omega_bd.

    omega is constant in the induced chart, so only the connection terms
    survive; the sparse block structure of omega is folded in directly.
    """
    return _nabla_omega_table(conn.gamma, conn.dim // 2)


def _nabla_omega_table(gam, n: int) -> np.ndarray:
    m = 2 * n
    out = np.empty((m, m, m), dtype=np.asarray(gam).dtype)
    for a in range(m):
        for b in range(m):
            for c in range(m):
                t1 = gam[c - n][a][b] if c >= n else -gam[c + n][a][b]
                t2 = gam[b + n][a][c] if b < n else -gam[b - n][a][c]
                out[a, b, c] = t1 + t2
    return out


def n_tensor_at(M: ManifoldSpec, pt: PhasePoint) -> NTensorValue:
    """Solve omega(N(V, W), U) = (D_V omega)(W, U) for the complete lift."""
    conn = complete_connection_at(M, pt)
    table = _n_from_nabla_omega(nabla_omega(conn), M.dim)
    return NTensorValue(dim=conn.dim, table=table, label=f"n-tensor[{M.name}]")


def _n_from_nabla_omega(S, n: int) -> np.ndarray:
    """Contract with the closed-form inverse of omega: N^e_ab = S_abc (w^-1)^ce."""
    m = 2 * n
    out = np.empty((m, m, m), dtype=np.asarray(S).dtype)
    for a in range(m):
        for b in range(m):
            for e in range(m):
                out[e, a, b] = S[a][b][e - n] if e >= n else -S[a][b][e + n]
    return out


def symplectify_at(conn: ConnectionValue, nt: NTensorValue) -> ConnectionValue:
    """D + N/3 + N^T/3; restores D omega = 0 without touching torsion."""
    if conn.dim != nt.dim:
        raise ValueError(f"dimension mismatch: {conn.dim} vs {nt.dim}")
    gamma = conn.gamma + (nt.table + np.transpose(nt.table, (0, 2, 1))) / 3.0
    return ConnectionValue(dim=conn.dim, gamma=gamma, label=f"symplectified[{conn.label}]")


def symplectified_connection_at(M: ManifoldSpec, pt: PhasePoint) -> ConnectionValue:
    return symplectify_at(complete_connection_at(M, pt), n_tensor_at(M, pt))


# ---------------------------------------------------------------------------
# Dispatch, curvature, homogeneity
# ---------------------------------------------------------------------------


def connection_at(
    M: ManifoldSpec, pt: PhasePoint, which: str, *, curvature_sign: int = 1
) -> ConnectionValue:
    if which == "complete":
        return complete_connection_at(M, pt)
    if which == "balanced":
        return balanced_lift_at(M, pt, curvature_sign=curvature_sign)
    if which == "symplectified":
        return symplectified_connection_at(M, pt)
    raise ValueError(f"unknown connection {which!r}; expected one of {CONNECTIONS}")


def connection_jets(
    M: ManifoldSpec, pt: PhasePoint, which: str, order: int = 1, *, curvature_sign: int = 1
) -> np.ndarray:
    if which == "complete":
        return complete_connection_jets(M, pt, order)
    if which == "balanced":
        return balanced_lift_jets(M, pt, order, curvature_sign=curvature_sign)
    if which == "symplectified":
        n = M.dim
        cj = complete_connection_jets(M, pt, order)
        nt = _n_from_nabla_omega(_nabla_omega_table(cj, n), n)
        out = np.empty_like(cj)
        m = 2 * n
        for c in range(m):
            for a in range(m):
                for b in range(m):
                    out[c, a, b] = cj[c, a, b] + (nt[c, a, b] + nt[c, b, a]) / 3.0
        return out
    raise ValueError(f"unknown connection {which!r}; expected one of {CONNECTIONS}")


def curvature_from_jets(gj: np.ndarray) -> np.ndarray:
    """R^c_dab = d_a G^c_bd - d_b G^c_ad + G^c_ae G^e_bd - G^c_be G^e_ad."""
    m = gj.shape[0]
    unit = np.eye(m, dtype=int)
    val = np.empty((m, m, m))
    dval = np.empty((m, m, m, m))  # dval[d, c, a, b] = d_d Gamma^c_ab
    for c in range(m):
        for a in range(m):
            for b in range(m):
                val[c, a, b] = gj[c, a, b].value
                for d in range(m):
                    dval[d, c, a, b] = gj[c, a, b].partial(unit[d])
    riem = np.empty((m, m, m, m))
    for c in range(m):
        for d in range(m):
            for a in range(m):
                for b in range(m):
                    acc = dval[a, c, b, d] - dval[b, c, a, d]
                    for e in range(m):
                        acc += val[c, a, e] * val[e, b, d] - val[c, b, e] * val[e, a, d]
                    riem[c, d, a, b] = acc
    return riem


def phase_curvature_at(
    M: ManifoldSpec, pt: PhasePoint, which: str, *, curvature_sign: int = 1
) -> CurvatureValue:
    """Curvature of a lifted connection, via order-1 jets of its coefficients."""
    gj = connection_jets(M, pt, which, order=1, curvature_sign=curvature_sign)
    riem = curvature_from_jets(gj)
    return CurvatureValue(dim=2 * M.dim, riem=riem, label=f"{which}[{M.name}]")


def liouville_lie_derivative_from_jets(gj: np.ndarray, pt: PhasePoint) -> np.ndarray:
    """(L_xi D)(e_a, e_b) = [xi, D_a e_b] - D_[xi, a] e_b - D_a [xi, e_b].

    xi is the Liouville field; on coordinate fields [xi, d/dx^i] = 0 and
    [xi, d/dp_i] = -d/dp_i, which reduces the tensor to Euler scaling of the
    coefficients:

        L^c_ab = p_m d Gamma^c_ab / d p_m
                 - [c fiber] Gamma^c_ab + [a fiber] Gamma^c_ab
                 + [b fiber] Gamma^c_ab.
    """
    n = pt.n
    m = 2 * n
    unit = np.eye(m, dtype=int)
    out = np.empty((m, m, m))
    for c in range(m):
        for a in range(m):
            for b in range(m):
                euler = sum(
                    pt.p[k] * gj[c, a, b].partial(unit[n + k]) for k in range(n)
                )
                weight = (a >= n) + (b >= n) - (c >= n)
                out[c, a, b] = euler + weight * gj[c, a, b].value
    return out


def liouville_lie_derivative_at(
    M: ManifoldSpec, pt: PhasePoint, which: str, *, curvature_sign: int = 1
) -> np.ndarray:
    gj = connection_jets(M, pt, which, order=1, curvature_sign=curvature_sign)
    return liouville_lie_derivative_from_jets(gj, pt)


def covariant_phase_derivative(
    conn: ConnectionValue, V: PhaseVector, W: PhaseField, pt: PhasePoint
) -> PhaseVector:
    """(D_V W)^c = V^a d_a W^c + Gamma^c_ab V^a W^b at pt (V a value, W a field)."""
    m = conn.dim
    wj = W(pt, 1)
    unit = np.eye(m, dtype=int)
    wv = np.array([w.value for w in wj])
    out = np.zeros(m)
    for c in range(m):
        acc = 0.0
        for a in range(m):
            acc += V.components[a] * wj[c].partial(unit[a])
            for b in range(m):
                acc += conn.gamma[c, a, b] * V.components[a] * wv[b]
        out[c] = acc
    return PhaseVector(out, pt)
