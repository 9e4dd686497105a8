"""Finite-difference oracle, independent of the jet kernel.

Every derivative here comes from nested central differences with Richardson
extrapolation; nothing in this file touches truncated Taylor arithmetic.
Tests compare jet-computed quantities against these.

Base steps are per derivative order: third-order stencils at step 1e-4 are
dominated by roundoff (eps / h^3 is about 2e-4), so higher orders use larger
steps and two Richardson levels to keep truncation at bay.
"""

from __future__ import annotations

import numpy as np

from cotlift.base_geometry import ManifoldSpec, metric_values

# step and Richardson depth per total derivative order
_STEP = {1: 1e-4, 2: 1e-3, 3: 4e-3}
_LEVELS = {1: 1, 2: 2, 3: 2}


def fd_partial(f, x, alpha, step: float | None = None, levels: int | None = None) -> float:
    """Mixed partial d^alpha f(x) by nested central differences + Richardson."""
    x = np.asarray(x, dtype=float)
    alpha = tuple(int(a) for a in alpha)
    order = sum(alpha)
    if order == 0:
        return float(f(x))
    h0 = _STEP[order] if step is None else step
    levels = _LEVELS[order] if levels is None else levels

    def stencil(h):
        def rec(point, remaining):
            for i, a in enumerate(remaining):
                if a > 0:
                    less = list(remaining)
                    less[i] -= 1
                    up = point.copy()
                    up[i] += h
                    down = point.copy()
                    down[i] -= h
                    return (rec(up, less) - rec(down, less)) / (2.0 * h)
            return float(f(point))

        return rec(x, alpha)

    # Neville table on D(h), D(h/2), ... : error is O(h^2) per level
    table = [stencil(h0 / 2.0**i) for i in range(levels + 1)]
    for j in range(1, levels + 1):
        fac = 4.0**j
        table = [
            (fac * table[i + 1] - table[i]) / (fac - 1.0)
            for i in range(len(table) - 1)
        ]
    return table[0]


def fd_christoffel(M: ManifoldSpec, q) -> np.ndarray:
    """Levi-Civita coefficients, metric derivatives by finite differences."""
    q = np.asarray(q, dtype=float)
    n = M.dim
    g = metric_values(M, q)
    ginv = np.linalg.inv(g)
    unit = np.eye(n, dtype=int)
    dg = np.empty((n, n, n))
    for m in range(n):
        for i in range(n):
            for j in range(n):
                dg[m, i, j] = fd_partial(
                    lambda x, i=i, j=j: metric_values(M, x)[i, j], q, unit[m]
                )
    gamma = np.empty((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                gamma[k, i, j] = 0.5 * sum(
                    ginv[k, l] * (dg[i, l, j] + dg[j, l, i] - dg[l, i, j])
                    for l in range(n)
                )
    return gamma


def fd_riemann(M: ManifoldSpec, q) -> np.ndarray:
    """R^k_lij with dGamma by finite differences over fd_christoffel."""
    q = np.asarray(q, dtype=float)
    n = M.dim
    unit = np.eye(n, dtype=int)
    gamma = fd_christoffel(M, q)
    dgamma = np.empty((n, n, n, n))
    for m in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    dgamma[m, k, i, j] = fd_partial(
                        lambda x, k=k, i=i, j=j: fd_christoffel(M, x)[k, i, j],
                        q,
                        unit[m],
                        step=1e-3,
                        levels=1,
                    )
    riem = np.empty((n, n, n, n))
    for k in range(n):
        for l in range(n):
            for i in range(n):
                for j in range(n):
                    riem[k, l, i, j] = (
                        dgamma[i, k, j, l]
                        - dgamma[j, k, i, l]
                        + sum(
                            gamma[k, i, m] * gamma[m, j, l]
                            - gamma[k, j, m] * gamma[m, i, l]
                            for m in range(n)
                        )
                    )
    return riem


def _extension_metric(M: ManifoldSpec, chart) -> np.ndarray:
    """G = [[A, I], [I, 0]] with A = -2 p.Gamma, Gamma by finite differences."""
    n = M.dim
    q, p = chart[:n], chart[n:]
    gamma = fd_christoffel(M, q)
    A = np.einsum("k,kij->ij", -2.0 * p, gamma)
    G = np.zeros((2 * n, 2 * n))
    G[:n, :n] = A
    G[:n, n:] = np.eye(n)
    G[n:, :n] = np.eye(n)
    return G


def fd_complete_connection(M: ManifoldSpec, chart) -> np.ndarray:
    """Levi-Civita of the extension metric, every derivative finite-difference."""
    chart = np.asarray(chart, dtype=float)
    n = M.dim
    m = 2 * n
    unit = np.eye(m, dtype=int)
    G = _extension_metric(M, chart)
    Ginv = np.zeros((m, m))
    Ginv[:n, n:] = np.eye(n)
    Ginv[n:, :n] = np.eye(n)
    Ginv[n:, n:] = -G[:n, :n]
    dG = np.empty((m, m, m))
    for d in range(m):
        for a in range(m):
            for b in range(m):
                dG[d, a, b] = fd_partial(
                    lambda x, a=a, b=b: _extension_metric(M, x)[a, b],
                    chart,
                    unit[d],
                    step=1e-3,
                    levels=1,
                )
    gamma = np.empty((m, m, m))
    for c in range(m):
        for a in range(m):
            for b in range(m):
                gamma[c, a, b] = 0.5 * sum(
                    Ginv[c, d] * (dG[a, d, b] + dG[b, d, a] - dG[d, a, b])
                    for d in range(m)
                )
    return gamma


def fd_nabla_omega_complete(M: ManifoldSpec, chart) -> np.ndarray:
    """(D_a omega)_bc for the finite-difference complete lift."""
    n = M.dim
    m = 2 * n
    gamma = fd_complete_connection(M, chart)
    W = np.zeros((m, m))
    W[:n, n:] = -np.eye(n)
    W[n:, :n] = np.eye(n)
    out = np.empty((m, m, m))
    for a in range(m):
        for b in range(m):
            for c in range(m):
                out[a, b, c] = -sum(
                    gamma[d, a, b] * W[d, c] + gamma[d, a, c] * W[b, d]
                    for d in range(m)
                )
    return out
