"""Tensor Gauss-Legendre quadrature on simplices via the Duffy transform."""

from __future__ import annotations

import numpy as np

from .errors import DomainError


def gauss_legendre_01(order: int):
    """Nodes and weights on [0, 1]."""
    if order < 2:
        raise DomainError("quadrature order must be >= 2")
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def duffy_simplex(dim: int, order: int):
    """Quadrature for the standard simplex {t_i >= 0, sum t_i <= 1}.

    A tensor Gauss-Legendre grid on [0,1]^dim is pushed through the
    collapsing map t_i = a_i * prod_{j<i} (1 - a_j), whose Jacobian is
    prod_i (1 - a_i)^(dim - 1 - i).  Returns (nodes, weights) with nodes
    of shape (N, dim).
    """
    if dim == 0:
        return np.zeros((1, 0)), np.ones(1)
    x, w = gauss_legendre_01(order)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    a = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    nodes = np.empty_like(a)
    remaining = np.ones(a.shape[0])
    jac = np.ones(a.shape[0])
    for i in range(dim):
        nodes[:, i] = a[:, i] * remaining
        jac *= remaining
        remaining = remaining * (1.0 - a[:, i])
    return nodes, weights * jac


def prism_rule(dim: int, order: int):
    """Quadrature for simplex x [0,1]: nodes (t..., u) and weights."""
    tn, tw = duffy_simplex(dim, order)
    un, uw = gauss_legendre_01(order)
    nodes = np.concatenate(
        [np.repeat(tn, len(un), axis=0),
         np.tile(un, len(tn))[:, None]], axis=1)
    weights = (tw[:, None] * uw[None, :]).ravel()
    return nodes, weights
