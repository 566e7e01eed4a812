"""Numerical Kamber-Tondeur cochain on smooth families of invertible matrices.

For a family f_t of invertible complex n x n matrices over the standard
2k-simplex, with h_t = f_t f_t^*, the 2k-cochain is

    c_2k(f) = 1/(2 i^k (2k+1)!) * int_{Delta^{2k} x I}
              Tr( (h^{-u} d h^u)^{2k+1} )

where the (2k+1)-form is evaluated on the coordinate frame
(t_1, ..., t_{2k}, u) as the alternating sum over orderings of the legs;
du is the last coordinate.  The u-leg of h^{-u} d h^u is log h; the
simplex legs use the Daleckii-Krein divided-difference formula in the
eigenbasis of h.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, DomainError, ModelError
from .quadrature import prism_rule

CONDITION_CAP = 1e6
EIGENVALUE_COLLISION = 1e-8
FD_STEP = 1e-5


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor Gauss-Legendre rule pushed through the Duffy transform."""

    order: int = 10
    subdivision: int = 1

    def __post_init__(self):
        if self.order < 2:
            raise DomainError("order must be >= 2")
        if self.subdivision < 1:
            raise DomainError("subdivision must be >= 1")


@dataclass(frozen=True)
class KTValue:
    value: float
    estimated_error: float
    imag_diagnostic: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.value) and math.isfinite(self.estimated_error)):
            raise DomainError("KT value and error must be finite")


class MatrixFamily:
    """A smooth family of invertible matrices over the standard 2k-simplex.

    ``evaluator(t)`` takes an array of 2k simplex coordinates (the
    barycentric coordinate of vertex 0 is 1 - sum t) and returns an
    invertible complex (n, n) matrix.  Directional derivatives are either
    supplied analytically (``derivative(t, j)``) or taken by central
    finite differences with step ``fd_step``.
    """

    def __init__(self, n: int, k: int, evaluator, derivative=None,
                 fd_step: float = FD_STEP, catalog_id: str = None,
                 params: dict = None):
        if n < 1:
            raise DomainError("matrix size must be >= 1")
        if k < 0:
            raise DomainError("k must be >= 0")
        if fd_step <= 0:
            raise DomainError("finite-difference step must be positive")
        self.n = n
        self.k = k
        self.evaluator = evaluator
        self._derivative = derivative
        self.fd_step = fd_step
        self.catalog_id = catalog_id
        self.params = params or {}

    @property
    def dim(self) -> int:
        return 2 * self.k

    def f(self, t) -> np.ndarray:
        out = np.asarray(self.evaluator(np.asarray(t, dtype=float)),
                         dtype=complex)
        if out.shape != (self.n, self.n):
            raise ModelError(f"evaluator returned shape {out.shape}")
        return out

    def df(self, t, j: int) -> np.ndarray:
        if self._derivative is not None:
            return np.asarray(self._derivative(np.asarray(t, dtype=float), j),
                              dtype=complex)
        h = self.fd_step
        tp = np.array(t, dtype=float)
        tm = np.array(t, dtype=float)
        tp[j] += h
        tm[j] -= h
        return (self.f(tp) - self.f(tm)) / (2.0 * h)


def direct_sum_family(a: MatrixFamily, b: MatrixFamily) -> MatrixFamily:
    if a.k != b.k:
        raise DomainError("direct sum needs families over the same simplex")

    def ev(t):
        fa, fb = a.f(t), b.f(t)
        out = np.zeros((a.n + b.n, a.n + b.n), dtype=complex)
        out[:a.n, :a.n] = fa
        out[a.n:, a.n:] = fb
        return out

    def dv(t, j):
        da, db = a.df(t, j), b.df(t, j)
        out = np.zeros((a.n + b.n, a.n + b.n), dtype=complex)
        out[:a.n, :a.n] = da
        out[a.n:, a.n:] = db
        return out

    return MatrixFamily(a.n + b.n, a.k, ev, dv, catalog_id="direct-sum")


def conjugated_family(fam: MatrixFamily, U: np.ndarray,
                      V: np.ndarray) -> MatrixFamily:
    """t -> U f(t) V for constant matrices U, V."""
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    return MatrixFamily(fam.n, fam.k,
                        lambda t: U @ fam.f(t) @ V,
                        lambda t, j: U @ fam.df(t, j) @ V,
                        catalog_id="conjugated")


def inverse_conjugate_family(fam: MatrixFamily) -> MatrixFamily:
    """t -> conj(f(t))^{-1} (the involution input), n = 1 families."""
    if fam.n != 1:
        raise DomainError("involution check is implemented for n = 1")

    def ev(t):
        return np.conj(fam.f(t)) ** -1

    def dv(t, j):
        f = fam.f(t)[0, 0]
        df = fam.df(t, j)[0, 0]
        return np.array([[-np.conj(df) / np.conj(f) ** 2]])

    return MatrixFamily(1, fam.k, ev, dv, catalog_id="inverse-conjugate")


# ---------------------------------------------------------------------------
# the integrand
# ---------------------------------------------------------------------------

def _legs_at_node(fam: MatrixFamily, t: np.ndarray, u: float):
    """All 2k+1 coordinate legs of h^{-u} d h^u at one node, in the h-eigenbasis."""
    f = fam.f(t)
    h = f @ f.conj().T
    lam, vecs = np.linalg.eigh(h)
    # eigenvalues of h are squared singular values of f
    if lam[0] <= 0 or math.sqrt(lam[-1] / lam[0]) > CONDITION_CAP:
        cond = math.sqrt(lam[-1] / max(lam[0], 1e-300))
        raise ConditioningError(
            f"family condition number {cond:.3e} exceeds cap "
            f"{CONDITION_CAP:.1e} at t = {t}")
    scale = float(lam[-1])
    legs = []
    # Daleckii-Krein divided differences for g(x) = x^u; colliding
    # eigenvalue pairs fall back to the analytic limit u * lam^(u-1)
    lam_u = lam ** u
    diff = lam[None, :] - lam[:, None]
    close = np.abs(diff) < EIGENVALUE_COLLISION * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        dd = (lam_u[None, :] - lam_u[:, None]) / diff
    mid = 0.5 * (lam[None, :] + lam[:, None])
    dd[close] = (u * mid ** (u - 1.0))[close]
    inv_lam_u = lam ** (-u)
    for j in range(fam.dim):
        dh = fam.df(t, j)
        dh = dh @ f.conj().T + f @ dh.conj().T
        hj = vecs.conj().T @ dh @ vecs
        legs.append(inv_lam_u[:, None] * (hj * dd))
    legs.append(np.diag(np.log(lam)))  # u-leg: h^{-u} d_u h^u = log h
    return legs


def _alternating_trace(legs) -> complex:
    """sum over orderings sgn(sigma) Tr(prod legs[sigma])."""
    total = 0j
    for perm in itertools.permutations(range(len(legs))):
        sign = _perm_sign(perm)
        prod = legs[perm[0]]
        for idx in perm[1:]:
            prod = prod @ legs[idx]
        total += sign * np.trace(prod)
    return total


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _kt_raw(fam: MatrixFamily, order: int) -> complex:
    nodes, weights = prism_rule(fam.dim, order)
    total = 0j
    for node, w in zip(nodes, weights):
        t, u = node[:-1], float(node[-1])
        legs = _legs_at_node(fam, t, u)
        total += w * _alternating_trace(legs)
    return total


def kt_cochain(fam: MatrixFamily, quad: QuadratureSpec = QuadratureSpec()) -> KTValue:
    """The Kamber-Tondeur 2k-cochain c_2k(f) with an order-refinement error estimate.

    The value is computed at twice the requested order; the estimated
    error is the difference against the requested order (plus a floor at
    float precision).
    """
    prefactor = 1.0 / (2.0 * (1j ** fam.k) * math.factorial(2 * fam.k + 1))
    coarse = prefactor * _kt_raw(fam, quad.order)
    fine = prefactor * _kt_raw(fam, 2 * quad.order)
    err = abs(fine - coarse) + 1e-13 * (1.0 + abs(fine))
    return KTValue(value=float(fine.real), estimated_error=float(err),
                   imag_diagnostic=float(fine.imag))


# ---------------------------------------------------------------------------
# built-in catalog of serializable parametric families
# ---------------------------------------------------------------------------

def _catalog_constant(params: dict, k: int) -> MatrixFamily:
    mat = np.asarray(params["matrix"], dtype=complex)
    n = mat.shape[0]
    return MatrixFamily(n, k, lambda t: mat,
                        lambda t, j: np.zeros((n, n), dtype=complex),
                        catalog_id="constant", params=params)


def _catalog_diagonal_exponential(params: dict, k: int) -> MatrixFamily:
    """diag(exp(c_i + sum_j a_ij t_j + i b_ij t_j))."""
    a = np.asarray(params["a"], dtype=float)
    b = np.asarray(params["b"], dtype=float)
    c = np.asarray(params.get("c", np.zeros(a.shape[0])), dtype=complex)
    n = a.shape[0]

    def expo(t):
        return c + a @ t + 1j * (b @ t)

    def ev(t):
        return np.diag(np.exp(expo(t)))

    def dv(t, j):
        return np.diag((a[:, j] + 1j * b[:, j]) * np.exp(expo(t)))

    return MatrixFamily(n, k, ev, dv, catalog_id="diagonal-exponential",
                        params=params)


def _catalog_rotation_ramp(params: dict, k: int) -> MatrixFamily:
    """R(alpha . t) diag(exp(s . t), exp(-s . t)): a nonabelian 2x2 family."""
    alpha = np.asarray(params["alpha"], dtype=float)
    s = np.asarray(params["s"], dtype=float)

    def pieces(t):
        th = float(alpha @ t)
        r = np.array([[math.cos(th), -math.sin(th)],
                      [math.sin(th), math.cos(th)]], dtype=complex)
        dexp = float(s @ t)
        d = np.diag([math.exp(dexp), math.exp(-dexp)]).astype(complex)
        return th, r, dexp, d

    def ev(t):
        _, r, _, d = pieces(t)
        return r @ d

    def dv(t, j):
        th, r, dexp, d = pieces(t)
        dr = alpha[j] * np.array([[-math.sin(th), -math.cos(th)],
                                  [math.cos(th), -math.sin(th)]], dtype=complex)
        dd = s[j] * np.diag([math.exp(dexp), -math.exp(-dexp)]).astype(complex)
        return dr @ d + r @ dd

    return MatrixFamily(2, k, ev, dv, catalog_id="planar-rotation-ramp",
                        params=params)


def _catalog_scalar_exp(params: dict, k: int) -> MatrixFamily:
    """f(t) = exp(p . t + i q . t + c): one-dimensional families."""
    p = np.asarray(params["p"], dtype=float)
    q = np.asarray(params["q"], dtype=float)
    c = complex(params.get("c", 0.0))

    def ev(t):
        return np.array([[np.exp(c + p @ t + 1j * (q @ t))]])

    def dv(t, j):
        return np.array([[(p[j] + 1j * q[j]) * np.exp(c + p @ t + 1j * (q @ t))]])

    return MatrixFamily(1, k, ev, dv, catalog_id="scalar-exponential",
                        params=params)


def _catalog_random_smooth(params: dict, k: int) -> MatrixFamily:
    """Seeded f(t) = expm(G_0 + sum_j G_j t_j) with small random G's, n = 2."""
    from scipy.linalg import expm, expm_frechet

    seed = int(params.get("seed", 0))
    n = int(params.get("n", 2))
    amplitude = float(params.get("amplitude", 0.6))
    rng = np.random.default_rng(seed)
    dim = 2 * k
    gens = [amplitude * (rng.standard_normal((n, n))
                         + 1j * rng.standard_normal((n, n))) / 2.0
            for _ in range(dim + 1)]

    def arg(t):
        x = gens[0].copy()
        for j in range(dim):
            x = x + t[j] * gens[j + 1]
        return x

    def ev(t):
        return expm(arg(t))

    def dv(t, j):
        return expm_frechet(arg(t), gens[j + 1], compute_expm=False)

    return MatrixFamily(n, k, ev, dv, catalog_id="random-smooth",
                        params=params)


CATALOG = {
    "constant": _catalog_constant,
    "diagonal-exponential": _catalog_diagonal_exponential,
    "planar-rotation-ramp": _catalog_rotation_ramp,
    "scalar-exponential": _catalog_scalar_exp,
    "random-smooth": _catalog_random_smooth,
}


def catalog_family(catalog_id: str, params: dict, k: int) -> MatrixFamily:
    if catalog_id not in CATALOG:
        raise ModelError(f"unknown catalog family {catalog_id!r}; "
                         f"known: {sorted(CATALOG)}")
    return CATALOG[catalog_id](dict(params), k)


# ---------------------------------------------------------------------------
# property checks
# ---------------------------------------------------------------------------

def kt_direct_sum_check(fam_a: MatrixFamily, fam_b: MatrixFamily,
                        quad: QuadratureSpec = QuadratureSpec(),
                        tol: float = 1e-9) -> dict:
    """|c(A + B) - c(A) - c(B)| with the additivity pass criterion."""
    if fam_a.k != fam_b.k:
        raise DomainError("families must share k")
    whole = kt_cochain(direct_sum_family(fam_a, fam_b), quad)
    pa = kt_cochain(fam_a, quad)
    pb = kt_cochain(fam_b, quad)
    diff = abs(whole.value - pa.value - pb.value)
    bound = max(tol, 10.0 * (whole.estimated_error + pa.estimated_error
                             + pb.estimated_error))
    return {"lhs": whole.value, "rhs": pa.value + pb.value, "diff": diff,
            "tol": bound, "pass": diff <= bound}


def kt_unitary_invariance_check(fam: MatrixFamily, U: np.ndarray,
                                V: np.ndarray,
                                quad: QuadratureSpec = QuadratureSpec(),
                                tol: float = 1e-9) -> dict:
    """c(U f V) = c(f) for constant unitary U, V."""
    for name, mat in (("U", U), ("V", V)):
        mat = np.asarray(mat, dtype=complex)
        err = np.max(np.abs(mat @ mat.conj().T - np.eye(mat.shape[0])))
        if err > 1e-12:
            raise DomainError(f"{name} is not unitary (defect {err:.2e})")
    base = kt_cochain(fam, quad)
    moved = kt_cochain(conjugated_family(fam, U, V), quad)
    diff = abs(base.value - moved.value)
    return {"lhs": moved.value, "rhs": base.value, "diff": diff, "tol": tol,
            "pass": diff <= tol}


def kt_involution_check(fam: MatrixFamily,
                        quad: QuadratureSpec = QuadratureSpec(),
                        tol: float = 1e-9) -> dict:
    """c(conj(f)^{-1}) = -c(f) for scalar families."""
    if fam.n != 1:
        raise DomainError("involution check needs n = 1")
    base = kt_cochain(fam, quad)
    flipped = kt_cochain(inverse_conjugate_family(fam), quad)
    diff = abs(flipped.value + base.value)
    return {"lhs": flipped.value, "rhs": -base.value, "diff": diff,
            "tol": tol, "pass": diff <= tol}
