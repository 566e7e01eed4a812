"""Truncated graded-commutative cohomology rings and characteristic classes.

The model ring is Q[g_1, ..., g_r] with even-degree generators, truncated
above a fixed even degree.  All coefficients are exact rationals.  Bundles
are modeled by their splitting-principle root classes (formal first Chern
classes of line-bundle summands), so Chern characters, Pontryagin classes
and Hom/End bundles reduce to symmetric-function manipulations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DomainError, IncompatibleRingError, ModelError, WrongKindError

Monomial = tuple  # exponent vector, one entry per generator


@dataclass(frozen=True)
class RingSpec:
    """A truncated polynomial ring Q[g_1..g_r]/(deg > truncation_degree).

    Generator degrees must be even and positive; the grading is the
    weighted degree, and every homogeneous piece above the truncation
    degree is identically zero.
    """

    generators: tuple
    truncation_degree: int

    def __post_init__(self):
        gens = tuple((str(n), int(d)) for n, d in self.generators)
        object.__setattr__(self, "generators", gens)
        names = [n for n, _ in gens]
        if len(set(names)) != len(names):
            raise ModelError("generator names must be unique")
        for n, d in gens:
            if d <= 0 or d % 2 != 0:
                raise ModelError(f"generator {n!r} must have even positive degree, got {d}")
        if self.truncation_degree < 0 or self.truncation_degree % 2 != 0:
            raise ModelError("truncation_degree must be an even integer >= 0")

    @property
    def names(self):
        return tuple(n for n, _ in self.generators)

    @property
    def degrees(self):
        return tuple(d for _, d in self.generators)

    def monomial_degree(self, exps: Monomial) -> int:
        return sum(e * d for e, d in zip(exps, self.degrees))

    def zero(self) -> "RingClass":
        return RingClass(self, {})

    def one(self) -> "RingClass":
        return self.const(1)

    def const(self, q) -> "RingClass":
        q = Fraction(q)
        if q == 0:
            return self.zero()
        return RingClass(self, {(0,) * len(self.generators): q})

    def gen(self, name: str) -> "RingClass":
        try:
            i = self.names.index(name)
        except ValueError:
            raise ModelError(f"no generator named {name!r}") from None
        exps = [0] * len(self.generators)
        exps[i] = 1
        return RingClass(self, {tuple(exps): Fraction(1)})


class RingClass:
    """An element of a RingSpec: a map {monomial exponent vector: Fraction}.

    Instances are immutable in use; arithmetic returns new objects and
    truncation is applied on every product.
    """

    __slots__ = ("spec", "coeffs")

    def __init__(self, spec: RingSpec, coeffs: Mapping[Monomial, Fraction]):
        clean = {}
        for mono, c in coeffs.items():
            c = Fraction(c)
            if c == 0:
                continue
            mono = tuple(int(e) for e in mono)
            if len(mono) != len(spec.generators):
                raise ModelError("monomial length does not match generator count")
            if any(e < 0 for e in mono):
                raise ModelError("negative exponent in monomial")
            if spec.monomial_degree(mono) > spec.truncation_degree:
                continue  # truncated away
            clean[mono] = clean.get(mono, Fraction(0)) + c
        self.spec = spec
        self.coeffs = {m: c for m, c in clean.items() if c != 0}

    # -- structure ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_homogeneous(self) -> bool:
        degs = {self.spec.monomial_degree(m) for m in self.coeffs}
        return len(degs) <= 1

    def degree(self):
        """Degree of a homogeneous class (None for 0, error if mixed)."""
        degs = {self.spec.monomial_degree(m) for m in self.coeffs}
        if not degs:
            return None
        if len(degs) > 1:
            raise DomainError("class is not homogeneous")
        return degs.pop()

    def homogeneous_part(self, d: int) -> "RingClass":
        return RingClass(self.spec, {m: c for m, c in self.coeffs.items()
                                     if self.spec.monomial_degree(m) == d})

    def _check(self, other: "RingClass"):
        if self.spec != other.spec:
            raise IncompatibleRingError("operands live in different rings")

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "RingClass") -> "RingClass":
        self._check(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, Fraction(0)) + c
        return RingClass(self.spec, out)

    def __sub__(self, other: "RingClass") -> "RingClass":
        return self + (-other)

    def __neg__(self) -> "RingClass":
        return RingClass(self.spec, {m: -c for m, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, RingClass):
            self._check(other)
            out = {}
            trunc = self.spec.truncation_degree
            for m1, c1 in self.coeffs.items():
                d1 = self.spec.monomial_degree(m1)
                for m2, c2 in other.coeffs.items():
                    if d1 + self.spec.monomial_degree(m2) > trunc:
                        continue
                    m = tuple(a + b for a, b in zip(m1, m2))
                    out[m] = out.get(m, Fraction(0)) + c1 * c2
            return RingClass(self.spec, out)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, q) -> "RingClass":
        q = Fraction(q)
        return RingClass(self.spec, {m: q * c for m, c in self.coeffs.items()})

    def __pow__(self, n: int) -> "RingClass":
        if n < 0:
            raise DomainError("negative powers are not defined")
        out = self.spec.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, RingClass) and self.spec == other.spec
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.spec, frozenset(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        names = self.spec.names
        parts = []
        for m, c in sorted(self.coeffs.items()):
            factors = [f"{names[i]}^{e}" if e > 1 else names[i]
                       for i, e in enumerate(m) if e]
            mono = "*".join(factors) if factors else "1"
            parts.append(f"({c})*{mono}")
        return " + ".join(parts)


def ring_arith(a: RingClass, b: RingClass, op: str, q=None) -> RingClass:
    """Dispatch form of the ring arithmetic (add | mul | scale)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        if q is None:
            raise DomainError("scale requires a rational q")
        return a.scale(q)
    raise DomainError(f"unknown ring operation {op!r}")


def substitute(cls: RingClass, mapping: Mapping[str, RingClass],
               target: RingSpec) -> RingClass:
    """Apply a degree-preserving ring homomorphism generator-by-generator.

    Every generator of cls.spec must be mapped to a homogeneous class of
    the same degree in ``target``; raises ModelError otherwise.
    """
    images = []
    for name, deg in cls.spec.generators:
        if name not in mapping:
            raise ModelError(f"substitution map missing generator {name!r}")
        img = mapping[name]
        if img.spec != target:
            raise IncompatibleRingError("substitution image in wrong ring")
        if not img.is_zero() and img.degree() != deg:
            raise ModelError(
                f"substitution for {name!r} is not degree-preserving "
                f"({img.degree()} != {deg})")
        images.append(img)
    out = target.zero()
    for mono, c in cls.coeffs.items():
        term = target.const(c)
        for img, e in zip(images, mono):
            for _ in range(e):
                term = term * img
        out = out + term
    return out


# ---------------------------------------------------------------------------
# bundle models via the splitting principle
# ---------------------------------------------------------------------------

COMPLEX = "complex"
REALIFICATION = "realification-of-complex"


@dataclass(frozen=True)
class BundleModel:
    """A formal sum of line bundles given by degree-2 root classes.

    kind="complex": rank = len(roots) complex bundle with c_1 of the i-th
    line summand equal to roots[i].  kind="realification-of-complex": the
    underlying real bundle of that complex bundle (real rank 2*len(roots));
    its complexification has roots {+x_i, -x_i}.
    """

    roots: tuple
    kind: str = COMPLEX

    def __post_init__(self):
        if self.kind not in (COMPLEX, REALIFICATION):
            raise ModelError(f"unknown bundle kind {self.kind!r}")
        roots = tuple(self.roots)
        if not roots:
            raise ModelError("a bundle model needs at least one root")
        spec = roots[0].spec
        for r in roots:
            if r.spec != spec:
                raise IncompatibleRingError("roots live in different rings")
            if not r.is_zero() and r.degree() != 2:
                raise ModelError("roots must be homogeneous of degree 2")
        object.__setattr__(self, "roots", roots)

    @property
    def spec(self) -> RingSpec:
        return self.roots[0].spec

    @property
    def rank(self) -> int:
        """Complex rank (kind=complex) or half the real rank."""
        return len(self.roots)

    def realify(self) -> "BundleModel":
        if self.kind != COMPLEX:
            raise WrongKindError("only complex bundles can be realified")
        return BundleModel(self.roots, REALIFICATION)

    def direct_sum(self, other: "BundleModel") -> "BundleModel":
        if self.kind != other.kind:
            raise WrongKindError("direct sum needs matching kinds")
        return BundleModel(self.roots + other.roots, self.kind)


def line_bundle_tensor(a: BundleModel, b: BundleModel) -> BundleModel:
    """Tensor product of two line bundles: root x + y."""
    if a.kind != COMPLEX or b.kind != COMPLEX:
        raise WrongKindError("line bundle tensor is for complex line bundles")
    if a.rank != 1 or b.rank != 1:
        raise DomainError("tensor model is only implemented for line bundles")
    return BundleModel((a.roots[0] + b.roots[0],), COMPLEX)


def chern_character_component(xi: BundleModel, k: int) -> RingClass:
    """ch_k(xi) = sum_i x_i^k / k! for a sum of line bundles; ch_0 = rank."""
    if xi.kind != COMPLEX:
        raise WrongKindError("chern character needs a complex bundle model")
    if k < 0:
        raise DomainError("k must be >= 0")
    spec = xi.spec
    if k == 0:
        return spec.const(xi.rank)
    out = spec.zero()
    for x in xi.roots:
        out = out + x ** k
    return out.scale(Fraction(1, math.factorial(k)))


def hom_end_bundle(xi: BundleModel, eta: BundleModel) -> BundleModel:
    """Hom_C(xi, eta): one root y_j - x_i per pair; End(xi) = Hom(xi, xi)."""
    if xi.kind != COMPLEX or eta.kind != COMPLEX:
        raise WrongKindError("Hom model needs complex bundles")
    roots = [y - x for x in xi.roots for y in eta.roots]
    return BundleModel(tuple(roots), COMPLEX)


def elementary_symmetric(values: Iterable[RingClass], j: int,
                         spec: RingSpec) -> RingClass:
    """e_j of a list of ring classes, by the generating-polynomial recursion."""
    values = list(values)
    if j < 0 or j > len(values):
        return spec.zero()
    # e[t] after processing each value: prod (1 + v z) coefficientwise in z
    e = [spec.one()] + [spec.zero()] * j
    for v in values:
        for t in range(min(j, len(e) - 1), 0, -1):
            e[t] = e[t] + e[t - 1] * v
    return e[j]


def newton_polynomial(k: int) -> dict:
    """The k-th Newton polynomial N_k with p_k = N_k(e_1, ..., e_k).

    Returned as {exponent vector over (e_1..e_k): integer coefficient},
    built from the Newton identity
    p_k = e_1 p_{k-1} - e_2 p_{k-2} + ... + (-1)^(k-1) k e_k.
    """
    if k < 1:
        raise DomainError("k must be >= 1")

    def mono_mul(m, i):
        m = list(m)
        m[i] += 1
        return tuple(m)

    # p[t] as polynomial in e_1..e_k (exponent tuples of length k)
    p = [None] * (k + 1)
    zero_mono = (0,) * k
    for t in range(1, k + 1):
        acc = {}
        for i in range(1, t):
            sign = (-1) ** (i - 1)
            for m, c in p[t - i].items():
                mm = mono_mul(m, i - 1)
                acc[mm] = acc.get(mm, 0) + sign * c
        et = mono_mul(zero_mono, t - 1)
        acc[et] = acc.get(et, 0) + (-1) ** (t - 1) * t
        p[t] = {m: c for m, c in acc.items() if c != 0}
    return p[k]


def evaluate_newton(poly: dict, e_values: list, spec: RingSpec) -> RingClass:
    """Evaluate a Newton polynomial at given e_j classes (1-indexed list)."""
    out = spec.zero()
    for mono, c in poly.items():
        term = spec.const(c)
        for i, exp in enumerate(mono):
            for _ in range(exp):
                term = term * e_values[i]
        out = out + term
    return out


def half_ch_complexification(xi: BundleModel, k: int,
                             cross_check: bool = True) -> RingClass:
    """(1/2) ch_{2k}(xi (x) C) for the realification of a complex bundle.

    The complexification of the underlying real bundle has roots {+-x_i},
    so the value is sum_i x_i^{2k} / (2k)!.  When cross_check is set the
    same class is recomputed as N_k(p_1, p_2, ...)/(2k)! from the Pontryagin
    classes p_j = e_j(x_1^2, ..., x_m^2) and both paths must agree exactly.
    """
    if xi.kind != REALIFICATION:
        raise WrongKindError("half_ch_complexification needs a realification model")
    if k < 1:
        raise DomainError("k must be >= 1")
    spec = xi.spec
    direct = spec.zero()
    for x in xi.roots:
        direct = direct + x ** (2 * k)
    direct = direct.scale(Fraction(1, math.factorial(2 * k)))
    if cross_check:
        squares = [x * x for x in xi.roots]
        p = [elementary_symmetric(squares, j, spec) for j in range(1, k + 1)]
        via_newton = evaluate_newton(newton_polynomial(k), p, spec)
        via_newton = via_newton.scale(Fraction(1, math.factorial(2 * k)))
        if via_newton != direct:
            raise ModelError("Newton-polynomial path disagrees with root expansion")
    return direct
