"""Closed-form higher torsion calculators and their algebraic combinators.

A TorsionClass is a real multiple of an exact cohomology class: it stores
an exact rational prefactor, a tagged transcendental factor (a polylog or
odd zeta value, kept as a float), and a rational body class.  Sums of
terms with different transcendental factors are carried as extra terms so
that the boundary-correction and gluing combinators stay total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .charclass import (
    COMPLEX,
    REALIFICATION,
    BundleModel,
    RingClass,
    RingSpec,
    chern_character_component,
    half_ch_complexification,
    substitute,
)
from .errors import DomainError, ModelError
from .polylog import RootOfUnity, polylog_L, riemann_zeta_odd

ONE = RootOfUnity(1, 0)


def _upper_triangular_gate(z: RootOfUnity, flag: bool, what: str):
    if z.reduced.is_one and not flag:
        raise DomainError(
            f"{what} at z = 1 requires the upper-triangular hypothesis; "
            "pass upper_triangular=True to assert it")


def _L(k: int, z: RootOfUnity) -> tuple:
    """(tag, value) for the L_{k+1}(z) transcendental factor."""
    zr = z.reduced
    return f"L({k + 1};{zr.m},{zr.j})", polylog_L(k, z).value


def _zeta(k: int) -> tuple:
    """(tag, value) for zeta(2k+1)."""
    return f"zeta({2 * k + 1})", riemann_zeta_odd(k)


@dataclass(frozen=True)
class TorsionTerm:
    rational: Fraction
    transcendental: float
    tag: str
    body: RingClass

    def folded(self) -> RingClass:
        """Exact rational part folded into the body."""
        return self.body.scale(self.rational)

    def float_coeffs(self) -> dict:
        w = float(self.rational) * self.transcendental
        return {m: w * float(c) for m, c in self.body.coeffs.items()}


@dataclass(frozen=True)
class TorsionClass:
    """scalar * body (plus optional extra terms), tagged with (k, m, zeta).

    ``degree`` is the paper-style subscript: the body of a degree-k class
    is homogeneous of cohomological degree 2k.
    """

    degree: int
    m: int
    zeta: RootOfUnity
    rational: Fraction
    transcendental: float
    trans_tag: str
    body: RingClass
    provenance: str
    extra_terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.degree < 1:
            raise DomainError("torsion degree k must be >= 1")
        object.__setattr__(self, "rational", Fraction(self.rational))
        if not math.isfinite(self.transcendental):
            raise DomainError("transcendental factor must be finite")
        if not self.body.is_zero():
            if not self.body.is_homogeneous() or self.body.degree() != 2 * self.degree:
                raise DomainError(
                    f"body must be homogeneous of degree {2 * self.degree}")

    @property
    def scalar(self) -> float:
        """The real prefactor multiplying the body."""
        return float(self.rational) * self.transcendental

    @property
    def terms(self) -> tuple:
        lead = TorsionTerm(self.rational, self.transcendental,
                           self.trans_tag, self.body)
        return (lead,) + self.extra_terms

    def is_zero_class(self) -> bool:
        return all(t.rational == 0 or t.body.is_zero() for t in self.terms)

    def float_coeffs(self) -> dict:
        """Monomial -> float coefficient of the full class (all terms)."""
        out = {}
        for t in self.terms:
            for mono, v in t.float_coeffs().items():
                out[mono] = out.get(mono, 0.0) + v
        return {m: v for m, v in out.items() if v != 0.0}

    def magnitude(self) -> float:
        return max((abs(v) for v in self.float_coeffs().values()), default=0.0)

    def scale_rational(self, q) -> "TorsionClass":
        q = Fraction(q)
        extras = tuple(TorsionTerm(t.rational * q, t.transcendental, t.tag, t.body)
                       for t in self.extra_terms)
        return TorsionClass(self.degree, self.m, self.zeta, self.rational * q,
                            self.transcendental, self.trans_tag, self.body,
                            self.provenance, extras)

    def add(self, other: "TorsionClass", provenance: str = None) -> "TorsionClass":
        """Formal sum; merges terms sharing a transcendental tag exactly."""
        if self.degree != other.degree:
            raise DomainError("cannot add torsion classes of different degree")
        if self.body.spec != other.body.spec:
            raise ModelError("torsion bodies live in different rings")
        merged = {}
        order = []
        for t in self.terms + other.terms:
            if t.rational == 0 or t.body.is_zero():
                continue
            if t.tag in merged:
                prev = merged[t.tag]
                merged[t.tag] = TorsionTerm(
                    Fraction(1), prev.transcendental, t.tag,
                    prev.folded() + t.folded())
            else:
                merged[t.tag] = t
                order.append(t.tag)
        terms = [merged[tag] for tag in order
                 if not merged[tag].folded().is_zero()]
        if not terms:
            terms = [TorsionTerm(Fraction(0), self.transcendental,
                                 self.trans_tag, self.body.spec.zero())]
        lead, extras = terms[0], tuple(terms[1:])
        return TorsionClass(self.degree, self.m, self.zeta, lead.rational,
                            lead.transcendental, lead.tag, lead.body,
                            provenance or self.provenance, extras)

    def isclose(self, other: "TorsionClass", tol: float = 1e-12) -> bool:
        """Numerically compare the full classes monomial-by-monomial.

        The comparison folds every exact rational into float coefficients,
        so it is insensitive to how scalar/body factorizations are chosen.
        """
        if self.degree != other.degree:
            return False
        a, b = self.float_coeffs(), other.float_coeffs()
        scale = max(self.magnitude(), other.magnitude(), 1.0)
        for mono in set(a) | set(b):
            if abs(a.get(mono, 0.0) - b.get(mono, 0.0)) > tol * scale:
                return False
        return True


def _single(degree, m, zeta, rational, trans, body, provenance) -> TorsionClass:
    tag, value = trans
    return TorsionClass(degree, m, zeta, Fraction(rational), value, tag,
                        body, provenance)


# ---------------------------------------------------------------------------
# closed-form calculators
# ---------------------------------------------------------------------------

def torsion_circle_bundle(lambda_c1: RingClass, n: int, k: int,
                          z: RootOfUnity,
                          upper_triangular: bool = False) -> TorsionClass:
    """Torsion of the mod-n quotient of the circle bundle of a line bundle.

    tau_k = -(n^k / k!) L_{k+1}(z) c_1(lambda)^k, for z an n-th root of
    unity (z = 1 needs the upper-triangular hypothesis flag).
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if n < 1:
        raise DomainError("n must be >= 1")
    if not lambda_c1.is_zero() and lambda_c1.degree() != 2:
        raise DomainError("c_1(lambda) must be homogeneous of degree 2")
    if not z.is_nth_root(n):
        raise DomainError(f"{z} is not an {n}-th root of unity")
    _upper_triangular_gate(z, upper_triangular, "circle-bundle torsion")
    return _single(k, n, z, -Fraction(n ** k, math.factorial(k)), _L(k, z),
                   lambda_c1 ** k, "circle-bundle")


def torsion_lens_bundle(xi: BundleModel, m: int, k: int, z: RootOfUnity,
                        upper_triangular: bool = False) -> TorsionClass:
    """tau_k = -m^k L_{k+1}(z) ch_k(xi) for the mod-m lens bundle of xi."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if m < 1:
        raise DomainError("m must be >= 1")
    if xi.kind != COMPLEX:
        raise DomainError("lens-space torsion needs a complex bundle model")
    if not z.is_nth_root(m):
        raise DomainError(f"{z} is not an {m}-th root of unity")
    _upper_triangular_gate(z, upper_triangular, "lens-bundle torsion")
    return _single(k, m, z, -Fraction(m ** k), _L(k, z),
                   chern_character_component(xi, k), "lens-bundle")


def torsion_lens_via_splitting(xi: BundleModel, m: int, k: int,
                               z: RootOfUnity,
                               upper_triangular: bool = False) -> TorsionClass:
    """Independent route: sum of circle-bundle torsions over the roots.

    The fiberwise join splits the lens bundle chain complex into the
    circle-bundle complexes of the line summands, so the torsion is
    sum_i tau_k(S^1(lambda_i)/Z_m).  The result is renormalized to the
    (-m^k, ch_k) presentation of the direct formula.
    """
    parts = [torsion_circle_bundle(x, m, k, z, upper_triangular)
             for x in xi.roots]
    body = xi.spec.zero()
    for x in xi.roots:
        body = body + x ** k
    body = body.scale(Fraction(1, math.factorial(k)))  # = ch_k(xi), exactly
    out = _single(k, m, z, -Fraction(m ** k), _L(k, z), body, "lens-splitting")
    # interior consistency: the renormalization must match the raw sum
    raw = parts[0]
    for p in parts[1:]:
        raw = raw.add(p)
    assert out.isclose(raw, 1e-13)
    return out


def torsion_sphere_bundle(xi: BundleModel, n: int, k: int) -> TorsionClass:
    """tau_2k of the sphere bundle of an oriented real n-plane bundle.

    tau_2k = (-1)^(k+n-1) zeta(2k+1) * (1/2) ch_2k(xi (x) C); xi is given
    as the realification of a complex model (or a complex model, realified
    here).  Returns a degree-2k class (body degree 4k).
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if n < 1:
        raise DomainError("real rank n must be >= 1")
    model = xi.realify() if xi.kind == COMPLEX else xi
    body = half_ch_complexification(model, k)
    return _single(2 * k, 1, ONE, Fraction((-1) ** (k + n - 1)), _zeta(k),
                   body, "sphere-bundle")


def complex_torsion_closed(Tk: RingClass, k: int, m: int, zeta: RootOfUnity,
                           upper_triangular: bool = False) -> TorsionClass:
    """tau_k^C(E, zeta)_m = (1/2) m^k L_{k+1}(zeta) T_k(E) / k!.

    T_k is the generalized Miller-Morita-Mumford class, supplied as a
    formal homogeneous class of degree 2k.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if m < 1:
        raise DomainError("m must be >= 1")
    if not Tk.is_zero() and Tk.degree() != 2 * k:
        raise DomainError("T_k must be homogeneous of degree 2k")
    if not zeta.is_nth_root(m):
        raise DomainError(f"{zeta} is not an {m}-th root of unity")
    _upper_triangular_gate(zeta, upper_triangular, "complex torsion")
    return _single(k, m, zeta, Fraction(m ** k, 2 * math.factorial(k)),
                   _L(k, zeta), Tk, "complex-closed")


def real_even_closed(T2k: RingClass, k: int) -> TorsionClass:
    """tau_2k(E) = (1/2)(-1)^k zeta(2k+1) T_2k(E) / (2k)! for closed
    oriented even-dimensional fibers."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if not T2k.is_zero() and T2k.degree() != 4 * k:
        raise DomainError("T_2k must be homogeneous of degree 4k")
    return _single(2 * k, 1, ONE,
                   Fraction((-1) ** k, 2 * math.factorial(2 * k)), _zeta(k),
                   T2k, "real-even-closed")


def boundary_corrected_complex_torsion(interior: TorsionClass,
                                       boundary_torsion: TorsionClass,
                                       m: int) -> TorsionClass:
    """Interior complex torsion plus the boundary correction (1/2m) tau_k(dE)."""
    if m < 1:
        raise DomainError("m must be >= 1")
    if interior.degree != boundary_torsion.degree:
        raise DomainError("interior and boundary torsion degrees differ")
    correction = boundary_torsion.scale_rational(Fraction(1, 2 * m))
    return interior.add(correction, provenance="boundary-corrected")


# ---------------------------------------------------------------------------
# combinators
# ---------------------------------------------------------------------------

def product_torsion(t: TorsionClass, chi: int) -> TorsionClass:
    """tau_k(E x Y) = chi(Y) tau_k(E)."""
    return t.scale_rational(chi)


def stack_torsion(t1: TorsionClass, t2: TorsionClass) -> TorsionClass:
    """Stacking E2 on top of E1: torsions add."""
    return t1.add(t2, provenance="stack")


def glue_torsion(t1: TorsionClass, t2: TorsionClass,
                 t0: TorsionClass) -> TorsionClass:
    """Gluing along a common boundary: tau_1 + tau_2 - tau_0."""
    return t1.add(t2).add(t0.scale_rational(-1), provenance="glue")


def suspend_torsion(t: TorsionClass, m: int) -> TorsionClass:
    """Geometric suspension by an m-disk bundle: sign (-1)^m."""
    if m < 0:
        raise DomainError("suspension count must be >= 0")
    return t.scale_rational((-1) ** m)


def involution_torsion(t: TorsionClass, n: int) -> TorsionClass:
    """Replacing f by -f on fibers of dimension n: sign (-1)^(n-1)."""
    return t.scale_rational((-1) ** (n - 1))


def torsion_combinators(inputs: list, rule: str, *, chi: int = None,
                        m: int = None, n: int = None) -> TorsionClass:
    """Dispatch form of the combinators (product|glue|stack|suspend|involution)."""
    if rule == "product":
        (t,) = inputs
        if chi is None:
            raise DomainError("product rule needs chi")
        return product_torsion(t, chi)
    if rule == "glue":
        if len(inputs) != 3:
            raise DomainError("glue needs exactly three inputs (t1, t2, t0)")
        return glue_torsion(*inputs)
    if rule == "stack":
        if len(inputs) != 2:
            raise DomainError("stack needs exactly two inputs")
        return stack_torsion(*inputs)
    if rule == "suspend":
        (t,) = inputs
        if m is None:
            raise DomainError("suspend rule needs m")
        return suspend_torsion(t, m)
    if rule == "involution":
        (t,) = inputs
        if n is None:
            raise DomainError("involution rule needs n")
        return involution_torsion(t, n)
    raise DomainError(f"unknown combinator rule {rule!r}")


# ---------------------------------------------------------------------------
# Morse section push-down (framing correction)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MorseSection:
    """One sheet of the fiberwise critical set of a Morse function.

    The section carries its Morse index, the bundle over it (negative
    eigenspace bundle for the real framing correction, full vertical
    tangent bundle for the complex one) and a degree-preserving
    substitution sending the section-ring generators into the base ring.
    """

    index: int
    bundle: BundleModel
    substitution: dict
    section_spec: RingSpec

    def __post_init__(self):
        if self.index < 0:
            raise DomainError("Morse index must be >= 0")
        if self.bundle.spec != self.section_spec:
            raise ModelError("section bundle does not live in the section ring")


@dataclass(frozen=True)
class MorseSectionData:
    sections: tuple

    def __post_init__(self):
        object.__setattr__(self, "sections", tuple(self.sections))
        if not self.sections:
            raise ModelError("need at least one section")


def _pushdown_body(sections: MorseSectionData, base: RingSpec,
                   per_section_class) -> RingClass:
    """sum_i (-1)^{index_i} subst_i(class_i) in the base ring."""
    out = base.zero()
    for sec in sections.sections:
        cls = per_section_class(sec)
        img = substitute(cls, sec.substitution, base)
        out = out + img.scale((-1) ** sec.index)
    return out


def framing_correction(k: int, sections: MorseSectionData,
                       base: RingSpec) -> TorsionClass:
    """The framing-principle correction term.

    (-1)^k zeta(2k+1) * sum_i (-1)^{index_i} subst_i((1/2) ch_2k(gamma_i (x) C)),
    a degree-2k torsion class over the base.
    """
    if k < 1:
        raise DomainError("k must be >= 1")

    def half_ch(sec):
        gamma = sec.bundle
        model = gamma.realify() if gamma.kind == COMPLEX else gamma
        return half_ch_complexification(model, k)

    body = _pushdown_body(sections, base, half_ch)
    return _single(2 * k, 1, ONE, Fraction((-1) ** k), _zeta(k), body,
                   "framing-correction")


def complex_framing_pushdown(k: int, m: int, zeta: RootOfUnity,
                             sections: MorseSectionData, base: RingSpec,
                             upper_triangular: bool = False) -> TorsionClass:
    """Complex framing principle push-down.

    (1/2) m^k L_{k+1}(zeta) * sum_i (-1)^{index_i} subst_i(ch_k(T^v E | section_i)).
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if not zeta.is_nth_root(m):
        raise DomainError(f"{zeta} is not an {m}-th root of unity")
    _upper_triangular_gate(zeta, upper_triangular, "complex framing push-down")
    body = _pushdown_body(
        sections, base, lambda sec: chern_character_component(sec.bundle, k))
    return _single(k, m, zeta, Fraction(m ** k, 2), _L(k, zeta), body,
                   "complex-framing")


# ---------------------------------------------------------------------------
# verification reports
# ---------------------------------------------------------------------------

def verify_complex_transfer(Tk: RingClass, k: int, m: int, r: int,
                            z: RootOfUnity, tol: float = 1e-10,
                            upper_triangular: bool = False) -> dict:
    """Check tau_k^C(E, z)_m = sum_{zeta^r = z} tau_k^C(E, zeta)_{mr}."""
    if r < 2:
        raise DomainError("r must be >= 2")
    lhs = complex_torsion_closed(Tk, k, m, z, upper_triangular)
    rhs_parts = [complex_torsion_closed(Tk, k, m * r, zeta,
                                        upper_triangular=True)
                 for zeta in z.mth_roots(r)]
    lhs_scalar = lhs.scalar
    rhs_scalar = math.fsum(p.scalar for p in rhs_parts)
    diff = abs(lhs_scalar - rhs_scalar)
    bodies_equal = all(p.body == Tk for p in rhs_parts) and lhs.body == Tk
    return {
        "k": k, "m": m, "r": r, "z": {"m": z.m, "j": z.j},
        "lhs_scalar": lhs_scalar,
        "rhs_scalar": rhs_scalar,
        "diff": diff,
        "bodies_equal": bodies_equal,
        "tol": tol,
        "pass": bodies_equal and diff <= tol,
    }


def unoriented_relations(tau_plus: TorsionClass, tau_minus: TorsionClass,
                         T2k: RingClass, k: int, tol: float = 1e-12) -> dict:
    """Check tau_2k(E) + tau_2k(E; C^-) = (-1)^k zeta(2k+1) T_2k / (2k)!.

    Also reports the closed-form sphere-bundle value tau_2k(S(E)), which
    equals the same right-hand side.
    """
    if tau_plus.degree != 2 * k or tau_minus.degree != 2 * k:
        raise DomainError("torsion degrees must equal 2k")
    lhs = tau_plus.add(tau_minus)
    rhs = _single(2 * k, 1, ONE, Fraction((-1) ** k, math.factorial(2 * k)),
                  _zeta(k), T2k, "unoriented-rhs")
    ok = lhs.isclose(rhs, tol)
    return {
        "k": k,
        "lhs": {str(mn): v for mn, v in lhs.float_coeffs().items()},
        "rhs": {str(mn): v for mn, v in rhs.float_coeffs().items()},
        "sphere_bundle_value": {str(mn): v for mn, v in rhs.float_coeffs().items()},
        "tol": tol,
        "pass": ok,
    }
