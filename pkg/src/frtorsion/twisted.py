"""Twisted cochains, twisted tensor products and their exact validation.

A family of chain complexes over a simplicial base is encoded by a graded
poset P (the common basis) and strictly upper-triangular endomorphism
cochains phi_p, one per p-simplex, subject to the twisted-cochain
equation.  Over the rationals everything is exact: validation residuals
are exactly zero, d^2 = 0 is checked exactly, and Betti numbers come from
exact rank computation.

Sign conventions: the boundary of the twisted tensor product is

    d(x (x) y) = sum_i (-1)^i d_i x (x) y
                 - sum_{p+q=n} (-1)^p front_p(x) (x) phi_q(back_q(x))(y)

which squares to zero given the defining equation; the suspension shifts
degrees without changing any matrix entry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .errors import DomainError, InvalidComplexError, ModelError, PreconditionError

RATIONAL = "rational"
COMPLEX_FIELD = "complex"


# ---------------------------------------------------------------------------
# graded posets and strictly upper triangular endomorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradedPoset:
    """Finite nonnegatively graded poset with a strict partial order.

    ``relations`` generates the order; the stored order is the transitive
    closure, validated to be irreflexive.
    """

    elements: tuple
    degrees: dict
    relations: frozenset

    def __init__(self, elements, degrees, relations=()):
        object.__setattr__(self, "elements", tuple(elements))
        object.__setattr__(self, "degrees", dict(degrees))
        if len(set(self.elements)) != len(self.elements):
            raise ModelError("poset element ids must be unique")
        for e in self.elements:
            if e not in self.degrees:
                raise ModelError(f"element {e!r} has no degree")
            if self.degrees[e] < 0:
                raise ModelError("degrees must be nonnegative")
        elems = set(self.elements)
        rel = set()
        for a, b in relations:
            if a not in elems or b not in elems:
                raise ModelError("relation references unknown element")
            rel.add((a, b))
        # transitive closure
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(tuple(rel), tuple(rel)):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
        for a, b in rel:
            if a == b:
                raise ModelError("order is not irreflexive after closure")
        object.__setattr__(self, "relations", frozenset(rel))

    def less(self, a, b) -> bool:
        return (a, b) in self.relations

    def degree(self, e) -> int:
        return self.degrees[e]

    def is_closed(self, subset) -> bool:
        """Closed = downward closed: contains everything below its elements."""
        sub = set(subset)
        return all(a in sub for a, b in self.relations if b in sub)

    def is_independent(self, subset) -> bool:
        """No order relations between the subset and its complement."""
        sub = set(subset)
        return not any((a in sub) != (b in sub) for a, b in self.relations)

    def restrict(self, subset) -> "GradedPoset":
        sub = set(subset)
        return GradedPoset(
            tuple(e for e in self.elements if e in sub),
            {e: d for e, d in self.degrees.items() if e in sub},
            {(a, b) for a, b in self.relations if a in sub and b in sub})

    def disjoint_union(self, other: "GradedPoset") -> "GradedPoset":
        if set(self.elements) & set(other.elements):
            raise ModelError("disjoint union requires disjoint element ids")
        return GradedPoset(self.elements + other.elements,
                           {**self.degrees, **other.degrees},
                           set(self.relations) | set(other.relations))


class UTEndomorphism:
    """Strictly upper triangular endomorphism of the free module on a poset.

    entries[(row, col)] is the coefficient of ``row`` in the image of
    ``col``; it may be nonzero only when row < col in the poset and
    deg(row) = deg(col) + homogeneity.
    """

    __slots__ = ("poset", "homogeneity", "entries", "field")

    def __init__(self, poset: GradedPoset, homogeneity: int, entries=None,
                 scalar_field: str = RATIONAL):
        self.poset = poset
        self.homogeneity = homogeneity
        self.field = scalar_field
        clean = {}
        for (r, c), v in (entries or {}).items():
            v = Fraction(v) if scalar_field == RATIONAL else complex(v)
            if not v:
                continue
            if not poset.less(r, c):
                raise ModelError(f"entry ({r!r},{c!r}) violates strict upper triangularity")
            if poset.degree(r) != poset.degree(c) + homogeneity:
                raise ModelError(
                    f"entry ({r!r},{c!r}) violates homogeneity {homogeneity}")
            clean[(r, c)] = v
        self.entries = clean

    def zero_like(self) -> "UTEndomorphism":
        return UTEndomorphism(self.poset, self.homogeneity, {}, self.field)

    def compose(self, other: "UTEndomorphism") -> dict:
        """Raw entry dict of self o other (self applied after other)."""
        by_col = {}
        for (r, c), v in self.entries.items():
            by_col.setdefault(c, []).append((r, v))
        out = {}
        for (r, c), v in other.entries.items():
            for (rr, vv) in by_col.get(r, ()):
                key = (rr, c)
                out[key] = out.get(key, 0) + vv * v
        return out

    def restrict_block(self, rows, cols) -> dict:
        rows, cols = set(rows), set(cols)
        return {(r, c): v for (r, c), v in self.entries.items()
                if r in rows and c in cols}

    def apply(self, col):
        """Image of a basis element as {row: value}."""
        return {r: v for (r, c), v in self.entries.items() if c == col}


def _raw_add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + sign * v
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# simplicial bases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimplicialBase:
    """Finite ordered simplicial complex, closed under faces.

    Simplices are tuples of vertices sorted in the vertex order; the
    vertex order is the sort order of the vertex ids.
    """

    vertices: tuple
    simplices: frozenset

    def __init__(self, simplices):
        simps = set()
        verts = set()
        for s in simplices:
            s = tuple(s)
            if len(set(s)) != len(s):
                raise ModelError(f"simplex {s} repeats a vertex")
            if tuple(sorted(s)) != s:
                raise ModelError(f"simplex {s} is not sorted in vertex order")
            simps.add(s)
            verts.update(s)
        for s in simps:
            for f in itertools.combinations(s, len(s) - 1):
                if len(f) >= 1 and f not in simps:
                    raise ModelError(f"face {f} of {s} missing: not closed under faces")
        object.__setattr__(self, "vertices", tuple(sorted(verts)))
        object.__setattr__(self, "simplices", frozenset(simps))

    def of_dim(self, n: int) -> list:
        return sorted(s for s in self.simplices if len(s) == n + 1)

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def boundary_matrix(self, n: int):
        """Exact simplicial boundary C_n -> C_{n-1} as a Fraction matrix."""
        if n <= 0:
            return []
        rows = self.of_dim(n - 1)
        cols = self.of_dim(n)
        idx = {s: i for i, s in enumerate(rows)}
        mat = linalg.zeros(len(rows), len(cols))
        for j, s in enumerate(cols):
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                mat[idx[face]][j] = Fraction((-1) ** i)
        return mat

    def betti_numbers(self) -> list:
        """Rational Betti numbers of the base complex itself."""
        dims = self.dim
        ranks = [linalg.rank(self.boundary_matrix(n)) for n in range(dims + 2)]
        out = []
        for n in range(dims + 1):
            cn = len(self.of_dim(n))
            out.append(cn - ranks[n] - ranks[n + 1])
        return out


def standard_simplex(k: int) -> SimplicialBase:
    verts = tuple(range(k + 1))
    simps = [tuple(c) for r in range(1, k + 2)
             for c in itertools.combinations(verts, r)]
    return SimplicialBase(simps)


def triangulated_circle(n: int = 3) -> SimplicialBase:
    """Cyclically triangulated circle on n >= 3 vertices."""
    if n < 3:
        raise ModelError("need at least 3 vertices")
    simps = [(i,) for i in range(n)]
    for i in range(n):
        simps.append(tuple(sorted((i, (i + 1) % n))))
    return SimplicialBase(simps)


# ---------------------------------------------------------------------------
# twisted cochains
# ---------------------------------------------------------------------------

class TwistedCochain:
    """A twisted cochain on a simplicial base, subordinate to a constant poset.

    ``phi`` maps every simplex of the base (every dimension, vertices
    included) to a UTEndomorphism of homogeneity dim - 1.
    """

    def __init__(self, base: SimplicialBase, poset: GradedPoset, phi: dict,
                 scalar_field: str = RATIONAL):
        self.base = base
        self.poset = poset
        self.field = scalar_field
        self.phi = {}
        for s in base.simplices:
            if s not in phi:
                raise ModelError(f"cochain missing on simplex {s}")
        for s, m in phi.items():
            s = tuple(s)
            if s not in base.simplices:
                raise ModelError(f"cochain given on unknown simplex {s}")
            if m.homogeneity != len(s) - 2:
                raise ModelError(
                    f"cochain on {s} must have homogeneity {len(s) - 2}")
            if m.field != scalar_field:
                raise ModelError("mixed scalar fields in one cochain")
            self.phi[s] = m

    def residual(self, s) -> dict:
        """Defining-equation residual on one simplex (raw entry dict)."""
        s = tuple(s)
        n = len(s) - 1
        lhs = {}
        for p in range(n + 1):
            front, back = s[:p + 1], s[p:]
            lhs = _raw_add(lhs, self.phi[front].compose(self.phi[back]),
                           (-1) ** p)
        rhs = {}
        if n >= 1:
            for i in range(n + 1):
                face = s[:i] + s[i + 1:]
                rhs = _raw_add(rhs, self.phi[face].entries, (-1) ** i)
        return _raw_add(lhs, rhs, -1)

    def max_violation(self) -> float:
        worst = 0.0
        for s in self.base.simplices:
            for v in self.residual(s).values():
                worst = max(worst, abs(v))
        return worst

    def is_valid(self, tol: float = 1e-10) -> bool:
        bound = 0 if self.field == RATIONAL else tol
        return self.max_violation() <= bound


class DeltaFamily(TwistedCochain):
    """A Delta^k-family of chain complexes: a twisted cochain on the full k-simplex."""

    def __init__(self, k: int, poset: GradedPoset, phi: dict,
                 scalar_field: str = RATIONAL):
        if k < 0:
            raise DomainError("k must be >= 0")
        self.k = k
        super().__init__(standard_simplex(k), poset, phi, scalar_field)


def validate_twisted(fam: TwistedCochain, tol: float = 1e-10) -> dict:
    """Evaluate the defining equation on every face tuple; report outcome."""
    per_simplex = {}
    worst = 0.0
    worst_simplex = None
    for s in sorted(fam.base.simplices, key=lambda t: (len(t), t)):
        res = fam.residual(s)
        mag = max((abs(v) for v in res.values()), default=0.0)
        per_simplex[",".join(map(str, s))] = float(mag)
        if mag > worst:
            worst, worst_simplex = mag, s
    bound = 0 if fam.field == RATIONAL else tol
    return {
        "max_violation": float(worst),
        "worst_simplex": list(worst_simplex) if worst_simplex else None,
        "per_simplex": per_simplex,
        "tol": float(bound),
        "pass": worst <= bound,
    }


def suspend(fam: TwistedCochain, m: int = 1) -> TwistedCochain:
    """Alternating suspension: degrees shift by m, matrices unchanged."""
    if m < 1:
        raise DomainError("suspension count must be >= 1")
    new_poset = GradedPoset(fam.poset.elements,
                            {e: d + m for e, d in fam.poset.degrees.items()},
                            fam.poset.relations)
    phi = {s: UTEndomorphism(new_poset, mat.homogeneity, mat.entries, mat.field)
           for s, mat in fam.phi.items()}
    if isinstance(fam, DeltaFamily):
        return DeltaFamily(fam.k, new_poset, phi, fam.field)
    return TwistedCochain(fam.base, new_poset, phi, fam.field)


def _restrict_cochain(fam: TwistedCochain, subset) -> TwistedCochain:
    sub_poset = fam.poset.restrict(subset)
    phi = {s: UTEndomorphism(sub_poset, mat.homogeneity,
                             mat.restrict_block(subset, subset), mat.field)
           for s, mat in fam.phi.items()}
    if isinstance(fam, DeltaFamily):
        return DeltaFamily(fam.k, sub_poset, phi, fam.field)
    return TwistedCochain(fam.base, sub_poset, phi, fam.field)


def split_sum(fam: TwistedCochain, Q) -> tuple:
    """(sub-family on Q, quotient family on P/Q) for a closed subset Q."""
    Q = set(Q)
    if not Q <= set(fam.poset.elements):
        raise DomainError("Q contains unknown elements")
    if not fam.poset.is_closed(Q):
        raise DomainError("Q is not a closed subset")
    rest = [e for e in fam.poset.elements if e not in Q]
    return _restrict_cochain(fam, Q), _restrict_cochain(fam, rest)


def direct_sum_families(a: TwistedCochain, b: TwistedCochain) -> TwistedCochain:
    """Block direct sum of two families over the same base."""
    if a.base.simplices != b.base.simplices:
        raise ModelError("direct sum needs families over the same base")
    if a.field != b.field:
        raise ModelError("direct sum needs a common scalar field")
    poset = a.poset.disjoint_union(b.poset)
    phi = {}
    for s in a.base.simplices:
        entries = dict(a.phi[s].entries)
        entries.update(b.phi[s].entries)
        phi[s] = UTEndomorphism(poset, a.phi[s].homogeneity, entries, a.field)
    if isinstance(a, DeltaFamily):
        return DeltaFamily(a.k, poset, phi, a.field)
    return TwistedCochain(a.base, poset, phi, a.field)


# ---------------------------------------------------------------------------
# twisted tensor product (total complex)
# ---------------------------------------------------------------------------

class TwistedTensorProduct:
    """Total complex C_*(B) (x)_phi (PR, phi_0) with its boundary matrices."""

    def __init__(self, cochain: TwistedCochain, check: bool = True,
                 tol: float = 1e-10):
        if check and not cochain.is_valid(tol):
            raise ModelError("cochain fails the twisted-cochain equation")
        self.cochain = cochain
        base, poset = cochain.base, cochain.poset
        self.basis = {}
        top = base.dim + max(poset.degrees.values(), default=0) + 1
        for n in range(top + 1):
            items = []
            for s in sorted(base.simplices):
                p = len(s) - 1
                for e in poset.elements:
                    if p + poset.degree(e) == n:
                        items.append((s, e))
            self.basis[n] = items
        self.boundaries = {n: self._boundary(n) for n in range(1, top + 1)}
        if check:
            self._check_d_squared(tol)

    def _boundary(self, n: int):
        rows = self.basis.get(n - 1, [])
        cols = self.basis.get(n, [])
        ridx = {b: i for i, b in enumerate(rows)}
        mat = [[Fraction(0)] * len(cols) for _ in range(len(rows))]
        phi = self.cochain.phi
        for j, (s, y) in enumerate(cols):
            dim = len(s) - 1
            # simplicial part: sum_i (-1)^i d_i s (x) y
            if dim >= 1:
                for i in range(dim + 1):
                    face = s[:i] + s[i + 1:]
                    mat[ridx[(face, y)]][j] += (-1) ** i
            # twisted part: - sum_{p+q=dim} (-1)^p front_p (x) phi_q(back_q)(y)
            for p in range(dim + 1):
                front, back = s[:p + 1], s[p:]
                for r, v in phi[back].apply(y).items():
                    mat[ridx[(front, r)]][j] -= (-1) ** p * v
        return mat

    def _check_d_squared(self, tol: float):
        for n in sorted(self.boundaries):
            if n - 1 not in self.boundaries:
                continue
            prod = linalg.mat_mul(self.boundaries[n - 1], self.boundaries[n])
            worst = max((abs(v) for row in prod for v in row), default=0)
            bound = 0 if self.cochain.field == RATIONAL else tol
            if worst > bound:
                raise InvalidComplexError(
                    f"d^2 != 0 in degree {n} (violation {worst})")

    def dims(self) -> dict:
        return {n: len(b) for n, b in self.basis.items() if b}

    def betti_numbers(self) -> list:
        """Rational Betti numbers via exact rank computation."""
        if self.cochain.field != RATIONAL:
            raise InvalidComplexError("exact Betti numbers need rational coefficients")
        top = max(self.basis)
        ranks = {}
        for n in range(1, top + 1):
            m = self.boundaries.get(n)
            ranks[n] = linalg.rank(m) if m and m[0:1] else 0
        out = []
        for n in range(top + 1):
            cn = len(self.basis.get(n, []))
            out.append(cn - ranks.get(n, 0) - ranks.get(n + 1, 0))
        while out and out[-1] == 0:
            out.pop()
        return out


def total_complex(cochain: TwistedCochain, tol: float = 1e-10) -> TwistedTensorProduct:
    return TwistedTensorProduct(cochain, check=True, tol=tol)


def homology_ranks(cx: TwistedTensorProduct) -> list:
    return cx.betti_numbers()


def kunneth_betti(base: SimplicialBase, poset: GradedPoset,
                  phi0: UTEndomorphism) -> list:
    """Independent oracle: Betti numbers of an untwisted product.

    Computes H(B) from the simplicial boundary and H(fiber) from phi_0
    alone, then convolves (Kunneth over Q).
    """
    bb = base.betti_numbers()
    # fiber complex ranks from phi_0 as a plain matrix per degree
    degs = sorted(set(poset.degrees.values()))
    top = max(degs, default=0)
    basis = {d: [e for e in poset.elements if poset.degree(e) == d]
             for d in range(top + 1)}
    ranks = {}
    for d in range(1, top + 1):
        rows, cols = basis[d - 1], basis[d]
        mat = [[Fraction(phi0.entries.get((r, c), 0)) for c in cols] for r in rows]
        ranks[d] = linalg.rank(mat) if rows and cols else 0
    fb = [len(basis[d]) - ranks.get(d, 0) - ranks.get(d + 1, 0)
          for d in range(top + 1)]
    out = [0] * (len(bb) + len(fb) - 1)
    for i, x in enumerate(bb):
        for j, y in enumerate(fb):
            out[i + j] += x * y
    while out and out[-1] == 0:
        out.pop()
    return out


# ---------------------------------------------------------------------------
# chain contraction and the local splitting move
# ---------------------------------------------------------------------------

def _complex_from(poset: GradedPoset, entries: dict):
    """Per-degree boundary matrices of (PR, d) for d given by raw entries."""
    top = max(poset.degrees.values(), default=0)
    basis = {d: [e for e in poset.elements if poset.degree(e) == d]
             for d in range(top + 1)}
    mats = {}
    for d in range(1, top + 1):
        rows, cols = basis[d - 1], basis[d]
        mats[d] = [[Fraction(entries.get((r, c), 0)) for c in cols]
                   for r in rows]
    return basis, mats


def is_acyclic(poset: GradedPoset, differential: UTEndomorphism) -> bool:
    basis, mats = _complex_from(poset, differential.entries)
    top = max(basis)
    ranks = {d: (linalg.rank(m) if m and m[0:1] else 0)
             for d, m in mats.items()}
    for d in range(top + 1):
        if len(basis[d]) - ranks.get(d, 0) - ranks.get(d + 1, 0) != 0:
            return False
    return True


def chain_contraction(poset: GradedPoset, differential: UTEndomorphism) -> dict:
    """Exact contraction delta (degree +1) of an acyclic complex: D delta + delta D = 1.

    Built degreewise: split C_d = ker D_d (+) W_d, invert D on W_{d+1} onto
    ker D_d = im D_{d+1}, and set delta to that inverse on kernels and to
    zero on the complement.  Returns raw entries {(row, col): Fraction}.
    """
    basis, mats = _complex_from(poset, differential.entries)
    top = max(basis)
    kernels, complements = {}, {}
    for d in range(top + 1):
        nd = len(basis[d])
        if d == 0 or not basis.get(d - 1):
            kernels[d] = [[Fraction(1) if t == i else Fraction(0)
                           for t in range(nd)] for i in range(nd)]
        else:
            kernels[d] = linalg.nullspace(mats[d])
        # greedily extend the kernel basis by standard unit vectors
        chosen = []
        for i in range(nd):
            cand = [Fraction(1) if t == i else Fraction(0) for t in range(nd)]
            if linalg.rank(kernels[d] + chosen + [cand]) > len(kernels[d]) + len(chosen):
                chosen.append(cand)
        complements[d] = chosen
    delta = {}
    for d in range(top):
        rows_d, cols_up = basis[d], basis[d + 1]
        if not rows_d or not cols_up:
            continue
        kern, comp = kernels[d], complements[d]
        basis_change = [list(col) for col in zip(*(kern + comp))]
        w_up = complements[d + 1]
        mat_up = mats[d + 1]
        for i, e in enumerate(rows_d):
            unit = [Fraction(1) if t == i else Fraction(0)
                    for t in range(len(rows_d))]
            alpha = linalg.solve(basis_change, unit)
            assert alpha is not None
            zpart = [sum((alpha[t] * kern[t][r] for t in range(len(kern))),
                         Fraction(0)) for r in range(len(rows_d))]
            if all(v == 0 for v in zpart):
                continue
            # solve D_{d+1}(W beta) = kernel part, W the chosen complement
            wcols = [[sum((w[c] * mat_up[r][c] for c in range(len(cols_up))),
                          Fraction(0)) for w in w_up] for r in range(len(rows_d))]
            beta = linalg.solve(wcols, zpart)
            if beta is None:
                raise PreconditionError("complex is not acyclic: contraction fails")
            img = [sum((beta[t] * w_up[t][c] for t in range(len(w_up))),
                       Fraction(0)) for c in range(len(cols_up))]
            for c, v in enumerate(img):
                if v:
                    delta[(cols_up[c], e)] = v
    _verify_contraction(basis, mats, delta)
    return delta


def _verify_contraction(basis, mats, delta):
    top = max(basis)
    for d in range(top + 1):
        elems = basis[d]
        nd = len(elems)
        if nd == 0:
            continue
        idx = {e: i for i, e in enumerate(elems)}
        total = linalg.zeros(nd, nd)
        if d + 1 <= top and basis[d + 1]:
            up_idx = {e: i for i, e in enumerate(basis[d + 1])}
            delta_mat = linalg.zeros(len(basis[d + 1]), nd)
            for (r, c), v in delta.items():
                if c in idx and r in up_idx:
                    delta_mat[up_idx[r]][idx[c]] = v
            total = linalg.mat_add(total, linalg.mat_mul(mats[d + 1], delta_mat))
        if d >= 1 and basis[d - 1]:
            dn_idx = {e: i for i, e in enumerate(basis[d - 1])}
            delta_mat = linalg.zeros(nd, len(basis[d - 1]))
            for (r, c), v in delta.items():
                if c in dn_idx and r in idx:
                    delta_mat[idx[r]][dn_idx[c]] = v
            total = linalg.mat_add(total, linalg.mat_mul(delta_mat, mats[d]))
        for i in range(nd):
            for j in range(nd):
                if total[i][j] != (Fraction(1) if i == j else Fraction(0)):
                    raise PreconditionError("contraction identity fails")


def kill_cross_term(fam: DeltaFamily, Q) -> DeltaFamily:
    """Block-diagonalize the top cochain of an extension, per the local
    splitting move.

    Hypotheses (machine-checked): Q closed, every element of Q below every
    element of P/Q, the sub- or quotient-complex acyclic at every vertex,
    and the cross term zero on all proper faces.  The output agrees with
    the input except that the Q x (P/Q) block of the top cochain is zero;
    the nullhomotopy produced from an explicit chain contraction of the
    acyclic side certifies that the move is a simplicial homotopy.
    """
    if fam.field != RATIONAL:
        raise PreconditionError("local splitting move needs rational coefficients")
    if not fam.is_valid():
        raise PreconditionError("input family fails the twisted-cochain equation")
    P = fam.poset
    Q = set(Q)
    S = [e for e in P.elements if e not in Q]
    if not P.is_closed(Q):
        raise PreconditionError("Q is not closed")
    for q in Q:
        for s in S:
            if not P.less(q, s):
                raise PreconditionError(
                    f"hypothesis fails: {q!r} is not below {s!r}")
    k = fam.k
    top = tuple(range(k + 1))
    for simp in fam.base.simplices:
        if simp == top:
            continue
        if fam.phi[simp].restrict_block(Q, S):
            raise PreconditionError(
                f"cross term is nonzero on proper face {simp}")
    subQ = _restrict_cochain(fam, Q)
    quotS = _restrict_cochain(fam, S)
    q_acyclic = is_acyclic(subQ.poset, subQ.phi[(0,)])
    s_acyclic = is_acyclic(quotS.poset, quotS.phi[(k,)])
    if not (q_acyclic or s_acyclic):
        raise PreconditionError("neither the sub nor the quotient complex is acyclic")
    f_block = fam.phi[top].restrict_block(Q, S)
    if f_block:
        # certificate: f = D_Q h - (-1)^k h D_S for an explicit h
        dq = subQ.phi[(0,)]
        ds = quotS.phi[(k,)]
        sign = (-1) ** k
        if q_acyclic:
            delta = chain_contraction(subQ.poset, dq)
            h = _compose_raw(delta, f_block)
        else:
            delta = chain_contraction(quotS.poset, ds)
            h = _compose_raw(f_block, delta)
            h = {kk: -sign * v for kk, v in h.items()}
        check = _raw_add(_compose_raw(dq.entries, h),
                         _compose_raw(h, ds.entries), -sign)
        if _raw_add(check, f_block, -1):
            raise PreconditionError("nullhomotopy certificate failed")
    new_top_entries = {kc: v for kc, v in fam.phi[top].entries.items()
                       if kc not in f_block}
    phi = dict(fam.phi)
    phi[top] = UTEndomorphism(P, fam.phi[top].homogeneity, new_top_entries,
                              fam.field)
    out = DeltaFamily(k, P, phi, fam.field)
    if not out.is_valid():
        raise PreconditionError("output family fails the twisted-cochain equation")
    return out


def _compose_raw(a: dict, b: dict) -> dict:
    by_col = {}
    for (r, c), v in a.items():
        by_col.setdefault(c, []).append((r, v))
    out = {}
    for (r, c), v in b.items():
        for rr, vv in by_col.get(r, ()):
            out[(rr, c)] = out.get((rr, c), 0) + vv * v
    return {k: v for k, v in out.items() if v}
