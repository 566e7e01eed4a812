"""Simplicial transfer for finite coverings and graded-sheet push-down.

Coverings are specified combinatorially: a lift table sends every base
simplex to the ordered list of its preimage simplices in the total
complex.  The transfer of a cochain sums its values over the lifts; the
push-down over a graded family of sheet coverings is the alternating sum
of transfers, weighted by (-1)^index.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CoveringError, DomainError, ModelError
from .kamber_tondeur import (MatrixFamily, QuadratureSpec,
                             direct_sum_family, kt_cochain)
from .twisted import SimplicialBase


@dataclass(frozen=True)
class CoveringMap:
    """A finite covering described by its simplex-level lift table."""

    base: SimplicialBase
    total: SimplicialBase
    lifts: dict

    def __init__(self, base: SimplicialBase, total: SimplicialBase, lifts):
        table = {}
        for s, ls in lifts.items():
            table[tuple(s)] = tuple(tuple(l) for l in ls)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "total", total)
        object.__setattr__(self, "lifts", table)
        self._validate()

    def _validate(self):
        covered = set()
        for s in self.base.simplices:
            if s not in self.lifts:
                raise CoveringError(f"no lifts given for base simplex {s}")
        for s, ls in self.lifts.items():
            if s not in self.base.simplices:
                raise CoveringError(f"lift table references unknown simplex {s}")
            for l in ls:
                if l not in self.total.simplices:
                    raise CoveringError(f"lift {l} of {s} is not in the total complex")
                if len(l) != len(s):
                    raise CoveringError(f"lift {l} of {s} has wrong dimension")
                if l in covered:
                    raise CoveringError(f"total simplex {l} lifts two base simplices")
                covered.add(l)
        if covered != set(self.total.simplices):
            raise CoveringError("total complex has simplices that lift nothing")
        # vertex-level projection, induced by the lift table on vertices
        proj = {}
        for (vb,), lifts in ((s, self.lifts[s]) for s in self.base.of_dim(0)):
            for (vt,) in lifts:
                proj[vt] = vb
        object.__setattr__(self, "vertex_projection", proj)
        # lifts must project orderly onto the base simplex and commute with
        # faces; order compatibility is what makes the transfer a cochain
        # map (it mirrors lifting a singular simplex with its parametrization)
        for s, ls in self.lifts.items():
            for l in ls:
                images = [proj[v] for v in l]
                if images != list(s):
                    raise CoveringError(
                        f"lift {l} does not project order-compatibly onto {s}; "
                        f"relabel the total complex so projections are monotone")
                if len(s) > 1:
                    for i in range(len(l)):
                        face = l[:i] + l[i + 1:]
                        bface = s[:i] + s[i + 1:]
                        if face not in self.lifts[bface]:
                            raise CoveringError(
                                f"face {face} of lift {l} does not lift the "
                                f"matching face of {s}")
        # constant sheet count per connected base component
        counts = {len(ls) for ls in self.lifts.values()}
        if len(counts) > 1:
            comps = _connected_components(self.base)
            for comp in comps:
                comp_counts = {len(self.lifts[s]) for s in self.base.simplices
                               if set(s) <= comp}
                if len(comp_counts) > 1:
                    raise CoveringError("sheet count varies within a component")

    def sheet_count(self, simplex) -> int:
        return len(self.lifts[tuple(simplex)])

    def project(self, total_simplex) -> tuple:
        proj = self.vertex_projection
        return tuple(sorted(proj[v] for v in total_simplex))

    def is_order_compatible(self, base_simplex, lift) -> bool:
        """Whether the projection preserves the sorted vertex order on the lift."""
        proj = self.vertex_projection
        return [proj[v] for v in lift] == list(base_simplex)


def _connected_components(cx: SimplicialBase) -> list:
    parent = {v: v for v in cx.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for s in cx.simplices:
        for a, b in itertools.combinations(s, 2):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    comps = {}
    for v in cx.vertices:
        comps.setdefault(find(v), set()).add(v)
    return list(comps.values())


def covering_from_cyclic_action(total: SimplicialBase, action: dict,
                                order: int) -> CoveringMap:
    """Build base = total/Z_m and the lift table from a free cyclic action.

    ``action`` is the vertex permutation generating the action; it must be
    simplicial, of the given order, and no simplex may be mapped to itself
    by a nontrivial power.  Quotient vertices are named by the smallest
    element of each orbit; the total-complex labels must be chosen so that
    the projection is monotone on every simplex (CoveringMap validation
    rejects it otherwise).
    """
    if order < 1:
        raise DomainError("order must be >= 1")

    def act(s, times=1):
        out = tuple(s)
        for _ in range(times % order):
            out = tuple(sorted(action[v] for v in out))
        return out

    for s in total.simplices:
        if act(s) not in total.simplices:
            raise CoveringError("action is not simplicial")
        for p in range(1, order):
            if act(s, p) == s:
                raise CoveringError(f"action is not free on simplex {s}")
    # orbit representatives name the base: rep = lexicographically smallest
    orbit_rep = {}
    for s in total.simplices:
        orbit = [act(s, p) for p in range(order)]
        orbit_rep[s] = min(orbit)
    rep_vertex = {}
    for v in total.vertices:
        rep_vertex[v] = orbit_rep[(v,)][0]
    base_simplices = set()
    for s in total.simplices:
        bs = tuple(sorted(set(rep_vertex[v] for v in s)))
        if len(bs) != len(s):
            raise CoveringError("vertex orbits collapse a simplex")
        base_simplices.add(bs)
    base = SimplicialBase(base_simplices)
    lifts = {bs: [] for bs in base_simplices}
    for s in sorted(total.simplices):
        bs = tuple(sorted(set(rep_vertex[v] for v in s)))
        lifts[bs].append(s)
    return CoveringMap(base, total, lifts)


# ---------------------------------------------------------------------------
# cochains and transfer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimplicialCochain:
    """A q-cochain: a value on every q-simplex of its complex."""

    complex: SimplicialBase
    dimension: int
    values: dict

    def __init__(self, complex: SimplicialBase, dimension: int, values):
        vals = {tuple(s): v for s, v in values.items()}
        for s in complex.of_dim(dimension):
            if s not in vals:
                raise ModelError(f"cochain missing a value on {s}")
        for s in vals:
            if len(s) != dimension + 1 or s not in complex.simplices:
                raise ModelError(f"cochain value on invalid simplex {s}")
        object.__setattr__(self, "complex", complex)
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "values", vals)

    def __call__(self, simplex):
        return self.values[tuple(simplex)]

    def coboundary(self) -> "SimplicialCochain":
        """delta c on (q+1)-simplices: alternating sum over faces."""
        q = self.dimension
        out = {}
        for s in self.complex.of_dim(q + 1):
            total = 0
            for i in range(q + 2):
                total += (-1) ** i * self.values[s[:i] + s[i + 1:]]
            out[s] = total
        return SimplicialCochain(self.complex, q + 1, out)


def transfer_cochain(cov: CoveringMap, c: SimplicialCochain) -> SimplicialCochain:
    """<tr(c), sigma> = sum over lifts of sigma of <c, lift>."""
    if c.complex.simplices != cov.total.simplices:
        raise CoveringError("cochain does not live on the total complex")
    out = {}
    for s in cov.base.of_dim(c.dimension):
        out[s] = sum(c(l) for l in cov.lifts[s])
    return SimplicialCochain(cov.base, c.dimension, out)


def pullback_cochain(cov: CoveringMap, c: SimplicialCochain) -> SimplicialCochain:
    """The pullback to the total complex: value on a lift = value downstairs."""
    if c.complex.simplices != cov.base.simplices:
        raise CoveringError("cochain does not live on the base complex")
    out = {}
    for s, ls in cov.lifts.items():
        if len(s) == c.dimension + 1:
            for l in ls:
                out[l] = c(s)
    return SimplicialCochain(cov.total, c.dimension, out)


@dataclass(frozen=True)
class GradedSheets:
    """Sheets of a fiberwise critical set: (Morse index, covering) pairs."""

    sheets: tuple

    def __init__(self, sheets):
        sheets = tuple((int(i), cov) for i, cov in sheets)
        indices = [i for i, _ in sheets]
        if len(set(indices)) != len(indices):
            raise ModelError("sheet indices must be distinct")
        if any(i < 0 for i in indices):
            raise ModelError("sheet indices must be nonnegative")
        base = sheets[0][1].base.simplices
        for _, cov in sheets:
            if cov.base.simplices != base:
                raise ModelError("all sheets must cover the same base")
        object.__setattr__(self, "sheets", sheets)

    def euler_characteristic(self, simplex=None) -> int:
        """chi = sum (-1)^i (sheet count of Sigma^i)."""
        s = tuple(simplex) if simplex is not None else None
        total = 0
        for i, cov in self.sheets:
            if s is None:
                counts = {len(ls) for ls in cov.lifts.values()}
                if len(counts) != 1:
                    raise ModelError("ambiguous sheet count; pass a simplex")
                total += (-1) ** i * counts.pop()
            else:
                total += (-1) ** i * cov.sheet_count(s)
        return total


def pushdown_alternating(sheets: GradedSheets, cochains: dict) -> SimplicialCochain:
    """p_* = sum_i (-1)^i tr applied to one cochain per sheet index."""
    result = None
    for i, cov in sheets.sheets:
        if i not in cochains:
            raise ModelError(f"no cochain supplied for sheet index {i}")
        tr = transfer_cochain(cov, cochains[i])
        scaled = {s: (-1) ** i * v for s, v in tr.values.items()}
        if result is None:
            result = scaled
        else:
            if set(result) != set(scaled):
                raise DomainError("cochain dimensions disagree across sheets")
            result = {s: result[s] + scaled[s] for s in result}
    if result is None:
        raise ModelError("no sheets given")
    first = sheets.sheets[0][1]
    dim = len(next(iter(result))) - 1
    return SimplicialCochain(first.base, dim, result)


def euler_multiplication_check(sheets: GradedSheets,
                               c: SimplicialCochain) -> dict:
    """Verify pushdown(pullbacks of c) = chi * c, exactly."""
    cochains = {i: pullback_cochain(cov, c) for i, cov in sheets.sheets}
    pushed = pushdown_alternating(sheets, cochains)
    worst = 0
    ok = True
    for s in c.complex.of_dim(c.dimension):
        chi = sheets.euler_characteristic(s)
        expected = chi * c(s)
        got = pushed(s)
        delta = abs(got - expected)
        worst = max(worst, delta)
        if delta != 0:
            ok = False
    return {
        "chi": sheets.euler_characteristic(
            c.complex.of_dim(c.dimension)[0]),
        "max_deviation": float(worst),
        "pass": ok,
    }


# ---------------------------------------------------------------------------
# transfer of matrix families: torsion commutes with transfer
# ---------------------------------------------------------------------------

def check_face_compatibility(cov: CoveringMap, families: dict,
                             samples: int = 3, tol: float = 1e-10) -> None:
    """Families on 2-simplices must restrict consistently to shared edges.

    Each family is parametrized by the sorted vertex order of its simplex;
    the restriction to an edge is compared at sample points against the
    restriction from the neighbouring triangle.
    """
    edge_values = {}
    pts = np.linspace(0.15, 0.85, samples)
    for s, fam in families.items():
        s = tuple(s)
        for i in range(3):
            edge = s[:i] + s[i + 1:]
            vals = []
            for x in pts:
                # edge barycentric (1 - x, x) placed at the triangle's
                # matching vertex slots; family coords drop slot 0
                bar = np.zeros(3)
                cols = [j for j in range(3) if j != i]
                bar[cols[0]], bar[cols[1]] = 1.0 - x, x
                vals.append(fam.f(bar[1:]))
            if edge in edge_values:
                prev = edge_values[edge]
                err = max(np.max(np.abs(a - b)) for a, b in zip(prev, vals))
                if err > tol:
                    raise ModelError(
                        f"families restrict inconsistently along edge {edge} "
                        f"(defect {err:.2e})")
            else:
                edge_values[edge] = vals


def transfer_expansion_kt(cov: CoveringMap, families: dict,
                          quad: QuadratureSpec = QuadratureSpec(order=8),
                          tol: float = 1e-8) -> dict:
    """Per-2-simplex check that the KT cochain of the summed family equals
    the sum over lifts of the KT cochains (torsion commutes with transfer).

    ``families`` maps every 2-simplex of the total complex to a k = 1
    MatrixFamily over that simplex.
    """
    if cov.base.dim != 2:
        raise DomainError("the KT transfer check is for 2-dimensional bases")
    fams = {tuple(s): f for s, f in families.items()}
    for s in cov.total.of_dim(2):
        if s not in fams:
            raise ModelError(f"no family assigned to total simplex {s}")
        if fams[s].k != 1:
            raise ModelError("transfer check needs k = 1 families")
    check_face_compatibility(cov, fams)
    records = []
    ok = True
    for s in cov.base.of_dim(2):
        lift_fams = [fams[l] for l in cov.lifts[s]]
        summed = lift_fams[0]
        for f in lift_fams[1:]:
            summed = direct_sum_family(summed, f)
        lhs = kt_cochain(summed, quad)
        rhs_parts = [kt_cochain(f, quad) for f in lift_fams]
        rhs = math.fsum(p.value for p in rhs_parts)
        diff = abs(lhs.value - rhs)
        passed = diff <= tol
        ok = ok and passed
        records.append({
            "simplex": list(s),
            "lhs": lhs.value,
            "rhs": rhs,
            "diff": diff,
            "tol": tol,
            "pass": passed,
        })
    return {"records": records, "pass": ok}
