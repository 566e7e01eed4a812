"""Built-in seeded fixtures for the verification suites.

Everything here is deterministic given the seed, so the CLI reports are
byte-identical across runs.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np

from .charclass import BundleModel, RingSpec
from .kamber_tondeur import MatrixFamily, catalog_family
from .transfer import CoveringMap, covering_from_cyclic_action
from .twisted import (
    DeltaFamily,
    GradedPoset,
    SimplicialBase,
    TwistedCochain,
    UTEndomorphism,
    standard_simplex,
    triangulated_circle,
)

DEFAULT_SEED = 20080617


# ---------------------------------------------------------------------------
# characteristic-class fixtures
# ---------------------------------------------------------------------------

def random_bundle_model(rank: int, rng: random.Random,
                        truncation: int = 16, n_gens: int = 2) -> BundleModel:
    """A seeded rank-`rank` complex bundle with rational root classes."""
    spec = RingSpec(tuple((f"a{i}", 2) for i in range(n_gens)), truncation)
    gens = [spec.gen(f"a{i}") for i in range(n_gens)]
    roots = []
    for _ in range(rank):
        cls = spec.zero()
        for g in gens:
            cls = cls + g.scale(Fraction(rng.randint(-3, 3),
                                         rng.choice([1, 1, 2])))
        roots.append(cls)
    return BundleModel(tuple(roots))


# ---------------------------------------------------------------------------
# twisted-cochain fixtures
# ---------------------------------------------------------------------------

def _mat_ops(elems):
    n = len(elems)
    idx = {e: i for i, e in enumerate(elems)}

    def to_mat(entries):
        m = [[Fraction(0)] * n for _ in range(n)]
        for (r, c), v in entries.items():
            m[idx[r]][idx[c]] = Fraction(v)
        return m

    def to_entries(m):
        return {(elems[r], elems[c]): m[r][c]
                for r in range(n) for c in range(n) if m[r][c]}

    def mul(a, b):
        return [[sum(a[i][t] * b[t][j] for t in range(n)) for j in range(n)]
                for i in range(n)]

    def add(a, b, s=1):
        return [[a[i][j] + s * b[i][j] for j in range(n)] for i in range(n)]

    eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    return to_mat, to_entries, mul, add, eye


def gauge_delta_family(k: int, poset: GradedPoset, differential: dict,
                       unipotents: dict) -> DeltaFamily:
    """A valid family gauge-equivalent to the constant one.

    phi_0(v) = g(v) D g(v)^{-1} and phi_1(ab) = g(a) g(b)^{-1} - 1 with
    g(v) = 1 + (strictly upper triangular nilpotent); higher cochains
    vanish because the transports compose exactly.
    """
    elems = list(poset.elements)
    to_mat, to_entries, mul, add, eye = _mat_ops(elems)
    n = len(elems)

    def inv_unipotent(g):
        nil = add(g, eye, -1)
        out = eye
        term = eye
        sign = -1
        for _ in range(n):
            term = mul(term, nil)
            out = add(out, term, sign)
            sign = -sign
        return out

    D = to_mat(differential)
    gs = {v: add(eye, to_mat(unipotents.get(v, {}))) for v in range(k + 1)}
    ginv = {v: inv_unipotent(gs[v]) for v in gs}
    phi = {}
    for s in standard_simplex(k).simplices:
        p = len(s) - 1
        if p == 0:
            v = s[0]
            phi[s] = UTEndomorphism(
                poset, -1, to_entries(mul(mul(gs[v], D), ginv[v])))
        elif p == 1:
            a, b = s
            phi[s] = UTEndomorphism(
                poset, 0, to_entries(add(mul(gs[a], ginv[b]), eye, -1)))
        else:
            phi[s] = UTEndomorphism(poset, p - 1, {})
    return DeltaFamily(k, poset, phi)


def random_gauge_family(k: int, rng: random.Random,
                        n_pairs: int = 2) -> DeltaFamily:
    """Seeded valid Delta^k-family with nontrivial phi_0 and phi_1."""
    elems, degrees, relations = [], {}, set()
    for i in range(n_pairs):
        lo, hi = f"e{i}", f"f{i}"
        elems += [lo, hi]
        degrees[lo], degrees[hi] = i, i + 1
        relations.add((lo, hi))
    for i in range(n_pairs - 1):
        relations.add((f"e{i}", f"e{i + 1}"))
        relations.add((f"e{i}", f"f{i + 1}"))
    poset = GradedPoset(elems, degrees, relations)
    diff = {}
    for i in range(n_pairs):
        diff[(f"e{i}", f"f{i}")] = Fraction(rng.randint(1, 4))
        if i + 1 < n_pairs:
            # f_{i+1} also maps into e's when degrees line up
            if degrees[f"e{i}"] == degrees[f"f{i + 1}"] - 1 \
                    and (f"e{i}", f"f{i + 1}") in poset.relations:
                diff[(f"e{i}", f"f{i + 1}")] = Fraction(rng.randint(-3, 3))
    unis = {}
    for v in range(k + 1):
        entries = {}
        for a, b in poset.relations:
            if degrees[a] == degrees[b] and rng.random() < 0.7:
                entries[(a, b)] = Fraction(rng.randint(-2, 2))
        unis[v] = entries
    fam = gauge_delta_family(k, poset, diff, unis)
    return fam


def untwisted_cochain(base: SimplicialBase, poset: GradedPoset,
                      differential: dict) -> TwistedCochain:
    """Constant family over a base: phi_0 everywhere, higher cochains zero."""
    phi = {}
    for s in base.simplices:
        if len(s) == 1:
            phi[s] = UTEndomorphism(poset, -1, differential)
        else:
            phi[s] = UTEndomorphism(poset, len(s) - 2, {})
    return TwistedCochain(base, poset, phi)


def random_fiber_poset(rng: random.Random, max_rank: int = 3):
    """A random graded poset with a valid differential, for Kunneth tests."""
    n0 = rng.randint(1, max_rank)
    n1 = rng.randint(1, max_rank)
    n2 = rng.randint(0, max_rank - 1)
    elems, degrees, relations = [], {}, set()
    for d, count in enumerate((n0, n1, n2)):
        for i in range(count):
            e = f"g{d}_{i}"
            elems.append(e)
            degrees[e] = d
    for i in range(n0):
        for j in range(n1):
            relations.add((f"g0_{i}", f"g1_{j}"))
    for j in range(n1):
        for l in range(n2):
            relations.add((f"g1_{j}", f"g2_{l}"))
    poset = GradedPoset(elems, degrees, relations)
    # a random differential with d^2 = 0: d restricted to degree 1 is
    # arbitrary; degree-2 part maps into ker(d_1)
    d1 = {(f"g0_{i}", f"g1_{j}"): Fraction(rng.randint(-2, 2))
          for i in range(n0) for j in range(n1)}
    entries = {k: v for k, v in d1.items() if v}
    if n2:
        from . import linalg
        mat = [[d1.get((f"g0_{i}", f"g1_{j}"), Fraction(0))
                for j in range(n1)] for i in range(n0)]
        kernel = linalg.nullspace(mat)
        for l in range(n2):
            if kernel and rng.random() < 0.8:
                vec = kernel[rng.randrange(len(kernel))]
                scale = Fraction(rng.randint(-2, 2))
                for j in range(n1):
                    if vec[j] * scale:
                        entries[(f"g1_{j}", f"g2_{l}")] = vec[j] * scale
    return poset, entries


# ---------------------------------------------------------------------------
# covering fixtures
# ---------------------------------------------------------------------------

def trivial_cover(base: SimplicialBase, copies: int) -> CoveringMap:
    """Disjoint copies of the base, with copy-major vertex labels."""
    simps, lifts = [], {}
    for s in base.simplices:
        lifts[s] = []
        for c in range(copies):
            l = tuple((c, v) for v in s)
            simps.append(l)
            lifts[s].append(l)
    return CoveringMap(base, SimplicialBase(simps), lifts)


def circle_double_cover() -> CoveringMap:
    """Connected 2-fold cover of a 3-vertex circle, with monotone labels.

    Hexagon cycle a0-b0-c0-a1-b1-c1 with the deck action swapping the
    subscripts; vertex order a0 < a1 < b0 < b1 < c0 < c1 makes every
    projection monotone.
    """
    cycle = ["a0", "b0", "c0", "a1", "b1", "c1"]
    simps = [(v,) for v in cycle]
    for i in range(6):
        simps.append(tuple(sorted((cycle[i], cycle[(i + 1) % 6]))))
    total = SimplicialBase(simps)
    action = {"a0": "a1", "a1": "a0", "b0": "b1", "b1": "b0",
              "c0": "c1", "c1": "c0"}
    return covering_from_cyclic_action(total, action, 2)


def _prism_complex(circle_cover: CoveringMap):
    """Triangulated (circle x I) upstairs and downstairs, and the covering."""

    def prism(cx: SimplicialBase):
        simps = set()
        for (a, b) in cx.of_dim(1):
            va0, va1, vb0, vb1 = (a, 0), (a, 1), (b, 0), (b, 1)
            tris = [tuple(sorted((va0, va1, vb1))), tuple(sorted((va0, vb0, vb1)))]
            for t in tris:
                simps.add(t)
                for f in itertools.combinations(t, 2):
                    simps.add(f)
                for f in itertools.combinations(t, 1):
                    simps.add(f)
        return SimplicialBase(simps)

    total = prism(circle_cover.total)
    base = prism(circle_cover.base)
    proj = circle_cover.vertex_projection
    lifts = {}
    for s in base.simplices:
        lifts[s] = []
    for s in total.simplices:
        bs = tuple(sorted(((proj[v], r) for v, r in s)))
        lifts[bs].append(s)
    for s in lifts:
        lifts[s].sort()
    return CoveringMap(base, total, lifts)


def annulus_double_cover() -> CoveringMap:
    """Connected 2-fold covering of a triangulated annulus (circle x I)."""
    return _prism_complex(circle_double_cover())


def sphere_like_base() -> SimplicialBase:
    """The boundary of the 3-simplex: a triangulated 2-sphere."""
    verts = range(4)
    simps = [tuple(c) for r in (1, 2, 3) for c in itertools.combinations(verts, r)]
    return SimplicialBase(simps)


def kt_transfer_scenario(seed: int = DEFAULT_SEED, connected: bool = False):
    """The built-in 2-fold covering scenario for the KT transfer check.

    Returns (covering, families): a double cover of a triangulated
    2-sphere-like base (or of an annulus when connected=True) with a
    seeded vertex-interpolated exp family on every total 2-simplex, which
    restricts consistently along shared faces by construction.
    """
    from scipy.linalg import expm, expm_frechet

    cov = (annulus_double_cover() if connected
           else trivial_cover(sphere_like_base(), 2))
    rng = np.random.default_rng(seed)
    gens = {v: 0.4 * (rng.standard_normal((2, 2))
                      + 1j * rng.standard_normal((2, 2)))
            for v in cov.total.vertices}

    def family(simplex):
        G = [gens[v] for v in simplex]

        def arg(t):
            return (1.0 - t[0] - t[1]) * G[0] + t[0] * G[1] + t[1] * G[2]

        def ev(t):
            return expm(arg(t))

        def dv(t, j):
            return expm_frechet(arg(t), G[j + 1] - G[0], compute_expm=False)

        return MatrixFamily(2, 1, ev, dv, catalog_id="vertex-interpolated-exp")

    families = {s: family(s) for s in cov.total.of_dim(2)}
    return cov, families


# ---------------------------------------------------------------------------
# KT catalog shortcuts used by the suites
# ---------------------------------------------------------------------------

def kt_suite_families(seed: int = DEFAULT_SEED):
    """The named k=1 families exercised by the KT property suite."""
    return {
        "random-smooth-a": catalog_family("random-smooth",
                                          {"seed": seed % (2 ** 32), "n": 2}, 1),
        "random-smooth-b": catalog_family("random-smooth",
                                          {"seed": (seed + 1) % (2 ** 32), "n": 2}, 1),
        "rotation-ramp": catalog_family("planar-rotation-ramp",
                                        {"alpha": [1.3, 0.4], "s": [0.8, -0.6]}, 1),
        "diagonal": catalog_family("diagonal-exponential",
                                   {"a": [[0.5, 0.2], [-0.3, 0.1]],
                                    "b": [[0.1, 0.4], [0.2, -0.5]]}, 1),
        "scalar": catalog_family("scalar-exponential",
                                 {"p": [0.8, -0.3], "q": [0.4, 0.9]}, 1),
    }
