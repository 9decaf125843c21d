"""Constructions of standard complexes and combining operations.

Builders return complexes with dense deterministic labels 0..n-1 fixed
by the construction itself (not by canonical relabeling): identical
calls produce identical complexes, which is what reproducible pipelines
need, while canonical forms stay available via ``Complex.canonical``.
"""

from __future__ import annotations

import itertools
from typing import Dict, Iterable, List, Optional, Tuple

from .complex_core import Complex, InvalidComplexError, Simplex, join
from .groups import FinitePresentation, Word


def _dense(cx: Complex) -> Complex:
    """Relabel by ascending original label to 0..n-1."""
    m = {v: i for i, v in enumerate(cx.vertices)}
    return cx.relabeled(m)


def standard_simplex(n: int) -> Complex:
    """The solid n-simplex on labels 0..n."""
    if n < 0:
        raise InvalidComplexError("dimension must be >= 0")
    return Complex([range(n + 1)])


def simplex_sphere(n: int) -> Complex:
    """Boundary of the (n+1)-simplex: the minimal n-sphere."""
    if n < 0:
        raise InvalidComplexError("dimension must be >= 0")
    return Complex(itertools.combinations(range(n + 2), n + 1))


ball = standard_simplex
sphere = simplex_sphere


def cone(cx: Complex, apex: Optional[int] = None) -> Complex:
    """Join with one fresh apex (defaults to max label + 1)."""
    if cx.is_empty:
        raise InvalidComplexError("cone needs a nonempty complex")
    if apex is None:
        apex = cx.vertices[-1] + 1
    elif apex in cx.vertices:
        raise InvalidComplexError(f"apex {apex} is already a vertex")
    return _dense(join(cx, Complex([[apex]])))


def suspension(cx: Complex) -> Complex:
    """Join with two fresh apexes."""
    if cx.is_empty:
        raise InvalidComplexError("suspension needs a nonempty complex")
    a = cx.vertices[-1] + 1
    return _dense(join(cx, Complex([[a], [a + 1]])))


# -- ordered products --------------------------------------------------


def _monotone_paths(p: int, q: int) -> List[Tuple[Tuple[int, int], ...]]:
    """Lattice paths through a (p+1) x (q+1) grid, as index pairs."""
    paths = []
    for advance_a in itertools.combinations(range(p + q), p):
        path = [(0, 0)]
        i = j = 0
        for step in range(p + q):
            if step in advance_a:
                i += 1
            else:
                j += 1
            path.append((i, j))
        paths.append(tuple(path))
    return paths


def ordered_product_with_chart(
    a: Complex, b: Complex
) -> Tuple[Complex, Dict[Tuple[int, int], int]]:
    """Staircase triangulation of the product of two complexes.

    Vertices are the pairs (u, v); faces are the chains in the
    componentwise order on pairs whose two projections are faces of the
    factors.  The maximal simplices are the monotone staircase paths
    through each facet pair's grid, C(p+q, p) of them per pair, and they
    glue consistently across shared faces because chains restrict to
    chains.  Returns the complex plus the pair-to-label chart.
    """
    if a.is_empty or b.is_empty:
        raise InvalidComplexError("product needs nonempty factors")
    va, vb = a.vertices, b.vertices
    chart = {
        (u, v): i * len(vb) + j
        for i, u in enumerate(va)
        for j, v in enumerate(vb)
    }
    facets = set()
    for fa in a.facets:
        ta = sorted(fa)
        for fb in b.facets:
            tb = sorted(fb)
            for path in _monotone_paths(len(ta) - 1, len(tb) - 1):
                facets.add(
                    frozenset(chart[(ta[i], tb[j])] for i, j in path)
                )
    return Complex._from_trusted(facets), chart


def ordered_product(a: Complex, b: Complex) -> Complex:
    return ordered_product_with_chart(a, b)[0]


def sphere_product(p: int, q: int) -> Complex:
    """Product of minimal spheres of the given dimensions."""
    return ordered_product(simplex_sphere(p), simplex_sphere(q))


# -- gluing ------------------------------------------------------------


def glue(a: Complex, b: Complex, identify: Dict[int, int]) -> Complex:
    """Union of a and b after identifying vertices of b with vertices
    of a (identify maps b-labels to a-labels, injectively).

    Unidentified b-vertices receive fresh labels.  Raises when the
    identification is not injective, maps to a missing vertex, or makes
    a facet of one side coincide with or sit inside a facet of the
    other (the overlap must stay a proper subcomplex of both).
    """
    va = set(a.vertices)
    for bv, av in identify.items():
        if bv not in set(b.vertices):
            raise InvalidComplexError(f"{bv} is not a vertex of the second complex")
        if av not in va:
            raise InvalidComplexError(f"{av} is not a vertex of the first complex")
    images = list(identify.values())
    if len(set(images)) != len(images):
        raise InvalidComplexError("identification is not injective")
    nxt = max(a.vertices[-1], b.vertices[-1]) + 1
    mapping: Dict[int, int] = dict(identify)
    for v in b.vertices:
        if v not in mapping:
            mapping[v] = nxt
            nxt += 1
    b2 = b.relabeled(mapping)
    fa, fb = set(a.facets), set(b2.facets)
    for f in fa & fb:
        raise InvalidComplexError(
            f"gluing would identify facet {sorted(f)} of both sides"
        )
    # containment across the seam is a subtler duplicate
    for f in fb:
        if any(f < g for g in fa):
            raise InvalidComplexError(
                f"facet {sorted(f)} would be swallowed by the other side"
            )
    for f in fa:
        if any(f < g for g in fb):
            raise InvalidComplexError(
                f"facet {sorted(f)} would be swallowed by the other side"
            )
    return _dense(Complex._from_trusted(fa | fb))


def connected_sum(a: Complex, b: Complex) -> Complex:
    """Connected sum of closed pseudomanifolds of equal dimension.

    One facet is removed from each side (the lexicographically smallest)
    and the boundary spheres are identified.  The identification maps
    ascending labels to ascending labels, with the first two images
    swapped when both sides are oriented and the plain map would align
    rather than oppose the seam orientations; for non-orientable input
    the plain map is used.  Distinct facets can never collide here: two
    facets on one vertex set would already have been one.
    """
    if a.dim != b.dim:
        raise InvalidComplexError("summands must have equal dimension")
    if not a.is_closed_pseudomanifold() or not b.is_closed_pseudomanifold():
        raise InvalidComplexError("connected sum needs closed pseudomanifolds")
    fa = min(a.facets, key=lambda f: tuple(sorted(f)))
    fb = min(b.facets, key=lambda f: tuple(sorted(f)))
    a2 = Complex._from_trusted(set(a.facets) - {fa})
    b2 = Complex._from_trusted(set(b.facets) - {fb})
    ta, tb = sorted(fa), sorted(fb)
    swap = False
    ori_a, ori_b = a.orientation(), b.orientation()
    if ori_a is not None and ori_b is not None:
        if ori_a[fa] * ori_b[fb] > 0:
            swap = True
    images = list(ta)
    if swap:
        images[0], images[1] = images[1], images[0]
    identify = dict(zip(tb, images))
    nxt = max(a.vertices[-1], b.vertices[-1]) + 1
    mapping = dict(identify)
    for v in b2.vertices:
        if v not in mapping:
            mapping[v] = nxt
            nxt += 1
    b3 = b2.relabeled(mapping)
    merged = set(a2.facets) | set(b3.facets)
    assert len(merged) == len(a2.facets) + len(b3.facets)
    return _dense(Complex._from_trusted(merged))


def reference_manifold(l: int, n: int) -> Complex:
    """Connected sum of l copies of the product of a 2-sphere and an
    (n-2)-sphere; l = 0 gives the minimal n-sphere."""
    if n < 3:
        raise InvalidComplexError("reference manifolds need dimension >= 3")
    if l < 0:
        raise InvalidComplexError("number of summands must be >= 0")
    if l == 0:
        return simplex_sphere(n)
    block = sphere_product(2, n - 2)
    out = block
    for _ in range(l - 1):
        out = connected_sum(out, block)
    return out


# -- presentation complexes --------------------------------------------


def presentation_complex(p: FinitePresentation) -> Complex:
    """A 2-complex with fundamental group presented by ``p``.

    One basepoint, a three-edge circle per generator, and one disk per
    relator: the disk is a polygon with a ring of fresh vertices between
    its boundary walk and a fresh center, so repeated letters never
    produce duplicate triangles.  Empty relators are skipped (they do
    not change the fundamental group).
    """
    facets: List[Iterable[int]] = []
    base = 0
    circle: Dict[int, Tuple[int, int]] = {}
    nxt = 1
    for g in range(1, p.num_generators + 1):
        c1, c2 = nxt, nxt + 1
        nxt += 2
        circle[g] = (c1, c2)
        facets.extend([[base, c1], [c1, c2], [c2, base]])
    if p.num_generators == 0:
        return Complex([[base]])
    for r in p.relators:
        if not r:
            continue
        walk = [base]
        for x in r:
            c1, c2 = circle[abs(x)]
            if x > 0:
                walk.extend([c1, c2, base])
            else:
                walk.extend([c2, c1, base])
        m = len(walk) - 1  # = 3 * len(r) steps
        ring = list(range(nxt, nxt + m))
        nxt += m
        center = nxt
        nxt += 1
        for j in range(m):
            wj, wj1 = walk[j], walk[j + 1]
            rj, rj1 = ring[j], ring[(j + 1) % m]
            facets.append([wj, wj1, rj])
            facets.append([wj1, rj, rj1])
            facets.append([center, rj, rj1])
    return _dense(Complex.generated_by(facets))
