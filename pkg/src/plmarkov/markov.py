"""From finite group presentations to closed manifolds.

A presentation with k generators and l relators is realized as a plan:
thicken a wedge of k circles to dimension n+1, attach one 2-handle per
relator, and attach k more along null-homotopic curves.  Only the
boundary of that plan is ever triangulated.  The boundary before the
2-handles is a connected sum of k circle-sphere products carrying a
marked core circle per generator; each relator word is positioned as
an embedded closed edge path in product position, and attaching the
handle becomes a simplicial surgery that swaps the curve's tube for a
pair of capping disk bundles.  Each surgery raises the Euler
characteristic by 2, so the finished manifold has characteristic 2+2l
and first homology the abelianization of the presentation, and it is
equivalent to the reference connected sum of l copies of S2 x S(n-2)
exactly when the presented group is trivial.  The reduction report
compares the two by invariants and optional certificate search.

The module also houses the recursion-theoretic machinery the
equivalence problem plugs into: a dovetailer that interleaves a
semi-algorithm across an enumerated stream, and enumerators for sphere
triangulations and subcomplexes up to isomorphism.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from . import verdict as vd
from .builders import (connected_sum, reference_manifold, simplex_sphere,
                       sphere_product)
from .complex_core import Complex
from .fabric import (commutator_corridor, double_lap_corridor, handle_chain,
                     plant_trivial_loop, skeleton_path, star_ball)
from .groups import (FinitePresentation, Word, abelianization, cyclic_reduce,
                     edge_path_presentation, format_presentation, free_reduce,
                     homology_style, semi_decide_trivial)
from .invariants import homology
from .stellar_moves import (search_equivalence, stellar_subdivide,
                            stellar_weld, subdivision_candidates,
                            weld_candidates)
from .surgery import do_surgery


@dataclass(frozen=True)
class HandlePlan:
    """Symbolic plan: k 1-handles, a 2-handle per relator word, and k
    extra 2-handles along trivial words.  The thickening itself stays
    symbolic; only its boundary is built."""
    dimension: int
    num_handles: int
    relator_words: Tuple[Word, ...]
    trivial_words: Tuple[Word, ...]


@dataclass(frozen=True)
class Marks:
    """Marked cells of a handle boundary: one core circle per summand,
    a basepoint, and tree arcs joining each core to the basepoint.
    The section data records each core's product collar, one fiber
    chart per ring column, which is what surgery routing consumes."""
    cores: Tuple[Tuple[int, ...], ...]
    basepoint: int
    arcs: Tuple[Tuple[int, ...], ...]
    sections: Tuple[Tuple[Dict[int, int], ...], ...]
    model: Complex


@dataclass(frozen=True)
class PositionedCurve:
    """Closed edge path in product position, ready for surgery.

    The path is embedded (no repeated vertices) and each block of it
    lies inside one marked summand's circle-times-star region; the
    block list records which generator each segment spells, with None
    for connecting runs.  Framing is always the untwisted product
    framing, which the ambient-boundary construction forces.  The
    ambient carried here may be a documented re-triangulation of the
    complex the curve was requested on.
    """
    word: Word
    path: Tuple[int, ...]
    blocks: Tuple[Tuple[Optional[int], Tuple[int, int]], ...]
    framing: str
    ambient: Complex
    sections: Tuple[Dict[int, int], ...]
    model: Complex
    center: int


class DepthError(ValueError):
    """Raised when a word needs more parallel core copies than the
    documented subdivision depth provides; reports the depth that
    would be required."""

    def __init__(self, word: Word, required_depth: int):
        self.word = word
        self.required_depth = required_depth
        super().__init__(
            "insufficient parallel copies for %r after the documented "
            "subdivision depth; required depth %d" % (word, required_depth))


def plan_from_presentation(p: FinitePresentation, n: int) -> HandlePlan:
    """Handle plan for a presentation: one 1-handle per generator, one
    2-handle per relator, and one extra trivial-curve 2-handle per
    generator so the boundary's group is presented by p."""
    if n < 4:
        raise ValueError("plans live in ambient dimension n >= 4")
    relators = tuple(free_reduce(w) for w in p.relators)
    extras = ((),) * p.num_generators
    return HandlePlan(n, p.num_generators, relators, extras)


def handlebody_boundary(k: int, n: int) -> Tuple[Complex, Marks]:
    """Boundary of k thickened circles: the k-fold connected sum of
    circle times (n-1)-sphere, with marked cores.

    The summands are glued along facets disjoint from every core, so
    the marks survive the sum with their product collars intact.
    """
    if k < 0 or n < 4:
        raise ValueError("need k >= 0 handles in dimension n >= 4")
    if k == 0:
        sp = simplex_sphere(n)
        ball = star_ball(simplex_sphere(n - 1), 0)
        return sp, Marks((), min(sp.vertices), (), (), ball)
    amb, cols, ball = handle_chain(k, n)
    cores = tuple(tuple(col[0] for col in gen) for gen in cols)
    basepoint = cores[0][0]
    arcs = tuple(skeleton_path(amb, basepoint, core[0]) for core in cores)
    sections = tuple(tuple(gen) for gen in cols)
    return amb, Marks(cores, basepoint, arcs, sections, ball)


def _check_edge_path(cx: Complex, path: Sequence[int]):
    if len(set(path)) != len(path):
        raise ValueError("curve path revisits a vertex")
    pairs = list(zip(path, list(path[1:]) + [path[0]]))
    for u, v in pairs:
        if not any(u in f and v in f for f in cx.facets):
            raise ValueError("curve path leaves the 1-skeleton")


def _commutator_rotation(w: Word) -> Optional[Word]:
    if len(w) != 4:
        return None
    for r in range(4):
        rot = w[r:] + w[:r]
        if (rot[2] == -rot[0] and rot[3] == -rot[1]
                and abs(rot[0]) != abs(rot[1])):
            return rot
    return None


def _pristine(m: Complex, k: int, n: int) -> bool:
    # the corridor re-triangulations are charted against the untouched
    # k-handle boundary; any prior surgery invalidates them
    ref, _ = handlebody_boundary(k, n)
    return set(m.facets) == set(ref.facets)


def realize_curve(marked: Tuple[Complex, Marks], w: Word) -> PositionedCurve:
    """Position a relator word as an embedded closed curve with a
    product tube.

    The empty word is planted as a small triangle bounding a disk in
    one facet's region, via a prefabricated sphere summand.  A single
    letter rides the marked core itself.  A doubled letter or a
    commutator of two generators is realized by re-triangulating the
    pristine handle boundary into a corridor whose junction columns
    let the curve revisit a summand; any other repeat pattern raises
    DepthError with the parallel-copy depth it would need.
    """
    m, marks = marked
    w = tuple(w)
    if w != free_reduce(w):
        raise ValueError("word must be freely reduced")
    k = len(marks.cores)
    for x in w:
        if not (1 <= abs(x) <= k):
            raise ValueError("letter %d outside the %d marked handles"
                             % (x, k))
    n = m.dim

    if len(w) == 0:
        avoid = frozenset(v for core in marks.cores for v in core)
        planted, secs, ball = plant_trivial_loop(m, n, avoid)
        path = tuple(s[0] for s in secs)
        _check_edge_path(planted, path)
        return PositionedCurve(w, path, ((None, (0, 3)),), "untwisted",
                               planted, tuple(secs), ball, 0)

    if len(w) == 1:
        g = abs(w[0])
        secs = list(marks.sections[g - 1])
        path = tuple(marks.cores[g - 1])
        if w[0] < 0:
            secs = list(reversed(secs))
            path = tuple(reversed(path))
        _check_edge_path(m, path)
        return PositionedCurve(w, path, ((w[0], (0, 3)),), "untwisted",
                               m, tuple(secs), marks.model, 0)

    if len(w) == 2 and w[0] == w[1]:
        if k != 1 or n != 4 or not _pristine(m, k, n):
            raise DepthError(w, 2)
        amb, secs, ball = double_lap_corridor()
        path = tuple(s[0] for s in secs)
        if w[0] < 0:
            secs = list(reversed(secs))
            path = tuple(reversed(path))
        _check_edge_path(amb, path)
        blocks = ((w[0], (0, 3)), (w[1], (3, 6)))
        return PositionedCurve(w, path, blocks, "untwisted",
                               amb, tuple(secs), ball, 0)

    rot = _commutator_rotation(w)
    if rot is not None:
        if k != 2 or n != 4 or not _pristine(m, k, n):
            raise DepthError(w, 2)
        amb, secs, ball = commutator_corridor()
        path = tuple(s[0] for s in secs)
        _check_edge_path(amb, path)
        blocks = ((rot[0], (0, 2)), (rot[1], (2, 3)), (rot[2], (3, 4)),
                  (rot[3], (4, 6)), (None, (6, len(path))))
        return PositionedCurve(w, path, blocks, "untwisted",
                               amb, tuple(secs), ball, 0)

    depth = max(sum(1 for x in w if abs(x) == g) for g in range(1, k + 1))
    raise DepthError(w, depth)


def surgery(m: Complex, c: PositionedCurve, budget: int = 200000) -> Complex:
    """Replace the curve's product tube with a capped disk pair.

    The tube is a block neighborhood curve x star; its boundary torus
    curve x link is kept and refilled with cone(curve) x link, which
    raises the Euler characteristic by 2 in even ambient dimension.
    The curve's ambient may be a re-triangulation of m; the two are
    sanity-checked by Euler characteristic before cutting.
    """
    amb = c.ambient
    if amb.euler_characteristic() != m.euler_characteristic():
        raise ValueError("curve ambient does not match the given complex")
    return do_surgery(amb, list(c.sections), c.model, c.center,
                      budget=budget)


def _cascade_ops(plan: HandlePlan) -> List[Tuple[str, object]]:
    """Order of surgeries realizing the plan's relators.

    Single-letter relators are performed first; each kills its
    generator, so the surviving words are rewritten through the
    quotient (letters of killed generators deleted, then freely and
    cyclically reduced).  Words that collapse to the empty word become
    trivial-curve surgeries.  At most one corridor word can remain,
    and only on a pristine boundary.
    """
    words: List[Word] = [cyclic_reduce(w) for w in plan.relator_words]
    live = list(range(len(words)))
    ops: List[Tuple[str, object]] = []
    cores_done = 0
    while True:
        pick = next((i for i in live if len(words[i]) == 1), None)
        if pick is None:
            break
        g = abs(words[pick][0])
        ops.append(("core", words[pick]))
        cores_done += 1
        live.remove(pick)
        for j in live:
            words[j] = cyclic_reduce(
                tuple(x for x in words[j] if abs(x) != g))
    leftovers = [words[i] for i in live if words[i]]
    for i in live:
        if not words[i]:
            ops.append(("trivial", ()))
    if leftovers:
        if cores_done or len(leftovers) > 1:
            raise DepthError(leftovers[0], 2)
        ops.insert(0, ("corridor", leftovers[0]))
    ops.extend(("trivial", w) for w in plan.trivial_words)
    return ops


def realize_boundary(p: FinitePresentation, n: int,
                     shortcut_trivial: bool = False) -> Complex:
    """Closed n-manifold realizing the presentation.

    Builds the marked handle boundary, then performs one surgery per
    relator and one per extra trivial curve.  Relator words are taken
    up to cyclic reduction (conjugation does not move the attached
    handle's effect).  With shortcut_trivial the trivial-curve
    surgeries are replaced by connected sums with sphere_product(2,
    n-2), which each literal trivial surgery is cross-validated
    against.
    """
    plan = plan_from_presentation(p, n)
    ops = _cascade_ops(plan)
    cur, marks = handlebody_boundary(plan.num_handles, n)
    for kind, w in ops:
        if kind == "trivial" and shortcut_trivial:
            cur = connected_sum(cur, sphere_product(2, n - 2))
            continue
        curve = realize_curve((cur, marks), w)
        cur = surgery(cur, curve)
    return cur


def _first_homology_mismatch(hm, ht) -> Optional[str]:
    jm, jt = hm.to_json(), ht.to_json()
    if jm == jt:
        return None
    top = max(len(jm), len(jt))
    for d in range(top):
        gm = jm[d] if d < len(jm) else None
        gt = jt[d] if d < len(jt) else None
        if gm != gt:
            return "H%d %s vs %s" % (d, gm, gt)
    return "homology profiles differ"


def reduction_report(p: FinitePresentation, n: int,
                     budgets: Optional[Dict[str, int]] = None,
                     workers: int = 1) -> dict:
    """Compare the realized manifold against the reference sum.

    Builds M = realize_boundary(p, n) and the reference manifold with
    the same relator count, computes both invariant profiles, runs the
    group-triviality semi-decision on the edge-path presentation of M,
    and only then issues a verdict: distinguished when an invariant
    separates the two, equivalent-certified when a stellar-move
    certificate is found within the search budget, consistent-unknown
    otherwise.  The worker count only schedules the invariant jobs;
    the report never depends on it.
    """
    b = {"pi1": 100000, "search": 0}
    b.update(budgets or {})
    m = realize_boundary(p, n)
    t = reference_manifold(len(p.relators), n)

    def pi1_entry():
        pres = edge_path_presentation(m)
        rank, torsion = homology_style(abelianization(pres))
        v = semi_decide_trivial(pres, budget=b["pi1"])
        return {"abelianization": {"rank": rank, "torsion": list(torsion)},
                "trivial": v.to_json()}

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        fut_m = pool.submit(homology, m)
        fut_t = pool.submit(homology, t)
        fut_p = pool.submit(pi1_entry)
        hm, ht, pi1 = fut_m.result(), fut_t.result(), fut_p.result()

    inv_m = {"euler_characteristic": m.euler_characteristic(),
             "f_vector": list(m.f_vector()), "homology": hm.to_json()}
    inv_t = {"euler_characteristic": t.euler_characteristic(),
             "f_vector": list(t.f_vector()), "homology": ht.to_json()}

    obstruction = None
    if inv_m["euler_characteristic"] != inv_t["euler_characteristic"]:
        obstruction = "euler characteristic %d vs %d" % (
            inv_m["euler_characteristic"], inv_t["euler_characteristic"])
    else:
        obstruction = _first_homology_mismatch(hm, ht)

    if obstruction is not None:
        equivalence = {"verdict": "distinguished", "obstruction": obstruction}
    elif b["search"] > 0:
        v = search_equivalence(m, t, b["search"])
        if v.status == "yes":
            equivalence = {"verdict": "equivalent-certified"}
        else:
            equivalence = {"verdict": "consistent-unknown"}
    else:
        equivalence = {"verdict": "consistent-unknown"}

    return {"presentation": format_presentation(p), "n": n,
            "invariants_M": inv_m, "invariants_T": inv_t,
            "pi1_verdict": pi1, "equivalence_verdict": equivalence,
            "budgets": {"pi1": b["pi1"], "search": b["search"]}}


def report_to_text(report: dict) -> str:
    """Canonical serialization; byte-identical for equal reports."""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


class Dovetailed:
    """Stream of the enumerated items the semi-algorithm accepts.

    Stage t runs step t-i of the semi-algorithm on item i for every
    i <= t, so an item halting at step s is discovered by stage i+s;
    each halting item is emitted exactly once, in discovery order
    (stage, then index).  Iteration never terminates on its own: a
    stream with finitely many halting items simply stops producing.
    """

    def __init__(self, enumerator: Callable[[int], object],
                 algorithm: Callable[[object, int], bool]):
        self._enum = enumerator
        self._algo = algorithm
        self._stage = 0
        self._found: List[Tuple[int, object, int]] = []
        self._halted = set()

    def _advance(self):
        t = self._stage
        for i in range(t + 1):
            if i in self._halted:
                continue
            item = self._enum(i)
            if self._algo(item, t - i):
                self._halted.add(i)
                self._found.append((i, item, t))
        self._stage += 1

    def up_to_stage(self, max_stage: int) -> List[Tuple[int, object, int]]:
        """All (index, item, stage) discoveries with stage <= max_stage."""
        while self._stage <= max_stage:
            self._advance()
        return [e for e in self._found if e[2] <= max_stage]

    def __call__(self, index: int) -> object:
        while len(self._found) <= index:
            self._advance()
        return self._found[index][1]

    def __iter__(self) -> Iterator[object]:
        k = 0
        while True:
            yield self(k)
            k += 1


def dovetail(enumerator: Callable[[int], object],
             algorithm: Callable[[object, int], bool]) -> Dovetailed:
    """Interleave the semi-algorithm across the enumerated stream."""
    return Dovetailed(enumerator, algorithm)


def _move_neighbors(cx: Complex, cap: int) -> Iterator[Complex]:
    for s in sorted(subdivision_candidates(cx), key=lambda f: sorted(f)):
        out = stellar_subdivide(cx, s)
        if len(out.facets) <= cap:
            yield out
    for v, s in weld_candidates(cx):
        out = stellar_weld(cx, v, s)
        if len(out.facets) <= cap:
            yield out


def enumerate_spheres(n: int, max_facets: int) -> Iterator[str]:
    """Signatures of n-sphere triangulations with at most max_facets
    facets, as the breadth-first stellar-move closure of the boundary
    of the (n+1)-simplex.

    Every emitted complex is a genuine sphere (moves preserve the
    homeomorphism type); completeness holds only in the limit of the
    cap, since a path between small spheres may pass above it.
    """
    if n < 1 or max_facets < n + 2:
        raise ValueError("cap must admit the minimal sphere")
    start = simplex_sphere(n)
    seen = {start.iso_signature()}
    yield start.iso_signature()
    frontier = [start]
    while frontier:
        fresh = []
        for cx in frontier:
            for out in _move_neighbors(cx, max_facets):
                sig = out.iso_signature()
                if sig not in seen:
                    seen.add(sig)
                    fresh.append((sig, out))
        fresh.sort(key=lambda p: p[0])
        for sig, _ in fresh:
            yield sig
        frontier = [cx for _, cx in fresh]


def enumerate_subcomplexes(k: Complex) -> Iterator[str]:
    """Signatures of all nonempty subcomplexes up to isomorphism.

    Walks every downward-closed subset of the face poset, so it is
    exponential in the number of faces and meant for small complexes.
    """
    faces = sorted(k.faces(), key=lambda f: (len(f), sorted(f)))
    nf = len(faces)
    index = {f: i for i, f in enumerate(faces)}
    below = []
    for f in faces:
        mask = 0
        for g in faces:
            if g < f:
                mask |= 1 << index[g]
        below.append(mask)
    seen = set()
    for mask in range(1, 1 << nf):
        ok = True
        for i in range(nf):
            if mask >> i & 1 and below[i] & ~mask:
                ok = False
                break
        if not ok:
            continue
        chosen = [faces[i] for i in range(nf) if mask >> i & 1]
        sub = Complex.generated_by(chosen)
        sig = sub.iso_signature()
        if sig not in seen:
            seen.add(sig)
            yield sig
