"""Stellar moves, move certificates, and the equivalence search.

The calculus has two local moves.  Subdividing at a face s replaces the
closed star of s by the cone from a fresh vertex over (boundary of s)
joined with link(s).  Welding is the exact inverse: a vertex z whose
link splits as (boundary of s) * L, for a simplex s that is not a face,
is removed and the facets s u t restored.  Two complexes are stellar
equivalent when some chain of these moves connects them; the chain plus
one final relabeling is a replayable certificate.

Replay convention: a subdivision line names only the face; the fresh
vertex is always (current max label) + 1.  All search code applies the
same convention, so recorded moves replay verbatim.

Bistellar flips are the derived accelerator used by the search: a face
A whose link is the boundary of a simplex B (with B not a face) can be
exchanged for B with link boundary-of-A.  For 0 < dim A < d this is a
subdivision at A followed by a weld at the fresh vertex with simplex B;
the facet and vertex cases are a single subdivision or weld.  The
search emits only stellar lines, never flip lines.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from . import verdict as vd
from .complex_core import Complex, InvalidComplexError, Simplex, isomorphism
from .invariants import homology

# -- elementary moves --------------------------------------------------


def stellar_subdivide(cx: Complex, s, fresh: Optional[int] = None) -> Complex:
    """Subdivide at the face s (dimension >= 1)."""
    s = frozenset(s)
    if len(s) < 2:
        raise InvalidComplexError("subdivision needs a face of dimension >= 1")
    cof = cx.facets_containing(s)
    if not cof:
        raise InvalidComplexError(f"{sorted(s)} is not a face")
    if fresh is None:
        fresh = cx.vertices[-1] + 1
    elif fresh in cx.vertices:
        raise InvalidComplexError(f"fresh vertex {fresh} already used")
    out = set(cx.facets)
    for f in cof:
        out.remove(f)
        for v in s:
            out.add((f - {v}) | {fresh})
    return Complex._from_trusted(out)


def weld_parts(cx: Complex, vertex: int, s) -> Optional[List[Simplex]]:
    """When welding (vertex, s) is legal, the facets of the factor L
    with link(vertex) = (boundary of s) * L; otherwise None.

    L trivial (link exactly the boundary of s) is reported as [empty
    frozenset].
    """
    s = frozenset(s)
    if len(s) < 2:
        return None
    if cx.has_face(s):
        return None
    cof = cx.facets_containing(frozenset([vertex]))
    if not cof:
        return None
    link_facets = {f - {vertex} for f in cof}
    rest: set = set()
    for f in link_facets:
        miss = s - f
        if len(miss) != 1:
            return None
        rest.add(f - s)
    expected = {(s - {w}) | t for w in s for t in rest}
    if expected != link_facets:
        return None
    return sorted(rest, key=lambda t: tuple(sorted(t)))


def stellar_weld(cx: Complex, vertex: int, s) -> Complex:
    """Remove ``vertex``, rebuilding the facets s u t; inverse of
    subdivision at s."""
    s = frozenset(s)
    rest = weld_parts(cx, vertex, s)
    if rest is None:
        raise InvalidComplexError(
            f"welding vertex {vertex} with simplex {sorted(s)} is not legal"
        )
    out = {f for f in cx.facets if vertex not in f}
    for t in rest:
        out.add(s | t)
    return Complex._from_trusted(out)


@dataclass(frozen=True)
class StellarMove:
    """One certificate line.  kind "S": subdivide at ``simplex`` (the
    ``vertex`` records which fresh label replay will create).  kind
    "W": weld removing ``vertex`` with replacement ``simplex``."""

    kind: str
    simplex: Tuple[int, ...]
    vertex: int

    def __post_init__(self):
        if self.kind not in ("S", "W"):
            raise ValueError(f"unknown move kind {self.kind!r}")


def apply_move(cx: Complex, move: StellarMove) -> Complex:
    if move.kind == "S":
        return stellar_subdivide(cx, move.simplex)
    return stellar_weld(cx, move.vertex, move.simplex)


def invert_move(move: StellarMove) -> StellarMove:
    if move.kind == "S":
        return StellarMove("W", move.simplex, move.vertex)
    return StellarMove("S", move.simplex, move.vertex)


# -- move enumeration --------------------------------------------------


def subdivision_candidates(cx: Complex) -> Iterator[Simplex]:
    for k in range(1, cx.dim + 1):
        for f in cx.faces(k):
            yield f


def weld_candidates(cx: Complex) -> Iterator[Tuple[int, Simplex]]:
    """All legal welds, deterministically ordered.

    Any legal s satisfies: s is not a face, every vertex of s lies in
    link(v), and s has exactly one vertex outside each link facet; so s
    is (subset of first link facet) + (one vertex outside it).
    """
    for v in cx.vertices:
        cof = cx.facets_containing(frozenset([v]))
        link_facets = sorted(
            ({f - {v} for f in cof}), key=lambda t: tuple(sorted(t))
        )
        if not link_facets or not link_facets[0]:
            continue
        f0 = link_facets[0]
        link_verts = sorted(set().union(*link_facets))
        outside = [w for w in link_verts if w not in f0]
        f0l = sorted(f0)
        for w in outside:
            for k in range(1, len(f0l) + 1):
                for a in itertools.combinations(f0l, k):
                    s = frozenset(a) | {w}
                    if weld_parts(cx, v, s) is not None:
                        yield (v, s)


def first_weld(cx: Complex) -> Optional[Tuple[int, Simplex]]:
    for cand in weld_candidates(cx):
        return cand
    return None


def flip_candidates(cx: Complex) -> Iterator[Tuple[Simplex, Simplex]]:
    """Faces A with link the boundary of a missing simplex B, as (A, B);
    requires a pure complex.  Ordered by (dim A, labels)."""
    d = cx.dim
    if d < 1:
        return
    for k in range(0, d + 1):
        for a in cx.faces(k):
            b = _flip_partner(cx, a)
            if b is not None:
                yield (a, b)


def _flip_partner(cx: Complex, a: Simplex) -> Optional[Simplex]:
    cof = cx.facets_containing(a)
    if not cof:
        return None
    d = cx.dim
    if len(a) == d + 1:
        # a is a facet; its flip is the cone subdivision, partner is a itself
        return a
    link_facets = {f - a for f in cof}
    verts = set().union(*link_facets)
    m = len(verts)
    if len(link_facets) != m or any(len(t) != m - 1 for t in link_facets):
        return None
    b = frozenset(verts)
    # link must be the full boundary of b
    if {b - {w} for w in b} != link_facets:
        return None
    if cx.has_face(b):
        return None
    return b


def apply_flip(cx: Complex, a: Simplex, b: Simplex) -> Tuple[Complex, List[StellarMove]]:
    """Exchange the face a for b across the sphere (boundary a)*(boundary
    b), emitted as one or two stellar moves."""
    d = cx.dim
    if len(a) == d + 1:
        fresh = cx.vertices[-1] + 1
        return stellar_subdivide(cx, a), [StellarMove("S", tuple(sorted(a)), fresh)]
    if len(a) == 1:
        v = next(iter(a))
        return stellar_weld(cx, v, b), [StellarMove("W", tuple(sorted(b)), v)]
    fresh = cx.vertices[-1] + 1
    mid = stellar_subdivide(cx, a)
    out = stellar_weld(mid, fresh, b)
    return out, [
        StellarMove("S", tuple(sorted(a)), fresh),
        StellarMove("W", tuple(sorted(b)), fresh),
    ]


# -- certificates ------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """A replayable equivalence witness: stellar moves followed by one
    relabeling (images of the final vertices in ascending order)."""

    moves: Tuple[StellarMove, ...]
    relabel: Tuple[int, ...] = ()

    def __len__(self):
        return len(self.moves)


def format_certificate(cert: Certificate) -> str:
    lines = []
    for m in cert.moves:
        if m.kind == "S":
            lines.append("S " + " ".join(str(v) for v in m.simplex))
        else:
            lines.append(
                "W " + str(m.vertex) + " " + " ".join(str(v) for v in m.simplex)
            )
    if cert.relabel:
        lines.append("P " + " ".join(str(v) for v in cert.relabel))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_certificate(text: str) -> Certificate:
    moves: List[StellarMove] = []
    relabel: Tuple[int, ...] = ()
    for ln, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        try:
            if parts[0] == "S":
                moves.append(StellarMove("S", tuple(int(x) for x in parts[1:]), -1))
            elif parts[0] == "W":
                moves.append(
                    StellarMove("W", tuple(int(x) for x in parts[2:]), int(parts[1]))
                )
            elif parts[0] == "P":
                relabel = tuple(int(x) for x in parts[1:])
            else:
                raise ValueError(f"unknown line tag {parts[0]!r}")
        except (ValueError, IndexError) as e:
            raise ValueError(f"certificate line {ln}: {e}") from None
    return Certificate(tuple(moves), relabel)


def apply_certificate(cx: Complex, cert: Certificate) -> Complex:
    """Replay the moves (fresh labels always max+1), then relabel."""
    state = cx
    for m in cert.moves:
        if m.kind == "S":
            state = stellar_subdivide(state, m.simplex)
        else:
            state = stellar_weld(state, m.vertex, m.simplex)
    if cert.relabel:
        verts = state.vertices
        if len(cert.relabel) != len(verts):
            raise InvalidComplexError("relabel line has wrong length")
        state = state.relabeled(dict(zip(verts, cert.relabel)))
    return state


# -- greedy reduction --------------------------------------------------


def _reducing_flip(cx: Complex) -> Optional[Tuple[Simplex, Simplex]]:
    """First flip that strictly lowers the facet count: dim A below
    half the dimension (welds are the dim-0 case, found separately)."""
    d = cx.dim
    for k in range(1, d):
        if 2 * k >= d:
            break
        for a in cx.faces(k):
            b = _flip_partner(cx, a)
            if b is not None:
                return (a, b)
    return None


def simplify_complex(
    cx: Complex, budget: vd.Budget, moves_out: Optional[List[StellarMove]] = None
) -> Complex:
    """Monotone descent: apply facet-count-reducing welds and flips in a
    fixed order until none remain or the budget runs out."""
    state = cx
    while not budget.exhausted:
        cand = first_weld(state)
        if cand is not None:
            v, s = cand
            state = stellar_weld(state, v, s)
            if moves_out is not None:
                moves_out.append(StellarMove("W", tuple(sorted(s)), v))
            budget.spend()
            continue
        flip = _reducing_flip(state)
        if flip is not None:
            state, recs = apply_flip(state, *flip)
            if moves_out is not None:
                moves_out.extend(recs)
            budget.spend()
            continue
        break
    return state


def _sideways_flips(cx: Complex) -> Iterator[Tuple[Simplex, Simplex]]:
    # flips preserving the facet count: 2 * dim A = d (even d only)
    d = cx.dim
    if d % 2 or d == 0:
        return
    k = d // 2
    for a in cx.faces(k):
        b = _flip_partner(cx, a)
        if b is not None:
            yield (a, b)


def _escape_plateau(
    state: Complex, budget: vd.Budget, moves_out: List[StellarMove], depth: int = 3
) -> Optional[Complex]:
    """Bounded search through facet-count-preserving flips for a state
    where the descent can continue; returns that smaller state (with
    the connecting moves appended) or None."""
    start_sig = state.iso_signature()
    seen = {start_sig}
    frontier: List[Tuple[Complex, List[StellarMove]]] = [(state, [])]
    for _ in range(depth):
        nxt: List[Tuple[Complex, List[StellarMove]]] = []
        for cur, path in frontier:
            for a, b in _sideways_flips(cur):
                if not budget.spend():
                    return None
                cand, recs = apply_flip(cur, a, b)
                sig = cand.iso_signature()
                if sig in seen:
                    continue
                seen.add(sig)
                if first_weld(cand) is not None or _reducing_flip(cand) is not None:
                    moves_out.extend(path + recs)
                    return cand
                nxt.append((cand, path + recs))
        frontier = nxt
        if not frontier:
            break
    return None


def reduce_with_trace(
    cx: Complex, budget: vd.Budget
) -> Tuple[Complex, List[StellarMove]]:
    """Descend as far as the budget allows, escaping plateaus through
    sideways flips; returns the reduced state and the move trace."""
    moves: List[StellarMove] = []
    state = simplify_complex(cx, budget, moves)
    while not budget.exhausted:
        jumped = _escape_plateau(state, budget, moves)
        if jumped is None:
            break
        state = simplify_complex(jumped, budget, moves)
    return state, moves


# -- the equivalence search --------------------------------------------


def _invariant_obstruction(a: Complex, b: Complex) -> Optional[Tuple[str, dict]]:
    if a.dim != b.dim:
        return ("dimension-mismatch", {"left": a.dim, "right": b.dim})
    if a.euler_characteristic() != b.euler_characteristic():
        return (
            "euler-mismatch",
            {
                "left": a.euler_characteristic(),
                "right": b.euler_characteristic(),
            },
        )
    ha, hb = homology(a), homology(b)
    if ha != hb:
        return ("homology-mismatch", {"left": ha.to_json(), "right": hb.to_json()})
    try:
        oa, ob = a.is_orientable(), b.is_orientable()
    except InvalidComplexError:
        oa = ob = None
    if oa is not None and oa != ob:
        return ("orientability-mismatch", {"left": oa, "right": ob})
    return None


class _InverseReplayer:
    """Replays the inverse of a recorded move list onto another lineage.

    ``phi`` maps replay-side labels to recorded-side labels and is kept
    a bijection move by move; fresh labels on the replay side follow
    the max+1 convention so the emitted lines replay verbatim.
    """

    def __init__(self, start: Complex, phi: Dict[int, int]):
        self.state = start
        self.phi = dict(phi)
        self.lines: List[StellarMove] = []

    def _inv(self) -> Dict[int, int]:
        return {w: r for r, w in self.phi.items()}

    def undo(self, move: StellarMove):
        inv = self._inv()
        s_replay = frozenset(inv[x] for x in move.simplex)
        if move.kind == "S":
            # the move created move.vertex; welding it away undoes it
            v_replay = inv[move.vertex]
            self.state = stellar_weld(self.state, v_replay, s_replay)
            del self.phi[v_replay]
            self.lines.append(StellarMove("W", tuple(sorted(s_replay)), v_replay))
        else:
            fresh = self.state.vertices[-1] + 1
            self.state = stellar_subdivide(self.state, s_replay)
            self.phi[fresh] = move.vertex
            self.lines.append(StellarMove("S", tuple(sorted(s_replay)), fresh))


def _stitch_certificate(
    a_moves: List[StellarMove],
    a_end: Complex,
    b_moves: List[StellarMove],
    b_start: Complex,
    psi: Dict[int, int],
) -> Certificate:
    """Assemble A -> ... -> a_end, then the inverse of b_moves mapped
    through psi (a_end labels -> B-lineage labels), ending exactly at
    b_start; the final relabel line carries the leftover bijection."""
    rep = _InverseReplayer(a_end, dict(psi))
    for m in reversed(b_moves):
        rep.undo(m)
    final_map = rep.phi
    relabel = tuple(final_map[v] for v in rep.state.vertices)
    check = rep.state.relabeled(dict(zip(rep.state.vertices, relabel)))
    assert check == b_start, "certificate stitching lost the target"
    return Certificate(tuple(a_moves) + tuple(rep.lines), relabel)


def _neighbors_for_meet(cx: Complex, cap: int) -> Iterator[Tuple[Complex, List[StellarMove]]]:
    for v, s in weld_candidates(cx):
        yield stellar_weld(cx, v, s), [StellarMove("W", tuple(sorted(s)), v)]
    for a, b in flip_candidates(cx):
        if len(a) == 1:
            continue  # vertex flips are welds, already yielded
        delta = 2 * len(a) - 2 - cx.dim
        if len(cx.facets) + delta > cap:
            continue
        out, recs = apply_flip(cx, a, b)
        yield out, recs


def search_equivalence(a: Complex, b: Complex, budget: int) -> vd.Verdict:
    """Are two complexes connected by stellar moves?

    yes      witness: a Certificate replaying from the first input to
             the second, exactly
    no       an invariant preserved by the moves differs
    unknown  search space exhausted the budget

    The search first reduces both sides by monotone descent, compares
    the reduced forms, then runs a bounded two-sided search between
    them.  Deterministic throughout; the budget counts generated states.
    """
    obstruction = _invariant_obstruction(a, b)
    if obstruction is not None:
        reason, detail = obstruction
        return vd.no(reason, detail=detail)
    before = isomorphism(a, b)
    if before is not None:
        relabel = tuple(before[v] for v in a.vertices)
        return vd.yes(witness=Certificate((), relabel))
    total = vd.Budget(budget)
    half = vd.Budget(total.remaining // 2)
    a_red, a_moves = reduce_with_trace(a, half)
    b_budget = vd.Budget(total.remaining // 2)
    b_red, b_moves = reduce_with_trace(b, b_budget)
    total.spend(half.used + b_budget.used)
    psi = isomorphism(a_red, b_red)
    if psi is not None:
        return vd.yes(
            witness=_stitch_certificate(a_moves, a_red, b_moves, b, psi)
        )
    # two-sided bounded search between the reduced forms
    cap = max(len(a_red.facets), len(b_red.facets)) + a.dim + 1
    seen_a: Dict[str, Tuple[Complex, List[StellarMove]]] = {
        a_red.iso_signature(): (a_red, [])
    }
    seen_b: Dict[str, Tuple[Complex, List[StellarMove]]] = {
        b_red.iso_signature(): (b_red, [])
    }
    front_a = [(a_red, [])]
    front_b = [(b_red, [])]
    while (front_a or front_b) and not total.exhausted:
        if not front_a:
            expand_a = False
        elif not front_b:
            expand_a = True
        else:
            expand_a = len(front_a) <= len(front_b)
        frontier = front_a if expand_a else front_b
        ours, theirs = (seen_a, seen_b) if expand_a else (seen_b, seen_a)
        new_frontier: List[Tuple[Complex, List[StellarMove]]] = []
        for cur, path in frontier:
            for nxt, recs in _neighbors_for_meet(cur, cap):
                if not total.spend():
                    return vd.unknown(detail={"states": total.used})
                sig = nxt.iso_signature()
                if sig in ours:
                    continue
                ours[sig] = (nxt, path + recs)
                new_frontier.append((nxt, path + recs))
                if sig in theirs:
                    a_meet = (ours if expand_a else theirs)[sig]
                    b_meet = (theirs if expand_a else ours)[sig]
                    meet_psi = isomorphism(a_meet[0], b_meet[0])
                    assert meet_psi is not None
                    return vd.yes(
                        witness=_stitch_certificate(
                            a_moves + a_meet[1],
                            a_meet[0],
                            b_moves + b_meet[1],
                            b,
                            meet_psi,
                        )
                    )
        if expand_a:
            front_a = new_frontier
        else:
            front_b = new_frontier
    if total.exhausted:
        return vd.unknown(detail={"states": total.used})
    return vd.unknown("search-exhausted", detail={"states": total.used})
