"""Problem encoders: reachability CNF, isomorphism CNF/polynomials, and
CSP k-consistency (direct algorithm and its dual-Horn CNF).
"""

from __future__ import annotations

from itertools import combinations, product


from .algebra import Field, RATIONALS
from .errors import UsageError
from .logic import RelStructure
from .pc import Polynomial, PolySystem
from .resolution import CnfFormula
from .wl import ColoredGraph


def encode_nonreach(n: int, edges, s: int, t: int) -> CnfFormula:
    """Horn CNF that is unsatisfiable iff t is reachable from s.

    One implication clause per directed edge plus the units asserting s and
    refuting t; width <= 2 throughout.
    """
    if not (0 <= s < n and 0 <= t < n):
        raise UsageError("s and t must be vertices")
    var = lambda v: v + 1
    clauses = [[-var(u), var(w)] for (u, w) in sorted(set(map(tuple, edges)))]
    clauses.append([var(s)])
    clauses.append([-var(t)])
    return CnfFormula(n, clauses)


def _is_partial_iso(g_edges: frozenset, h_edges: frozenset,
                    v1: int, w1: int, v2: int, w2: int) -> bool:
    if v1 == v2 and w1 != w2:
        return False
    if w1 == w2 and v1 != v2:
        return False
    return ((v1, v2) in g_edges) == ((w1, w2) in h_edges)


def _sym_edges(edges) -> frozenset:
    out = set()
    for (u, v) in edges:
        out.add((u, v))
        out.add((v, u))
    return frozenset(out)


def encode_iso_cnf(n_g: int, g_edges, n_h: int, h_edges) -> CnfFormula:
    """The classic isomorphism CNF: totality and surjectivity clauses over
    X[v -> w], plus a binary conflict clause for every pair of assignments
    that is not a partial isomorphism.  Satisfiable iff the graphs are
    isomorphic."""
    ge, he = _sym_edges(g_edges), _sym_edges(h_edges)
    nv = max(n_g, n_h, 1)
    var = lambda v, w: v * nv + w + 1
    clauses = []
    for v in range(n_g):
        clauses.append([var(v, w) for w in range(n_h)])  # empty iff n_h = 0
    for w in range(n_h):
        clauses.append([var(v, w) for v in range(n_g)])
    for (v1, w1) in product(range(n_g), range(n_h)):
        for (v2, w2) in product(range(n_g), range(n_h)):
            if (v1, w1) >= (v2, w2):
                continue
            if not _is_partial_iso(ge, he, v1, w1, v2, w2):
                clauses.append([-var(v1, w1), -var(v2, w2)])
    return CnfFormula(max(n_g * nv, 1), clauses)


def encode_iso_poly(n_g: int, g_edges, n_h: int, h_edges,
                    field: Field = RATIONALS) -> PolySystem:
    """Isomorphism polynomial system: for every v the images sum to one,
    for every w the preimages sum to one, and a degree-2 product axiom kills
    every edge/non-edge conflict.  {0,1}-solvable iff the graphs are
    isomorphic."""
    ge, he = _sym_edges(g_edges), _sym_edges(h_edges)
    var = {}
    for v in range(n_g):
        for w in range(n_h):
            var[(v, w)] = len(var) + 1
    axioms = []
    for v in range(n_g):
        axioms.append(Polynomial(field, [((var[(v, w)],), 1) for w in range(n_h)] + [((), -1)]))
    for w in range(n_h):
        axioms.append(Polynomial(field, [((var[(v, w)],), 1) for v in range(n_g)] + [((), -1)]))
    for (v1, v2) in product(range(n_g), repeat=2):
        for (w1, w2) in product(range(n_h), repeat=2):
            if ((v1, v2) in ge) != ((w1, w2) in he):
                mono = tuple(sorted({var[(v1, w1)], var[(v2, w2)]}))
                axioms.append(Polynomial(field, [(mono, 1)]))
    return PolySystem(field, len(var), _dedup(axioms))


def _dedup(axioms: list) -> list:
    seen = set()
    out = []
    for p in axioms:
        key = frozenset(p.terms.items())
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def _classes(g: ColoredGraph) -> list:
    by_color: dict = {}
    for v, c in enumerate(g.colors):
        by_color.setdefault(c, []).append(v)
    return [by_color[c] for c in sorted(by_color)]


def encode_iso_poly_colored(g: ColoredGraph, h: ColoredGraph,
                            field: Field = RATIONALS,
                            allow_mismatch: bool = False) -> PolySystem:
    """Color-respecting isomorphism system: X[v -> w] exists only for v, w
    in matching color classes, cutting the variable count to the sum of
    class-size products.  A class-count mismatch is a usage error unless
    allow_mismatch is set, in which case the trivially unsatisfiable
    system {1} is returned."""
    gc, hc = _classes(g), _classes(h)
    if len(gc) != len(hc) or sorted(set(g.colors)) != sorted(set(h.colors)) \
            or any(len(a) != len(b) for a, b in zip(gc, hc)):
        if allow_mismatch:
            return PolySystem(field, 1, [Polynomial.constant(field, 1)])
        raise UsageError("color class counts do not match")
    rel_names = sorted(set(g.relations) | set(h.relations))
    var = {}
    for cls_g, cls_h in zip(gc, hc):
        for v in cls_g:
            for w in cls_h:
                var[(v, w)] = len(var) + 1
    axioms = []
    for cls_g, cls_h in zip(gc, hc):
        for v in cls_g:
            axioms.append(Polynomial(field, [((var[(v, w)],), 1) for w in cls_h] + [((), -1)]))
        for w in cls_h:
            axioms.append(Polynomial(field, [((var[(v, w)],), 1) for v in cls_g] + [((), -1)]))

    def conflict(v1, w1, v2, w2) -> bool:
        if v1 == v2 and w1 != w2:
            return True
        if w1 == w2 and v1 != v2:
            return True
        return any(((v1, v2) in g.relations.get(r, frozenset()))
                   != ((w1, w2) in h.relations.get(r, frozenset()))
                   for r in rel_names)

    pairs = sorted(var)
    for (v1, w1) in pairs:
        for (v2, w2) in pairs:
            if (v1, w1) >= (v2, w2):
                continue
            if conflict(v1, w1, v2, w2):
                mono = tuple(sorted({var[(v1, w1)], var[(v2, w2)]}))
                axioms.append(Polynomial(field, [(mono, 1)]))
    return PolySystem(field, len(var), _dedup(axioms))


# --- CSP k-consistency ------------------------------------------------------

def _partial_homs(a: RelStructure, t: RelStructure, k: int) -> list:
    """All partial homomorphisms with domain size <= k, as sorted item tuples."""
    if set(a.relations) != set(t.relations) or any(
            a.relations[r][0] != t.relations[r][0] for r in a.relations):
        raise UsageError("instance and template must share a vocabulary")
    out = [()]
    universe = range(a.universe_size)

    def consistent(pmap: dict) -> bool:
        dom = set(pmap)
        for r, (arity, tuples) in a.relations.items():
            t_tuples = t.relations[r][1]
            for tup in tuples:
                if all(e in dom for e in tup):
                    if tuple(pmap[e] for e in tup) not in t_tuples:
                        return False
        return True

    def extend(pmap: dict, frontier: int):
        for e in range(frontier, a.universe_size):
            for val in range(t.universe_size):
                q = dict(pmap)
                q[e] = val
                if consistent(q):
                    items = tuple(sorted(q.items()))
                    out.append(items)
                    if len(q) < k:
                        extend(q, e + 1)

    extend({}, 0)
    return sorted(set(out), key=lambda p: (len(p), p))


def _domains(universe: list, dom: tuple, k: int, all_subsets: bool):
    if all_subsets:
        rest = [e for e in universe if e not in dom]
        for extra in range(0, k - len(dom) + 1):
            for more in combinations(rest, extra):
                yield tuple(sorted(set(dom) | set(more)))
    else:
        yield dom
        if len(dom) < k:
            for e in universe:
                if e not in dom:
                    yield tuple(sorted(set(dom) | {e}))


def _survivors(a: RelStructure, t: RelStructure, k: int, all_subsets: bool) -> set:
    """The k-consistency fixed point as a set of partial homomorphisms.

    Iteratively removes maps that cannot be extended to every admissible
    superset domain, or that lost a restriction.  By default extension is
    checked for one-new-element domains only (same fixed point as ranging
    over all supersets of size <= k, available via all_subsets)."""
    homs = _partial_homs(a, t, k)
    universe = list(range(a.universe_size))
    by_domain: dict = {}
    for p in homs:
        by_domain.setdefault(tuple(sorted(x for (x, _) in p)), []).append(p)
    # static extension and restriction tables; the iteration below only
    # consults liveness
    ext_table = {}
    sub_table = {}
    for p in homs:
        pmap = dict(p)
        dom = tuple(sorted(pmap))
        ext_table[p] = [
            [q for q in by_domain.get(S, ()) if all(dict(q).get(e) == pmap[e] for e in pmap)]
            for S in _domains(universe, dom, k, all_subsets)]
        sub_table[p] = [tuple(sorted((x, y) for (x, y) in p if x != e)) for e in pmap]

    alive = set(homs)
    changed = True
    while changed:
        changed = False
        for p in list(alive):
            ok = all(any(q in alive for q in ext) for ext in ext_table[p]) \
                and all(sub in alive for sub in sub_table[p])
            if not ok:
                alive.discard(p)
                changed = True
    return alive


def k_consistency(a: RelStructure, t: RelStructure, k: int,
                  all_subsets: bool = False) -> bool:
    """k-consistency test: False certifies that no homomorphism a -> t
    exists; True is inconclusive in general."""
    if k < 1:
        raise UsageError("k must be >= 1")
    return bool(_survivors(a, t, k, all_subsets))


def encode_kconsistency_cnf(a: RelStructure, t: RelStructure, k: int,
                            all_subsets: bool = False) -> CnfFormula:
    """Dual-Horn CNF whose refutability matches the k-consistency verdict.

    Variables stand for partial homomorphisms; clauses demand an extension
    for every admissible superset domain and the survival of restrictions,
    with the positive unit asserting the empty map.
    """
    if k < 1:
        raise UsageError("k must be >= 1")
    homs = _partial_homs(a, t, k)
    var = {p: i + 1 for i, p in enumerate(homs)}
    universe = list(range(a.universe_size))
    by_domain: dict = {}
    for p in homs:
        by_domain.setdefault(tuple(sorted(x for (x, _) in p)), []).append(p)

    clauses = []
    for p in homs:
        pmap = dict(p)
        dom = tuple(sorted(pmap))
        for S in _domains(universe, dom, k, all_subsets):
            extensions = [var[q] for q in by_domain.get(S, ())
                          if all(dict(q).get(e) == pmap[e] for e in pmap)]
            if var[p] in extensions:
                continue  # S = dom(p): the clause would be the tautology X_p -> X_p
            clauses.append([-var[p]] + extensions)
        for e in pmap:
            sub = tuple(sorted((x, y) for (x, y) in p if x != e))
            clauses.append([-var[p], var[sub]])
    clauses.append([var[()]])
    return CnfFormula(len(homs), clauses)


def brute_force_homomorphism(a: RelStructure, t: RelStructure) -> bool:
    """Total homomorphism existence by exhausting all mappings."""
    if a.universe_size == 0:
        return True
    for m in product(range(t.universe_size), repeat=a.universe_size):
        if all(tuple(m[e] for e in tup) in t.relations[r][1]
               for r, (_, tups) in a.relations.items() for tup in tups):
            return True
    return False


def cycle_structure(n: int) -> RelStructure:
    """The undirected n-cycle as a structure with a symmetric edge relation."""
    pairs = set()
    for i in range(n):
        pairs.add((i, (i + 1) % n))
        pairs.add(((i + 1) % n, i))
    return RelStructure(n, {"E": (2, frozenset(pairs))})


def clique_structure(n: int) -> RelStructure:
    pairs = {(i, j) for i in range(n) for j in range(n) if i != j}
    return RelStructure(n, {"E": (2, frozenset(pairs))})
