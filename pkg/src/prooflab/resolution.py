"""Clause data model, Horn resolution, width-k resolution, and a 2-SAT oracle.

Literals are DIMACS-style signed integers (variable ids are >= 1, negation
is sign flip); a clause is a frozenset of literals, a formula a set of
clauses plus a variable count.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import FrozenSet, Iterable, NamedTuple

from .errors import UsageError

Clause = FrozenSet[int]


def clause(*lits: int) -> Clause:
    return frozenset(lits)


def clause_width(c: Clause) -> int:
    return len(c)


def is_tautology(c: Clause) -> bool:
    return any(-lit in c for lit in c)


@dataclass
class CnfFormula:
    num_vars: int
    clauses: frozenset

    def __init__(self, num_vars: int, clauses: Iterable[Iterable[int]]):
        self.num_vars = num_vars
        self.clauses = frozenset(frozenset(c) for c in clauses)
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > num_vars:
                    raise UsageError(f"literal {lit} out of range for {num_vars} variables")

    def width(self) -> int:
        return max((len(c) for c in self.clauses), default=0)


class HornResult(NamedTuple):
    refuted: bool
    derived_units: frozenset  # variable ids derivable as positive units


class KresResult(NamedTuple):
    refuted: bool
    derived: frozenset  # clauses of width <= k derivable


def horn_refute(f: CnfFormula) -> HornResult:
    """Horn-resolution refutation by unit propagation to the least fixed point.

    derived_units is the set D of variables x whose unit clause {x} is
    derivable; the formula is refuted iff some all-negative clause has all
    its variables in D (the empty clause counts).
    """
    clauses = sorted(f.clauses, key=lambda c: sorted(c))
    pos_of = []
    for c in clauses:
        pos = [lit for lit in c if lit > 0]
        if len(pos) > 1:
            raise UsageError(f"non-Horn clause {sorted(c)}: more than one positive literal")
        pos_of.append(pos[0] if pos else None)

    neg_index: dict[int, list[int]] = {}
    counts = []
    for i, c in enumerate(clauses):
        negs = {-lit for lit in c if lit < 0}
        counts.append(len(negs))
        for v in negs:
            neg_index.setdefault(v, []).append(i)

    derived: set[int] = set()
    queue = deque(i for i, n in enumerate(counts) if n == 0)
    while queue:
        i = queue.popleft()
        p = pos_of[i]
        if p is None or p in derived:
            continue
        derived.add(p)
        for j in neg_index.get(p, ()):
            counts[j] -= 1
            if counts[j] == 0:
                queue.append(j)

    refuted = any(pos_of[i] is None and counts[i] == 0 for i in range(len(clauses)))
    return HornResult(refuted, frozenset(derived))


def kres_saturate(f: CnfFormula, k: int, premise_wide: bool = False,
                  stop_on_refutation: bool = False) -> KresResult:
    """Width-k resolution: saturate the clauses of width <= k under resolution.

    derived is the least set containing the input clauses of width <= k and
    closed under resolving two members whenever the resolvent has width <= k.
    Tautological resolvents are dropped.  Input clauses wider than k are
    excluded entirely; with premise_wide they may serve as premises (their
    resolvents still must fit within k) but never join the derived set.
    With stop_on_refutation the loop returns as soon as the empty clause
    appears; the derived set is then a witness prefix of the closure.
    """
    if k < 1:
        raise UsageError("width bound k must be >= 1")
    derived: set[Clause] = {c for c in f.clauses if len(c) <= k}
    wide = [c for c in f.clauses if len(c) > k] if premise_wide else []
    if stop_on_refutation and frozenset() in derived:
        return KresResult(True, frozenset(derived))

    index: dict[int, list[Clause]] = {}

    def register(c: Clause):
        for lit in c:
            index.setdefault(lit, []).append(c)

    # the closure is order-independent, so the queue order is only a
    # processing schedule; each unordered pair meets when its later member
    # is popped against the index
    initial = sorted(derived | set(wide), key=lambda c: sorted(c))
    for c in initial:
        register(c)
    queue = deque(initial)
    while queue:
        c = queue.popleft()
        for lit in c:
            partners = index.get(-lit)
            if not partners:
                continue
            c_rest = c - {lit}
            # fixed range: partners appended during the scan meet c when they
            # are popped from the queue themselves
            for i in range(len(partners)):
                d = partners[i]
                resolvent = c_rest | (d - {-lit})
                if len(resolvent) > k or resolvent in derived:
                    continue
                if any(-x in resolvent for x in resolvent):
                    continue
                derived.add(resolvent)
                if stop_on_refutation and not resolvent:
                    return KresResult(True, frozenset(derived))
                register(resolvent)
                queue.append(resolvent)

    return KresResult(frozenset() in derived, frozenset(derived))


def kres_refutes(f: CnfFormula, k: int, premise_wide: bool = False) -> bool:
    """Width-k resolution verdict via subsumption-pruned saturation.

    Same answer as kres_saturate(f, k).refuted: a subsuming clause can
    stand in for any clause in every width-bounded resolution step, so
    pruning preserves derivability of the empty clause while keeping the
    working set small.  Use this for verdicts on formulas whose exact
    width-k closure is too large to materialise.
    """
    if k < 1:
        raise UsageError("width bound k must be >= 1")
    start = [c for c in f.clauses if len(c) <= k]
    wide = [c for c in f.clauses if len(c) > k] if premise_wide else []

    from heapq import heappop, heappush
    from itertools import combinations as _comb

    alive: set[Clause] = set()
    index: dict[int, list[Clause]] = {}

    def subsumed(c: Clause) -> bool:
        for r in range(len(c) + 1):
            for sub in _comb(sorted(c), r):
                if frozenset(sub) in alive:
                    return True
        return False

    def add(c: Clause) -> bool:
        if subsumed(c):
            return False
        for d in [d for d in alive if c < d]:
            alive.discard(d)  # lazily dead in the index
        alive.add(c)
        for lit in c:
            index.setdefault(lit, []).append(c)
        return True

    # schedule small clauses first: units subsume aggressively, which keeps
    # the working set (and the partner lists) short
    heap: list = []
    counter = 0
    for c in sorted(start, key=lambda c: (len(c), sorted(c))):
        if add(c):
            heappush(heap, (len(c), counter, c))
            counter += 1
    for c in wide:
        for lit in c:
            index.setdefault(lit, []).append(c)
        heappush(heap, (len(c), counter, c))
        counter += 1
    if frozenset() in alive:
        return True

    while heap:
        _, _, c = heappop(heap)
        if c not in alive and len(c) <= k:
            continue
        for lit in c:
            partners = index.get(-lit)
            if not partners:
                continue
            c_rest = c - {lit}
            for i in range(len(partners)):
                d = partners[i]
                if d not in alive and len(d) <= k:
                    continue
                resolvent = c_rest | (d - {-lit})
                if len(resolvent) > k or any(-x in resolvent for x in resolvent):
                    continue
                if not resolvent:
                    return True
                if add(resolvent):
                    heappush(heap, (len(resolvent), counter, resolvent))
                    counter += 1
            if c not in alive and len(c) <= k:
                break  # c got back-subsumed by one of its own resolvents
    return frozenset() in alive


def two_sat_oracle(f: CnfFormula) -> bool:
    """Satisfiability of a 2-CNF via strong connectivity of the implication graph."""
    for c in f.clauses:
        if len(c) > 2:
            raise UsageError(f"clause {sorted(c)} has width > 2")
    if frozenset() in f.clauses:
        return False

    succ: dict[int, list[int]] = {}

    def edge(a: int, b: int):
        succ.setdefault(a, []).append(b)

    nodes = set()
    for c in f.clauses:
        lits = sorted(c)
        if len(lits) == 1:
            (a,) = lits
            edge(-a, a)
            nodes.update((a, -a))
        else:
            a, b = lits
            edge(-a, b)
            edge(-b, a)
            nodes.update((a, -a, b, -b))

    # iterative Tarjan SCC
    comp: dict[int, int] = {}
    low: dict[int, int] = {}
    order: dict[int, int] = {}
    stack: list[int] = []
    on_stack: set[int] = set()
    counter = 0
    ncomp = 0
    for root in sorted(nodes):
        if root in order:
            continue
        work = [(root, iter(succ.get(root, ())))]
        order[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in order:
                    order[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                    advanced = True
                    break
                elif w in on_stack:
                    low[v] = min(low[v], order[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == order[v]:
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1

    for v in range(1, f.num_vars + 1):
        if v in comp and -v in comp and comp[v] == comp[-v]:
            return False
    return True


def read_dimacs(text: str) -> CnfFormula:
    """Parse the standard `p cnf <vars> <clauses>` format."""
    num_vars = None
    clauses = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise UsageError(f"bad DIMACS header: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(current)
    if num_vars is None:
        num_vars = max((abs(l) for c in clauses for l in c), default=0)
    return CnfFormula(num_vars, clauses)


def write_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    for c in sorted(f.clauses, key=lambda c: sorted(c)):
        lines.append(" ".join(str(l) for l in sorted(c, key=abs)) + " 0")
    return "\n".join(lines) + "\n"
