"""Degree-k monomial-PC and full-PC saturation over exact rationals or F_p.

Polynomials are multilinear throughout: the booleanity axioms X^2 - X are
implicit, so a monomial is just a strictly increasing tuple of variable ids
and multiplication of monomials is set union.  The saturation engines
maintain an echelon basis of the derivable span, keyed by leading monomial
under graded lexicographic order.
"""

from __future__ import annotations

import bisect
import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, NamedTuple, Optional

from .algebra import Field, Matrix, RATIONALS, Vector, gauss_solve, compress_image
from .errors import DegreeOverflowError, UsageError

Monomial = tuple  # strictly increasing variable ids; () is the constant monomial

NEG_INF = float("-inf")


def mono_key(m: Monomial):
    """Graded lexicographic sort key; max(...) of these is the leading monomial."""
    return (len(m), m)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    """Multilinear product: the sorted union of the variable sets."""
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(set(a) | set(b)))


def mono_extend(m: Monomial, x: int) -> Monomial:
    """m with variable x inserted (x must not occur in m)."""
    i = bisect.bisect_left(m, x)
    return m[:i] + (x,) + m[i:]


class Polynomial:
    """Multilinear polynomial: sparse map from monomial to nonzero coefficient."""

    __slots__ = ("field", "terms")

    def __init__(self, field: Field, terms: Iterable = ()):
        self.field = field
        if isinstance(terms, dict):
            terms = terms.items()
        acc: dict = {}
        for mono, coef in terms:
            mono = tuple(sorted(set(mono)))
            if any(v < 1 for v in mono):
                raise UsageError(f"variable ids must be >= 1, got {mono}")
            coef = field.coerce(coef)
            s = field.add(acc.get(mono, field.zero()), coef)
            if s == 0:
                acc.pop(mono, None)
            else:
                acc[mono] = s
        self.terms = acc

    @classmethod
    def constant(cls, field: Field, c) -> "Polynomial":
        return cls(field, [((), c)])

    @classmethod
    def variable(cls, field: Field, x: int) -> "Polynomial":
        return cls(field, [((x,), 1)])

    @property
    def degree(self):
        return max((len(m) for m in self.terms), default=NEG_INF)

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> set:
        return {v for m in self.terms for v in m}

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, frozenset(self.terms.items())))

    def evaluate(self, assignment: dict):
        """Value at a point; assignment maps variable id to a field element."""
        f = self.field
        total = f.zero()
        for m, c in self.terms.items():
            v = c
            for x in m:
                v = f.mul(v, f.coerce(assignment[x]))
            total = f.add(total, v)
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m in sorted(self.terms, key=mono_key, reverse=True):
            c = self.field.format_scalar(self.terms[m])
            mono = "*".join(f"X{v}" for v in m) or "1"
            bits.append(f"{c}*{mono}")
        return " + ".join(bits)


def multlin(p, field: Optional[Field] = None) -> Polynomial:
    """Multilinearisation: collapse repeated variables, summing collisions.

    Accepts a Polynomial (returned unchanged; the type is multilinear by
    construction) or raw (coefficient, variable-id sequence) pairs in which
    ids may repeat, e.g. [(1, (1, 1, 2)), (1, (3,))] for X1^2*X2 + X3.
    """
    if isinstance(p, Polynomial):
        return p
    if field is None:
        raise UsageError("multlin of raw terms needs an explicit field")
    return Polynomial(field, [(tuple(ids), coef) for coef, ids in p])


@dataclass
class PolySystem:
    """Axiom system for the polynomial calculus; booleanity axioms implicit."""

    field: Field
    num_vars: int
    axioms: list
    booleanity: bool = True

    def __post_init__(self):
        for p in self.axioms:
            if not isinstance(p, Polynomial):
                raise UsageError("axioms must be Polynomial instances")
            if p.field != self.field:
                raise UsageError("axiom field does not match system field")
            bad = [v for v in p.variables() if v > self.num_vars]
            if bad:
                raise UsageError(f"axiom uses variables {bad} beyond num_vars={self.num_vars}")

    def max_degree(self):
        return max((p.degree for p in self.axioms), default=NEG_INF)


def _int_rows(terms: dict) -> dict:
    """Clear denominators and divide by the content; empty stays empty."""
    if not terms:
        return {}
    lcm = 1
    for c in terms.values():
        if isinstance(c, Fraction):
            d = c.denominator
            lcm = lcm * d // gcd(lcm, d)
    out = {m: int(c * lcm) if isinstance(c, Fraction) else c * lcm for m, c in terms.items()}
    g = 0
    for c in out.values():
        g = gcd(g, c)
    if g > 1:
        out = {m: c // g for m, c in out.items()}
    return out


class Basis:
    """Echelon basis of a space of multilinear polynomials.

    Vectors have pairwise distinct leading monomials under graded lex
    order.  Over Q the rows are kept as primitive integer vectors (content
    1, positive lead) so that reduction is pure integer arithmetic; over
    F_p they are monic residues.  The basis is forward-echelon only: tails
    are not back-reduced, which keeps rows as sparse as they were inserted.
    """

    def __init__(self, field: Field, k: int, num_vars: int = 0):
        self.field = field
        self.k = k
        self.num_vars = num_vars
        self.vectors: dict = {}   # lead monomial -> {monomial: int coefficient}
        self.lifted: set = set()  # span monomials whose variable lifts were emitted

    def copy(self) -> "Basis":
        c = Basis(self.field, self.k, self.num_vars)
        c.vectors = {lead: dict(v) for lead, v in self.vectors.items()}
        c.lifted = set(self.lifted)
        return c

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    @property
    def refuted(self) -> bool:
        # a nonzero constant is in the span iff the constant monomial leads
        # a row (it is the minimum of the order, so nothing reduces to it)
        return () in self.vectors

    def polynomials(self) -> list:
        out = []
        for lead in sorted(self.vectors, key=mono_key, reverse=True):
            v = self.vectors[lead]
            if self.field.is_rational:
                inv = Fraction(1, v[lead])
                out.append(Polynomial(self.field, {m: c * inv for m, c in v.items()}))
            else:
                inv = self.field.inv(v[lead])
                out.append(Polynomial(self.field, {m: self.field.mul(inv, c) for m, c in v.items()}))
        return out

    def _normalize(self, vec: dict) -> dict:
        if self.field.is_rational:
            return _int_rows(vec)
        p = self.field.p
        return {m: c % p for m, c in vec.items() if c % p}

    def _reduce(self, vec: dict) -> dict:
        """Eliminate leading monomials until none of vec's monomials leads a row."""
        vectors = self.vectors
        if self.field.is_rational:
            while vec:
                hits = [m for m in vec if m in vectors]
                if not hits:
                    break
                m = max(hits, key=mono_key)
                row = vectors[m]
                a, b = vec[m], row[m]
                g = gcd(a, b)
                alpha, beta = b // g, a // g
                if alpha != 1:
                    for t in vec:
                        vec[t] *= alpha
                for t, c in row.items():
                    s = vec.get(t, 0) - beta * c
                    if s:
                        vec[t] = s
                    else:
                        vec.pop(t, None)
            return _int_rows(vec)
        p = self.field.p
        while vec:
            hits = [m for m in vec if m in vectors]
            if not hits:
                break
            m = max(hits, key=mono_key)
            row = vectors[m]
            factor = vec[m] % p
            for t, c in row.items():
                s = (vec.get(t, 0) - factor * c) % p
                if s:
                    vec[t] = s
                else:
                    vec.pop(t, None)
        return vec

    def contains(self, vec) -> bool:
        if isinstance(vec, Polynomial):
            vec = vec.terms
        return not self._reduce(self._normalize(dict(vec)))

    def insert(self, vec) -> bool:
        """Reduce vec against the basis; absorb it if independent.

        Returns True iff the dimension grew.  Zero reductions are dropped.
        """
        if isinstance(vec, Polynomial):
            vec = vec.terms
        vec = self._reduce(self._normalize(dict(vec)))
        if not vec:
            return False
        lead = max(vec, key=mono_key)
        if self.field.is_rational:
            if vec[lead] < 0:
                vec = {m: -c for m, c in vec.items()}
        else:
            inv = self.field.inv(vec[lead])
            if inv != 1:
                p = self.field.p
                vec = {m: (c * inv) % p for m, c in vec.items()}
        self.vectors[lead] = vec
        return True

    def span_monomial(self, m: Monomial) -> bool:
        """Is the single monomial m in the span?"""
        if m not in self.vectors:
            return False  # its own lead would have to carry the reduction
        return not self._reduce({m: 1} if self.field.is_rational else {m: 1 % self.field.p})


class SaturationResult(NamedTuple):
    refuted: bool
    basis: Basis


def _check_system(system: PolySystem, k: int):
    if k < 1:
        raise UsageError("degree bound k must be >= 1")
    if not system.booleanity:
        raise UsageError("saturation engines assume implicit booleanity axioms")
    for p in system.axioms:
        if p.degree > k:
            raise DegreeOverflowError(
                f"axiom of degree {p.degree} exceeds the bound k={k}")


def _mul_var(field: Field, vec: dict, x: int) -> dict:
    out: dict = {}
    for m, c in vec.items():
        t = m if x in m else mono_extend(m, x)
        s = field.add(out.get(t, field.zero()), c)
        if s == 0:
            out.pop(t, None)
        else:
            out[t] = s
    return out


def _degree(vec: dict):
    return max((len(m) for m in vec), default=NEG_INF)


def _lift_axioms(basis: Basis, axioms: list, num_vars: int, k: int, stop_early: bool) -> bool:
    """Insert MultLin(m.p) for every axiom p and every lift monomial m that is
    reachable one variable at a time without exceeding degree k.  Returns
    True if a refutation appeared and stop_early was set."""
    f = basis.field
    for p in axioms:
        root = dict(p.terms)
        basis.insert(dict(root))
        if stop_early and basis.refuted:
            return True
        seen = {()}
        queue = deque([((), root)])
        while queue:
            m, lifted = queue.popleft()
            if _degree(lifted) == k:
                # a fresh variable would push every top-degree term past k
                candidates = sorted({v for t in lifted for v in t} - set(m))
            else:
                candidates = [x for x in range(1, num_vars + 1) if x not in m]
            for x in candidates:
                m2 = mono_extend(m, x)
                if m2 in seen:
                    continue
                seen.add(m2)
                q = _mul_var(f, lifted, x)
                if q and _degree(q) <= k:
                    basis.insert(dict(q))
                    if stop_early and basis.refuted:
                        return True
                    # a lift that collapsed to zero stays zero under further
                    # lifting, so only nonzero lifts are worth extending
                    queue.append((m2, q))
    return False


def _monpc_rounds(basis: Basis, stop_early: bool) -> bool:
    """Lift every in-span monomial of degree < k by every variable until the
    span is stable; returns True on early refutation exit."""
    k, num_vars = basis.k, basis.num_vars
    while True:
        fresh = sorted((m for m in basis.vectors
                        if len(m) < k and m not in basis.lifted and basis.span_monomial(m)),
                       key=mono_key)
        if not fresh:
            return stop_early and basis.refuted
        for m in fresh:
            basis.lifted.add(m)
            for x in range(1, num_vars + 1):
                if x in m:
                    continue  # MultLin(X.m) = m, already in the span
                if basis.insert({mono_extend(m, x): 1}) and stop_early and basis.refuted:
                    return True


def monpc_saturate(system: PolySystem, k: int, full_closure: bool = False) -> SaturationResult:
    """Saturate the degree-k monomial-PC span of the axiom system.

    Initialises with all degree-bounded axiom lifts, then repeatedly lifts
    every monomial of degree < k lying in the current span by every
    variable, until the span is stable.  Refuted iff the constant 1 lies in
    the span.  By default the loop stops as soon as a refutation appears
    (the span then closes to the whole space, so completing it carries no
    information); pass full_closure=True to saturate regardless.
    """
    _check_system(system, k)
    basis = Basis(system.field, k, system.num_vars)
    stop = not full_closure
    if _lift_axioms(basis, system.axioms, system.num_vars, k, stop):
        return SaturationResult(True, basis)
    _monpc_rounds(basis, stop)
    return SaturationResult(basis.refuted, basis)


def monpc_extend(basis: Basis, extra_axioms: list, full_closure: bool = False) -> SaturationResult:
    """Continue a finished monomial-PC saturation after adding axioms.

    basis must be the result of monpc_saturate (or a previous extend) for a
    subset of the axioms over the same variables and degree bound; the
    given basis is not modified.  Produces the same span as saturating the
    enlarged system from scratch.
    """
    out = basis.copy()
    for p in extra_axioms:
        if p.degree > out.k:
            raise DegreeOverflowError(f"axiom of degree {p.degree} exceeds the bound k={out.k}")
        if p.field != out.field:
            raise UsageError("axiom field does not match basis field")
    stop = not full_closure
    if _lift_axioms(out, extra_axioms, out.num_vars, out.k, stop):
        return SaturationResult(True, out)
    _monpc_rounds(out, stop)
    return SaturationResult(out.refuted, out)


def _subdegree_generators_prime(basis: Basis, k: int) -> list:
    # under graded order a vector led by a monomial of degree < k has all
    # its terms of degree < k, and those vectors span the sub-degree space
    return [dict(v) for lead, v in sorted(basis.vectors.items(), key=lambda kv: mono_key(kv[0]))
            if len(lead) < k]


def _subdegree_generators_rational(basis: Basis, k: int) -> list:
    """Generating set of {p in span : deg(p) < k} via the kernel of the
    degree-k coordinate rows, compressed through the Gram square."""
    leads = sorted(basis.vectors, key=mono_key, reverse=True)
    occurring = sorted({m for v in basis.vectors.values() for m in v}, key=mono_key, reverse=True)
    top = [m for m in occurring if len(m) == k]
    low = [m for m in occurring if len(m) < k]
    f = basis.field
    entries = {}
    for L in leads:
        for m, c in basis.vectors[L].items():
            if len(m) == k:
                entries[(m, L)] = Fraction(c)
    A = Matrix(f, tuple(top), tuple(leads), entries)
    zero_b = Vector(f, tuple(top), {})
    solved = gauss_solve(A, zero_b)
    assert solved is not None
    _, kernel = solved
    n_entries = {}
    for j, kv in enumerate(kernel):
        # column j of N is the combination of basis rows given by kv
        acc: dict = {}
        for L, coef in kv.entries.items():
            for m, c in basis.vectors[L].items():
                s = acc.get(m, 0) + coef * c
                if s == 0:
                    acc.pop(m, None)
                else:
                    acc[m] = s
        for m, c in acc.items():
            n_entries[(m, j)] = c
    N = Matrix(f, tuple(low), tuple(range(len(kernel))), n_entries)
    compressed = compress_image(N)
    cols: dict = {}
    for (m, col), c in compressed.entries.items():
        cols.setdefault(col, {})[m] = c
    return [cols[col] for col in sorted(cols, key=mono_key, reverse=True)]


def pc_saturate(system: PolySystem, k: int, full_closure: bool = False) -> SaturationResult:
    """Saturate the degree-k full-PC span of the axiom system.

    Each round extracts a generating set for the sub-degree space
    {p in span : deg(p) < k} (over Q via the linear system on the degree-k
    coordinates plus Gram compression; over F_p via the echelon basis
    itself) and lifts every generator by every variable, until stable.
    """
    _check_system(system, k)
    f = system.field
    basis = Basis(f, k, system.num_vars)
    stop = not full_closure
    if _lift_axioms(basis, system.axioms, system.num_vars, k, stop):
        return SaturationResult(True, basis)
    while True:
        if f.is_rational:
            gens = _subdegree_generators_rational(basis, k)
        else:
            gens = _subdegree_generators_prime(basis, k)
        grew = False
        for g in gens:
            for x in range(1, system.num_vars + 1):
                if basis.insert(_mul_var(f, g, x)):
                    grew = True
                    if stop and basis.refuted:
                        return SaturationResult(True, basis)
        if not grew:
            break
    return SaturationResult(basis.refuted, basis)


ENGINES = {"monpc": monpc_saturate, "pc": pc_saturate}


def min_refutation_degree(system: PolySystem, engine: str = "monpc",
                          k_max: int = 6, full_closure: bool = False) -> Optional[int]:
    """Smallest k <= k_max at which the engine refutes, or None.

    Every line of a degree-k proof obeys the bound, so axioms wider than k
    cannot take part: at each k the degree-<= k subsystem is what gets
    saturated.  The sweep starts at 1; a system containing a nonzero
    constant therefore reports degree 1.
    """
    try:
        saturate = ENGINES[engine]
    except KeyError:
        raise UsageError(f"unknown engine {engine!r}; use one of {sorted(ENGINES)}")
    for k in range(1, k_max + 1):
        usable = [p for p in system.axioms if p.degree <= k]
        sub = PolySystem(system.field, system.num_vars, usable, system.booleanity)
        if saturate(sub, k, full_closure=full_closure).refuted:
            return k
    return None


# ---------------------------------------------------------------------------
# PolySystem JSON wire format

def field_to_json(f: Field) -> dict:
    return {"kind": "Q"} if f.is_rational else {"kind": "Fp", "p": f.p}


def field_from_json(obj: dict) -> Field:
    kind = obj.get("kind")
    if kind == "Q":
        return RATIONALS
    if kind == "Fp":
        return Field(int(obj["p"]))
    raise UsageError(f"unknown field kind {kind!r}")


def system_to_json(system: PolySystem) -> dict:
    polys = []
    for p in system.axioms:
        polys.append([
            {"coef": system.field.format_scalar(c), "mono": list(m)}
            for m, c in sorted(p.terms.items(), key=lambda mc: mono_key(mc[0]), reverse=True)
        ])
    return {
        "field": field_to_json(system.field),
        "num_vars": system.num_vars,
        "booleanity": system.booleanity,
        "polys": polys,
    }


def system_from_json(obj: dict) -> PolySystem:
    f = field_from_json(obj["field"])
    axioms = []
    for poly in obj["polys"]:
        terms = [(f.parse_scalar(t["coef"]), tuple(t["mono"])) for t in poly]
        axioms.append(Polynomial(f, [(m, c) for c, m in terms]))
    return PolySystem(f, int(obj["num_vars"]), axioms, bool(obj.get("booleanity", True)))


def dumps_system(system: PolySystem) -> str:
    return json.dumps(system_to_json(system), indent=1)


def loads_system(text: str) -> PolySystem:
    return system_from_json(json.loads(text))
