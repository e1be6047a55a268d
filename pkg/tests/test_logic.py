import json
import random

import pytest

from conftest import random_poslfp, random_structure, stage_table_eval
from prooflab.errors import UsageError
from prooflab.logic import (LfpFormula, RelStructure, eval_poslfp, horn_encode,
                            parse_formula, structure_from_json, structure_to_json)
from prooflab.resolution import horn_refute, kres_saturate


def edge_graph(n, edges):
    sym = set()
    for (u, v) in edges:
        sym.add((u, v))
    return RelStructure(n, {"E": (2, frozenset(sym))})


REACH = "(lfp R (x) (or (= x s) (exists y (and (R y) (E y x)))) t)"


def test_eval_exists_identity():
    a = RelStructure(2, {"E": (2, frozenset())})
    assert eval_poslfp(a, parse_formula("(exists x (= x x))"))


def test_eval_reachability():
    a = edge_graph(2, [(0, 1)])
    assert eval_poslfp(a, parse_formula(REACH, {"s": 0, "t": 1}))
    assert not eval_poslfp(a, parse_formula(REACH, {"s": 1, "t": 0}))


def test_eval_rejects_free_variables_and_unknown_relations():
    a = edge_graph(2, [(0, 1)])
    with pytest.raises(UsageError):
        eval_poslfp(a, parse_formula("(P x)"))
    with pytest.raises(UsageError):
        eval_poslfp(a, parse_formula("(exists x (Q x))"))


def test_parser_rejects_non_poslfp():
    with pytest.raises(UsageError):
        parse_formula("(not (and (P x) (P y)))")
    with pytest.raises(UsageError):
        parse_formula("(lfp R (x) (lfp R (y) (R y) y) x)")


def test_parser_arity_checks():
    with pytest.raises(UsageError):
        parse_formula("(lfp R (x y) (R x) x)")


def test_efp0_detection():
    assert parse_formula("(exists x (P x))").is_efp0()
    assert not parse_formula("(forall x (P x))").is_efp0()


def test_horn_encode_exists_example():
    # universe {a, b}, P = {a}: the encoding derives the sentence and refutes
    a = RelStructure(2, {"P": (1, frozenset({(0,)}))})
    enc = horn_encode(a, parse_formula("(exists x (P x))"))
    assert horn_refute(enc.cnf).refuted
    widths = sorted(len(c) for c in enc.cnf.clauses)
    assert max(widths) <= 2
    # clause shapes: one positive unit (P holds at a), one negative unit for b,
    # two implications into the quantifier variable, one goal denial
    assert widths == [1, 1, 1, 2, 2]


def test_horn_encode_forall_is_wide_and_open():
    a = RelStructure(2, {"P": (1, frozenset({(0,)}))})
    enc = horn_encode(a, parse_formula("(forall x (P x))"))
    assert not horn_refute(enc.cnf).refuted
    assert max(len(c) for c in enc.cnf.clauses) == 3  # n + 1 with n = 2


def test_horn_encode_matches_eval_on_reachability():
    g = edge_graph(4, [(0, 1), (1, 2), (3, 2)])
    for s in range(4):
        for t in range(4):
            phi = parse_formula(REACH, {"s": s, "t": t})
            assert horn_refute(horn_encode(g, phi).cnf).refuted == eval_poslfp(g, phi)


def test_random_corpus_eval_encode_stage_tables_agree():
    rng = random.Random(77)
    total = efp0_count = 0
    while total < 120:
        a = random_structure(rng, max_n=4)
        phi = parse_formula(random_poslfp(rng), {})
        want = stage_table_eval(a, phi)
        assert eval_poslfp(a, phi) == want
        enc = horn_encode(a, phi)
        assert horn_refute(enc.cnf).refuted == want
        if phi.is_efp0():
            efp0_count += 1
            assert max((len(c) for c in enc.cnf.clauses), default=0) <= 3
            assert kres_saturate(enc.cnf, 3, stop_on_refutation=True).refuted == want
        total += 1
    assert efp0_count >= 20


def test_encoding_size_linear_in_instantiations():
    a = random_structure(random.Random(5), max_n=4)
    phi = parse_formula("(exists x (exists y (and (E x y) (P y))))")
    enc = horn_encode(a, phi)
    assert len(enc.cnf.clauses) <= a.universe_size * len(enc.var_map) + 1


def test_var_map_is_injective():
    a = edge_graph(3, [(0, 1), (1, 2)])
    enc = horn_encode(a, parse_formula(REACH, {"s": 0, "t": 2}))
    assert len(set(enc.var_map.values())) == len(enc.var_map)


def test_structure_json_round_trip():
    a = random_structure(random.Random(8), max_n=5)
    again = structure_from_json(json.loads(json.dumps(structure_to_json(a))))
    assert again.universe_size == a.universe_size
    assert again.relations == a.relations


def test_structure_validation():
    with pytest.raises(UsageError):
        RelStructure(2, {"E": (2, frozenset({(0, 5)}))})
    with pytest.raises(UsageError):
        RelStructure(2, {"E": (2, frozenset({(0,)}))})
