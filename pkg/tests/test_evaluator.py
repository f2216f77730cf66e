"""Evaluation paths: brute force, closed form, DP, monomial machinery."""

import json
import random
from fractions import Fraction

import pytest

from hyperhom import fixtures as fx
from hyperhom.abelian import AbelianGroup
from hyperhom.dichotomy import classify
from hyperhom.evaluator import (
    DEFAULT_BRUTE_CAP,
    CapExceeded,
    eval_bruteforce,
    eval_tractable,
    evaluate,
    lambda_factor_direct,
    lambda_monomial_dp,
    monomial_value,
    northwest_contingency,
    resolve_brute_cap,
)
from hyperhom.model import CspInstance, Hypergraph, degrees

EDGE = Hypergraph(3, ((0, 1, 2),))


def test_bruteforce_examples():
    assert eval_bruteforce(fx.all_ones(), EDGE) == 8
    assert eval_bruteforce(fx.parity(), EDGE) == 4
    assert eval_bruteforce(fx.geometric(), EDGE) == 27
    assert eval_bruteforce(fx.mixed(), EDGE) == 256


def test_bruteforce_isolated_and_edgeless():
    plus_isolated = Hypergraph(4, ((0, 1, 2),))
    assert eval_bruteforce(fx.parity(), plus_isolated) == 8
    assert eval_bruteforce(fx.parity(), Hypergraph(3, ())) == 8  # 2^3
    assert eval_bruteforce(fx.mixed(), Hypergraph(2, ())) == 16  # 4^2


def test_bruteforce_csp_scope():
    inst = CspInstance(2, ((0, 0, 1),), ())
    assert eval_bruteforce(fx.parity(), inst) == 2


def test_bruteforce_rejects_equalities():
    inst = CspInstance(3, ((0, 1, 2),), ((0, 1),))
    with pytest.raises(ValueError, match="gadget"):
        eval_bruteforce(fx.parity(), inst)


def test_bruteforce_rational_weights():
    g = fx.random_table(random.Random(5), 3, zero_frac=0.2)
    inst = Hypergraph(4, ((0, 1, 2), (1, 2, 3)))
    direct = Fraction(0)
    from itertools import product

    for x in product(range(3), repeat=4):
        w = Fraction(1)
        for e in inst.edges:
            w *= g.value(tuple(x[v] for v in e))
        direct += w
    assert eval_bruteforce(g, inst) == direct


def test_cap_guard_and_resolution(monkeypatch):
    big = Hypergraph(40, ((0, 1, 2),))
    with pytest.raises(CapExceeded):
        eval_bruteforce(fx.parity(), big, cap=2**30)
    monkeypatch.delenv("HYPERHOM_BRUTE_CAP", raising=False)
    assert resolve_brute_cap(None) == DEFAULT_BRUTE_CAP
    assert resolve_brute_cap(123) == 123
    monkeypatch.setenv("HYPERHOM_BRUTE_CAP", "5000")
    assert resolve_brute_cap(None) == 5000
    assert resolve_brute_cap(77) == 77  # explicit argument wins
    small = Hypergraph(13, ())
    with pytest.raises(CapExceeded):
        eval_bruteforce(fx.parity(), small)  # 2^13 > 5000 from env
    monkeypatch.setenv("HYPERHOM_BRUTE_CAP", "9001")
    assert eval_bruteforce(fx.parity(), small) == 8192


def test_lambda_factor_direct_examples():
    mixed_fs = classify(fx.mixed()).components[0].factor
    geom_fs = classify(fx.geometric()).components[0].factor
    parity_fs = classify(fx.parity()).components[0].factor
    assert lambda_factor_direct(geom_fs, (1, 1, 1), 1) == 27
    assert lambda_factor_direct(mixed_fs, (1, 1, 1), 1) == 64
    assert lambda_factor_direct(mixed_fs, (1, 1, 2, 1, 1), 2) == 2560
    assert lambda_factor_direct(parity_fs, (1, 1, 2, 1, 1), 2) == 1
    with pytest.raises(ValueError):
        lambda_factor_direct(mixed_fs, (1, 1, 1), 2)  # degree sum mismatch


def test_lambda_monomial_dp_examples():
    geom_fs = classify(fx.geometric()).components[0].factor
    tally, value = lambda_monomial_dp(geom_fs, EDGE)
    assert value == 27
    coeffs = {vec: c for vec, c in tally.coeff.items()}
    assert coeffs == {(3, 0): 1, (2, 1): 3, (1, 2): 3, (0, 3): 1}

    mixed_fs = classify(fx.mixed()).components[0].factor
    two = Hypergraph(5, ((0, 1, 2), (2, 3, 4)))
    _, value = lambda_monomial_dp(mixed_fs, two)
    assert value == 2560

    parity_fs = classify(fx.parity()).components[0].factor
    tally, value = lambda_monomial_dp(parity_fs, EDGE)
    assert value == 1
    assert list(tally.coeff.items()) == [((3,), 1)]

    with pytest.raises(ValueError):
        lambda_monomial_dp(geom_fs, Hypergraph(3, ()))


def test_tally_sanity_random():
    rng = random.Random(31415)
    for _ in range(15):
        g = fx.random_tractable(rng, rng.randint(2, 4))
        cls = classify(g)
        inst = fx.random_hypergraph(rng, 6, 4, 3)
        if not inst.edges:
            continue
        for comp in cls.components:
            fs = comp.factor
            tally, value = lambda_monomial_dp(fs, inst)
            assert sum(tally.coeff.values()) == fs.s ** inst.n
            assert all(sum(vec) == 3 * len(inst.edges) for vec in tally.coeff)
            assert value == lambda_factor_direct(fs, degrees(inst), len(inst.edges))


def test_northwest_examples():
    assert northwest_contingency((2, 1), 1, 3).entries == ((2,), (1,))
    assert northwest_contingency((3, 3), 2, 3).entries == ((3, 0), (0, 3))
    assert northwest_contingency((4, 2), 2, 3).entries == ((3, 1), (0, 2))
    with pytest.raises(ValueError):
        northwest_contingency((2, 2), 1, 3)


def test_monomial_value_examples():
    geom_fs = classify(fx.geometric()).components[0].factor
    assert monomial_value(geom_fs, (2, 1)) == 2
    assert monomial_value(geom_fs, (3, 0)) == 1
    mixed_fs = classify(fx.mixed()).components[0].factor
    assert monomial_value(mixed_fs, (0, 3)) == 27
    with pytest.raises(ValueError):
        monomial_value(mixed_fs, (1, 1))  # sum not divisible by r


def test_monomial_value_alpha_independent():
    # a component whose relation has more than three members: Z3 with s=2
    g = fx.structured_family(
        [(AbelianGroup.cyclic(3), 2, (Fraction(1), Fraction(2)), 0, Fraction(1))]
    )
    cls = classify(g)
    fs = cls.components[0].factor
    relation = sorted(fs.relation)
    assert len(relation) >= 3
    for mvec in ((2, 1), (3, 0), (0, 3), (1, 2)):
        want = monomial_value(fs, mvec)
        table = northwest_contingency(mvec, 1, 3)
        column = [i for i, row in enumerate(table.entries) for _ in range(row[0])]
        for alpha in relation[:3]:
            z = tuple(fs.element(c, i) for c, i in zip(alpha, column))
            assert g.value(z) == want


def test_eval_tractable_examples():
    cls = classify(fx.parity())
    assert eval_tractable(cls, EDGE).value == 4
    assert eval_tractable(cls, Hypergraph(4, ((0, 1, 2),))).value == 8
    assert eval_tractable(cls, CspInstance(2, ((0, 0, 1),), ())).value == 2
    assert eval_tractable(classify(fx.mixed()), EDGE).value == 256


def test_eval_tractable_breakdown_and_json():
    cls = classify(fx.parity_loop_blocks())
    report = eval_tractable(cls, EDGE)
    assert report.value == 5
    assert len(report.pieces) == 1
    piece = report.pieces[0]
    assert [t.product for t in piece.terms] == [Fraction(4), Fraction(1)]
    blob = report.to_json()
    json.dumps(blob)
    assert blob["value"] == "5"
    assert blob["pieces"][0]["terms"][0]["homs"] == 4


def test_eval_tractable_methods_agree():
    rng = random.Random(777)
    for _ in range(10):
        g = fx.random_tractable(rng, rng.randint(2, 4))
        cls = classify(g)
        inst = fx.random_hypergraph(rng, 7, 5, 3)
        a = eval_tractable(cls, inst, method="structured").value
        b = eval_tractable(cls, inst, method="structured-dp").value
        assert a == b


def test_eval_multiplicative_over_disjoint_union():
    rng = random.Random(2024)
    for _ in range(8):
        g = fx.random_tractable(rng, rng.randint(2, 4))
        cls = classify(g)
        left = fx.random_hypergraph(rng, 5, 3, 3)
        right = fx.random_hypergraph(rng, 5, 3, 3)
        shifted = tuple(tuple(v + left.n for v in e) for e in right.edges)
        union = Hypergraph(left.n + right.n, left.edges + shifted)
        lv = eval_tractable(cls, left).value
        rv = eval_tractable(cls, right).value
        uv = eval_tractable(cls, union).value
        assert uv == lv * rv


def test_eval_empty_pruned_domain():
    from hyperhom.model import SymFunc

    nothing = SymFunc.from_weights(2, 3, {})
    cls = classify(nothing)
    assert eval_tractable(cls, EDGE).value == 0
    assert eval_tractable(cls, Hypergraph(3, ())).value == 8
    assert eval_bruteforce(nothing, EDGE) == 0


def test_evaluate_auto_dispatch():
    report, cls = evaluate(fx.parity(), EDGE, method="auto")
    assert report.method == "structured" and report.value == 4 and cls.tractable

    report, cls = evaluate(fx.not_all_zero(), EDGE, method="auto")
    assert report.method == "brute" and report.value == 7
    assert not cls.tractable

    report, cls = evaluate(fx.parity(), EDGE, method="brute")
    assert report.method == "brute" and report.value == 4 and cls is None

    with pytest.raises(ValueError):
        evaluate(fx.not_all_zero(), EDGE, method="structured")


def test_evaluate_structured_dp():
    report, _ = evaluate(fx.mixed(), EDGE, method="structured-dp")
    assert report.method == "structured-dp" and report.value == 256
