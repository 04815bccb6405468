import itertools
import json
import math
import random
from fractions import Fraction

import pytest

from owlab import (DomainError, FinSubset, IntLattice, MarkovSpec, ResourceError, SftSpec,
                   bernoulli_entropy_h, builtin_folner, builtin_sft, markov_entropy_h, pattern_count,
                   sft_entropy_h)
from owlab.dynamics import Forbidden, shannon, stationary_distribution
from owlab.subadditive import check_non_decreasing, check_right_subinvariant, check_subadditive

from oracles import LOG_PHI, brute_pattern_count, cylinder_entropy, golden_count, markov_joint

GOLDEN, HARDSQ = builtin_sft("golden"), builtin_sft("hardsq")
CHAIN = MarkovSpec.from_matrix([[Fraction(1, 3), Fraction(2, 3)], [Fraction(3, 4), Fraction(1, 4)]])


def box(*hi):
    return FinSubset.box((0,) * len(hi), hi)


def random_sft(rng, dim):
    forb = []
    for _ in range(rng.randint(1, 3)):
        size = rng.randint(1, 3)
        shape = {tuple(rng.randint(0, 2) for _ in range(dim)) for _ in range(size)}
        forb.append(Forbidden.make(sorted(shape), [rng.randint(0, 2) for _ in shape]))
    return SftSpec(3, dim, tuple(forb))


def test_count_examples():
    assert pattern_count(builtin_sft("full2"), FinSubset([0, 4, 9])) == 8
    assert pattern_count(GOLDEN, box(5)) == 13
    assert pattern_count(HARDSQ, box(2, 2)) == 7
    assert pattern_count(GOLDEN, FinSubset()) == 1
    assert [pattern_count(GOLDEN, box(n)) for n in range(1, 31)] == [golden_count(n) for n in range(1, 31)]
    hard = [pattern_count(HARDSQ, box(n, n)) for n in range(1, 7)]
    assert hard == [2, 7, 63, 1234, 55447, 5598861]


@pytest.mark.parametrize("dim", [1, 2])
def test_transfer_matches_brute_force(dim):
    rng = random.Random(31 + dim)
    for _ in range(60):
        sft = random_sft(rng, dim)
        F = FinSubset(tuple(rng.randint(0, 4) for _ in range(dim)) for _ in range(rng.randint(1, 8)))
        expected = brute_pattern_count(sft, F)
        assert pattern_count(sft, F, method="transfer") == expected
        assert pattern_count(sft, F, method="backtrack") == expected


def test_three_dimensional_counts():
    sft = SftSpec(2, 3, (Forbidden.make([(0, 0, 0), (0, 0, 1)], [1, 1]),
                         Forbidden.make([(0, 0, 0), (1, 0, 0)], [1, 1])))
    F = box(2, 2, 2)
    assert pattern_count(sft, F) == brute_pattern_count(sft, F)


def test_budget_guard(monkeypatch):
    with pytest.raises(ResourceError):
        pattern_count(HARDSQ, box(6, 6), budget=1000)
    with pytest.raises(ResourceError):
        pattern_count(HARDSQ, box(4, 4), budget=10, method="backtrack")
    monkeypatch.setenv("OWLAB_BUDGET", "50")
    with pytest.raises(ResourceError):
        pattern_count(HARDSQ, box(5, 5))


def test_symbolic_lemmas():
    rng = random.Random(37)
    for sft, dim in ((GOLDEN, 1), (HARDSQ, 2)):
        for _ in range(100):
            cells = [tuple(rng.randint(0, 3) for _ in range(dim)) for _ in range(rng.randint(2, 9))]
            cut = rng.randint(1, len(cells) - 1)
            A, B = FinSubset(cells[:cut]), FinSubset(cells[cut:]) - FinSubset(cells[:cut])
            nA, nB, nAB = (pattern_count(sft, X) for X in (A, B, A | B))
            assert nAB <= nA * nB
            assert max(nA, nB) <= nAB
            s = tuple(rng.randint(-5, 5) for _ in range(dim))
            assert pattern_count(sft, IntLattice(dim).right_translate(A, s)) == nA


def test_sft_spec_json(tmp_path):
    data = {"alphabet": 2, "dim": 1, "forbidden": [{"shape": [[3], [4]], "pattern": [1, 1]}]}
    path = tmp_path / "g.json"
    path.write_text(json.dumps(data))
    sft = SftSpec.from_json(path)
    assert sft.forbidden == GOLDEN.forbidden
    assert SftSpec.from_dict(sft.to_dict()).forbidden == sft.forbidden
    with pytest.raises(DomainError):
        SftSpec.from_dict({"alphabet": 2, "dim": 1, "forbidden": [{"shape": [[0]], "pattern": [2]}]})
    with pytest.raises(DomainError):
        builtin_sft("golden", 2)


def test_sft_entropy_limits():
    h = sft_entropy_h(GOLDEN)
    assert h.trusted and h.M == math.log(2)
    assert abs(h(box(30)) / 30 - LOG_PHI) <= 0.01
    hs = sft_entropy_h(HARDSQ)
    assert abs(hs(box(6, 6)) / 36 - hs(box(5, 5)) / 25) <= 0.01
    full = sft_entropy_h(builtin_sft("full2"))
    assert full(FinSubset([0, 3, 4])) == math.log(8)


def test_untrusted_sft_without_solutions():
    # every symbol is forbidden on its own, so nothing is admissible
    sft = SftSpec(1, 1, (Forbidden.make([(0,)], [0]),))
    h = sft_entropy_h(sft)
    assert not h.trusted
    with pytest.raises(DomainError):
        h(box(3))


def test_sft_entropy_properties():
    rng = random.Random(41)
    for sft in (GOLDEN, HARDSQ):
        h = sft_entropy_h(sft)
        sg = h.semigroup

        def pair(r):
            return tuple(FinSubset(tuple(r.randint(0, 4) for _ in range(sft.dim))
                                   for _ in range(r.randint(1, 8))) for _ in range(2))

        def shifted(r):
            A, _ = pair(r)
            return A, tuple(r.randint(-3, 3) for _ in range(sft.dim))

        assert check_subadditive(h, pair, 100, rng).ok
        assert check_non_decreasing(h, pair, 100, rng).ok
        rep = check_right_subinvariant(h, shifted, 100, rng, sg)
        assert rep.ok and not rep.strict_drops


def test_bernoulli():
    rng = random.Random(43)
    half = bernoulli_entropy_h([Fraction(1, 2), Fraction(1, 2)])
    zero = bernoulli_entropy_h([1, 0])
    skew = bernoulli_entropy_h([Fraction(1, 4), Fraction(3, 4)])
    H = -(0.25 * math.log(0.25) + 0.75 * math.log(0.75))
    for _ in range(100):
        F = FinSubset(rng.sample(range(-50, 50), rng.randint(1, 60)))
        assert half.ratio(F) == math.log(2)
        assert zero(F) == 0
        assert skew.ratio(F) == pytest.approx(H, rel=1e-15)
    with pytest.raises(DomainError):
        bernoulli_entropy_h([Fraction(1, 2), Fraction(1, 3)])
    with pytest.raises(DomainError):
        bernoulli_entropy_h([Fraction(3, 2), Fraction(-1, 2)])


def test_stationary_distribution():
    assert stationary_distribution(CHAIN.P) == [Fraction(9, 17), Fraction(8, 17)]
    with pytest.raises(DomainError):
        stationary_distribution([[1, 0], [0, 1]])
    with pytest.raises(DomainError):
        MarkovSpec([[Fraction(1, 2), Fraction(1, 2)], [1, 0]], [Fraction(1, 2), Fraction(1, 2)])


def test_markov_examples():
    h = markov_entropy_h(CHAIN)
    assert h(FinSubset([0])) == shannon(CHAIN.pi)
    assert h(FinSubset([7])) == h(FinSubset([0]))
    n = 10 ** 4
    closed = (shannon(CHAIN.pi) + (n - 1) * CHAIN.entropy_rate()) / n
    ratio = h(box(n)) / n
    assert ratio == pytest.approx(closed, rel=1e-12)
    assert abs(ratio - CHAIN.entropy_rate()) <= 1e-3


def test_markov_iid_matches_bernoulli_exactly():
    rng = random.Random(47)
    p = [Fraction(1, 5), Fraction(3, 10), Fraction(1, 2)]
    iid = markov_entropy_h(MarkovSpec.from_matrix([p, p, p]))
    bern = bernoulli_entropy_h(p)
    for _ in range(100):
        F = FinSubset(rng.sample(range(0, 200), rng.randint(1, 40)))
        assert iid(F) == bern(F)


def test_markov_matches_cylinder_oracle():
    m = MarkovSpec.from_matrix([[Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)],
                                [Fraction(1, 5), Fraction(0), Fraction(4, 5)],
                                [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)]])
    h = markov_entropy_h(m)
    joint = markov_joint(m.P, m.pi, 7)
    for size in range(1, 5):
        for F in itertools.combinations(range(7), size):
            assert h(FinSubset(F)) == pytest.approx(cylinder_entropy(joint, F), abs=1e-10)


def test_markov_subadditive_against_oracle():
    rng = random.Random(53)
    h = markov_entropy_h(CHAIN)
    joint = markov_joint(CHAIN.P, CHAIN.pi, 12)
    for _ in range(200):
        A = set(rng.sample(range(12), rng.randint(1, 6)))
        B = set(rng.sample(range(12), rng.randint(1, 6)))
        union = sorted(A | B)
        assert h(FinSubset(union)) == pytest.approx(cylinder_entropy(joint, union), abs=1e-10)
        assert h(FinSubset(union)) <= h(FinSubset(A)) + h(FinSubset(B)) + 1e-12


def test_entropy_ratios_along_boxes():
    seq = builtin_folner(IntLattice(1))
    h = sft_entropy_h(GOLDEN)
    assert [h(seq(n)) for n in (1, 2, 3)] == [math.log(2), math.log(3), math.log(5)]
