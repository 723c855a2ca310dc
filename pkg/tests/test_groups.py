"""Group arithmetic and Cayley-ball enumeration."""

import numpy as np
import pytest

from unirep import (
    FgAbelianOracle,
    FiniteTableOracle,
    FreeGroupOracle,
    KindMismatchError,
    PreconditionError,
    ResourceLimitError,
    ball,
    symmetric_generators,
)
from util import cyclic_table, f2_oracle, z2_oracle, z2_rewriting, z3_rewriting, z_oracle


def all_oracles():
    return [
        f2_oracle(),
        z_oracle(),
        z2_oracle(),
        FgAbelianOracle(1, [4]),
        cyclic_table(3),
        cyclic_table(7),
        z2_rewriting(),
        z3_rewriting(),
    ]


def test_free_reduction_examples():
    F2 = f2_oracle()
    a, b = (1,), (2,)
    assert F2.multiply(a, F2.invert(a)) == ()
    assert F2.multiply((1, 2), (-2, 1)) == (1, 1)
    assert F2.invert((1, 2)) == (-2, -1)


def test_abelian_examples():
    Z2 = z2_oracle()
    assert Z2.multiply((1, 0), (0, 1)) == (1, 1)
    assert Z2.invert((2, -1)) == (-2, 1)


def test_table_examples():
    Z3 = cyclic_table(3)
    assert Z3.invert(1) == 2
    assert Z3.multiply(1, 2) == 0


def test_ball_counts():
    assert len(ball(f2_oracle(), 2)) == 17
    assert len(ball(z2_oracle(), 2)) == 13
    assert len(ball(cyclic_table(3), 1)) == 3


def test_ball_diamond_formula():
    Z2 = z2_oracle()
    for r in range(6):
        assert len(ball(Z2, r)) == 2 * r * r + 2 * r + 1


@pytest.mark.parametrize("oracle", all_oracles(), ids=lambda o: o.kind + str(id(o) % 97))
def test_associativity_and_inverses(oracle):
    rng = np.random.default_rng(7)
    pool = ball(oracle, 3).elements
    e = oracle.identity()
    for _ in range(1000):
        a, b, c = (pool[int(rng.integers(len(pool)))] for _ in range(3))
        assert oracle.multiply(oracle.multiply(a, b), c) == oracle.multiply(a, oracle.multiply(b, c))
    for _ in range(200):
        a = pool[int(rng.integers(len(pool)))]
        assert oracle.multiply(a, oracle.invert(a)) == e
        assert oracle.multiply(oracle.invert(a), a) == e


@pytest.mark.parametrize("oracle", all_oracles(), ids=lambda o: o.kind + str(id(o) % 97))
def test_ball_invariants(oracle):
    steps = symmetric_generators(oracle)
    previous = None
    for r in range(4):
        B = ball(oracle, r)
        assert B.elements[0] == oracle.identity()
        assert len(set(B.elements)) == len(B.elements)
        if previous is not None:
            assert set(previous.elements) <= set(B.elements)
            # closure: every one-step product from the smaller ball lands inside
            for x in previous.elements:
                for s in steps:
                    assert oracle.multiply(x, s) in B
        previous = B


def test_finite_ball_stabilizes():
    Z7 = cyclic_table(7)
    sizes = [len(ball(Z7, r)) for r in range(10)]
    assert sizes[-1] == 7
    assert sizes[4] == 7  # diameter of Z/7 with one generator is 3


def test_rewriting_matches_abelian():
    RW, Z2 = z2_rewriting(), z2_oracle()
    for r in range(4):
        assert len(ball(RW, r)) == len(ball(Z2, r))


def test_rewriting_z3_normal_forms():
    RW3 = z3_rewriting()
    a = (1,)
    assert RW3.multiply(a, a) == (-1,)
    assert RW3.multiply(RW3.multiply(a, a), a) == ()
    assert len(ball(RW3, 5)) == 3


def test_kind_mismatch_errors():
    Z = z_oracle()
    with pytest.raises(KindMismatchError):
        Z.multiply((1,), (1, 2))
    with pytest.raises(KindMismatchError):
        f2_oracle().multiply((1, -1), ())  # not reduced
    with pytest.raises(KindMismatchError):
        cyclic_table(3).multiply(1, 5)
    with pytest.raises(KindMismatchError):
        FgAbelianOracle(0, [4]).check_element((7,))  # not reduced mod 4


def test_ball_cap_resource_error():
    with pytest.raises(ResourceLimitError, match="cap 1000"):
        ball(f2_oracle(), 12, cap=1000)


def test_generators_must_generate_and_exclude_identity():
    with pytest.raises(PreconditionError):
        FiniteTableOracle([[0, 1], [1, 0]], [0])  # identity as generator
    table4 = [[(i + j) % 4 for j in range(4)] for i in range(4)]
    with pytest.raises(PreconditionError):
        FiniteTableOracle(table4, [2])  # <2> is a proper subgroup of Z/4


def test_bad_table_rejected():
    with pytest.raises(PreconditionError):
        FiniteTableOracle([[0, 1], [0, 1]], [1])  # rows not permutations


def test_as_word_roundtrip():
    for oracle in (z_oracle(), z2_oracle(), cyclic_table(5), f2_oracle(), z2_rewriting()):
        pool = ball(oracle, 3).elements
        for x in pool:
            word = oracle.as_word(x)
            rebuilt = oracle.identity()
            for letter in word:
                g = oracle.generators[abs(letter) - 1]
                rebuilt = oracle.multiply(rebuilt, g if letter > 0 else oracle.invert(g))
            assert rebuilt == x


def test_element_string_roundtrip():
    for oracle in all_oracles():
        for x in ball(oracle, 2).elements:
            assert oracle.element_from_str(oracle.element_to_str(x)) == x
