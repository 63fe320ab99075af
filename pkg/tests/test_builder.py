import random
from fractions import Fraction

import pytest

from flagstab.builder import (
    GeneratorSet,
    McLainElement,
    mclain_matrices,
    mclain_truncate,
    module_lcs,
    refine_series,
)
from flagstab.errors import McLainError, NormalizationError, RefinementObstruction, ShapeError
from flagstab.instances import random_series, random_stabilizer_element
from flagstab.linalg import GF, QQ, Mat, Subspace
from flagstab.series import Series, canonical_coarsening, in_stabilizer
from flagstab.transvections import commutator
from flagstab.unipotent import jordan_matrix, unipotent_exponent

F2 = GF(2)
F3 = GF(3)
F7 = GF(7)


def test_generator_set_checks():
    with pytest.raises(ShapeError):
        GeneratorSet([])
    with pytest.raises(ShapeError):
        GeneratorSet([Mat(QQ, [[0, 0], [0, 0]])])
    with pytest.raises(ShapeError):
        GeneratorSet([Mat.identity(QQ, 2), Mat.identity(QQ, 3)])


def test_module_lcs_examples():
    chain = module_lcs(GeneratorSet([Mat.identity(F7, 3)]))
    assert [x.dim for x in chain.chain] == [3, 0]
    assert chain.reaches_zero
    chain = module_lcs(GeneratorSet([jordan_matrix(F7, [3])]))
    assert [x.dim for x in chain.chain] == [3, 2, 1, 0]
    # two random unitriangular generators terminate within dim steps
    rng = random.Random(1)
    for _ in range(10):
        s = random_series(rng, F3, 4, 3)
        gens = GeneratorSet([random_stabilizer_element(rng, s) for _ in range(2)])
        chain = module_lcs(gens)
        assert chain.reaches_zero and len(chain.chain) <= 5
    # non-unipotent action stalls
    chain = module_lcs(GeneratorSet([Mat(QQ, [[2, 0], [0, 1]])]))
    assert not chain.reaches_zero


def test_module_lcs_members_invariant():
    rng = random.Random(2)
    for _ in range(10):
        field = rng.choice([F2, F7, QQ])
        n = rng.randint(2, 6)
        s = random_series(rng, field, n, rng.randint(1, n - 1))
        gens = GeneratorSet([random_stabilizer_element(rng, s) for _ in range(2)])
        chain = module_lcs(gens)
        for member in chain.chain:
            for g in gens:
                assert member.apply(g) == member


def test_refine_series_examples():
    s = Series(F3, 4, [Subspace.full(F3, 4), Subspace.zero(F3, 4)])
    refined = refine_series(s, GeneratorSet([jordan_matrix(F3, [4])]))
    assert refined.num_jumps == 4
    assert refine_series(refined, GeneratorSet([Mat.identity(F3, 4)])) == refined
    with pytest.raises(RefinementObstruction):
        refine_series(
            Series(QQ, 2, [Subspace.full(QQ, 2), Subspace.zero(QQ, 2)]),
            GeneratorSet([Mat(QQ, [[2, 0], [0, 1]])]),
        )
    with pytest.raises(NormalizationError):
        refine_series(
            Series(QQ, 2, [Subspace.full(QQ, 2), Subspace.span(QQ, 2, [[0, 1]]), Subspace.zero(QQ, 2)]),
            GeneratorSet([Mat(QQ, [[0, 1], [1, 0]])]),
        )


def _shift_poly(rng, field, n, min_deg):
    # unitriangular polynomial in the shift; all of these commute
    rows = [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]
    for j in range(min_deg, n):
        if j == min_deg:
            c = rng.randrange(1, field.p) if field.is_prime_field else field.one
        else:
            c = rng.randrange(field.p) if field.is_prime_field else field.coerce(rng.randint(-1, 1))
        for i in range(n - j):
            rows[i][i + j] = field.add(rows[i][i + j], c)
    return Mat(field, rows)


def test_refine_tower_stabilized():
    rng = random.Random(3)
    for _ in range(8):
        field = rng.choice([F2, F3])
        n = rng.randint(5, 7)
        n0 = [_shift_poly(rng, field, n, 3)]
        n1 = n0 + [_shift_poly(rng, field, n, 1)]
        base = module_lcs(GeneratorSet(n0))
        s0 = Series(field, n, list(base.chain))
        s1 = refine_series(s0, GeneratorSet(n1))
        for g in n1:
            assert in_stabilizer(g, s1)
        for g in n0:
            coarse = canonical_coarsening(g, s1)
            assert coarse.num_jumps <= s0.num_jumps


def test_mclain_examples():
    x = McLainElement(QQ, [((0, Fraction(1, 2)), 1)])
    m, flag = mclain_truncate([x])
    assert m == Mat(QQ, [[1, 1], [0, 1]]) and flag.num_jumps == 2
    y = McLainElement(QQ, [((Fraction(1, 2), 1), 1)])
    (mx, my), _ = mclain_matrices([x, y])
    assert commutator(mx, my) == Mat(QQ, [[1, 0, 1], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(McLainError):
        McLainElement(QQ, [((1, 0), 1)])
    with pytest.raises(McLainError):
        McLainElement(QQ, [((0, 1), 1), ((0, 1), 2)])


def test_mclain_product_exponent():
    rng = random.Random(4)
    for _ in range(10):
        field = rng.choice([F2, F7, QQ])
        elems = []
        pool = sorted({Fraction(n, d) for n in range(-4, 5) for d in (1, 2, 3)})
        for _ in range(rng.randint(1, 4)):
            a, b = sorted(rng.sample(pool, 2))
            coeff = 1 if field == F2 else field.coerce(rng.randint(1, 2))
            elems.append(McLainElement(field, [((a, b), coeff)]))
        prod, flag = mclain_truncate(elems)
        d = flag.ambient_dim
        assert unipotent_exponent(prod) is not None
        assert unipotent_exponent(prod) <= d
        assert in_stabilizer(prod, flag)
