import random
from fractions import Fraction

import pytest

from homwitt.matrices import (
    Matrix, block_diag, cokernel_invariants, column_span_basis, hstack,
    inverse, is_invertible, kernel_basis, smith_normal_form, solve_linear,
    solve_matrix, vstack,
)
from homwitt.rings import ring_make

Q = ring_make("q")
F5 = ring_make("fp:5")
ZH = ring_make("z-half")
Z3 = ring_make("zloc:3")


def mk(ring, data):
    return Matrix.make(ring, data)


def random_matrix(rng, ring, rows, cols, bound=9):
    return Matrix.make(ring, [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)])


def random_unimodular(rng, ring, n, ops=12):
    if n == 0:
        return Matrix.identity(ring, 0)
    m = Matrix.identity(ring, n)
    rows = [list(r) for r in m.entries]
    for _ in range(ops):
        kind = rng.randrange(3)
        i, j = rng.randrange(n), rng.randrange(n)
        if kind == 0 and i != j:
            c = rng.randint(-2, 2)
            rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
        elif kind == 1:
            rows[i], rows[j] = rows[j], rows[i]
        else:
            u = 2 if ring.kind in ("z-half",) else (rng.randrange(1, ring.p) if ring.kind == "fp" else -1)
            rows[i] = [ring.mul(ring.el(u), ring.el(a)) for a in rows[i]]
    return Matrix.make(ring, rows)


def check_decomposition(M):
    dec = smith_normal_form(M)
    assert dec.U @ M @ dec.V == dec.D
    assert (dec.U @ dec.U_inv).is_identity()
    assert (dec.V @ dec.V_inv).is_identity()
    ring = M.ring
    diag = dec.diagonal
    for i in range(M.rows):
        for j in range(M.cols):
            if i != j:
                assert dec.D[i, j] == ring.zero
    for a, b in zip(dec.invariant_factors, dec.invariant_factors[1:]):
        assert ring.divides(a, b)
    for f in dec.invariant_factors:
        assert ring.canonical_factor(f) == f
    # zeros trail the nonzero diagonal
    nz = [x for x in diag if x != ring.zero]
    assert list(diag[:len(nz)]) == nz
    return dec


def test_identity_over_f5():
    dec = check_decomposition(Matrix.identity(F5, 3))
    assert dec.invariant_factors == (1, 1, 1)


def test_diag_2_3_over_zhalf():
    # 2 is a unit, so elementary operations leave factors (1, 3)
    dec = check_decomposition(mk(ZH, [[2, 0], [0, 3]]))
    assert dec.invariant_factors == (Fraction(1), Fraction(3))


def test_diag_3_9_over_zloc3():
    dec = check_decomposition(mk(Z3, [[3, 0], [0, 9]]))
    assert dec.invariant_factors == (Fraction(3), Fraction(9))


def test_snf_with_denominators():
    dec = check_decomposition(mk(ZH, [[Fraction(3, 2), 1], [0, Fraction(5, 8)]]))
    assert dec.invariant_factors == (Fraction(1), Fraction(15))


def test_snf_already_canonical_diagonal_is_fixed():
    M = mk(ZH, [[3, 0], [0, 9]])
    dec = smith_normal_form(M)
    assert dec.U.is_identity() and dec.V.is_identity()


@pytest.mark.parametrize("ring", [Q, F5, ZH, Z3], ids=lambda r: r.descriptor)
def test_random_decompositions(ring):
    rng = random.Random(17)
    for _ in range(40):
        rows, cols = rng.randint(0, 5), rng.randint(0, 5)
        check_decomposition(random_matrix(rng, ring, rows, cols))


@pytest.mark.parametrize("ring", [F5, ZH, Z3], ids=lambda r: r.descriptor)
def test_invariant_factors_are_isomorphism_invariant(ring):
    rng = random.Random(5)
    for _ in range(25):
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        M = random_matrix(rng, ring, n, m)
        P = random_unimodular(rng, ring, n)
        Qm = random_unimodular(rng, ring, m)
        assert is_invertible(P) and is_invertible(Qm)
        assert smith_normal_form(P @ M @ Qm).invariant_factors == smith_normal_form(M).invariant_factors


def test_solve_examples():
    M = mk(Z3, [[3]])
    assert solve_linear(M, mk(Z3, [[3]])) == mk(Z3, [[1]])
    assert solve_linear(M, mk(Z3, [[1]])) is None
    MQ = mk(Q, [[3]])
    assert solve_linear(MQ, mk(Q, [[1]])) == mk(Q, [[Fraction(1, 3)]])
    # solvable over z-half because 2 is a unit
    assert solve_linear(mk(ZH, [[2]]), mk(ZH, [[1]])) == mk(ZH, [[Fraction(1, 2)]])


@pytest.mark.parametrize("ring", [Q, F5, ZH, Z3], ids=lambda r: r.descriptor)
def test_solve_random(ring):
    rng = random.Random(23)
    for _ in range(30):
        n, m, k = rng.randint(1, 4), rng.randint(1, 4), rng.randint(1, 2)
        M = random_matrix(rng, ring, n, m)
        X0 = random_matrix(rng, ring, m, k, bound=4)
        B = M @ X0
        X = solve_matrix(M, B)
        assert X is not None and M @ X == B
        # unsolvable certificates stay unsolvable
        B2 = random_matrix(rng, ring, n, k)
        X2 = solve_matrix(M, B2)
        if X2 is not None:
            assert M @ X2 == B2


def test_kernel_examples():
    K = kernel_basis(mk(F5, [[1, 1]]))
    assert K.cols == 1 and (mk(F5, [[1, 1]]) @ K).is_zero()
    # up to a unit the kernel is (1, -1)
    assert solve_matrix(K, mk(F5, [[1], [4]])) is not None

    K = kernel_basis(Matrix.zeros(ZH, 2, 2))
    assert K.cols == 2 and is_invertible(K)

    M = mk(Z3, [[3, 6]])
    K = kernel_basis(M)
    assert K.cols == 1 and (M @ K).is_zero()
    v = mk(Z3, [[2], [-1]])
    assert solve_matrix(K, v) is not None          # (2, -1) lies in the kernel span
    assert solve_matrix(v, K) is not None          # and spans it back


def test_kernel_of_zero_rows():
    M = Matrix.zeros(Q, 0, 3)
    assert kernel_basis(M).cols == 3


@pytest.mark.parametrize("ring", [Q, F5, ZH, Z3], ids=lambda r: r.descriptor)
def test_kernel_random(ring):
    rng = random.Random(31)
    for _ in range(25):
        M = random_matrix(rng, ring, rng.randint(0, 4), rng.randint(0, 4))
        K = kernel_basis(M)
        assert (M @ K).is_zero()
        # every kernel vector of a random combination is reproducible from K
        if K.cols:
            c = random_matrix(rng, ring, K.cols, 1, bound=3)
            assert solve_matrix(K, K @ c) is not None


def test_cokernel_examples():
    assert cokernel_invariants(mk(ZH, [[3]])) == (0, (Fraction(3),))
    assert cokernel_invariants(Matrix.zeros(ZH, 1, 1)) == (1, ())
    assert cokernel_invariants(mk(ZH, [[1]])) == (0, ())
    assert cokernel_invariants(mk(ZH, [[2]])) == (0, ())  # 2 is a unit


def test_column_span_basis():
    rng = random.Random(7)
    for ring in (ZH, Z3, F5):
        for _ in range(20):
            M = random_matrix(rng, ring, rng.randint(1, 4), rng.randint(0, 4))
            B = column_span_basis(M)
            # every column of M lies in the span of B and conversely
            if M.cols:
                assert solve_matrix(B, M) is not None
            if B.cols:
                assert solve_matrix(M, B) is not None
                assert kernel_basis(B).cols == 0


def test_inverse():
    rng = random.Random(3)
    for ring in (Q, F5, ZH, Z3):
        U = random_unimodular(rng, ring, 3)
        assert (U @ inverse(U)).is_identity()
    assert not is_invertible(mk(ZH, [[3]]))
    assert is_invertible(mk(ZH, [[2]]))


def test_stack_and_block():
    A = mk(Q, [[1, 2]])
    B = mk(Q, [[3, 4]])
    assert vstack(A, B) == mk(Q, [[1, 2], [3, 4]])
    assert hstack(A, B) == mk(Q, [[1, 2, 3, 4]])
    assert block_diag(A, B) == mk(Q, [[1, 2, 0, 0], [0, 0, 3, 4]])
