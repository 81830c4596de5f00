from fractions import Fraction

import numpy as np
import pytest
import sympy

from conftest import DIAG_NET
from quadnets.errors import DegenerateInput, InputError
from quadnets.forms import Net, SymmetricForm, corank, dump_net, evaluate, inertia, load_net, random_net


def sturm_inertia(Q: SymmetricForm):
    """Eigenvalue sign counts from Sturm sequences of the characteristic polynomial."""
    lam = sympy.Symbol("lam")
    p = sympy.Poly(sympy.Matrix(Q.entries).charpoly(lam).as_expr(), lam)
    zero = 0
    while p.eval(0) == 0:
        zero += 1
        p = sympy.Poly(sympy.quo(p.as_expr(), lam), lam)
    pos = p.count_roots(0, None)
    neg = p.count_roots(None, 0)
    return pos, zero, neg


def test_evaluate_diag_net_at_ones_is_identity():
    Q = evaluate(DIAG_NET, (1, 1, 1))
    assert Q.entries == tuple(tuple(Fraction(int(i == j)) for j in range(3)) for i in range(3))


def test_evaluate_basis_vector_returns_member():
    net = random_net(3, np.random.default_rng(4))
    assert evaluate(net, (1, 0, 0)) == net.members[0]


def test_evaluate_matches_entrywise_sum():
    net = random_net(4, np.random.default_rng(5))
    x = (Fraction(1), Fraction(2), Fraction(3))
    Q = evaluate(net, x)
    for i in range(5):
        for j in range(5):
            assert Q[i, j] == sum(xk * m.entries[i][j] for xk, m in zip(x, net.members))


def test_evaluate_rejects_zero_vector():
    with pytest.raises(InputError):
        evaluate(DIAG_NET, (0, 0, 0))


@pytest.mark.parametrize("rows,expected", [
    ([[1, 0, 0], [0, -1, 0], [0, 0, 0]], (1, 1, 1)),
    ([[0, 1], [1, 0]], (1, 0, 1)),
    ([[0, 0], [0, 0]], (0, 2, 0)),
])
def test_inertia_small_cases(rows, expected):
    assert tuple(inertia(SymmetricForm(rows))) == expected


@pytest.mark.parametrize("seed", range(6))
def test_inertia_matches_sturm_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    A = rng.integers(-4, 5, size=(6, 6))
    B = rng.integers(1, 4, size=(6, 6))
    rows = [[Fraction(int(A[min(i, j), max(i, j)]), int(B[min(i, j), max(i, j)])) for j in range(6)] for i in range(6)]
    if seed % 2:
        # force a kernel: last row is a combination of the first two
        rows = [r[:5] for r in rows[:5]]
        S = [[Fraction(int(i == j)) for j in range(5)] for i in range(6)]
        S[5] = [Fraction(1), Fraction(-2), 0, 0, 0]
        rows = SymmetricForm(rows).congruent([list(r) for r in zip(*S)]).entries
    Q = SymmetricForm(rows)
    inert = inertia(Q)
    assert (inert.positive, inert.zero, inert.negative) == sturm_inertia(Q)


def test_sylvester_invariance_and_negation():
    rng = np.random.default_rng(7)
    for _ in range(10):
        A = np.triu(rng.integers(-3, 4, (5, 5)))
        Q = SymmetricForm((A + np.triu(A, 1).T).tolist())
        while True:
            S = rng.integers(-2, 3, (5, 5))
            if round(np.linalg.det(S)) != 0:
                break
        a = inertia(Q)
        assert inertia(Q.congruent(S.tolist())) == a
        b = inertia(-Q)
        assert (b.positive, b.zero, b.negative) == (a.negative, a.zero, a.positive)


def test_corank_examples():
    assert corank(SymmetricForm([[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == 0
    assert corank(SymmetricForm([[1, 0, 0], [0, 0, 0], [0, 0, 0]])) == 2
    assert corank(evaluate(DIAG_NET, (1, 1, 0))) == 1


def test_corank_is_even_in_x():
    net = random_net(3, np.random.default_rng(8))
    for x in [(1, 2, -1), (0, 1, 3), (2, -5, 1)]:
        assert corank(evaluate(net, x)) == corank(evaluate(net, [-v for v in x]))


def test_net_json_roundtrip_is_bit_exact(tmp_path):
    net = Net((
        [["1/3", 2, 0], [2, "-7/5", 1], [0, 1, 0]],
        [[0, 0, 1], [0, 1, 0], [1, 0, 0]],
        [[1, 0, 0], [0, 0, 0], [0, 0, "-2/9"]],
    ))
    path = tmp_path / "net.json"
    dump_net(net, path)
    text = path.read_text()
    again = load_net(path)
    assert again == net
    dump_net(again, path)
    assert path.read_text() == text


def test_dependent_members_rejected():
    with pytest.raises(DegenerateInput):
        Net(([[1, 0], [0, 1]], [[1, 0], [0, 1]], [[0, 1], [1, 0]]))


def test_asymmetric_matrix_rejected():
    with pytest.raises(InputError):
        SymmetricForm([[1, 2], [3, 4]])
