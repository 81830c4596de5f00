from fractions import Fraction

import numpy as np
import pytest
import sympy

from conftest import DIAG_NET, nonsingular_nets
from quadnets.dixon import (
    SectionRow,
    VMatrix,
    adjugate_row,
    complete_v_matrix,
    dixon_matrix,
    verify_roundtrip,
)
from quadnets.errors import NonzeroRemainder, NoSolution, SingularInput
from quadnets.forms import evaluate
from quadnets.polys import TernaryForm, eval_form
from quadnets.spectral import spectral_form


def sympy_adjugate_row(net, x):
    M = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in evaluate(net, x).entries])
    return list(M.adjugate().row(0))


def test_adjugate_row_matches_cofactor_oracle():
    net = nonsingular_nets(2, 1, seed=1)[0]
    row = adjugate_row(net, spectral_form(net))
    assert row.basis is None and all(f.d == 2 for f in row.forms)
    rng = np.random.default_rng(2)
    for _ in range(10):
        x = [int(v) for v in rng.integers(-6, 7, 3)]
        if any(x):
            assert [eval_form(f, x) for f in row.forms] == sympy_adjugate_row(net, x)


def test_adjugate_identity_at_random_points():
    net = nonsingular_nets(3, 1, seed=3)[0]
    U = spectral_form(net)
    row = adjugate_row(net, U)
    rng = np.random.default_rng(4)
    for _ in range(20):
        x = [Fraction(int(a), int(b)) for a, b in zip(rng.integers(-5, 6, 3), rng.integers(1, 5, 3))]
        if not any(x):
            continue
        Q = evaluate(net, x).entries
        a = [eval_form(f, x) for f in row.forms]
        # first row of adj(Q) times Q is U(x) e_1
        prod = [sum(a[k] * Q[k][j] for k in range(4)) for j in range(4)]
        assert prod == [eval_form(U, x), 0, 0, 0]


def test_diag_net_uses_basis_change():
    U = spectral_form(DIAG_NET)
    row = adjugate_row(DIAG_NET, U)
    assert row.basis is not None
    with pytest.raises(SingularInput):
        verify_roundtrip(DIAG_NET)


@pytest.mark.parametrize("N,seed", [(2, 10), (2, 11), (3, 12)])
def test_roundtrip_identities_are_exact(N, seed):
    net = nonsingular_nets(N, 1, seed=seed)[0]
    U = spectral_form(net)
    row = adjugate_row(net, U)
    vm = complete_v_matrix(row, U)
    d = N + 1
    for r in range(d):
        for s in range(d):
            assert vm.v[r][s] == vm.v[s][r]
    for (r, s), w in vm.w.items():
        assert vm.v[0][r] * vm.v[0][s] - (vm.v[0][0] * vm.v[r][s] - U * w) == TernaryForm(2 * d - 2, {})
    lm = dixon_matrix(vm, U)
    assert lm.c != 0 and all(b.d == 1 for row_ in lm.beta for b in row_)


def test_roundtrip_recovers_the_net():
    for net in nonsingular_nets(3, 2, seed=14):
        rep = verify_roundtrip(net)
        assert rep.identities_ok and rep.recovers_net and rep.c == 1


def test_different_nodes_same_beta():
    net = nonsingular_nets(2, 1, seed=15)[0]
    a, b = verify_roundtrip(net, seed=0), verify_roundtrip(net, seed=7)
    assert a.beta.beta == b.beta.beta


def test_row_violating_mod_U_condition():
    net = nonsingular_nets(2, 1, seed=16)[0]
    U = spectral_form(net)
    row = adjugate_row(net, U)
    bad = list(row.forms)
    bad[1] = bad[1] + TernaryForm(2, {(0, 2, 0): 1})
    with pytest.raises(NoSolution):
        complete_v_matrix(SectionRow(row.d, bad, row.basis), U)


def test_perturbed_v_matrix_has_remainder():
    net = nonsingular_nets(2, 1, seed=17)[0]
    U = spectral_form(net)
    vm = complete_v_matrix(adjugate_row(net, U), U)
    v = [list(r) for r in vm.v]
    v[1][2] = v[2][1] = v[1][2] + TernaryForm(2, {(1, 1, 0): 1})
    with pytest.raises(NonzeroRemainder):
        dixon_matrix(VMatrix(vm.d, v, vm.w), U)
