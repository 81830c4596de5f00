from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from conftest import DIAG_NET, ODD_NET, low_index_net, nonsingular_nets
from quadnets.errors import InvariantViolation
from quadnets.forms import Net, inertia, evaluate
from quadnets.index import (
    IndexMap,
    chi_Lplus,
    check_e2_patterns,
    deep_nest_witness,
    e2_table,
    filtration,
    index_map,
    index_orientation,
    inner_index_violations,
    predict_b0,
    verify_axioms,
)
from quadnets.polys import TernaryForm
from quadnets.spectral import spectral_form
from quadnets.topology.curve import curve_topology, lift_to_sphere

CONIC_NET = Net(([[1, 0], [0, 1]], [[1, 0], [0, -1]], [[0, 1], [1, 0]]))


def pipeline(net):
    U = spectral_form(net)
    topo = curve_topology(U)
    arr = lift_to_sphere(topo, U)
    imap = index_map(net, arr)
    filt = filtration(imap, arr)
    return topo, arr, imap, filt


def test_definite_points_of_diag_net():
    assert inertia(evaluate(DIAG_NET, (1, 1, 1))).negative == 0
    assert inertia(evaluate(DIAG_NET, (-1, -1, -1))).negative == 3


def test_definite_member_net_short_circuits():
    net = Net((
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        [[1, 2, 0, 0], [2, -1, 1, 0], [0, 1, 0, 3], [0, 0, 3, 2]],
        [[0, 1, 1, 0], [1, 2, 0, -1], [1, 0, -3, 1], [0, -1, 1, 1]],
    ))
    topo, arr, imap, filt = pipeline(net)
    assert imap.i_min == 0 and imap.i_max == 4
    assert imap.values[[r.id for r in arr.regions if inertia(evaluate(net, r.sample)).negative == 0][0]] == 0
    rep = predict_b0(imap, arr, topo, filt)
    assert rep.case == "definite_member" and (rep.b0_lower, rep.b0_upper) == (0, 0)


def test_conic_spectral_net_filtration_hand_count():
    topo, arr, imap, filt = pipeline(CONIC_NET)
    assert sorted(imap.values) == [0, 1, 2]
    assert [filt.betti(i) for i in range(-1, 3)] == [(0, 0, 0), (1, 0, 0), (1, 0, 0), (1, 0, 1)]
    orient = index_orientation(imap, arr)
    assert orient.consistent and orient.nested_pairs == []


@pytest.mark.parametrize("N", [3, 4, 5, 6])
def test_axioms_on_random_nets(N):
    for net in nonsingular_nets(N, 3, seed=60 + N):
        topo, arr, imap, filt = pipeline(net)
        rep = verify_axioms(imap, arr, net)
        assert rep.ok and rep.checked["semicontinuity"] == len(arr.circles)
        assert inner_index_violations(imap, arr) == []
        e2 = e2_table(filt, imap.i_max)
        assert check_e2_patterns(e2)
        deep_nest_witness(imap, arr, filt)
        assert index_orientation(imap, arr).consistent


def test_jump_of_two_rejected():
    topo, arr, imap, _ = pipeline(nonsingular_nets(3, 1, seed=70)[0])
    c = arr.circles[0]
    values = list(imap.values)
    values[c.inner] = values[c.outer] + 2
    bad = replace(imap, values=values)
    rep = verify_axioms(bad, arr, strict=False)
    assert not rep.ok
    with pytest.raises(InvariantViolation):
        verify_axioms(bad, arr)


def test_tropical_regions_in_omega_N_minus_2():
    for net in nonsingular_nets(5, 3, seed=80):
        topo, arr, imap, filt = pipeline(net)
        omega = set(filt.levels[5 - 2 + 1].regions)  # levels[0] is Omega_{-1}
        assert set(arr.tropical) <= omega


def test_low_index_net_has_upper_bound_one():
    net = low_index_net()
    topo, arr, imap, filt = pipeline(net)
    assert imap.attained() == [3, 4] and imap.i_max == net.N - 2
    e2 = e2_table(filt, imap.i_max)
    N, i_max = net.N, imap.i_max
    for q in range(N - i_max + 1):
        assert e2.dims[q] == [1, 0, 1]
    for q in range(i_max, N + 2):
        assert e2.dims[q] == [0, 0, 0]
    rep = predict_b0(imap, arr, topo, filt, e2)
    assert rep.case == "imax_small" and rep.b0_upper == 1


def test_e2_pattern_violation_rejected():
    from quadnets.index import E2Table

    with pytest.raises(InvariantViolation):
        check_e2_patterns(E2Table(3, 2, [[1, 1, 1], [1, 0, 0], [0, 0, 0], [0, 0, 0], [0, 0, 0]]))


def _exceptional_map(arr):
    """ind = 3 inside one lift of the outer oval and 2 inside its child; antipodal values follow."""
    outer = next(c for c in arr.oval_circles() if c.depth == 1)
    inner = next(c for c in arr.oval_circles() if c.parent == outer.id)
    values = [2] * len(arr.regions)
    values[outer.inner] = 3
    values[inner.inner] = 2
    values[arr.circles[outer.antipode].inner] = 1
    values[arr.circles[inner.antipode].inner] = 2
    inner_idx = {c.id: values[c.inner] for c in arr.oval_circles()}
    return IndexMap(3, values, inner_idx, arr)


def test_exceptional_nest_index_data():
    U = TernaryForm(2, {(2, 0, 0): 1, (0, 2, 0): 2, (0, 0, 2): -1}) * TernaryForm(
        2, {(2, 0, 0): 2, (0, 2, 0): 1, (0, 0, 2): -4}) + TernaryForm(4, {(0, 0, 4): Fraction(1, 100)})
    topo = curve_topology(U)
    arr = lift_to_sphere(topo, U)
    imap = _exceptional_map(arr)
    assert verify_axioms(imap, arr).ok
    rep = predict_b0(imap, arr, topo)
    assert rep.case == "exceptional_nest"
    assert rep.lemma_bounds == (1, 1)
    assert "exceptional_nest_at_N3" in rep.flags


def test_chi_matches_point_count_at_N3():
    from quadnets.oracle.zerodim import solve_zero_dim

    for net in nonsingular_nets(3, 3, seed=90):
        topo, arr, imap, filt = pipeline(net)
        assert chi_Lplus(e2_table(filt, imap.i_max)) == solve_zero_dim(net.matrices_float()).count


def test_odd_net_attains_middle_values_only():
    topo, arr, imap, _ = pipeline(ODD_NET)
    assert imap.attained() == [1, 2]
