from fractions import Fraction

import numpy as np
import pytest

from conftest import ODD_NET, nonsingular_nets
from quadnets.errors import InvariantViolation, SingularInput
from quadnets.polys import TernaryForm, linear
from quadnets.spectral import spectral_form
from quadnets.topology.curve import CurveTopology, Oval, check_bezout, curve_topology, lift_to_sphere, nest_queries

CONIC = TernaryForm(2, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): -1})


def circle(r2):
    return TernaryForm(2, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): -Fraction(r2)})


def nested_quartic():
    # (x^2 + y^2 - 1)(x^2 + y^2 - 2) + 1/100
    return circle(1) * circle(2) + TernaryForm(4, {(0, 0, 4): Fraction(1, 100)})


def ellipse(a, b):
    return TernaryForm(2, {(2, 0, 0): a, (0, 2, 0): b, (0, 0, 2): -1})


def four_ovals():
    # two crossing ellipses smoothed outwards: four empty ovals
    return ellipse(1, 4) * ellipse(4, 1) + TernaryForm(4, {(0, 0, 4): Fraction(1, 50)})


def nested_ellipses():
    # two nested ellipses meet only at four non-real points, so the smoothing is nonsingular
    return ellipse(1, 2) * TernaryForm(2, {(2, 0, 0): 2, (0, 2, 0): 1, (0, 0, 2): -4}) + TernaryForm(
        4, {(0, 0, 4): Fraction(1, 100)})


def test_conic_one_oval():
    topo = curve_topology(CONIC)
    assert [o.depth for o in topo.ovals] == [1]
    assert not topo.has_one_sided


def test_nested_circles_form_a_nest_of_depth_two():
    # concentric circles share the circular points at infinity: singular over C, smooth over R
    U = nested_quartic()
    with pytest.raises(SingularInput):
        curve_topology(U)
    topo = curve_topology(U, certify=False)
    assert topo.depth_counts() == {1: 1, 2: 1}
    assert nest_queries(topo)["beta"] == 1


def test_nested_ellipses_form_a_nest_of_depth_two():
    topo = curve_topology(nested_ellipses())
    assert topo.depth_counts() == {1: 1, 2: 1}
    assert nest_queries(topo)["beta"] == 1
    assert check_bezout(topo)


def test_smoothed_ellipses_give_four_empty_ovals():
    topo = curve_topology(four_ovals())
    assert topo.depth_counts() == {1: 4}


def test_singular_curve_rejected():
    with pytest.raises(SingularInput):
        curve_topology(TernaryForm(3, {(1, 1, 1): 1}))


def test_conic_lift_has_three_regions():
    topo = curve_topology(CONIC)
    arr = lift_to_sphere(topo, CONIC)
    assert len(arr.oval_circles()) == 2
    assert len(arr.regions) == 3
    assert arr.euler == 2
    caps = [r for r in arr.regions if r.antipode != r.id]
    assert len(caps) == 2


def test_pseudoline_lift():
    U = spectral_form(ODD_NET)
    topo = curve_topology(U)
    assert topo.has_one_sided and not topo.ovals
    arr = lift_to_sphere(topo, U)
    assert arr.equator is not None
    assert len(arr.regions) == 2 and len(arr.tropical) == 2
    assert arr.regions[0].antipode == 1


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_random_arrangements(N):
    for net in nonsingular_nets(N, 3, seed=40 + N):
        U = spectral_form(net)
        topo = curve_topology(U)
        arr = lift_to_sphere(topo, U)
        d = N + 1
        assert arr.euler == 2
        assert len(topo.ovals) <= (d - 1) * (d - 2) // 2 + 1
        assert topo.has_one_sided == (d % 2 == 1)
        assert check_bezout(topo)
        # involution: fixed-point free on regions, each oval has two exchanged lifts
        assert all(arr.regions[r.antipode].antipode == r.id for r in arr.regions)
        assert all(r.antipode != r.id or r.tropical for r in arr.regions)
        assert len(arr.oval_circles()) == 2 * len(topo.ovals)
        for c in arr.circles:
            assert arr.circles[c.antipode].antipode == c.id
            assert (c.antipode == c.id) == (c.kind == "equator")
        # strictly order preserving on the oval forest
        for c in arr.oval_circles():
            if c.parent is not None:
                assert arr.circles[c.antipode].parent == arr.circles[c.parent].antipode


def test_chart_independence():
    for net in nonsingular_nets(4, 3, seed=50):
        U = spectral_form(net)
        shapes = {curve_topology(U, chart_start=k).shape() for k in (0, 3, 7)}
        assert len(shapes) == 1


def test_transformed_curve_has_same_forest():
    U = four_ovals()
    V = U.transform([[1, 1, 0], [0, 1, 2], [1, 0, 3]])
    assert curve_topology(V).shape() == curve_topology(U).shape()


def test_bezout_rejects_nonempty_oval_outside_submaximal_nest():
    # degree 6: nests o0 > o1 and o2 > o3 both of depth 2 = D_max - 1
    ovals = [Oval(0, None, 1), Oval(1, 0, 2), Oval(2, None, 1), Oval(3, 2, 2)]
    with pytest.raises(InvariantViolation):
        check_bezout(CurveTopology(6, ovals, False))


def test_bezout_rejects_maximal_nest_with_extra_oval():
    ovals = [Oval(0, None, 1), Oval(1, 0, 2), Oval(2, None, 1)]
    with pytest.raises(InvariantViolation):
        check_bezout(CurveTopology(4, ovals, False))


def test_nest_queries_conic_beta_zero():
    assert nest_queries(curve_topology(CONIC))["beta"] == 0


def test_line_has_only_one_sided_component():
    topo = curve_topology(linear(1, 2, 3), certify=False)
    assert topo.has_one_sided and not topo.ovals
