import cmath
import math

import pytest

import tractdyn as td


def test_polynomial_and_preimages():
    p = td.Polynomial("z^2-1")
    assert p.degree == 2
    for z in td.preimages(p, 3 + 1j):
        assert abs(p(z) - (3 + 1j)) < 1e-10


def test_tree_pressure_of_z2():
    p = td.Polynomial("z^2")
    assert abs(td.tree_pressure(p, 0.5, 2.0, 12) - 0.5 * math.log(2)) < 1e-3
    assert abs(td.bowen_zero_poly(p, 12) - 1.0) < 0.01


def test_linearizer_and_boettcher():
    f = td.KoenigsLinearizer(td.Polynomial("z^2"), 1.0)
    assert abs(f(0.3 + 1.2j) - cmath.exp(0.3 + 1.2j)) < 1e-9
    h = td.BottcherMap(td.Polynomial("z^2-2"))
    z = 1.5 + 0.5j
    assert abs(h(z) - (z + 1 / z)) < 1e-8


def test_transfer_closed_form():
    atlas = td.Atlas("exp")
    s = atlas.transfer(2.0, math.exp(2.0))
    assert abs(s["value"] - 1 / math.tanh(1.0) / 4) < 1e-6
    assert len(atlas.tracts) == 1
    assert abs(atlas.tracts[0].phi(3 + 1j) - (3 + 1j)) < 1e-9


def test_errors_carry_their_kind():
    atlas = td.Atlas("exp")
    with pytest.raises(td.TractdynError) as e:
        atlas.transfer(0.5, math.exp(2.0))
    assert e.value.args[0] == "DivergenceDetected"


def test_spectrum_of_exp():
    atlas = td.Atlas("exp")
    c = atlas.spectrum([0.0, 1.0, 2.0], j_max=8)
    assert abs(c["beta_inf"][1]) < 1e-6
    assert abs(c["theta_hat"] - 1.0) < 0.05


def test_boundary_is_closed():
    pts = td.Atlas("exp").tracts[0].boundary(5.0, 64)
    assert len(pts) == 65
    assert pts[0] == pts[-1]


def test_verify_subset():
    ok, report = td.verify([1, 6])
    assert ok
    assert report.splitlines()[-1].startswith("PASS [13]")
