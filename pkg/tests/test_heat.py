"""Heat coefficients: the symbolic endomorphism derivations, coefficient
formulas, lower-volume constants, and spectral moments."""

import math
from fractions import Fraction

import pytest

from wres.clifford import AlgebraSignature
from wres.heat import (
    CurvatureData,
    a4_boundary_bracket,
    boundary_coeffs,
    endomorphism_traces,
    interior_a4_bracket_coefficients,
    interior_coeffs,
    lichnerowicz_E,
    lower_volume,
    omega_squared_trace,
    rfperp_norm_sq,
    spectral_moments,
    v_nk,
    v_nk_numeric,
    wres_power,
)
from wres.symbolic import ScalarPoly, UnitValue


@pytest.mark.parametrize("p,q", [(2, 2), (1, 2), (2, 3), (3, 2)])
def test_endomorphism_traces(p, q):
    tr = endomorphism_traces(AlgebraSignature(p, q))
    assert tr["tr_E"] == tr["tr_E_expected"]
    assert tr["tr_E2"] == tr["tr_E2_expected"]


def test_endomorphism_flat_case():
    sig = AlgebraSignature(2, 2)
    minus_e = lichnerowicz_E(sig)
    zeroed = minus_e
    for s in sorted({n for c in minus_e.terms.values() for n in c.symbols()}):
        zeroed = zeroed.map_coeffs(lambda c, s=s: c.subs(s, ScalarPoly.zero()))
    assert zeroed.is_zero()


def test_omega_squared_trace():
    res = omega_squared_trace(4, 2)
    assert res["tr_Omega2"] == res["tr_Omega2_expected"]


def test_interior_bracket_coefficients():
    got = interior_a4_bracket_coefficients()
    assert got == {"r2": Fraction(5, 4), "ric2": Fraction(-2),
                   "riem2": Fraction(-7, 4), "rfperp2": Fraction(15, 2)}


def test_interior_coefficient_prefactors():
    # dimension 6, trace dimension 16: a2 = -1/(48 pi^3), a0 = 1/(4 pi^3)
    hc = interior_coeffs(None, CurvatureData(r=1, vol=1), n=6, total_dim=16)
    assert hc.a2 == UnitValue(Fraction(-1, 48), {"pi": Fraction(-3)})
    assert hc.a0 == UnitValue(Fraction(1, 4), {"pi": Fraction(-3)})
    assert hc.a1.is_zero() and hc.a3.is_zero()
    flat = interior_coeffs(None, CurvatureData(vol=2), n=4, total_dim=8)
    assert flat.a2.is_zero() and flat.a4.is_zero()
    assert flat.a0 == UnitValue(1, {"pi": Fraction(-2)})


def test_interior_a4_value():
    data = CurvatureData(r2=1, ric2=1, riem2=1, rfperp2=1, vol=1)
    hc = interior_coeffs(None, data, n=4, total_dim=8)
    want = Fraction(5, 4) - 2 - Fraction(7, 4) + Fraction(15, 2)
    assert hc.a4 == UnitValue(Fraction(8, 360) * want * Fraction(1, 16),
                              {"pi": Fraction(-2)})


def test_boundary_reduces_to_interior():
    data = CurvatureData(r=2, r2=4, vol=3)
    b = boundary_coeffs(None, data, n=4, total_dim=8)
    i = interior_coeffs(None, data, n=4, total_dim=8)
    assert (b.a0, b.a2, b.a4) == (i.a0, i.a2, i.a4)
    assert b.a1.is_zero() and b.a3.is_zero()


def test_boundary_a2_form():
    # a2 = pref/12 (-int r + 4 int L_aa)
    data = CurvatureData(r=1, vol=1, L_aa=1, bvol=1)
    hc = boundary_coeffs(None, data, n=4, total_dim=8)
    pref = Fraction(8, 16)  # T (4pi)^{-2} without the pi part
    assert hc.a2 == UnitValue(pref * Fraction(3, 12), {"pi": Fraction(-2)})


def test_boundary_a1_and_a3_factors():
    data = CurvatureData(vol=0, bvol=1, r_bd=1, R_aNaN=1, L2_aabb=1, L2_abab=1)
    hc = boundary_coeffs(None, data, n=4, total_dim=8)
    # a1 = -(1/4) (4 pi)^{-3/2} T bvol
    assert hc.a1 == UnitValue(-2, {"2": Fraction(-3), "pi": Fraction(-3, 2)})
    # a3 bracket: -8 r + 8 R_aNaN + 7 L_aa L_bb - 10 L_ab L_ab = -3 here
    assert hc.a3 == UnitValue(Fraction(8, 384) * 3, {"2": Fraction(-3), "pi": Fraction(-3, 2)})


def test_a4_boundary_bracket_variants():
    data = CurvatureData(r_N=1)
    assert a4_boundary_bracket(data, printed=True) == Fraction(-51)
    assert a4_boundary_bracket(data, printed=False) == Fraction(12)
    # every non-r_N term agrees between the two variants
    data2 = CurvatureData(r_L_aa=1, R_aNaN_L_bb=1, R_aNbN_L_ab=1, R_abcb_L_ac=1,
                          L_aa_bb=1, L3_aabbcc=1, L3_ababcc=1, L3_abbcac=1)
    assert a4_boundary_bracket(data2, True) == a4_boundary_bracket(data2, False)


def test_curvature_data_mapping_guard():
    with pytest.raises(KeyError):
        CurvatureData.from_mapping({"nope": 1})


def test_v_constants():
    assert v_nk(4, 2) == UnitValue(Fraction(1, 4), {"2": Fraction(1, 2), "pi": Fraction(-1)})
    assert abs(v_nk(4, 2).numeric().real - 1 / (2 * math.pi * math.sqrt(2))) < 1e-15
    assert v_nk(5, 2).is_zero()
    assert v_nk(6, 3).is_zero()
    # odd/odd case against the float evaluation of the defining formula
    for n, k in ((5, 1), (5, 3), (7, 3), (4, 4), (6, 2)):
        if (n - k) % 2 == 0:
            assert abs(v_nk(n, k).numeric().real - v_nk_numeric(n, k)) <= 1e-12
    with pytest.raises(ValueError):
        v_nk(4, 5)


def test_lower_volume_composition():
    # v_{4,2} * a_2 for the dim-4 residue: -sqrt(2)/96 * pi^{-3} per unit integral
    lv = lower_volume(AlgebraSignature(2, 2), 4, 2, CurvatureData(r=1, vol=1))
    assert lv.value == UnitValue(Fraction(-1, 96), {"2": Fraction(1, 2), "pi": Fraction(-3)})
    assert not lv.parity_zero
    assert lower_volume(None, 6, 3, CurvatureData(), total_dim=8).parity_zero
    top = lower_volume(AlgebraSignature(2, 2), 4, 4, CurvatureData(vol=1))
    assert top.value == v_nk(4, 4) * UnitValue(Fraction(8, 16), {"pi": Fraction(-2)})


def test_wres_power():
    # symbolic trace dimension: -T/(6 (4 pi)^3) = -T/(384 pi^3)
    assert wres_power(6) == UnitValue(Fraction(-1, 384),
                                      {"pi": Fraction(-3), "l~2^q": Fraction(1)})
    # classical spin reduction in dimension 4: T = 4 gives -1/(24 pi^2)
    spin = wres_power(4, AlgebraSignature(4, 0).total_dim)
    assert spin == UnitValue(Fraction(-1, 24), {"pi": Fraction(-2)})
    assert wres_power(4, 8) == UnitValue(Fraction(-1, 12), {"pi": Fraction(-2)})
    with pytest.raises(ValueError):
        wres_power(5)


def test_spectral_moments_gamma_cutoff():
    ms = spectral_moments(lambda s: math.exp(-s))
    for k in (1, 2, 3, 4):
        assert abs(ms[k] - 1.0) <= 1e-10
    assert ms[0] == 1.0


def test_spectral_moments_indicator():
    ms = spectral_moments(lambda s: 1.0 if s <= 1 else 0.0, upper=1.0)
    assert abs(ms[4] - 0.5) <= 1e-9          # (1/Gamma(2)) * int_0^1 s ds
    assert abs(ms[2] - 1.0) <= 1e-9
    assert abs(ms[1] - 2.0 / math.sqrt(math.pi) * 1.0) <= 1e-9


@pytest.mark.filterwarnings("ignore::UserWarning", "ignore:The maximum number")
def test_spectral_moments_divergent_tail():
    with pytest.raises(ValueError):
        spectral_moments(lambda s: 1.0 / (1.0 + s))


def test_rfperp_matches_trace_identity_shape():
    sig = AlgebraSignature(2, 2)
    poly = rfperp_norm_sq(sig)
    assert not poly.is_zero()
    assert all(name.startswith("R") for name in poly.symbols())
