import math

import numpy as np
import pytest

from isodamp import carlson, lti
from isodamp.carlson import FoStage, alpha_from_order, order_from_alpha
from isodamp.poly import Polynomial


def numeric_phase_extremum(g, w_lo=1e-3, w_hi=1e3):
    """Oracle: locate the zero of d(phase)/dw by dense scan + refinement."""
    ws = np.geomspace(w_lo, w_hi, 200001)
    ph = np.unwrap(np.angle(lti.freq_response_grid(g, ws)))
    i = int(np.argmax(np.abs(ph)))
    return ws[i]


def test_alpha_from_order_paper_values():
    assert alpha_from_order(1 / 3) == pytest.approx(0.5, rel=1e-12)
    assert alpha_from_order(-0.5) == pytest.approx(3.0, rel=1e-12)


def test_alpha_from_order_limit_and_errors():
    assert alpha_from_order(1e-9) == pytest.approx(1.0, abs=1e-8)
    for bad in (0.0, 1.0, -1.0, 1.5):
        with pytest.raises(ValueError):
            alpha_from_order(bad)


def test_order_alpha_round_trip():
    for q in [s * v for v in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9) for s in (1, -1)]:
        assert order_from_alpha(alpha_from_order(q)) == pytest.approx(q, rel=1e-12)


def test_realize_plain_stage():
    st = FoStage.from_alpha(carlson.DIFFERINTEGRATOR, 0.5)
    g = carlson.realize_first_order(st)
    assert g.num.coeffs == (1.0, 0.5)
    assert g.den.coeffs == (0.5, 1.0)
    assert g.delay == 0.0


def test_realize_shifted_sum():
    st = FoStage.from_alpha(carlson.SHIFTED_SUM, 3.0, a=1.0)
    g = carlson.realize_first_order(st)
    assert g.num.coeffs == pytest.approx((4.0, 4.0))
    assert g.den.coeffs == pytest.approx((3.0, 1.0))


def test_realize_shifted_pow():
    st = FoStage.from_alpha(carlson.SHIFTED_POW, 3.0, a=1.0)
    g = carlson.realize_first_order(st)
    assert g.num.coeffs == pytest.approx((1.0, 4.0))
    assert g.den.coeffs == pytest.approx((3.0, 4.0))


def test_peak_frequency_degenerate_shift():
    st = FoStage.from_alpha(carlson.SHIFTED_SUM, 2.7, a=0.0)
    assert carlson.peak_frequency(st) == pytest.approx(1.0, rel=1e-12)


def test_peak_frequency_against_numeric_extremum():
    ss = FoStage.from_alpha(carlson.SHIFTED_SUM, 3.0, a=1.0)
    assert carlson.peak_frequency(ss) == pytest.approx(math.sqrt(1 / 3), rel=1e-12)
    assert carlson.peak_frequency(ss) == pytest.approx(
        numeric_phase_extremum(carlson.realize_first_order(ss)), rel=1e-3)
    sp_ = FoStage.from_alpha(carlson.SHIFTED_POW, 3.0, a=1.0)
    assert carlson.peak_frequency(sp_) == pytest.approx(math.sqrt(16 / 3), rel=1e-12)
    assert carlson.peak_frequency(sp_) == pytest.approx(
        numeric_phase_extremum(carlson.realize_first_order(sp_)), rel=1e-3)


def test_peak_frequency_wrong_kind():
    st = FoStage.from_alpha(carlson.DIFFERINTEGRATOR, 0.5)
    with pytest.raises(ValueError):
        carlson.peak_frequency(st)


def test_phase_extremum_consistency_grid():
    # formula vs realized-TF extremum across the full (alpha, a) grid, 2%
    for kind in (carlson.SHIFTED_SUM, carlson.SHIFTED_POW):
        for alpha in (0.2, 0.5, 2.0, 5.0):
            for a in (0.0, 0.5, 1.0, 5.0):
                if kind == carlson.SHIFTED_POW and a == 0.0:
                    continue  # degenerates to the plain stage
                st = FoStage.from_alpha(kind, alpha, a=a)
                wr = carlson.peak_frequency(st)
                oracle = numeric_phase_extremum(carlson.realize_first_order(st))
                assert wr == pytest.approx(oracle, rel=0.02)


def test_phase_boost_values():
    unity_ish = FoStage(carlson.SHIFTED_POW, 0.0, 1.0, 1.0, 1.0)
    for w in (0.3, 1.0, 8.0):
        assert carlson.phase_boost(unity_ish, w) == 0.0

    lag = FoStage.from_alpha(carlson.SHIFTED_POW, 3.0, a=1.0)
    wr = carlson.peak_frequency(lag)
    assert carlson.phase_boost(lag, wr) == pytest.approx(-30.0, abs=1e-9)

    # reciprocal-alpha symmetry: phi(1/alpha, w) = -phi(alpha, w); the a = 1
    # center is the same 2.3094 rad/s for alpha and 1/alpha
    lead = FoStage.from_alpha(carlson.SHIFTED_POW, 1 / 3, a=1.0)
    assert carlson.peak_frequency(lead) == pytest.approx(wr, rel=1e-12)
    assert carlson.phase_boost(lead, wr) == pytest.approx(30.0, abs=1e-9)


def test_phase_sign_convention():
    # differentiator stage (alpha < 1) boosts phase at w = 1, integrator droops
    lead = carlson.realize_first_order(FoStage.from_alpha(carlson.DIFFERINTEGRATOR, 0.5))
    lag = carlson.realize_first_order(FoStage.from_alpha(carlson.DIFFERINTEGRATOR, 2.0))
    assert np.angle(lti.freq_response(lead, 1.0)) > 0
    assert np.angle(lti.freq_response(lag, 1.0)) < 0


def test_unit_magnitude_at_unity_frequency():
    for alpha in (0.1, 0.5, 1.0, 3.0, 42.0):
        num = abs(complex(1j + alpha))
        den = abs(complex(alpha * 1j + 1))
        assert abs(num / den - 1.0) <= 1e-15


def test_carlson_first_iteration_is_printed_form():
    g = carlson.carlson_iterate(Polynomial([1]), Polynomial([1, 0]), 2, 1, 1)
    # (s+3)/(3s+1) normalized by the denominator leading coefficient
    assert g.num.monic().coeffs == pytest.approx((1.0, 3.0), rel=1e-14)
    assert g.den.monic().coeffs == pytest.approx((1.0, 1 / 3), rel=1e-14)


def test_carlson_fixed_point_at_unity():
    for p, m in ((2, 1), (3, 1), (3, 2)):
        g = carlson.carlson_iterate(Polynomial([1]), Polynomial([1]), p, m, 3)
        assert g.num.coeffs == pytest.approx(g.den.coeffs)
        assert g.num(7.7) / g.den(7.7) == pytest.approx(1.0, rel=1e-12)


def test_carlson_second_iteration_matches_cas_oracle():
    import sympy as sp

    s = sp.symbols("s")
    H = sp.Integer(1)
    G = 1 / s
    for _ in range(2):
        H = sp.cancel(H * ((1 * H**2 + 3 * G) / (3 * H**2 + 1 * G)))
    num_e, den_e = sp.fraction(sp.cancel(H))
    ne = [float(c) for c in sp.Poly(num_e, s).all_coeffs()]
    de = [float(c) for c in sp.Poly(den_e, s).all_coeffs()]
    g = carlson.carlson_iterate(Polynomial([1]), Polynomial([1, 0]), 2, 1, 2)
    scale = de[0] / g.den.coeffs[0]
    assert np.asarray(g.num.coeffs) * scale == pytest.approx(np.asarray(ne), rel=1e-12)
    assert np.asarray(g.den.coeffs) * scale == pytest.approx(np.asarray(de), rel=1e-12)


def test_carlson_convergence_on_real_axis():
    errs = []
    for i in range(1, 5):
        g = carlson.carlson_iterate(Polynomial([1]), Polynomial([1, 0]), 2, 1, i)
        h2 = g.num(2.0) / g.den(2.0)
        errs.append(abs(h2 * h2 - 0.5))
    # float evaluation floors near machine epsilon by i = 3; strict decrease
    # is observable up to that point
    assert errs[0] > errs[1] > errs[2]
    assert errs[3] < 1e-12


def test_carlson_argument_validation():
    with pytest.raises(ValueError):
        carlson.carlson_iterate(Polynomial([1]), Polynomial([1, 0]), 1, 1, 1)
    with pytest.raises(ValueError):
        carlson.carlson_iterate(Polynomial([1]), Polynomial([1, 0]), 2, 1, 0)
    with pytest.raises(ValueError):
        carlson.carlson_iterate(Polynomial([1]), Polynomial([1, 0]), 2, 1, 7)
    with pytest.raises(ValueError):
        carlson.carlson_iterate(Polynomial([0]), Polynomial([1, 0]), 2, 1, 1)


def test_validity_band_orientation():
    lead = FoStage.from_alpha(carlson.DIFFERINTEGRATOR, 0.25)
    lo, hi = carlson.validity_band(lead)
    assert (lo, hi) == (0.25, 4.0)
    ss = FoStage.from_alpha(carlson.SHIFTED_SUM, 3.0, a=1.0)
    lo, hi = carlson.validity_band(ss)
    assert lo == pytest.approx(1 / 3)
    assert hi == pytest.approx(1.0)


def test_fostage_consistency_enforced():
    with pytest.raises(ValueError):
        FoStage(carlson.DIFFERINTEGRATOR, 0.5, 0.0, 1.0, 0.9)
    with pytest.raises(ValueError):
        FoStage(carlson.DIFFERINTEGRATOR, 1.2, 0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        FoStage("nope", 0.5, 0.0, 1.0, 1 / 3)
