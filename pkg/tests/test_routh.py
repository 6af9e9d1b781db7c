import math

import numpy as np
import pytest

from isodamp import routh
from isodamp.poly import Polynomial


def eig_stable(coeffs):
    """Companion-matrix eigenvalue oracle: all roots strictly in the LHP."""
    r = np.roots(np.asarray(coeffs, dtype=float))
    return bool(np.all(r.real < 0))


def test_table_cubic_first_column():
    t = routh.routh_table(Polynomial([1, 2, 3, 1]))
    assert t.first_column == pytest.approx([1, 2, 2.5, 1])
    assert t.sign_changes == 0
    assert eig_stable([1, 2, 3, 1])


def test_table_two_rhp_roots():
    t = routh.routh_table(Polynomial([1, -1, 1]))
    assert t.first_column == pytest.approx([1, -1, 1])
    assert t.sign_changes == 2


def test_table_oscillator_patched_and_flagged():
    t = routh.routh_table(Polynomial([1, 0, 1]))
    assert t.epsilon_substitutions >= 1
    assert not routh.is_hurwitz(Polynomial([1, 0, 1]))


def test_table_row_count():
    for coeffs in ([1, 1], [1, 1, 1], [2, 3, 5, 7, 11]):
        t = routh.routh_table(Polynomial(coeffs))
        assert len(t.rows) == len(coeffs)


def test_table_rejects_degenerate_inputs():
    with pytest.raises(ValueError):
        routh.routh_table(Polynomial([0]))
    with pytest.raises(ValueError):
        routh.routh_table(Polynomial([5]))


def test_is_hurwitz_basic():
    assert routh.is_hurwitz(Polynomial([1, 1, 1]))
    assert not routh.is_hurwitz(Polynomial([1, 0, 1]))
    assert not routh.is_hurwitz(Polynomial([1, -1, 1]))


def test_is_hurwitz_motor_loop_at_unit_gain():
    # expanded closed-loop polynomial at alpha = 0.5, K = 1
    p = Polynomial([0.0025, 0.035, 0.12645, 0.1347, 0.0132])
    assert routh.is_hurwitz(p)
    assert eig_stable(p.coeffs)


def test_oracle_equivalence_1000_random_polynomials():
    rng = np.random.RandomState(1234)
    checked = 0
    while checked < 1000:
        deg = rng.randint(1, 9)
        coeffs = rng.uniform(-5, 5, deg + 1)
        if abs(coeffs[0]) < 0.05:
            continue
        roots = np.roots(coeffs)
        if np.min(np.abs(roots.real)) < 1e-6:
            continue  # imaginary-axis-clean filter
        assert routh.is_hurwitz(Polynomial(coeffs)) == bool(np.all(roots.real < 0))
        checked += 1


def test_positive_scaling_invariance():
    rng = np.random.RandomState(5)
    for _ in range(50):
        coeffs = rng.uniform(-4, 4, rng.randint(2, 9))
        if abs(coeffs[0]) < 0.05:
            continue
        p = Polynomial(coeffs)
        for c in (0.5, 3.0, 1e3):
            q = p.scaled(c)
            tp, tq = routh.routh_table(p), routh.routh_table(q)
            assert tp.sign_changes == tq.sign_changes
            assert np.all(np.sign(tp.first_column) == np.sign(tq.first_column))


def test_marginal_gain_textbook_case():
    def pk(k):
        return Polynomial([1, 3, 2, k])

    res = routh.marginal_gain(pk, 0.1, 100)
    assert res.finite
    assert res.k_m == pytest.approx(6.0, abs=1e-6)
    # bracketing invariant
    assert routh.is_hurwitz(pk(res.k_m * (1 - 1e-6)))
    assert not routh.is_hurwitz(pk(res.k_m * (1 + 1e-6)))


def test_marginal_gain_unbounded_first_order():
    res = routh.marginal_gain(lambda k: Polynomial([1, 1 + k]), 0.1, 100)
    assert res.unbounded
    assert math.isinf(res.k_m)


def test_marginal_gain_never_stable():
    res = routh.marginal_gain(lambda k: Polynomial([1, -1, k]), 0.1, 100)
    assert res.never_stable
    assert res.k_m == 0.0


def test_marginal_gain_multiple_transitions_rejected():
    def pk(k):
        return Polynomial([1, 1, 1]) if (k < 1 or k > 10) else Polynomial([1, -1, 1])

    with pytest.raises(ValueError, match="multiple stability transitions"):
        routh.marginal_gain(pk, 0.1, 100)


def test_marginal_gain_with_operating_point():
    res = routh.marginal_gain(lambda k: Polynomial([1, 3, 2, k]), 0.1, 100, k_actual=2.0)
    assert res.stable_at_k is True
    assert res.stability_ratio == pytest.approx(3.0, rel=1e-6)


def test_stability_ratio():
    assert routh.stability_ratio(6, 2) == pytest.approx(3.0)
    assert routh.stability_ratio(6, 6) == pytest.approx(1.0)
    assert routh.stability_ratio(4, 8) == pytest.approx(0.5)  # beyond margin
    with pytest.raises(ValueError):
        routh.stability_ratio(-1, 2)
    with pytest.raises(ValueError):
        routh.stability_ratio(math.inf, 2)


def test_stability_ratio_monotone_in_k():
    ratios = [routh.stability_ratio(6.0, k) for k in (0.5, 1, 2, 4, 5.9)]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


def test_estimate_gain_crossover():
    assert routh.estimate_gain_crossover(2.2, 6.0, 6.0) == pytest.approx(2.2)
    assert routh.estimate_gain_crossover(math.sqrt(2), 1.5, 6.0) == pytest.approx(
        math.sqrt(2) * 0.5, rel=1e-12)
    assert routh.estimate_gain_crossover(1.0, 1.5, 6.0) == pytest.approx(0.5)
    with pytest.raises(ValueError, match="above marginal gain"):
        routh.estimate_gain_crossover(1.0, 7.0, 6.0)
