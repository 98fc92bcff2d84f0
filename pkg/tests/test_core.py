import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemodde import (
    ChemostatParams,
    Constant,
    DyadicBlocks,
    ExplicitSequence,
    InitialHistory,
    LinearUptake,
    Monod,
    ParameterError,
    PiecewiseLinear,
    Sinusoid,
    TabulatedUptake,
    validate_standing_hypotheses,
)

GRID = np.concatenate([[0.0], np.geomspace(1e-6, 1e4, 60)])


# ---------------------------------------------------------------------------
# uptake functions
# ---------------------------------------------------------------------------


def test_monod_hand_values():
    p = Monod(p_max=0.7, k_s=1.3)
    assert p.evaluate(0.0) == 0.0
    assert math.isclose(p.evaluate(1.3), 0.35, rel_tol=1e-12)
    big = 1e6 * 1.3
    assert math.isclose(p.evaluate(big), 0.7 * 1e6 / (1e6 + 1), rel_tol=1e-12)


@given(
    p_max=st.floats(0.01, 10.0),
    k_s=st.floats(0.01, 10.0),
)
@settings(max_examples=50, deadline=None)
def test_monod_shape(p_max, k_s):
    p = Monod(p_max=p_max, k_s=k_s)
    d0 = p.derivative_at_zero()
    vals = [p.evaluate(s) for s in GRID]
    ders = [p.derivative(s) for s in GRID]
    assert vals[0] == 0.0
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert all(0.0 <= d <= d0 * (1 + 1e-12) for d in ders)


def test_linear_uptake_shape():
    p = LinearUptake(slope=0.4)
    assert p.evaluate(0.0) == 0.0
    assert p.derivative(123.0) == p.derivative_at_zero() == 0.4
    # unbounded by design; large arguments are fine
    assert p.evaluate(1e12) == 0.4e12


def test_tabulated_follows_samples():
    ref = Monod(p_max=1.0, k_s=1.0)
    grid = np.linspace(0.0, 5.0, 21)
    tab = TabulatedUptake(grid=tuple(grid), values=tuple(ref.evaluate(s) for s in grid))
    for s in grid:
        assert math.isclose(tab.evaluate(s), ref.evaluate(s), rel_tol=0, abs_tol=1e-15)
    # between nodes: monotone, and sandwiched by the node values
    for s in np.linspace(0.01, 4.99, 97):
        lo = ref.evaluate(math.floor(s / 0.25) * 0.25)
        hi = ref.evaluate(math.ceil(s / 0.25) * 0.25)
        assert lo - 1e-15 <= tab.evaluate(s) <= hi + 1e-15
    d0 = tab.derivative_at_zero()
    for s in np.linspace(0.0, 7.0, 71):
        assert 0.0 <= tab.derivative(s) <= d0 + 1e-15
    # held constant past the table
    assert tab.evaluate(100.0) == ref.evaluate(5.0)
    assert tab.derivative(100.0) == 0.0


def test_tabulated_validation():
    with pytest.raises(ParameterError):
        TabulatedUptake(grid=(0.5, 1.0), values=(0.0, 0.1))  # must start at 0
    with pytest.raises(ParameterError):
        TabulatedUptake(grid=(0.0, 1.0, 2.0), values=(0.0, 0.5, 0.4))  # decreasing
    with pytest.raises(ParameterError):
        # second segment steeper than the first: p' <= p'(0) broken
        TabulatedUptake(grid=(0.0, 1.0, 2.0), values=(0.0, 0.1, 0.9))


# ---------------------------------------------------------------------------
# input signals
# ---------------------------------------------------------------------------


def test_sinusoid_exact_periodicity():
    sig = Sinusoid(amplitude=0.25, period_steps=7, offset=0.6)
    for t in range(0, 3 * 7):
        assert sig.value_at(t + 7) == sig.value_at(t)
        assert sig.value_at(t - 7) == sig.value_at(t)  # backward extension
    lo, hi = sig.bounds()
    assert 0.0 < lo <= hi
    for t in range(-20, 40):
        assert lo <= sig.value_at(t) <= hi


def test_sinusoid_matches_formula():
    sig = Sinusoid(amplitude=0.25, period_steps=500, offset=0.6)
    for t in (0, 1, 125, 250, 499):
        expect = 0.25 * math.sin(2 * math.pi * t / 500) + 0.6
        assert math.isclose(sig.value_at(t), expect, rel_tol=1e-12, abs_tol=1e-15)


def test_constant_and_sequence_bounds():
    c = Constant(0.5)
    assert c.value_at(-17) == c.value_at(3) == 0.5
    assert c.period == 1

    seq = ExplicitSequence(values=(0.2, 0.4, 0.8), periodic=True)
    assert seq.period == 3
    for t in range(-9, 12):
        assert seq.value_at(t) == seq.value_at(t + 3)
    lo, hi = seq.bounds()
    assert (lo, hi) == (0.2, 0.8)

    open_seq = ExplicitSequence(values=(0.2, 0.4, 0.8), periodic=False)
    assert open_seq.period is None
    assert open_seq.value_at(-5) == 0.2  # clamps to the first value
    assert open_seq.value_at(99) == 0.8


def test_piecewise_linear_clamps_and_interpolates():
    sig = PiecewiseLinear(breakpoints=((0.0, 3.0), (500.0, 3.0), (1500.0, 0.05)))
    assert sig.value_at(-10) == 3.0
    assert sig.value_at(250) == 3.0
    assert math.isclose(sig.value_at(1000), (3.0 + 0.05) / 2, rel_tol=1e-12)
    assert sig.value_at(5000) == 0.05
    assert sig.bounds() == (0.05, 3.0)


def test_dyadic_blocks_layout():
    sig = DyadicBlocks(E=0.5, r=0)
    assert sig.demonstration_only
    assert sig.high_value == pytest.approx(8.0)
    assert sig.low_value == 0.25
    high_times = {1, 4, 5, 6, 7, 16, 31, 64, 127}
    low_times = {-5, 0, 2, 3, 8, 15, 32, 63, 128}
    for t in high_times:
        assert sig.value_at(t) == sig.high_value, t
    for t in low_times:
        assert sig.value_at(t) == sig.low_value, t
    lo, hi = sig.bounds()
    assert (lo, hi) == (0.25, 8.0)


def test_dyadic_blocks_overflow_guard():
    with pytest.raises(ParameterError):
        DyadicBlocks(E=0.5, r=600)  # 2**1202 overflows a double


# ---------------------------------------------------------------------------
# parameters and history
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("E", [0.0, 1.0, 1.5, -0.1])
def test_params_reject_bad_E(E):
    with pytest.raises(ParameterError):
        ChemostatParams(E=E, r=1, uptake=Monod(1.0, 1.0), input=Constant(1.0))


@pytest.mark.parametrize("r", [-1, 0.5, "two"])
def test_params_reject_bad_r(r):
    with pytest.raises(ParameterError):
        ChemostatParams(E=0.5, r=r, uptake=Monod(1.0, 1.0), input=Constant(1.0))


def test_initial_history():
    init = InitialHistory.constant(3, 0.5, 0.2)
    assert len(init) == 4
    assert init.s == (0.5,) * 4
    with pytest.raises(ParameterError):
        InitialHistory(s=(0.5, -0.1), x=(0.2, 0.2))
    with pytest.raises(ParameterError):
        InitialHistory(s=(0.5,), x=(0.2, 0.2))


# ---------------------------------------------------------------------------
# standing hypotheses
# ---------------------------------------------------------------------------


def test_standing_hypotheses_monod_fig2_bound():
    # p(s) = s/(1+s) has p'(0) = 1; the sinusoid 0.25*sin + 0.6 tops at 0.85
    params = ChemostatParams(
        E=0.125, r=5, uptake=Monod(1.0, 1.0),
        input=Sinusoid(amplitude=0.25, period_steps=500, offset=0.6),
    )
    report = validate_standing_hypotheses(params, z_sup=0.85)
    assert report.hypothesis_pz
    assert math.isclose(report.pz_product, 0.85, rel_tol=1e-12)


def test_standing_hypotheses_boundary_and_violation():
    params = ChemostatParams(E=0.5, r=0, uptake=LinearUptake(1.0), input=Constant(1.0))
    report = validate_standing_hypotheses(params, z_sup=1.0)
    assert report.hypothesis_pz and report.pz_product == 1.0  # equality admitted

    params2 = ChemostatParams(E=0.5, r=0, uptake=LinearUptake(2.0), input=Constant(1.0))
    report2 = validate_standing_hypotheses(params2, z_sup=1.0)
    assert not report2.hypothesis_pz  # failure is reported, not raised
    assert report2.pz_product == 2.0
    assert not report2.feasible
