"""Property suites for the three synthetic comparison inequalities."""

from lemma_suites import (
    counterexample_extinction_slack,
    forward_eta_T,
    run_extinction_suite,
    run_forward_suite,
    run_ratio_bound_suite,
)


LONG_WINDOW = 40


def test_extinction_comparison_corrected_slack_all_windows():
    # slack (1+M)**r holds for every window, including length-1 ones
    worst = run_extinction_suite(100, seed=901, slack_exponent=lambda r: r)
    assert worst <= 1e-12


def test_extinction_comparison_original_slack_long_windows():
    # the (1+M)**(r-1) form is only safe once windows are much longer than
    # the delay; short windows can violate it (see the counterexample)
    worst = run_extinction_suite(
        100, seed=902, slack_exponent=lambda r: r - 1, min_window=LONG_WINDOW
    )
    assert worst <= 1e-12


def test_extinction_slack_counterexample_is_real():
    lhs, rhs = counterexample_extinction_slack()
    assert lhs < rhs  # the (1+M)**(r-1) bound genuinely fails here
    # while the corrected exponent covers it
    assert (1.0 + 3.0) * lhs >= rhs


def test_forward_comparison_with_constructed_margin():
    worst = run_forward_suite(100, seed=903)
    assert worst < 0.0  # strict inequality


def test_forward_margin_construction_sane():
    eta, T = forward_eta_T(M=2.0, eps=1.0, r=2)
    assert eta > 0.0
    assert T >= 2


def test_ratio_bound_paired_recursions():
    worst = run_ratio_bound_suite(100, seed=904)
    assert worst <= 1e-12
