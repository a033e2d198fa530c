import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_hardy import weights as W

R_WIDE = W.log_samples(1e-2, 1e2)


def _sympy_M(a_expr, b_expr):
    """Independent M(r) = r^-1 (r b'/b)' b^2/a^2 built symbolically."""
    r = sp.symbols("r", positive=True)
    a, b = a_expr(r), b_expr(r)
    m = sp.simplify(sp.diff(r * sp.diff(b, r) / b, r) / r * (b / a) ** 2)
    return sp.lambdify(r, m, "numpy"), m


def test_sampler_density_and_endpoints():
    r = W.log_samples(1e-2, 1e2, 512)
    assert r[0] == pytest.approx(1e-2) and r[-1] == pytest.approx(1e2)
    assert len(r) == 2049
    with pytest.raises(ValueError):
        W.log_samples(1.0, 0.5)


@pytest.mark.parametrize("tau", [0.5, 1.0, 2.0, 3.7])
def test_japanese_pair_matches_symbolic(tau):
    f, m = _sympy_M(
        lambda r: (1 + r**2) ** ((sp.nsimplify(tau) - 2) / 2), lambda r: (1 + r**2) ** (sp.nsimplify(tau) / 2)
    )
    assert sp.simplify(m - 2 * sp.nsimplify(tau)) == 0
    got = W.radial_M(W.example_41_pair(tau), R_WIDE)
    assert np.max(np.abs(got - f(R_WIDE))) <= 1e-9


@pytest.mark.parametrize("tau,alpha", [(0.5, 3.0), (2.0, 0.5), (1.0, -1.0)])
def test_exponential_pair_matches_symbolic(tau, alpha):
    t, al = sp.nsimplify(tau), sp.nsimplify(alpha)
    _, m = _sympy_M(lambda r: r ** ((al - 2) / 2) * sp.exp(t * r**al / 2), lambda r: sp.exp(t * r**al / 2))
    assert sp.simplify(m - al**2 * t / 2) == 0
    got = W.radial_M(W.example_42_pair(tau, alpha), R_WIDE)
    assert np.max(np.abs(got - alpha**2 * tau / 2)) <= 1e-9


def test_log_pair_matches_symbolic():
    t = sp.Rational(3, 2)
    _, m = _sympy_M(lambda r: sp.exp(t * sp.log(r) ** 2 / 2) / r, lambda r: sp.exp(t * sp.log(r) ** 2 / 2))
    assert sp.simplify(m - t) == 0
    assert np.max(np.abs(W.radial_M(W.log_weight_pair(1.5), R_WIDE) - 1.5)) <= 1e-9


def test_power_pair_has_vanishing_M():
    assert np.max(np.abs(W.radial_M(W.power_pair(0.7), R_WIDE))) <= 1e-12


def test_M0_hand_values():
    # b = (1 + r^2)^(tau/2): r b'/b = tau r^2/(1+r^2), derivative 2 tau r/(1+r^2)^2
    tau, r = 1.3, np.array([0.1, 1.0, 4.0])
    got = W.radial_M0(W.japanese_weight(tau), r)
    assert np.allclose(got, 2 * tau * r / (1 + r**2) ** 2, rtol=1e-13)


def test_radial_condition_c_example():
    # b = exp(tau r^2): (r b'/b)' - 1 = 4 tau r - 1
    tau = 0.5
    b = W.exp_phase_weight(W.PHASES["quadratic"], tau)
    r = np.array([0.1, 0.5, 1.0])
    assert W.radial_M0(b, r) == pytest.approx(4 * tau * r)
    assert W.radial_condition_c(b, r) == pytest.approx(4 * tau * 0.1 - 1)


@pytest.mark.parametrize(
    "name,expected", [("linear", lambda r: 1.0 + 0 * r), ("quadratic", lambda r: 4 * r), ("log", lambda r: 0 * r)]
)
def test_gamma_condition(name, expected):
    r = W.log_samples(1.0, 2.0)
    ph = W.phase_by_name(name)
    assert np.allclose(ph.d2(r) * r + ph.d1(r), expected(r), atol=1e-13)
    assert W.gamma_condition(ph, r) == pytest.approx(float(np.min(expected(r))), abs=1e-13)


def test_unknown_phase():
    with pytest.raises(ValueError):
        W.phase_by_name("cubic")


@pytest.mark.parametrize(
    "w",
    [
        W.japanese_weight(1.5),
        W.power_weight(-0.5),
        W.exp_phase_weight(W.PHASES["linear"], 0.8, power=-0.5),
        W.exp_phase_weight(W.PHASES["log_sq"], 0.5),
    ],
    ids=lambda w: w.label,
)
def test_catalogue_derivatives_pass_fd_gate(w):
    assert W.check_derivatives(w, W.log_samples(1e-2, 10.0, 32)) <= 1e-6


def test_from_functions_rejects_wrong_derivative():
    with pytest.raises(ValueError):
        W.RadialWeight.from_functions(
            "bad", lambda r: np.exp(r), lambda r: 2 * np.exp(r), lambda r: np.exp(r), validate_at=[0.5, 1.0, 2.0]
        )


def test_from_functions_accepts_consistent_triple():
    w = W.RadialWeight.from_functions(
        "exp", lambda r: np.exp(r), lambda r: np.exp(r), lambda r: np.exp(r), validate_at=[0.5, 1.0, 2.0]
    )
    assert w(1.0) == pytest.approx(np.e)
    # r b'/b = r for b = e^r
    assert W.radial_M0(w, np.array([2.0]))[0] == pytest.approx(1.0)


def test_half_power_pairing_is_checked():
    p = W.carleman_phase_pair(W.PHASES["linear"], 2.0)
    assert p.pairing == "half_power"
    with pytest.raises(ValueError):
        W.WeightPair(W.japanese_weight(0.0), W.japanese_weight(1.0), pairing="half_power")
    with pytest.raises(ValueError):
        W.WeightPair(W.japanese_weight(0.0), W.japanese_weight(1.0), pairing="other")


def test_negative_radius_rejected():
    with pytest.raises(ValueError):
        W.radial_M(W.example_41_pair(1.0), [-1.0, 1.0])


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 4.0), st.floats(0.25, 3.0), st.floats(-1.0, 1.0))
def test_exponential_M_invariant_under_dilation(tau, alpha, log_lam):
    # u(lam x): the pair for (tau lam^alpha, alpha) has M scaled by lam^alpha
    lam = 10.0**log_lam
    r = W.log_samples(0.1, 10.0, 16)
    base = W.radial_M(W.example_42_pair(tau, alpha), r)
    scaled = W.radial_M(W.example_42_pair(tau * lam**alpha, alpha), r)
    assert np.allclose(scaled, lam**alpha * base, rtol=1e-10)
