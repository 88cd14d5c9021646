import numpy as np
import pytest

from greycast import (CCFNGBM, DGM, FNGBM, GM, NGBM, ConfigurationError,
                      EstimationError, InfeasibleModelError, SplitSpec, split)
from greycast.accumulation import classical_ago
from greycast.models import (background, design_system, make_model,
                             model_from_dict, model_to_dict, solve_structural)
from greycast.series import load_fixture

RNG = np.random.default_rng(991)


@pytest.fixture(scope="module")
def china_train():
    train, _ = split(load_fixture("china-co2"), SplitSpec(17, 2))
    return train


@pytest.fixture(scope="module")
def shanghai():
    return split(load_fixture("shanghai-diesel"), SplitSpec(16, 2))


@pytest.fixture(scope="module")
def germany():
    return split(load_fixture("germany-co2"), SplitSpec(9, 2))


# --- background values ------------------------------------------------------

def test_background_midpoints():
    np.testing.assert_allclose(background([1, 3, 6]), [2.0, 4.5])


def test_background_constant_fixed_point():
    np.testing.assert_allclose(background([176.44, 176.44]), [176.44])


def test_background_china_first_value(china_train):
    xr = np.cumsum(china_train.to_array())
    # hand oracle from the first two cumulative sums: 0.5*(3593.1 + 7503.7)
    assert xr[1] == pytest.approx(7503.7)
    assert background(xr)[0] == pytest.approx(5548.4)


# --- design system ----------------------------------------------------------

def test_design_gm_reduction(china_train):
    B, Y = design_system(china_train.to_array(), 1.0, 1.0, 0.0, "classical")
    np.testing.assert_allclose(Y, china_train.to_array()[1:])
    np.testing.assert_allclose(B[:, 1], np.ones(16))
    z = background(np.cumsum(china_train.to_array()))
    np.testing.assert_allclose(B[:, 0], -z)


def test_design_verhulst_column(china_train):
    B, _ = design_system(china_train.to_array(), 1.0, 1.0, 2.0, "classical")
    np.testing.assert_allclose(B[:, 1], B[:, 0] ** 2)


# --- least squares ----------------------------------------------------------

def cramer_oracle(B, Y):
    # independent 2x2 normal-equations solve
    g11 = B[:, 0] @ B[:, 0]
    g12 = B[:, 0] @ B[:, 1]
    g22 = B[:, 1] @ B[:, 1]
    h1 = B[:, 0] @ Y
    h2 = B[:, 1] @ Y
    det = g11 * g22 - g12 * g12
    return np.array([(h1 * g22 - h2 * g12) / det, (g11 * h2 - g12 * h1) / det])


def test_least_squares_exact_recovery():
    B = np.column_stack([RNG.uniform(1, 2, 8), RNG.uniform(-1, 1, 8)])
    Y = B @ np.array([2.0, 7.0])
    a, b = solve_structural(B, Y)
    assert a == pytest.approx(2.0, abs=1e-10)
    assert b == pytest.approx(7.0, abs=1e-10)


def test_least_squares_matches_cramer():
    for _ in range(20):
        B = RNG.normal(size=(8, 2))
        Y = RNG.normal(size=8)
        got = solve_structural(B, Y)
        np.testing.assert_allclose(got, cramer_oracle(B, Y), rtol=1e-10, atol=1e-10)


def test_least_squares_orthogonality(china_train):
    B, Y = design_system(china_train.to_array(), 0.938, 0.3037, 1.3164, "conformable")
    beta = np.array(solve_structural(B, Y))
    residual = Y - B @ beta
    for j in range(2):
        bound = 1e-8 * np.linalg.norm(B[:, j]) * np.linalg.norm(Y)
        assert abs(B[:, j] @ residual) <= bound


def test_least_squares_gm_china(china_train):
    gm = GM().fit(china_train)
    assert gm.a_ == pytest.approx(-0.0439, abs=0.0005)
    assert gm.b_ == pytest.approx(5136.16, abs=5)


def test_least_squares_singular_on_gamma_one():
    x = np.array([1.0, 2.0, 3.5, 5.0, 7.0])
    B, Y = design_system(x, 1.0, 1.0, 1.0, "classical")
    with pytest.raises(EstimationError, match="singular"):
        solve_structural(B, Y)


# --- time response ----------------------------------------------------------

def test_response_anchor(china_train):
    m = CCFNGBM(r=0.938, alpha=0.3037, gamma=1.3164).fit(china_train)
    assert m.response(1.0) == m.x1_
    assert m.fitted_values()[0] == china_train.values[0]


def test_response_china_printed_coefficients(china_train):
    # the worked China calibration prints the response as
    # (0.0613 e^{c (k^0.3037 - 1)} + 0.0137)^{-3.1605}
    m = CCFNGBM(r=0.938, alpha=0.3037, gamma=1.3164).fit(china_train)
    ratio = m.b_ / m.a_
    assert m.x1_ ** (1 - m.gamma) - ratio == pytest.approx(0.0613, abs=5e-4)
    assert ratio == pytest.approx(0.0137, abs=5e-4)
    assert 1 / (1 - m.gamma) == pytest.approx(-3.1605, abs=1e-3)
    # the printed decay constant is -a(1-gamma); the solved response divides by alpha
    assert -m.a_ * (1 - m.gamma) == pytest.approx(-0.3686, abs=5e-4)


def test_response_gm_closed_form():
    x = np.array([100.0, 110.0, 121.0, 133.1, 146.41])
    gm = GM().fit(x)
    ks = np.arange(1.0, 6.0)
    expected = (gm.x1_ - gm.b_ / gm.a_) * np.exp(-gm.a_ * (ks - 1)) + gm.b_ / gm.a_
    np.testing.assert_allclose(gm.response(ks), np.where(ks == 1, gm.x1_, expected),
                               rtol=1e-12)


def test_alpha_one_degenerates_to_integer_derivative(china_train):
    # with alpha=1 the exponent must equal the plain -a(1-gamma)(k-1) response
    m = CCFNGBM(r=1.2, alpha=1.0, gamma=0.4, accumulation="classical").fit(china_train)
    ks = np.arange(2.0, 20.0)
    expected = ((m.x1_ ** (1 - m.gamma) - m.b_ / m.a_)
                * np.exp(-m.a_ * (1 - m.gamma) * (ks - 1)) + m.b_ / m.a_) ** (1 / (1 - m.gamma))
    np.testing.assert_allclose(m.response(ks), expected, rtol=1e-12)


def test_conformable_ode_residual(china_train):
    # central finite difference of the continuous response must satisfy
    # t^(1-alpha) x'(t) + a x(t) = b x(t)^gamma
    m = CCFNGBM(r=0.938, alpha=0.3037, gamma=1.3164).fit(china_train)
    h = 1e-5
    for t in (1.5, 2.5, 4.0):
        x = float(m.response(t))
        dx = float((m.response(t + h) - m.response(t - h)) / (2 * h))
        lhs = t ** (1 - m.alpha) * dx + m.a_ * x
        rhs = m.b_ * x ** m.gamma
        scale = max(abs(m.a_ * x), abs(rhs))
        assert abs(lhs - rhs) <= 1e-4 * scale


# --- restoration ------------------------------------------------------------

def test_restore_round_trip_any_order():
    from greycast.accumulation import accumulate, restore
    x = RNG.uniform(1, 5, size=8)
    for kind in ("classical", "conformable"):
        for r in (0.3, 1.0, 1.7):
            np.testing.assert_allclose(restore(kind, r, accumulate(kind, r, x)), x,
                                       rtol=1e-9)


def test_restore_plain_diff_mode(shanghai):
    train, _ = shanghai
    exact = CCFNGBM(r=0.666, alpha=0.0958, gamma=6.0956).fit(train)
    plain = CCFNGBM(r=0.666, alpha=0.0958, gamma=6.0956, restore="plain-diff").fit(train)
    ks = np.arange(1.0, 17.0)
    xr_hat = exact.response(ks)
    np.testing.assert_allclose(plain.fitted_values()[1:],
                               np.diff(xr_hat), rtol=1e-12)


def test_shanghai_restored_holdout(shanghai):
    train, _ = shanghai
    m = CCFNGBM(r=0.6660, alpha=0.0958, gamma=6.0956).fit(train)
    np.testing.assert_allclose(m.predict(2), [562.10, 546.77], atol=0.02)


# --- fit / forecast ---------------------------------------------------------

def test_gm_exact_on_exponential():
    k = np.arange(10)
    x = 5.0 * np.exp(0.07 * k)
    gm = GM().fit(x)
    fitted = gm.fitted_values()
    mape = np.mean(np.abs(fitted[1:] - x[1:]) / x[1:]) * 100
    assert mape < 0.1
    # horizon 1 continues the exponential
    assert gm.predict(1)[0] == pytest.approx(5.0 * np.exp(0.07 * 10), rel=1e-3)


def test_ccfngbm_germany_paper_hyper(germany):
    train, holdout = germany
    m = CCFNGBM(r=1.6713, alpha=0.3242, gamma=0.9512).fit(train)
    pred = m.predict(2)
    np.testing.assert_allclose(pred, [752.70, 743.96], rtol=0.01)
    mape = np.mean(np.abs(pred - holdout.to_array()) / holdout.to_array()) * 100
    assert mape == pytest.approx(1.91, abs=0.3)


def test_remark1_ngbm_reduction(germany):
    train, _ = germany
    for gamma in (-0.5, 0.3, 2.0):
        full = CCFNGBM(r=1.0, alpha=1.0, gamma=gamma, accumulation="classical").fit(train)
        reduced = NGBM(gamma=gamma).fit(train)
        np.testing.assert_allclose(full.fitted_values(), reduced.fitted_values(), rtol=1e-9)
        np.testing.assert_allclose(full.predict(3), reduced.predict(3), rtol=1e-9)


def test_remark1_gm_reduction(germany):
    train, _ = germany
    full = CCFNGBM(r=1.0, alpha=1.0, gamma=0.0, accumulation="classical").fit(train)
    gm = GM().fit(train)
    np.testing.assert_allclose(full.fitted_values(), gm.fitted_values(), rtol=1e-9)


def test_fngbm_allows_r_below_one(shanghai):
    train, _ = shanghai
    m = FNGBM(r=0.4, gamma=1.8).fit(train)
    assert np.isfinite(m.fitted_values()).all()


def test_dgm_shanghai_holdout(shanghai):
    train, _ = shanghai
    dgm = DGM().fit(train)
    np.testing.assert_allclose(dgm.predict(2), [664.09, 703.87], atol=0.02)


def test_dgm_germany_holdout(germany):
    train, _ = germany
    dgm = DGM().fit(train)
    np.testing.assert_allclose(dgm.predict(2), [762.88, 762.29], atol=0.02)


def test_forecast_indices_continue_training(china_train):
    m = CCFNGBM(r=0.938, alpha=0.3037, gamma=1.3164).fit(china_train)
    whole = m._restored(m.train_len_ + 3)
    np.testing.assert_allclose(m.predict(3), whole[m.train_len_:])


# --- hyperparameter validation ----------------------------------------------

@pytest.mark.parametrize("params", [
    {"r": -0.5, "alpha": 0.5, "gamma": 2.0},
    {"r": 1.0, "alpha": 1.5, "gamma": 2.0},
    {"r": 1.0, "alpha": 0.5, "gamma": 1.0 + 1e-9},
    {"r": 0.3, "alpha": 0.5, "gamma": 2.0},  # r < alpha with conformable
])
def test_invalid_hyperparams(params, china_train):
    with pytest.raises(ConfigurationError):
        CCFNGBM(**params).fit(china_train)


def test_series_too_short():
    with pytest.raises(ConfigurationError):
        GM().fit([1.0, 2.0, 3.0])


def test_unknown_kind():
    with pytest.raises(ConfigurationError, match="unknown model kind"):
        make_model("arima")


# --- serialization ----------------------------------------------------------

def test_model_round_trip(china_train):
    m = CCFNGBM(r=0.938, alpha=0.3037, gamma=1.3164).fit(china_train)
    doc = model_to_dict(m)
    assert doc["kind"] == "ccfngbm"
    back = model_from_dict(doc)
    np.testing.assert_allclose(back.predict(4), m.predict(4))


def test_dgm_round_trip(china_train):
    m = DGM().fit(china_train)
    back = model_from_dict(model_to_dict(m))
    np.testing.assert_allclose(back.predict(2), m.predict(2))


def test_get_params_sklearn_style():
    m = CCFNGBM(r=0.9, alpha=0.3, gamma=1.3)
    params = m.get_params()
    assert params["r"] == 0.9 and params["gamma"] == 1.3
    m.set_params(gamma=2.0)
    assert m.gamma == 2.0
    assert NGBM(gamma=0.7).get_params()["gamma"] == 0.7
