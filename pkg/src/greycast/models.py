"""Grey forecasting models with a scikit-learn flavored estimator API.

The flagship estimator is :class:`CCFNGBM`, the nonlinear grey Bernoulli
model driven by a conformable-order derivative and fractional-order
accumulation. Its classical relatives — :class:`GM`, :class:`NGBM` and
:class:`FNGBM` — are thin subclasses that pin the hyperparameters
accordingly, so reduction identities hold exactly by construction of the
shared code path. :class:`DGM` (the two-parameter discrete recursion) is
implemented separately.

All estimators follow the ``fit(series) -> self`` / ``predict(horizon)``
convention, expose ``get_params``/``set_params`` via sklearn's
``BaseEstimator``, and are immutable after ``fit`` apart from the fitted
attributes (trailing underscore).
"""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import accumulation as acc
from .exceptions import ConfigurationError, EstimationError, InfeasibleModelError
from .series import MIN_TRAIN_LEN, TimeSeries

RESTORE_EXACT = "exact-inverse"
RESTORE_PLAIN_DIFF = "plain-diff"
RESTORE_MODES = (RESTORE_EXACT, RESTORE_PLAIN_DIFF)

#: gamma may not approach 1: the response exponent 1/(1-gamma) and the design
#: matrix rank both degenerate there.
GAMMA_EXCLUSION = 1e-6

#: |a| below this is treated as estimation failure (the response needs b/a).
MIN_DEVELOPMENT_COEF = 1e-12

_MAX_CONDITION = 1e12


def validate_series(series) -> np.ndarray:
    """Coerce a TimeSeries or 1-D array-like into a validated float array."""
    if isinstance(series, TimeSeries):
        x = series.to_array()
    else:
        x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ConfigurationError(f"expected a 1-D series, got shape {x.shape}")
    if x.size < MIN_TRAIN_LEN:
        raise ConfigurationError(
            f"need at least {MIN_TRAIN_LEN} observations to calibrate, got {x.size}"
        )
    if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
        raise ConfigurationError("all observations must be positive finite numbers")
    return x


def background(xr) -> np.ndarray:
    """Background values: arithmetic means of consecutive accumulated points.

    Input of length n yields output of length n-1, indexed k = 2..n.
    """
    xr = np.asarray(xr, dtype=float)
    if xr.size < 2:
        raise ValueError("need at least two accumulated values")
    return 0.5 * (xr[1:] + xr[:-1])


def design_system(x0: np.ndarray, r: float, alpha: float, gamma: float,
                  kind: str) -> tuple[np.ndarray, np.ndarray]:
    """Assemble the least-squares system (B, Y) for the Bernoulli grey equation.

    B rows are (-z(k), z(k)**gamma) with z from the order-r accumulation of the
    raw series; Y holds the order-(r-alpha) accumulation at k = 2..n.
    """
    xr = acc.accumulate(kind, r, x0)
    z = background(xr)
    if not float(gamma).is_integer() and np.any(z <= 0.0):
        k = int(np.argmax(z <= 0.0)) + 2
        raise EstimationError(
            f"non-positive background value at k={k} with fractional exponent gamma={gamma}"
        )
    with np.errstate(over="ignore", invalid="ignore"):
        zg = z**gamma
    if not np.all(np.isfinite(zg)):
        raise EstimationError(f"background power z**{gamma} overflows")
    B = np.column_stack([-z, zg])
    Y = acc.accumulate(kind, r - alpha, x0)[1:]
    return B, Y


def solve_structural(B: np.ndarray, Y: np.ndarray) -> tuple[float, float]:
    """Least-squares solution (a, b) of Y = B (a, b)^T.

    Columns are equilibrated before solving: large Bernoulli exponents make the
    raw columns differ by many orders of magnitude, and the normal equations
    would lose the answer entirely. The rank/conditioning check applies to the
    equilibrated matrix for the same reason.
    """
    norms = np.linalg.norm(B, axis=0)
    if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
        raise EstimationError("design matrix has a zero or non-finite column")
    Bs = B / norms
    cond = np.linalg.cond(Bs)
    if not np.isfinite(cond) or cond > _MAX_CONDITION:
        raise EstimationError(
            f"design matrix is singular or near-singular (condition {cond:.3g}); "
            "gamma close to 1 makes the columns collinear"
        )
    sol, *_ = np.linalg.lstsq(Bs, Y, rcond=None)
    a, b = sol / norms
    return float(a), float(b)


def _check_hyperparams(r, alpha, gamma):
    for name, val in (("r", r), ("alpha", alpha), ("gamma", gamma)):
        if not isinstance(val, numbers.Real) or not np.isfinite(val):
            raise ConfigurationError(f"hyperparameter {name}={val!r} must be a finite real")
    if r <= 0:
        raise ConfigurationError(f"accumulation order r={r} must be > 0")
    if not 0 < alpha <= 1:
        raise ConfigurationError(f"derivative order alpha={alpha} must lie in (0, 1]")
    if abs(gamma - 1.0) < GAMMA_EXCLUSION:
        raise ConfigurationError(f"Bernoulli exponent gamma={gamma} is too close to 1")


class _GreyModelBase(BaseEstimator):
    """Shared fit/predict machinery; subclasses provide estimation and response."""

    kind = ""

    def fit(self, series):
        x = validate_series(series)
        self._validate_params()
        self.x_ = x
        self.x1_ = float(x[0])
        self.train_len_ = int(x.size)
        self._estimate(x)
        return self

    def _check_fitted(self):
        if not hasattr(self, "train_len_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted; call fit() first")

    def _validate_params(self):
        pass

    def fitted_values(self) -> np.ndarray:
        """Restored in-sample values for k = 1..n (first equals the anchor)."""
        self._check_fitted()
        return self._restored(self.train_len_)

    def predict(self, horizon: int) -> np.ndarray:
        """Restored out-of-sample values for the ``horizon`` steps past training."""
        self._check_fitted()
        if horizon < 1:
            raise ConfigurationError(f"horizon={horizon} must be >= 1")
        return self._restored(self.train_len_ + horizon)[self.train_len_ :]

    def _restored(self, total_len: int) -> np.ndarray:
        raise NotImplementedError


class CCFNGBM(_GreyModelBase):
    """Continuous conformable fractional nonlinear grey Bernoulli model.

    Hyperparameters: accumulation order ``r`` > 0, derivative order ``alpha``
    in (0, 1] with r >= alpha, Bernoulli exponent ``gamma`` != 1. The
    ``accumulation`` family applies both to the forward transform (order r for
    the background, order r - alpha for the regression target) and to the
    restoration of predictions. ``restore`` selects the exact order-r inverse
    (default) or the literal first-difference restoration as a compatibility
    mode.
    """

    kind = "ccfngbm"

    def __init__(self, r=1.0, alpha=1.0, gamma=0.5,
                 accumulation=acc.CONFORMABLE, restore=RESTORE_EXACT):
        self.r = r
        self.alpha = alpha
        self.gamma = gamma
        self.accumulation = accumulation
        self.restore = restore

    def _validate_params(self):
        _check_hyperparams(self.r, self.alpha, self.gamma)
        # The conformable operators only accept non-negative orders, so the
        # regression target at order r - alpha constrains r >= alpha there.
        # The classical binomial matrix handles negative orders (FNGBM with
        # r < 1 needs them), so no such constraint applies.
        if self.accumulation == acc.CONFORMABLE and self.r - self.alpha < 0:
            raise ConfigurationError(
                f"r - alpha = {self.r - self.alpha} must be >= 0 with conformable accumulation"
            )
        if self.accumulation not in acc.ACCUMULATION_KINDS:
            raise ConfigurationError(
                f"unknown accumulation {self.accumulation!r}; "
                f"expected one of {acc.ACCUMULATION_KINDS}"
            )
        if self.restore not in RESTORE_MODES:
            raise ConfigurationError(
                f"unknown restore mode {self.restore!r}; expected one of {RESTORE_MODES}"
            )

    def _estimate(self, x):
        B, Y = design_system(x, self.r, self.alpha, self.gamma, self.accumulation)
        self.a_, self.b_ = solve_structural(B, Y)
        if abs(self.a_) < MIN_DEVELOPMENT_COEF:
            raise InfeasibleModelError(
                f"development coefficient a={self.a_} vanished; response needs b/a"
            )

    def response(self, k) -> np.ndarray:
        """Accumulated-scale response at evaluation indices ``k`` (k >= 1).

        Equals the anchor value exactly at k = 1; degenerates to the
        integer-derivative Bernoulli response when alpha = 1.
        """
        self._check_fitted()
        k = np.asarray(k, dtype=float)
        ratio = self.b_ / self.a_
        expo = 1.0 / (1.0 - self.gamma)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            decay = np.exp(
                -(self.a_ / self.alpha) * (1.0 - self.gamma) * (k**self.alpha - 1.0)
            )
            base = (self.x1_ ** (1.0 - self.gamma) - ratio) * decay + ratio
        if np.any(~np.isfinite(base)) or np.any(base <= 0.0):
            raise InfeasibleModelError(
                f"response base is non-positive or non-finite for a={self.a_}, "
                f"b={self.b_}, gamma={self.gamma}"
            )
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            out = base**expo
        if np.any(~np.isfinite(out)):
            raise InfeasibleModelError("response overflows at the requested indices")
        return np.where(k == 1.0, self.x1_, out)

    def _restored(self, total_len: int) -> np.ndarray:
        ks = np.arange(1, total_len + 1, dtype=float)
        xr_hat = self.response(ks)
        if self.restore == RESTORE_PLAIN_DIFF:
            out = np.diff(xr_hat, prepend=0.0)
        else:
            out = acc.restore(self.accumulation, self.r, xr_hat)
        if np.any(~np.isfinite(out)):
            raise InfeasibleModelError("restored values are non-finite")
        out[0] = self.x1_
        return out


class NGBM(CCFNGBM):
    """Nonlinear grey Bernoulli model: integer accumulation and derivative."""

    kind = "ngbm"

    def __init__(self, gamma=0.5, restore=RESTORE_EXACT):
        super().__init__(r=1.0, alpha=1.0, gamma=gamma,
                         accumulation=acc.CLASSICAL, restore=restore)

    def get_params(self, deep=True):
        return {"gamma": self.gamma, "restore": self.restore}


class FNGBM(CCFNGBM):
    """Fractional nonlinear grey Bernoulli model: classical binomial
    accumulation of order r, integer derivative."""

    kind = "fngbm"

    def __init__(self, r=1.0, gamma=0.5, restore=RESTORE_EXACT):
        super().__init__(r=r, alpha=1.0, gamma=gamma,
                         accumulation=acc.CLASSICAL, restore=restore)

    def get_params(self, deep=True):
        return {"r": self.r, "gamma": self.gamma, "restore": self.restore}


class GM(CCFNGBM):
    """Classical GM(1,1): first-order accumulation, constant grey action."""

    kind = "gm"

    def __init__(self, restore=RESTORE_EXACT):
        super().__init__(r=1.0, alpha=1.0, gamma=0.0,
                         accumulation=acc.CLASSICAL, restore=restore)

    def get_params(self, deep=True):
        return {"restore": self.restore}


class DGM(_GreyModelBase):
    """Discrete grey model: x1(k+1) = beta1 x1(k) + beta2 on the cumulative sum."""

    kind = "dgm"

    def __init__(self):
        pass

    def _estimate(self, x):
        x1 = np.cumsum(x)
        B = np.column_stack([x1[:-1], np.ones(x.size - 1)])
        self.beta1_, self.beta2_ = solve_structural(B, x1[1:])
        if abs(1.0 - self.beta1_) < MIN_DEVELOPMENT_COEF:
            raise InfeasibleModelError(f"recursion coefficient beta1={self.beta1_} equals 1")

    def _restored(self, total_len: int) -> np.ndarray:
        ks = np.arange(total_len)
        level = self.beta2_ / (1.0 - self.beta1_)
        with np.errstate(over="ignore"):
            x1_hat = self.beta1_**ks * (self.x1_ - level) + level
        if np.any(~np.isfinite(x1_hat)):
            raise InfeasibleModelError("discrete recursion overflows at the requested horizon")
        out = np.diff(x1_hat, prepend=0.0)
        out[0] = self.x1_
        return out


MODEL_KINDS = {cls.kind: cls for cls in (GM, DGM, NGBM, FNGBM, CCFNGBM)}

#: Hyperparameters searched by the optimizer, per model kind.
SEARCHABLE_PARAMS = {
    "gm": (),
    "dgm": (),
    "ngbm": ("gamma",),
    "fngbm": ("r", "gamma"),
    "ccfngbm": ("r", "alpha", "gamma"),
}


def make_model(kind: str, **params):
    """Instantiate a model by kind name, validating the kind."""
    try:
        cls = MODEL_KINDS[kind]
    except KeyError:
        raise ConfigurationError(
            f"unknown model kind {kind!r}; expected one of {sorted(MODEL_KINDS)}"
        ) from None
    return cls(**params)


def model_to_dict(model) -> dict:
    """Serialize a fitted model to a plain JSON-compatible dict."""
    model._check_fitted()
    doc = {"kind": model.kind, "x1": model.x1_, "train_len": model.train_len_}
    if isinstance(model, CCFNGBM):
        doc.update(
            r=model.r, alpha=model.alpha, gamma=model.gamma,
            accumulation=model.accumulation, restore=model.restore,
            a=model.a_, b=model.b_,
        )
    elif isinstance(model, DGM):
        doc.update(a=model.beta1_, b=model.beta2_)
    return doc


def model_from_dict(doc: dict):
    """Rebuild a fitted model from :func:`model_to_dict` output without refitting."""
    kind = doc["kind"]
    if kind == "dgm":
        model = DGM()
        model.beta1_, model.beta2_ = float(doc["a"]), float(doc["b"])
    else:
        model = CCFNGBM(
            r=float(doc["r"]), alpha=float(doc["alpha"]), gamma=float(doc["gamma"]),
            accumulation=doc.get("accumulation", acc.CONFORMABLE),
            restore=doc.get("restore", RESTORE_EXACT),
        )
        model.kind = kind
        model.a_, model.b_ = float(doc["a"]), float(doc["b"])
    model.x1_ = float(doc["x1"])
    model.train_len_ = int(doc["train_len"])
    return model
