"""Regularization filter families and frame filter functions.

A filter family is a sequence g_j: [0, kappa^2] -> R, j = 0, 1, 2, ...
with g_0 = 0, such that lambda * g_j(lambda) is nondecreasing in j and
tends to 1 on (0, kappa^2]. The induced frame filter functions are

    G_j(lambda)^2 = g_j(lambda) - g_{j-1}(lambda)  (j >= 1),

so that sum_{j<=tau} lambda G_j(lambda)^2 = lambda g_tau(lambda)
telescopes exactly.

Four families are provided (``tikhonov``, ``iterated_tikhonov``,
``landweber``, ``asymptotic``), each with:

* a stable evaluation of g_j, switching to a two-term series below
  lambda < 1e-8 * kappa^2 where the closed form is a 0/0 limit;
* a cancellation-free closed form for G_j^2 (nonnegative by construction);
* the residual r_j(lambda) = 1 - lambda g_j(lambda) in product form;
* its qualification: the largest nu with
  sup_lambda lambda^nu r_j(lambda) = O(j^-nu), possibly infinite.

The audits at the bottom check, on grids, the two quantitative facts the
downstream error analysis leans on: the slope of lambda -> lambda
g_j(lambda) stays below the family's Lipschitz bound, and the residual
suprema decay at the qualification-limited rate.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

# below this multiple of kappa^2, closed forms give way to series
SERIES_SWITCH = 1e-8

# slack for validating spectral arguments against [0, kappa^2]; empirical
# eigenvalues may overshoot kappa^2 by rounding
DOMAIN_SLACK = 1e-8


class FilterDomainError(ValueError):
    """Raised when a spectral argument leaves [0, kappa^2] or j < 0."""


class FilterFamily:
    """Base class; subclasses implement _g_closed, _g_series, residual,
    g_squared and lipschitz_bound."""

    name = "abstract"
    qualification: float = math.inf

    def __init__(self, kappa_sq: float = 1.0):
        if kappa_sq <= 0:
            raise ValueError("kappa_sq must be positive")
        self.kappa_sq = float(kappa_sq)

    # -- argument handling ---------------------------------------------------

    def _check(self, j: int, lam) -> np.ndarray:
        if j < 0 or j != int(j):
            raise FilterDomainError(f"scale index must be a nonnegative integer, got {j}")
        lam = np.asarray(lam, dtype=float)
        if np.any(lam < 0) or np.any(lam > self.kappa_sq * (1.0 + DOMAIN_SLACK)):
            raise FilterDomainError(
                f"spectral argument outside [0, {self.kappa_sq}]: "
                f"range [{lam.min()}, {lam.max()}]")
        return np.minimum(lam, self.kappa_sq)

    def _split(self, lam: np.ndarray) -> np.ndarray:
        return lam < SERIES_SWITCH * self.kappa_sq

    # -- public surface -------------------------------------------------------

    def g(self, j: int, lam):
        """g_j evaluated elementwise; g_0 = 0 by convention."""
        lam = self._check(j, lam)
        if j == 0:
            return np.zeros_like(lam) if lam.ndim else 0.0
        small = self._split(lam)
        out = np.where(small,
                       self._g_series(j, lam),
                       self._g_closed(j, np.where(small, self.kappa_sq, lam)))
        return out if lam.ndim else float(out)

    def residual(self, j: int, lam):
        """r_j = 1 - lambda g_j(lambda), in [0, 1], product form (stable)."""
        lam = self._check(j, lam)
        if j == 0:
            return np.ones_like(lam) if lam.ndim else 1.0
        out = self._residual(j, lam)
        return out if lam.ndim else float(out)

    def g_squared(self, j: int, lam):
        """G_j(lambda)^2 = g_j - g_{j-1} via a cancellation-free form, j >= 1."""
        lam = self._check(j, lam)
        if j < 1:
            raise FilterDomainError("filter functions start at scale j = 1")
        small = self._split(lam)
        out = np.where(small,
                       self._gsq_series(j, lam),
                       self._gsq_closed(j, np.where(small, self.kappa_sq, lam)))
        bad = out < -1e-14
        if np.any(bad):
            raise FilterDomainError(
                f"negative filter square at scale {j}: min {out.min()}")
        out = np.maximum(out, 0.0)
        return out if lam.ndim else float(out)

    def g_squared_by_difference(self, j: int, lam):
        """Plain g_j - g_{j-1}. Reference route for testing the closed forms;
        subject to cancellation, guarded at -1e-14."""
        lam = self._check(j, lam)
        if j < 1:
            raise FilterDomainError("filter functions start at scale j = 1")
        out = np.asarray(self.g(j, lam) - self.g(j - 1, lam))
        bad = out < -1e-14
        if np.any(bad):
            raise FilterDomainError(
                f"negative filter difference at scale {j}: min {out.min()}")
        out = np.maximum(out, 0.0)
        return out if np.asarray(lam).ndim else float(out)

    def partial_sum(self, tau: int, lam):
        """sum_{j<=tau} lambda G_j(lambda)^2 = lambda g_tau(lambda), in [0, 1]."""
        lam = self._check(tau, lam)
        out = np.clip(lam * np.asarray(self.g(tau, lam)), 0.0, 1.0)
        return out if lam.ndim else float(out)

    def lipschitz_bound(self, j: int) -> float:
        """Lipschitz constant of lambda -> lambda g_j(lambda) on [0, kappa^2].

        The slope is maximal at lambda = 0 where it equals g_j(0), so the
        bound is the analytic limit of g_j at zero.
        """
        return float(self.g(j, 0.0)) if j > 0 else 0.0

    def beta(self, alpha: float) -> float:
        """Effective rate exponent min(alpha, qualification)."""
        return min(float(alpha), self.qualification)

    def descriptor(self) -> dict:
        return {"method": self.name, "kappa_sq": self.kappa_sq}

    # subclass hooks
    def _g_closed(self, j, lam): raise NotImplementedError
    def _g_series(self, j, lam): raise NotImplementedError
    def _gsq_closed(self, j, lam): raise NotImplementedError
    def _gsq_series(self, j, lam): raise NotImplementedError
    def _residual(self, j, lam): raise NotImplementedError


class Tikhonov(FilterFamily):
    """g_j(lambda) = 1 / (lambda + 1/j); qualification 1."""

    name = "tikhonov"
    qualification = 1.0

    def _g_closed(self, j, lam):
        return 1.0 / (lam + 1.0 / j)

    # no singularity: the closed form is already the analytic limit
    _g_series = _g_closed

    def _gsq_closed(self, j, lam):
        if j == 1:
            return 1.0 / (lam + 1.0)
        # 1/(lam + 1/j) - 1/(lam + 1/(j-1)), combined over a common
        # denominator; positive term by term
        return (1.0 / (j * (j - 1))) / ((lam + 1.0 / j) * (lam + 1.0 / (j - 1)))

    _gsq_series = _gsq_closed

    def _residual(self, j, lam):
        return 1.0 / (1.0 + j * lam)


class IteratedTikhonov(FilterFamily):
    """g_j(lambda) = ((lambda + 1/j)^m - (1/j)^m) / (lambda (lambda + 1/j)^m),
    equivalently (1 - (1 + j lambda)^-m) / lambda; qualification m."""

    name = "iterated_tikhonov"

    def __init__(self, kappa_sq: float = 1.0, m: int = 2):
        super().__init__(kappa_sq)
        if m < 1 or m != int(m):
            raise ValueError("iteration count m must be a positive integer")
        self.m = int(m)
        self.qualification = float(m)

    def _g_closed(self, j, lam):
        return -np.expm1(-self.m * np.log1p(j * lam)) / lam

    def _g_series(self, j, lam):
        # g_j(0) = m j; next order -m(m+1) j^2 lambda / 2
        return self.m * j * (1.0 - (self.m + 1) * j * lam / 2.0)

    def _gsq_closed(self, j, lam):
        # ((1+(j-1)lam)^-m - (1+j lam)^-m) / lam without cancellation
        step = np.log1p(lam / (1.0 + (j - 1) * lam))
        return np.exp(-self.m * np.log1p(j * lam)) * np.expm1(self.m * step) / lam

    def _gsq_series(self, j, lam):
        return self.m * (1.0 - (self.m + 1) * (2 * j - 1) * lam / 2.0)

    def _residual(self, j, lam):
        return np.exp(-self.m * np.log1p(j * lam))

    def descriptor(self) -> dict:
        return {"method": self.name, "kappa_sq": self.kappa_sq, "m": self.m}


class Landweber(FilterFamily):
    """g_j(lambda) = (1 - (1 - gamma lambda)^j) / lambda with step
    gamma in (0, 1/kappa^2]; qualification infinite."""

    name = "landweber"
    qualification = math.inf

    def __init__(self, kappa_sq: float = 1.0, gamma: float | None = None):
        super().__init__(kappa_sq)
        if gamma is None:
            gamma = 1.0 / self.kappa_sq
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        if gamma > 1.0 / self.kappa_sq:
            warnings.warn(
                f"gamma={gamma} exceeds 1/kappa_sq={1.0 / self.kappa_sq}; clamping",
                stacklevel=2)
            gamma = 1.0 / self.kappa_sq
        self.gamma = float(gamma)

    def _log_q(self, lam):
        # log(1 - gamma lambda); -inf at gamma lambda = 1 is the correct limit
        with np.errstate(divide="ignore"):
            return np.log1p(-self.gamma * lam)

    def _g_closed(self, j, lam):
        return -np.expm1(j * self._log_q(lam)) / lam

    def _g_series(self, j, lam):
        return self.gamma * j * (1.0 - (j - 1) * self.gamma * lam / 2.0)

    def _gsq_closed(self, j, lam):
        # g_j - g_{j-1} = gamma (1 - gamma lambda)^(j-1), exact telescoping
        if j == 1:
            return np.full_like(lam, self.gamma)
        return self.gamma * np.exp((j - 1) * self._log_q(lam))

    _gsq_series = _gsq_closed

    def _residual(self, j, lam):
        with np.errstate(invalid="ignore"):
            out = np.exp(j * self._log_q(lam))
        # j * log(0) -> 0 * -inf only when j = 0, handled by the caller
        return out

    def descriptor(self) -> dict:
        return {"method": self.name, "kappa_sq": self.kappa_sq, "gamma": self.gamma}


class AsymptoticRegularization(FilterFamily):
    """g_j(lambda) = (1 - e^{-j lambda}) / lambda; qualification infinite."""

    name = "asymptotic"
    qualification = math.inf

    def _g_closed(self, j, lam):
        return -np.expm1(-j * lam) / lam

    def _g_series(self, j, lam):
        return j * (1.0 - j * lam / 2.0)

    def _gsq_closed(self, j, lam):
        return np.exp(-(j - 1) * lam) * (-np.expm1(-lam)) / lam

    def _gsq_series(self, j, lam):
        return 1.0 - (2 * j - 1) * lam / 2.0

    def _residual(self, j, lam):
        return np.exp(-j * lam)


_FAMILIES = {
    "tikhonov": Tikhonov,
    "iterated_tikhonov": IteratedTikhonov,
    "landweber": Landweber,
    "asymptotic": AsymptoticRegularization,
}


def make_family(method: str, kappa_sq: float = 1.0, *, m: int | None = None,
                gamma: float | None = None) -> FilterFamily:
    """Construct a filter family by name with optional parameters."""
    if method not in _FAMILIES:
        raise ValueError(f"unknown filter method {method!r}; "
                         f"choose from {sorted(_FAMILIES)}")
    if method == "iterated_tikhonov":
        return IteratedTikhonov(kappa_sq, m=m if m is not None else 2)
    if method == "landweber":
        return Landweber(kappa_sq, gamma=gamma)
    if m is not None or gamma is not None:
        raise ValueError(f"method {method!r} takes no m/gamma parameters")
    return _FAMILIES[method](kappa_sq)


# ---------------------------------------------------------------------------
# audits


def spectral_grid(kappa_sq: float, size: int = 512, log_floor: float = 1e-6) -> np.ndarray:
    """Logarithmic grid on (0, kappa^2], densest near zero."""
    return kappa_sq * np.logspace(np.log10(log_floor), 0.0, size)


def telescoping_deviation(family: FilterFamily, tau: int,
                          lam: np.ndarray) -> float:
    """max over the grid of |sum_{j<=tau} lambda G_j^2 - lambda g_tau|."""
    lam = np.asarray(lam, dtype=float)
    acc = np.zeros_like(lam)
    worst = 0.0
    for j in range(1, tau + 1):
        acc = acc + lam * family.g_squared(j, lam)
        worst = max(worst, float(np.abs(acc - family.partial_sum(j, lam)).max()))
    return worst


def lipschitz_audit(family: FilterFamily, j: int, grid_size: int = 512) -> float:
    """Max finite-difference slope of lambda -> lambda g_j(lambda) over a
    uniform grid on [0, kappa^2]."""
    if grid_size < 100:
        raise ValueError("grid_size must be at least 100")
    lam = np.linspace(0.0, family.kappa_sq, grid_size)
    vals = lam * np.asarray(family.g(j, lam))
    slopes = np.abs(np.diff(vals)) / np.diff(lam)
    return float(slopes.max())


def qualification_decay_audit(family: FilterFamily, nu: float,
                              j_list: list[int] | np.ndarray,
                              grid_size: int = 2048) -> np.ndarray:
    """Table of (j, sup_lambda lambda^nu r_j(lambda)) over a spectral grid.

    The fitted log-log slope of the second column against the first should
    not exceed -min(nu, qualification) + 0.1; the fit itself is left to the
    caller (see experiments.fit_rate).
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    lam = spectral_grid(family.kappa_sq, grid_size)
    out = np.empty((len(j_list), 2))
    for row, j in enumerate(j_list):
        sup = float((lam**nu * np.asarray(family.residual(int(j), lam))).max())
        out[row] = (j, sup)
    return out
