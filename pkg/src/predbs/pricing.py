"""Closed-form call/put pricing with a predictability dividend yield.

Excess predictability p in [-1, 1] enters the classical lognormal pricer as a
continuous dividend yield q = p * sigma^2: positive p drains value from calls
exactly like a dividend stream, negative p adds it.  p = 0 recovers the
classical formula.  sigma is annualized and tau is in years throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateInputError, InputError

__all__ = [
    "PricingInputs",
    "PriceResult",
    "norm_cdf",
    "dividend_yield_due_to_predictability",
    "d_plus_minus",
    "call_price",
    "put_price",
    "dprice_dp",
    "pde_residual",
]

_SQRT2 = math.sqrt(2.0)


def norm_cdf(x: float) -> float:
    """Standard normal CDF via erfc; absolute error below 1e-15 everywhere."""
    if not math.isfinite(x):
        raise InputError(f"norm_cdf requires finite x, got {x}")
    return 0.5 * math.erfc(-x / _SQRT2)


def dividend_yield_due_to_predictability(p: float, sigma: float) -> float:
    """Continuous yield q = p * sigma^2 induced by excess predictability p."""
    if not -1.0 <= p <= 1.0:
        raise InputError(f"p must be in [-1, 1], got {p}")
    if sigma < 0:
        raise InputError("sigma must be >= 0")
    return p * sigma * sigma


@dataclass(frozen=True)
class PricingInputs:
    """One pricing scenario.

    sigma == 0 and tau == 0 are admitted so calibration grids may touch
    expiry; the pricers then return the deterministic payoff limit.
    """

    spot: float
    strike: float
    tau: float
    rate: float
    sigma: float
    p: float = 0.0

    def __post_init__(self):
        vals = (self.spot, self.strike, self.tau, self.rate, self.sigma, self.p)
        if not all(map(math.isfinite, vals)):
            raise InputError("pricing inputs must be finite")
        if self.spot <= 0 or self.strike <= 0:
            raise InputError("spot and strike must be > 0")
        if self.tau < 0:
            raise InputError("tau must be >= 0")
        if self.sigma < 0:
            raise InputError("sigma must be >= 0")
        if not -1.0 <= self.p <= 1.0:
            raise InputError(f"p must be in [-1, 1], got {self.p}")

    @property
    def dividend_yield(self) -> float:
        return dividend_yield_due_to_predictability(self.p, self.sigma)


@dataclass(frozen=True)
class PriceResult:
    price: float
    d_plus: float
    d_minus: float
    dividend_yield: float


def d_plus_minus(inputs: PricingInputs) -> tuple[float, float]:
    """d_+- = [ln(S e^{-q tau} / (K e^{-r tau})) +- sigma^2 tau / 2] / (sigma sqrt(tau))."""
    sig_sqrt_tau = inputs.sigma * math.sqrt(inputs.tau)
    if sig_sqrt_tau == 0.0:
        raise DegenerateInputError("sigma * sqrt(tau) == 0: take the deterministic limit")
    q = inputs.dividend_yield
    log_fwd = math.log(inputs.spot / inputs.strike) + (inputs.rate - q) * inputs.tau
    half_var = 0.5 * inputs.sigma * inputs.sigma * inputs.tau
    return (log_fwd + half_var) / sig_sqrt_tau, (log_fwd - half_var) / sig_sqrt_tau


def _deterministic_call(inputs: PricingInputs) -> PriceResult:
    q = inputs.dividend_yield
    fwd_gap = inputs.spot * math.exp(-q * inputs.tau) - inputs.strike * math.exp(-inputs.rate * inputs.tau)
    price = max(fwd_gap, 0.0)
    d = math.inf if fwd_gap > 0 else -math.inf
    return PriceResult(price=price, d_plus=d, d_minus=d, dividend_yield=q)


def call_price(inputs: PricingInputs) -> PriceResult:
    """Call value S e^{-q tau} Phi(d_+) - K e^{-r tau} Phi(d_-) with q = p sigma^2."""
    if inputs.sigma * math.sqrt(inputs.tau) == 0.0:
        return _deterministic_call(inputs)
    q = inputs.dividend_yield
    dp, dm = d_plus_minus(inputs)
    price = (
        inputs.spot * math.exp(-q * inputs.tau) * norm_cdf(dp)
        - inputs.strike * math.exp(-inputs.rate * inputs.tau) * norm_cdf(dm)
    )
    return PriceResult(price=price, d_plus=dp, d_minus=dm, dividend_yield=q)


def put_price(inputs: PricingInputs) -> PriceResult:
    """Put value K e^{-r tau} Phi(-d_-) - S e^{-q tau} Phi(-d_+).

    Equivalent to dividend-adjusted parity P = C - S e^{-q tau} + K e^{-r tau}.
    """
    q = inputs.dividend_yield
    if inputs.sigma * math.sqrt(inputs.tau) == 0.0:
        fwd_gap = inputs.strike * math.exp(-inputs.rate * inputs.tau) - inputs.spot * math.exp(-q * inputs.tau)
        price = max(fwd_gap, 0.0)
        d = math.inf if fwd_gap > 0 else -math.inf
        return PriceResult(price=price, d_plus=-d, d_minus=-d, dividend_yield=q)
    dp, dm = d_plus_minus(inputs)
    price = (
        inputs.strike * math.exp(-inputs.rate * inputs.tau) * norm_cdf(-dm)
        - inputs.spot * math.exp(-q * inputs.tau) * norm_cdf(-dp)
    )
    return PriceResult(price=price, d_plus=dp, d_minus=dm, dividend_yield=q)


def dprice_dp(inputs: PricingInputs) -> float:
    """Analytic dC/dp = -sigma^2 tau S e^{-p sigma^2 tau} Phi(d_+); strictly negative for sigma, tau > 0."""
    if inputs.sigma * math.sqrt(inputs.tau) == 0.0:
        return 0.0
    dp, _ = d_plus_minus(inputs)
    q = inputs.dividend_yield
    return -inputs.sigma**2 * inputs.tau * inputs.spot * math.exp(-q * inputs.tau) * norm_cdf(dp)


def pde_residual(inputs: PricingInputs, bump: float = 1e-3, pde_p: float | None = None) -> float:
    """Left-hand side of the pricing PDE evaluated with central finite differences.

        0 = dC/dt + dC/dx (r - p sigma^2) x - r C + sigma^2 x^2 / 2 * d2C/dx2

    Time and spot derivatives come from 5-point central stencils with relative
    bumps (h*tau, h*spot), so the residual of the closed form is O(h^4).
    Passing `pde_p` different from inputs.p is a deliberate mismatch probe:
    the residual then picks up (p - pde_p) sigma^2 x dC/dx.
    """
    if bump <= 0 or bump >= 0.25:
        raise InputError("bump must be in (0, 0.25)")
    if inputs.tau < 10.0 * bump:
        raise InputError(f"tau={inputs.tau} too close to expiry for stable differencing")
    if pde_p is None:
        pde_p = inputs.p

    s, tau = inputs.spot, inputs.tau
    ht, hs = bump * tau, bump * s

    def at(spot_x: float, tau_x: float) -> float:
        return call_price(
            PricingInputs(spot=spot_x, strike=inputs.strike, tau=tau_x,
                          rate=inputs.rate, sigma=inputs.sigma, p=inputs.p)
        ).price

    c0 = at(s, tau)
    # dC/dt = -dC/dtau
    dc_dtau = (-at(s, tau + 2 * ht) + 8 * at(s, tau + ht) - 8 * at(s, tau - ht) + at(s, tau - 2 * ht)) / (12 * ht)
    f2p, f1p, f1m, f2m = at(s + 2 * hs, tau), at(s + hs, tau), at(s - hs, tau), at(s - 2 * hs, tau)
    dc_ds = (-f2p + 8 * f1p - 8 * f1m + f2m) / (12 * hs)
    d2c_ds2 = (-f2p + 16 * f1p - 30 * c0 + 16 * f1m - f2m) / (12 * hs * hs)

    sig2 = inputs.sigma * inputs.sigma
    return (
        -dc_dtau
        + dc_ds * (inputs.rate - pde_p * sig2) * s
        - inputs.rate * c0
        + 0.5 * sig2 * s * s * d2c_ds2
    )
