"""Quadrature oracles for every fractional operator in the model problem.

These routines never touch the analytic solution formulas.  They apply
the operator *definitions* (weighted convolutions plus ordinary
derivatives) to whatever callable they are handed, which is what lets
the verification layer compare "what the formula claims" against "what
the operator actually does" without circularity.

Conventions.  The right-sided operators live on t < 0 and integrate
from t up to 0; the Erdelyi-Kober family lives on t > 0.  Callables
must accept numpy arrays of evaluation points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .quadrature import QuadratureRule, gauss_jacobi_rule
from .specfun import gamma

__all__ = [
    "OperatorParams",
    "rl_integral_right",
    "ek_integral",
    "ek_derivative",
    "hyper_bessel_caputo",
    "bi_ordinal_hilfer",
]


@dataclass(frozen=True)
class OperatorParams:
    """The five primary exponents of the mixed problem.

    alpha1 in (0, 1] and theta < 1 drive the hyper-Bessel side t > 0;
    alpha2, beta2 in (1, 2] and the interpolation weight mu in [0, 1]
    drive the bi-ordinal Hilfer side t < 0.  Everything else is derived:

    * p = 1 - theta, the power in the substituted time variable t^p;
    * gamma2 = beta2 + mu(2 - beta2), the weight exponent class of the
      t < 0 solutions;
    * delta2 = beta2 + mu(alpha2 - beta2), the effective order of the
      t < 0 mode equation.
    """

    alpha1: float
    theta: float
    alpha2: float
    beta2: float
    mu: float

    def __post_init__(self):
        for name in ("alpha1", "theta", "alpha2", "beta2", "mu"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not 0.0 < self.alpha1 <= 1.0:
            raise ValueError(f"alpha1 must lie in (0, 1], got {self.alpha1}")
        if not self.theta < 1.0:
            raise ValueError(f"theta must be < 1, got {self.theta}")
        if not 1.0 < self.alpha2 <= 2.0:
            raise ValueError(f"alpha2 must lie in (1, 2], got {self.alpha2}")
        if not 1.0 < self.beta2 <= 2.0:
            raise ValueError(f"beta2 must lie in (1, 2], got {self.beta2}")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must lie in [0, 1], got {self.mu}")

    @property
    def p(self) -> float:
        return 1.0 - self.theta

    @property
    def gamma2(self) -> float:
        return self.beta2 + self.mu * (2.0 - self.beta2)

    @property
    def delta2(self) -> float:
        return self.beta2 + self.mu * (self.alpha2 - self.beta2)

    @property
    def hilfer_inner_order(self) -> float:
        """Order of the first (right-RL) integral, (1-mu)(2-beta2)."""
        return (1.0 - self.mu) * (2.0 - self.beta2)

    @property
    def hilfer_outer_order(self) -> float:
        """Order of the last (right-RL) integral, mu(2-alpha2)."""
        return self.mu * (2.0 - self.alpha2)


def rl_integral_right(sigma: float, g, t: float, quad: QuadratureRule = None,
                      *, n: int = 256, singular_exponent: float = 0.0) -> float:
    """Right-sided Riemann-Liouville integral of order sigma at t < 0.

    Computes (1/Gamma(sigma)) * integral_t^0 (s - t)^{sigma-1} g(s) ds
    by substituting s = t(1-x), which turns the kernel singularity into
    the Jacobi weight x^{sigma-1} on [0, 1].

    Parameters
    ----------
    sigma : float
        Integration order, > 0.
    g : callable
        Integrand on [t, 0]; must accept arrays.
    t : float
        Evaluation point, strictly negative.
    quad : QuadratureRule, optional
        Override rule; its exponent pair should be
        (sigma - 1, singular_exponent).
    n : int, optional
        Node count when the rule is built here.
    singular_exponent : float, optional
        Known power q such that g(s) * (-s)^{-q} stays smooth at s -> 0-.
        The rule absorbs (1-x)^q exactly instead of fighting it.
    """
    if sigma <= 0.0:
        raise ValueError(f"integration order must be positive, got {sigma}")
    if not t < 0.0:
        raise ValueError(f"right-sided integral needs t < 0, got {t}")
    q = float(singular_exponent)
    if quad is None:
        quad = gauss_jacobi_rule(n, sigma - 1.0, q)
    x = quad.nodes
    vals = np.asarray(g(t * (1.0 - x)), dtype=float)
    if q != 0.0:
        vals = vals * (1.0 - x) ** (-q)
    return (-t) ** sigma / gamma(sigma) * float(quad.weights @ vals)


def ek_integral(gma: float, delta: float, beta: float, g, t: float,
                quad: QuadratureRule = None, *, n: int = 256,
                singular_exponent: float = 0.0) -> float:
    """Erdelyi-Kober fractional integral I^{gma,delta}_beta g at t > 0.

    After the substitution v = (tau/t)^beta the definition collapses to

        (1/Gamma(delta)) * integral_0^1 (1-v)^{delta-1} v^gma g(t v^{1/beta}) dv

    with every power of t cancelling, so a Gauss-Jacobi rule with pair
    (gma + singular_exponent, delta - 1) does all the work.

    ``singular_exponent`` plays the same role as in rl_integral_right:
    a known power q with g(t v^{1/beta}) ~ v^q near v = 0 (that is,
    g(tau) ~ tau^{q beta}) is folded into the weight.
    """
    if delta <= 0.0:
        raise ValueError(f"integral order must be positive, got {delta}")
    if beta <= 0.0:
        raise ValueError(f"index beta must be positive, got {beta}")
    if not t > 0.0:
        raise ValueError(f"Erdelyi-Kober integral needs t > 0, got {t}")
    q = float(singular_exponent)
    if gma + q <= -1.0:
        raise ValueError("weight exponent gma + singular_exponent must exceed -1")
    if quad is None:
        quad = gauss_jacobi_rule(n, gma + q, delta - 1.0)
    v = quad.nodes
    vals = np.asarray(g(t * v ** (1.0 / beta)), dtype=float)
    if q != 0.0:
        vals = vals * v ** (-q)
    return float(quad.weights @ vals) / gamma(delta)


def ek_derivative(gma: float, delta: float, beta: float, g, t: float,
                  *, n: int = 256, fd_step: float = None,
                  singular_exponent: float = 0.0) -> float:
    """Erdelyi-Kober fractional derivative D^{gma,delta}_beta g at t > 0.

    Applies the product Pi_{j=1..m}(gma + j + (t/beta) d/dt) to the
    integral I^{gma+delta, m-delta}_beta g with m = ceil(delta).  The
    inner integral is smooth in t for the solution class, so the outer
    first-order factors are safe to evaluate by central differences.
    """
    if delta <= 0.0:
        raise ValueError(f"derivative order must be positive, got {delta}")
    if not t > 0.0:
        raise ValueError(f"Erdelyi-Kober derivative needs t > 0, got {t}")
    m = math.ceil(delta)

    if m == delta:
        def inner(s: float) -> float:
            return float(np.asarray(g(np.array([s])))[0])
    else:
        rule = gauss_jacobi_rule(n, gma + delta + float(singular_exponent),
                                 m - delta - 1.0)

        def inner(s: float) -> float:
            return ek_integral(gma + delta, m - delta, beta, g, s,
                               quad=rule, singular_exponent=singular_exponent)

    def factored(j: int, s: float) -> float:
        # (gma + j + (s/beta) d/ds) applied to the (j-1)-fold composite.
        f = inner if j == 1 else (lambda x: factored(j - 1, x))
        h = fd_step if fd_step is not None else max(1e-6, 1e-3 * s)
        h = min(h, 0.45 * s)
        deriv = (f(s + h) - f(s - h)) / (2.0 * h)
        if not math.isfinite(deriv):
            raise NumericError(f"finite difference failed at t={s:.3e}")
        return (gma + j) * f(s) + (s / beta) * deriv

    return factored(m, float(t))


def hyper_bessel_caputo(op: OperatorParams, u, u0: float, t: float,
                        *, n: int = 256, fd_step: float = None) -> float:
    """Regularized hyper-Bessel Caputo derivative of order alpha1 at t > 0.

    Evaluates p^{alpha1} t^{-p alpha1} D^{-alpha1, alpha1}_p (u - u0)
    with p = 1 - theta.  Subtracting u(0) first is what makes the
    operator kill constants; pass the true initial value as ``u0``.

    The solution class behaves like t^{p alpha1} near zero, so the inner
    Erdelyi-Kober integral gets that exponent absorbed into its rule.
    """
    a = op.alpha1
    p = op.p
    if not t > 0.0:
        raise ValueError(f"hyper-Bessel derivative needs t > 0, got {t}")

    def w(s):
        return np.asarray(u(s), dtype=float) - u0

    if a == 1.0:
        # The operator degenerates to t^theta d/dt.
        h = fd_step if fd_step is not None else max(1e-8, 1e-4 * t)
        h = min(h, 0.45 * t)
        d1 = (float(w(np.array([t + h]))[0]) - float(w(np.array([t - h]))[0])) / (2.0 * h)
        d2 = (float(w(np.array([t + h / 2]))[0]) - float(w(np.array([t - h / 2]))[0])) / h
        return t ** op.theta * ((4.0 * d2 - d1) / 3.0)

    rule = gauss_jacobi_rule(n, a, -a)  # pair (0 + alpha1, (1-alpha1) - 1)

    def inner(s: float) -> float:
        return ek_integral(0.0, 1.0 - a, p, w, s, quad=rule,
                           singular_exponent=a)

    h = fd_step if fd_step is not None else max(1e-6, 1e-3 * t)
    h = min(h, 0.45 * t)
    deriv = (inner(t + h) - inner(t - h)) / (2.0 * h)
    value = (1.0 - a) * inner(t) + (t / p) * deriv
    return p ** a * t ** (-p * a) * value


def bi_ordinal_hilfer(op: OperatorParams, u, t: float,
                      quad: QuadratureRule = None, *, n: int = 256,
                      inner_exponent: float = 0.0,
                      outer_exponent: float = None,
                      fd_step: float = None) -> float:
    """Right-sided bi-ordinal Hilfer derivative at t < 0.

    Composition I^{c}_{0-} (d/dt)^2 I^{a}_{0-} u with inner order
    a = (1-mu)(2-beta2) and outer order c = mu(2-alpha2).  The inner
    integral is evaluated by rl_integral_right, its second derivative
    by a central difference whose step shrinks with the sample point so
    the stencil never crosses t = 0, and the outer integral by another
    Jacobi rule.

    Parameters
    ----------
    inner_exponent : float, optional
        Power q with u(s) ~ (-s)^q near 0-; forwarded to the inner rule.
    outer_exponent : float, optional
        Power e with (d/ds)^2 I^a u ~ (-s)^e near 0-.  When omitted it
        is inferred for the plain power class (e = q + a - 2, clipped
        at 0 for functions whose inner image is smooth); the weighted
        solution class needs the caller to pass its own exponent, since
        the Mittag-Leffler structure is not visible from q alone.
    fd_step : float, optional
        Fixed second-difference step; default scales as 3e-3 |s|.

    Raises
    ------
    NumericError
        If t sits so close to 0 that no finite-difference stencil fits.
    """
    if not t < 0.0:
        raise ValueError(f"bi-ordinal derivative needs t < 0, got {t}")
    if -t < 1e-4:
        raise NumericError(
            f"evaluation point t={t:.3e} is too close to 0: the interior "
            f"finite-difference step underflows; use |t| >= 1e-4"
        )
    a = op.hilfer_inner_order
    c = op.hilfer_outer_order
    q = float(inner_exponent)

    if a == 0.0:
        def inner(s: float) -> float:
            return float(np.asarray(u(np.array([s])))[0])
        e_default = max(q - 2.0, 0.0)
    else:
        rule_in = gauss_jacobi_rule(n, a - 1.0, q)

        def inner(s: float) -> float:
            return rl_integral_right(a, u, s, quad=rule_in,
                                     singular_exponent=q)
        e_default = q + a - 2.0
        if e_default > -0.25:
            # inner image at least this smooth; do not absorb anything
            e_default = 0.0

    e = float(outer_exponent) if outer_exponent is not None else e_default
    if e <= -1.0:
        raise ValueError(
            f"outer integrand exponent {e:.3f} is not integrable; u decays "
            f"too slowly at 0- for the integral composition to exist"
        )

    def second(s: float) -> float:
        h = fd_step if fd_step is not None else 3e-3 * abs(s)
        h = min(h, 0.3 * abs(s))
        if h <= 0.0 or s + h >= 0.0:
            raise NumericError(
                f"second-difference stencil at s={s:.3e} would cross t=0"
            )
        up = inner(s + h)
        u0 = inner(s)
        um = inner(s - h)
        return (up - 2.0 * u0 + um) / (h * h)

    if c == 0.0:
        return second(float(t))

    if quad is None:
        quad = gauss_jacobi_rule(n, c - 1.0, e)
    x = quad.nodes
    vals = np.array([second(float(t * (1.0 - xi))) for xi in x])
    if e != 0.0:
        vals = vals * (1.0 - x) ** (-e)
    return (-t) ** c / gamma(c) * float(quad.weights @ vals)
