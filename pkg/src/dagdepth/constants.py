"""Rate function and limit constants.

``legendre`` evaluates the convex dual of the step cumulant, and ``gamma``,
``lambda_k``, ``beta`` locate the level crossings that set the limits of
``M_m / m``, ``D_n / log n`` and the minimum depth.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .attachment import (
    AttachmentSpec,
    StepSpec,
    as_step,
    cumulant,
    cumulant_derivative,
    mean_step,
)
from .errors import DomainError, NoRootError

DEFAULT_TOL = 1e-10
BRACKET_CAP = 1e9
GOLDEN_MAX_ITER = 200
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_LOG2 = math.log(2.0)


def golden_max(f, lo, hi, max_iter=GOLDEN_MAX_ITER, xtol=0.0):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= xtol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        if c >= d:
            break
    candidates = [(fc, c), (fd, d), (f(a), a), (f(b), b)]
    fx, x = max(candidates)
    return x, fx


def _check_tol(tol):
    if not (0 < tol <= 1e-4):
        raise DomainError(f"tol must lie in (0, 1e-4], got {tol}")


def _is_fair_bernoulli(spec):
    return spec.kind == "lattice" and spec.support == (0.0, 1.0) and spec.probs == (0.5, 0.5)


def legendre(spec: StepSpec, z: float, tol: float = DEFAULT_TOL) -> float:
    """Convex dual ``sup_lam {lam * z - cumulant(lam)}``.

    Returns ``inf`` where the sup diverges inside the closed support hull
    (exponential steps at ``z = 0``). Raises :class:`DomainError` outside it.
    """
    _check_tol(tol)
    spec = as_step(spec).resolved()
    if spec.kind == "exponential":
        if z < 0:
            raise DomainError(f"z = {z} outside the support of the step law")
        if z == 0:
            return math.inf
        az = spec.rate * z
        return az - 1.0 - math.log(az)

    sup, pr = spec.atoms()
    lo, hi = float(sup[0]), float(sup[-1])
    if z < lo or z > hi:
        raise DomainError(f"z = {z} outside the lattice range [{lo}, {hi}]")
    if lo == hi:
        return 0.0
    if z == lo:
        return -math.log(float(pr[0]))
    if z == hi:
        return -math.log(float(pr[-1]))
    if _is_fair_bernoulli(spec):
        return z * math.log(2 * z) + (1 - z) * math.log(2 * (1 - z))

    mean = mean_step(spec)
    if z == mean:
        return 0.0
    sign = -1.0 if z < mean else 1.0
    near, far = 0.0, sign
    # z - cumulant'(lam) changes sign at the maximizer
    while (z - cumulant_derivative(spec, far)) * sign > 0:
        near, far = far, 2 * far
        if abs(far) > BRACKET_CAP:
            raise NoRootError(f"could not bracket the Legendre maximizer at z = {z}")
    a, b = sorted((near, far))
    _, value = golden_max(lambda lam: lam * z - cumulant(spec, lam), a, b)
    return max(value, 0.0)


def _legendre_or_inf(spec, z, tol):
    try:
        return legendre(spec, z, tol)
    except DomainError:
        return math.inf


def essential_inf(spec: StepSpec) -> float:
    spec = as_step(spec).resolved()
    if spec.kind == "exponential":
        return 0.0
    return float(spec.atoms()[0][0])


def gamma(spec: StepSpec, k: int, tol: float = DEFAULT_TOL) -> float:
    """``inf {z <= E[Y] : legendre(z) < log k}``, the almost-sure limit of M_m / m."""
    _check_tol(tol)
    if k < 1:
        raise DomainError("k must be >= 1")
    spec = as_step(spec).resolved()
    mean = mean_step(spec)
    if k == 1:
        return mean
    logk = math.log(k)
    lo = essential_inf(spec)
    if legendre(spec, lo, tol) <= logk:
        # atom at the infimum with k * P(Y = inf) >= 1
        return lo
    hi = mean
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if legendre(spec, mid, tol) < logk:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def lambda_k(spec: StepSpec, k: int, tol: float = DEFAULT_TOL) -> float:
    """``sup {z >= 1/E[Y] : legendre(1/z) <= log k}``, the limit of D_n / log n.

    For ``k = 1`` the set is the single point ``1/E[Y]``.
    """
    _check_tol(tol)
    if k < 1:
        raise DomainError("k must be >= 1")
    spec = as_step(spec).resolved()
    mean = mean_step(spec)
    if not (0 < mean < math.inf):
        raise DomainError("lambda_k needs 0 < E[Y] < inf")
    start = 1.0 / mean
    if k == 1:
        return start
    logk = math.log(k)

    def below(z):
        return _legendre_or_inf(spec, 1.0 / z, tol) <= logk

    lo, hi = start, 2 * start
    while below(hi):
        lo, hi = hi, 2 * hi
        if hi > BRACKET_CAP:
            raise NoRootError(
                f"legendre(1/z) stays <= log {k} up to z = {BRACKET_CAP:g}; lambda_k is infinite"
            )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if below(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def beta(alpha: float, k: int) -> float:
    """Minimum-depth factor ``max(1 - 1/(k alpha), 0)``."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if k < 2:
        raise DomainError("beta is defined for k >= 2")
    return max(1.0 - 1.0 / (k * alpha), 0.0)


def uniform_equation_residual(z: float, k: int) -> float:
    """``z log(k e / z) - 1``; zero exactly at lambda_k for uniform attachment."""
    if z <= 0:
        raise DomainError("z must be positive")
    return z * math.log(k * math.e / z) - 1.0


@dataclass(frozen=True)
class LimitConstants:
    k: int
    lambda_k: float
    gamma: float
    beta: Optional[float]
    alpha: Optional[float]
    mean_y: float

    @property
    def min_depth_constant(self):
        """beta * lambda_k, the limit of min_half / log n."""
        return None if self.beta is None else self.beta * self.lambda_k

    def to_json(self):
        return asdict(self)


def limit_constants(spec, k: int, tol: float = DEFAULT_TOL) -> LimitConstants:
    """Bundle the constants for an attachment or step spec.

    ``alpha`` is the attachment tail exponent; for exponential steps of rate
    ``a`` it is ``a`` (``P(e^-Y <= t) = t**a``), for lattices it is absent.
    """
    step = as_step(spec).resolved()
    if isinstance(spec, AttachmentSpec):
        alpha = spec.alpha
    elif step.kind == "exponential":
        alpha = step.rate
    else:
        alpha = None
    b = beta(alpha, k) if (alpha is not None and k >= 2) else None
    return LimitConstants(
        k=k,
        lambda_k=lambda_k(step, k, tol),
        gamma=gamma(step, k, tol),
        beta=b,
        alpha=alpha,
        mean_y=mean_step(step),
    )
