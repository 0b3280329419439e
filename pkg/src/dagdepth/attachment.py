"""Attachment laws X on [0, 1) and step laws Y = -log X.

Specs are immutable and JSON-serializable::

    {"kind": "uniform"}
    {"kind": "power_tail", "alpha": 2.0}
    {"kind": "exponential", "rate": 1.0}
    {"kind": "lattice", "support": [0, 1], "probs": [0.5, 0.5]}
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, SpecError

# largest double below 1; U**(1/alpha) can round up to 1.0
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class AttachmentSpec:
    """Law of the attachment variable X.

    ``kind`` is ``"uniform"`` or ``"power_tail"``. A power tail with exponent
    ``alpha`` is sampled as ``U**(1/alpha)``, so ``P(X <= t) = t**alpha``
    holds exactly.
    """

    kind: str = "uniform"
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in ("uniform", "power_tail"):
            raise SpecError(f"unknown attachment kind {self.kind!r}")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise SpecError(f"alpha must be positive and finite, got {self.alpha}")
        if self.kind == "uniform" and self.alpha != 1.0:
            raise SpecError("uniform attachment has alpha = 1")

    @classmethod
    def uniform(cls):
        return cls("uniform", 1.0)

    @classmethod
    def power_tail(cls, alpha):
        return cls("power_tail", float(alpha))

    @property
    def tail_exponent(self):
        return self.alpha

    @property
    def density_bound(self):
        """Sup of the density; ``inf`` when alpha < 1 (density blows up at 0)."""
        if self.kind == "uniform":
            return 1.0
        return self.alpha if self.alpha >= 1 else math.inf

    @property
    def mean_log(self):
        """E[-log X]."""
        return 1.0 / self.alpha

    def to_json(self):
        if self.kind == "uniform":
            return {"kind": "uniform"}
        return {"kind": "power_tail", "alpha": self.alpha}

    def label(self):
        return "uniform" if self.kind == "uniform" else f"power:{self.alpha:g}"


@dataclass(frozen=True)
class StepSpec:
    """Law of a nonnegative branching-random-walk step Y.

    Kinds: ``"exponential"`` (``rate``), ``"lattice"`` (``support``/``probs``)
    and ``"from_attachment"`` (``attachment``), the latter being Y = -log X.
    """

    kind: str
    rate: Optional[float] = None
    support: Optional[tuple] = None
    probs: Optional[tuple] = None
    attachment: Optional[AttachmentSpec] = None

    def __post_init__(self):
        if self.kind == "exponential":
            if self.rate is None or not (self.rate > 0 and math.isfinite(self.rate)):
                raise SpecError(f"exponential rate must be positive, got {self.rate}")
        elif self.kind == "lattice":
            if self.support is None or self.probs is None:
                raise SpecError("lattice needs support and probs")
            sup = tuple(float(s) for s in self.support)
            pr = tuple(float(p) for p in self.probs)
            if len(sup) == 0 or len(sup) != len(pr):
                raise SpecError("support and probs must be non-empty and of equal length")
            if any(not math.isfinite(s) or s < 0 for s in sup):
                raise SpecError("lattice support points must be finite and >= 0")
            if any(p < 0 for p in pr):
                raise SpecError("probabilities must be nonnegative")
            if abs(math.fsum(pr) - 1.0) > 1e-12:
                raise SpecError(f"probabilities sum to {math.fsum(pr)!r}, not 1")
            if len(set(sup)) != len(sup):
                raise SpecError("duplicate support points")
            order = sorted(range(len(sup)), key=sup.__getitem__)
            object.__setattr__(self, "support", tuple(sup[i] for i in order))
            object.__setattr__(self, "probs", tuple(pr[i] for i in order))
        elif self.kind == "from_attachment":
            if not isinstance(self.attachment, AttachmentSpec):
                raise SpecError("from_attachment needs an AttachmentSpec")
        else:
            raise SpecError(f"unknown step kind {self.kind!r}")

    @classmethod
    def exponential(cls, rate=1.0):
        return cls("exponential", rate=float(rate))

    @classmethod
    def lattice(cls, support, probs):
        return cls("lattice", support=tuple(support), probs=tuple(probs))

    @classmethod
    def from_attachment(cls, attachment):
        return cls("from_attachment", attachment=attachment)

    def resolved(self):
        """Equivalent spec in law: ``from_attachment`` becomes ``exponential``."""
        if self.kind == "from_attachment":
            return StepSpec.exponential(self.attachment.alpha)
        return self

    @property
    def mean(self):
        return mean_step(self)

    def atoms(self):
        """(support, probs) restricted to positive-mass points, as arrays."""
        sup = np.array(self.support)
        pr = np.array(self.probs)
        keep = pr > 0
        return sup[keep], pr[keep]

    def to_json(self):
        if self.kind == "exponential":
            return {"kind": "exponential", "rate": self.rate}
        if self.kind == "lattice":
            return {"kind": "lattice", "support": list(self.support), "probs": list(self.probs)}
        return {"kind": "from_attachment", "attachment": self.attachment.to_json()}

    def label(self):
        if self.kind == "exponential":
            return f"exp:{self.rate:g}"
        if self.kind == "lattice":
            return "lattice:" + "/".join(f"{s:g}@{p:g}" for s, p in zip(self.support, self.probs))
        return self.attachment.label()


def spec_from_json(obj):
    """Build an :class:`AttachmentSpec` or :class:`StepSpec` from a JSON dict."""
    kind = obj.get("kind")
    if kind == "uniform":
        return AttachmentSpec.uniform()
    if kind == "power_tail":
        return AttachmentSpec.power_tail(obj["alpha"])
    if kind == "exponential":
        return StepSpec.exponential(obj["rate"])
    if kind == "lattice":
        return StepSpec.lattice(obj["support"], obj["probs"])
    if kind == "from_attachment":
        return StepSpec.from_attachment(spec_from_json(obj["attachment"]))
    raise SpecError(f"unknown spec kind {kind!r}")


def as_step(spec):
    """Step law induced by ``spec`` (attachment specs map to Y = -log X)."""
    if isinstance(spec, AttachmentSpec):
        return StepSpec.from_attachment(spec)
    return spec


def sample(spec: AttachmentSpec, rng: np.random.Generator) -> float:
    """Draw one attachment variate in [0, 1)."""
    return float(sample_array(spec, rng, 1)[0])


def sample_array(spec: AttachmentSpec, rng: np.random.Generator, size) -> np.ndarray:
    """Draw ``size`` attachment variates; consumes one double per variate."""
    u = rng.random(size)
    if spec.kind == "uniform" or spec.alpha == 1.0:
        return u
    x = u ** (1.0 / spec.alpha)
    np.minimum(x, _BELOW_ONE, out=x)
    return x


def cumulant(spec: StepSpec, lam: float) -> float:
    """Cumulant generating function log E[exp(lam * Y)]."""
    spec = spec.resolved()
    if lam == 0:
        return 0.0
    if spec.kind == "exponential":
        if lam >= spec.rate:
            raise DomainError(f"cumulant is infinite for lambda >= rate ({lam} >= {spec.rate})")
        return math.log(spec.rate / (spec.rate - lam))
    sup, pr = spec.atoms()
    a = np.log(pr) + lam * sup
    top = a.max()
    return float(top + math.log(np.exp(a - top).sum()))


def cumulant_derivative(spec: StepSpec, lam: float) -> float:
    """Mean of Y under the exponential tilt by ``lam``."""
    spec = spec.resolved()
    if spec.kind == "exponential":
        if lam >= spec.rate:
            raise DomainError("tilt outside the cumulant domain")
        return 1.0 / (spec.rate - lam)
    sup, pr = spec.atoms()
    a = np.log(pr) + lam * sup
    w = np.exp(a - a.max())
    return float((w * sup).sum() / w.sum())


def mean_step(spec: StepSpec) -> float:
    spec = spec.resolved()
    if spec.kind == "exponential":
        return 1.0 / spec.rate
    return math.fsum(s * p for s, p in zip(spec.support, spec.probs))


_libm_log1p = np.frompyfunc(math.log1p, 1, 1)


def neg_log1m(u) -> np.ndarray:
    """``-log(1 - u)`` through the C library, elementwise.

    numpy's vectorized log1p may differ from libm in the last bit; the
    compiled kernels call libm, so both backends go through it.
    """
    return -_libm_log1p(-np.asarray(u, dtype=np.float64)).astype(np.float64)


def sample_steps(spec: StepSpec, u: np.ndarray) -> np.ndarray:
    """Map uniforms in [0, 1) to steps by inverse CDF."""
    spec = spec.resolved()
    if spec.kind == "exponential":
        return neg_log1m(u) / spec.rate
    sup, cdf = lattice_tables(spec)
    idx = np.searchsorted(cdf, u, side="right")
    return sup[np.minimum(idx, sup.size - 1)]


def lattice_tables(spec: StepSpec):
    """Support and cumulative probabilities used by the inverse-CDF sampler."""
    sup, pr = spec.atoms()
    return sup.astype(np.float64), np.cumsum(pr)
