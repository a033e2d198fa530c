"""Radial weight functions and the scalar positivity criteria built on them.

Catalogue weights are stored in log form, ``log w(r) = sum_i c_i f_i(r)``
with each ``f_i`` drawn from a small set of elementary terms.  Keeping the
terms symbolic lets ``b**2 / a**2`` be formed after cancelling shared
factors (``exp(tau r**alpha / 2)`` appears in both weights of several pairs),
so the scalar ``M(r)`` stays accurate far out in ``r`` where the weights
themselves overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

# term kind -> (f, f', f'')
_TERMS: dict[str, tuple[Callable, Callable, Callable]] = {
    "log_r": (np.log, lambda r: 1.0 / r, lambda r: -1.0 / r**2),
    "log1p_r2": (
        lambda r: np.log1p(r * r),
        lambda r: 2.0 * r / (1.0 + r * r),
        lambda r: 2.0 * (1.0 - r * r) / (1.0 + r * r) ** 2,
    ),
    "log_sq": (
        lambda r: np.log(r) ** 2,
        lambda r: 2.0 * np.log(r) / r,
        lambda r: 2.0 * (1.0 - np.log(r)) / r**2,
    ),
}


@dataclass(frozen=True)
class LogTerm:
    """``coeff * f(r)``; kind ``pow`` means ``f(r) = r**exponent``."""

    kind: str
    coeff: float
    exponent: float = 0.0

    def key(self) -> tuple[str, float]:
        return (self.kind, self.exponent if self.kind == "pow" else 0.0)

    def _fns(self):
        if self.kind == "pow":
            e = self.exponent
            return (lambda r: r**e, lambda r: e * r ** (e - 1), lambda r: e * (e - 1) * r ** (e - 2))
        return _TERMS[self.kind]

    def value(self, r):
        return self.coeff * self._fns()[0](r)

    def d1(self, r):
        return self.coeff * self._fns()[1](r)

    def d2(self, r):
        return self.coeff * self._fns()[2](r)


def _merge(terms) -> tuple[LogTerm, ...]:
    acc: dict[tuple[str, float], float] = {}
    for t in terms:
        acc[t.key()] = acc.get(t.key(), 0.0) + t.coeff
    return tuple(LogTerm(k, c, e) for (k, e), c in sorted(acc.items()) if c != 0.0)


def _sum(terms, attr: str, r):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    for t in terms:
        out = out + getattr(t, attr)(r)
    return out


@dataclass(frozen=True)
class RadialPhase:
    """A radial function phi(r) with analytic phi' and phi''."""

    label: str
    terms: tuple[LogTerm, ...]

    def __call__(self, r):
        return _sum(self.terms, "value", r)

    def d1(self, r):
        return _sum(self.terms, "d1", r)

    def d2(self, r):
        return _sum(self.terms, "d2", r)


PHASES = {
    "linear": RadialPhase("r", (LogTerm("pow", 1.0, 1.0),)),
    "quadratic": RadialPhase("r^2", (LogTerm("pow", 1.0, 2.0),)),
    "log": RadialPhase("log r", (LogTerm("log_r", 1.0),)),
    "log_sq": RadialPhase("(log r)^2", (LogTerm("log_sq", 1.0),)),
}


def phase_by_name(name: str) -> RadialPhase:
    try:
        return PHASES[name]
    except KeyError:
        raise ValueError(f"unknown phase {name!r}; known: {sorted(PHASES)}") from None


@dataclass(frozen=True)
class RadialWeight:
    """A positive C^2 radial weight.

    Internally described by ``log w`` and its first two derivatives;
    ``w``, ``w'`` and ``w''`` are recovered from them.  ``terms`` is set for
    catalogue weights and enables exact cancellation in weight ratios.
    """

    label: str
    log_value: Callable = field(repr=False)
    dlog: Callable = field(repr=False)
    ddlog: Callable = field(repr=False)
    params: dict = field(default_factory=dict, compare=False)
    terms: tuple[LogTerm, ...] | None = None

    @classmethod
    def from_terms(cls, label: str, terms, params: dict | None = None) -> "RadialWeight":
        terms = _merge(terms)
        return cls(
            label=label,
            log_value=lambda r: _sum(terms, "value", r),
            dlog=lambda r: _sum(terms, "d1", r),
            ddlog=lambda r: _sum(terms, "d2", r),
            params=dict(params or {}),
            terms=terms,
        )

    @classmethod
    def from_functions(
        cls,
        label: str,
        value: Callable,
        d1: Callable,
        d2: Callable,
        params: dict | None = None,
        validate_at=None,
    ) -> "RadialWeight":
        """Wrap user-supplied ``w, w', w''``.

        If ``validate_at`` is given, the weight must be positive there and
        pass :func:`check_derivatives`.
        """

        def log_value(r):
            v = np.asarray(value(r), dtype=float)
            if np.any(v <= 0):
                raise ValueError(f"weight {label!r} is not positive on the sampled radii")
            return np.log(v)

        def dlog(r):
            return np.asarray(d1(r), dtype=float) / np.asarray(value(r), dtype=float)

        def ddlog(r):
            v = np.asarray(value(r), dtype=float)
            g = np.asarray(d1(r), dtype=float) / v
            return np.asarray(d2(r), dtype=float) / v - g * g

        w = cls(label=label, log_value=log_value, dlog=dlog, ddlog=ddlog, params=dict(params or {}))
        if validate_at is not None:
            log_value(np.asarray(validate_at, dtype=float))
            err = check_derivatives(w, validate_at)
            if err > 1e-6:
                raise ValueError(
                    f"weight {label!r}: analytic derivatives disagree with finite differences "
                    f"(relative error {err:.3g} > 1e-6)"
                )
        return w

    def __call__(self, r):
        return np.exp(self.log_value(r))

    def d1(self, r):
        return self(r) * self.dlog(r)

    def d2(self, r):
        g = self.dlog(r)
        return self(r) * (self.ddlog(r) + g * g)


def log_ratio(b: RadialWeight, a: RadialWeight, r):
    """log(b(r) / a(r)), cancelling shared catalogue terms symbolically."""
    if b.terms is not None and a.terms is not None:
        diff = _merge(b.terms + tuple(LogTerm(t.kind, -t.coeff, t.exponent) for t in a.terms))
        return _sum(diff, "value", r)
    return np.asarray(b.log_value(r)) - np.asarray(a.log_value(r))


def check_derivatives(w: RadialWeight, r_samples, rel_step: float = 1e-5) -> float:
    """Worst relative disagreement of ``w'`` and ``w''`` with finite differences.

    Uses the fourth-order centred stencil with step ``h = rel_step * max(1, r)``;
    ``w'`` is compared against differences of ``w`` and ``w''`` against
    differences of ``w'``.  Radii where ``w`` overflows are skipped.  Errors are
    relative to the larger of the analytic derivative and its natural scale,
    ``w / r`` for the first and ``w / r**2`` for the second, so zeros of a
    derivative do not turn roundoff into a failure.
    """
    r = np.asarray(r_samples, dtype=float)
    h = rel_step * np.maximum(1.0, r)

    def stencil(f):
        return (-f(r + 2 * h) + 8 * f(r + h) - 8 * f(r - h) + f(r - 2 * h)) / (12 * h)

    with np.errstate(over="ignore", invalid="ignore"):
        v = w(r)
        fd1, fd2 = stencil(w), stencil(w.d1)
        a1, a2 = w.d1(r), w.d2(r)
    ok = np.isfinite(v) & np.isfinite(fd1) & np.isfinite(fd2) & np.isfinite(a1) & np.isfinite(a2)
    if not np.any(ok):
        raise ValueError("weight overflows at every sampled radius")
    floor = np.abs(v[ok]) / r[ok]
    e1 = np.abs(a1[ok] - fd1[ok]) / np.maximum(np.abs(a1[ok]), floor)
    e2 = np.abs(a2[ok] - fd2[ok]) / np.maximum(np.abs(a2[ok]), floor / r[ok])
    return float(max(e1.max(), e2.max()))


@dataclass(frozen=True)
class WeightPair:
    """Weights for ``c ||a u|| <= ||b H u||``.

    ``pairing="half_power"`` asserts ``b = r**(1/2) a`` and is checked on
    construction.
    """

    a: RadialWeight
    b: RadialWeight
    pairing: str = "general"

    def __post_init__(self):
        if self.pairing not in ("general", "half_power"):
            raise ValueError(f"pairing must be 'general' or 'half_power', got {self.pairing!r}")
        if self.pairing == "half_power":
            r = np.geomspace(1e-2, 1e2, 65)
            defect = np.abs(np.expm1(0.5 * np.log(r) - log_ratio(self.b, self.a, r)))
            if defect.max() > 1e-10:
                raise ValueError("half_power pairing requires b(r) = r**0.5 * a(r)")


def log_samples(r_lo: float, r_hi: float, per_decade: int = 512) -> np.ndarray:
    """Log-spaced radii covering ``[r_lo, r_hi]`` with ``per_decade`` points per decade."""
    if not (0 < r_lo < r_hi):
        raise ValueError(f"need 0 < r_lo < r_hi, got ({r_lo}, {r_hi})")
    num = max(2, int(math.ceil(per_decade * math.log10(r_hi / r_lo))) + 1)
    return np.geomspace(r_lo, r_hi, num)


def _radii(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radii must be positive")
    return r


def _check_positive(w: RadialWeight, r):
    lv = np.asarray(w.log_value(r))
    if not np.all(np.isfinite(lv) | (lv == np.inf)):
        raise ValueError(f"weight {w.label!r} is not positive at the sampled radii")


def radial_B_coefficient(b: RadialWeight, r):
    """b'(r) / b(r): the scalar multiplying alpha_hat in B for a radial b."""
    r = _radii(r)
    _check_positive(b, r)
    return b.dlog(r)


def radial_M0(b: RadialWeight, r):
    """(r b'/b)' evaluated from the analytic log-derivatives."""
    r = _radii(r)
    _check_positive(b, r)
    return b.dlog(r) + r * b.ddlog(r)


def radial_M(pair: WeightPair, r):
    """M(r) = r^-1 (r b'/b)' b^2 / a^2."""
    r = _radii(r)
    _check_positive(pair.a, r)
    return radial_M0(pair.b, r) / r * np.exp(2.0 * log_ratio(pair.b, pair.a, r))


def radial_condition_c(b: RadialWeight, r_samples) -> float:
    """min over the samples of (r b'/b)' - 1."""
    r = _radii(r_samples)
    if r.size == 0:
        raise ValueError("empty sample list")
    return float(np.min(radial_M0(b, r) - 1.0))


def gamma_condition(phi: RadialPhase, r_samples) -> float:
    """min over the samples of phi''(r) r + phi'(r)."""
    r = _radii(r_samples)
    if r.size == 0:
        raise ValueError("empty sample list")
    return float(np.min(phi.d2(r) * r + phi.d1(r)))


# --- catalogue -------------------------------------------------------------


def power_weight(s: float) -> RadialWeight:
    return RadialWeight.from_terms(f"r^{s:g}", [LogTerm("log_r", float(s))], {"s": s})


def japanese_weight(tau: float) -> RadialWeight:
    """(1 + r^2)^(tau/2)."""
    return RadialWeight.from_terms(f"(1+r^2)^({tau:g}/2)", [LogTerm("log1p_r2", tau / 2.0)], {"tau": tau})


def exp_phase_weight(phase: RadialPhase, scale: float, power: float = 0.0) -> RadialWeight:
    """r^power * exp(scale * phi(r))."""
    terms = [LogTerm(t.kind, scale * t.coeff, t.exponent) for t in phase.terms]
    terms.append(LogTerm("log_r", float(power)))
    label = f"r^{power:g} exp({scale:g} {phase.label})" if power else f"exp({scale:g} {phase.label})"
    return RadialWeight.from_terms(label, terms, {"scale": scale, "power": power})


def example_41_pair(tau: float) -> WeightPair:
    """b = (1+r^2)^(tau/2), a = (1+r^2)^((tau-2)/2); M = 2 tau."""
    return WeightPair(a=japanese_weight(tau - 2.0), b=japanese_weight(tau))


def example_42_pair(tau: float, alpha: float) -> WeightPair:
    """b = exp(tau r^alpha / 2), a = r^((alpha-2)/2) b; M = tau alpha^2 / 2."""
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    ph = RadialPhase(f"r^{alpha:g}", (LogTerm("pow", 1.0, float(alpha)),))
    return WeightPair(
        a=exp_phase_weight(ph, tau / 2.0, power=(alpha - 2.0) / 2.0),
        b=exp_phase_weight(ph, tau / 2.0),
    )


def log_weight_pair(tau: float) -> WeightPair:
    """b = exp(tau (log r)^2 / 2), a = b / r; M = tau."""
    ph = PHASES["log_sq"]
    return WeightPair(a=exp_phase_weight(ph, tau / 2.0, power=-1.0), b=exp_phase_weight(ph, tau / 2.0))


def carleman_phase_pair(phase: RadialPhase, tau: float) -> WeightPair:
    """b = exp(tau phi), a = r^(-1/2) b (half-power pairing)."""
    return WeightPair(
        a=exp_phase_weight(phase, tau, power=-0.5),
        b=exp_phase_weight(phase, tau),
        pairing="half_power",
    )


def power_pair(tau: float) -> WeightPair:
    """a = r^(tau/2), b = r^((tau+2)/2); M vanishes identically."""
    return WeightPair(a=power_weight(tau / 2.0), b=power_weight((tau + 2.0) / 2.0))
