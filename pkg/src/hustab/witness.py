"""Adversarial perturbations witnessing instability, and the brute-force
best-shadow oracle used as ground truth.

The witness plans realize the instability constructions: a constant
budget-saturating r_n for real positive coefficients, the phase-aligned
r_j = epsilon p(j+1, 1) / |p(j+1, 1)| that turns the error series
p(n+1, 1) [ (w_1 - z_1) + sum_j r_j / p(j+1, 1) ] + r_n into a real,
positive, maximal sum, and the product-scaled r_n = (C epsilon / M) p(n, 1)
with M the product supremum over the horizon. Divergence is evidenced
operationally: the min-max value of the best shadow over doubling
horizons grows without bound, matching the n p(n, 1) growth mechanism of
the accumulated residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classify import UNSTABLE_CRITERIA
from .dynamics import PerturbedOrbit, _series_term_logs, perturbed_orbit
from .errors import IndexOutOfRange, NotUnstable
from .products import (
    PartialProductLedger,
    build_ledger,
    reciprocal_product_sum,
    scaled_cumsum,
)
from .sequences import CoefficientSpec

_LN10 = math.log(10.0)

PLAN_VARIANTS = ("constant_eps", "phase_aligned", "scaled_product")

# Fraction of the reciprocal-product sum allowed to arrive in the second
# half of the horizon before the sum counts as convergent. A convergent
# sum starves the phase-aligned construction (its divergence rate drops
# below linear), so those specs get the product-scaled plan instead.
RECIP_CONVERGED_FRACTION = 0.01


@dataclass(frozen=True)
class PerturbationPlan:
    """Recipe for the perturbations r_n; realized values satisfy |r_n| <= epsilon.

    M is the product supremum sup_n |p(n, 1)| over the horizon (linear
    scale, for reporting) and log_M its exact log-domain channel; both are
    meaningful for the scaled_product variant only, as is C in (0, 1].
    """

    variant: str
    epsilon: float
    C: float | None = None
    M: float | None = None
    log_M: float | None = None

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "epsilon": self.epsilon,
            "C": self.C,
            "M": self.M,
        }


@dataclass(frozen=True)
class OracleResult:
    """Optimal shadow start and the min-max tracking error it achieves."""

    z1: complex
    d: complex          # w_1 - z_1 at the optimum
    value: float        # min over d of max_{2<=n<=N} |p(n,1) d + R_{n-1}|
    log10_value: float


@dataclass(frozen=True)
class DivergenceCurve:
    """Best-shadow oracle values over a grid of prefix horizons.

    Values are cumulative maxima over the sampled prefixes, matching the
    monotonicity of the underlying quantity.
    """

    ns: np.ndarray
    values: np.ndarray

    def growth_factor(self) -> tuple[int, int, float]:
        """(from_n, to_n, factor) comparing the last prefix to the one
        nearest a quarter of it."""
        to_n = int(self.ns[-1])
        target = to_n / 4.0
        i = int(np.argmin(np.abs(self.ns.astype(float) - target)))
        from_n, from_v, to_v = int(self.ns[i]), float(self.values[i]), float(self.values[-1])
        if from_v == 0.0:
            return from_n, to_n, (1.0 if to_v == 0.0 else math.inf)
        return from_n, to_n, to_v / from_v

    def to_csv(self) -> str:
        lines = ["n,d_n,log10_d_n"]
        with np.errstate(divide="ignore"):
            logs = np.log10(self.values)
        for n, v, lg in zip(self.ns, self.values, logs):
            lines.append(f"{int(n)},{float(v)!r},{float(lg)!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class WitnessRun:
    orbit: PerturbedOrbit
    curve: DivergenceCurve


def reciprocal_sum_converged(ledger: PartialProductLedger, horizon: int | None = None) -> bool:
    """True when the reciprocal-product sum has numerically saturated."""
    h = min(horizon or ledger.horizon, ledger.horizon)
    full = reciprocal_product_sum(ledger, h + 1)
    half = reciprocal_product_sum(ledger, max(2, h // 2))
    return (full - half) <= RECIP_CONVERGED_FRACTION * full


def make_witness(
    spec: CoefficientSpec,
    ledger: PartialProductLedger,
    criterion: str,
    epsilon: float,
    variant: str | None = None,
) -> PerturbationPlan:
    """Build the perturbation plan matching an Unstable criterion.

    linear_growth_products gets the product-scaled plan with C = 1 and M
    read off the ledger. The subexponential and bounded-products criteria
    get the phase-aligned plan, except that a numerically convergent
    reciprocal-product sum (products growing, just subexponentially)
    starves phase alignment of its linear divergence, so the
    product-scaled plan is used there as well. constant_eps can be
    requested explicitly for specs whose partial products are real and
    positive, where it coincides with phase alignment.
    """
    if criterion not in UNSTABLE_CRITERIA:
        raise NotUnstable(f"{criterion!r} is not an instability criterion")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if variant is not None:
        if variant not in PLAN_VARIANTS:
            raise ValueError(f"unknown plan variant {variant!r}")
        if variant == "constant_eps" and not _real_positive_products(ledger):
            raise ValueError("constant_eps needs real positive partial products")
        if variant == "scaled_product":
            return _scaled_plan(ledger, epsilon)
        return PerturbationPlan(variant=variant, epsilon=float(epsilon))
    if criterion == "linear_growth_products":
        return _scaled_plan(ledger, epsilon)
    if reciprocal_sum_converged(ledger):
        return _scaled_plan(ledger, epsilon)
    return PerturbationPlan(variant="phase_aligned", epsilon=float(epsilon))


def _scaled_plan(ledger: PartialProductLedger, epsilon: float, C: float = 1.0) -> PerturbationPlan:
    log_m = float(np.max(ledger.logmag[1:]))
    m_lin = math.exp(log_m) if log_m < 709.0 else math.inf
    return PerturbationPlan(variant="scaled_product", epsilon=float(epsilon), C=C, M=m_lin, log_M=log_m)


def _real_positive_products(ledger: PartialProductLedger) -> bool:
    ph = ledger.phase[1:]
    return bool(np.max(np.abs(np.remainder(ph + math.pi, 2 * math.pi) - math.pi)) < 1e-12)


def _clip_budget(r: np.ndarray, epsilon: float) -> np.ndarray:
    """Pull any rounding overshoot back strictly inside the budget."""
    mag = np.abs(r[1:])
    bad = mag > epsilon
    if np.any(bad):
        r[1:][bad] *= (epsilon / mag[bad]) * (1.0 - 1e-15)
    return r


def realize_plan(plan: PerturbationPlan, ledger: PartialProductLedger, N: int) -> np.ndarray:
    """Materialize r_1..r_{N-1} (index-aligned, slot 0 padding)."""
    if ledger.horizon + 1 < N:
        raise IndexOutOfRange(f"ledger horizon {ledger.horizon} too small for N={N}")
    eps = plan.epsilon
    r = np.empty(N, dtype=complex)
    r[0] = np.nan
    if plan.variant == "constant_eps":
        r[1:] = eps
    elif plan.variant == "phase_aligned":
        # r_j = eps * p(j+1, 1) / |p(j+1, 1)|: unit-modulus phase rotations
        r[1:] = eps * np.exp(1j * ledger.phase[2 : N + 1])
    elif plan.variant == "scaled_product":
        # r_n = (C eps / M) p(n, 1), staged as exp(L_n - log M)
        with np.errstate(under="ignore"):
            r[1:] = (plan.C * eps) * np.exp((ledger.logmag[1:N] - plan.log_M) + 1j * ledger.phase[1:N])
    else:
        raise ValueError(f"unknown plan variant {plan.variant!r}")
    return _clip_budget(r, eps)


def _argmin_lex(grid: np.ndarray, vals: np.ndarray) -> int:
    """Index of the minimum value; ties resolve to smallest (Re d, Im d)."""
    m = np.min(vals)
    idx = np.flatnonzero(vals == m)
    if len(idx) == 1:
        return int(idx[0])
    sub = grid[idx]
    order = np.lexsort((sub.imag, sub.real))
    return int(idx[order[0]])


class _Objective:
    """log of max_{2<=n<=N} |p(n, 1) d + R_{n-1}|, evaluated on d-batches.

    Stored as R_{n-1} = p(n, 1) S_{n-1} with the prefix series S in scaled
    form, so the evaluation never forms an out-of-range linear value:
    log F = max_n [ L_n + sigma_{n-1} + log |d e^{-sigma_{n-1}} + s_{n-1}| ].
    """

    def __init__(self, ledger: PartialProductLedger, r: np.ndarray, N: int):
        log_mag, phase = _series_term_logs(ledger, r, N)
        scale, mant = scaled_cumsum(log_mag, phase)
        self.Ln = np.asarray(ledger.logmag[2 : N + 1])  # n = 2..N
        self.sigma = scale[1:N]
        self.mant = mant[1:N]
        with np.errstate(under="ignore"):
            self.shrink = np.exp(-self.sigma)  # sigma >= 0 by construction
        with np.errstate(divide="ignore"):
            self.log_r_max = float(np.max(self.Ln + self.sigma + np.log(np.abs(self.mant))))
        # S_{N-1} in linear scale where representable (series seed)
        tail_log = scale[N - 1] + math.log(abs(mant[N - 1])) if abs(mant[N - 1]) > 0 else -math.inf
        self.series_seed = (
            -(math.exp(scale[N - 1]) * mant[N - 1]) if tail_log < 300.0 else None
        )

    def log_value(self, d: np.ndarray) -> np.ndarray:
        out = np.empty(len(d))
        chunk = max(1, int(2_000_000 // max(1, len(self.Ln))))
        for s in range(0, len(d), chunk):
            block = d[s : s + chunk, None]
            with np.errstate(divide="ignore", under="ignore"):
                logs = self.Ln[None, :] + self.sigma[None, :] + np.log(
                    np.abs(block * self.shrink[None, :] + self.mant[None, :])
                )
            out[s : s + chunk] = np.max(logs, axis=1)
        return out


def _refine(obj: _Objective, center: complex, half: float, max_rounds: int = 80):
    """Shrinking 17x17 grid search around a start point.

    The objective is a max of moduli of affine functions of d, hence
    convex; the window walks while the best point sits on its boundary
    and shrinks otherwise, until the window is negligible or the value
    stalls.
    """
    xs = np.linspace(-1.0, 1.0, 17)
    offsets = (xs[:, None] + 1j * xs[None, :]).ravel()
    best_d = center
    best_v = float(obj.log_value(np.array([center]))[0])
    stall = 0
    for _ in range(max_rounds):
        if half <= 0.0 or not math.isfinite(half):
            break
        grid = center + offsets * half
        vals = obj.log_value(grid)
        i = _argmin_lex(grid, vals)
        cand, cv = complex(grid[i]), float(vals[i])
        if cv < best_v:
            improved = best_v - cv > 1e-7
            best_d, best_v = cand, cv
            stall = 0 if improved else stall + 1
        else:
            stall += 1
        on_edge = max(abs(cand.real - center.real), abs(cand.imag - center.imag)) >= half * 0.93
        center = cand
        if not on_edge:
            half *= 0.35
        if stall >= 4 or half < 1e-9 * (abs(center) + 1e-300):
            break
    return best_d, best_v


def best_shadow_oracle(
    orbit: PerturbedOrbit,
    spec: CoefficientSpec,
    ledger: PartialProductLedger,
    N: int,
) -> OracleResult:
    """Minimize over z_1 the worst tracking error of any exact solution.

    Exact shadow optimality over all solution sequences: z is determined
    by z_1, and the error at index n is p(n, 1)(w_1 - z_1) + R_{n-1}, so
    the problem is a min-max of moduli of affine functions of the single
    complex unknown d = w_1 - z_1. Coarse grid over a disc of radius
    2 max_n |R_{n-1}| / max(1, min_n |p(n, 1)|), then local refinement;
    the refinement is additionally started from d = 0 and from the
    truncated reciprocal series, whose basin the coarse cells cannot
    resolve when the products expand. Deterministic; grid ties resolve to
    the smallest (Re d, Im d).
    """
    if N < 2 or N > len(orbit):
        raise IndexOutOfRange(f"need 2 <= N <= orbit length, got N={N}")
    if ledger.horizon + 1 < N:
        raise IndexOutOfRange(f"ledger horizon {ledger.horizon} too small for N={N}")
    obj = _Objective(ledger, orbit.perturbations, N)
    if obj.log_r_max == -math.inf:
        return OracleResult(z1=orbit.w1, d=0.0 + 0.0j, value=0.0, log10_value=-math.inf)

    log_min_p = float(np.min(ledger.logmag[1 : N + 1]))
    log_radius = math.log(2.0) + obj.log_r_max - max(0.0, log_min_p)
    radius = math.exp(min(log_radius, 690.0))

    xs = np.linspace(-radius, radius, 64)
    coarse = (xs[:, None] + 1j * xs[None, :]).ravel()
    cvals = obj.log_value(coarse)
    i = _argmin_lex(coarse, cvals)
    cell = 2.0 * radius / 63.0

    starts = [(complex(coarse[i]), cell)]
    starts.append((0.0 + 0.0j, max(cell / 64.0, 1e-12 * radius)))
    if obj.series_seed is not None:
        d0 = obj.series_seed
        starts.append((d0, max(abs(d0) * 0.5, cell / 64.0, 1e-300)))

    best_d, best_v = complex(coarse[i]), float(cvals[i])
    for c0, h0 in starts:
        d, v = _refine(obj, c0, h0)
        if v < best_v or (v == best_v and (d.real, d.imag) < (best_d.real, best_d.imag)):
            best_d, best_v = d, v
    with np.errstate(over="ignore"):
        value = float(np.exp(best_v))
    return OracleResult(z1=orbit.w1 - best_d, d=best_d, value=value, log10_value=best_v / _LN10)


def default_prefixes(N: int) -> list[int]:
    """Geometric prefix grid for divergence curves, always containing
    N // 4 and N."""
    ns = {N, max(2, N // 4)}
    n = max(4, N // 64)
    while n < N:
        ns.add(n)
        n *= 2
    return sorted(ns)


def run_witness(
    spec: CoefficientSpec,
    plan: PerturbationPlan,
    w1: complex,
    N: int,
    ledger: PartialProductLedger | None = None,
    prefixes: list[int] | None = None,
) -> WitnessRun:
    """Materialize the perturbed orbit and its divergence curve.

    The curve reports the best-shadow oracle restricted to prefixes of the
    orbit, on a geometric grid of prefix lengths; it is nondecreasing in n
    because longer prefixes only add constraints to the min-max.
    """
    if N < 2:
        raise IndexOutOfRange(f"need N >= 2, got {N}")
    if ledger is None or ledger.horizon + 1 < N:
        ledger = build_ledger(spec, N)
    r = realize_plan(plan, ledger, N)
    orbit = perturbed_orbit(spec, w1, r, plan.epsilon)
    ns = sorted(set(prefixes) | {N}) if prefixes else default_prefixes(N)
    values = []
    for n in ns:
        values.append(best_shadow_oracle(orbit, spec, ledger, n).value)
    values = np.maximum.accumulate(np.asarray(values, dtype=float))
    return WitnessRun(orbit=orbit, curve=DivergenceCurve(ns=np.asarray(ns), values=values))
