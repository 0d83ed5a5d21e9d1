"""Exact orbits, perturbed orbits, residual calculus, and shadow constructions.

The driving identity: for w_{n+1} = a_n w_n + b_n + r_n and any exact
solution z of z_{n+1} = a_n z_n + b_n,

    w_n - z_n = p(n, 1) (w_1 - z_1) + R_{n-1},
    R_n = a_n R_{n-1} + r_n,  R_0 = 0,
    R_n = p(n+1, 1) * sum_{j<=n} r_j / p(j+1, 1).

Shadow constructions pick z_1 so the right-hand side stays small: equal
initial values when the tracking sums are bounded (contracting regimes),
or w_1 minus the reciprocal-product series when the products expand.
Error curves are evaluated through the identity rather than by
subtracting materialized orbits: on expanding sequences the subtraction
cancels catastrophically and the rounding of z_1 alone grows like
|p(n, 1)| ulp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, TailNotConvergent
from .products import (
    PartialProductLedger,
    geometric_mean_exponent,
    scaled_cumsum,
)
from .sequences import CoefficientSpec, coeff_at

_LN10 = math.log(10.0)
_BUDGET_SLACK = 1.0 + 4e-16  # one-ulp slack for |r_n| <= epsilon checks


@dataclass(frozen=True)
class Trajectory:
    """Exact orbit z_1..z_N; values slot n holds z_n, slot 0 is padding."""

    spec: CoefficientSpec
    values: np.ndarray

    @property
    def z1(self) -> complex:
        return complex(self.values[1])

    def __len__(self) -> int:
        return len(self.values) - 1

    def at(self, n: int) -> complex:
        return complex(self.values[n])


@dataclass(frozen=True)
class PerturbedOrbit:
    """Orbit of w_{n+1} = a_n w_n + b_n + r_n with |r_n| <= epsilon.

    values slot n holds w_n (n = 1..N); perturbations slot n holds r_n
    (n = 1..N-1).
    """

    spec: CoefficientSpec
    values: np.ndarray
    perturbations: np.ndarray
    epsilon: float

    def __post_init__(self):
        r = self.perturbations[1:]
        if len(r) and np.max(np.abs(r)) > self.epsilon * _BUDGET_SLACK:
            raise ValueError("perturbation exceeds the epsilon budget")

    @property
    def w1(self) -> complex:
        return complex(self.values[1])

    def __len__(self) -> int:
        return len(self.values) - 1


@dataclass(frozen=True)
class ResidualLedger:
    """Accumulated deviations R_0..R_{N-1}; values slot n holds R_n."""

    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values) - 1


@dataclass(frozen=True)
class ShadowResult:
    """A shadow trajectory with its tracking-error curve.

    errors slot n holds |w_n - z_n| for the constructed shadow (linear
    scale, inf when out of float range); log10_errors is the same curve
    kept in log10, which stays meaningful when the linear value does not.
    tail_estimate is the documented bound on what truncating the defining
    series beyond the horizon dropped (expanding construction only); the
    dropped part contributes at most |p(n, 1)| * tail_estimate at index n.
    """

    trajectory: Trajectory
    errors: np.ndarray
    log10_errors: np.ndarray
    sup_error: float
    tail_estimate: float | None = None


def iterate(spec: CoefficientSpec, z1: complex, N: int) -> Trajectory:
    """Direct recursion z_{n+1} = a_n z_n + b_n, materialized to length N."""
    if N < 1:
        raise IndexOutOfRange(f"orbit length must be >= 1, got {N}")
    values = np.empty(N + 1, dtype=complex)
    values[0] = np.nan
    values[1] = complex(z1)
    z = complex(z1)
    for n in range(1, N):
        a, b = coeff_at(spec, n)
        z = a * z + b
        values[n + 1] = z
    return Trajectory(spec=spec, values=values)


def perturbed_orbit(spec: CoefficientSpec, w1: complex, r: np.ndarray, epsilon: float) -> PerturbedOrbit:
    """Materialize w from w_1 and index-aligned perturbations r_1..r_{N-1}."""
    N = len(r)  # r has slots 0..N-1, slot 0 padding
    values = np.empty(N + 1, dtype=complex)
    values[0] = np.nan
    values[1] = complex(w1)
    w = complex(w1)
    for n in range(1, N):
        a, b = coeff_at(spec, n)
        w = a * w + b + complex(r[n])
        values[n + 1] = w
    return PerturbedOrbit(spec=spec, values=values, perturbations=np.asarray(r, dtype=complex), epsilon=float(epsilon))


def _series_term_logs(ledger: PartialProductLedger, r: np.ndarray, N: int):
    """log-magnitude and phase of c_j = r_j / p(j+1, 1) for j = 1..N-1."""
    rj = np.asarray(r[1:N], dtype=complex)
    with np.errstate(divide="ignore"):
        log_mag = np.log(np.abs(rj)) - ledger.logmag[2 : N + 1]
    phase = np.angle(rj) - ledger.phase[2 : N + 1]
    return log_mag, phase


def closed_form_at(spec: CoefficientSpec, ledger: PartialProductLedger, z1: complex, n: int) -> complex:
    """z_n = p(n, 1) z_1 + sum_{j=1}^{n-1} b_j p(n, j+1), from the ledger.

    Each summand is exp of a difference of prefix logs; the result matches
    iterate() within the closed-form/recursion equivalence tolerance.
    """
    if not 2 <= n <= ledger.horizon + 1:
        raise IndexOutOfRange(f"n={n} outside [2, {ledger.horizon + 1}]")
    L, th = ledger.logmag, ledger.phase
    with np.errstate(over="ignore", divide="ignore"):
        log_b = np.log(np.abs(ledger.b[1:n]))
        terms = np.exp((L[n] - L[2 : n + 1] + log_b) + 1j * (th[n] - th[2 : n + 1] + np.angle(ledger.b[1:n])))
        head = np.exp(L[n] + 1j * th[n]) * complex(z1)
    return complex(math.fsum(terms.real) + head.real, math.fsum(terms.imag) + head.imag)


def closed_form_curve(spec: CoefficientSpec, ledger: PartialProductLedger, z1: complex, N: int) -> np.ndarray:
    """Closed-form z_n for every n = 1..N in O(N), via scaled prefix sums.

    Uses z_n = p(n, 1) (z_1 + C_{n-1}) with C_m = sum_{j<=m} b_j / p(j+1, 1)
    carried as (scale, mantissa) pairs, so strongly contracting or
    expanding sequences never push an intermediate outside float range.
    """
    if not 1 <= N <= ledger.horizon + 1:
        raise IndexOutOfRange(f"N={N} outside [1, {ledger.horizon + 1}]")
    L, th = ledger.logmag, ledger.phase
    with np.errstate(divide="ignore"):
        log_mag = np.log(np.abs(ledger.b[1:N])) - L[2 : N + 1]
    phase = np.angle(ledger.b[1:N]) - th[2 : N + 1]
    scale, mant = scaled_cumsum(log_mag, phase)

    values = np.empty(N + 1, dtype=complex)
    values[0] = np.nan
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        shifted = complex(z1) * np.exp(-scale) + mant  # z_1 + C_{n-1}, in block scale
        log_z = L[1 : N + 1] + scale + np.log(np.abs(shifted))
        ang = th[1 : N + 1] + np.angle(shifted)
        values[1:] = np.exp(log_z + 1j * ang)
    values[1] = complex(z1)
    return values


def residual_ledger(orbit: PerturbedOrbit, spec: CoefficientSpec, check: bool = True) -> ResidualLedger:
    """R_n = a_n R_{n-1} + r_n with R_0 = 0, for n = 1..N-1.

    When check is set, verifies the converse identity
    w_{n+1} = (exact orbit from w_1)_{n+1} + R_n to 1e-9 relative at every
    index where both sides are float-representable.
    """
    N = len(orbit)
    r = orbit.perturbations
    values = np.empty(N, dtype=complex)
    values[0] = 0.0
    R = 0.0 + 0.0j
    for n in range(1, N):
        a, _ = coeff_at(spec, n)
        R = a * R + complex(r[n])
        values[n] = R
    ledger = ResidualLedger(values=values)
    if check:
        exact = iterate(spec, orbit.w1, N)
        recon = exact.values[2 : N + 1] + values[1:N]
        w = orbit.values[2 : N + 1]
        ok = np.isfinite(recon) & np.isfinite(w)
        err = np.abs(w[ok] - recon[ok])
        if np.any(err > 1e-9 * (1.0 + np.abs(w[ok]))):
            raise ArithmeticError("residual identity w_{n+1} = g_n(w_1) + R_n failed tolerance")
    return ledger


def shadow_contracting(orbit: PerturbedOrbit, spec: CoefficientSpec) -> ShadowResult:
    """Shadow with equal initial value: z = exact orbit from w_1.

    Then |w_n - z_n| = |R_{n-1}| identically; the construction is always
    definable and its boundedness is what the contracting criteria
    guarantee. The error curve is cross-checked against |R_{n-1}| to 1e-9
    relative.
    """
    N = len(orbit)
    traj = iterate(spec, orbit.w1, N)
    diff = orbit.values[1:] - traj.values[1:]
    errors = np.empty(N + 1)
    errors[0] = np.nan
    errors[1:] = np.abs(diff)
    errors[1:][~np.isfinite(diff)] = np.inf

    residuals = residual_ledger(orbit, spec, check=False)
    ref = np.abs(residuals.values)  # |R_{n-1}| aligns with error slot n
    cur = errors[2 : N + 1]
    ref_aligned = ref[1:N]
    ok = np.isfinite(cur) & np.isfinite(ref_aligned)
    if np.any(np.abs(cur[ok] - ref_aligned[ok]) > 1e-9 * (1.0 + ref_aligned[ok])):
        raise ArithmeticError("shadow error curve disagrees with |R_{n-1}|")

    with np.errstate(divide="ignore"):
        log10_errors = np.log10(errors)
    sup = float(np.max(errors[1:]))
    return ShadowResult(trajectory=traj, errors=errors, log10_errors=log10_errors, sup_error=sup)


def shadow_expanding(
    orbit: PerturbedOrbit,
    spec: CoefficientSpec,
    ledger: PartialProductLedger,
    tail_tol: float = 1e-9,
) -> ShadowResult:
    """Shadow via z_1 = w_1 - sum_{j=1}^{N-1} r_j / p(j+1, 1) (truncated series).

    Requires the reciprocal-product terms to be summable at this horizon:
    the tail beyond N, extrapolated geometrically at the rate given by the
    geometric-mean exponent, must fall below tail_tol. The error curve is
    |w_n - z_n| = |p(n, 1)| |sum_{j=n}^{N-1} r_j / p(j+1, 1)|, accumulated
    backwards so each tail is formed from its own leading terms; the
    truncated series makes the shadow exact at the horizon, and the
    dropped part is documented via tail_estimate.
    """
    N = len(orbit)
    if ledger.horizon + 1 < N:
        raise IndexOutOfRange(f"ledger horizon {ledger.horizon} too small for orbit length {N}")
    g = geometric_mean_exponent(ledger, N)
    if g <= 0:
        raise TailNotConvergent(f"geometric-mean exponent {g:.3g} <= 0 at horizon {N}")
    rho = math.exp(-g)
    tail_estimate = orbit.epsilon * math.exp(-float(ledger.logmag[N])) * rho / (1.0 - rho)
    if tail_estimate >= tail_tol:
        raise TailNotConvergent(
            f"tail estimate {tail_estimate:.3g} at horizon {N} exceeds tolerance {tail_tol:.3g}"
        )

    log_mag, phase = _series_term_logs(ledger, orbit.perturbations, N)
    with np.errstate(under="ignore"):
        c = np.exp(log_mag + 1j * phase)
    series = complex(math.fsum(c.real), math.fsum(c.imag))
    z1 = orbit.w1 - series
    traj = iterate(spec, z1, N)

    # Reverse tails RT_n = sum_{j=n}^{N-1} c_j, in scaled form.
    r_scale, r_mant = scaled_cumsum(log_mag[::-1], phase[::-1])
    tail_scale = r_scale[::-1]  # slot i = scale of RT_{i+1} ... RT_N
    tail_mant = r_mant[::-1]
    L = ledger.logmag
    log_err = np.empty(N + 1)
    log_err[0] = np.nan
    with np.errstate(divide="ignore", invalid="ignore"):
        log_err[1:] = L[1 : N + 1] + tail_scale + np.log(np.abs(tail_mant))
    with np.errstate(over="ignore"):
        errors = np.exp(log_err)
    sup = float(np.max(errors[1:]))
    return ShadowResult(
        trajectory=traj,
        errors=errors,
        log10_errors=log_err / _LN10,
        sup_error=sup,
        tail_estimate=tail_estimate,
    )


def second_order_reduce(
    s: complex,
    q: complex,
    u: complex,
    v: complex,
    z_minus1: complex,
    z0: complex,
    N: int,
) -> np.ndarray:
    """Second-order form of the period-2 system: z_1..z_N from z_{-1}, z_0.

    Generates the pair of recurrences
        z_{2k+1} = (q - 1) z_{2k}   + s z_{2k-1} + v + u
        z_{2k+2} = (s - 1) z_{2k+1} + q z_{2k}   + u + v
    which the first-order orbit with alternating coefficients (q, v), (s, u)
    satisfies whenever z_0 = s z_{-1} + u. Returned index-aligned, slot 0
    padding.
    """
    if N < 1:
        raise IndexOutOfRange(f"sequence length must be >= 1, got {N}")
    out = np.empty(N + 1, dtype=complex)
    out[0] = np.nan
    prev2, prev = complex(z_minus1), complex(z0)
    su = complex(u) + complex(v)
    for n in range(1, N + 1):
        if n % 2 == 1:
            z = (q - 1) * prev + s * prev2 + su
        else:
            z = (s - 1) * prev + q * prev2 + su
        out[n] = z
        prev2, prev = prev, z
    return out


# ---------------------------------------------------------------------------
# CSV dumps (columns are part of the external interface)

def trajectory_csv(traj: Trajectory) -> str:
    lines = ["n,re_z,im_z"]
    for n in range(1, len(traj) + 1):
        z = complex(traj.values[n])
        lines.append(f"{n},{z.real!r},{z.imag!r}")
    return "\n".join(lines) + "\n"


def shadow_csv(result: ShadowResult, orbit: PerturbedOrbit) -> str:
    lines = ["n,re_z,im_z,re_w,im_w,abs_err,log10_abs_err"]
    for n in range(1, len(orbit) + 1):
        z = complex(result.trajectory.values[n])
        w = complex(orbit.values[n])
        lines.append(
            f"{n},{z.real!r},{z.imag!r},{w.real!r},{w.imag!r},"
            f"{float(result.errors[n])!r},{float(result.log10_errors[n])!r}"
        )
    return "\n".join(lines) + "\n"
