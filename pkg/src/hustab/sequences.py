"""Coefficient sequences (a_n, b_n) for the recursion z_{n+1} = a_n z_n + b_n.

A CoefficientSpec is an immutable generator of coefficient pairs, indexed
from n = 1. Four kinds exist: a single constant pair, a periodic list, a
named formula family, and a finite table with an explicit tail rule.
Formula families also expose an exact closed form for log|a_n| where one
is available, so downstream log-domain accumulation does not have to go
through exp/log round trips.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from math import isqrt

from .errors import EmptyPeriod, PastEnd, UnknownExample, ZeroCoefficient

KINDS = ("constant", "periodic", "formula", "table")
TAIL_RULES = ("repeat", "error")
FORMULA_FAMILIES = ("near_parabolic", "sparse3_squares")
BUILTIN_NAMES = (
    "near_parabolic",
    "alternating_2_half",
    "period3_2_i_third",
    "sparse3_periodic",
    "sparse3_squares",
    "constant",
)

Pair = tuple[complex, complex]


@dataclass(frozen=True)
class FormulaSpec:
    name: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CoefficientSpec:
    """Immutable description of the coefficient pairs (a_n, b_n), n >= 1.

    kind:      one of "constant", "periodic", "formula", "table"
    constant:  the single pair (a, b)                      (kind=constant)
    period:    tuple of pairs, period = its length          (kind=periodic)
    formula:   family name + parameters                     (kind=formula)
    table:     finite tuple of pairs                        (kind=table)
    tail:      "repeat" (repeat last entry) or "error" past the table end
    """

    kind: str
    constant: Pair | None = None
    period: tuple[Pair, ...] | None = None
    formula: FormulaSpec | None = None
    table: tuple[Pair, ...] | None = None
    tail: str = "error"

    @property
    def period_length(self) -> int:
        if self.kind == "constant":
            return 1
        if self.kind == "periodic":
            return len(self.period)
        raise ValueError(f"{self.kind} specs have no period")


def _formula_coeff(spec: CoefficientSpec, n: int) -> tuple[complex, complex, float, float]:
    """(a_n, b_n, log|a_n|, arg a_n) for a formula family, with exact logs."""
    fam = spec.formula
    if fam.name == "near_parabolic":
        # a_n = (1 + 1/n^2)^2 e^{2 pi alpha i},  b_n = -2 a_n
        alpha = float(fam.params.get("alpha", 0.0))
        mag = (1.0 + 1.0 / (n * n)) ** 2
        ang = 2.0 * math.pi * alpha
        a = cmath.rect(mag, ang)
        return a, -2.0 * a, 2.0 * math.log1p(1.0 / (n * n)), ang
    if fam.name == "sparse3_squares":
        # a_n = 3 when n is a perfect square, else 1; b_n = 5
        r = isqrt(n)
        if r * r == n:
            return 3.0 + 0.0j, 5.0 + 0.0j, math.log(3.0), 0.0
        return 1.0 + 0.0j, 5.0 + 0.0j, 0.0, 0.0
    raise UnknownExample(f"unknown formula family {fam.name!r}")


def coeff_at(spec: CoefficientSpec, n: int) -> Pair:
    """Exact coefficient pair for index n >= 1.

    Periodic specs return entry ((n - 1) mod p) + 1; tables past their end
    follow the tail rule. Deterministic: same spec and n give identical
    values bit for bit.
    """
    a, b, _, _ = coeff_full(spec, n)
    return a, b


def coeff_full(spec: CoefficientSpec, n: int) -> tuple[complex, complex, float, float]:
    """(a_n, b_n, log|a_n|, arg a_n), using exact logs for formula families."""
    if n < 1:
        raise IndexError(f"coefficient index must be >= 1, got {n}")
    if spec.kind == "constant":
        a, b = spec.constant
    elif spec.kind == "periodic":
        a, b = spec.period[(n - 1) % len(spec.period)]
    elif spec.kind == "formula":
        return _formula_coeff(spec, n)
    elif spec.kind == "table":
        if n <= len(spec.table):
            a, b = spec.table[n - 1]
        elif spec.tail == "repeat":
            a, b = spec.table[-1]
        else:
            raise PastEnd(f"table of length {len(spec.table)} read at n={n} with error tail")
    else:
        raise ValueError(f"unknown spec kind {spec.kind!r}")
    if a == 0:
        raise ZeroCoefficient(f"a_{n} = 0")
    return complex(a), complex(b), math.log(abs(a)), cmath.phase(a)


def validate(spec: CoefficientSpec) -> CoefficientSpec:
    """Check every statically checkable invariant; return the spec unchanged.

    Constant, periodic and table specs are checked entry by entry; formula
    families are checked by rule (both builtin families are zero-free for
    all n). Raises ZeroCoefficient or EmptyPeriod on violation.
    """
    if spec.kind not in KINDS:
        raise ValueError(f"unknown spec kind {spec.kind!r}")
    if spec.kind == "constant":
        if spec.constant is None or spec.constant[0] == 0:
            raise ZeroCoefficient("constant spec has a = 0")
    elif spec.kind == "periodic":
        if not spec.period:
            raise EmptyPeriod("periodic spec has no entries")
        for k, (a, _) in enumerate(spec.period, start=1):
            if a == 0:
                raise ZeroCoefficient(f"period entry {k} has a = 0")
    elif spec.kind == "table":
        if not spec.table:
            raise EmptyPeriod("table spec has no entries")
        if spec.tail not in TAIL_RULES:
            raise ValueError(f"table tail rule must be one of {TAIL_RULES}, got {spec.tail!r}")
        for k, (a, _) in enumerate(spec.table, start=1):
            if a == 0:
                raise ZeroCoefficient(f"table entry {k} has a = 0")
    elif spec.kind == "formula":
        if spec.formula is None or spec.formula.name not in FORMULA_FAMILIES:
            name = None if spec.formula is None else spec.formula.name
            raise UnknownExample(f"unknown formula family {name!r}")
    return spec


def constant_spec(a: complex, b: complex) -> CoefficientSpec:
    return validate(CoefficientSpec(kind="constant", constant=(complex(a), complex(b))))


def periodic_spec(pairs) -> CoefficientSpec:
    pairs = tuple((complex(a), complex(b)) for a, b in pairs)
    return validate(CoefficientSpec(kind="periodic", period=pairs))


def table_spec(pairs, tail: str = "error") -> CoefficientSpec:
    pairs = tuple((complex(a), complex(b)) for a, b in pairs)
    return validate(CoefficientSpec(kind="table", table=pairs, tail=tail))


def builtin_example(
    name: str,
    alpha: float | None = None,
    p: int | None = None,
    a: complex | None = None,
    b: complex | None = None,
) -> CoefficientSpec:
    """Named example sequences, with their original b-values.

    near_parabolic(alpha):  a_n = (1 + 1/n^2)^2 e^{2 pi alpha i}, b_n = -2 a_n;
                            the n -> infinity limit map is z -> e^{2 pi alpha i}(z - 2).
    alternating_2_half:     a = 2, 1/2, 2, 1/2, ...; b = 5.
    period3_2_i_third:      a = 2, i, 1/3 repeating; b = 5.
    sparse3_periodic(p):    a_n = 3 when p divides n, else 1; b = 5.
    sparse3_squares:        a_n = 3 when n is a perfect square, else 1; b = 5.
    constant(a, b):         fixed pair.
    """
    if name == "near_parabolic":
        params = {"alpha": float(alpha if alpha is not None else 0.0)}
        return validate(CoefficientSpec(kind="formula", formula=FormulaSpec("near_parabolic", params)))
    if name == "alternating_2_half":
        return periodic_spec([(2.0, 5.0), (0.5, 5.0)])
    if name == "period3_2_i_third":
        return periodic_spec([(2.0, 5.0), (1j, 5.0), (1.0 / 3.0, 5.0)])
    if name == "sparse3_periodic":
        p = int(p if p is not None else 3)
        if p < 1:
            raise ValueError(f"sparse3_periodic needs p >= 1, got {p}")
        pairs = [(1.0, 5.0)] * (p - 1) + [(3.0, 5.0)]
        return periodic_spec(pairs)
    if name == "sparse3_squares":
        return validate(CoefficientSpec(kind="formula", formula=FormulaSpec("sparse3_squares")))
    if name == "constant":
        return constant_spec(a if a is not None else 2.0, b if b is not None else 5.0)
    raise UnknownExample(f"no builtin example named {name!r}")


# ---------------------------------------------------------------------------
# JSON wire format. Field names are part of the external interface:
#   {"kind": ..., "constant": [re,im,re,im], "period": [[re,im,re,im], ...],
#    "formula": {"name": ..., "params": {...}}, "table": [...], "tail": ...}

def _pair_to_list(pair: Pair) -> list[float]:
    a, b = pair
    return [a.real, a.imag, b.real, b.imag]


def _pair_from_list(vals) -> Pair:
    re_a, im_a, re_b, im_b = (float(v) for v in vals)
    return complex(re_a, im_a), complex(re_b, im_b)


def spec_to_json(spec: CoefficientSpec) -> dict:
    data: dict = {"kind": spec.kind}
    if spec.kind == "constant":
        data["constant"] = _pair_to_list(spec.constant)
    elif spec.kind == "periodic":
        data["period"] = [_pair_to_list(p) for p in spec.period]
    elif spec.kind == "formula":
        data["formula"] = {"name": spec.formula.name, "params": dict(spec.formula.params)}
    elif spec.kind == "table":
        data["table"] = [_pair_to_list(p) for p in spec.table]
        data["tail"] = spec.tail
    return data


def spec_from_json(data: dict) -> CoefficientSpec:
    kind = data.get("kind")
    if kind == "constant":
        spec = CoefficientSpec(kind="constant", constant=_pair_from_list(data["constant"]))
    elif kind == "periodic":
        spec = CoefficientSpec(
            kind="periodic", period=tuple(_pair_from_list(p) for p in data["period"])
        )
    elif kind == "formula":
        f = data["formula"]
        spec = CoefficientSpec(kind="formula", formula=FormulaSpec(f["name"], dict(f.get("params", {}))))
    elif kind == "table":
        spec = CoefficientSpec(
            kind="table",
            table=tuple(_pair_from_list(p) for p in data["table"]),
            tail=data.get("tail", "error"),
        )
    else:
        raise ValueError(f"unknown spec kind {kind!r}")
    return validate(spec)
