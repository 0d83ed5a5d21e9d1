"""Command-line front door: classify specs, run orbits, shadows, witnesses.

Exit codes: 0 success, 1 invalid input or refused precondition,
2 Undetermined verdict (distinct from errors so scripts can branch).
Identical configurations, including the seed, produce byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dynamics, sequences, witness
from .classify import (
    EXPANDING_CRITERIA,
    STABLE,
    UNDETERMINED,
    UNSTABLE,
    HorizonConfig,
    classify,
)
from .errors import StabilityToolError, TailNotConvergent
from .products import build_ledger


@dataclass
class RunConfig:
    command: str
    builtin: str | None = None
    spec_path: str | None = None
    alpha: float = 0.0
    p: int = 3
    a: complex = 2.0 + 0.0j
    b: complex = 5.0 + 0.0j
    horizon: int = 10_000
    epsilon: float = 0.01
    seed: int = 0
    fmt: str = "json"
    out: str | None = None
    force: bool = False
    delta: float = 0.1
    band: float = 0.02
    window: float = 0.5
    z1: complex = 0.0 + 0.0j
    tail_tol: float = 1e-9

    def horizon_config(self) -> HorizonConfig:
        return HorizonConfig(N=self.horizon, window=self.window, band=self.band, delta=self.delta)


def _build_spec(cfg: RunConfig) -> sequences.CoefficientSpec:
    if (cfg.builtin is None) == (cfg.spec_path is None):
        raise ValueError("give exactly one of --builtin NAME or --spec PATH")
    if cfg.spec_path is not None:
        data = json.loads(Path(cfg.spec_path).read_text())
        return sequences.spec_from_json(data)
    return sequences.builtin_example(cfg.builtin, alpha=cfg.alpha, p=cfg.p, a=cfg.a, b=cfg.b)


def _dump_json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _emit(cfg: RunConfig, csv_text: str | None, summary: dict) -> None:
    """CSV goes to --out when given; the JSON summary goes to stdout.
    Without --out, --format picks which of the two streams to print."""
    if cfg.out is not None and csv_text is not None:
        Path(cfg.out).write_text(csv_text)
        sys.stdout.write(_dump_json(summary))
    elif csv_text is not None and cfg.fmt == "csv":
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(_dump_json(summary))


def _random_perturbations(rng: np.random.Generator, epsilon: float, N: int) -> np.ndarray:
    """epsilon times uniform draws from the closed unit disc, index-aligned."""
    u = rng.uniform(0.0, 1.0, N - 1)
    ang = rng.uniform(0.0, 2.0 * np.pi, N - 1)
    r = np.empty(N, dtype=complex)
    r[0] = np.nan
    r[1:] = epsilon * np.sqrt(u) * np.exp(1j * ang)
    return r


def cmd_classify(cfg: RunConfig) -> int:
    spec = _build_spec(cfg)
    verdict = classify(spec, cfg.horizon_config())
    out = _dump_json(verdict.to_json())
    if cfg.out is not None:
        Path(cfg.out).write_text(out)
    sys.stdout.write(out)
    return 2 if verdict.status == UNDETERMINED else 0


def cmd_simulate(cfg: RunConfig) -> int:
    spec = _build_spec(cfg)
    traj = dynamics.iterate(spec, cfg.z1, cfg.horizon)
    csv_text = dynamics.trajectory_csv(traj)
    summary = {
        "command": "simulate",
        "n": cfg.horizon,
        "z1": [cfg.z1.real, cfg.z1.imag],
        "final": [traj.values[-1].real, traj.values[-1].imag],
    }
    _emit(cfg, csv_text, summary)
    return 0


def cmd_shadow(cfg: RunConfig) -> int:
    spec = _build_spec(cfg)
    hcfg = cfg.horizon_config()
    verdict = classify(spec, hcfg)
    if verdict.status != STABLE and not cfg.force:
        sys.stderr.write(f"spec is {verdict.status}; pass --force to shadow anyway\n")
        return 1
    N = cfg.horizon
    ledger = build_ledger(spec, N)
    rng = np.random.default_rng(cfg.seed)
    r = _random_perturbations(rng, cfg.epsilon, N)
    orbit = dynamics.perturbed_orbit(spec, cfg.z1, r, cfg.epsilon)
    construction = "equal_start"
    if verdict.criterion in EXPANDING_CRITERIA:
        construction = "reciprocal_series"
        try:
            result = dynamics.shadow_expanding(orbit, spec, ledger, tail_tol=cfg.tail_tol)
        except TailNotConvergent as exc:
            if not cfg.force:
                sys.stderr.write(f"{exc}\n")
                return 1
            construction = "equal_start"
            result = dynamics.shadow_contracting(orbit, spec)
    else:
        result = dynamics.shadow_contracting(orbit, spec)
    bound = None if verdict.constant is None else verdict.constant * cfg.epsilon
    summary = {
        "command": "shadow",
        "status": verdict.status,
        "criterion": verdict.criterion,
        "construction": construction,
        "epsilon": cfg.epsilon,
        "horizon": N,
        "seed": cfg.seed,
        "sup_error": result.sup_error,
        "bound": bound,
        "bound_satisfied": None if bound is None else bool(result.sup_error <= bound),
        "tail_estimate": result.tail_estimate,
    }
    _emit(cfg, dynamics.shadow_csv(result, orbit), summary)
    return 0


def cmd_witness(cfg: RunConfig) -> int:
    spec = _build_spec(cfg)
    hcfg = cfg.horizon_config()
    verdict = classify(spec, hcfg)
    if verdict.status == STABLE and not cfg.force:
        sys.stderr.write("spec is Stable; pass --force to run a witness anyway\n")
        return 1
    N = cfg.horizon
    ledger = build_ledger(spec, N)
    if verdict.status == UNSTABLE:
        plan = witness.make_witness(spec, ledger, verdict.criterion, cfg.epsilon)
    else:
        plan = witness.PerturbationPlan(variant="phase_aligned", epsilon=cfg.epsilon)
    run = witness.run_witness(spec, plan, cfg.z1, N, ledger=ledger)
    from_n, to_n, factor = run.curve.growth_factor()
    summary = {
        "command": "witness",
        "status": verdict.status,
        "criterion": verdict.criterion,
        "plan": plan.to_json(),
        "horizon": N,
        "growth_factor": factor,
        "growth_from_n": from_n,
        "growth_to_n": to_n,
        "final_divergence": float(run.curve.values[-1]),
    }
    _emit(cfg, run.curve.to_csv(), summary)
    return 0


def cmd_examples(cfg: RunConfig) -> int:
    if cfg.builtin is not None:
        spec = sequences.builtin_example(cfg.builtin, alpha=cfg.alpha, p=cfg.p, a=cfg.a, b=cfg.b)
        doc = sequences.spec_to_json(spec)
    else:
        doc = {}
        for name in sequences.BUILTIN_NAMES:
            spec = sequences.builtin_example(name, alpha=cfg.alpha, p=cfg.p, a=cfg.a, b=cfg.b)
            doc[name] = sequences.spec_to_json(spec)
    out = _dump_json(doc)
    if cfg.out is not None:
        Path(cfg.out).write_text(out)
    sys.stdout.write(out)
    return 0


_COMMANDS = {
    "classify": cmd_classify,
    "simulate": cmd_simulate,
    "shadow": cmd_shadow,
    "witness": cmd_witness,
    "examples": cmd_examples,
}


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="hustab", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--builtin", help="builtin example name")
        p.add_argument("--spec", dest="spec_path", help="path to a spec JSON file")
        p.add_argument("--alpha", type=float, default=0.0, help="near_parabolic rotation parameter")
        p.add_argument("--p", type=int, default=3, help="sparse3_periodic period")
        p.add_argument("--a", type=complex, default=2.0 + 0.0j, help="constant builtin a")
        p.add_argument("--b", type=complex, default=5.0 + 0.0j, help="constant builtin b")
        p.add_argument("--horizon", type=int, default=10_000)
        p.add_argument("--epsilon", type=float, default=0.01)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="output path for the CSV/JSON artifact")
        p.add_argument("--force", action="store_true")
        p.add_argument("--delta", type=float, default=0.1)
        p.add_argument("--band", type=float, default=0.02)
        p.add_argument("--window", type=float, default=0.5)
        p.add_argument("--z1", type=complex, default=0.0 + 0.0j, help="initial value")
        p.add_argument("--tail-tol", dest="tail_tol", type=float, default=1e-9)
    return top


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    try:
        return _COMMANDS[cfg.command](cfg)
    except (StabilityToolError, ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
