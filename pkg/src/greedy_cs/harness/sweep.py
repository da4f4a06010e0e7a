"""Randomized recovery sweeps.

A sweep is configured by a flat TOML file (top-level keys only)::

    trials = 200          # number of random instances
    seed = 1              # master seed (GREEDY_CS_SEED overrides)
    kind = "perturbed-identity"   # or "gaussian", "file"
    n = 10
    d = 10
    scale = 0.01          # perturbation scale for perturbed-identity
    matrix = "dict.csv"   # for kind = "file", relative to the config file
    renormalize = false
    k = 2                 # int or list
    rho = [0.5, 1.0]      # float or list
    epsilon = 0.0         # declared noise level used to stop the pursuit
    noise = 0.0           # norm of the random noise vector w
    value_model = "unit"  # unit | gaussian | min
    a_min = 1.0
    policies = ["max", "first", "min"]
    max_iterations = 0    # 0 means min(n, d)
    ric_budget = 200000

Each (trial, k, rho, policy) combination yields one :class:`TrialRecord`.
"""
from __future__ import annotations

import dataclasses
import itertools
import math
import os
import sys
from dataclasses import dataclass, fields
from typing import Callable, List, Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from ..coherence import RIC_BUDGET, global_2_coherence, mutual_coherence
from ..dictionary import synthesize
from ..errors import ConfigError, GreedyCSError
from ..guarantees import (compare_deltas, corollary1_check, delta_metric,
                          error_bound_check, theorem1_check)
from ..pursuit import PursuitConfig, SelectionPolicy, womp
from .ensembles import (EnsembleKind, EnsembleSpec, ValueModel, derive_seed,
                        generate_dictionary, generate_sparse_signal, make_rng,
                        random_noise)

SEED_ENV = "GREEDY_CS_SEED"
ORTHO_RTOL = 1e-10
MONOTONE_TOL = 1e-12


@dataclass
class SweepConfig:
    trials: int = 100
    seed: int = 0
    kind: str = "gaussian"
    n: int = 8
    d: int = 16
    scale: float = 0.0
    matrix: Optional[str] = None
    renormalize: bool = False
    k: List[int] = dataclasses.field(default_factory=lambda: [2])
    rho: List[float] = dataclasses.field(default_factory=lambda: [1.0])
    epsilon: float = 0.0
    noise: float = 0.0
    value_model: str = "unit"
    a_min: float = 1.0
    policies: List[str] = dataclasses.field(default_factory=lambda: ["max"])
    max_iterations: int = 0
    ric_budget: int = RIC_BUDGET

    @classmethod
    def from_mapping(cls, data: dict, base_dir: str = ".") -> "SweepConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = set(data) - set(known)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kw = dict(data)
        for key in ("k", "rho", "policies"):
            if key in kw and not isinstance(kw[key], list):
                kw[key] = [kw[key]]
        try:
            cfg = cls(**kw)
            cfg.trials = int(cfg.trials)
            cfg.seed = int(cfg.seed)
            cfg.n, cfg.d = int(cfg.n), int(cfg.d)
            cfg.k = [int(v) for v in cfg.k]
            cfg.rho = [float(v) for v in cfg.rho]
            cfg.policies = [SelectionPolicy.parse(p).value for p in cfg.policies]
            cfg.kind = EnsembleKind.parse(cfg.kind).value
            cfg.value_model = ValueModel.parse(cfg.value_model).value
            cfg.scale, cfg.epsilon = float(cfg.scale), float(cfg.epsilon)
            cfg.noise, cfg.a_min = float(cfg.noise), float(cfg.a_min)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if cfg.trials < 1:
            raise ConfigError("trials must be >= 1")
        if any(not 0 < r <= 1 for r in cfg.rho):
            raise ConfigError("rho values must lie in (0, 1]")
        if cfg.epsilon < 0 or cfg.noise < 0:
            raise ConfigError("epsilon and noise must be >= 0")
        if cfg.kind == EnsembleKind.FROM_FILE.value:
            if not cfg.matrix:
                raise ConfigError("kind = 'file' needs a 'matrix' path")
            if not os.path.isabs(cfg.matrix):
                cfg.matrix = os.path.join(base_dir, cfg.matrix)
        return cfg

    @classmethod
    def load(cls, path) -> "SweepConfig":
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        nested = [k for k, v in data.items() if isinstance(v, dict)]
        if nested:
            raise ConfigError(f"config must be flat, found tables {nested}")
        cfg = cls.from_mapping(data, os.path.dirname(os.path.abspath(path)))
        env = os.environ.get(SEED_ENV)
        if env:
            try:
                cfg.seed = int(env)
            except ValueError:
                raise ConfigError(f"{SEED_ENV} must be an integer") from None
        return cfg


@dataclass
class TrialRecord:
    trial: int
    policy: str
    n: int
    d: int
    k: int
    rho: float
    epsilon: float
    seed: int
    M: Optional[float] = None
    nu_k: Optional[float] = None
    delta_k: Optional[float] = None
    delta_k_mode: Optional[str] = None
    delta_k1: Optional[float] = None
    delta_k1_mode: Optional[str] = None
    theorem1: Optional[bool] = None
    theorem1_condition: Optional[bool] = None
    noise_threshold: Optional[float] = None
    corollary1a: Optional[bool] = None
    corollary1b: Optional[bool] = None
    corollary1c: Optional[bool] = None
    corollary2: Optional[bool] = None
    prior: Optional[bool] = None
    support_match: Optional[bool] = None
    iterations: Optional[int] = None
    final_residual: Optional[float] = None
    stop_reason: Optional[str] = None
    error_bound_ratio: Optional[float] = None
    error_bound_holds: Optional[bool] = None
    invariants_ok: Optional[bool] = None
    violation: bool = False
    error: Optional[str] = None

    @classmethod
    def header(cls):
        return [f.name for f in fields(cls)]

    def to_row(self):
        return [_fmt(getattr(self, name)) for name in self.header()]

    @classmethod
    def from_row(cls, row):
        if len(row) != len(fields(cls)):
            raise ValueError(f"expected {len(fields(cls))} fields, got {len(row)}")
        kw = {}
        for f, text in zip(fields(cls), row):
            kw[f.name] = _parse(text, f.type)
        return cls(**kw)

    def to_dict(self):
        return dataclasses.asdict(self)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse(text, annotation):
    ann = str(annotation)
    if text == "" and ann.startswith("Optional"):
        return None
    if "bool" in ann:
        if text not in ("true", "false"):
            raise ValueError(f"bad boolean {text!r}")
        return text == "true"
    if "int" in ann:
        return int(text)
    if "float" in ann:
        return float(text)
    return text


def check_pursuit_invariants(phi, f, result) -> bool:
    """Residual orthogonality, distinct atoms and nonincreasing residuals."""
    traj = result.support_trajectory
    if len(set(traj)) != len(traj):
        return False
    norms = result.residual_norms
    if any(b > a + MONOTONE_TOL for a, b in zip(norms, norms[1:])):
        return False
    scale = ORTHO_RTOL * float(np.linalg.norm(f))
    for s, r in enumerate(result.residuals[1:], start=1):
        c = phi.matrix[:, traj[:s]].T @ r
        if np.max(np.abs(c)) > scale:
            return False
    return True


def _trial_records(cfg: SweepConfig, t: int) -> List[TrialRecord]:
    dict_seed = derive_seed(cfg.seed, t, 0)
    signal_seed = derive_seed(cfg.seed, t, 1)
    noise_seed = derive_seed(cfg.seed, t, 2)
    records = []
    combos = list(itertools.product(cfg.k, cfg.rho, cfg.policies))
    try:
        spec = EnsembleSpec(cfg.kind, cfg.n, cfg.d, cfg.scale, dict_seed,
                            path=cfg.matrix, renormalize=cfg.renormalize)
        phi = generate_dictionary(spec)
    except GreedyCSError as exc:
        return [TrialRecord(t, p, cfg.n, cfg.d, k, r, cfg.epsilon, dict_seed,
                            error=type(exc).__name__) for k, r, p in combos]
    n, d = phi.n, phi.d
    m = mutual_coherence(phi)
    max_iter = cfg.max_iterations or None
    for k in cfg.k:
        base = dict(n=n, d=d, k=k, epsilon=cfg.epsilon, seed=dict_seed, M=m)
        try:
            a = generate_sparse_signal(d, k, value_model=cfg.value_model,
                                       a_min=cfg.a_min, rng=make_rng(signal_seed + k))
            w = random_noise(n, cfg.noise, make_rng(noise_seed + k))
            obs = synthesize(phi, a, w if cfg.noise else None)
            base["nu_k"] = global_2_coherence(phi, k)
            dk = delta_metric(phi, k, cfg.ric_budget)
            base.update(delta_k=dk.value, delta_k_mode=dk.mode)
            dk1 = None
            if k + 1 <= d:
                dk1 = delta_metric(phi, k + 1, cfg.ric_budget)
                base.update(delta_k1=dk1.value, delta_k1_mode=dk1.mode)
                if dk.mode == dk1.mode == "exact":
                    cmp = compare_deltas(k, dk.value, dk1.value)
                    base.update(corollary2=cmp.new, prior=cmp.prior)
        except GreedyCSError as exc:
            records.extend(TrialRecord(t, p, rho=r, error=type(exc).__name__, **base)
                           for kk, r, p in combos if kk == k)
            continue
        for rho in cfg.rho:
            flags = {}
            try:
                th = theorem1_check(phi, a, rho, cfg.epsilon, cfg.ric_budget)
                flags.update(theorem1=th.satisfied,
                             theorem1_condition=th.diagnostics["condition1"]["satisfied"],
                             noise_threshold=th.diagnostics["noise_threshold"])
                if dk1 is not None:
                    c1 = corollary1_check(phi, k, rho, cfg.ric_budget)
                    flags.update(corollary1a=c1[0].satisfied, corollary1b=c1[1].satisfied,
                                 corollary1c=c1[2].satisfied)
            except GreedyCSError as exc:
                records.extend(TrialRecord(t, p, rho=rho, error=type(exc).__name__, **base)
                               for p in cfg.policies)
                continue
            for policy in cfg.policies:
                rec = TrialRecord(t, policy, rho=rho, **base, **flags)
                pc = PursuitConfig(rho, cfg.epsilon, max_iter, policy)
                res = womp(phi, obs, pc)
                rec.support_match = res.support == a.support
                rec.iterations = res.iterations
                rec.final_residual = res.residual_norms[-1]
                rec.stop_reason = res.stop_reason.value
                rec.invariants_ok = check_pursuit_invariants(phi, obs.f, res)
                if rec.support_match and dk.mode == "exact" and dk.value < 1:
                    eb = error_bound_check(phi, a, res, cfg.epsilon, dk.value)
                    rec.error_bound_holds = eb.holds
                    rec.error_bound_ratio = eb.ratio
                guaranteed = bool(rec.theorem1) and cfg.noise <= cfg.epsilon
                exact_claim = guaranteed and not (rec.support_match and res.iterations == k)
                bound_claim = guaranteed and rec.error_bound_holds is False
                omp_claim = (rec.corollary2 and cfg.noise == 0 and rho == 1.0
                             and policy == "max" and not rec.support_match)
                rec.violation = bool(exact_claim or bound_claim or omp_claim
                                     or not rec.invariants_ok)
                records.append(rec)
    return records


def run_sweep(cfg: SweepConfig,
              progress: Optional[Callable[[int, int], None]] = None) -> List[TrialRecord]:
    """Run every trial in index order. Identical configs give identical records."""
    records = []
    for t in range(cfg.trials):
        records.extend(_trial_records(cfg, t))
        if progress is not None:
            progress(t + 1, cfg.trials)
    return records


def _rate(hits, total):
    return hits / total if total else None


def summarize(records: List[TrialRecord]) -> dict:
    """Success rates per policy, overall and conditioned on each guarantee."""
    flags = ["theorem1", "theorem1_condition", "corollary1a", "corollary1b",
             "corollary1c", "corollary2", "prior"]
    out = {"records": len(records),
           "errors": sum(r.error is not None for r in records),
           "violations": sum(r.violation for r in records),
           "policies": {}}
    for policy in sorted({r.policy for r in records}):
        rows = [r for r in records if r.policy == policy and r.error is None]
        entry = {"trials": len(rows),
                 "success_rate": _rate(sum(bool(r.support_match) for r in rows), len(rows)),
                 "conditioned": {}}
        for flag in flags:
            sub = [r for r in rows if getattr(r, flag)]
            entry["conditioned"][flag] = {
                "count": len(sub),
                "success_rate": _rate(sum(bool(r.support_match) for r in sub), len(sub)),
            }
        out["policies"][policy] = entry
    return out


def progress_printer(stream=sys.stderr):
    step = [0]

    def report(done, total):
        pct = math.floor(100 * done / total)
        if pct >= step[0] or done == total:
            print(f"sweep: {done}/{total} trials", file=stream)
            step[0] = pct + 10
    return report
