"""Seeded pair sampling, adversarial falsification, and the implication
harness.

Determinism contract: pair i is a pure function of (seed, i, strategy,
domain) via counter-based Philox streams, so serial and partitioned runs
produce identical output. Falsification is derivative-free compass search
on the negated margin with a geometric step schedule, so with a fixed
seed a larger budget can only extend the same trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Optional

import numpy as np

from . import conditions as cond
from .conditions import CheckConfig, Verdict, Witness
from .field import DomainBox, ScalarField
from .vecmath import pnorm_batch

__all__ = [
    "Sampler",
    "SearchBudget",
    "FalsificationResult",
    "HarnessReport",
    "sample_pairs",
    "falsify",
    "implication_harness",
    "open_question_search",
    "Candidate",
]

_STRATEGIES = {"uniform_box": 0, "gaussian_interior": 1, "segment_grid": 2}


@dataclass(frozen=True)
class Sampler:
    strategy: str
    seed: int
    count: int
    domain: DomainBox
    min_sep: float = 1e-6

    def __post_init__(self):
        if self.strategy not in _STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.count < 1:
            raise ValueError("count must be >= 1")

    def pairs(self) -> np.ndarray:
        return sample_pairs(self)

    def to_json(self):
        return {
            "strategy": self.strategy,
            "seed": self.seed,
            "count": self.count,
            "domain": self.domain.to_json(),
            "min_sep": self.min_sep,
        }


def _round_uniforms(seed: int, strategy_id: int, round_idx: int,
                    count: int, n: int) -> np.ndarray:
    """Uniforms of shape (count, 2, n); position i is independent of count."""
    bg = np.random.Philox(key=seed & 0xFFFFFFFFFFFFFFFF,
                          counter=[0, 0, strategy_id, round_idx])
    rng = np.random.Generator(bg)
    return rng.random((count, 2, n))


def sample_pairs(s: Sampler) -> np.ndarray:
    """Array of shape (count, 2, n) with ||x - y||_2 >= min_sep per pair.

    Rejected pairs are redrawn in later rounds; pair i always consumes the
    stream slot i of each round, keeping results independent of how the
    batch is partitioned.
    """
    n = s.domain.dim
    sid = _STRATEGIES[s.strategy]
    if s.strategy == "segment_grid":
        t = 0.5 * (np.arange(s.count) + 1) / (s.count + 1)  # in (0, 0.5)
        lo, hi = s.domain.lower, s.domain.upper
        X = lo + t[:, None] * (hi - lo)
        Y = hi - t[:, None] * (hi - lo)
        out = np.stack([X, Y], axis=1)
        if np.any(pnorm_batch(X - Y, 2) < s.min_sep):
            raise ValueError("segment_grid produced a pair below min_sep; "
                             "reduce count or enlarge the box")
        return out

    out = np.empty((s.count, 2, n))
    pending = np.ones(s.count, dtype=bool)
    widths = s.domain.widths
    center = 0.5 * (s.domain.lower + s.domain.upper)
    for round_idx in range(1000):
        if not np.any(pending):
            break
        u = _round_uniforms(s.seed, sid, round_idx, s.count, n)
        if s.strategy == "uniform_box":
            cand = s.domain.lower + u * widths
            inside = np.ones(s.count, dtype=bool)
        else:  # gaussian_interior: Box-Muller from the uniform slots
            u1 = np.clip(u[:, 0, :], 1e-12, 1.0)
            u2 = u[:, 1, :]
            z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
            z2 = np.sqrt(-2.0 * np.log(u1)) * np.sin(2.0 * np.pi * u2)
            cand = np.stack([center + 0.2 * widths * z,
                             center + 0.2 * widths * z2], axis=1)
            inside = s.domain.contains(cand[:, 0]) & s.domain.contains(cand[:, 1])
        sep_ok = pnorm_batch(cand[:, 0] - cand[:, 1], 2) >= s.min_sep
        accept = pending & inside & sep_ok
        out[accept] = cand[accept]
        pending &= ~accept
    if np.any(pending):
        raise ValueError("pair rejection failed after 1000 rounds "
                         "(degenerate box or min_sep too large)")
    return out


# ---------------------------------------------------------------------------
# Falsification: compass search on the margin


@dataclass(frozen=True)
class SearchBudget:
    max_evals: int = 10_000
    restarts: int = 8
    max_iters: int = 400
    init_step_frac: float = 0.1   # of box width
    step_decay: float = 0.5
    min_step: float = 1e-10

    def __post_init__(self):
        if min(self.max_evals, self.restarts, self.max_iters) < 1:
            raise ValueError("budget fields must be positive")
        if not (0 < self.step_decay < 1 and self.init_step_frac > 0
                and self.min_step > 0):
            raise ValueError("invalid step schedule")

    def to_json(self):
        return {
            "max_evals": self.max_evals,
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "init_step_frac": self.init_step_frac,
            "step_decay": self.step_decay,
            "min_step": self.min_step,
        }


@dataclass(frozen=True)
class FalsificationResult:
    target: str
    sigma: float
    best_margin: float
    witness: Optional[Witness]
    evaluations: int
    violation_found: bool

    def to_json(self):
        return {
            "target": self.target,
            "sigma": self.sigma,
            "best_margin": self.best_margin,
            "witness": self.witness.to_json() if self.witness else None,
            "evaluations": self.evaluations,
            "violation_found": self.violation_found,
        }


class _MarginObjective:
    """Margin as a function of the packed search variables.

    Vacuous/skipped evaluations map to +inf so the search moves off them.
    Variables: x (n) then y (n), plus lambda for target 'a'.
    """

    def __init__(self, f: ScalarField, target: str, cfg: CheckConfig):
        if target not in ("a", "b", "c"):
            raise ValueError(f"target must be one of a, b, c; got {target!r}")
        self.f = f
        self.target = target
        self.cfg = cfg
        self.evals = 0
        n = f.dim
        self.nvars = 2 * n + (1 if target == "a" else 0)
        lo, hi = f.domain.lower, f.domain.upper
        if target == "a":
            self.lower = np.concatenate([lo, lo, [1e-6]])
            self.upper = np.concatenate([hi, hi, [1.0 - 1e-6]])
        else:
            self.lower = np.concatenate([lo, lo])
            self.upper = np.concatenate([hi, hi])

    def split(self, z: np.ndarray):
        n = self.f.dim
        x, y = z[:n], z[n:2 * n]
        lam = float(z[2 * n]) if self.target == "a" else None
        return x, y, lam

    def __call__(self, z: np.ndarray) -> float:
        self.evals += 1
        x, y, lam = self.split(z)
        cfg = self.cfg
        try:
            if self.target == "a":
                m = cond.margin_a(self.f, x, y, lam, cfg)
                return m if math.isfinite(m) else math.inf
            # premise at tolerance 0: violations found here are genuine,
            # not artifacts of the reporting premise slack
            v = cond.check_b(self.f, x, y, cfg, premise_tol=0.0) \
                if self.target == "b" \
                else cond.check_c(self.f, x, y, cfg, premise_tol=0.0)
        except ValueError:  # below min_sep
            return math.inf
        if v.status in (cond.VACUOUS, cond.SKIPPED):
            return math.inf
        return v.margin

    def witness_at(self, z: np.ndarray) -> Witness:
        x, y, lam = self.split(z)
        f = self.f
        if self.target == "a":
            return Witness(x=x.copy(), y=y.copy(), lam=lam,
                           fx=f.value(x), fy=f.value(y))
        v = cond.check_b(f, x, y, self.cfg) if self.target == "b" \
            else cond.check_c(f, x, y, self.cfg)
        return v.witness


def falsify(f: ScalarField, target: str, cfg: CheckConfig,
            budget: SearchBudget, seed: int) -> FalsificationResult:
    """Multi-start compass search minimizing the signed margin of one
    condition; a negative best margin is a confirmed violation witness.
    Never claims nonexistence: it reports the best found within budget.
    """
    obj = _MarginObjective(f, target, cfg)
    span = obj.upper - obj.lower
    best_val = math.inf
    best_z = None

    restart = 0
    while obj.evals < budget.max_evals:
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(restart,)))
        z = obj.lower + rng.random(obj.nvars) * span
        val = obj(z)
        step = budget.init_step_frac * span.copy()
        iters = 0
        while obj.evals < budget.max_evals and iters < budget.max_iters:
            iters += 1
            improved = False
            for j in range(obj.nvars):
                for sgn in (+1.0, -1.0):
                    if obj.evals >= budget.max_evals:
                        break
                    zt = z.copy()
                    zt[j] = min(max(zt[j] + sgn * step[j], obj.lower[j]),
                                obj.upper[j])
                    if zt[j] == z[j]:
                        continue
                    vt = obj(zt)
                    if vt < val:
                        z, val = zt, vt
                        improved = True
                        break
            if not improved:
                step *= budget.step_decay
                if np.max(step) < budget.min_step:
                    break
        if val < best_val:
            best_val = val
            best_z = z
        restart += 1
        if restart >= budget.restarts and obj.evals >= budget.max_evals // 2:
            break
        if restart >= 4 * budget.restarts:
            break

    witness = None
    if best_z is not None and math.isfinite(best_val):
        witness = obj.witness_at(best_z)
    found = best_val < -cfg.tol if math.isfinite(best_val) else False
    return FalsificationResult(
        target=target, sigma=cfg.sigma,
        best_margin=best_val if math.isfinite(best_val) else math.nan,
        witness=witness, evaluations=obj.evals, violation_found=found,
    )


# ---------------------------------------------------------------------------
# Implication harness


@dataclass(frozen=True)
class HarnessReport:
    sample_count: int
    sigma: float
    seed: int
    counts: dict            # condition -> {holds, violated, vacuous, skipped}
    worst: dict             # condition -> {"margin": float, "witness": {...}}
    theorem_tension: bool   # (b)/(c) violations without any (a) violation

    @property
    def total_violations(self) -> int:
        return sum(c["violated"] for c in self.counts.values())

    def to_json(self):
        return {
            "sample_count": self.sample_count,
            "sigma": self.sigma,
            "seed": self.seed,
            "counts": self.counts,
            "worst": self.worst,
            "theorem_tension": self.theorem_tension,
            "total_violations": self.total_violations,
        }


def _tally(margins, vacuous, ok, tol):
    n = margins.shape[0]
    skipped = int(np.sum(~ok))
    vac = int(np.sum(vacuous & ok))
    active = ok & ~vacuous
    violated = int(np.sum(active & (margins < -tol)))
    holds = int(np.sum(active & (margins >= -tol)))
    assert holds + violated + vac + skipped == n
    return {"holds": holds, "violated": violated, "vacuous": vac,
            "skipped": skipped}


def implication_harness(f: ScalarField, cfg: CheckConfig,
                        sampler: Sampler, chunks: int = 1) -> HarnessReport:
    """Evaluate (a) over pairs x lambda grid, (b) and (c) over pairs.

    `chunks` only partitions the evaluation (stand-in for worker count);
    the report is identical for any value.
    """
    pairs = sample_pairs(sampler)
    d = pnorm_batch(pairs[:, 0] - pairs[:, 1], cfg.penalty_norm)
    keep = d >= cfg.min_sep
    pairs = pairs[keep]
    N = pairs.shape[0]
    bounds = np.linspace(0, N, max(1, chunks) + 1).astype(int)

    a_margin = np.empty(N)
    a_lam = np.empty(N)
    a_ok = np.empty(N, dtype=bool)
    bc = {k: np.empty(N) for k in ("margin", "pairing_x")}
    b_vac = np.empty(N, dtype=bool)
    c_vac = np.empty(N, dtype=bool)
    bc_ok = np.empty(N, dtype=bool)

    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi == lo:
            continue
        X, Y = pairs[lo:hi, 0], pairs[lo:hi, 1]
        m, lam, ok = cond.batch_margin_a_worst(f, X, Y, cfg)
        a_margin[lo:hi], a_lam[lo:hi], a_ok[lo:hi] = m, lam, ok
        r = cond.batch_margins_bc(f, X, Y, cfg)
        bc["margin"][lo:hi] = r["margin"]
        bc["pairing_x"][lo:hi] = r["pairing_x"]
        b_vac[lo:hi] = ~r["premise_b"]
        c_vac[lo:hi] = ~r["premise_c"]
        bc_ok[lo:hi] = r["ok"]

    counts = {
        "a": _tally(a_margin, np.zeros(N, dtype=bool), a_ok, cfg.tol),
        "b": _tally(bc["margin"], b_vac, bc_ok, cfg.tol),
        "c": _tally(bc["margin"], c_vac, bc_ok, cfg.tol),
    }

    worst = {}
    if np.any(a_ok):
        i = int(np.nanargmin(np.where(a_ok, a_margin, np.nan)))
        worst["a"] = {
            "margin": float(a_margin[i]),
            "witness": Witness(x=pairs[i, 0], y=pairs[i, 1],
                               lam=float(a_lam[i])).to_json(),
        }
    for name, vac in (("b", b_vac), ("c", c_vac)):
        active = bc_ok & ~vac
        if np.any(active):
            masked = np.where(active, bc["margin"], np.nan)
            i = int(np.nanargmin(masked))
            worst[name] = {
                "margin": float(bc["margin"][i]),
                "witness": Witness(x=pairs[i, 0], y=pairs[i, 1]).to_json(),
            }

    tension = (counts["a"]["violated"] == 0
               and (counts["b"]["violated"] > 0 or counts["c"]["violated"] > 0))
    return HarnessReport(sample_count=N, sigma=cfg.sigma, seed=sampler.seed,
                         counts=counts, worst=worst, theorem_tension=tension)


# ---------------------------------------------------------------------------
# Open question: does (c) imply (a)?


@dataclass(frozen=True)
class Candidate:
    params: np.ndarray
    family: str
    a_margin: float
    a_witness: Optional[Witness]
    c_best_margin: float
    reverified: bool

    def to_json(self):
        return {
            "family": self.family,
            "params": np.asarray(self.params).tolist(),
            "a_margin": self.a_margin,
            "a_witness": self.a_witness.to_json() if self.a_witness else None,
            "c_best_margin": self.c_best_margin,
            "reverified": self.reverified,
            "note": "sampling-based candidate, not a proof",
        }


def open_question_search(family, cfg: CheckConfig, budget: SearchBudget,
                         seed: int, param_samples: int = 32) -> list[Candidate]:
    """Search a parametrized family for a member where condition (c) shows
    no violation but the defining segment inequality (a) does.

    For each sampled parameter vector: falsify (c); only if nothing is
    found, falsify (a); an (a)-violation of depth <= -10*tol makes the
    member a candidate, kept only if it survives a re-verification of (c)
    with a 10x budget. Candidates are evidence, never proofs.
    """
    if param_samples < 1:
        raise ValueError("param_samples must be >= 1")
    box = family.param_box
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                       spawn_key=(0xFA,)))
    thetas = box.lower + rng.random((param_samples, box.dim)) * box.widths
    per_theta = replace(budget,
                        max_evals=max(200, budget.max_evals // (2 * param_samples)))
    candidates = []
    for k, theta in enumerate(thetas):
        f = family.build(theta)
        res_c = falsify(f, "c", cfg, per_theta, seed=seed + 1000 + k)
        if res_c.violation_found and res_c.best_margin < -cfg.tol:
            continue  # member visibly fails (c); not interesting for (c)=>(a)
        res_a = falsify(f, "a", cfg, per_theta, seed=seed + 2000 + k)
        if not (math.isfinite(res_a.best_margin)
                and res_a.best_margin <= -10.0 * cfg.tol):
            continue
        # re-verify: (c) must stay violation-free under a 10x budget
        big = replace(per_theta, max_evals=10 * per_theta.max_evals,
                      restarts=2 * per_theta.restarts)
        res_c2 = falsify(f, "c", cfg, big, seed=seed + 3000 + k)
        if res_c2.violation_found:
            continue
        confirm = cond.margin_a(f, res_a.witness.x, res_a.witness.y,
                                res_a.witness.lam, cfg)
        if not (math.isfinite(confirm) and confirm <= -10.0 * cfg.tol):
            continue
        candidates.append(Candidate(
            params=theta, family=family.name,
            a_margin=res_a.best_margin, a_witness=res_a.witness,
            c_best_margin=res_c2.best_margin, reverified=True,
        ))
    candidates.sort(key=lambda c: c.a_margin)
    return candidates
