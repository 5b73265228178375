"""Signed-margin evaluators for quasiconvexity conditions.

Three conditions are checked, each as a signed margin (negative means
violated at the witness):

  (a) segment inequality:
        f(lam*x + (1-lam)*y) <= max{f(x), f(y)} - (sigma/2)*lam*(1-lam)*||x-y||^2
  (b) if f(x) <= f(y) then <grad f(y), x-y> <= -(sigma/2)*||x-y||^2
  (c) if <grad f(x), y-x> > -(sigma/2)*||x-y||^2
      then <grad f(y), x-y> <= -(sigma/2)*||x-y||^2

sigma = 0 recovers plain quasiconvexity (the Arrow-Enthoven condition for
(b)). sigma_star_* estimate the largest sigma for which (a) holds on the
examined pairs. Margins are raw; classification applies the tolerance
only when building verdicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .field import ScalarField
from .vecmath import as_vec, inner, pnorm, pnorm_batch, segment_point

__all__ = [
    "CheckConfig",
    "Verdict",
    "Witness",
    "HOLDS",
    "VIOLATED",
    "VACUOUS",
    "SKIPPED",
    "margin_a",
    "check_b",
    "check_c",
    "sigma_star_segment",
    "sigma_star_estimate",
    "check_lemma",
    "default_lambda_grid",
]

HOLDS = "holds"
VIOLATED = "violated"
VACUOUS = "vacuous"
SKIPPED = "skipped"


def default_lambda_grid(k: int = 64) -> tuple[float, ...]:
    """Dyadic grid {j/k : j = 1..k-1}, strictly inside (0, 1)."""
    return tuple(j / k for j in range(1, k))


@dataclass(frozen=True)
class CheckConfig:
    sigma: float = 0.0
    tol: float = 1e-9
    min_sep: float = 1e-6
    lambda_grid: tuple[float, ...] = dc_field(default_factory=default_lambda_grid)
    penalty_norm: object = 2

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.tol <= 0 or self.min_sep <= 0:
            raise ValueError("tol and min_sep must be positive")
        grid = tuple(float(l) for l in self.lambda_grid)
        if not grid or min(grid) <= 0 or max(grid) >= 1:
            raise ValueError("lambda grid must lie strictly inside (0, 1)")
        object.__setattr__(self, "lambda_grid", grid)

    def to_json(self):
        p = self.penalty_norm
        return {
            "sigma": self.sigma,
            "tol": self.tol,
            "min_sep": self.min_sep,
            "lambda_grid_size": len(self.lambda_grid),
            "penalty_norm": "inf" if p in ("inf", math.inf, np.inf) else p,
        }


@dataclass(frozen=True)
class Witness:
    x: np.ndarray
    y: np.ndarray
    lam: Optional[float] = None
    fx: Optional[float] = None
    fy: Optional[float] = None
    pairing_x: Optional[float] = None  # <grad f(x), y-x>
    pairing_y: Optional[float] = None  # <grad f(y), x-y>

    def to_json(self):
        out = {"x": np.asarray(self.x).tolist(), "y": np.asarray(self.y).tolist()}
        for k in ("lam", "fx", "fy", "pairing_x", "pairing_y"):
            v = getattr(self, k)
            if v is not None:
                out[k] = float(v)
        return out


@dataclass(frozen=True)
class Verdict:
    status: str
    margin: float
    witness: Optional[Witness] = None

    def to_json(self):
        out = {"status": self.status, "margin": self.margin}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def _classify(margin: float, tol: float) -> str:
    return VIOLATED if margin < -tol else HOLDS


def _sep(x, y, cfg: CheckConfig) -> float:
    return pnorm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float),
                 cfg.penalty_norm)


# ---------------------------------------------------------------------------
# Condition (a): the defining segment inequality


def margin_a(f: ScalarField, x, y, lam: float, cfg: CheckConfig) -> float:
    """max{f(x),f(y)} - (sigma/2)*lam*(1-lam)*||x-y||^2 - f(segment point).

    Nonnegative iff the defining inequality holds at (x, y, lam).
    Returns NaN when an evaluation fails (skipped sample).
    """
    x = as_vec(x)
    y = as_vec(y)
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    d = _sep(x, y, cfg)
    if d < cfg.min_sep:
        raise ValueError(f"||x-y|| = {d} below min_sep {cfg.min_sep}")
    z = segment_point(x, y, lam)
    vals = f.values(np.stack([x, y, z]))
    if not np.all(np.isfinite(vals)):
        return math.nan
    fx, fy, fz = map(float, vals)
    return max(fx, fy) - 0.5 * cfg.sigma * lam * (1.0 - lam) * d * d - fz


# ---------------------------------------------------------------------------
# Conditions (b) and (c): first-order gradient implications


def check_b(f: ScalarField, x, y, cfg: CheckConfig,
            premise_tol: float | None = None) -> Verdict:
    """Premise f(x) <= f(y); conclusion margin
    -(sigma/2)*||x-y||^2 - <grad f(y), x-y> >= 0.

    premise_tol overrides the premise slack (0 makes the premise exact;
    adversarial search uses that so reported violations are genuine and
    not artifacts of premise rounding room).
    """
    x = as_vec(x)
    y = as_vec(y)
    d = _sep(x, y, cfg)
    if d < cfg.min_sep:
        raise ValueError(f"||x-y|| = {d} below min_sep {cfg.min_sep}")
    try:
        fx = f.value(x)
        fy = f.value(y)
        gy = f.grad(y)
    except ArithmeticError:
        return Verdict(SKIPPED, math.nan)
    pt = cfg.tol if premise_tol is None else premise_tol
    w = Witness(x=x, y=y, fx=fx, fy=fy, pairing_y=inner(gy, x - y))
    if fx > fy + pt:
        return Verdict(VACUOUS, math.nan, w)
    margin = -0.5 * cfg.sigma * d * d - w.pairing_y
    return Verdict(_classify(margin, cfg.tol), margin, w)


def check_c(f: ScalarField, x, y, cfg: CheckConfig,
            premise_tol: float | None = None) -> Verdict:
    """Premise <grad f(x), y-x> > -(sigma/2)*||x-y||^2, enforced strictly
    as "> +tol"; conclusion margin as in check_b."""
    x = as_vec(x)
    y = as_vec(y)
    d = _sep(x, y, cfg)
    if d < cfg.min_sep:
        raise ValueError(f"||x-y|| = {d} below min_sep {cfg.min_sep}")
    try:
        gx = f.grad(x)
        gy = f.grad(y)
    except ArithmeticError:
        return Verdict(SKIPPED, math.nan)
    pt = cfg.tol if premise_tol is None else premise_tol
    threshold = -0.5 * cfg.sigma * d * d
    w = Witness(x=x, y=y, pairing_x=inner(gx, y - x), pairing_y=inner(gy, x - y))
    if not w.pairing_x > threshold + pt:
        return Verdict(VACUOUS, math.nan, w)
    margin = threshold - w.pairing_y
    return Verdict(_classify(margin, cfg.tol), margin, w)


# ---------------------------------------------------------------------------
# sigma* estimation


def sigma_star_segment(f: ScalarField, x, y, cfg: CheckConfig) -> float:
    """min over the lambda grid of
    2 * (max{f(x),f(y)} - f(segment)) / (lam*(1-lam)*||x-y||^2).

    Negative values mean f is not even quasiconvex on this segment.
    """
    x = as_vec(x)
    y = as_vec(y)
    # canonical pair order makes the result bitwise swap-invariant
    # (the default lambda grid is symmetric about 1/2)
    if tuple(y) < tuple(x):
        x, y = y, x
    d = _sep(x, y, cfg)
    if d < cfg.min_sep:
        raise ValueError(f"||x-y|| = {d} below min_sep {cfg.min_sep}")
    lams = np.asarray(cfg.lambda_grid)
    Z = y + lams[:, None] * (x - y)
    vals = f.values(np.vstack([x[None], y[None], Z]))
    fx, fy = vals[0], vals[1]
    fz = vals[2:]
    ok = np.isfinite(fz)
    if np.isnan(fx) or np.isnan(fy) or not np.any(ok):
        raise ArithmeticError("all lambda samples failed on this segment")
    ratio = 2.0 * (np.maximum(fx, fy) - fz[ok]) / (lams[ok] * (1.0 - lams[ok]) * d * d)
    return float(np.min(ratio))


def sigma_star_estimate(f: ScalarField, sampler, cfg: CheckConfig) -> float:
    """min of sigma_star_segment over sampled pairs: an upper bound for the
    largest sigma satisfying the defining inequality on the domain.

    `sampler` is either an iterable of (x, y) pairs or an object with a
    .pairs() method (see search.Sampler). The raw (possibly negative)
    value is returned; clamp at 0 only when reporting.
    """
    pairs = sampler.pairs() if hasattr(sampler, "pairs") else sampler
    P = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs,
                   dtype=float)
    if P.size == 0:
        raise ValueError("sampler produced no pairs")
    X, Y = P[:, 0, :], P[:, 1, :]
    d = pnorm_batch(X - Y, cfg.penalty_norm)
    keep = d >= cfg.min_sep
    if not np.any(keep):
        raise ValueError("no pair passed the min_sep filter")
    X, Y, d = X[keep], Y[keep], d[keep]
    fX = f.values(X)
    fY = f.values(Y)
    fmax = np.maximum(fX, fY)
    lams = np.asarray(cfg.lambda_grid)
    best = math.inf
    for lam in lams:
        fz = f.values(Y + lam * (X - Y))
        ratio = 2.0 * (fmax - fz) / (lam * (1.0 - lam) * d * d)
        ratio = ratio[np.isfinite(ratio)]
        if ratio.size:
            best = min(best, float(np.min(ratio)))
    if not math.isfinite(best):
        raise ArithmeticError("every sampled segment failed to evaluate")
    return best


# ---------------------------------------------------------------------------
# Vectorized margin kernels (used by the harness; same formulas as above)


def batch_margin_a_worst(f: ScalarField, X: np.ndarray, Y: np.ndarray,
                         cfg: CheckConfig):
    """Per-pair worst condition-(a) margin over the lambda grid.

    Returns (worst_margin, worst_lam, ok_mask); rows with any failed
    evaluation have ok_mask False and NaN margin.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    d = pnorm_batch(X - Y, cfg.penalty_norm)
    fX = f.values(X)
    fY = f.values(Y)
    fmax = np.maximum(fX, fY)
    worst = np.full(X.shape[0], np.inf)
    worst_lam = np.zeros(X.shape[0])
    ok = np.isfinite(fX) & np.isfinite(fY)
    for lam in cfg.lambda_grid:
        fz = f.values(Y + lam * (X - Y))
        ok &= np.isfinite(fz)
        m = fmax - 0.5 * cfg.sigma * lam * (1.0 - lam) * d * d - fz
        better = m < worst
        worst = np.where(better, m, worst)
        worst_lam = np.where(better, lam, worst_lam)
    worst = np.where(ok, worst, np.nan)
    return worst, worst_lam, ok


def batch_margins_bc(f: ScalarField, X: np.ndarray, Y: np.ndarray,
                     cfg: CheckConfig):
    """Margins and premise masks for conditions (b) and (c) on pair rows.

    Returns a dict with keys fx, fy, pairing_x, pairing_y, margin (shared
    conclusion margin), premise_b, premise_c, ok.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    d = pnorm_batch(X - Y, cfg.penalty_norm)
    fX = f.values(X)
    fY = f.values(Y)
    gX = f.grads(X)
    gY = f.grads(Y)
    ok = (np.isfinite(fX) & np.isfinite(fY)
          & np.all(np.isfinite(gX), axis=-1) & np.all(np.isfinite(gY), axis=-1))
    pairing_x = np.sum(gX * (Y - X), axis=-1)
    pairing_y = np.sum(gY * (X - Y), axis=-1)
    threshold = -0.5 * cfg.sigma * d * d
    margin = threshold - pairing_y
    premise_b = fX <= fY + cfg.tol
    premise_c = pairing_x > threshold + cfg.tol
    return {
        "fx": fX, "fy": fY,
        "pairing_x": pairing_x, "pairing_y": pairing_y,
        "margin": margin,
        "premise_b": premise_b, "premise_c": premise_c,
        "ok": ok, "sep": d,
    }


# ---------------------------------------------------------------------------
# Scalar lemma: if at every x in (a,b) either phi'(x) <= 0 or
# phi(x) <= phi(a), then phi(b) <= phi(a).


def check_lemma(phi: ScalarField, grid, tol: float = 1e-9) -> Verdict:
    """Grid check of the scalar monotone-bound lemma on phi's interval.

    holds: hypothesis satisfied on the grid and phi(b) <= phi(a) + tol.
    vacuous: hypothesis fails at some grid point (witness attached).
    violated: hypothesis held on the grid yet phi(b) > phi(a) + tol --
    a candidate contradiction, to be re-examined on a finer grid.
    """
    if phi.dim != 1:
        raise ValueError("lemma checker requires a 1-D field")
    a = float(phi.domain.lower[0])
    b = float(phi.domain.upper[0])
    grid = np.asarray(sorted(float(t) for t in grid), dtype=float)
    if grid.size == 0 or grid[0] <= a or grid[-1] >= b:
        raise ValueError("grid must be non-empty and strictly inside (a, b)")
    fa = phi.value(np.array([a]))
    fb = phi.value(np.array([b]))
    vals = phi.values(grid[:, None])
    ders = phi.grads(grid[:, None])[:, 0]
    ok = np.isfinite(vals) & np.isfinite(ders)
    hyp = (ders <= tol) | (vals <= fa + tol)
    bad = ok & ~hyp
    if np.any(bad):
        i = int(np.argmax(bad))
        w = Witness(x=np.array([grid[i]]), y=np.array([b]),
                    fx=float(vals[i]), fy=fb, pairing_x=float(ders[i]))
        return Verdict(VACUOUS, math.nan, w)
    if not np.any(ok):
        return Verdict(SKIPPED, math.nan)
    margin = fa - fb
    w = Witness(x=np.array([a]), y=np.array([b]), fx=fa, fy=fb)
    return Verdict(_classify(margin, tol), margin, w)


def check_lemma_refined(phi: ScalarField, initial_points: int = 63,
                        tol: float = 1e-9, max_rounds: int = 6) -> Verdict:
    """check_lemma with grid-doubling: a violated verdict is only kept if
    it survives refinement (otherwise refinement finds the hypothesis
    failure and the verdict turns vacuous)."""
    a = float(phi.domain.lower[0])
    b = float(phi.domain.upper[0])
    k = initial_points + 1
    verdict = None
    for _ in range(max_rounds):
        grid = a + (b - a) * np.arange(1, k) / k
        verdict = check_lemma(phi, grid, tol)
        if verdict.status != VIOLATED:
            return verdict
        k *= 2
    return verdict
