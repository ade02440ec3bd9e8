"""Closed-form bounds, success-probability optimization, and the universal-cloner checkpoint.

The optimizer is deliberately derivative-free.  Symmetric problems reduce to
one scalar boundary solve per slot pattern and are handled by bisection;
asymmetric problems run coordinate ascent with per-coordinate bisection to
the feasibility boundary from three fixed starting points.  A brute-force
grid oracle provides an independent check on every optimum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .machine import MachineSpec, _clamp_unit, feasible
from .qlinalg import DEFAULT_TOL
from .states import KINDS

_GRID_BUDGET = 10_000_000
# Strict-sum machines cannot sit exactly at total success 1; stop just below.
_CAP_MARGIN = 1e-12
_BISECTION_STEPS = 80
# Boundary solves probe feasibility with a near-zero epsilon (not the
# reporting tolerance) so returned optima never overshoot the true boundary
# by more than float noise.
_STRICT_TOL = 1e-14


def duan_guo_bound(alpha_abs: float) -> float:
    """Ceiling 1/(1 + |alpha|) on the symmetric one-slot copy probability."""
    a = float(alpha_abs)
    if not 0.0 <= a < 1.0:
        raise ValidationError("alpha_abs must lie in [0, 1); identical states have no bound")
    return 1.0 / (1.0 + a)


def discrimination_bound(alpha_abs: float, beta_abs: float, m: int, p_m_abs: float) -> float:
    """Upper bound (1 - |alpha beta|) / (1 - |alpha|^m |p_m|) on slot-m success.

    With ``p_m_abs`` = 0 this is 1 - |alpha beta|, the unambiguous
    discrimination ceiling for the product pair.
    """
    a, b, q = float(alpha_abs), float(beta_abs), float(p_m_abs)
    if m < 1:
        raise ValidationError("m must be >= 1")
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0 and 0.0 <= q <= 1.0):
        raise ValidationError("alpha_abs, beta_abs, p_m_abs must lie in [0, 1]")
    denom = 1.0 - a**m * q
    if denom <= 1e-15:
        raise NumericalError("degenerate denominator: |alpha|^m |p_m| reaches 1")
    return (1.0 - a * b) / denom


@dataclass(frozen=True)
class OptimizationProblem:
    """Maximize the prior-weighted total success over feasible r matrices."""

    kind: str
    alpha: complex
    beta: complex | None
    m: int
    priors: tuple[float, float] = (0.5, 0.5)
    symmetric: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown machine kind {self.kind!r}")
        if self.m < 1:
            raise ValidationError("m must be >= 1")
        pr = tuple(float(v) for v in self.priors)
        if len(pr) != 2 or any(v < 0 for v in pr) or abs(sum(pr) - 1.0) > 1e-9:
            raise ValidationError("priors must be two nonnegative numbers summing to 1")
        alpha = _clamp_unit(self.alpha, "alpha")
        beta = None if self.kind == "ncm" else _clamp_unit(self.beta, "beta")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "priors", pr)


@dataclass(frozen=True)
class OptimizationResult:
    r_star: np.ndarray
    p_star: np.ndarray
    value: float
    oracle_value: float | None
    method_trace: tuple[str, ...]


def _spec(prob: OptimizationProblem, r: np.ndarray, p=None) -> MachineSpec:
    return MachineSpec(prob.kind, prob.alpha, prob.beta, prob.m, r, p)


def _strict_sum(prob: OptimizationProblem) -> bool:
    return prob.kind == "joint" and abs(prob.alpha * (prob.beta or 0.0)) > 0.0


def _row_cap(prob: OptimizationProblem) -> float:
    return 1.0 - _CAP_MARGIN if _strict_sum(prob) else 1.0


def _is_feasible(prob: OptimizationProblem, r: np.ndarray, p, tol: float) -> bool:
    try:
        spec = _spec(prob, r, p)
    except ValidationError:
        return False
    return feasible(spec, tol).feasible


def _largest_feasible_scale(prob, build, cap: float, p) -> float:
    """Largest s in [0, cap] with build(s) feasible at the strict tolerance.

    ``build`` must be monotone in the sense that feasibility at s implies
    feasibility below s (true for slot-proportional scalings); the cap is
    probed first to catch regions where the constraint goes slack.
    """
    if _is_feasible(prob, build(cap), p, _STRICT_TOL):
        return cap
    lo, hi = 0.0, cap
    if not _is_feasible(prob, build(lo), p, _STRICT_TOL):
        raise NumericalError("even the zero machine is infeasible; invalid problem")
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if _is_feasible(prob, build(mid), p, _STRICT_TOL):
            lo = mid
        else:
            hi = mid
    return lo


def _slot_matrix(m: int, slot: int, value: float) -> np.ndarray:
    r = np.zeros((2, m))
    r[:, slot - 1] = value
    return r


def _optimize_symmetric(prob: OptimizationProblem, tol: float) -> tuple[np.ndarray, float, list[str]]:
    # All weight on slot 1: it carries the largest overlap power, so it
    # relaxes the boundary most per unit of success probability.
    cap = _row_cap(prob)
    best = _largest_feasible_scale(prob, lambda v: _slot_matrix(prob.m, 1, v), cap, None)
    trace = [f"symmetric slot-1 boundary solve: R* = {best:.17g}"]
    return _slot_matrix(prob.m, 1, best), best, trace


def _coordinate_ascent(prob: OptimizationProblem, r0: np.ndarray, tol: float, trace: list[str]) -> np.ndarray:
    pr = np.asarray(prob.priors)
    r = r0.copy()
    strict = _strict_sum(prob)
    for sweep in range(60):
        gained = 0.0
        for i in range(2):
            if pr[i] == 0.0:
                continue
            for k in range(prob.m):
                cur = r[i, k]
                room = 1.0 - r[i].sum() + cur
                if strict:
                    room -= _CAP_MARGIN
                hi = min(1.0, room)
                if hi <= cur + 1e-15:
                    continue
                trial = r.copy()
                trial[i, k] = hi
                if _is_feasible(prob, trial, None, _STRICT_TOL):
                    r = trial
                    gained += hi - cur
                    continue
                lo_v, hi_v = cur, hi
                for _ in range(_BISECTION_STEPS):
                    mid = 0.5 * (lo_v + hi_v)
                    trial[i, k] = mid
                    if _is_feasible(prob, trial, None, _STRICT_TOL):
                        lo_v = mid
                    else:
                        hi_v = mid
                trial[i, k] = lo_v
                r = trial
                gained += lo_v - cur
        trace.append(f"sweep {sweep}: objective {float(np.sum(pr * r.sum(axis=1))):.17g}")
        if gained < 1e-12:
            break
    return r


def _optimize_asymmetric(prob: OptimizationProblem, tol: float) -> tuple[np.ndarray, float, list[str]]:
    pr = np.asarray(prob.priors)
    trace: list[str] = []
    seeds: list[np.ndarray] = [np.zeros((2, prob.m))]
    sym_r, _, _ = _optimize_symmetric(prob, tol)
    seeds.append(0.5 * sym_r)
    uniform = np.full((2, prob.m), 1.0 / prob.m)
    scale = _largest_feasible_scale(prob, lambda s: s * uniform, _row_cap(prob), None)
    seeds.append(0.9 * scale * uniform)

    best_r, best_val = None, -1.0
    for idx, seed in enumerate(seeds):
        trace.append(f"seed {idx}")
        r = _coordinate_ascent(prob, seed, tol, trace)
        val = float(np.sum(pr * r.sum(axis=1)))
        if val > best_val:
            best_r, best_val = r, val
    return best_r, best_val, trace


def optimize(prob: OptimizationProblem, tol: float = DEFAULT_TOL,
             oracle_resolution: float | None = None) -> OptimizationResult:
    """Maximize prior-weighted success over the feasible region.

    The returned machine always passes :func:`clonekit.machine.feasible`.
    When ``oracle_resolution`` is given, the grid oracle runs as an
    independent cross-check and its value is attached to the result.
    """
    if prob.symmetric:
        r_star, value, trace = _optimize_symmetric(prob, tol)
    else:
        r_star, value, trace = _optimize_asymmetric(prob, tol)
    spec = _spec(prob, r_star)
    report = feasible(spec, tol)
    if not report.feasible:
        raise NumericalError("optimizer returned an infeasible point")
    oracle = grid_oracle(prob, oracle_resolution) if oracle_resolution is not None else None
    r_out = np.asarray(r_star, dtype=float)
    r_out.setflags(write=False)
    return OptimizationResult(
        r_star=r_out,
        p_star=report.p_used,
        value=float(value),
        oracle_value=oracle,
        method_trace=tuple(trace),
    )


def grid_oracle(prob: OptimizationProblem, resolution: float) -> float:
    """Exhaustive feasibility scan of the r grid; independent of the optimizer.

    Returns the best prior-weighted success over grid points (step
    ``resolution``) that pass the determinant feasibility test with optimal
    probe overlaps.  A lower bound on the true optimum within the grid's
    resolution.
    """
    if resolution <= 0:
        raise ValidationError("resolution must be positive")
    values = np.arange(0.0, 1.0 + resolution / 2, resolution)
    dims = prob.m if prob.symmetric else 2 * prob.m
    if len(values) ** dims > _GRID_BUDGET:
        raise ValidationError(f"grid of {len(values)}^{dims} points exceeds the budget")
    pr = np.asarray(prob.priors)
    best = -1.0
    for combo in itertools.product(values, repeat=dims):
        if prob.symmetric:
            row = np.asarray(combo)
            r = np.vstack([row, row])
        else:
            r = np.asarray(combo).reshape(2, prob.m)
        if np.any(r.sum(axis=1) > 1.0):
            continue
        if not _is_feasible(prob, r, None, DEFAULT_TOL):
            continue
        val = float(np.sum(pr * r.sum(axis=1)))
        if val > best:
            best = val
    if best < 0.0:
        raise NumericalError("no feasible grid point found; the zero machine should be feasible")
    return best


def ncmsi_advantage(alpha: complex, beta: complex, m: int,
                    priors: tuple[float, float] = (0.5, 0.5)) -> tuple[float, float, float]:
    """Optimal joint success, optimal original-only success, and their gap.

    The gap is nonnegative: any original-only machine's r matrix is feasible
    for the joint machine as well.  It vanishes when the supplementary
    states carry no information (|beta| = 1) and is strictly positive for
    overlaps in the open interior.
    """
    symmetric = abs(priors[0] - priors[1]) <= 1e-12
    joint = optimize(OptimizationProblem("joint", alpha, beta, m, priors, symmetric))
    ncm = optimize(OptimizationProblem("ncm", alpha, None, m, priors, symmetric))
    return joint.value, ncm.value, joint.value - ncm.value


def discrimination_convergence(alpha_abs: float, beta_abs: float, m_max: int) -> list[tuple[int, float]]:
    """Symmetric optimum of the single-slot machine with orthogonal probe flags.

    For each depth m, only slot m is active and its probe overlap is pinned
    to zero, so a success outcome identifies the input with certainty.  The
    optimum is bounded by 1 - |alpha beta| for every m and approaches it:
    orthogonal flags let the machine discriminate first and copy second.
    """
    a, b = float(alpha_abs), float(beta_abs)
    if not (0.0 < a < 1.0 and 0.0 < b <= 1.0):
        raise ValidationError("need 0 < alpha_abs < 1 and 0 < beta_abs <= 1")
    out: list[tuple[int, float]] = []
    for m in range(1, m_max + 1):
        prob = OptimizationProblem("joint", a, b, m)
        p = np.zeros(m)
        cap = _row_cap(prob)
        best = _largest_feasible_scale(prob, lambda v, _m=m: _slot_matrix(_m, _m, v), cap, p)
        out.append((m, best))
    return out


def _ptrace_last(rho: np.ndarray, d_keep: int, d_drop: int) -> np.ndarray:
    """Partial trace over the trailing factor of a (d_keep*d_drop)^2 density matrix."""
    return np.einsum("ijkj->ik", rho.reshape(d_keep, d_drop, d_keep, d_drop))


def uqcm_distance(alpha_amp: float, beta_amp: float) -> float:
    """Single-copy distance Tr[(rho_out - rho_ideal)^2] of the universal copier.

    Builds the input alpha|0> + beta|1>, applies the fixed
    state-independent copying transformation on system a, blank b, and a
    two-level machine register, traces back down to system a, and returns
    the squared distance to the ideal output.  The value is 1/18 for every
    input, which is what makes the machine universal.
    """
    a, b = complex(alpha_amp), complex(beta_amp)
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-9:
        raise ValidationError("input amplitudes must satisfy |alpha|^2 + |beta|^2 = 1")
    e0 = np.array([1.0, 0.0], dtype=np.complex128)
    e1 = np.array([0.0, 1.0], dtype=np.complex128)
    up, down = e0, e1
    plus = (np.kron(e1, e0) + np.kron(e0, e1)) / np.sqrt(2.0)
    out0 = np.sqrt(2.0 / 3.0) * np.kron(np.kron(e0, e0), up) + np.sqrt(1.0 / 3.0) * np.kron(plus, down)
    out1 = np.sqrt(2.0 / 3.0) * np.kron(np.kron(e1, e1), down) + np.sqrt(1.0 / 3.0) * np.kron(plus, up)
    out = a * out0 + b * out1

    rho_abx = np.outer(out, out.conj())
    rho_ab = _ptrace_last(rho_abx, 4, 2)
    rho_a = _ptrace_last(rho_ab, 2, 2)
    ideal = np.array([a, b], dtype=np.complex128)
    diff = rho_a - np.outer(ideal, ideal.conj())
    return float(np.real(np.trace(diff @ diff)))
