"""Seeded random-instance generators shared by the test modules."""

from __future__ import annotations

import numpy as np

from clonekit.machine import MachineSpec, dominance_premise, feasible

_GEN_BISECTION = 40


def rand_overlap(rng, lo: float = 0.0, hi: float = 0.95, real: bool = False) -> complex:
    mod = rng.uniform(lo, hi)
    if real:
        return complex(mod)
    return mod * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))


def raw_r(rng, m: int, max_total: float = 0.99) -> np.ndarray:
    """Random 2 x m success matrix with row sums below ``max_total``."""
    raw = rng.random((2, m)) + 1e-3
    totals = rng.uniform(0.05, max_total, size=2)
    return raw / raw.sum(axis=1, keepdims=True) * totals[:, None]


def _spec(kind: str, alpha, beta, m: int, r) -> MachineSpec:
    return MachineSpec(kind, alpha, None if kind == "ncm" else beta, m, r)


def boundary_scale(kind: str, alpha, beta, m: int, r0: np.ndarray) -> float:
    """Largest t with t*r0 feasible; slot-proportional scaling is monotone."""
    if feasible(_spec(kind, alpha, beta, m, r0)).feasible:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(_GEN_BISECTION):
        mid = 0.5 * (lo + hi)
        if feasible(_spec(kind, alpha, beta, m, mid * r0)).feasible:
            lo = mid
        else:
            hi = mid
    return lo


def random_feasible_spec(rng, kind: str | None = None, m: int | None = None,
                         real_overlaps: bool = False) -> MachineSpec:
    """Feasible machine with random overlaps and a random interior r."""
    if kind is None:
        kind = ("joint", "ncm", "supplementary")[rng.integers(3)]
    if m is None:
        m = int(rng.integers(1, 5))
    alpha = rand_overlap(rng, 0.0, 0.95, real_overlaps)
    beta = rand_overlap(rng, 0.05, 1.0, real_overlaps)
    r0 = raw_r(rng, m)
    t = boundary_scale(kind, alpha, beta, m, r0)
    r = rng.uniform(0.1, 0.95) * t * r0
    return _spec(kind, alpha, beta, m, r)


def random_dominant_spec(rng, kind: str = "joint", m: int | None = None,
                         feasible_only: bool = False) -> MachineSpec:
    """Machine satisfying the dominance premise; feasibility optional."""
    if m is None:
        m = int(rng.integers(1, 5))
    for _ in range(200):
        alpha = rand_overlap(rng)
        beta = rand_overlap(rng, 0.1, 1.0)
        r = raw_r(rng, m) * rng.uniform(0.05, 1.0)
        spec = _spec(kind, alpha, beta, m, r)
        if not dominance_premise(spec):
            continue
        if feasible_only and not feasible(spec).feasible:
            continue
        return spec
    raise AssertionError("generator failed to find a premise-satisfying machine")


def random_member_pair(rng, m: int | None = None) -> tuple[MachineSpec, MachineSpec]:
    """Feasible supplementary and ncm members sharing alpha and m."""
    if m is None:
        m = int(rng.integers(1, 5))
    alpha = rand_overlap(rng)
    beta = rand_overlap(rng, 0.05, 1.0)

    r0 = raw_r(rng, m)
    t = boundary_scale("supplementary", alpha, beta, m, r0)
    supp = MachineSpec("supplementary", alpha, beta, m, rng.uniform(0.1, 0.95) * t * r0)

    r1 = raw_r(rng, m)
    t1 = boundary_scale("ncm", alpha, None, m, r1)
    ncm = MachineSpec("ncm", alpha, None, m, rng.uniform(0.1, 0.95) * t1 * r1)
    return supp, ncm


def random_psd2(rng) -> np.ndarray:
    """Random 2x2 PSD matrix; one in five is exactly rank 1."""
    if rng.random() < 0.2:
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        return np.outer(v, v.conj())
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return b @ b.conj().T


def random_unitary(rng, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_gram_matched(rng, dim: int, count: int = 2):
    """(inputs, outputs) lists related by a hidden unitary."""
    vecs = rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    q = random_unitary(rng, dim)
    return [v for v in vecs], [q @ v for v in vecs]


def random_qubit(rng):
    from clonekit.states import PureState

    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return PureState(v / np.linalg.norm(v))
