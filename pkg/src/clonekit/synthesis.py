"""Explicit unitary construction for a feasible machine and its statistics.

Given a feasible spec and concrete input states, the machine's two required
input-output pairs are embedded in the full AB x P space, the failure branch
is completed from the Cholesky factor of the residual Gram matrix, and the
resulting Gram-matched pair map is extended to a full unitary.  Measurement
statistics are then exact: project the probe register onto each slot
subspace (or the failure subspace) and read off probabilities and
post-selected copy fidelities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, NumericalError, ValidationError
from .machine import MachineSpec, feasible, optimal_probe_overlaps
from .qlinalg import DEFAULT_TOL, cholesky_psd2, extend_to_unitary
from .states import PureState, SpaceLayout, embed_input, overlap, target_ab, target_output

# Guard on the total dimension 2^(m+1) * (2m+3); override via realize(max_m=...).
DEFAULT_MAX_M = 6


@dataclass(frozen=True)
class UnitaryRealization:
    """A machine's unitary together with its labeled embedding.

    ``failure_amplitudes`` is the lower-triangular Cholesky factor L of the
    residual Gram matrix; row i holds the two failure-direction amplitudes
    of input i, so |L[i,0]|^2 + |L[i,1]|^2 = 1 - sum_k r_k^(i).
    """

    layout: SpaceLayout
    matrix: np.ndarray
    inputs: tuple[np.ndarray, np.ndarray]
    outputs: tuple[np.ndarray, np.ndarray]
    spec: MachineSpec
    failure_amplitudes: np.ndarray
    psi: tuple[PureState, PureState]


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact measurement statistics, one row per input index.

    ``slot_probs[i, k-1]`` and ``copy_fidelities[i, k-1]`` describe success
    slot k; ``failure[i]`` collects the complement (failure subspace plus
    the never-populated ready direction).  Rows sum to 1.
    """

    slot_probs: np.ndarray
    copy_fidelities: np.ndarray
    failure: np.ndarray


def realize(
    spec: MachineSpec,
    psi: tuple[PureState, PureState],
    phi: tuple[PureState, PureState] | None = None,
    tol: float = DEFAULT_TOL,
    max_m: int = DEFAULT_MAX_M,
) -> UnitaryRealization:
    """Build the unitary realizing a feasible spec on concrete states.

    ``psi`` are the original qubits and ``phi`` the supplementary qubits
    (required unless kind is "ncm").  Their overlaps must match the spec's
    alpha and beta within ``tol``.
    """
    if spec.m > max_m:
        raise ValidationError(f"copy depth {spec.m} exceeds the dimension cap {max_m}")
    if abs(overlap(psi[0], psi[1]) - spec.alpha) > tol:
        raise ValidationError("psi overlap disagrees with spec.alpha")
    if spec.kind != "ncm":
        if phi is None:
            raise ValidationError(f"kind {spec.kind!r} requires supplementary states phi")
        if abs(overlap(phi[0], phi[1]) - spec.beta) > tol:
            raise ValidationError("phi overlap disagrees with spec.beta")

    p = spec.p if spec.p is not None else optimal_probe_overlaps(spec)
    spec_p = spec.with_p(p)
    report = feasible(spec_p, tol)
    if not report.feasible:
        raise InfeasibleError("spec is infeasible; no unitary exists")
    failure_amps = cholesky_psd2(report.residual, tol)

    layout = SpaceLayout(spec.m)
    blank_ab = np.zeros(layout.ab_dim, dtype=np.complex128)
    blank_ab[0] = 1.0  # |0...0> on the copy register
    fail_dirs = [np.kron(blank_ab, layout.failure_probe(d)) for d in (0, 1)]

    inputs = []
    outputs = []
    for i in range(2):
        inputs.append(embed_input(spec.kind, psi[i], None if phi is None else phi[i], layout))
        out = np.zeros(layout.total_dim, dtype=np.complex128)
        for k in range(1, spec.m + 1):
            amp = np.sqrt(spec.r[i, k - 1])
            if amp == 0.0:
                continue
            probe = layout.slot_probe(k, i, p[k - 1])
            out += amp * target_output(spec.kind, psi[i], k, layout, probe)
        # Conjugated row of L so the failure branch's Gram equals L L^dagger,
        # i.e. the residual itself.
        for d in (0, 1):
            out += np.conj(failure_amps[i, d]) * fail_dirs[d]
        outputs.append(out)

    gram_in = np.array([[np.vdot(a, b) for b in inputs] for a in inputs])
    gram_out = np.array([[np.vdot(a, b) for b in outputs] for a in outputs])
    if np.max(np.abs(gram_in - gram_out)) > tol:
        raise NumericalError("success/failure split failed to reproduce the input Gram matrix")

    matrix = extend_to_unitary(inputs, outputs, tol)
    return UnitaryRealization(
        layout=layout,
        matrix=matrix,
        inputs=(inputs[0], inputs[1]),
        outputs=(outputs[0], outputs[1]),
        spec=spec_p,
        failure_amplitudes=failure_amps,
        psi=(psi[0], psi[1]),
    )


def exact_statistics(rz: UnitaryRealization) -> OutcomeDistribution:
    """Slot probabilities and post-selected copy fidelities, computed exactly.

    The machine output for input i is reshaped to (AB, probe); projecting
    the probe columns of slot k gives that slot's probability, and the
    conditional AB density matrix is compared against the ideal copy state.
    """
    layout = rz.layout
    m = rz.spec.m
    ideals = [
        [target_ab(rz.spec.kind, rz.psi[i], k, layout) for k in range(1, m + 1)]
        for i in range(2)
    ]

    probs = np.zeros((2, m))
    fids = np.zeros((2, m))
    fails = np.zeros(2)
    non_slot = [0, *layout.failure_indices]
    for i in range(2):
        vec = rz.matrix @ rz.inputs[i]
        table = vec.reshape(layout.ab_dim, layout.probe_dim)
        for k in range(1, m + 1):
            cols = table[:, list(layout.slot_indices(k))]
            prob = float(np.sum(np.abs(cols) ** 2))
            probs[i, k - 1] = prob
            if prob > 1e-15:
                rho = (cols @ cols.conj().T) / prob
                ideal = ideals[i][k - 1]
                fids[i, k - 1] = float(np.real(np.vdot(ideal, rho @ ideal)))
            else:
                fids[i, k - 1] = 1.0  # empty branch: nothing to post-select
        fails[i] = float(np.sum(np.abs(table[:, non_slot]) ** 2))
    return OutcomeDistribution(slot_probs=probs, copy_fidelities=fids, failure=fails)


def sample(rz: UnitaryRealization, input_index: int, n_shots: int, seed: int) -> dict[str, int]:
    """Multinomial draw from the exact outcome distribution.

    Outcomes are keyed "slot_1".."slot_m" and "failure"; counts sum to
    ``n_shots`` and are reproducible for a fixed seed.
    """
    if n_shots < 1:
        raise ValidationError("n_shots must be >= 1")
    if input_index not in (0, 1):
        raise ValidationError("input_index must be 0 or 1")
    dist = exact_statistics(rz)
    m = rz.spec.m
    probs = np.append(dist.slot_probs[input_index], dist.failure[input_index])
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(n_shots, probs)
    labels = [f"slot_{k}" for k in range(1, m + 1)] + ["failure"]
    return {label: int(c) for label, c in zip(labels, counts)}


def global_success(dist: OutcomeDistribution, priors: tuple[float, float]) -> float:
    """Prior-weighted total success probability."""
    pr = np.asarray(priors, dtype=float)
    if pr.shape != (2,) or np.any(pr < 0) or abs(pr.sum() - 1.0) > 1e-9:
        raise ValidationError("priors must be two nonnegative numbers summing to 1")
    return float(np.sum(pr * dist.slot_probs.sum(axis=1)))
