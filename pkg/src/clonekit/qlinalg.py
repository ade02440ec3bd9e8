"""Dense complex linear-algebra kernel for small state vectors and matrices.

Everything in here is plain numpy on immutable inputs: inner products,
Kronecker products, 2x2 positive-semidefiniteness tests and Cholesky
factors, and the extension of a partial isometry (a few vector pairs with
matching Gram matrices) to a full unitary.  The 2x2 routines are
closed-form on purpose; no eigensolver is involved.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError, ValidationError

# Single knob for every numerical comparison in the package; callers may
# override per call.
DEFAULT_TOL = 1e-9

# Residual-norm threshold below which a completion candidate counts as
# linearly dependent on the vectors already accepted.
_COMPLETION_CUTOFF = 1e-8


def as_cvector(v) -> np.ndarray:
    """Coerce to a 1-D complex128 array, checking finiteness."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1 or arr.size < 1:
        raise ValidationError(f"expected a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("vector has non-finite entries")
    return arr


def inner(a, b) -> complex:
    """Inner product <a|b>, conjugate-linear in the first argument."""
    a = as_cvector(a)
    b = as_cvector(b)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return complex(np.vdot(a, b))


def norm(a) -> float:
    return float(np.linalg.norm(as_cvector(a)))


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two vectors; dim(a)*dim(b) entries."""
    return np.kron(as_cvector(a), as_cvector(b))


def _require_2x2_hermitian(h: np.ndarray, tol: float) -> np.ndarray:
    h = np.asarray(h, dtype=np.complex128)
    if h.shape != (2, 2):
        raise ValidationError(f"expected a 2x2 matrix, got shape {h.shape}")
    if abs(h[0, 1] - np.conj(h[1, 0])) > tol or abs(h[0, 0].imag) > tol or abs(h[1, 1].imag) > tol:
        raise ValidationError("matrix is not Hermitian within tolerance")
    return h


def psd2_check(h, tol: float = DEFAULT_TOL) -> tuple[float, bool]:
    """Determinant and PSD verdict for a 2x2 Hermitian matrix.

    A 2x2 Hermitian matrix is positive semidefinite exactly when both
    diagonal entries and the determinant are nonnegative; all three are
    tested against ``-tol``.

    Returns
    -------
    (det, verdict) : tuple[float, bool]
    """
    h = _require_2x2_hermitian(h, tol)
    d00 = float(h[0, 0].real)
    d11 = float(h[1, 1].real)
    det = d00 * d11 - abs(h[0, 1]) ** 2
    verdict = d00 >= -tol and d11 >= -tol and det >= -tol
    return det, bool(verdict)


def cholesky_psd2(h, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Lower-triangular L with L L^dagger = H for a PSD 2x2 matrix.

    Handles the semidefinite boundary: when an eigenvalue sits within
    ``tol`` of zero the corresponding column of L is zero, so rank-1
    inputs factor exactly.
    """
    h = _require_2x2_hermitian(h, tol)
    det, ok = psd2_check(h, tol)
    if not ok:
        raise ValidationError(f"matrix is not PSD within tolerance (det={det:.3e})")
    d00 = h[0, 0].real
    d11 = h[1, 1].real
    L = np.zeros((2, 2), dtype=np.complex128)
    if d00 > tol:
        l00 = np.sqrt(d00)
        l10 = h[1, 0] / l00
        rem = d11 - abs(l10) ** 2
        L[0, 0] = l00
        L[1, 0] = l10
        L[1, 1] = np.sqrt(max(rem, 0.0))
    else:
        # First diagonal within tol of zero forces |H01| ~ 0 by PSD-ness.
        L[1, 1] = np.sqrt(max(d11, 0.0))
    return L


def _orthonormal_chain(vectors: list[np.ndarray], dependence_tol: float) -> list[np.ndarray]:
    """Modified Gram-Schmidt with re-orthogonalization, in index order."""
    basis: list[np.ndarray] = []
    for v in vectors:
        w = v.astype(np.complex128, copy=True)
        for _ in range(2):  # twice is enough for numerical orthogonality
            for b in basis:
                w = w - np.vdot(b, w) * b
        nrm = np.linalg.norm(w)
        if nrm <= dependence_tol:
            raise ValidationError("vectors are linearly dependent beyond tolerance")
        basis.append(w / nrm)
    return basis


def _complete_basis(basis: list[np.ndarray], dim: int) -> np.ndarray:
    """Extend an orthonormal set to a full basis, returned as matrix columns.

    Candidates e_0, e_1, ... are tried in index order; the ones not already
    in the span are orthonormalized (blocked projection, repeated once for
    numerical orthogonality) and appended, which makes the completion
    deterministic and bit-reproducible.
    """
    bmat = np.zeros((dim, dim), dtype=np.complex128)
    bconj = np.zeros((dim, dim), dtype=np.complex128)  # avoids a conj copy per candidate
    n = len(basis)
    for j, b in enumerate(basis):
        bmat[:, j] = b
        bconj[:, j] = np.conj(b)
    for idx in range(dim):
        if n == dim:
            break
        w = np.zeros(dim, dtype=np.complex128)
        w[idx] = 1.0
        for _ in range(2):
            w = w - bmat[:, :n] @ (bconj[:, :n].T @ w)
        nrm = np.linalg.norm(w)
        if nrm > _COMPLETION_CUTOFF:
            bmat[:, n] = w / nrm
            bconj[:, n] = np.conj(bmat[:, n])
            n += 1
    if n != dim:
        raise NumericalError("basis completion failed to reach full dimension")
    return bmat


def extend_to_unitary(inputs, outputs, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Unitary U with U @ inputs[j] = outputs[j] for Gram-matched vector lists.

    Preconditions: equal counts and dimensions, Gram(inputs) equal to
    Gram(outputs) within ``tol``, and linearly independent inputs.  Both
    sides are orthonormalized in index order and completed against the
    canonical basis (ascending index), then paired direction by direction,
    so the result is deterministic.
    """
    ins = [as_cvector(v) for v in inputs]
    outs = [as_cvector(v) for v in outputs]
    if len(ins) != len(outs):
        raise ValidationError("input and output counts differ")
    if not ins:
        raise ValidationError("need at least one vector pair")
    dim = ins[0].shape[0]
    if any(v.shape[0] != dim for v in ins + outs):
        raise ValidationError("all vectors must share one dimension")
    if len(ins) > dim:
        raise ValidationError("more vectors than dimensions")

    gram_in = np.array([[np.vdot(a, b) for b in ins] for a in ins])
    gram_out = np.array([[np.vdot(a, b) for b in outs] for a in outs])
    if np.max(np.abs(gram_in - gram_out)) > tol:
        raise ValidationError("Gram matrices of inputs and outputs disagree beyond tolerance")

    umat = _complete_basis(_orthonormal_chain(ins, tol), dim)
    vmat = _complete_basis(_orthonormal_chain(outs, tol), dim)
    return vmat @ umat.conj().T
