#!/usr/bin/env python3
"""
Multilinear service - wedge volumes, expansion factors and d-dimensional traces

Every metric-weighted quantity is reduced to the identity form through the
congruence B = U L U^{-1}, U = V^{1/2}.
"""

import logging
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from chodim.core.exceptions import DimensionMismatchError, DegenerateFrameError
from chodim.services.multilinear.models import (
    DenseOperator, VectorFrame, GramMatrix, InnerProduct, TOL_PSD, TOL_RANK,
)

logger = logging.getLogger(__name__)

_TINY = np.finfo(float).tiny
# random frames drawn per batch by sampled_omega_d
SAMPLE_BATCH = 4096


def _check_frame(frame: VectorFrame, form: InnerProduct) -> None:
    if frame.ambient_dim != form.dim:
        raise DimensionMismatchError(
            f"Frame lives in dimension {frame.ambient_dim}, form in {form.dim}",
            expected=form.dim, actual=frame.ambient_dim,
        )


def _check_operator(L: DenseOperator, dim: int) -> None:
    if L.dim != dim:
        raise DimensionMismatchError(
            f"Operator dimension {L.dim} does not match {dim}", expected=dim, actual=L.dim,
        )


def _check_d(d: int, dim: int) -> None:
    if d < 1 or d > dim:
        raise DimensionMismatchError(f"d must lie in [1, {dim}], got {d}", expected=dim, actual=d)


def gram(frame: VectorFrame, form: InnerProduct) -> GramMatrix:
    """Pairwise inner products of the frame vectors"""
    _check_frame(frame, form)
    return GramMatrix(form.pairing(frame.vectors, frame.vectors))


def orthogonalize_with_pivots(
    vectors: np.ndarray, form: InnerProduct, tol_rank: float = TOL_RANK
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unnormalized modified Gram-Schmidt in the form, two passes per column

    Returns (orthogonal columns, pivot norms, dependent mask). A column whose
    pivot falls below tol_rank times its input norm is dependent and maps to 0.
    """
    vectors = np.asarray(vectors, dtype=float)
    out = np.array(vectors, copy=True)
    d = out.shape[1]
    pivots = np.zeros(d)
    dependent = np.zeros(d, dtype=bool)
    sq_norms = np.zeros(d)
    for i in range(d):
        v = out[:, i].copy()
        in_norm = form.norm(v)
        for _ in range(2):
            for j in range(i):
                if dependent[j]:
                    continue
                coeff = float(out[:, j] @ form.apply(v)) / sq_norms[j]
                v -= coeff * out[:, j]
        pivot = form.norm(v)
        if pivot <= tol_rank * max(in_norm, _TINY) or pivot == 0.0:
            dependent[i] = True
            out[:, i] = 0.0
            continue
        out[:, i] = v
        pivots[i] = pivot
        sq_norms[i] = pivot * pivot
    return out, pivots, dependent


def gram_orthogonalize(frame: VectorFrame, form: InnerProduct) -> VectorFrame:
    """Gram orthogonalization that keeps the wedge volume and shrinks no vector"""
    _check_frame(frame, form)
    vectors, _, dependent = orthogonalize_with_pivots(frame.vectors, form)
    if dependent.any():
        logger.warning(
            "Frame is numerically dependent: columns %s mapped to zero", np.flatnonzero(dependent).tolist()
        )
    return VectorFrame(vectors)


def log_wedge_norm(frame: VectorFrame, form: InnerProduct) -> float:
    """log of the wedge norm from orthogonalization pivots; -inf when degenerate"""
    _check_frame(frame, form)
    _, pivots, dependent = orthogonalize_with_pivots(frame.vectors, form)
    if dependent.any():
        return float("-inf")
    return float(np.sum(np.log(pivots)))


def wedge_norm(frame: VectorFrame, form: InnerProduct) -> float:
    """Volume of the parallelepiped spanned by the frame: sqrt(det Gram)"""
    _check_frame(frame, form)
    det = gram(frame, form).det
    if det <= TOL_PSD * _hadamard(frame, form):
        # below Gram precision; pivots resolve thin but valid frames
        log_norm = log_wedge_norm(frame, form)
        return 0.0 if np.isneginf(log_norm) else float(np.exp(log_norm))
    return float(np.sqrt(det))


def _hadamard(frame: VectorFrame, form: InnerProduct) -> float:
    return float(np.prod([form.norm(frame.column(i)) ** 2 for i in range(frame.d)]))


def form_sqrt(form: InnerProduct) -> Tuple[np.ndarray, np.ndarray]:
    """(V^{1/2}, V^{-1/2}) by symmetric eigendecomposition"""
    if form.is_identity:
        eye = np.eye(form.dim)
        return eye, eye
    w, Q = np.linalg.eigh(form.matrix)
    root = np.sqrt(w)
    return (Q * root) @ Q.T, (Q / root) @ Q.T


def _congruent(L: DenseOperator, form: InnerProduct) -> np.ndarray:
    U, U_inv = form_sqrt(form)
    return U @ L.entries @ U_inv


def omega_d(L: DenseOperator, d: int, form: InnerProduct) -> float:
    """Maximal d-volume expansion factor: product of the d top singular values in the form"""
    _check_operator(L, form.dim)
    _check_d(d, form.dim)
    singular = scipy.linalg.svdvals(_congruent(L, form))
    return float(np.prod(singular[:d]))


def lambda_d_apply(L: DenseOperator, frame: VectorFrame) -> VectorFrame:
    """(L phi_1, ..., L phi_d)"""
    _check_operator(L, frame.ambient_dim)
    return VectorFrame(L.entries @ frame.vectors)


def _require_nondegenerate(frame: VectorFrame, form: InnerProduct) -> None:
    norm = wedge_norm(frame, form)
    if norm <= TOL_RANK:
        raise DegenerateFrameError(norm, TOL_RANK)


def trace_form(L: DenseOperator, frame: VectorFrame, form: InnerProduct) -> float:
    """(L_d(phi_1 ^ ... ^ phi_d), phi_1 ^ ... ^ phi_d) / |phi_1 ^ ... ^ phi_d|^2

    Expanded as the sum over i of Gram determinants with L phi_i in slot i.
    """
    _check_frame(frame, form)
    _check_operator(L, form.dim)
    _require_nondegenerate(frame, form)
    # column scaling cancels between numerator and denominator
    norms = np.array([form.norm(frame.column(i)) for i in range(frame.d)])
    phi = frame.vectors / norms
    G = form.pairing(phi, phi)
    rows = form.pairing(L.entries @ phi, phi)
    det_G = np.linalg.det(G)
    total = 0.0
    for i in range(frame.d):
        G_i = G.copy()
        G_i[i, :] = rows[i, :]
        total += np.linalg.det(G_i)
    return float(total / det_G)


def _orthonormal_basis(frame: VectorFrame, form: InnerProduct) -> np.ndarray:
    vectors, pivots, dependent = orthogonalize_with_pivots(frame.vectors, form)
    if dependent.any():
        raise DegenerateFrameError(0.0, TOL_RANK)
    return vectors / pivots


def projector(frame: VectorFrame, form: InnerProduct) -> DenseOperator:
    """Form-orthogonal projector onto span(frame)"""
    _check_frame(frame, form)
    E = _orthonormal_basis(frame, form)
    return DenseOperator(E @ form.pairing(E, np.eye(form.dim)))


def projected_trace(L: DenseOperator, frame: VectorFrame, form: InnerProduct) -> float:
    """Tr(Q L Q) with Q the form-orthogonal projector onto span(frame)"""
    _check_frame(frame, form)
    _check_operator(L, form.dim)
    _require_nondegenerate(frame, form)
    E = _orthonormal_basis(frame, form)
    return float(np.trace(form.pairing(L.entries @ E, E)))


def symmetric_part(L: DenseOperator, form: Optional[InnerProduct] = None) -> DenseOperator:
    """1/2 (L + L*) with the adjoint taken in the form"""
    if form is None or form.is_identity:
        return DenseOperator(0.5 * (L.entries + L.entries.T))
    _check_operator(L, form.dim)
    V = form.matrix
    adjoint = np.linalg.solve(V, L.entries.T @ V)
    return DenseOperator(0.5 * (L.entries + adjoint))


def mu_spectrum(L: DenseOperator, form: InnerProduct) -> np.ndarray:
    """Eigenvalues of the form-symmetric part of L, nonincreasing"""
    _check_operator(L, form.dim)
    if form.is_identity:
        values = scipy.linalg.eigvalsh(0.5 * (L.entries + L.entries.T))
    else:
        VL = form.matrix @ L.entries
        values = scipy.linalg.eigh(0.5 * (VL + VL.T), form.matrix, eigvals_only=True)
    return values[::-1].copy()


def trace_d(L: DenseOperator, d: int, form: InnerProduct) -> float:
    """Sum of the d largest mu values"""
    _check_d(d, form.dim)
    return float(np.sum(mu_spectrum(L, form)[:d]))


def generalized_spectrum(M: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Descending eigenvalues of the symmetrized form M relative to V"""
    M = np.asarray(M, dtype=float)
    values = scipy.linalg.eigh(0.5 * (M + M.T), V, eigvals_only=True)
    return values[::-1].copy()


def generalized_trace_d(M: np.ndarray, V: np.ndarray, d: int) -> float:
    """Tr_d of the operator V^{-1} M in the form V, for a quadratic form matrix M"""
    _check_d(d, np.shape(M)[0])
    return float(np.sum(generalized_spectrum(M, V)[:d]))


def random_orthonormal_frame(
    dim: int, d: int, rng: np.random.Generator, form: Optional[InnerProduct] = None
) -> VectorFrame:
    """Haar-random frame, orthonormal in the form"""
    _check_d(d, dim)
    Q, R = np.linalg.qr(rng.standard_normal((dim, d)))
    Q = Q * np.sign(np.diag(R))
    if form is not None and not form.is_identity:
        _, U_inv = form_sqrt(form)
        Q = U_inv @ Q
    return VectorFrame(Q)


def sampled_omega_d(
    L: DenseOperator,
    d: int,
    form: InnerProduct,
    rng: np.random.Generator,
    n_samples: int = 10_000,
    refine_steps: int = 0,
) -> float:
    """Lower estimate of omega_d as the best wedge_norm(L E) over random orthonormal E

    Frames are drawn in batches of SAMPLE_BATCH. With refine_steps > 0 the
    best sample seeds a subspace iteration on B^T B.
    """
    _check_operator(L, form.dim)
    _check_d(d, form.dim)
    B = _congruent(L, form)
    best, best_frame = -np.inf, None
    for start in range(0, n_samples, SAMPLE_BATCH):
        count = min(SAMPLE_BATCH, n_samples - start)
        frames = np.linalg.qr(rng.standard_normal((count, form.dim, d)))[0]
        # |det R| of the image is the d-volume it spans
        R = np.linalg.qr(B @ frames, mode="r")
        volumes = np.abs(np.prod(np.diagonal(R, axis1=-2, axis2=-1), axis=-1))
        i = int(np.argmax(volumes))
        if volumes[i] > best:
            best, best_frame = float(volumes[i]), frames[i]
    if refine_steps and best_frame is not None:
        identity = InnerProduct.identity(form.dim)
        BtB = B.T @ B
        X = best_frame
        for _ in range(refine_steps):
            X, _ = np.linalg.qr(BtB @ X)
        best = max(best, wedge_norm(VectorFrame(B @ X), identity))
    logger.debug("sampled omega_%d over %d frames: %.6e", d, n_samples, best)
    return float(best)
