"""Dense least squares for the wave fits: pivoted QR, truncated SVD, Tikhonov.

Complex systems are solved through the standard 2x-size realification so a
single real kernel serves everything; the reported residual is always
recomputed on the original system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "LeastSquaresSolution",
    "parse_mode",
    "mode_label",
    "qr_pivot",
    "svd",
    "lstsq",
]

DEFAULT_TSVD_THRESHOLD = 1e-12


@dataclass(frozen=True)
class LeastSquaresSolution:
    coefficients: np.ndarray
    residual_norm: float
    effective_rank: int
    truncation_threshold: float
    mode: str


def parse_mode(mode) -> tuple[str, float]:
    """Normalize a solver mode string.

    Accepts "qr" / "qr_pivot", "tsvd" / "tsvd:<rel threshold>", and
    "tikhonov:<alpha>" (alpha 0 falls back to a pseudo-inverse cutoff).
    """
    if isinstance(mode, (tuple, list)) and len(mode) == 2:
        kind, param = str(mode[0]), float(mode[1])
    else:
        text = str(mode).strip().lower()
        if ":" in text:
            kind, _, raw = text.partition(":")
            param = float(raw)
        else:
            kind, param = text, None
    kind = {"qr_pivot": "qr"}.get(kind, kind)
    if kind == "qr":
        return "qr", 0.0
    if kind == "tsvd":
        return "tsvd", DEFAULT_TSVD_THRESHOLD if param is None else float(param)
    if kind == "tikhonov":
        return "tikhonov", 0.0 if param is None else float(param)
    raise ValueError(f"unknown least-squares mode {mode!r}")


def mode_label(mode) -> str:
    kind, param = parse_mode(mode)
    if kind == "qr":
        return "qr"
    return f"{kind}:{param:g}"


def qr_pivot(A: np.ndarray):
    """Householder QR with column pivoting: A[:, perm] = Q @ R."""
    Q, R, perm = scipy.linalg.qr(np.asarray(A, dtype=float), mode="economic",
                                 pivoting=True)
    return Q, R, perm


def svd(A: np.ndarray):
    """Thin SVD (U, s, V) with s nonincreasing and A = U @ diag(s) @ V^H."""
    A = np.asarray(A)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    return U, s, Vh.conj().T


def _realify(A: np.ndarray, b: np.ndarray):
    Ar = np.block([[A.real, -A.imag], [A.imag, A.real]])
    br = np.concatenate([b.real, b.imag])
    return Ar, br


def lstsq(A, b, mode="qr") -> LeastSquaresSolution:
    """Minimize ||A x - b||_2 (plus alpha^2 ||x||^2 in tikhonov mode)."""
    A = np.asarray(A)
    b = np.asarray(b)
    if A.ndim != 2 or b.ndim != 1 or b.shape[0] != A.shape[0]:
        raise ValueError("need a 2-D matrix and a matching right-hand side")
    if not (np.all(np.isfinite(A.real)) and np.all(np.isfinite(A.imag)) and
            np.all(np.isfinite(b.real)) and np.all(np.isfinite(b.imag))):
        raise ValueError("non-finite entries in the least-squares system")
    kind, param = parse_mode(mode)

    complex_input = np.iscomplexobj(A) or np.iscomplexobj(b)
    if complex_input:
        Ar, br = _realify(A.astype(complex), b.astype(complex))
    else:
        Ar, br = A.astype(float), b.astype(float)

    ncols = Ar.shape[1]
    if not np.any(Ar):
        x = np.zeros(ncols)
        rank, cutoff = 0, 0.0
    elif kind == "qr":
        Q, R, perm = scipy.linalg.qr(Ar, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        cutoff = max(Ar.shape) * np.finfo(float).eps * diag[0]
        rank = int(np.count_nonzero(diag > cutoff))
        z = Q.T @ br
        y = np.zeros(ncols)
        y[:rank] = scipy.linalg.solve_triangular(R[:rank, :rank], z[:rank])
        x = np.zeros(ncols)
        x[perm] = y
    else:
        U, s, V = svd(Ar)
        if kind == "tsvd":
            cutoff = param * s[0]
            keep = s > cutoff
            rank = int(np.count_nonzero(keep))
            filt = np.zeros_like(s)
            filt[keep] = 1.0 / s[keep]
        else:  # tikhonov
            cutoff = param
            floor = max(Ar.shape) * np.finfo(float).eps * s[0]
            keep = s > floor
            filt = np.zeros_like(s)
            if param == 0.0:
                filt[keep] = 1.0 / s[keep]
            else:
                filt[keep] = s[keep] / (s[keep] ** 2 + param ** 2)
            rank = int(np.count_nonzero(s > max(param, floor)))
        x = V @ (filt * (U.T @ br))

    if complex_input:
        coef = x[: ncols // 2] + 1j * x[ncols // 2:]
        A_orig, b_orig = A.astype(complex), b.astype(complex)
    else:
        coef = x
        A_orig, b_orig = Ar, br
    residual = float(np.linalg.norm(A_orig @ coef - b_orig))
    return LeastSquaresSolution(coefficients=coef, residual_norm=residual,
                                effective_rank=rank,
                                truncation_threshold=float(cutoff),
                                mode=mode_label(mode))
