"""Hot numeric kernels: shifted Hessenberg resolvent solves.

Spectrum evaluation reduces to solving (z I - H) x = b for one upper
Hessenberg matrix H and many shifts z (one per frequency-grid point).
Each solve is O(n^2) via Gaussian elimination restricted to the single
subdiagonal, with adjacent-row partial pivoting; this sequential inner
loop dominates multi-point runs and is the one place numba pays off.

Both implementations share exact semantics.  Selection order:

* explicit ``use_numba`` argument, if given;
* environment flag ``QDCAV_DISABLE_NUMBA`` (1/true/yes disables numba);
* otherwise numba when importable.

``python benchmarks/bench_kernels.py`` compares the two paths.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "QDCAV_DISABLE_NUMBA"


def _env_disabled() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


try:
    if _env_disabled():
        raise ImportError("numba disabled by environment flag")
    import numba

    NUMBA_AVAILABLE = True
except ImportError:
    numba = None
    NUMBA_AVAILABLE = False


class SingularShiftError(ValueError):
    """A shifted system was exactly singular at some grid point."""


def _resolvent_weights_numpy(h, shifts, b, a_conj):
    """Pure-numpy path: returns w[s] = a_conj . x where (z_s I - H) x = b."""
    n = b.shape[0]
    out = np.empty(len(shifts), dtype=np.complex128)
    for si, z in enumerate(shifts):
        u = z * np.eye(n, dtype=np.complex128) - h
        y = b.astype(np.complex128).copy()
        for k in range(n - 1):
            if abs(u[k + 1, k]) > abs(u[k, k]):
                u[[k, k + 1], k:] = u[[k + 1, k], k:]
                y[[k, k + 1]] = y[[k + 1, k]]
            piv = u[k, k]
            if piv == 0.0:
                raise SingularShiftError(f"singular shifted system at shift index {si}")
            m = u[k + 1, k] / piv
            if m != 0.0:
                u[k + 1, k + 1:] -= m * u[k, k + 1:]
                y[k + 1] -= m * y[k]
        x = np.empty(n, dtype=np.complex128)
        for i in range(n - 1, -1, -1):
            piv = u[i, i]
            if piv == 0.0:
                raise SingularShiftError(f"singular shifted system at shift index {si}")
            x[i] = (y[i] - u[i, i + 1:] @ x[i + 1:]) / piv
        out[si] = a_conj @ x
    return out


if NUMBA_AVAILABLE:

    @numba.njit(cache=True, nogil=True)
    def _resolvent_weights_numba(h, shifts, b, a_conj):  # pragma: no cover - numba
        n = b.shape[0]
        out = np.empty(len(shifts), dtype=np.complex128)
        u = np.empty((n, n), dtype=np.complex128)
        y = np.empty(n, dtype=np.complex128)
        x = np.empty(n, dtype=np.complex128)
        for si in range(len(shifts)):
            z = shifts[si]
            for r in range(n):
                for c in range(n):
                    u[r, c] = -h[r, c]
                u[r, r] += z
                y[r] = b[r]
            for k in range(n - 1):
                if abs(u[k + 1, k]) > abs(u[k, k]):
                    for j in range(k, n):
                        tmp = u[k, j]
                        u[k, j] = u[k + 1, j]
                        u[k + 1, j] = tmp
                    tmp = y[k]
                    y[k] = y[k + 1]
                    y[k + 1] = tmp
                piv = u[k, k]
                if piv == 0.0:
                    raise ValueError("singular shifted system")
                m = u[k + 1, k] / piv
                if m != 0.0:
                    for j in range(k + 1, n):
                        u[k + 1, j] -= m * u[k, j]
                    y[k + 1] -= m * y[k]
            for i in range(n - 1, -1, -1):
                piv = u[i, i]
                if piv == 0.0:
                    raise ValueError("singular shifted system")
                s = y[i]
                for j in range(i + 1, n):
                    s -= u[i, j] * x[j]
                x[i] = s / piv
            acc = 0.0 + 0.0j
            for i in range(n):
                acc += a_conj[i] * x[i]
            out[si] = acc
        return out

else:
    _resolvent_weights_numba = None


def resolvent_weights(h, shifts, b, a_conj, use_numba: bool | None = None) -> np.ndarray:
    """w[s] = a_conj . (z_s I - H)^{-1} b for an upper Hessenberg H.

    `a_conj` must already be conjugated by the caller (it is the row
    vector of the final contraction).  Raises SingularShiftError when a
    shift hits an exact eigenvalue of H.
    """
    h = np.ascontiguousarray(h, dtype=np.complex128)
    shifts = np.ascontiguousarray(shifts, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    a_conj = np.ascontiguousarray(a_conj, dtype=np.complex128)
    if use_numba is None:
        use_numba = NUMBA_AVAILABLE
    if use_numba and not NUMBA_AVAILABLE:
        raise RuntimeError("numba path requested but numba is unavailable")
    if use_numba:
        try:
            return _resolvent_weights_numba(h, shifts, b, a_conj)
        except ValueError as exc:
            raise SingularShiftError(str(exc)) from exc
    return _resolvent_weights_numpy(h, shifts, b, a_conj)


def solve_shifted_hessenberg(h, z, b, use_numba: bool | None = None) -> np.ndarray:
    """Solve (z I - H) x = b for upper Hessenberg H (single shift).

    Convenience wrapper used by tests; production code batches shifts
    through :func:`resolvent_weights`.
    """
    h = np.ascontiguousarray(h, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    n = b.shape[0]
    # recover x by contracting against each coordinate vector is O(n^3);
    # instead run the numpy elimination directly once
    out = np.empty(n, dtype=np.complex128)
    u = z * np.eye(n, dtype=np.complex128) - h
    y = b.copy()
    for k in range(n - 1):
        if abs(u[k + 1, k]) > abs(u[k, k]):
            u[[k, k + 1], k:] = u[[k + 1, k], k:]
            y[[k, k + 1]] = y[[k + 1, k]]
        piv = u[k, k]
        if piv == 0.0:
            raise SingularShiftError("singular shifted system")
        m = u[k + 1, k] / piv
        if m != 0.0:
            u[k + 1, k + 1:] -= m * u[k, k + 1:]
            y[k + 1] -= m * y[k]
    for i in range(n - 1, -1, -1):
        piv = u[i, i]
        if piv == 0.0:
            raise SingularShiftError("singular shifted system")
        out[i] = (y[i] - u[i, i + 1:] @ out[i + 1:]) / piv
    return out
