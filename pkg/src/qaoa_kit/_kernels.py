"""Statevector kernels.

Every kernel mutates a 2-D complex array ``psi`` of shape ``(2**n, batch)`` in
place.  Column ``c`` is an independent state, which lets verification code push
a whole block of basis states through a circuit in one pass.

Two interchangeable implementations exist: numba-compiled loops and a
vectorized numpy fallback.  ``QAOA_KIT_DISABLE_NUMBA=1`` forces the fallback;
it is also used automatically when numba cannot be imported.
"""
from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

try:  # pragma: no cover - exercised implicitly
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

_DISABLED = os.environ.get("QAOA_KIT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}
BACKEND = "numba" if (_HAVE_NUMBA and not _DISABLED) else "numpy"


# --------------------------------------------------------------------------
# numpy implementation
# --------------------------------------------------------------------------


@lru_cache(maxsize=512)
def _pair_indices(dim: int, cmask: int, cval: int, tmask: int, pa: int, pb: int):
    idx = np.arange(dim, dtype=np.int64)
    sel = ((idx & cmask) == cval) & ((idx & tmask) == pa)
    i = idx[sel]
    j = (i & ~tmask) | pb
    i.setflags(write=False)
    j.setflags(write=False)
    return i, j


@lru_cache(maxsize=512)
def _phase_indices(dim: int, cmask: int, cval: int, zmask: int):
    idx = np.arange(dim, dtype=np.int64)
    sel = idx[(idx & cmask) == cval]
    par = np.zeros(sel.shape, dtype=np.int64)
    m = sel & zmask
    while np.any(m):
        par ^= m & 1
        m = m >> 1
    sel.setflags(write=False)
    par.setflags(write=False)
    return sel, par.astype(bool)


@lru_cache(maxsize=256)
def _local_indices(dim: int, cmask: int, cval: int, targets: tuple[int, ...]):
    tmask = 0
    for t in targets:
        tmask |= 1 << t
    idx = np.arange(dim, dtype=np.int64)
    base = idx[((idx & tmask) == 0) & ((idx & cmask) == cval)]
    k = len(targets)
    offs = np.zeros(1 << k, dtype=np.int64)
    for local in range(1 << k):
        for pos, t in enumerate(targets):
            if (local >> pos) & 1:
                offs[local] |= 1 << t
    table = base[:, None] + offs[None, :]
    table.setflags(write=False)
    return table


def np_pair_rotate(psi, cmask, cval, tmask, pa, pb, u00, u01, u10, u11):
    i, j = _pair_indices(psi.shape[0], cmask, cval, tmask, pa, pb)
    a = psi[i]
    b = psi[j]
    psi[i] = u00 * a + u01 * b
    psi[j] = u10 * a + u11 * b


def np_phase_parity(psi, cmask, cval, zmask, ph_even, ph_odd):
    sel, odd = _phase_indices(psi.shape[0], cmask, cval, zmask)
    factors = np.where(odd, ph_odd, ph_even)
    psi[sel] *= factors[:, None]


def np_diag_mul(psi, phases):
    psi *= phases[:, None]


def np_local_unitary(psi, cmask, cval, targets, u):
    table = _local_indices(psi.shape[0], cmask, cval, tuple(int(t) for t in targets))
    block = psi[table]  # (n_base, 2^k, batch)
    psi[table] = np.einsum("ab,nbc->nac", u, block)


# --------------------------------------------------------------------------
# numba implementation
# --------------------------------------------------------------------------

if _HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _nb_pair_rotate(psi, cmask, cval, tmask, pa, pb, u00, u01, u10, u11):
        dim, batch = psi.shape
        for i in range(dim):
            if (i & cmask) != cval or (i & tmask) != pa:
                continue
            j = (i & ~tmask) | pb
            for c in range(batch):
                a = psi[i, c]
                b = psi[j, c]
                psi[i, c] = u00 * a + u01 * b
                psi[j, c] = u10 * a + u11 * b

    @njit(cache=True, nogil=True)
    def _nb_phase_parity(psi, cmask, cval, zmask, ph_even, ph_odd):
        dim, batch = psi.shape
        for i in range(dim):
            if (i & cmask) != cval:
                continue
            m = i & zmask
            par = 0
            while m:
                par ^= m & 1
                m >>= 1
            f = ph_odd if par else ph_even
            for c in range(batch):
                psi[i, c] *= f

    @njit(cache=True, nogil=True)
    def _nb_diag_mul(psi, phases):
        dim, batch = psi.shape
        for i in range(dim):
            f = phases[i]
            for c in range(batch):
                psi[i, c] *= f

    @njit(cache=True, nogil=True)
    def _nb_local_unitary(psi, cmask, cval, targets, u):
        dim, batch = psi.shape
        k = targets.shape[0]
        size = 1 << k
        tmask = 0
        for t in targets:
            tmask |= 1 << t
        offs = np.zeros(size, dtype=np.int64)
        for local in range(size):
            o = 0
            for pos in range(k):
                if (local >> pos) & 1:
                    o |= 1 << targets[pos]
            offs[local] = o
        buf = np.empty(size, dtype=np.complex128)
        for base in range(dim):
            if (base & tmask) != 0 or (base & cmask) != cval:
                continue
            for c in range(batch):
                for r in range(size):
                    buf[r] = psi[base + offs[r], c]
                for r in range(size):
                    acc = 0j
                    for s in range(size):
                        acc += u[r, s] * buf[s]
                    psi[base + offs[r], c] = acc

    def nb_pair_rotate(psi, cmask, cval, tmask, pa, pb, u00, u01, u10, u11):
        _nb_pair_rotate(psi, np.int64(cmask), np.int64(cval), np.int64(tmask), np.int64(pa),
                        np.int64(pb), complex(u00), complex(u01), complex(u10), complex(u11))

    def nb_phase_parity(psi, cmask, cval, zmask, ph_even, ph_odd):
        _nb_phase_parity(psi, np.int64(cmask), np.int64(cval), np.int64(zmask),
                         complex(ph_even), complex(ph_odd))

    def nb_diag_mul(psi, phases):
        _nb_diag_mul(psi, np.ascontiguousarray(phases, dtype=np.complex128))

    def nb_local_unitary(psi, cmask, cval, targets, u):
        _nb_local_unitary(psi, np.int64(cmask), np.int64(cval),
                          np.asarray(targets, dtype=np.int64),
                          np.ascontiguousarray(u, dtype=np.complex128))


NUMPY_KERNELS = {
    "pair_rotate": np_pair_rotate,
    "phase_parity": np_phase_parity,
    "diag_mul": np_diag_mul,
    "local_unitary": np_local_unitary,
}

if _HAVE_NUMBA:
    NUMBA_KERNELS = {
        "pair_rotate": nb_pair_rotate,
        "phase_parity": nb_phase_parity,
        "diag_mul": nb_diag_mul,
        "local_unitary": nb_local_unitary,
    }
else:  # pragma: no cover
    NUMBA_KERNELS = None

KERNELS = NUMBA_KERNELS if BACKEND == "numba" else NUMPY_KERNELS


def kernels(backend: str | None = None) -> dict:
    """Kernel table for ``backend`` ("numba" or "numpy"); default is the active one."""
    if backend is None:
        return KERNELS
    if backend == "numpy":
        return NUMPY_KERNELS
    if backend == "numba":
        if NUMBA_KERNELS is None:
            raise RuntimeError("numba is not available")
        return NUMBA_KERNELS
    raise ValueError(f"unknown backend {backend!r}")
