"""Dense 2^n amplitude kernels.

Two implementations live side by side: numba ``@njit`` loops and vectorised
numpy.  The numba path is used when numba imports and ``NJL_QET_DISABLE_NUMBA``
is unset (or ``0``); otherwise everything falls back to numpy.  Both expose the
same function names with identical semantics, so tests and the benchmark can
import ``numba_kernels`` / ``numpy_kernels`` directly and compare.

Bit conventions: qubit ``q`` is bit ``q`` of the amplitude index.  A Pauli
string is carried as ``(xmask, zmask, yphase)`` where ``xmask`` flags X or Y,
``zmask`` flags Z or Y and ``yphase = i**(number of Y)``, so that

    P|b> = yphase * (-1)**popcount(b & zmask) |b ^ xmask>.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

# ---------------------------------------------------------------- numpy ---


def _np_signs(dim, zmask):
    idx = np.arange(dim, dtype=np.int64)
    return 1.0 - 2.0 * (np.bitwise_count(idx & zmask) & 1)


def np_pauli_rotation(state, xmask, zmask, yphase, cos_t, sin_t):
    """In place: state <- (cos t - i sin t P) state."""
    dim = state.shape[0]
    signs = _np_signs(dim, zmask)
    if xmask == 0:
        state *= cos_t - 1j * sin_t * signs
        return state
    idx = np.arange(dim, dtype=np.int64)
    partner = idx ^ xmask
    pstate = yphase * signs[partner] * state[partner]
    state *= cos_t
    state -= 1j * sin_t * pstate
    return state


def np_apply_pauli_add(out, state, xmask, zmask, coeff):
    """out += coeff * P state."""
    dim = state.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    signs = _np_signs(dim, zmask)
    out[idx ^ xmask] += coeff * signs * state
    return out


def np_pauli_expectation(state, xmask, zmask, yphase):
    dim = state.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    signs = _np_signs(dim, zmask)
    return yphase * np.vdot(state[idx ^ xmask], signs * state)


def np_apply_1q(state, mat, target):
    n = state.shape[0].bit_length() - 1
    view = state.reshape(1 << (n - target - 1), 2, 1 << target)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = mat[0, 0] * a0 + mat[0, 1] * a1
    view[:, 1, :] = mat[1, 0] * a0 + mat[1, 1] * a1
    return state


def np_apply_cx(state, control, target):
    dim = state.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    sel = idx[((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)]
    flip = sel | (1 << target)
    tmp = state[sel].copy()
    state[sel] = state[flip]
    state[flip] = tmp
    return state


def np_prob_one(state, qubit):
    idx = np.arange(state.shape[0], dtype=np.int64)
    mask = ((idx >> qubit) & 1).astype(bool)
    return float(np.sum(np.abs(state[mask]) ** 2))


def np_project(state, qubit, bit, scale):
    idx = np.arange(state.shape[0], dtype=np.int64)
    keep = ((idx >> qubit) & 1) == bit
    state[~keep] = 0.0
    state[keep] *= scale
    return state


numpy_kernels = SimpleNamespace(
    name="numpy",
    pauli_rotation=np_pauli_rotation,
    apply_pauli_add=np_apply_pauli_add,
    pauli_expectation=np_pauli_expectation,
    apply_1q=np_apply_1q,
    apply_cx=np_apply_cx,
    prob_one=np_prob_one,
    project=np_project,
)

# ---------------------------------------------------------------- numba ---

numba_kernels = None
try:
    from numba import njit

    @njit(cache=True, inline="always")
    def _parity(v):
        v ^= v >> 32
        v ^= v >> 16
        v ^= v >> 8
        v ^= v >> 4
        v ^= v >> 2
        v ^= v >> 1
        return v & 1

    @njit(cache=True)
    def _nb_pauli_rotation(state, xmask, zmask, yphase, cos_t, sin_t):
        dim = state.shape[0]
        if xmask == 0:
            for b in range(dim):
                if _parity(b & zmask):
                    state[b] *= cos_t + 1j * sin_t
                else:
                    state[b] *= cos_t - 1j * sin_t
            return state
        hbit = 1
        while hbit <= xmask:
            hbit <<= 1
        hbit >>= 1
        low = hbit - 1
        ms = -1j * sin_t * yphase
        for g in range(dim >> 1):
            b = ((g & ~low) << 1) | (g & low)
            bp = b ^ xmask
            sb = 1.0 - 2.0 * _parity(b & zmask)
            sbp = 1.0 - 2.0 * _parity(bp & zmask)
            a = state[b]
            ap = state[bp]
            state[b] = cos_t * a + ms * sbp * ap
            state[bp] = cos_t * ap + ms * sb * a
        return state

    @njit(cache=True)
    def _nb_apply_pauli_add(out, state, xmask, zmask, coeff):
        for b in range(state.shape[0]):
            s = 1.0 - 2.0 * _parity(b & zmask)
            out[b ^ xmask] += coeff * s * state[b]
        return out

    @njit(cache=True)
    def _nb_pauli_expectation(state, xmask, zmask, yphase):
        acc = 0.0 + 0.0j
        for b in range(state.shape[0]):
            s = 1.0 - 2.0 * _parity(b & zmask)
            acc += np.conj(state[b ^ xmask]) * s * state[b]
        return yphase * acc

    @njit(cache=True)
    def _nb_apply_1q(state, mat, target):
        tk = 1 << target
        m00, m01, m10, m11 = mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1]
        for g in range(state.shape[0] >> 1):
            i0 = ((g >> target) << (target + 1)) | (g & (tk - 1))
            i1 = i0 | tk
            a0 = state[i0]
            a1 = state[i1]
            state[i0] = m00 * a0 + m01 * a1
            state[i1] = m10 * a0 + m11 * a1
        return state

    @njit(cache=True)
    def _nb_apply_cx(state, control, target):
        ck = 1 << control
        tk = 1 << target
        for b in range(state.shape[0]):
            if (b & ck) and not (b & tk):
                bp = b | tk
                tmp = state[b]
                state[b] = state[bp]
                state[bp] = tmp
        return state

    @njit(cache=True)
    def _nb_prob_one(state, qubit):
        qk = 1 << qubit
        acc = 0.0
        for b in range(state.shape[0]):
            if b & qk:
                acc += state[b].real ** 2 + state[b].imag ** 2
        return acc

    @njit(cache=True)
    def _nb_project(state, qubit, bit, scale):
        for b in range(state.shape[0]):
            if ((b >> qubit) & 1) == bit:
                state[b] *= scale
            else:
                state[b] = 0.0
        return state

    def _wrap_rotation(state, xmask, zmask, yphase, cos_t, sin_t):
        return _nb_pauli_rotation(state, np.int64(xmask), np.int64(zmask),
                                  complex(yphase), float(cos_t), float(sin_t))

    def _wrap_apply_pauli_add(out, state, xmask, zmask, coeff):
        return _nb_apply_pauli_add(out, state, np.int64(xmask),
                                   np.int64(zmask), complex(coeff))

    def _wrap_expectation(state, xmask, zmask, yphase):
        return _nb_pauli_expectation(state, np.int64(xmask), np.int64(zmask),
                                     complex(yphase))

    def _wrap_1q(state, mat, target):
        return _nb_apply_1q(state, np.ascontiguousarray(mat, dtype=np.complex128),
                            np.int64(target))

    numba_kernels = SimpleNamespace(
        name="numba",
        pauli_rotation=_wrap_rotation,
        apply_pauli_add=_wrap_apply_pauli_add,
        pauli_expectation=_wrap_expectation,
        apply_1q=_wrap_1q,
        apply_cx=lambda s, c, t: _nb_apply_cx(s, np.int64(c), np.int64(t)),
        prob_one=lambda s, q: float(_nb_prob_one(s, np.int64(q))),
        project=lambda s, q, bit, scale: _nb_project(s, np.int64(q), np.int64(bit),
                                                     float(scale)),
    )
except ImportError:  # pragma: no cover - numba is a declared dependency
    pass


def _numba_disabled():
    return os.environ.get("NJL_QET_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")


kernels = numba_kernels if (numba_kernels is not None and not _numba_disabled()) else numpy_kernels
BACKEND = kernels.name
