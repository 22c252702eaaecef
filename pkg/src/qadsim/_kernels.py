"""Compiled inner loops for the fixed-step time integration.

The Hamiltonian is applied through its structure (real diagonal plus one
complex band per mode) instead of a generic sparse matvec; at the default
step size the integrator takes millions of steps, so this loop dominates
the run time of every evolution.
"""

import math

import numpy as np
from numba import njit

SHAPE_LINEAR = 0
SHAPE_SMOOTHSTEP = 1


@njit(cache=True, fastmath=True)
def _mix(s, shape_tag):
    """Problem-Hamiltonian weight utilde(s); jtilde is its complement."""
    if shape_tag == SHAPE_SMOOTHSTEP:
        return s * s * (3.0 - 2.0 * s)
    return s


@njit(cache=True, fastmath=True)
def _apply_h(out, psi, hi_diag, hp_diag, hop, hop_offsets, sizes, strides, jt, ut):
    """out = (jt * H_I + ut * diag(hp)) psi, without the -i factor."""
    dim = psi.shape[0]
    for f in range(dim):
        out[f] = (jt * hi_diag[f] + ut * hp_diag[f]) * psi[f]
    for m in range(sizes.shape[0]):
        stride = strides[m]
        size = sizes[m]
        block = stride * size
        offset = hop_offsets[m]
        for base in range(0, dim, block):
            for n in range(size - 1):
                c = jt * hop[offset + n]
                cc = jt * np.conj(hop[offset + n])
                row = base + n * stride
                for j in range(row, row + stride):
                    out[j + stride] += c * psi[j]
                    out[j] += cc * psi[j + stride]


@njit(cache=True, fastmath=True)
def rk4_segment(
    psi,
    hi_diag,
    hp_diag,
    hop,
    hop_offsets,
    sizes,
    strides,
    t_start,
    n_steps,
    dt,
    total_time,
    shape_tag,
):
    """Integrate i d|psi>/dt = H(t/T)|psi> over n_steps of classic RK4.

    The state is renormalized after every step; returns the largest and
    the accumulated per-step norm deviation, plus a finite-amplitudes flag.
    psi is updated in place.
    """
    dim = psi.shape[0]
    k1 = np.empty(dim, np.complex128)
    k2 = np.empty(dim, np.complex128)
    k3 = np.empty(dim, np.complex128)
    k4 = np.empty(dim, np.complex128)
    tmp = np.empty(dim, np.complex128)
    max_drift = 0.0
    sum_drift = 0.0
    for step in range(n_steps):
        t = t_start + step * dt
        u0 = _mix(t / total_time, shape_tag)
        um = _mix((t + 0.5 * dt) / total_time, shape_tag)
        ue = _mix((t + dt) / total_time, shape_tag)
        _apply_h(k1, psi, hi_diag, hp_diag, hop, hop_offsets, sizes, strides, 1.0 - u0, u0)
        for i in range(dim):
            tmp[i] = psi[i] - 1j * (0.5 * dt) * k1[i]
        _apply_h(k2, tmp, hi_diag, hp_diag, hop, hop_offsets, sizes, strides, 1.0 - um, um)
        for i in range(dim):
            tmp[i] = psi[i] - 1j * (0.5 * dt) * k2[i]
        _apply_h(k3, tmp, hi_diag, hp_diag, hop, hop_offsets, sizes, strides, 1.0 - um, um)
        for i in range(dim):
            tmp[i] = psi[i] - 1j * dt * k3[i]
        _apply_h(k4, tmp, hi_diag, hp_diag, hop, hop_offsets, sizes, strides, 1.0 - ue, ue)
        norm2 = 0.0
        for i in range(dim):
            # k holds H psi; the RK4 update carries the -i from the equation.
            psi[i] = psi[i] - 1j * (dt / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
            norm2 += psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
        if not math.isfinite(norm2) or norm2 == 0.0:
            return max_drift, sum_drift, False
        norm = math.sqrt(norm2)
        drift = abs(1.0 - norm)
        if drift > max_drift:
            max_drift = drift
        sum_drift += drift
        inv = 1.0 / norm
        for i in range(dim):
            psi[i] *= inv
    return max_drift, sum_drift, True
