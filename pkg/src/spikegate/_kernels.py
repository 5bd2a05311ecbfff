"""Batch stepping kernels.

Both kernels advance a batch of independent devices through one shared
schedule of voltage events and must agree bit-for-bit with
:class:`spikegate.device.DeviceState`. Decay factors are computed by the
caller with ``math.exp`` so neither kernel evaluates transcendental functions.

Set ``SPIKEGATE_NO_NUMBA=1`` to force the numpy path.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

_DISABLED = os.environ.get("SPIKEGATE_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")
HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED


def drive_numpy(u, s, va, volts, has_pre, pre_cu, pre_es, cu, es, kappa, g_dc, noise, out):
    """Loop over events, vectorised over the batch.

    u, s, va : (n,) state, updated in place
    volts, has_pre, pre_cu, pre_es : (m,) per-event level and optional extra hold
    cu, es : one-step ``1 - exp(-dt/tau_u)`` and ``exp(-dt/tau_s)``
    noise, out : (n, m)
    """
    for j in range(volts.shape[0]):
        if has_pre[j]:
            u += (va - u) * pre_cu[j]
            s *= pre_es[j]
        u += (va - u) * cu
        s *= es
        v = volts[j]
        changed = va != v
        s[changed] = kappa * (v - u[changed])
        va[:] = v
        out[:, j] = g_dc * va + s + noise[:, j]


def _drive_loops(u, s, va, volts, has_pre, pre_cu, pre_es, cu, es, kappa, g_dc, noise, out):
    n = u.shape[0]
    m = volts.shape[0]
    for b in range(n):
        ub = u[b]
        sb = s[b]
        vb = va[b]
        for j in range(m):
            if has_pre[j]:
                ub += (vb - ub) * pre_cu[j]
                sb *= pre_es[j]
            ub += (vb - ub) * cu
            sb *= es
            v = volts[j]
            if v != vb:
                sb = kappa * (v - ub)
            vb = v
            out[b, j] = g_dc * vb + sb + noise[b, j]
        u[b] = ub
        s[b] = sb
        va[b] = vb


# fastmath stays off: reassociation would break agreement with the scalar model
drive_numba = numba.njit(cache=False, nogil=True)(_drive_loops) if HAVE_NUMBA else None

drive = drive_numba if USE_NUMBA else drive_numpy
