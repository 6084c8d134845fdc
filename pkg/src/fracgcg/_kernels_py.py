"""NumPy implementations of the s-sweep kernels, used when the compiled
extension is unavailable. Same signatures and results as ``_kernels``."""

import numpy as np

# bounds the (n_s, n_modes) temporaries
_CHUNK_ELEMS = 1 << 22


def _chunks(ns, nm):
    step = max(1, _CHUNK_ELEMS // max(nm, 1))
    for lo in range(0, ns, step):
        yield slice(lo, min(lo + step, ns))


def order_sums(power, log_absm, s):
    power = np.asarray(power, dtype=float)
    log_absm = np.asarray(log_absm, dtype=float)
    s = np.asarray(s, dtype=float)
    out = np.empty(s.shape[0])
    for sl in _chunks(s.shape[0], power.shape[0]):
        out[sl] = np.exp(-4.0 * np.outer(s[sl], log_absm)) @ power
    return out


def aniso_sums(power, m1, m2, absm, s, zeta, omega, expo):
    power = np.asarray(power, dtype=float)
    m1 = np.atleast_2d(np.asarray(m1, dtype=float))
    m2 = np.atleast_2d(np.asarray(m2, dtype=float))
    s = np.asarray(s, dtype=float)
    iso = zeta * np.asarray(absm, dtype=float) + omega
    out = np.empty(s.shape[0])
    for sl in _chunks(s.shape[0], power.shape[0] * m1.shape[0]):
        cs = np.cos(s[sl])[:, None, None]
        sn = np.sin(s[sl])[:, None, None]
        base = np.abs(m1[None] * cs + m2[None] * sn).max(axis=1)
        out[sl] = np.exp(-expo * np.log(base + iso[None])) @ power
    return out
