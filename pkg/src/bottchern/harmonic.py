"""Floating-point Laplacian kernels, used only to cross-check exact dimensions.

The canonical monomial basis is taken orthonormal, so adjoints are
conjugate transposes.
"""

from __future__ import annotations

import numpy as np

from .algebra import OperatorSet
from .errors import DomainError, IllConditioned

LABELS = ("A", "BC", "del", "dbar")


def laplacian(ops: OperatorSet, label: str, p: int, q: int) -> np.ndarray:
    def D(a, b):
        return ops.del_(a, b).to_numpy()

    def B(a, b):
        return ops.dbar(a, b).to_numpy()

    def H(m):
        return m.conj().T

    dim = ops.dim(p, q)
    if label == "del":
        d_in, d_out = D(p - 1, q), D(p, q)
        return d_in @ H(d_in) + H(d_out) @ d_out
    if label == "dbar":
        b_in, b_out = B(p, q - 1), B(p, q)
        return b_in @ H(b_in) + H(b_out) @ b_out
    if label == "BC":
        ddb_in = D(p - 1, q) @ B(p - 1, q - 1)   # del delbar : (p-1,q-1) -> (p,q)
        ddb_out = D(p, q + 1) @ B(p, q)          # del delbar : (p,q) -> (p+1,q+1)
        ds_b = H(D(p - 1, q + 1)) @ B(p, q)      # del* delbar : (p,q) -> (p-1,q+1)
        bs_d = H(B(p + 1, q - 1)) @ D(p, q)      # delbar* del : (p,q) -> (p+1,q-1)
        out = (ddb_in @ H(ddb_in) + H(ddb_out) @ ddb_out + H(ds_b) @ ds_b
               + H(bs_d) @ bs_d + H(B(p, q)) @ B(p, q) + H(D(p, q)) @ D(p, q))
        return out.reshape(dim, dim)
    if label == "A":
        d_in, b_in = D(p - 1, q), B(p, q - 1)
        ddb_in = D(p - 1, q) @ B(p - 1, q - 1)
        ddb_out = D(p, q + 1) @ B(p, q)
        b_ds = B(p - 1, q) @ H(D(p - 1, q))      # delbar del* : (p,q) -> (p-1,q+1)
        d_bs = D(p, q - 1) @ H(B(p, q - 1))      # del delbar* : (p,q) -> (p+1,q-1)
        out = (d_in @ H(d_in) + b_in @ H(b_in) + H(ddb_out) @ ddb_out
               + ddb_in @ H(ddb_in) + H(b_ds) @ b_ds + H(d_bs) @ d_bs)
        return out.reshape(dim, dim)
    raise DomainError(f"unknown Laplacian label {label!r}")


def harmonic_dims(ops: OperatorSet, label: str, p: int, q: int, tol: float = 1e-8) -> int:
    """Dimension of the numerical kernel of the chosen Laplacian on Lambda^{p,q}.

    Singular values below tol * sigma_max count as zero.  Raises IllConditioned
    when the nearest singular values on either side of the threshold are
    within a factor 10 of it.
    """
    if not (0 <= p <= ops.n and 0 <= q <= ops.n):
        raise DomainError(f"bidegree ({p},{q}) out of range")
    lap = laplacian(ops, label, p, q)
    dim = lap.shape[0]
    if dim == 0:
        return 0
    s = np.linalg.svd(lap, compute_uv=False)
    smax = s.max()
    if smax == 0.0:
        return dim
    thresh = tol * smax
    small = s[s < thresh]
    large = s[s >= thresh]
    if large.size and large.min() < 10 * thresh:
        raise IllConditioned(f"singular value {large.min():.3e} within 10x of threshold "
                             f"{thresh:.3e} ({label} on ({p},{q}))")
    if small.size and small.max() > thresh / 10:
        raise IllConditioned(f"singular value {small.max():.3e} within 10x of threshold "
                             f"{thresh:.3e} ({label} on ({p},{q}))")
    return int(small.size)
