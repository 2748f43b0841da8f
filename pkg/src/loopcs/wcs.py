"""Pointwise Wodzicki-Chern-Simons integrand on odd-dimensional metrics.

For a loop point with curvature pack R, loop velocity gd and a frame of
2k - 1 tangent vectors X_1 .. X_{2k-1}, the integrand is

    s_scale * 2/(2k-1)! * sum_{sigma in S_{2k-1}} sgn(sigma)
        tr[ B(X_{sigma(1)}) . Omega(X_{sigma(2)}, X_{sigma(3)}) . ...
                             . Omega(X_{sigma(2k-2)}, X_{sigma(2k-1)}) ]

with Omega(X, Y) the curvature endomorphism and B the velocity bracket

    reduced:  B(X)^a_b = (-R_{bdc}^^a + R_{cbd}^^a) X^c gd^d
    full:     B(X)^a_b = (-2 R_{cdb}^^a - R_{bdc}^^a + R_{cbd}^^a) X^c gd^d.

The k - 1 curvature factors are composed as plain matrix products; all
antisymmetrization comes from the signed sum over the full symmetric group.
The extra term of the full bracket contributes the contraction of a 2k-form
with gd, which cancels in the signed sum whenever gd lies in the span of the
frame, so both variants agree on frames spanning a (2k-1)-manifold.  The
subprincipal-symbol endomorphism itself (:func:`symbol_endo`) carries an
additional factor 1/2 in the full variant.

On manifolds of dimension congruent to 3 mod 4 the integrand vanishes
identically: the lowered reduced bracket is symmetric while the lowered
curvature endomorphism is skew.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

__all__ = [
    "WcsFrame",
    "symbol_endo",
    "wcs_integrand",
    "velocity_bracket",
]

_VARIANTS = ("full", "reduced")


@dataclass(frozen=True)
class WcsFrame:
    """Degree parameter k, loop velocity, and a frame of 2k - 1 vectors."""

    k: int
    gammadot: np.ndarray
    frame: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gammadot", np.asarray(self.gammadot, dtype=float))
        object.__setattr__(self, "frame", np.asarray(self.frame, dtype=float))
        if self.k < 2:
            raise ValueError("form degree parameter k must be >= 2")
        if self.frame.shape[0] != 2 * self.k - 1:
            raise ValueError(
                f"frame must hold {2 * self.k - 1} vectors, got {self.frame.shape[0]}")


def velocity_bracket(pack, X, gammadot, variant: str = "reduced") -> np.ndarray:
    """The unhalved velocity bracket B(X) used inside the integrand."""
    if variant not in _VARIANTS:
        raise ValueError(f"variant must be one of {_VARIANTS}")
    rup = pack.riemann_up
    X = np.asarray(X, dtype=float)
    gd = np.asarray(gammadot, dtype=float)
    t_bdc = np.einsum("...bdca,...c,...d->...ab", rup, X, gd)
    t_cbd = np.einsum("...cbda,...c,...d->...ab", rup, X, gd)
    out = t_cbd - t_bdc
    if variant == "full":
        t_cdb = np.einsum("...cdba,...c,...d->...ab", rup, X, gd)
        out = out - 2.0 * t_cdb
    return out


def symbol_endo(pack, X, gammadot, variant: str = "full") -> np.ndarray:
    """Subprincipal-symbol endomorphism of the connection-difference form.

    ``full`` returns 1/2 (-2 R_{cdb}^^a - R_{bdc}^^a + R_{cbd}^^a) X^c gd^d;
    ``reduced`` drops the first term and the 1/2.  Linear in both X and the
    velocity; the lowered reduced endomorphism is symmetric.
    """
    out = velocity_bracket(pack, X, gammadot, variant)
    if variant == "full":
        out = 0.5 * out
    return out


def _perm_table(m: int) -> tuple[np.ndarray, np.ndarray]:
    perms = np.array(list(permutations(range(m))), dtype=np.intp)
    signs = np.empty(len(perms))
    for row, p in enumerate(perms):
        inversions = sum(1 for i in range(m) for j in range(i + 1, m) if p[i] > p[j])
        signs[row] = -1.0 if inversions % 2 else 1.0
    return perms, signs


_perm_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _perms(m: int):
    if m not in _perm_cache:
        _perm_cache[m] = _perm_table(m)
    return _perm_cache[m]


def wcs_integrand(pack, wf: WcsFrame, variant: str = "reduced",
                  s_scale: float = 1.0) -> float | np.ndarray:
    """Evaluate the integrand at one loop point (batched over the pack).

    The returned value is the density of the (2k-1)-form against the given
    frame; the loop integral and orientation bookkeeping live in the cycle
    module.  Alternating in the frame, linear in the velocity, and scaled
    linearly by ``s_scale``.
    """
    if variant not in _VARIANTS:
        raise ValueError(f"variant must be one of {_VARIANTS}")
    n = pack.dim
    m = 2 * wf.k - 1
    if n != m:
        raise ValueError(f"dimension {n} does not match 2k-1 = {m}")
    rup = pack.riemann_up
    F = wf.frame
    gd = wf.gammadot

    t_bdc = np.einsum("...bdca,mc,d->...mab", rup, F, gd)
    t_cbd = np.einsum("...cbda,mc,d->...mab", rup, F, gd)
    B = t_cbd - t_bdc
    if variant == "full":
        B = B - 2.0 * np.einsum("...cdba,mc,d->...mab", rup, F, gd)

    omega = np.einsum("...cdba,ic,jd->...ijab", rup, F, F)
    batch = omega.shape[:-4]
    flat = omega.reshape(batch + (m * m, n, n))
    chain = flat
    for _ in range(wf.k - 2):
        chain = np.einsum("...pab,...qbc->...pqac", chain, flat)
        chain = chain.reshape(batch + (-1, n, n))
    traces = np.einsum("...mab,...pba->...mp", B, chain)
    traces = traces.reshape(batch + (m,) * m)

    perms, signs = _perms(m)
    index = tuple(perms[:, j] for j in range(m))
    gathered = traces[(Ellipsis,) + index]
    total = np.einsum("...p,p->...", gathered, signs)
    result = (2.0 / math.factorial(m)) * total
    result = s_scale * result
    if result.ndim == 0:
        return float(result)
    return result
