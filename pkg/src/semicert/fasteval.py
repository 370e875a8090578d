"""Batch float evaluation of polynomials with an exact fallback near zero.

Used only for sampling-based checks. Any sign that floats cannot decide safely is
recomputed with exact rationals, so reported witnesses are always exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .polycore import Polynomial

REL_TOL = 1e-9


class CompiledPolynomial:
    def __init__(self, p: Polynomial):
        self.poly = p
        items = p.items()
        self.exps = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), p.nvars)
        self.coefs = np.array([float(c) for _, c in items], dtype=float)

    def values(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Float values and an absolute-value bound per point."""
        if not len(self.coefs):
            z = np.zeros(len(pts))
            return z, z
        mons = np.prod(pts[:, None, :] ** self.exps[None, :, :], axis=2)
        return mons @ self.coefs, np.abs(mons) @ np.abs(self.coefs)

    def signs(self, pts: np.ndarray, exact_pts: Sequence[Sequence[Fraction]]) -> np.ndarray:
        """Exact signs (-1, 0, 1) of the polynomial at the given points."""
        vals, bound = self.values(pts)
        out = np.sign(vals).astype(np.int64)
        unsure = np.nonzero(np.abs(vals) <= REL_TOL * bound + 1e-300)[0]
        for k in unsure:
            v = self.poly.evaluate(exact_pts[k])
            out[k] = (v > 0) - (v < 0)
        return out


def to_array(points: Sequence[Sequence[Fraction]], nvars: int) -> np.ndarray:
    return np.array([[float(v) for v in p] for p in points], dtype=float).reshape(len(points), nvars)


class _Subset:
    """``base[idx[k]]`` on demand, so exact points are only built when a sign is unsure."""

    def __init__(self, base, idx):
        self.base = base
        self.idx = idx

    def __len__(self) -> int:
        return len(self.idx)

    def __getitem__(self, k):
        return self.base[self.idx[k]]


def member_mask(constraints: Sequence[CompiledPolynomial], pts: np.ndarray, exact_pts) -> np.ndarray:
    mask = np.ones(len(pts), dtype=bool)
    for g in constraints:
        idx = np.nonzero(mask)[0]
        if not len(idx):
            break
        s = g.signs(pts[idx], _Subset(exact_pts, idx))
        mask[idx[s < 0]] = False
    return mask


def first_negative(f: CompiledPolynomial, pts: np.ndarray, exact_pts) -> int | None:
    """Index of the first point where ``f`` is exactly negative."""
    if not len(pts):
        return None
    s = f.signs(pts, exact_pts)
    neg = np.nonzero(s < 0)[0]
    return int(neg[0]) if len(neg) else None
