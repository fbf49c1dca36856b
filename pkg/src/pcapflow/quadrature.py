"""Small quadrature helpers shared by several modules."""

from __future__ import annotations

import math

import numpy as np


def sphere_quadrature(n_theta: int = 24, n_phi: int = 48):
    """Gauss-Legendre (polar) x uniform (azimuth) nodes on the unit sphere.

    Returns (points (N,3), weights (N,)) with weights summing to 4 pi.
    """
    xg, wg = np.polynomial.legendre.leggauss(n_theta)
    phi = (np.arange(n_phi) + 0.5) * (2 * math.pi / n_phi)
    ct, cp = np.meshgrid(xg, phi, indexing="ij")
    st = np.sqrt(1.0 - ct**2)
    pts = np.stack([st * np.cos(cp), st * np.sin(cp), ct], axis=-1).reshape(-1, 3)
    w = np.broadcast_to(wg[:, None] * (2 * math.pi / n_phi), ct.shape).reshape(-1).copy()
    return pts, w


def trilinear(arr: np.ndarray, origin, h: float, pts: np.ndarray) -> np.ndarray:
    """Trilinear interpolation of a node array at arbitrary points."""
    loc = (np.asarray(pts, dtype=float) - np.asarray(origin)[None, :]) / h
    i0 = np.floor(loc).astype(int)
    for d in range(3):
        i0[:, d] = np.clip(i0[:, d], 0, arr.shape[d] - 2)
    fr = np.clip(loc - i0, 0.0, 1.0)
    out = np.zeros(len(loc))
    for dx in (0, 1):
        for dy in (0, 1):
            for dz in (0, 1):
                wgt = ((fr[:, 0] if dx else 1 - fr[:, 0])
                       * (fr[:, 1] if dy else 1 - fr[:, 1])
                       * (fr[:, 2] if dz else 1 - fr[:, 2]))
                out += wgt * arr[i0[:, 0] + dx, i0[:, 1] + dy, i0[:, 2] + dz]
    return out
