"""Equispaced trigonometric cubature baseline and its aliasing error.

The M^d-point approximation to a Fourier coefficient,

    u_hat_cub(q) = M^{-d} sum_m u(x_m) e^{-i q.x_m},
    x_m_alpha = (2 m_alpha / M - 1) pi,  m_alpha in {1..M},

is exact for trigonometric polynomials of per-axis degree < M - |q| and
otherwise picks up the aliasing sum E_q(u) = sum_{r != 0} u_hat(q + M r).
Piecewise-polynomial interpolants are not band-limited, so the baseline
converges only at a fixed algebraic rate in M; the exact transform exists
to avoid precisely this error.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import pi

import numpy as np

from .mesh import NodalField, eval_field_many
from .transform import Spectrum, WaveSet

__all__ = [
    "TrigGrid",
    "cubature_transform",
    "cubature_transform_fn",
    "aliasing_error",
    "aliasing_tail_estimate",
]


@dataclass(frozen=True)
class TrigGrid:
    """Uniform periodic grid with M points per axis on [-pi, pi]^d."""

    d: int
    M: int

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("need at least one point per axis")
        if self.d < 1:
            raise ValueError("dimension must be positive")

    @property
    def nodes_1d(self) -> np.ndarray:
        m = np.arange(1, self.M + 1)
        return (2.0 * m / self.M - 1.0) * pi

    def points(self) -> np.ndarray:
        """All M^d grid points, lexicographic with axis 1 fastest: (M^d, d)."""
        x = self.nodes_1d
        grids = np.meshgrid(*([x] * self.d), indexing="ij")
        return np.column_stack([grids[self.d - 1 - t].ravel() for t in range(self.d)])


def _phase_vector(grid: TrigGrid, q) -> np.ndarray:
    """e^{-i q.x_m} over the flattened grid, matching ``points`` order."""
    x = grid.nodes_1d
    vecs = [np.exp(-1j * q[t] * x) for t in range(grid.d)]
    e = vecs[0]
    for t in range(1, grid.d):
        e = np.multiply.outer(vecs[t], e).ravel()
    return e


def _cubature_values(samples: np.ndarray, grid: TrigGrid,
                     waves: WaveSet) -> Spectrum:
    scale = 1.0 / grid.M ** grid.d
    out = np.empty((len(waves), samples.shape[1]), dtype=complex)
    for qi, q in enumerate(waves.qs):
        prods = _phase_vector(grid, q)[:, None] * samples
        out[qi] = scale * np.cumsum(prods, axis=0)[-1]
    return Spectrum(waves, out)


def cubature_transform(field: NodalField, grid: TrigGrid,
                       waves: WaveSet) -> Spectrum:
    """Equispaced cubature of a nodal field's interpolant.

    Grid samples come from the piecewise interpolant itself, so the gap to
    the exact transform is purely the aliasing sum.
    """
    if grid.d != field.mesh.d or waves.d != field.mesh.d:
        raise ValueError("dimension mismatch")
    samples = eval_field_many(field, grid.points())
    return _cubature_values(samples, grid, waves)


def cubature_transform_fn(f, grid: TrigGrid, waves: WaveSet) -> Spectrum:
    """Equispaced cubature of an arbitrary vectorized function."""
    if waves.d != grid.d:
        raise ValueError("dimension mismatch")
    samples = np.asarray(f(grid.points()), dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    return _cubature_values(samples, grid, waves)


def aliasing_error(spectrum_fn, q, M: int, R: int):
    """Truncated aliasing sum sum_{0 < ||r||_inf <= R} u_hat(q + M r).

    Args:
        spectrum_fn: callable returning the exact coefficient (scalar or
            component vector) at an integer wavevector tuple.
        q: base wavevector.
        M: cubature resolution per axis.
        R: truncation radius in shells of the shift lattice.

    Returns:
        The partial sum, with the same shape spectrum_fn returns. This is
        a truncation of an infinite sum; pair it with
        ``aliasing_tail_estimate`` to size the neglected remainder.
    """
    q_tup = tuple(int(c) for c in q)
    d = len(q_tup)
    if M < 1 or R < 0:
        raise ValueError("M must be positive and R nonnegative")
    total = None
    for r in product(range(-R, R + 1), repeat=d):
        if all(c == 0 for c in r):
            continue
        shifted = tuple(q_tup[t] + M * r[t] for t in range(d))
        val = np.asarray(spectrum_fn(shifted), dtype=complex)
        total = val if total is None else total + val
    if total is None:
        total = np.asarray(spectrum_fn(q_tup), dtype=complex) * 0.0
    return total


def aliasing_tail_estimate(spectrum_fn, q, M: int, R: int) -> float:
    """Outermost-shell heuristic for the neglected tail of ``aliasing_error``.

    Returns max |u_hat| over the shell ||r||_inf = R times the shell point
    count; decaying spectra make this an upper-stable order-of-magnitude
    bound for everything beyond R.
    """
    q_tup = tuple(int(c) for c in q)
    d = len(q_tup)
    worst = 0.0
    count = 0
    for r in product(range(-R, R + 1), repeat=d):
        if max(abs(c) for c in r) != R:
            continue
        count += 1
        shifted = tuple(q_tup[t] + M * r[t] for t in range(d))
        worst = max(worst, float(np.max(np.abs(spectrum_fn(shifted)))))
    return worst * count
