"""Uniformly sampled space-time trajectories and the modulation transform.

A trajectory holds phase-space slices on a symmetric window [-T, T].
The modulation variable tau' = tau + n.v is resolved by a demodulated
time-DFT: each (n, v) line is moved to the interaction frame (multiply
by exp(+i t n.v)) before the DFT, so the free evolution sits exactly at
tau' = 0 and the Nyquist limit depends only on the window sampling, not
on the size of n.v.  Samples carry square-root trapezoid weights so the
discrete Parseval identity reproduces the trapezoid time integral.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .grid import GridSpec, PhaseField
from .propagator import _nv_dot

__all__ = [
    "Trajectory",
    "make_trajectory",
    "sample_free_evolution",
    "duhamel_integral",
    "time_dft",
    "time_idft",
    "max_bracket",
]


@dataclass
class Trajectory:
    """Uniform time samples of a phase-space field on [-t_half, t_half].

    ``data[j]`` is the slice at ``times[j]``; ``cutoff`` records which
    time cutoff has been applied ("none", "psi", or "psi_T" with
    ``cutoff_scale`` the inner width T).
    """

    grid: GridSpec
    t_half: float
    data: np.ndarray
    cutoff: str = "none"
    cutoff_scale: float = field(default=1.0)

    def __post_init__(self):
        if self.data.ndim != 2 * self.grid.d + 1:
            raise ValueError("data must be (samples,) + grid shape")
        if self.data.shape[1:] != self.grid.shape:
            raise ValueError("slice shape does not match grid")
        if self.data.shape[0] < 2:
            raise ValueError("need at least 2 time samples")
        if self.t_half <= 0:
            raise ValueError("t_half must be positive")
        if self.data.dtype != np.complex128:
            self.data = self.data.astype(np.complex128)

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    @property
    def dt(self) -> float:
        return 2.0 * self.t_half / (self.n_samples - 1)

    @property
    def times(self) -> np.ndarray:
        return -self.t_half + self.dt * np.arange(self.n_samples)

    def slice_field(self, j: int) -> PhaseField:
        return PhaseField(self.grid, self.data[j])

    def copy(self) -> "Trajectory":
        return replace(self, data=self.data.copy())

    def sup_l2(self) -> float:
        """sup over samples of the slice l2_n L2_v norm."""
        dvd = self.grid.dv**self.grid.d
        axes = tuple(range(1, 2 * self.grid.d + 1))
        return float(np.sqrt(dvd * np.max(np.sum(np.abs(self.data) ** 2, axis=axes))))


def make_trajectory(
    grid: GridSpec, t_half: float, n_samples: int, fill=None
) -> Trajectory:
    """Empty (zero) trajectory, or one filled from ``fill(t) -> PhaseField``."""
    data = np.zeros((n_samples,) + grid.shape, dtype=np.complex128)
    traj = Trajectory(grid, float(t_half), data)
    if fill is not None:
        for j, t in enumerate(traj.times):
            data[j] = fill(float(t)).data
    return traj


def sample_free_evolution(phi: PhaseField, t_half: float, n_samples: int) -> Trajectory:
    """Trajectory of the free flow S(t) phi on the window."""
    traj = make_trajectory(phi.grid, t_half, n_samples)
    nv = _nv_dot(phi.grid)
    for j, t in enumerate(traj.times):
        traj.data[j] = phi.data * np.exp(-1j * t * nv)
    return traj


def _time_weights(traj: Trajectory) -> np.ndarray:
    w = np.full(traj.n_samples, traj.dt)
    w[0] *= 0.5
    w[-1] *= 0.5
    return np.sqrt(w)


def time_dft(traj: Trajectory) -> tuple:
    """Demodulated weighted time-DFT.

    Returns (tau, U): tau is the modulation grid tau' = tau + n.v in FFT
    order, U has shape (n_samples,) + grid.shape.  Parseval:
    sum_k |U_k|^2 = trapezoid integral of |u(t)|^2 dt per (n, v).
    """
    g = traj.grid
    nv = _nv_dot(g)
    w = _time_weights(traj)
    ext = (...,) + (None,) * (2 * g.d)
    demod = np.exp(1j * traj.times[ext] * nv[None])
    u = w[ext] * demod * traj.data
    big = np.fft.fft(u, axis=0) / np.sqrt(traj.n_samples)
    tau = 2.0 * np.pi * np.fft.fftfreq(traj.n_samples, d=traj.dt)
    return tau, big


def time_idft(traj: Trajectory, coeffs: np.ndarray) -> Trajectory:
    """Exact inverse of time_dft, returning a trajectory with the same
    window and cutoff record."""
    g = traj.grid
    u = np.fft.ifft(coeffs, axis=0) * np.sqrt(traj.n_samples)
    nv = _nv_dot(g)
    w = _time_weights(traj)
    ext = (...,) + (None,) * (2 * g.d)
    remod = np.exp(-1j * traj.times[ext] * nv[None])
    data = remod * u / w[ext]
    return replace(traj, data=data)


def duhamel_integral(forcing: Trajectory) -> Trajectory:
    """int_0^t S(t - t') F(t') dt' on the sample grid.

    Computed in the interaction frame: G(t) = S(-t) F(t), then a
    cumulative trapezoid from the central sample (t = 0 must be on the
    grid, so the sample count must be odd), then S(t) out front.  No
    time cutoff is applied here; callers multiply by psi as needed.
    """
    from scipy.integrate import cumulative_trapezoid

    if forcing.n_samples % 2 == 0:
        raise ValueError("need an odd sample count (t = 0 on the grid)")
    g = forcing.grid
    nv = _nv_dot(g)
    ext = (...,) + (None,) * (2 * g.d)
    phase = np.exp(1j * forcing.times[ext] * nv[None])
    inner = phase * forcing.data
    cum = cumulative_trapezoid(inner, dx=forcing.dt, axis=0, initial=0.0)
    center = forcing.n_samples // 2
    cum = cum - cum[center]
    data = np.conj(phase) * cum
    return Trajectory(g, forcing.t_half, data)


def max_bracket(traj: Trajectory) -> float:
    """Largest resolvable bracket <tau'> on the trajectory's tau-grid."""
    tau_max = np.pi / traj.dt
    return float(np.hypot(1.0, tau_max))
