"""Uniform radial grid and complex wave-packet storage.

The grid holds n equidistant points R_i = r_min + i*dr (r_max excluded,
periodic FFT convention) together with the matching FFT-ordered angular
wavenumbers.  Momentum-space amplitudes follow the symmetric convention
psi~(k) = dr/sqrt(2 pi) * sum_j psi_j exp(-i k R_j), so that
sum |psi|^2 dr = sum |psi~|^2 dk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT_2PI = np.sqrt(2.0 * np.pi)
CHANNELS = ("H2", "g", "u")


class EmptyChannelError(RuntimeError):
    """Raised when an observable needs amplitude that is not there."""


@dataclass(frozen=True)
class RadialGrid:
    r_min: float
    r_max: float
    n: int
    dr: float
    r: np.ndarray
    k: np.ndarray


def build_grid(r_min: float, r_max: float, n: int) -> RadialGrid:
    """Uniform grid on [r_min, r_max) with FFT-ordered wavenumbers.

    n must be a power of two (>= 8) so transforms stay fast and exact.
    """
    if n < 8 or (n & (n - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 8, got {n}")
    if r_min <= 0.0:
        raise ValueError(f"r_min must be positive, got {r_min}")
    if r_max <= r_min:
        raise ValueError(f"need r_max > r_min, got [{r_min}, {r_max}]")
    dr = (r_max - r_min) / n
    r = r_min + dr * np.arange(n)
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=dr)
    return RadialGrid(r_min=r_min, r_max=r_max, n=n, dr=dr, r=r, k=k)


@dataclass
class WavePacket:
    grid: RadialGrid
    amp: np.ndarray
    channel: str = "g"
    space: str = "position"   # "position" | "momentum"

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        if self.amp.shape != (self.grid.n,):
            raise ValueError("amplitude length does not match the grid")
        if self.amp.dtype != np.complex128:
            self.amp = self.amp.astype(np.complex128)

    def copy(self) -> "WavePacket":
        return WavePacket(self.grid, self.amp.copy(), self.channel, self.space)


def zero_packet(grid: RadialGrid, channel: str) -> WavePacket:
    return WavePacket(grid, np.zeros(grid.n, dtype=np.complex128), channel)


def transform(wp: WavePacket, direction: str) -> WavePacket:
    """Unitary position <-> momentum transform (round trip is identity).

    The phase convention uses the physical coordinate, so a plane wave
    exp(i k_j R) lands entirely in momentum bin j with a real amplitude.
    """
    g = wp.grid
    if direction == "to_momentum":
        if wp.space != "position":
            raise ValueError("packet is already in momentum space")
        amp = np.fft.fft(wp.amp) * (g.dr / SQRT_2PI) * np.exp(-1j * g.k * g.r_min)
        return WavePacket(g, amp, wp.channel, "momentum")
    if direction == "to_position":
        if wp.space != "momentum":
            raise ValueError("packet is already in position space")
        amp = np.fft.ifft(wp.amp * np.exp(1j * g.k * g.r_min)) * (SQRT_2PI / g.dr)
        return WavePacket(g, amp, wp.channel, "position")
    raise ValueError(f"unknown direction {direction!r}")


def norm2(wp: WavePacket) -> float:
    if wp.space == "momentum":
        dk = 2.0 * np.pi / (wp.grid.n * wp.grid.dr)
        return float(np.sum(np.abs(wp.amp) ** 2) * dk)
    return float(np.sum(np.abs(wp.amp) ** 2) * wp.grid.dr)


def observables(wp: WavePacket) -> tuple[float, float]:
    """(norm^2, <R>) of a position-space packet."""
    if wp.space != "position":
        raise ValueError("observables need a position-space packet")
    dens = np.abs(wp.amp) ** 2
    n2 = float(np.sum(dens) * wp.grid.dr)
    if n2 < 1e-30:
        raise EmptyChannelError(f"channel {wp.channel!r} holds no amplitude")
    mean_r = float(np.sum(wp.grid.r * dens) * wp.grid.dr / n2)
    return n2, mean_r


def mean_r_or_nan(wp: WavePacket) -> float:
    try:
        return observables(wp)[1]
    except EmptyChannelError:
        return float("nan")


def absorbing_mask(grid: RadialGrid, fraction: float = 0.1, power: float = 0.125) -> np.ndarray:
    """cos^power ramp over the last `fraction` of the grid extent.

    Off by default in simulations; switching it on makes the end-of-pulse
    continuum projection blind to whatever the mask removed.
    """
    mask = np.ones(grid.n)
    r_start = grid.r_max - fraction * (grid.r_max - grid.r_min)
    sel = grid.r > r_start
    s = (grid.r[sel] - r_start) / (grid.r_max - r_start)
    mask[sel] = np.cos(0.5 * np.pi * s) ** power
    return mask
