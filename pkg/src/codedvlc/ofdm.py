"""Hermitian-symmetric OFDM framing with a unitary IFFT/FFT pair.

All modules share the single scaling convention fixed here: symmetric
1/sqrt(N) on both transform directions, so frequency-domain symbol energy
and time-domain power relate without extra factors. Bins 0 and N/2 never
carry data; the upper half mirrors the conjugate of the lower half, which
forces a real time-domain signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_IMAG_RESIDUE_RTOL = 1e-10


@dataclass(frozen=True)
class OfdmConfig:
    """Subcarrier layout: FFT size, active data bins, cyclic prefix length."""

    n_fft: int
    data_indices: np.ndarray
    cp_len: int = 0

    def __post_init__(self):
        if self.n_fft < 4 or self.n_fft % 2:
            raise ValueError("n_fft must be even and at least 4")
        idx = np.asarray(self.data_indices, dtype=np.int64)
        if idx.ndim != 1 or idx.size == 0:
            raise ValueError("data_indices must be a non-empty 1-d index list")
        if np.any(np.diff(idx) <= 0):
            raise ValueError("data_indices must be strictly increasing")
        if idx[0] < 1 or idx[-1] > self.n_fft // 2 - 1:
            raise ValueError("data indices must lie in [1, n_fft/2 - 1]")
        if self.cp_len < 0 or self.cp_len > self.n_fft:
            raise ValueError("cp_len outside [0, n_fft]")
        idx.flags.writeable = False
        object.__setattr__(self, "data_indices", idx)

    @classmethod
    def build(cls, n_fft: int = 512, reserved: int = 0, cp_len: int = 0) -> "OfdmConfig":
        """Layout with `reserved` header subcarriers counted on the full-N
        axis (so reserved//2 indices per Hermitian half), kept at zero at the
        low end of the data range."""
        if reserved % 2:
            raise ValueError("reserved subcarriers come in Hermitian pairs")
        first = 1 + reserved // 2
        last = n_fft // 2 - 1
        if first > last:
            raise ValueError("reservations leave no data subcarriers")
        return cls(n_fft=n_fft, data_indices=np.arange(first, last + 1), cp_len=cp_len)

    @property
    def n_data(self) -> int:
        return int(self.data_indices.size)


@dataclass
class TimeSignal:
    """Real baseband frame; samples include the cyclic prefix, sigma_i is the
    measured RMS of the body."""

    samples: np.ndarray
    sigma_i: float
    cp_len: int = 0


def hermitian_assemble(config: OfdmConfig, symbols) -> np.ndarray:
    """Place symbols on the data bins and fill the conjugate mirror.

    Punctured subcarriers are represented by zero symbols in `symbols`; the
    length must always match the configured data layout.
    """
    symbols = np.asarray(symbols, dtype=complex)
    if symbols.shape != (config.n_data,):
        raise ValueError(f"expected {config.n_data} symbols, got {symbols.shape}")
    bins = np.zeros(config.n_fft, dtype=complex)
    bins[config.data_indices] = symbols
    bins[config.n_fft - config.data_indices] = np.conj(symbols)
    return bins


def is_hermitian(bins, rtol: float = _IMAG_RESIDUE_RTOL) -> bool:
    bins = np.asarray(bins, dtype=complex)
    n = bins.size
    scale = np.max(np.abs(bins)) or 1.0
    if abs(bins[0]) > rtol * scale or abs(bins[n // 2]) > rtol * scale:
        return False
    k = np.arange(1, n // 2)
    return bool(np.max(np.abs(bins[n - k] - np.conj(bins[k])), initial=0.0) <= rtol * scale)


def ofdm_modulate(config: OfdmConfig, bins) -> TimeSignal:
    """Unitary inverse transform plus cyclic prefix.

    Raises if the frame is not Hermitian (imaginary residue above the bound);
    the returned samples are the real part.
    """
    bins = np.asarray(bins, dtype=complex)
    if bins.shape != (config.n_fft,):
        raise ValueError(f"frame must have {config.n_fft} bins")
    x = np.fft.ifft(bins, norm="ortho")
    rms = np.sqrt(np.mean(np.abs(x) ** 2))
    residue = np.max(np.abs(x.imag), initial=0.0)
    if rms > 0 and residue > _IMAG_RESIDUE_RTOL * rms:
        raise ValueError(f"frame is not Hermitian: imaginary residue {residue:.3e}")
    body = x.real
    sigma_i = float(np.sqrt(np.mean(body**2)))
    if config.cp_len:
        samples = np.concatenate([body[-config.cp_len:], body])
    else:
        samples = body
    return TimeSignal(samples=samples, sigma_i=sigma_i, cp_len=config.cp_len)


def ofdm_demodulate(config: OfdmConfig, samples) -> np.ndarray:
    """Strip the cyclic prefix, forward transform, return the data bins."""
    samples = np.asarray(samples)
    if samples.shape != (config.n_fft + config.cp_len,):
        raise ValueError(
            f"expected {config.n_fft + config.cp_len} samples, got {samples.shape}"
        )
    body = samples[config.cp_len:]
    bins = np.fft.fft(body, norm="ortho")
    return bins[config.data_indices]


def sigma_i_expected(config: OfdmConfig, symbol_energy: float = 1.0, n_active: int | None = None) -> float:
    """Analytic RMS of the multiplexer output.

    Each of the n_active loaded bins contributes symbol_energy twice (data
    bin plus its conjugate mirror), spread over n_fft samples by the unitary
    transform.
    """
    if n_active is None:
        n_active = config.n_data
    if n_active < 0 or n_active > config.n_data:
        raise ValueError(f"n_active outside [0, {config.n_data}]")
    return float(np.sqrt(2.0 * n_active * symbol_energy / config.n_fft))
