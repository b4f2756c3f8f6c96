"""Optical front-end model: unipolar conversion (double-sided clipping plus
DC bias), Bussgang linearization statistics, AWGN injection, and
energy-per-useful-bit accounting.

The clipping window is fixed relative to a reference RMS sigma_i (by
convention the unpunctured layout's analytic RMS), so emptying subcarriers
genuinely lowers the clip probability at constant absolute bounds. The
Bussgang decomposition I_c = gamma*I + eps is evaluated against the actual
signal RMS, which may differ from the reference when puncturing is active.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .ofdm import OfdmConfig, hermitian_assemble, ofdm_demodulate, ofdm_modulate, sigma_i_expected

_RANGE_TOL = 1e-9


@dataclass(frozen=True)
class ClipSpec:
    """Clipping window [-beta_lower, beta_upper], bias level, and the RMS the
    bounds were derived from. dynamic_range_high is the LED's upper limit
    (None when unconstrained)."""

    beta_lower: float
    beta_upper: float
    i_bias: float
    sigma_i: float
    dynamic_range_high: float | None = None

    def __post_init__(self):
        if self.beta_lower < 0 or self.beta_upper < 0:
            raise ValueError("clipping bounds must be non-negative")
        if self.sigma_i <= 0:
            raise ValueError("sigma_i must be positive")
        if self.dynamic_range_high is not None:
            lo = self.i_bias - self.beta_lower
            hi = self.i_bias + self.beta_upper
            if lo < -_RANGE_TOL or hi > self.dynamic_range_high + _RANGE_TOL:
                raise ValueError(
                    f"biased output range [{lo:.3g}, {hi:.3g}] exceeds "
                    f"[0, {self.dynamic_range_high:.3g}]"
                )

    @classmethod
    def from_alpha(
        cls,
        sigma_i: float,
        alpha_lower: float,
        alpha_upper: float | None = None,
        dynamic_range_mult: float = 5.0,
    ) -> "ClipSpec":
        """LED-window rule: beta_lower = bias = alpha_lower*sigma and
        beta_upper = (mult - alpha_upper)*sigma, so the biased signal fills
        [0, mult*sigma] exactly when alpha_upper = alpha_lower."""
        if alpha_upper is None:
            alpha_upper = alpha_lower
        return cls(
            beta_lower=alpha_lower * sigma_i,
            beta_upper=(dynamic_range_mult - alpha_upper) * sigma_i,
            i_bias=alpha_lower * sigma_i,
            sigma_i=sigma_i,
            dynamic_range_high=dynamic_range_mult * sigma_i,
        )

    @classmethod
    def unclipped(cls, sigma_i: float) -> "ClipSpec":
        return cls(
            beta_lower=np.inf, beta_upper=np.inf, i_bias=0.0, sigma_i=sigma_i,
            dynamic_range_high=None,
        )

    @property
    def is_unclipped(self) -> bool:
        return np.isinf(self.beta_lower) and np.isinf(self.beta_upper) and self.i_bias == 0.0


@dataclass(frozen=True)
class BussgangModel:
    """Second-order statistics of the clipped signal: attenuation gamma,
    variance of the uncorrelated distortion, bias normalization factor, and
    the raw moments they derive from."""

    gamma: float
    clip_noise_var: float
    a_bias: float
    clip_mean: float
    clip_power: float
    sigma: float


@dataclass(frozen=True)
class NoiseSpec:
    ebn0_db: float
    eb: float
    sigma_w2: float


def clip(signal, spec: ClipSpec) -> np.ndarray:
    """Element-wise double-sided clipping to [-beta_lower, beta_upper]."""
    return np.clip(np.asarray(signal, dtype=float), -spec.beta_lower, spec.beta_upper)


def bias(signal, spec: ClipSpec) -> np.ndarray:
    """DC shift of an already-clipped signal into the LED operating range."""
    return np.asarray(signal, dtype=float) + spec.i_bias


def debias(signal, spec: ClipSpec) -> np.ndarray:
    return np.asarray(signal, dtype=float) - spec.i_bias


def clip_fraction(signal, spec: ClipSpec) -> float:
    """Fraction of samples at or beyond either clipping bound."""
    s = np.asarray(signal)
    return float(np.mean((s <= -spec.beta_lower) | (s >= spec.beta_upper)))


def _safe_prod(x: float, w: float) -> float:
    # x*w where w decays faster than any power of x; 0 at infinite x
    return x * w if np.isfinite(x) else 0.0


def bussgang(spec: ClipSpec, sigma: float | None = None) -> BussgangModel:
    """Closed-form Bussgang statistics for a zero-mean Gaussian input.

    gamma = Phi(beta_upper/sigma) - Phi(-beta_lower/sigma); the distortion
    variance comes from the truncated-Gaussian second moment. The denominator
    of gamma is E{I^2} (the Bussgang convention), under which eps is exactly
    uncorrelated with the input.
    """
    sigma = spec.sigma_i if sigma is None else float(sigma)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    a = -spec.beta_lower / sigma
    b = spec.beta_upper / sigma
    cdf_a, cdf_b = norm.cdf(a), norm.cdf(b)
    pdf_a, pdf_b = norm.pdf(a), norm.pdf(b)

    gamma = cdf_b - cdf_a
    mean_n = pdf_a - pdf_b + _safe_prod(a, cdf_a) + _safe_prod(b, 1.0 - cdf_b)
    power_n = (
        gamma
        + _safe_prod(a, pdf_a)
        - _safe_prod(b, pdf_b)
        + _safe_prod(a * a, cdf_a)
        + _safe_prod(b * b, 1.0 - cdf_b)
    )
    clip_mean = sigma * mean_n
    clip_power = sigma * sigma * power_n
    # E{eps^2} = E{Ic^2} - gamma^2 sigma^2, then subtract the squared mean
    clip_noise_var = max(clip_power - gamma * gamma * sigma * sigma - clip_mean**2, 0.0)
    a_bias = sigma**2 / (sigma**2 + spec.i_bias**2)
    return BussgangModel(
        gamma=float(gamma),
        clip_noise_var=float(clip_noise_var),
        a_bias=float(a_bias),
        clip_mean=float(clip_mean),
        clip_power=float(clip_power),
        sigma=sigma,
    )


def electrical_power(spec: ClipSpec, sigma: float | None = None) -> float:
    """Exact E{I_DCO^2} of the clipped-and-biased signal."""
    model = bussgang(spec, sigma)
    return model.clip_power + 2.0 * spec.i_bias * model.clip_mean + spec.i_bias**2


def noise_from_ebn0(
    ebn0_db: float, p_elec: float, samples_per_frame: int, info_bits: int
) -> NoiseSpec:
    """Per-sample real noise variance for a target Eb/N0 per useful bit.

    Eb spreads the whole frame's electrical energy (bias overhead included)
    over the information bits only; sigma_w^2 = Eb * 10^(-x/10) / 2 per real
    dimension.
    """
    if info_bits <= 0:
        raise ValueError("info_bits must be positive")
    if p_elec <= 0:
        raise ValueError("p_elec must be positive")
    eb = p_elec * samples_per_frame / info_bits
    sigma_w2 = eb * 10.0 ** (-ebn0_db / 10.0) / 2.0
    return NoiseSpec(ebn0_db=float(ebn0_db), eb=float(eb), sigma_w2=float(sigma_w2))


def awgn(signal, noise, rng) -> np.ndarray:
    """Add white Gaussian noise; deterministic for a given generator state."""
    sigma_w2 = noise.sigma_w2 if isinstance(noise, NoiseSpec) else float(noise)
    signal = np.asarray(signal, dtype=float)
    if sigma_w2 < 0:
        raise ValueError("noise variance must be non-negative")
    if sigma_w2 == 0.0:
        return signal.copy()
    return signal + rng.normal(0.0, np.sqrt(sigma_w2), signal.shape)


def clipping_noise_spectrum(
    spec: ClipSpec,
    config: OfdmConfig,
    n_frames: int,
    rng,
    sigma: float | None = None,
) -> np.ndarray:
    """Monte Carlo per-subcarrier variance of Y_k - gamma*S_k with noise off.

    Frames carry unit-energy complex Gaussian symbols; the bias step is
    omitted because it lands entirely on the DC bin. Diagnostic support for
    the flat-distortion assumption used by the LLR stage.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be at least 1")
    sigma_sig = sigma_i_expected(config) if sigma is None else float(sigma)
    model = bussgang(spec, sigma_sig)
    acc = np.zeros(config.n_data)
    for _ in range(n_frames):
        s = (rng.normal(size=config.n_data) + 1j * rng.normal(size=config.n_data)) / np.sqrt(2)
        ts = ofdm_modulate(config, hermitian_assemble(config, s))
        clipped = clip(ts.samples, spec)
        y = ofdm_demodulate(config, clipped)
        acc += np.abs(y - model.gamma * s) ** 2
    return acc / n_frames
