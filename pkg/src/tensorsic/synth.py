"""Synthetic full-duplex data: oversampled QPSK-OFDM through a memory-polynomial channel."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .signal import SiDataset, as_signal

#: Ground truth used when no coefficients are given: memory 2, order 3,
#: magnitudes decaying with lag and order.
DEFAULT_PA = {
    (1, 1, 0): 1.0 + 0.0j,
    (1, 1, 1): 0.25 - 0.15j,
    (3, 2, 0): -0.027 + 0.0135j,
    (3, 2, 1): 0.003 - 0.0018j,
}


@dataclass(frozen=True)
class SynthConfig:
    n_carriers: int = 2048
    oversampling: int = 4
    n_symbols: int = 10
    pa_coefficients: dict = field(default_factory=lambda: dict(DEFAULT_PA))
    noise_power_db: float | None = -40.0
    iq_imbalance: tuple = (1.0 + 0j, 0j)
    seed: int = 0

    def __post_init__(self):
        if self.oversampling < 1:
            raise ValueError("oversampling must be >= 1")
        for key in self.pa_coefficients:
            p, q, l = key
            if p < 1 or p % 2 == 0 or not 0 <= q <= p or l < 0:
                raise ValueError(f"invalid channel term {key}")

    @property
    def memory(self) -> int:
        return 1 + max(l for _, _, l in self.pa_coefficients)

    @property
    def order(self) -> int:
        return max(p for p, _, _ in self.pa_coefficients)


def generate_ofdm(config: SynthConfig) -> np.ndarray:
    """Unit-power QPSK-OFDM baseband, oversampled by zero-padding the IDFT.

    Every one of the ``n_carriers`` subcarriers is loaded; the spectrum
    occupies the central ``1/oversampling`` of the band. No cyclic prefix.
    """
    N, os_ = config.n_carriers, config.oversampling
    if N < 2 or N & (N - 1):
        raise ValueError(f"n_carriers must be a power of two, got {N}")
    if config.n_symbols < 1:
        raise ValueError("n_symbols must be >= 1")
    rng = np.random.default_rng([config.seed, 0])
    bits = rng.integers(0, 2, size=(config.n_symbols, N, 2))
    qpsk = ((1 - 2 * bits[..., 0]) + 1j * (1 - 2 * bits[..., 1])) / np.sqrt(2)
    spec = np.zeros((config.n_symbols, N * os_), dtype=np.complex128)
    half = N // 2
    spec[:, :half] = qpsk[:, half:]   # non-negative frequencies
    spec[:, -half:] = qpsk[:, :half]  # negative frequencies
    x = np.fft.ifft(spec, axis=1).reshape(-1)
    return x / np.sqrt(np.mean(np.abs(x) ** 2))


def apply_iq_imbalance(x, gains) -> np.ndarray:
    g1, g2 = gains
    return g1 * x + g2 * np.conj(x)


def apply_nonlinear_channel(x, config: SynthConfig, rng=None) -> np.ndarray:
    """``y[n] = sum h[p,q,l] x[n-l]^q conj(x[n-l])^(p-q)`` plus complex Gaussian noise.

    Noise power is ``noise_power_db`` relative to the noiseless output power;
    ``None`` disables it. Lags before sample 0 read as zero.
    """
    x = as_signal(x, "x")
    x = apply_iq_imbalance(x, config.iq_imbalance)
    y = np.zeros_like(x)
    for (p, q, l), h in config.pa_coefficients.items():
        term = x**q * np.conj(x) ** (p - q)
        y[l:] += h * term[: x.size - l]
    if config.noise_power_db is not None:
        if rng is None:
            rng = np.random.default_rng([config.seed, 1])
        power = np.mean(np.abs(y) ** 2) * 10 ** (config.noise_power_db / 10)
        y = y + np.sqrt(power / 2) * (rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size))
    return y


def papr_db(x) -> float:
    p = np.abs(np.asarray(x)) ** 2
    return float(10 * np.log10(p.max() / p.mean()))


def make_dataset(config: SynthConfig | None = None) -> SiDataset:
    config = config or SynthConfig()
    tx = generate_ofdm(config)
    return SiDataset.from_signals(tx, apply_nonlinear_channel(tx, config))
