"""Uplink system model: i.i.d. Rayleigh channel, AWGN, and one-bit sampling.

The SNR convention is rho = 1/N0 with unit transmit power per user, so a
grid point at ``snr_db`` runs with noise power ``10**(-snr_db/10)``.
"""

from dataclasses import dataclass

import numpy as np

from .modulation import supported_modulations
from .errors import UnsupportedModulationError


def noise_power_from_snr_db(snr_db: float) -> float:
    return 10.0 ** (-snr_db / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """One operating point: K single-antenna users, N base-station antennas."""

    users: int
    antennas: int
    noise_power: float
    modulation: str = "qpsk"

    def __post_init__(self):
        if self.users < 1:
            raise ValueError(f"users must be >= 1, got {self.users}")
        if self.antennas < self.users:
            raise ValueError(
                f"antennas must be >= users, got N={self.antennas} K={self.users}"
            )
        if not self.noise_power > 0:
            raise ValueError(f"noise_power must be > 0, got {self.noise_power}")
        if self.modulation not in supported_modulations():
            raise UnsupportedModulationError(
                f"unsupported modulation {self.modulation!r}"
            )

    @property
    def snr_db(self) -> float:
        return -10.0 * np.log10(self.noise_power)

    @classmethod
    def from_snr_db(cls, users, antennas, snr_db, modulation="qpsk"):
        return cls(users, antennas, noise_power_from_snr_db(snr_db), modulation)


def draw_channel(config: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw an N x K channel with i.i.d. unit-variance complex Gaussian entries."""
    shape = (config.antennas, config.users)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


def transmit(
    channel: np.ndarray,
    symbols: np.ndarray,
    noise_power: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Analog receive vector: channel @ symbols plus fresh complex AWGN."""
    n = channel.shape[0]
    noise = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * np.sqrt(
        noise_power / 2.0
    )
    return channel @ symbols + noise


def one_bit_quantize(signal: np.ndarray) -> np.ndarray:
    """Componentwise sign of real and imaginary parts; sign(0) = +1.

    Output entries are in {+-1 +- 1j}. Works elementwise on arrays of any
    shape, so sample blocks can be quantized in one call.
    """
    signal = np.asarray(signal)
    return np.where(signal.real >= 0, 1.0, -1.0) + 1j * np.where(
        signal.imag >= 0, 1.0, -1.0
    )
