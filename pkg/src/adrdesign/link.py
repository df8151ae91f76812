"""Link budget: received power, noise PSD, electrical SNR and achievable rate.

In a fully aligned link the central receiver element collects essentially
all of the incident power; its entrance aperture is the collecting circle.
The per-array EGC stage keeps the bandwidth of a single PD while the noise
floor picks up one thermal contribution per PD in the array, which is why
the thermal PSD below is multiplied by the array size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .adr import AdrConfig
from .beam import PropagatedBeam, beam_radius

__all__ = [
    "BOLTZMANN",
    "ELEMENTARY_CHARGE",
    "LinkParams",
    "NoiseModel",
    "LinkBudget",
    "LinkContext",
    "spot_radius",
    "received_power",
    "noise_psd",
    "snr",
    "achievable_rate",
    "link_budget",
]

BOLTZMANN = 1.380649e-23  # [J/K]
ELEMENTARY_CHARGE = 1.602176634e-19  # [C]


@dataclass(frozen=True)
class LinkParams:
    """Link distance and receiver-chain constants."""

    distance: float = 3.0  # [m]
    responsivity: float = 0.6  # [A/W]
    snr_gap: float = 2.6  # linear SNR gap to capacity at the target BER
    transmit_power: float = 0.010  # [W]
    transmit_power_cap: float = 0.016  # [W], eye-safety limit

    def __post_init__(self):
        if self.distance <= 0:
            raise ValueError(f"distance must be positive, got {self.distance}")
        if self.responsivity <= 0:
            raise ValueError(f"responsivity must be positive, got {self.responsivity}")
        if self.snr_gap < 1:
            raise ValueError(f"snr_gap must be >= 1, got {self.snr_gap}")
        if not 0 <= self.transmit_power <= self.transmit_power_cap:
            raise ValueError(
                f"transmit_power {self.transmit_power} W outside "
                f"[0, {self.transmit_power_cap}] W (eye-safety cap)"
            )


@dataclass(frozen=True)
class NoiseModel:
    """Noise PSD constants.

    mode 'thermal_only' keeps just the TIA thermal term (the operating
    approximation for PIN + TIA front ends); 'full' adds shot noise and,
    when a RIN figure is supplied, the laser intensity-noise term.
    """

    temperature: float = 300.0  # [K]
    load_resistance: float = 1150.0  # [ohm]
    noise_figure: float = 10 ** 0.5  # linear (5 dB)
    mode: str = "thermal_only"
    rin: Optional[float] = None  # [1/Hz]
    boltzmann: float = BOLTZMANN
    elementary_charge: float = ELEMENTARY_CHARGE

    def __post_init__(self):
        if self.temperature <= 0 or self.load_resistance <= 0:
            raise ValueError("temperature and load_resistance must be positive")
        if self.noise_figure < 1:
            raise ValueError(f"noise_figure must be >= 1 (linear), got {self.noise_figure}")
        if self.mode not in ("thermal_only", "full"):
            raise ValueError(f"mode must be 'thermal_only' or 'full', got {self.mode!r}")
        if self.rin is not None and self.rin < 0:
            raise ValueError(f"rin must be >= 0, got {self.rin}")


@dataclass(frozen=True)
class LinkBudget:
    """Evaluated budget at one design point."""

    received_power: float  # [W]
    noise_psd: float  # [A^2/Hz]
    snr: float
    rate: float  # [bit/s]
    rin_included: bool  # False when mode='full' ran without a RIN figure


@dataclass(frozen=True)
class LinkContext:
    """Everything the rate evaluation needs besides the receiver config."""

    beam: PropagatedBeam
    link: LinkParams
    noise: NoiseModel


def spot_radius(ctx: LinkContext) -> float:
    """Beam radius at the receiver plane."""
    return beam_radius(ctx.beam, ctx.link.distance - ctx.beam.waist_position)


def _received_power_raw(cfg: AdrConfig, b, fov, w_spot: float, power: float):
    """Collected power, array-capable, no validation.

    Closed form: FF * P_t * (1 - exp(-g * N_PD n^2 / (2 FF [K B sin(theta) w]^2)))
    with theta = fov/(2 n_tier + 1) and g the truncation gain retention.
    """
    b = np.asarray(b, dtype=float)
    theta = np.asarray(fov, dtype=float) / (2 * cfg.n_tier + 1)
    expo = cfg.gain_retention * cfg.n_pd * cfg.n_cpc**2 / (
        2.0 * cfg.fill_factor * (cfg.kpd * b * np.sin(theta) * w_spot) ** 2
    )
    return cfg.fill_factor * power * (1.0 - np.exp(-expo))


def received_power(cfg: AdrConfig, bandwidth: float, fov: float,
                   beam: PropagatedBeam, link: LinkParams) -> float:
    """Power collected by the aligned central element.

    Equivalent to the beam's encircled power inside the element's entrance
    aperture times the array fill factor; here evaluated in closed form
    directly from the design variables.
    """
    from .adr import acceptance_angle  # validation only

    acceptance_angle(fov, cfg.n_tier)
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    w_spot = beam_radius(beam, link.distance - beam.waist_position)
    return float(_received_power_raw(cfg, bandwidth, fov, w_spot, beam.power))


def noise_psd(nm: NoiseModel, n_pd: int, received: float = 0.0,
              responsivity: float = 0.6):
    """Total noise PSD [A^2/Hz] referred to one PD-TIA chain times the array.

    thermal_only: N0 = 4 kT / R_L * F_n * N_PD
    full:         adds 2 q R P_r and, if RIN is set, RIN (R P_r)^2.
    """
    if n_pd < 1:
        raise ValueError(f"n_pd must be >= 1, got {n_pd}")
    thermal = 4.0 * nm.boltzmann * nm.temperature / nm.load_resistance * nm.noise_figure * n_pd
    if nm.mode == "thermal_only":
        return thermal
    photo = responsivity * np.asarray(received, dtype=float)
    total = thermal + 2.0 * nm.elementary_charge * photo
    if nm.rin is not None:
        total = total + nm.rin * photo**2
    return float(total) if np.ndim(total) == 0 else total


def _rate_raw(cfg: AdrConfig, ctx: LinkContext, b, fov):
    """Achievable rate, array-capable, no domain validation."""
    w_spot = spot_radius(ctx)
    p_r = _received_power_raw(cfg, b, fov, w_spot, ctx.beam.power)
    n0 = noise_psd(ctx.noise, cfg.n_pd, p_r, ctx.link.responsivity)
    b = np.asarray(b, dtype=float)
    s = (ctx.link.responsivity * p_r) ** 2 / (n0 * b)
    return b * np.log2(1.0 + s / ctx.link.snr_gap)


def snr(cfg: AdrConfig, bandwidth: float, fov: float, ctx: LinkContext) -> float:
    """Electrical SNR at the EGC output of the central element."""
    p_r = received_power(cfg, bandwidth, fov, ctx.beam, ctx.link)
    n0 = noise_psd(ctx.noise, cfg.n_pd, p_r, ctx.link.responsivity)
    return (ctx.link.responsivity * p_r) ** 2 / (n0 * bandwidth)


def achievable_rate(cfg: AdrConfig, bandwidth: float, fov: float, ctx: LinkContext) -> float:
    """Rate R = B log2(1 + SNR / gap) at a design point [bit/s]."""
    return bandwidth * math.log2(1.0 + snr(cfg, bandwidth, fov, ctx) / ctx.link.snr_gap)


def link_budget(cfg: AdrConfig, bandwidth: float, fov: float, ctx: LinkContext) -> LinkBudget:
    """Evaluate the whole budget at one design point."""
    p_r = received_power(cfg, bandwidth, fov, ctx.beam, ctx.link)
    n0 = float(noise_psd(ctx.noise, cfg.n_pd, p_r, ctx.link.responsivity))
    s = (ctx.link.responsivity * p_r) ** 2 / (n0 * bandwidth)
    return LinkBudget(
        received_power=p_r,
        noise_psd=n0,
        snr=s,
        rate=bandwidth * math.log2(1.0 + s / ctx.link.snr_gap),
        rin_included=ctx.noise.mode == "full" and ctx.noise.rin is not None,
    )
