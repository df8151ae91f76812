"""Angle-diversity receiver (ADR) composition: PD arrays + CPC tiers.

An ADR is a central CPC element surrounded by hexagonal tiers of identical
tilted elements. Each element couples a CPC to a square array of square
PIN photodiodes. Given the two primary design variables, the per-PD
bandwidth B and the receiver half-angle field of view, every physical
dimension of the receiver follows in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .optics import THETA_CPC_MAX, TruncationSpec

__all__ = [
    "EPSILON_0",
    "DEFAULT_K_PD",
    "PdPhysical",
    "AdrConfig",
    "AdrGeometry",
    "PRESETS",
    "preset",
    "element_count",
    "acceptance_angle",
    "pd_bandwidth_full",
    "pd_bandwidth_optimal",
    "pd_side_from_bandwidth",
    "k_pd_from_physical",
    "geometry",
]

EPSILON_0 = 8.8541878128e-12  # vacuum permittivity [F/m]

# Area-bandwidth constant of the PD front end, B = 1 / (K_PD * D_PD).
# Calibrated so that the 2x2-array single-tier preset reproduces the
# reference design point (B, FOV) = (2.1 GHz, 30 deg) -> (1.99 cm, 2.12 cm^2);
# see adrdesign.calibrate for the fit and its residuals.
DEFAULT_K_PD = 1.746e-6  # [s/m]

_CAP_SLACK = 1.0 + 1e-12


@dataclass(frozen=True)
class PdPhysical:
    """Physical PD constants for deriving the area-bandwidth constant.

    load_resistance is the junction series resistance plus the TIA load.
    depletion_thickness is optional; when absent only the optimal-thickness
    bandwidth is defined.
    """

    relative_permittivity: float
    load_resistance: float
    saturation_velocity: float
    depletion_thickness: Optional[float] = None
    permittivity_vacuum: float = EPSILON_0

    def __post_init__(self):
        for name in ("relative_permittivity", "load_resistance", "saturation_velocity",
                     "permittivity_vacuum"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.depletion_thickness is not None and self.depletion_thickness <= 0:
            raise ValueError("depletion_thickness must be positive when given")


@dataclass(frozen=True)
class AdrConfig:
    """A named receiver configuration (tiers, array size, constants)."""

    n_tier: int
    n_pd: int  # PDs per array, a perfect square
    fill_factor: float = 0.7
    n_cpc: float = 1.7
    k_pd: float = DEFAULT_K_PD  # [s/m]; ignored when pd_physical is set
    pd_physical: Optional[PdPhysical] = None
    truncation: Optional[TruncationSpec] = None

    def __post_init__(self):
        if self.n_tier < 0 or int(self.n_tier) != self.n_tier:
            raise ValueError(f"n_tier must be a non-negative integer, got {self.n_tier}")
        root = int(round(math.sqrt(self.n_pd)))
        if self.n_pd < 1 or root * root != self.n_pd:
            raise ValueError(f"n_pd must be a perfect square >= 1, got {self.n_pd}")
        if not 0 < self.fill_factor <= 1:
            raise ValueError(f"fill_factor must be in (0, 1], got {self.fill_factor}")
        if self.n_cpc < 1:
            raise ValueError(f"n_cpc must be >= 1, got {self.n_cpc}")
        if self.pd_physical is None and self.k_pd <= 0:
            raise ValueError(f"k_pd must be positive, got {self.k_pd}")

    @property
    def kpd(self) -> float:
        """Active area-bandwidth constant [s/m] (direct or composed)."""
        if self.pd_physical is not None:
            return k_pd_from_physical(self.pd_physical)
        return self.k_pd

    @property
    def tau(self) -> float:
        return 1.0 if self.truncation is None else self.truncation.length_ratio

    @property
    def gain_retention(self) -> float:
        return 1.0 if self.truncation is None else self.truncation.gain_retention


@dataclass(frozen=True)
class AdrGeometry:
    """Derived receiver dimensions at a design point (B, FOV)."""

    theta_cpc: float
    tilt_angles: tuple  # tilt of tier i relative to the central axis [rad]
    pd_side: float
    exit_diameter: float
    entrance_diameter: float
    height: float
    top_area: float
    element_count: int
    k1: float  # height constant [m*Hz]
    k2: float  # area constant [m^2*Hz^2]


# Table of standard configurations: (n_tier, PDs per array).
_PRESET_TABLE = {
    "config1": (1, 4),
    "config2": (1, 16),
    "config3": (1, 64),
    "config4": (2, 4),
    "config5": (2, 16),
    "config6": (3, 4),
}

PRESETS = {name: AdrConfig(n_tier=nt, n_pd=npd) for name, (nt, npd) in _PRESET_TABLE.items()}


def preset(name: str, truncation: Optional[TruncationSpec] = None) -> AdrConfig:
    """Look up a standard configuration, optionally with truncated CPCs."""
    try:
        cfg = PRESETS[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; expected one of {sorted(PRESETS)}"
        ) from None
    return replace(cfg, truncation=truncation) if truncation is not None else cfg


def element_count(n_tier: int) -> int:
    """Total receiver elements: 1 central plus 6*i per hexagonal tier i."""
    if n_tier < 0 or int(n_tier) != n_tier:
        raise ValueError(f"n_tier must be a non-negative integer, got {n_tier}")
    return 1 + sum(6 * i for i in range(1, int(n_tier) + 1))


def acceptance_angle(fov: float, n_tier: int) -> float:
    """CPC acceptance half-angle for a target receiver field of view.

    Adjacent tiers are tilted by twice the acceptance angle (touching,
    non-overlapping cones), so theta = FOV / (2*n_tier + 1). FOV is a
    half-angle in (0, pi/2]; the resulting theta must not exceed 30 deg.
    """
    if n_tier < 0 or int(n_tier) != n_tier:
        raise ValueError(f"n_tier must be a non-negative integer, got {n_tier}")
    if not 0 < fov <= (math.pi / 2) * _CAP_SLACK:
        raise ValueError(
            f"FOV {math.degrees(fov):.3f} deg outside the valid half-angle range (0, 90] deg"
        )
    theta = fov / (2 * int(n_tier) + 1)
    if theta > THETA_CPC_MAX * _CAP_SLACK:
        raise ValueError(
            f"FOV {math.degrees(fov):.3f} deg with {n_tier} tier(s) needs acceptance angle "
            f"{math.degrees(theta):.3f} deg, above the 30 deg cap; add tiers or reduce FOV"
        )
    return theta


def fov_cap(n_tier: int) -> float:
    """Largest valid FOV for a tier count: min(pi/2, (2*n_tier+1)*pi/6)."""
    return min(math.pi / 2, (2 * int(n_tier) + 1) * THETA_CPC_MAX)


def pd_bandwidth_full(phys: PdPhysical, area: float) -> float:
    """PD bandwidth from junction capacitance and transit time.

    B = 1 / sqrt((2 pi R C_p)^2 + (l / (0.44 v_s))^2), C_p = e0 er A / l.
    Requires the depletion thickness to be set.
    """
    if phys.depletion_thickness is None:
        raise ValueError("depletion_thickness is required for the full bandwidth model")
    if area <= 0:
        raise ValueError(f"area must be positive, got {area}")
    ell = phys.depletion_thickness
    c_p = phys.permittivity_vacuum * phys.relative_permittivity * area / ell
    rc = 2.0 * math.pi * phys.load_resistance * c_p
    transit = ell / (0.44 * phys.saturation_velocity)
    return 1.0 / math.sqrt(rc**2 + transit**2)


def pd_bandwidth_optimal(phys: PdPhysical, area: float) -> float:
    """Upper-bound bandwidth at the optimal depletion thickness."""
    if area <= 0:
        raise ValueError(f"area must be positive, got {area}")
    return 1.0 / (k_pd_from_physical(phys) * math.sqrt(area))


def k_pd_from_physical(phys: PdPhysical) -> float:
    """Compose the area-bandwidth constant from PD material constants."""
    return math.sqrt(
        4.0 * math.pi * phys.permittivity_vacuum * phys.relative_permittivity
        * phys.load_resistance / (0.44 * phys.saturation_velocity)
    )


def pd_side_from_bandwidth(bandwidth: float, k_pd: float = DEFAULT_K_PD) -> float:
    """Side length of a square PD that reaches the given bandwidth."""
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    if k_pd <= 0:
        raise ValueError(f"k_pd must be positive, got {k_pd}")
    return 1.0 / (k_pd * bandwidth)


def ring_sum(n_tier: int, theta):
    """Projected-area factor 1 + sum_i 6 i cos(2 i theta). Array-capable."""
    total = np.ones_like(np.asarray(theta, dtype=float))
    for i in range(1, int(n_tier) + 1):
        total = total + 6 * i * np.cos(2 * i * np.asarray(theta, dtype=float))
    return total


# Raw closed forms, array-capable and unvalidated; geometry() and the sweep /
# optimizer layers build on these.

def _d2(cfg: AdrConfig, b):
    return (1.0 / (cfg.kpd * np.asarray(b, dtype=float))) * math.sqrt(cfg.n_pd / cfg.fill_factor)


def _d1_full(cfg: AdrConfig, b, theta):
    return _d2(cfg, b) * cfg.n_cpc / np.sin(theta)


def _height(cfg: AdrConfig, b, theta):
    d2 = _d2(cfg, b)
    d1 = d2 * cfg.n_cpc / np.sin(theta)
    return cfg.tau * (d1 + d2) / (2.0 * np.tan(theta))


def _top_area(cfg: AdrConfig, b, theta):
    d1 = _d1_full(cfg, b, theta)
    return cfg.gain_retention * np.pi * d1**2 / 4.0 * ring_sum(cfg.n_tier, theta)


def k1(cfg: AdrConfig) -> float:
    """Height constant: height = tau * K1/B * (n + sin t)/(sin t tan t)."""
    return 0.5 / cfg.kpd * math.sqrt(cfg.n_pd / cfg.fill_factor)


def k2(cfg: AdrConfig) -> float:
    """Area constant: area = gamma * K2 * ring/(B^2 sin^2 t)."""
    return math.pi * cfg.n_pd * cfg.n_cpc**2 / (4.0 * cfg.fill_factor * cfg.kpd**2)


def geometry(cfg: AdrConfig, bandwidth: float, fov: float) -> AdrGeometry:
    """Full receiver geometry at a design point.

    Derivation chain: theta from the FOV, PD side from the bandwidth, exit
    aperture from the array layout, entrance aperture from the concentrator
    gain, then overall height and projected top area over all tiers. When
    the configuration carries a truncation, entrance diameter, height and
    area are scaled by sqrt(gain_retention), length_ratio and gain_retention.
    """
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    theta = acceptance_angle(fov, cfg.n_tier)
    d_pd = pd_side_from_bandwidth(bandwidth, cfg.kpd)
    d2 = d_pd * math.sqrt(cfg.n_pd / cfg.fill_factor)
    d1 = d2 * cfg.n_cpc / math.sin(theta)
    height = (d1 + d2) / (2.0 * math.tan(theta))
    area = math.pi * d1**2 / 4.0 * float(ring_sum(cfg.n_tier, theta))
    root_g = math.sqrt(cfg.gain_retention)
    return AdrGeometry(
        theta_cpc=theta,
        tilt_angles=tuple(2 * i * theta for i in range(1, cfg.n_tier + 1)),
        pd_side=d_pd,
        exit_diameter=d2,
        entrance_diameter=root_g * d1,
        height=cfg.tau * height,
        top_area=cfg.gain_retention * area,
        element_count=element_count(cfg.n_tier),
        k1=k1(cfg),
        k2=k2(cfg),
    )
