"""Layered reflective samples and their round-trip frequency response.

A sample is an ordered list of reflective interfaces, optionally separated
by dispersive material. The model is single-scattering: the response is a
sum of one echo per interface, each delayed by the vacuum path plus the
accumulated material phase of every layer traversed above that interface.
The factor of two in the phase encodes the round trip.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .constants import SPEED_OF_LIGHT, UM

_PASSIVITY_TOL = 1e-12
_GAP_TOL_UM = 1e-9


@dataclass(frozen=True)
class Layer:
    """Homogeneous slab described by a quadratic phase expansion.

    The one-way propagation phase at detuning dw from the expansion center
    is (beta0 + beta1 * dw + 0.5 * beta2 * dw**2) * thickness. beta1 is the
    group delay per unit length, beta2 the group-velocity dispersion per
    unit length, and beta0 the carrier phase per unit length.
    """

    thickness_um: float
    beta1_s_per_m: float
    beta2_s2_per_m: float = 0.0
    beta0_rad_per_m: float = 0.0

    def __post_init__(self) -> None:
        if self.thickness_um < 0:
            raise ValueError("layer thickness must be nonnegative")
        for value in (self.thickness_um, self.beta1_s_per_m,
                      self.beta2_s2_per_m, self.beta0_rad_per_m):
            if not math.isfinite(value):
                raise ValueError("layer coefficients must be finite")

    def one_way_phase(self, detuning: np.ndarray) -> np.ndarray:
        """Single-pass phase in radians at the given detunings (rad/s)."""
        thickness_m = self.thickness_um * UM
        return (
            self.beta0_rad_per_m
            + self.beta1_s_per_m * detuning
            + 0.5 * self.beta2_s2_per_m * detuning**2
        ) * thickness_m


def vacuum_like_layer(thickness_um: float, center_frequency: float,
                      beta2_s2_per_m: float = 0.0) -> Layer:
    """Layer matching vacuum in phase and group delay, with optional GVD.

    Useful for isolating dispersion effects: with beta2 = 0 the layer is
    numerically indistinguishable from empty space of the same thickness.
    """
    return Layer(
        thickness_um=thickness_um,
        beta1_s_per_m=1.0 / SPEED_OF_LIGHT,
        beta2_s2_per_m=beta2_s2_per_m,
        beta0_rad_per_m=center_frequency / SPEED_OF_LIGHT,
    )


@dataclass(frozen=True)
class Interface:
    """Reflective boundary at a depth, with a complex amplitude reflectance."""

    depth_um: float
    reflectance: complex
    phase_jitter_rad: float = 0.0


class LayerStack:
    """Ordered reflective interfaces with optional material in the gaps.

    `media[j]` lists the layers traversed between interface j-1 and
    interface j (for j = 0, between the reference plane and the first
    interface; this gap is unconstrained so that a sample may sit behind an
    arbitrarily thick substrate). Material between consecutive interfaces
    must fit in the geometric gap. Passivity is enforced through
    sum(|r_j|) <= 1, which bounds |H| by one everywhere.
    """

    def __init__(
        self,
        interfaces: Sequence[Interface],
        media: Sequence[Layer | Iterable[Layer] | None] | None = None,
    ) -> None:
        interfaces = tuple(interfaces)
        if not interfaces:
            raise ValueError("a stack needs at least one interface")
        depths = [iface.depth_um for iface in interfaces]
        if any(b <= a for a, b in zip(depths, depths[1:])):
            raise ValueError("interface depths must be strictly increasing")
        total = sum(abs(iface.reflectance) for iface in interfaces)
        if total > 1.0 + _PASSIVITY_TOL:
            raise ValueError(
                f"sum of |reflectance| is {total:.6g}, above the passive limit of 1"
            )

        media_norm = self._normalize_media(media, len(interfaces))
        for j in range(1, len(interfaces)):
            gap = depths[j] - depths[j - 1]
            filled = sum(layer.thickness_um for layer in media_norm[j])
            if filled > gap + _GAP_TOL_UM:
                raise ValueError(
                    f"material above interface {j} ({filled:g} um) exceeds "
                    f"the {gap:g} um gap"
                )

        self.interfaces: tuple[Interface, ...] = interfaces
        self.media: tuple[tuple[Layer, ...], ...] = media_norm

    @staticmethod
    def _normalize_media(media, n_interfaces: int) -> tuple[tuple[Layer, ...], ...]:
        if media is None:
            return tuple(() for _ in range(n_interfaces))
        out = []
        for item in media:
            if item is None:
                out.append(())
            elif isinstance(item, Layer):
                out.append((item,))
            else:
                out.append(tuple(item))
        if len(out) != n_interfaces:
            raise ValueError("media list must have one entry per interface")
        return tuple(out)

    @classmethod
    def single_mirror(
        cls,
        depth_um: float = 0.0,
        reflectance: complex = 1.0,
        layers_above: Layer | Iterable[Layer] | None = None,
    ) -> "LayerStack":
        return cls([Interface(depth_um, reflectance)], [layers_above])

    @property
    def n_interfaces(self) -> int:
        return len(self.interfaces)

    def term_matrix(self, omega: np.ndarray, center_frequency: float) -> np.ndarray:
        """Per-interface complex echo amplitudes, shaped (n_interfaces, n_freq).

        Summing over the first axis gives the transfer function H(omega).
        Kept separate so that callers can rotate individual interface phases
        (surface-roughness averaging) without rebuilding the stack.
        """
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        detuning = omega - center_frequency
        rows = np.empty((self.n_interfaces, omega.size), dtype=complex)
        material_phase = np.zeros_like(omega)
        material_um = 0.0
        for idx, (iface, layers) in enumerate(zip(self.interfaces, self.media)):
            for layer in layers:
                material_phase = material_phase + layer.one_way_phase(detuning)
                material_um += layer.thickness_um
            vacuum_path_m = (iface.depth_um - material_um) * UM
            phase = 2.0 * ((omega / SPEED_OF_LIGHT) * vacuum_path_m + material_phase)
            rows[idx] = iface.reflectance * np.exp(1j * (iface.phase_jitter_rad + phase))
        return rows

    def transfer_function(self, omega, center_frequency: float):
        """Round-trip reflection response H(omega); |H| <= sum(|r_j|)."""
        scalar = np.ndim(omega) == 0
        values = self.term_matrix(omega, center_frequency).sum(axis=0)
        return complex(values[0]) if scalar else values

    def surface_depths(self) -> list[tuple[float, float]]:
        """Interfaces as (depth_um, intensity_reflectance), shallow to deep."""
        return [
            (iface.depth_um, abs(iface.reflectance) ** 2)
            for iface in self.interfaces
        ]


class UniformSample:
    """Transversally uniform sample: the same stack at every (x, y)."""

    def __init__(self, stack: LayerStack) -> None:
        self.stack = stack

    def local_stack(self, x_um: float, y_um: float) -> LayerStack:
        return self.stack
