"""Geometric doubly-dispersive channel between two planar apertures.

Both apertures lie in planes parallel to x-z and radiate along +y. The
transmitter sits at the origin, the receiver is displaced along +y by the
configured standoff. Per-path coupling between the apertures is a double
surface integral evaluated with tensor-product Gauss-Legendre rules; the
discrete baseline replaces the integrals with sums over half-wavelength
spaced elements.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Literal

import numpy as np

from .errors import InvalidGeometryError, InvalidInputError

if TYPE_CHECKING:
    from .config import SimConfig

SPEED_OF_LIGHT = 2.9979e8

E_X = np.array([1.0, 0.0, 0.0])
E_Y = np.array([0.0, 1.0, 0.0])
E_Z = np.array([0.0, 0.0, 1.0])

Side = Literal["tx", "rx"]


def wavelength(carrier_hz: float) -> float:
    return SPEED_OF_LIGHT / carrier_hz


@dataclass(frozen=True)
class ApertureConfig:
    """Rectangular aperture in a plane parallel to x-z."""

    side_x: float
    side_z: float
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not (self.side_x > 0 and self.side_z > 0):
            raise InvalidGeometryError("aperture sides must be positive")

    @classmethod
    def square(cls, area: float, center=(0.0, 0.0, 0.0)) -> ApertureConfig:
        side = math.sqrt(area)
        return cls(side, side, tuple(float(c) for c in center))

    @property
    def area(self) -> float:
        return self.side_x * self.side_z

    def surface_points(self, x_offsets: np.ndarray, z_offsets: np.ndarray) -> np.ndarray:
        """Tensor-product points ``center + x e_x + z e_z``, x varying slowest."""
        xx, zz = np.meshgrid(x_offsets, z_offsets, indexing="ij")
        pts = np.zeros((xx.size, 3))
        pts[:, 0] = xx.ravel()
        pts[:, 2] = zz.ravel()
        return pts + np.asarray(self.center)


@dataclass(frozen=True)
class Path:
    gain: float
    delay: float
    doppler: float
    k_tx: np.ndarray
    k_rx: np.ndarray
    gamma: np.ndarray
    d_tx: float
    d_rx: float

    @property
    def polarization(self) -> np.ndarray:
        return polarization_operator(self.k_tx, self.k_rx, self.gamma)


def path_gain(d_tx: float, d_rx: float, num_paths: int) -> float:
    """Large-scale gain ``1 / (sqrt(L) (4 pi)^2 d_rx d_tx)``."""
    if d_tx <= 0 or d_rx <= 0:
        raise InvalidGeometryError(f"distances must be positive, got {d_tx}, {d_rx}")
    if num_paths < 1:
        raise InvalidInputError("num_paths must be >= 1")
    return 1.0 / (math.sqrt(num_paths) * (4 * math.pi) ** 2 * d_rx * d_tx)


def _require_unit(v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise InvalidInputError(f"{name} must be a unit 3-vector")
    return v


def polarization_operator(k_tx, k_rx, gamma) -> np.ndarray:
    """Transverse-projected polarization transfer ``P_rx Gamma P_tx``."""
    k_tx = _require_unit(k_tx, "k_tx")
    k_rx = _require_unit(k_rx, "k_rx")
    p_tx = np.eye(3) - np.outer(k_tx, k_tx)
    p_rx = np.eye(3) - np.outer(k_rx, k_rx)
    return p_rx @ np.asarray(gamma, dtype=complex) @ p_tx


def path_from_scatterer(tx_center, rx_center, scatterer, radial_velocity: float,
                        gamma, num_paths: int, carrier_hz: float) -> Path:
    tx_center, rx_center, scatterer = (np.asarray(p, dtype=float)
                                       for p in (tx_center, rx_center, scatterer))
    leg_tx = scatterer - tx_center
    leg_rx = rx_center - scatterer
    d_tx = float(np.linalg.norm(leg_tx))
    d_rx = float(np.linalg.norm(leg_rx))
    if d_tx == 0 or d_rx == 0:
        raise InvalidGeometryError("scatterer coincides with an aperture center")
    return Path(
        gain=path_gain(d_tx, d_rx, num_paths),
        delay=(d_tx + d_rx) / SPEED_OF_LIGHT,
        doppler=radial_velocity * carrier_hz / SPEED_OF_LIGHT,
        k_tx=leg_tx / d_tx,
        k_rx=leg_rx / d_rx,
        gamma=np.asarray(gamma, dtype=complex),
        d_tx=d_tx,
        d_rx=d_rx,
    )


def sample_paths(scenario: SimConfig, rng: np.random.Generator) -> list[Path]:
    """Draw ``scenario.num_paths`` single-bounce paths.

    Scatterers are placed at uniform azimuth/elevation in the transmitter's
    front half-space and uniform range up to ``r_max``; positions that are
    not in front of the receiver, or closer than ten wavelengths to either
    aperture, are redrawn. Radial velocities are uniform in ``[-v_max, v_max]``.
    """
    lam = wavelength(scenario.carrier_hz)
    min_leg = 10 * lam
    tx_center = np.zeros(3)
    rx_center = np.array([0.0, scenario.standoff, 0.0])
    paths = []
    while len(paths) < scenario.num_paths:
        azimuth = rng.uniform(-np.pi / 2, np.pi / 2)
        elevation = rng.uniform(-np.pi / 2, np.pi / 2)
        rng_m = rng.uniform(min_leg, scenario.r_max)
        velocity = rng.uniform(-scenario.v_max, scenario.v_max)
        gamma = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        direction = np.array([
            math.cos(elevation) * math.sin(azimuth),
            math.cos(elevation) * math.cos(azimuth),
            math.sin(elevation),
        ])
        scatterer = rng_m * direction
        if scatterer[1] <= rx_center[1] or np.linalg.norm(scatterer - rx_center) < min_leg:
            continue
        paths.append(path_from_scatterer(
            tx_center, rx_center, scatterer, velocity,
            gamma / np.linalg.norm(gamma), scenario.num_paths, scenario.carrier_hz,
        ))
    return paths


@dataclass(frozen=True)
class CurrentDesign:
    """Plane-wave surface current ``a u exp(-j 2pi/lambda d.p)``.

    ``direction`` is the steering direction seen from the aperture: the
    departure direction at the transmitter and the reversed arrival direction
    at the receiver, so the receive current's conjugate cancels the arrival
    phase.
    """

    direction: np.ndarray
    polarization: np.ndarray
    amplitude: float
    wavelength: float

    def field(self, points: np.ndarray) -> np.ndarray:
        """Current vectors at ``points`` (P x 3), shape (P, 3)."""
        beta = 2 * np.pi / self.wavelength
        phase = np.exp(-1j * beta * (points @ self.direction))
        return self.amplitude * phase[:, None] * self.polarization[None, :]


def transverse_polarization(direction: np.ndarray) -> np.ndarray:
    """Unit vector orthogonal to ``direction``: projected e_z, else e_x."""
    direction = np.asarray(direction, dtype=float)
    for axis in (E_Z, E_X):
        u = axis - direction * (direction @ axis)
        norm = np.linalg.norm(u)
        if norm > 1e-9:
            return u / norm
    raise InvalidInputError("cannot build a transverse polarization")


def matched_current(aperture: ApertureConfig, path: Path, side: Side,
                    lam: float) -> CurrentDesign:
    """Unit-power current matched to ``path`` on the given side of the link."""
    if side == "tx":
        direction = np.asarray(path.k_tx, dtype=float)
    elif side == "rx":
        direction = -np.asarray(path.k_rx, dtype=float)
    else:
        raise InvalidInputError(f"side must be 'tx' or 'rx', got {side!r}")
    return CurrentDesign(
        direction=direction,
        polarization=transverse_polarization(direction),
        amplitude=1.0 / math.sqrt(aperture.area),
        wavelength=lam,
    )


def strongest_path(paths: list[Path]) -> Path:
    return max(paths, key=lambda p: p.gain)


@lru_cache(maxsize=64)
def _legendre(points: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(points)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_legendre_rule(points: int, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped from [-1, 1] onto [lo, hi]."""
    if points < 1:
        raise InvalidInputError("need at least one quadrature point")
    if not lo < hi:
        raise InvalidInputError(f"empty interval [{lo}, {hi}]")
    x, w = _legendre(points)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


@dataclass(frozen=True)
class QuadratureGrid:
    tx_x: int = 10
    tx_z: int = 10
    rx_x: int = 10
    rx_z: int = 10

    @classmethod
    def uniform(cls, points: int) -> QuadratureGrid:
        return cls(points, points, points, points)

    def rule(self, aperture: ApertureConfig, side: Side) -> tuple[np.ndarray, np.ndarray]:
        """Surface points (P x 3) and product weights (P,) over ``aperture``."""
        nx, nz = (self.tx_x, self.tx_z) if side == "tx" else (self.rx_x, self.rx_z)
        xs, wx = gauss_legendre_rule(nx, -aperture.side_x / 2, aperture.side_x / 2)
        zs, wz = gauss_legendre_rule(nz, -aperture.side_z / 2, aperture.side_z / 2)
        return aperture.surface_points(xs, zs), np.outer(wx, wz).ravel()


def _steering(points: np.ndarray, k: np.ndarray, lam: float) -> np.ndarray:
    return np.exp(1j * (2 * np.pi / lam) * (points @ k))


def effective_path_matrix_capa(j_tx: CurrentDesign, j_rx: CurrentDesign, path: Path,
                               grid: QuadratureGrid, tx_aperture: ApertureConfig,
                               rx_aperture: ApertureConfig) -> np.ndarray:
    """Aperture coupling of one path for single-stream currents, as a 1x1 matrix.

    The integrand factors into a receive part and a transmit part, so the
    tensor-product rule over both apertures reduces to the product of two
    surface sums.
    """
    lam = j_tx.wavelength
    s, ws = grid.rule(tx_aperture, "tx")
    r, wr = grid.rule(rx_aperture, "rx")
    tx_vec = (ws * _steering(s, path.k_tx, lam)) @ j_tx.field(s)
    rx_vec = (wr * _steering(r, path.k_rx, lam)) @ j_rx.field(r).conj()
    value = path.gain * (rx_vec @ path.polarization @ tx_vec)
    return np.array([[value]])


def element_area(lam: float) -> float:
    """Effective aperture ``lambda^2 / (4 pi)`` of one discrete element."""
    return lam**2 / (4 * np.pi)


@dataclass(frozen=True)
class DiscreteArray:
    """Half-wavelength grid of isotropic elements filling an aperture."""

    positions: np.ndarray
    element_area: float

    @classmethod
    def filling(cls, aperture: ApertureConfig, lam: float) -> DiscreteArray:
        spacing = lam / 2
        nx = int(math.floor(aperture.side_x / spacing)) + 1
        nz = int(math.floor(aperture.side_z / spacing)) + 1
        xs = (np.arange(nx) - (nx - 1) / 2) * spacing
        zs = (np.arange(nz) - (nz - 1) / 2) * spacing
        return cls(aperture.surface_points(xs, zs), element_area(lam))

    @property
    def size(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True)
class ArrayWeights:
    """Per-element complex weights sharing one polarization vector."""

    values: np.ndarray
    polarization: np.ndarray = field(default_factory=lambda: E_Z.copy())


def matched_weights(array: DiscreteArray, design: CurrentDesign) -> ArrayWeights:
    """Conjugate-phase weights of unit total power for the design's steering."""
    beta = 2 * np.pi / design.wavelength
    values = np.exp(-1j * beta * (array.positions @ design.direction)) / math.sqrt(array.size)
    return ArrayWeights(values, design.polarization)


def effective_path_matrix_discrete(tx_array: DiscreteArray, rx_array: DiscreteArray,
                                   path: Path, tx_weights: ArrayWeights,
                                   rx_weights: ArrayWeights, lam: float) -> np.ndarray:
    """Discrete-array counterpart of the aperture coupling, as a 1x1 matrix."""
    tx_sum = np.sqrt(tx_array.element_area) * (
        tx_weights.values @ _steering(tx_array.positions, path.k_tx, lam))
    rx_sum = np.sqrt(rx_array.element_area) * (
        rx_weights.values.conj() @ _steering(rx_array.positions, path.k_rx, lam))
    coupling = rx_weights.polarization @ path.polarization @ tx_weights.polarization
    return np.array([[path.gain * rx_sum * tx_sum * coupling]])
