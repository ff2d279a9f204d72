"""One-dimensional field laboratory on a finite grid.

A field configuration is a complex function on N grid points; the
discrete L2 product carries a dx weight. Scaling configurations by
sqrt(dx) identifies the grid with the Euclidean phase space of
dimension n = N, so every Gaussian-measure and projection tool applies
unchanged: the kernel matrix of a quadratic field energy is the same
matrix in both pictures.

Sign and normalisation conventions:
* kinetic kernel = -Laplacian / (2 mass), with the 3-point Laplacian
  and either periodic wrap-around or Dirichlet (zero outside) ends;
* field energy of a kernel R is (1/2) Re <R psi, psi> dx;
* momentum average uses the unitary Fourier normalisation
  psi_tilde = dx * fft(psi) / sqrt(2 pi), dk = 2 pi / (N dx), so that
  sum |psi_tilde|^2 dk equals the squared L2 norm, and the average is
  (1/2) sum k |psi_tilde|^2 dk.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .bridge import MonteCarloEstimate
from .gaussian import GaussianState, pure_state_measure, sample
from .symplectic import ComplexOperator

__all__ = [
    "FieldGrid",
    "FieldState",
    "KernelOperator",
    "laplacian_matrix",
    "build_hamiltonian",
    "hamiltonian_kernel",
    "plane_wave",
    "gaussian_packet",
    "free_field_evolve",
    "interacting_evolve",
    "position_average",
    "momentum_average",
    "fourier_transform",
    "field_energy",
    "quartic_field_energy",
    "field_pure_state",
    "gaussian_field_average",
]

_BOUNDARIES = ("periodic", "dirichlet")
_CHUNK = 8192  # fixed MC chunk; bounds memory at ~16 MB per array for N=128


@dataclass(frozen=True)
class FieldGrid:
    """Uniform grid x_j = x0 + j dx, j = 0..n_points-1."""

    n_points: int
    dx: float
    x0: float = 0.0
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("need at least two grid points")
        if self.dx <= 0:
            raise ValueError("dx must be positive")
        if self.boundary not in _BOUNDARIES:
            raise ValueError(f"boundary must be one of {_BOUNDARIES}")

    @classmethod
    def centered(cls, n_points: int, length: float, boundary: str = "periodic") -> "FieldGrid":
        """Grid of given total length with points symmetric about 0."""
        dx = length / n_points
        return cls(n_points, dx, x0=-(n_points - 1) * dx / 2.0, boundary=boundary)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n_points)

    @property
    def length(self) -> float:
        return self.n_points * self.dx


@dataclass(frozen=True)
class FieldState:
    """Complex field configuration on a grid."""

    grid: FieldGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise ValueError(
                f"values must have shape ({self.grid.n_points},), got {v.shape}"
            )
        if not np.isfinite(v).all():
            raise ValueError("field values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dx)

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def euclidean_coordinates(self) -> np.ndarray:
        """sqrt(dx)-scaled complex coordinates; Euclidean norm = L2 norm."""
        return self.values * math.sqrt(self.grid.dx)

    @classmethod
    def from_euclidean(cls, grid: FieldGrid, coords: np.ndarray) -> "FieldState":
        return cls(grid, np.asarray(coords, dtype=complex) / math.sqrt(grid.dx))

    def to_csv(self, path) -> None:
        """Columns x, re, im, abs2, one row per grid point (repr floats)."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "re", "im", "abs2"])
            for xj, vj in zip(self.grid.x, self.values):
                writer.writerow(
                    [
                        repr(float(xj)),
                        repr(float(vj.real)),
                        repr(float(vj.imag)),
                        repr(float(abs(vj) ** 2)),
                    ]
                )


def laplacian_matrix(grid: FieldGrid) -> np.ndarray:
    """3-point Laplacian (psi_{j+1} - 2 psi_j + psi_{j-1}) / dx^2."""
    n = grid.n_points
    lap = np.zeros((n, n))
    idx = np.arange(n)
    lap[idx, idx] = -2.0
    lap[idx[:-1], idx[:-1] + 1] = 1.0
    lap[idx[:-1] + 1, idx[:-1]] = 1.0
    if grid.boundary == "periodic":
        lap[0, n - 1] = 1.0
        lap[n - 1, 0] = 1.0
    return lap / grid.dx**2


@dataclass(frozen=True, eq=False)
class KernelOperator:
    """Real symmetric N x N kernel of a quadratic field energy."""

    grid: FieldGrid
    matrix: np.ndarray
    kind: str = "dense"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        n = self.grid.n_points
        if m.shape != (n, n):
            raise ValueError(f"kernel must be {n} x {n}, got {m.shape}")
        if not np.isfinite(m).all():
            raise ValueError("kernel entries must be finite")
        defect = float(np.max(np.abs(m - m.T)))
        if defect > 1e-10 * max(1.0, float(np.max(np.abs(m)))):
            raise ValueError(f"kernel must be symmetric (defect {defect:.3e})")
        m = (m + m.T) / 2.0
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def mass(cls, grid: FieldGrid, mass: float) -> "KernelOperator":
        """Kinetic kernel -Laplacian / (2 mass)."""
        if mass <= 0:
            raise ValueError("mass must be positive")
        return cls(grid, -laplacian_matrix(grid) / (2.0 * mass), kind="mass")

    @classmethod
    def potential(cls, grid: FieldGrid, v) -> "KernelOperator":
        """Multiplication kernel diag(V(x_j)); v is a callable or an array."""
        values = np.asarray(v(grid.x) if callable(v) else v, dtype=float)
        if values.shape != (grid.n_points,):
            raise ValueError("potential must produce one value per grid point")
        return cls(grid, np.diag(values), kind="potential")

    @classmethod
    def dense(cls, grid: FieldGrid, matrix) -> "KernelOperator":
        return cls(grid, matrix, kind="dense")

    def __add__(self, other: "KernelOperator") -> "KernelOperator":
        if other.grid != self.grid:
            raise ValueError("kernels live on different grids")
        return KernelOperator(self.grid, self.matrix + other.matrix)

    @cached_property
    def eigensystem(self):
        return np.linalg.eigh(self.matrix)

    def ground_state(self) -> FieldState:
        """Normalised eigenvector of the smallest eigenvalue."""
        _, vecs = self.eigensystem
        return FieldState.from_euclidean(self.grid, vecs[:, 0])

    def as_complex_operator(self) -> ComplexOperator:
        return ComplexOperator(self.matrix.astype(complex))


def hamiltonian_kernel(grid: FieldGrid, mass: float, v) -> KernelOperator:
    """Kinetic plus potential kernel -Lap/(2 mass) + diag(V)."""
    return KernelOperator.mass(grid, mass) + KernelOperator.potential(grid, v)


def build_hamiltonian(grid: FieldGrid, mass: float, v) -> ComplexOperator:
    """Same kernel viewed as a hermitian complex operator."""
    return hamiltonian_kernel(grid, mass, v).as_complex_operator()


def plane_wave(grid: FieldGrid, k0: float, amplitude: float = 1.0) -> FieldState:
    return FieldState(grid, amplitude * np.exp(1j * k0 * grid.x))


def gaussian_packet(
    grid: FieldGrid, center: float, width: float, k0: float = 0.0
) -> FieldState:
    """L2-normalised Gaussian bump exp(-(x-c)^2 / (4 w^2)) e^{i k0 x}."""
    if width <= 0:
        raise ValueError("width must be positive")
    envelope = np.exp(-((grid.x - center) ** 2) / (4.0 * width**2))
    values = envelope * np.exp(1j * k0 * grid.x)
    nrm = math.sqrt(float(np.sum(np.abs(values) ** 2) * grid.dx))
    if nrm == 0.0:
        raise ValueError("packet vanishes on the grid")
    return FieldState(grid, values / nrm)


def _coerce_kernel(r, grid: FieldGrid) -> np.ndarray:
    if isinstance(r, KernelOperator):
        if r.grid != grid:
            raise ValueError("kernel grid does not match the field grid")
        return r.matrix
    if isinstance(r, ComplexOperator):
        mat = r.matrix
    else:
        mat = np.asarray(r)
    if mat.shape != (grid.n_points, grid.n_points):
        raise ValueError("kernel shape does not match the grid")
    if np.max(np.abs(mat - np.asarray(mat).conj().T)) > 1e-10 * max(
        1.0, float(np.max(np.abs(mat)))
    ):
        raise ValueError("kernel must be hermitian")
    return mat


def free_field_evolve(psi0: FieldState, t: float) -> FieldState:
    """Unit-kernel evolution: a global phase rotation exp(-it)."""
    return FieldState(psi0.grid, psi0.values * np.exp(-1j * t))


def interacting_evolve(psi0: FieldState, r, t: float) -> FieldState:
    """Evolve by exp(-iRt) for a symmetric kernel R."""
    if isinstance(r, KernelOperator):
        if r.grid != psi0.grid:
            raise ValueError("kernel grid does not match the field grid")
        w, v = r.eigensystem
    else:
        mat = _coerce_kernel(r, psi0.grid)
        w, v = np.linalg.eigh(mat)
    u = (v * np.exp(-1j * w * t)) @ v.conj().T
    return FieldState(psi0.grid, u @ psi0.values)


def position_average(psi: FieldState) -> float:
    """(1/2) sum x_j |psi_j|^2 dx."""
    return 0.5 * float(np.sum(psi.grid.x * np.abs(psi.values) ** 2) * psi.grid.dx)


def momentum_average(psi: FieldState) -> float:
    """(1/2) sum k |psi_tilde(k)|^2 dk; periodic grids only."""
    if psi.grid.boundary != "periodic":
        raise ValueError("momentum average requires a periodic grid")
    n, dx = psi.grid.n_points, psi.grid.dx
    k = 2.0 * np.pi * np.fft.fftfreq(n, dx)
    power = np.abs(np.fft.fft(psi.values)) ** 2
    # |psi_tilde|^2 dk = (dx^2 / 2pi) |fft|^2 * (2pi / (N dx)) = dx/N |fft|^2
    return 0.5 * float(np.sum(k * power) * dx / n)


def fourier_transform(psi: FieldState):
    """(k, amplitudes) sorted by k, normalised so sum |amp|^2 dk = |psi|^2."""
    if psi.grid.boundary != "periodic":
        raise ValueError("Fourier transform requires a periodic grid")
    n, dx = psi.grid.n_points, psi.grid.dx
    k = 2.0 * np.pi * np.fft.fftfreq(n, dx)
    amps = np.fft.fft(psi.values) * dx / math.sqrt(2.0 * np.pi)
    order = np.argsort(k, kind="stable")
    return k[order], amps[order]


def field_energy(psi: FieldState, r) -> float:
    """(1/2) Re <R psi, psi> dx."""
    mat = _coerce_kernel(r, psi.grid)
    val = complex(np.vdot(psi.values, mat @ psi.values)) * psi.grid.dx
    return 0.5 * val.real


def quartic_field_energy(psi: FieldState, r, coupling: float) -> float:
    """Quadratic energy plus coupling * sum |psi_j|^4 dx (coupling >= 0)."""
    if coupling < 0:
        raise ValueError("coupling must be nonnegative")
    quartic = float(np.sum(np.abs(psi.values) ** 4) * psi.grid.dx)
    return field_energy(psi, r) + coupling * quartic


def field_pure_state(psi: FieldState, alpha: float) -> GaussianState:
    """Pure-state Gaussian measure concentrated on psi (L2-normalised)."""
    coords = psi.euclidean_coordinates()
    return pure_state_measure(coords, alpha)


def gaussian_field_average(
    r, rho: GaussianState, seed: int, count: int
) -> MonteCarloEstimate:
    """Monte Carlo mean of the quadratic field energy over a Gaussian
    measure on the sqrt(dx)-embedded field phase space.

    The rows of the sample stream are Euclidean (q || p) coordinates;
    each contributes (1/2) Re <R c, c> for c = q + ip, which equals
    field_energy of the corresponding field configuration. Deterministic
    in (seed, count) through fixed chunking.
    """
    if isinstance(r, KernelOperator):
        mat = r.matrix
        n = r.grid.n_points
    else:
        mat = np.asarray(r)
        n = mat.shape[0]
    if rho.n != n:
        raise ValueError(
            f"state dimension n={rho.n} does not match kernel size {n}"
        )
    if count < 2:
        raise ValueError("count must be at least 2")
    total = total_sq = 0.0
    done = 0
    while done < count:
        m = min(_CHUNK, count - done)
        pts = sample(rho, seed, m, start=done)
        c = pts[:, :n] + 1j * pts[:, n:]
        vals = 0.5 * np.real(np.einsum("ki,ij,kj->k", c.conj(), mat, c))
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
        done += m
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0) * count / (count - 1)
    return MonteCarloEstimate(mean, float(np.sqrt(var / count)), count)
