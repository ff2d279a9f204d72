"""Gaussian measures on phase space and their complex covariance calculus.

A state here is a zero-mean Gaussian measure on the 2n-dimensional phase
space, carried entirely by its real covariance matrix B. The scalar
``alpha = trace(B)`` is the dispersion of the measure. For J-invariant
states (covariance commuting with J) the information in B is equivalent
to the complex covariance

    M = E[z z^dagger] = D - iS,   D = B11 + B22,  S = B12 - B21,

with z = q + ip, and M corresponds to 2B under the block dictionary.
Normalising M by the dispersion produces a unit-trace hermitian PSD
matrix, which is how these measures project onto density operators (see
:mod:`pcsft.bridge`).

Sampling is counter-based: a fixed (seed, start, count) triple always
yields the same rows, and splitting a batch at any sample boundary
reproduces the sequential stream bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import ndtri

from .symplectic import (
    DEFAULT_TOL,
    BlockOperator,
    CheckResult,
    ComplexOperator,
    PhaseVector,
    complex_to_real,
    is_j_commuting,
)

__all__ = [
    "GaussianState",
    "DensityOperator",
    "dispersion",
    "is_j_invariant",
    "complex_covariance",
    "from_complex_covariance",
    "pure_state_measure",
    "pushforward",
    "quadratic_average",
    "sample",
]

# validation gates for state construction
_SYMMETRY_TOL = 1e-12
_EIGEN_TOL = 1e-12
_TRACE_TOL = 1e-10


@dataclass(frozen=True)
class GaussianState:
    """Zero-mean Gaussian measure with real covariance ``covariance``.

    The matrix must be symmetric within 1e-12 (relative to its largest
    entry) and positive semidefinite up to an eigenvalue slack of
    -1e-12 * max(trace, 1). Rank-deficient covariances are allowed; they
    describe measures supported on a subspace.
    """

    covariance: np.ndarray

    def __post_init__(self):
        b = np.array(self.covariance, dtype=float)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError("covariance must be a square matrix")
        if b.shape[0] % 2 != 0 or b.shape[0] < 2:
            raise ValueError("covariance must be 2n x 2n with n >= 1")
        if not np.isfinite(b).all():
            raise ValueError("covariance entries must be finite")
        scale = max(1.0, float(np.max(np.abs(b))))
        sym_defect = float(np.max(np.abs(b - b.T)))
        if sym_defect > _SYMMETRY_TOL * scale:
            raise ValueError(f"covariance not symmetric (defect {sym_defect:.3e})")
        b = (b + b.T) / 2.0  # remove round-off asymmetry before storing
        trace = float(np.trace(b))
        min_eig = float(np.linalg.eigvalsh(b)[0])
        if min_eig < -_EIGEN_TOL * max(trace, 1.0):
            raise ValueError(f"covariance not positive semidefinite (min eig {min_eig:.3e})")
        b.setflags(write=False)
        object.__setattr__(self, "covariance", b)

    @property
    def n(self) -> int:
        return self.covariance.shape[0] // 2

    @property
    def alpha(self) -> float:
        """Dispersion of the measure: the covariance trace."""
        return float(np.trace(self.covariance))

    @classmethod
    def isotropic(cls, n: int, alpha: float) -> "GaussianState":
        """Rotation-invariant state with covariance (alpha / 2n) * I."""
        if alpha < 0:
            raise ValueError("alpha must be nonnegative")
        return cls(np.eye(2 * n) * (alpha / (2 * n)))

    @cached_property
    def _eigensystem(self):
        # cached once per state; used by sampling
        w, v = np.linalg.eigh(self.covariance)
        return w, v

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "covariance": self.covariance.tolist(),
            "alpha": self.alpha,
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "GaussianState":
        payload = json.loads(text)
        expected = {"n", "covariance", "alpha"}
        if not isinstance(payload, dict) or set(payload) != expected:
            raise ValueError(f"state JSON must have exactly the keys {sorted(expected)}")
        state = cls(np.asarray(payload["covariance"], dtype=float))
        if state.n != payload["n"]:
            raise ValueError(f"declared n={payload['n']} does not match covariance shape")
        declared = float(payload["alpha"])
        if abs(declared - state.alpha) > _TRACE_TOL * max(1.0, abs(declared)):
            raise ValueError(
                f"declared alpha={declared} does not match covariance trace {state.alpha}"
            )
        return state


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace complex matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError("density operator must be a square matrix")
        if not np.isfinite(m).all():
            raise ValueError("density operator entries must be finite")
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > _TRACE_TOL:
            raise ValueError(f"density operator not hermitian (defect {herm:.3e})")
        m = (m + m.conj().T) / 2.0
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > _TRACE_TOL:
            raise ValueError(f"density operator trace {tr} is not 1")
        if float(np.linalg.eigvalsh(m)[0]) < -_TRACE_TOL:
            raise ValueError("density operator not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, psi) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex)
        nrm = float(np.linalg.norm(psi))
        if abs(nrm - 1.0) > 1e-10:
            raise ValueError(f"pure state vector must be normalised, got norm {nrm}")
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityOperator":
        return cls(np.eye(n, dtype=complex) / n)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def as_operator(self) -> ComplexOperator:
        return ComplexOperator(self.matrix)


def dispersion(rho: GaussianState) -> float:
    """Covariance trace; equals the mean of the squared phase-space norm."""
    return rho.alpha


def is_j_invariant(rho: GaussianState, tol: float = DEFAULT_TOL) -> CheckResult:
    """A Gaussian measure is J-invariant iff its covariance commutes with J."""
    return is_j_commuting(BlockOperator(rho.covariance), tol)


def complex_covariance(rho: GaussianState) -> ComplexOperator:
    """Complex covariance M = E[z z^dagger] with z = q + ip.

    Blockwise M = (B11 + B22) - i (B12 - B21); hermitian for every state,
    and equal to 2B under the block dictionary when the state is
    J-invariant.
    """
    b = BlockOperator(rho.covariance)
    d = b.a11 + b.a22
    s = b.a12 - b.a21
    return ComplexOperator(d - 1j * s)


def from_complex_covariance(m, tol: float = DEFAULT_TOL) -> GaussianState:
    """J-invariant Gaussian state with prescribed complex covariance.

    Inverts :func:`complex_covariance` on J-invariant states:
    B11 = B22 = Re(M)/2 and B12 = -B21 = -Im(M)/2. The input must be
    hermitian PSD for the result to be a valid covariance.
    """
    if not isinstance(m, ComplexOperator):
        m = ComplexOperator(np.asarray(m, dtype=complex))
    herm = m.hermiticity_defect()
    if herm > tol:
        raise ValueError(f"complex covariance must be hermitian (defect {herm:.3e})")
    return GaussianState(complex_to_real(m).matrix / 2.0)


def pure_state_measure(psi, alpha: float) -> GaussianState:
    """Gaussian measure of dispersion alpha concentrated on the complex
    line through a normalised vector psi.

    The covariance is (alpha/2) (e1 e1^T + e2 e2^T) with e1 = (u, v) and
    e2 = (-v, u) for psi = u + iv, i.e. rank two, supported on the real
    plane spanned by psi and J psi. Its complex covariance is
    alpha * psi psi^dagger.
    """
    if isinstance(psi, PhaseVector):
        u, v = psi.q, psi.p
    else:
        z = np.asarray(psi, dtype=complex)
        if z.ndim != 1 or z.size < 1:
            raise ValueError("psi must be a one-dimensional vector")
        u, v = z.real, z.imag
    nrm = math.sqrt(float(u @ u + v @ v))
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"psi must be normalised, got norm {nrm}")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    e1 = np.concatenate([u, v])
    e2 = np.concatenate([-v, u])
    b = (alpha / 2.0) * (np.outer(e1, e1) + np.outer(e2, e2))
    return GaussianState(b)


def pushforward(rho: GaussianState, u: BlockOperator) -> GaussianState:
    """Image measure under the linear map u: covariance U B U^T."""
    if u.n != rho.n:
        raise ValueError(f"dimension mismatch: state n={rho.n}, operator n={u.n}")
    b = u.matrix @ rho.covariance @ u.matrix.T
    return GaussianState((b + b.T) / 2.0)


def quadratic_average(rho: GaussianState, a) -> float:
    """Exact mean of the quadratic form psi -> (A psi, psi) under rho.

    ``a`` is either a symmetric J-commuting :class:`BlockOperator` or a
    hermitian :class:`ComplexOperator`; the mean equals the complex trace
    of (complex covariance of rho) times (complex image of A).
    """
    if isinstance(a, BlockOperator):
        if a.n != rho.n:
            raise ValueError("dimension mismatch between state and operator")
        if not a.is_symmetric(DEFAULT_TOL):
            raise ValueError("block operator must be symmetric")
        from .symplectic import real_to_complex

        m_a = real_to_complex(a)
    elif isinstance(a, ComplexOperator):
        if a.n != rho.n:
            raise ValueError("dimension mismatch between state and operator")
        if not a.is_hermitian(DEFAULT_TOL):
            raise ValueError("complex operator must be hermitian")
        m_a = a
    else:
        raise TypeError("expected BlockOperator or ComplexOperator")
    value = complex(np.trace(complex_covariance(rho).matrix @ m_a.matrix))
    if abs(value.imag) > 1e-10 * (1.0 + abs(value)):
        raise ValueError(f"trace average unexpectedly non-real: {value}")
    return value.real


def _block_aligned_uniforms(seed: int, start: int, count: int, dim: int) -> np.ndarray:
    """Uniforms in [0,1) from a Philox counter stream, one padded row per
    sample.

    The counter generator emits 64-bit words in blocks of 4 and
    ``advance`` moves whole blocks, so each sample is given
    ceil(dim/4)*4 words. That makes every sample boundary a block
    boundary: starting at sample ``start`` reproduces exactly the rows a
    sequential run would have produced there.
    """
    words_per_sample = 4 * ((dim + 3) // 4)
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(start * (words_per_sample // 4))
    gen = np.random.Generator(bitgen)
    u = gen.random((count, words_per_sample))
    return u[:, :dim]


def sample(rho: GaussianState, seed: int, count: int, start: int = 0) -> np.ndarray:
    """Draw ``count`` points of rho as a (count, 2n) array.

    Deterministic in (seed, start, count): the row at global index k is
    the same whether generated in one batch or in any split of batches.
    Gaussian shaping uses the inverse normal CDF on counter-based
    uniforms and the symmetric eigenfactor of the covariance, so
    rank-deficient covariances are handled by clamping the (already
    validated) tiny negative eigenvalues to zero.
    """
    if count < 0 or start < 0:
        raise ValueError("count and start must be nonnegative")
    dim = 2 * rho.n
    if count == 0:
        return np.zeros((0, dim))
    u = _block_aligned_uniforms(int(seed), int(start), int(count), dim)
    tiny = np.finfo(float).tiny
    z = ndtri(np.clip(u, tiny, None))
    w, v = rho._eigensystem
    # eigenvalues within round-off of zero are exact zeros, so that
    # rank-deficient states stay on their support subspace
    w = np.where(w > 1e-14 * max(float(w[-1]), 0.0), w, 0.0)
    factor = v * np.sqrt(w)
    # einsum (non-BLAS path) makes each output row independent of the
    # batch shape; plain matmul is not bit-stable across batch splits
    return np.einsum("kj,ij->ki", z, factor)
