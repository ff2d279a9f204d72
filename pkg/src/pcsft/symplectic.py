"""Algebra of the real phase space and its complex form.

The phase space is R^{2n} with points psi = (q, p). The canonical
symplectic operator J maps (q, p) to (p, -q) and squares to -I, so it
plays the role of multiplication by -i once the space is read as C^n
via psi = q + ip. Real 2n x 2n operators commuting with J are exactly
the ones acting C-linearly; they carry an algebra isomorphism onto
complex n x n matrices which is implemented here by
``real_to_complex`` / ``complex_to_real``.

Conventions fixed by this module and relied on everywhere else:

* ``apply_j((q, p)) == (p, -q)``.
* ``symplectic_form(psi1, psi2) == dot(p2, q1) - dot(p1, q2)``.
* ``hermitian_product`` is linear in the first slot and conjugate
  linear in the second, so it equals ``sum(z1 * conj(z2))`` for the
  complex coordinates.
* A J-commuting block matrix [[D, S], [-S, D]] maps to M = D - iS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_TOL",
    "CheckResult",
    "PhaseVector",
    "BlockOperator",
    "ComplexOperator",
    "SymplecticForm",
    "j_matrix",
    "apply_j",
    "j_commutation_defect",
    "is_j_commuting",
    "symplectic_form",
    "hermitian_product",
    "real_to_complex",
    "complex_to_real",
    "poisson_bracket",
]

DEFAULT_TOL = 1e-10


def _as_readonly(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a numerical predicate: boolean verdict plus the defect.

    Truth-tests as the verdict, so it can be used directly in
    ``if not is_j_commuting(A): ...`` while still exposing the measured
    defect for diagnostics.
    """

    ok: bool
    defect: float

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class PhaseVector:
    """Point psi = (q, p) of the 2n-dimensional phase space.

    Parameters
    ----------
    q, p : array_like
        Real coordinate and momentum parts, both of length n >= 1.
    """

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = _as_readonly(self.q)
        p = _as_readonly(self.p)
        if q.ndim != 1 or p.ndim != 1:
            raise ValueError("q and p must be one-dimensional arrays")
        if q.shape != p.shape:
            raise ValueError(f"q and p must have equal length, got {q.size} and {p.size}")
        if q.size < 1:
            raise ValueError("phase space dimension n must be at least 1")
        if not (np.isfinite(q).all() and np.isfinite(p).all()):
            raise ValueError("phase vector entries must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.size

    @classmethod
    def from_flat(cls, flat) -> "PhaseVector":
        """Build from the concatenated layout (q_0..q_{n-1}, p_0..p_{n-1})."""
        flat = np.asarray(flat, dtype=float)
        if flat.ndim != 1 or flat.size % 2 != 0:
            raise ValueError("flat phase vector must be one-dimensional of even length")
        n = flat.size // 2
        return cls(flat[:n], flat[n:])

    @classmethod
    def from_complex(cls, z) -> "PhaseVector":
        """Inverse of :meth:`to_complex`: q = Re z, p = Im z."""
        z = np.asarray(z, dtype=complex)
        return cls(z.real.copy(), z.imag.copy())

    def flat(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    def to_complex(self) -> np.ndarray:
        return self.q + 1j * self.p

    def norm_sq(self) -> float:
        return float(self.q @ self.q + self.p @ self.p)

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def __add__(self, other: "PhaseVector") -> "PhaseVector":
        return PhaseVector(self.q + other.q, self.p + other.p)

    def __sub__(self, other: "PhaseVector") -> "PhaseVector":
        return PhaseVector(self.q - other.q, self.p - other.p)

    def __neg__(self) -> "PhaseVector":
        return PhaseVector(-self.q, -self.p)

    def __mul__(self, scalar: float) -> "PhaseVector":
        return PhaseVector(self.q * scalar, self.p * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class BlockOperator:
    """Real linear operator on the 2n-dimensional phase space.

    Stored as a dense 2n x 2n matrix; the four named n x n blocks refer
    to the (q, p) splitting.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_readonly(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("operator matrix must be square")
        if m.shape[0] % 2 != 0 or m.shape[0] < 2:
            raise ValueError("operator matrix must be 2n x 2n with n >= 1")
        if not np.isfinite(m).all():
            raise ValueError("operator entries must be finite")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_blocks(cls, a11, a12, a21, a22) -> "BlockOperator":
        a11, a12, a21, a22 = (np.asarray(b, dtype=float) for b in (a11, a12, a21, a22))
        if not (a11.shape == a12.shape == a21.shape == a22.shape) or a11.ndim != 2:
            raise ValueError("all four blocks must be n x n with equal shapes")
        return cls(np.block([[a11, a12], [a21, a22]]))

    @classmethod
    def from_pair(cls, d, s) -> "BlockOperator":
        """J-commuting operator [[D, S], [-S, D]] from its two blocks."""
        d = np.asarray(d, dtype=float)
        s = np.asarray(s, dtype=float)
        return cls.from_blocks(d, s, -s, d)

    @classmethod
    def identity(cls, n: int) -> "BlockOperator":
        return cls(np.eye(2 * n))

    @property
    def n(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def a11(self) -> np.ndarray:
        n = self.n
        return self.matrix[:n, :n]

    @property
    def a12(self) -> np.ndarray:
        n = self.n
        return self.matrix[:n, n:]

    @property
    def a21(self) -> np.ndarray:
        n = self.n
        return self.matrix[n:, :n]

    @property
    def a22(self) -> np.ndarray:
        n = self.n
        return self.matrix[n:, n:]

    def apply(self, psi: PhaseVector) -> PhaseVector:
        if psi.n != self.n:
            raise ValueError(f"dimension mismatch: operator n={self.n}, vector n={psi.n}")
        return PhaseVector.from_flat(self.matrix @ psi.flat())

    def transpose(self) -> "BlockOperator":
        return BlockOperator(self.matrix.T)

    @property
    def T(self) -> "BlockOperator":
        return self.transpose()

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T)))

    def is_symmetric(self, tol: float = DEFAULT_TOL) -> CheckResult:
        d = self.symmetry_defect()
        return CheckResult(d <= tol, d)

    def __matmul__(self, other: "BlockOperator") -> "BlockOperator":
        if other.n != self.n:
            raise ValueError("dimension mismatch in operator product")
        return BlockOperator(self.matrix @ other.matrix)

    def __add__(self, other: "BlockOperator") -> "BlockOperator":
        return BlockOperator(self.matrix + other.matrix)

    def __sub__(self, other: "BlockOperator") -> "BlockOperator":
        return BlockOperator(self.matrix - other.matrix)

    def __mul__(self, scalar: float) -> "BlockOperator":
        return BlockOperator(self.matrix * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class ComplexOperator:
    """Complex n x n operator, the C-linear image of a J-commuting real one."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_readonly(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("operator matrix must be square")
        if m.shape[0] < 1:
            raise ValueError("operator dimension must be at least 1")
        if not np.isfinite(m).all():
            raise ValueError("operator entries must be finite")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, n: int) -> "ComplexOperator":
        return cls(np.eye(n, dtype=complex))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def apply(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.shape != (self.n,):
            raise ValueError(f"dimension mismatch: operator n={self.n}, vector shape {z.shape}")
        return self.matrix @ z

    def adjoint(self) -> "ComplexOperator":
        return ComplexOperator(self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def is_hermitian(self, tol: float = DEFAULT_TOL) -> CheckResult:
        d = self.hermiticity_defect()
        return CheckResult(d <= tol, d)

    def __matmul__(self, other: "ComplexOperator") -> "ComplexOperator":
        if other.n != self.n:
            raise ValueError("dimension mismatch in operator product")
        return ComplexOperator(self.matrix @ other.matrix)

    def __add__(self, other: "ComplexOperator") -> "ComplexOperator":
        return ComplexOperator(self.matrix + other.matrix)

    def __sub__(self, other: "ComplexOperator") -> "ComplexOperator":
        return ComplexOperator(self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "ComplexOperator":
        return ComplexOperator(self.matrix * scalar)

    __rmul__ = __mul__


def j_matrix(n: int) -> np.ndarray:
    """Dense matrix of J for dimension n: [[0, I], [-I, 0]]."""
    if n < 1:
        raise ValueError("n must be at least 1")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def apply_j(psi: PhaseVector) -> PhaseVector:
    """Matrix-free action of J: (q, p) -> (p, -q)."""
    return PhaseVector(psi.p, -psi.q)


def j_commutation_defect(a: BlockOperator) -> float:
    """Max-norm of AJ - JA.

    Expanding the product block-wise, AJ - JA has blocks built only from
    A11 - A22 and A12 + A21, so the defect is computed from those two
    differences without materialising J.
    """
    d1 = np.max(np.abs(a.a11 - a.a22))
    d2 = np.max(np.abs(a.a12 + a.a21))
    return float(max(d1, d2))


def is_j_commuting(a: BlockOperator, tol: float = DEFAULT_TOL) -> CheckResult:
    """True iff max-norm of AJ - JA is at most tol."""
    d = j_commutation_defect(a)
    return CheckResult(d <= tol, d)


def symplectic_form(psi1: PhaseVector, psi2: PhaseVector) -> float:
    """Canonical symplectic form w(psi1, psi2) = (psi1, J psi2).

    In coordinates this is dot(p2, q1) - dot(p1, q2); it is antisymmetric
    and vanishes on the diagonal.
    """
    if psi1.n != psi2.n:
        raise ValueError("dimension mismatch between phase vectors")
    return float(psi2.p @ psi1.q - psi1.p @ psi2.q)


def hermitian_product(psi1: PhaseVector, psi2: PhaseVector) -> complex:
    """Hermitian pairing (psi1, psi2) - i * w(psi1, psi2).

    Equals sum_j z1_j * conj(z2_j) for the complex coordinates, hence is
    linear in the first argument and conjugate linear in the second.
    """
    if psi1.n != psi2.n:
        raise ValueError("dimension mismatch between phase vectors")
    real_part = float(psi1.q @ psi2.q + psi1.p @ psi2.p)
    return complex(real_part, -symplectic_form(psi1, psi2))


@dataclass(frozen=True)
class SymplecticForm:
    """Callable wrapper for the symplectic form at fixed dimension n."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")

    def __call__(self, psi1: PhaseVector, psi2: PhaseVector) -> float:
        if psi1.n != self.n or psi2.n != self.n:
            raise ValueError(f"expected phase vectors of dimension n={self.n}")
        return symplectic_form(psi1, psi2)


def real_to_complex(a: BlockOperator, tol: float = DEFAULT_TOL) -> ComplexOperator:
    """Complex image M = A11 - i*A12 of a J-commuting block operator.

    Raises ValueError when the commutation defect exceeds tol, since the
    complex image is only defined on the J-commuting subalgebra.
    """
    check = is_j_commuting(a, tol)
    if not check:
        raise ValueError(
            f"operator does not commute with J (defect {check.defect:.3e} > tol {tol:.1e})"
        )
    return ComplexOperator(a.a11 - 1j * a.a12)


def complex_to_real(m: ComplexOperator) -> BlockOperator:
    """Real block form [[D, S], [-S, D]] with D = Re M, S = -Im M."""
    d = m.matrix.real
    s = -m.matrix.imag
    return BlockOperator.from_pair(d, s)


def poisson_bracket(f1, f2, psi: PhaseVector) -> float:
    """Poisson bracket {f1, f2}(psi) = (grad f1, J grad f2).

    ``f1`` and ``f2`` must expose ``gradient(psi) -> PhaseVector``. In
    (q, p) blocks the bracket reads
    dot(df1/dq, df2/dp) - dot(df2/dq, df1/dp).
    """
    g1 = f1.gradient(psi)
    g2 = f2.gradient(psi)
    return float(g1.q @ g2.p - g2.q @ g1.p)
