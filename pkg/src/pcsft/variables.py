"""Classical variables: real functions of the phase-space point.

Two representations coexist behind one interface:

* structured: a sum of powers of quadratic forms,
  f(psi) = sum_i c_i * (A_i psi, psi)^{k_i}, with every A_i symmetric
  and J-commuting. Values, gradients and the Hessian at the origin are
  analytic, and membership in the projectable class (f(0) = 0, even,
  J-invariant) holds by construction.
* black box: value and optional gradient callbacks operating on batches
  of flattened phase points. Class membership can only be screened by
  random probes, and the Hessian at the origin falls back to central
  finite differences.

Batch convention used throughout: a batch of m phase points is an
(m, 2n) array whose rows are ``PhaseVector.flat()`` layouts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .symplectic import (
    DEFAULT_TOL,
    BlockOperator,
    CheckResult,
    PhaseVector,
    is_j_commuting,
    j_matrix,
)

__all__ = ["QuadraticTerm", "ClassicalVariable", "screen_variable"]


@dataclass(frozen=True)
class QuadraticTerm:
    """One monomial c * (A psi, psi)^k of a structured variable."""

    coefficient: float
    operator: BlockOperator
    power: int

    def __post_init__(self):
        if self.power < 1:
            raise ValueError("power must be at least 1 (variables vanish at the origin)")
        if not self.operator.is_symmetric(DEFAULT_TOL):
            raise ValueError("term operator must be symmetric")
        if not is_j_commuting(self.operator, DEFAULT_TOL):
            raise ValueError("term operator must commute with J")


class ClassicalVariable:
    """Real-valued function on phase space with batch evaluation.

    Build with :meth:`from_terms` / :meth:`quadratic` / :meth:`polynomial`
    for the structured representation, or :meth:`from_callbacks` for a
    black box.
    """

    def __init__(self, *, terms=None, value_fn=None, gradient_fn=None, n=None):
        if (terms is None) == (value_fn is None):
            raise ValueError("provide exactly one of terms or value_fn")
        if terms is not None:
            terms = tuple(terms)
            if not terms:
                raise ValueError("terms must be nonempty")
            dims = {t.operator.n for t in terms}
            if len(dims) > 1:
                raise ValueError("all term operators must share one dimension")
            n = dims.pop()
        else:
            if n is None:
                raise ValueError("black-box variables must declare the dimension n")
        self._terms = terms
        self._value_fn = value_fn
        self._gradient_fn = gradient_fn
        self._n = int(n)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_terms(cls, terms: Sequence[QuadraticTerm]) -> "ClassicalVariable":
        return cls(terms=terms)

    @classmethod
    def quadratic(cls, a: BlockOperator, coefficient: float = 0.5) -> "ClassicalVariable":
        """f(psi) = coefficient * (A psi, psi); default is the energy form."""
        return cls(terms=[QuadraticTerm(coefficient, a, 1)])

    @classmethod
    def polynomial(cls, a: BlockOperator, coefficients: Sequence[float]) -> "ClassicalVariable":
        """f(psi) = sum_k coefficients[k-1] * (A psi, psi)^k."""
        terms = [
            QuadraticTerm(c, a, k)
            for k, c in enumerate(coefficients, start=1)
            if c != 0.0
        ]
        if not terms:
            raise ValueError("polynomial needs at least one nonzero coefficient")
        return cls(terms=terms)

    @classmethod
    def from_callbacks(
        cls,
        value: Callable[[np.ndarray], np.ndarray],
        gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        *,
        n: int,
    ) -> "ClassicalVariable":
        """Black-box variable; callbacks take (..., 2n) arrays of flat points."""
        return cls(value_fn=value, gradient_fn=gradient, n=n)

    # -- structure ----------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self):
        """Structured terms, or None for a black box."""
        return self._terms

    @property
    def is_structured(self) -> bool:
        return self._terms is not None

    @property
    def has_gradient(self) -> bool:
        return self._terms is not None or self._gradient_fn is not None

    # -- evaluation ---------------------------------------------------

    def values(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate on a batch; pts has shape (..., 2n)."""
        pts = self._check_batch(pts)
        if self._terms is not None:
            out = np.zeros(pts.shape[:-1])
            for t in self._terms:
                form = np.einsum("...i,ij,...j->...", pts, t.operator.matrix, pts)
                out += t.coefficient * form**t.power
            return out
        return np.asarray(self._value_fn(pts), dtype=float)

    def value(self, psi: PhaseVector) -> float:
        return float(self.values(psi.flat()[None, :])[0])

    def gradients(self, pts: np.ndarray) -> np.ndarray:
        pts = self._check_batch(pts)
        if self._terms is not None:
            out = np.zeros_like(pts)
            for t in self._terms:
                a_pts = pts @ t.operator.matrix  # symmetric, so A psi row-wise
                if t.power == 1:
                    out += (2.0 * t.coefficient) * a_pts
                else:
                    form = np.einsum("...i,...i->...", pts, a_pts)
                    out += (2.0 * t.coefficient * t.power) * form[..., None] ** (
                        t.power - 1
                    ) * a_pts
            return out
        if self._gradient_fn is None:
            raise ValueError("gradient unavailable: black-box variable without callback")
        return np.asarray(self._gradient_fn(pts), dtype=float)

    def gradient(self, psi: PhaseVector) -> PhaseVector:
        return PhaseVector.from_flat(self.gradients(psi.flat()[None, :])[0])

    # -- calculus at the origin ----------------------------------------

    def hessian_at_zero(self, step: float | None = None) -> BlockOperator:
        """Second derivative matrix f''(0).

        Analytic for structured variables (only power-1 terms contribute).
        Black boxes use central differences of the gradient when a
        gradient callback exists, otherwise second differences of values;
        default step 1e-4 (round-off in the double difference scales with
        the values near the origin, which vanish for this class, so
        truncation dominates and a small step is safe). The result is
        symmetrised.
        """
        dim = 2 * self._n
        if self._terms is not None:
            h = np.zeros((dim, dim))
            for t in self._terms:
                if t.power == 1:
                    h += 2.0 * t.coefficient * t.operator.matrix
            return BlockOperator(h)
        if self._gradient_fn is not None:
            step = 1e-4 if step is None else step
            probes = np.concatenate([np.eye(dim) * step, -np.eye(dim) * step])
            grads = self.gradients(probes)
            h = (grads[:dim] - grads[dim:]).T / (2.0 * step)
        else:
            step = 1e-4 if step is None else step
            h = np.empty((dim, dim))
            eye = np.eye(dim) * step
            for i in range(dim):
                for j in range(i, dim):
                    pts = np.stack(
                        [
                            eye[i] + eye[j],
                            eye[i] - eye[j],
                            -eye[i] + eye[j],
                            -eye[i] - eye[j],
                        ]
                    )
                    f = self.values(pts)
                    h[i, j] = h[j, i] = (f[0] - f[1] - f[2] + f[3]) / (4.0 * step**2)
        return BlockOperator((h + h.T) / 2.0)

    # -- algebra --------------------------------------------------------

    def scaled(self, factor: float) -> "ClassicalVariable":
        if self._terms is not None:
            return ClassicalVariable(
                terms=[QuadraticTerm(factor * t.coefficient, t.operator, t.power) for t in self._terms]
            )
        value_fn = self._value_fn
        grad_fn = self._gradient_fn
        return ClassicalVariable(
            value_fn=lambda pts: factor * np.asarray(value_fn(pts), dtype=float),
            gradient_fn=None
            if grad_fn is None
            else (lambda pts: factor * np.asarray(grad_fn(pts), dtype=float)),
            n=self._n,
        )

    def __add__(self, other: "ClassicalVariable") -> "ClassicalVariable":
        if not isinstance(other, ClassicalVariable):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("dimension mismatch between variables")
        if self._terms is not None and other._terms is not None:
            return ClassicalVariable(terms=self._terms + other._terms)
        left, right = self, other
        grad = None
        if left.has_gradient and right.has_gradient:
            grad = lambda pts: left.gradients(pts) + right.gradients(pts)
        return ClassicalVariable(
            value_fn=lambda pts: left.values(pts) + right.values(pts),
            gradient_fn=grad,
            n=self.n,
        )

    def __mul__(self, factor: float) -> "ClassicalVariable":
        return self.scaled(float(factor))

    __rmul__ = __mul__

    # -- helpers ---------------------------------------------------------

    def _check_batch(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if pts.shape[-1] != 2 * self._n:
            raise ValueError(
                f"batch last axis must be 2n = {2 * self._n}, got {pts.shape[-1]}"
            )
        return pts


def screen_variable(
    f: ClassicalVariable,
    seed: int = 0,
    probes: int = 64,
    tol: float = 1e-8,
    scale: float = 1.0,
) -> dict:
    """Randomised screening of projectable-class membership.

    Checks, on random probe points of radius ~ ``scale``:

    * ``vanishes_at_origin``: |f(0)| small,
    * ``even``: f(-psi) = f(psi),
    * ``j_invariant``: f(exp(tJ) psi) = f(psi) at random angles.

    For structured variables all three hold by construction; this
    function exists for black boxes, where a pass is evidence rather
    than proof. Defects are maxima over probes, relative to the probe
    value scale.
    """
    rng = np.random.default_rng(seed)
    dim = 2 * f.n
    pts = rng.standard_normal((probes, dim)) * scale
    vals = f.values(pts)
    ref = float(np.max(np.abs(vals))) + 1.0

    at_zero = abs(float(f.values(np.zeros((1, dim)))[0]))
    even_defect = float(np.max(np.abs(f.values(-pts) - vals)))

    thetas = rng.uniform(0.0, 2.0 * np.pi, size=probes)
    j = j_matrix(f.n)
    rotated = np.empty_like(pts)
    for k, theta in enumerate(thetas):
        # exp(theta J) = cos(theta) I + sin(theta) J, since J^2 = -I
        rot = np.cos(theta) * np.eye(dim) + np.sin(theta) * j
        rotated[k] = rot @ pts[k]
    rot_defect = float(np.max(np.abs(f.values(rotated) - vals)))

    return {
        "vanishes_at_origin": CheckResult(at_zero <= tol * ref, at_zero),
        "even": CheckResult(even_defect <= tol * ref, even_defect),
        "j_invariant": CheckResult(rot_defect <= tol * ref, rot_defect),
    }
