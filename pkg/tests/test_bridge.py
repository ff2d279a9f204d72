"""Tests for the classical-to-quantum projection layer.

Closed-form oracle used throughout: for the isotropic dispersion-alpha
measure on n = 1 (per-axis variance alpha/2), the squared radius
r^2 = q^2 + p^2 has E[r^2] = alpha and E[r^4] = 2 alpha^2. Hence the
quartic benchmark f = (r^2 + r^4)/2 has amplified mean 1/2 + alpha,
while its projected operator is 1/2, so the correspondence error is
exactly alpha: slope one on a log-log plot.
"""

import json

import numpy as np
import pytest

from pcsft.bridge import (
    DEFAULT_ALPHA_GRID,
    alpha_scan,
    amplify,
    check_linearity,
    classical_average,
    project_state,
    project_variable,
    quantum_average,
    von_neumann_evolve,
)
from pcsft.dynamics import QuadraticHamiltonian, linear_flow
from pcsft.gaussian import (
    DensityOperator,
    GaussianState,
    from_complex_covariance,
    pure_state_measure,
    pushforward,
    quadratic_average,
)
from pcsft.symplectic import BlockOperator, ComplexOperator, real_to_complex
from pcsft.variables import ClassicalVariable


def admissible_operator(rng, n):
    d = rng.standard_normal((n, n))
    d = (d + d.T) / 2
    s = rng.standard_normal((n, n))
    s = (s - s.T) / 2
    return BlockOperator.from_pair(d, s)


def quartic_benchmark():
    return ClassicalVariable.polynomial(BlockOperator(np.eye(2)), [0.5, 0.5])


# ---------------------------------------------------------------------------
# State projection
# ---------------------------------------------------------------------------


def test_project_isotropic_state():
    d = project_state(GaussianState.isotropic(3, 0.05), alpha=0.05)
    np.testing.assert_allclose(d.matrix, np.eye(3) / 3, atol=1e-14)


def test_project_pure_state_measure():
    rng = np.random.default_rng(0)
    psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    psi /= np.linalg.norm(psi)
    d = project_state(pure_state_measure(psi, 0.01))
    np.testing.assert_allclose(d.matrix, np.outer(psi, psi.conj()), atol=1e-12)
    assert d.purity() == pytest.approx(1.0, abs=1e-12)


def test_project_state_validation():
    rho = GaussianState.isotropic(2, 0.1)
    with pytest.raises(ValueError):
        project_state(rho, alpha=0.2)
    with pytest.raises(ValueError):
        project_state(GaussianState(np.zeros((2, 2))))


# ---------------------------------------------------------------------------
# Variable projection
# ---------------------------------------------------------------------------


def test_project_quadratic_variable():
    rng = np.random.default_rng(1)
    a = admissible_operator(rng, 3)
    f = ClassicalVariable.quadratic(a)  # 0.5 (A psi, psi), Hessian = A
    np.testing.assert_allclose(
        project_variable(f).matrix, real_to_complex(a).matrix / 2, atol=1e-12
    )


def test_project_black_box_variable():
    # r^2 as a black box: Hessian 2I, operator image I
    f = ClassicalVariable.from_callbacks(
        lambda pts: np.sum(pts**2, axis=-1),
        lambda pts: 2.0 * pts,
        n=2,
    )
    np.testing.assert_allclose(project_variable(f).matrix, np.eye(2), atol=1e-8)


def test_project_rejects_non_invariant_black_box():
    f = ClassicalVariable.from_callbacks(lambda pts: pts[..., 0] ** 2, n=1)
    with pytest.raises(ValueError, match="j_invariant"):
        project_variable(f)
    # with screening disabled the Hessian check still catches it
    with pytest.raises(ValueError):
        project_variable(f, validate=False)


def test_exactness_for_quadratic_variables():
    # normalised classical mean equals the quantum average identically
    rng = np.random.default_rng(2)
    n, alpha = 3, 0.02
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    shape = from_complex_covariance(ComplexOperator(x @ x.conj().T))
    rho = GaussianState(shape.covariance * (alpha / shape.alpha))
    a = admissible_operator(rng, n)
    f = ClassicalVariable.quadratic(a)
    classical = 0.5 * quadratic_average(rho, a) / alpha
    quantum = quantum_average(project_state(rho, alpha=alpha), project_variable(f))
    assert classical == pytest.approx(quantum, rel=1e-12)


def test_amplify_scales_values():
    f = quartic_benchmark()
    g = amplify(f, 0.25)
    pts = np.random.default_rng(3).standard_normal((5, 2))
    np.testing.assert_allclose(g.values(pts), f.values(pts) / 0.25, rtol=1e-14)
    with pytest.raises(ValueError):
        amplify(f, 0.0)


def test_check_linearity():
    rng = np.random.default_rng(4)
    f1 = ClassicalVariable.quadratic(admissible_operator(rng, 2))
    f2 = ClassicalVariable.polynomial(admissible_operator(rng, 2), [0.3, 0.2])
    f3 = ClassicalVariable.from_callbacks(f2.values, f2.gradients, n=2)
    assert check_linearity([f1, f2], [2.0, -1.5])
    assert check_linearity([f1, f3], [1.0, 1.0])
    with pytest.raises(ValueError):
        check_linearity([f1], [1.0, 2.0])


# ---------------------------------------------------------------------------
# Averages
# ---------------------------------------------------------------------------


def test_classical_average_matches_exact_quadratic():
    rng = np.random.default_rng(5)
    rho = from_complex_covariance(
        ComplexOperator(np.diag([0.4, 0.1]).astype(complex))
    )
    a = admissible_operator(rng, 2)
    f = ClassicalVariable.quadratic(a)
    exact = 0.5 * quadratic_average(rho, a)
    est = classical_average(f, rho, seed=6, count=100_000)
    assert abs(est.mean - exact) <= 4 * est.stderr
    assert est.count == 100_000


def test_classical_average_is_deterministic():
    rho = GaussianState.isotropic(1, 1.0)
    f = quartic_benchmark()
    a = classical_average(f, rho, seed=7, count=70_000)  # crosses chunk boundary
    b = classical_average(f, rho, seed=7, count=70_000)
    assert a == b
    c = classical_average(f, rho, seed=8, count=70_000)
    assert a.mean != c.mean
    with pytest.raises(ValueError):
        classical_average(f, rho, seed=7, count=1)


def test_quantum_average_basics():
    a = ComplexOperator(np.diag([1.0, 3.0]).astype(complex))
    assert quantum_average(DensityOperator.maximally_mixed(2), a) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        quantum_average(DensityOperator.maximally_mixed(2), ComplexOperator(np.array([[1j, 0], [0, 0]])))
    with pytest.raises(ValueError):
        quantum_average(DensityOperator.maximally_mixed(3), a)


# ---------------------------------------------------------------------------
# Unitary evolution of density operators
# ---------------------------------------------------------------------------


def test_von_neumann_ode_and_purity():
    rng = np.random.default_rng(8)
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    d = DensityOperator((x @ x.conj().T) / np.real(np.trace(x @ x.conj().T)))
    hm = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    m = ComplexOperator((hm + hm.conj().T) / 2)
    eps = 1e-6
    diff = (von_neumann_evolve(d, m, eps).matrix - von_neumann_evolve(d, m, -eps).matrix) / (
        2 * eps
    )
    commutator = 1j * (d.matrix @ m.matrix - m.matrix @ d.matrix)
    np.testing.assert_allclose(diff, commutator, atol=1e-6)
    evolved = von_neumann_evolve(d, m, 1.3)
    assert evolved.purity() == pytest.approx(d.purity(), abs=1e-10)


def test_projection_commutes_with_evolution():
    # push the measure through exp(JHt), or evolve the density operator:
    # same quantum state
    rng = np.random.default_rng(9)
    n, alpha, t = 2, 0.05, 0.9
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    shape = from_complex_covariance(ComplexOperator(x @ x.conj().T))
    rho = GaussianState(shape.covariance * (alpha / shape.alpha))
    h = QuadraticHamiltonian(admissible_operator(rng, n))
    m = real_to_complex(h.operator)

    via_classical = project_state(pushforward(rho, linear_flow(h, t)), alpha=alpha)
    via_quantum = von_neumann_evolve(project_state(rho, alpha=alpha), m, t)
    assert np.max(np.abs(via_classical.matrix - via_quantum.matrix)) <= 1e-9


# ---------------------------------------------------------------------------
# Alpha scan
# ---------------------------------------------------------------------------


def test_alpha_scan_quartic_benchmark():
    report = alpha_scan(
        quartic_benchmark(),
        GaussianState.isotropic(1, 1.0),
        alphas=DEFAULT_ALPHA_GRID,
        seed=11,
        count=20_000,
    )
    assert report.quantum_value == pytest.approx(0.5, abs=1e-12)
    for alpha, mean, se, err, err_se in zip(
        report.alphas,
        report.classical_means,
        report.classical_stderrs,
        report.errors,
        report.error_stderrs,
    ):
        assert abs(mean - (0.5 + alpha)) <= 4 * se
        assert abs(err - alpha) <= 4 * err_se
    assert report.fit_points == len(report.alphas)
    assert 0.9 <= report.slope <= 1.1


def test_alpha_scan_quadratic_variable_has_no_error_signal():
    f = ClassicalVariable.quadratic(BlockOperator(np.eye(2)))
    report = alpha_scan(
        f, GaussianState.isotropic(1, 1.0), alphas=(1e-1, 1e-2), seed=12, count=5_000
    )
    assert report.errors == (0.0, 0.0)
    assert report.fit_points == 0
    assert np.isnan(report.slope)


def test_alpha_scan_determinism_and_serialisation(tmp_path):
    f = quartic_benchmark()
    shape = GaussianState.isotropic(1, 1.0)
    r1 = alpha_scan(f, shape, alphas=(0.1, 0.01), seed=13, count=5_000)
    r2 = alpha_scan(f, shape, alphas=(0.1, 0.01), seed=13, count=5_000)
    assert r1.to_json() == r2.to_json()
    payload = json.loads(r1.to_json())
    assert payload["conventions"]
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    r1.to_csv(p1)
    r2.to_csv(p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_text().splitlines()[0] == (
        "alpha,classical_mean,classical_stderr,error,error_stderr"
    )


def test_alpha_scan_validation():
    f = quartic_benchmark()
    shape = GaussianState.isotropic(1, 1.0)
    with pytest.raises(ValueError):
        alpha_scan(f, shape, alphas=(), seed=0, count=100)
    with pytest.raises(ValueError):
        alpha_scan(f, shape, alphas=(0.1, -0.1), seed=0, count=100)
    with pytest.raises(ValueError):
        alpha_scan(f, GaussianState(np.zeros((2, 2))), seed=0, count=100)
