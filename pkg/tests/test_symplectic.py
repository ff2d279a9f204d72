"""Tests for the phase-space algebra: J, the symplectic form, the
hermitian product and the real/complex operator dictionary.

Oracle note: expected values for the pairing tests are computed through
plain complex arithmetic on z = q + ip, which is an independent route
from the real block formulas under test.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pcsft.symplectic import (
    BlockOperator,
    ComplexOperator,
    PhaseVector,
    SymplecticForm,
    apply_j,
    complex_to_real,
    hermitian_product,
    is_j_commuting,
    j_commutation_defect,
    j_matrix,
    poisson_bracket,
    real_to_complex,
    symplectic_form,
)

finite_floats = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)


def vec_strategy(n):
    return arrays(np.float64, (n,), elements=finite_floats)


def random_j_commuting(rng, n):
    d = rng.standard_normal((n, n))
    s = rng.standard_normal((n, n))
    return BlockOperator.from_pair(d, s)


class QuadraticForm:
    """f(psi) = 0.5 * (A psi, psi) with analytic gradient A psi (A symmetric).

    Local oracle helper; deliberately independent of the variables module.
    """

    def __init__(self, a: BlockOperator):
        self.a = a

    def value(self, psi: PhaseVector) -> float:
        y = psi.flat()
        return 0.5 * float(y @ self.a.matrix @ y)

    def gradient(self, psi: PhaseVector) -> PhaseVector:
        return self.a.apply(psi)


# ---------------------------------------------------------------------------
# PhaseVector basics
# ---------------------------------------------------------------------------


def test_phase_vector_layout_roundtrip():
    psi = PhaseVector([1.0, 2.0], [3.0, 4.0])
    np.testing.assert_array_equal(psi.flat(), [1.0, 2.0, 3.0, 4.0])
    back = PhaseVector.from_flat(psi.flat())
    np.testing.assert_array_equal(back.q, psi.q)
    np.testing.assert_array_equal(back.p, psi.p)


def test_phase_vector_complex_roundtrip():
    psi = PhaseVector([1.0, -2.0], [0.5, 3.0])
    z = psi.to_complex()
    np.testing.assert_array_equal(z, [1.0 + 0.5j, -2.0 + 3.0j])
    back = PhaseVector.from_complex(z)
    np.testing.assert_array_equal(back.q, psi.q)
    np.testing.assert_array_equal(back.p, psi.p)


def test_phase_vector_rejects_bad_shapes():
    with pytest.raises(ValueError):
        PhaseVector([1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        PhaseVector([], [])
    with pytest.raises(ValueError):
        PhaseVector([np.nan], [0.0])
    with pytest.raises(ValueError):
        PhaseVector.from_flat([1.0, 2.0, 3.0])


def test_phase_vector_is_immutable():
    psi = PhaseVector([1.0], [2.0])
    with pytest.raises(ValueError):
        psi.q[0] = 5.0


# ---------------------------------------------------------------------------
# J itself
# ---------------------------------------------------------------------------


def test_apply_j_example():
    # n = 1: J(1, 0) = (0, -1), i.e. multiplication of 1 by -i.
    out = apply_j(PhaseVector([1.0], [0.0]))
    np.testing.assert_array_equal(out.q, [0.0])
    np.testing.assert_array_equal(out.p, [-1.0])


@pytest.mark.parametrize("n", [1, 2, 5])
def test_j_squares_to_minus_identity(n):
    j = j_matrix(n)
    defect = np.max(np.abs(j @ j + np.eye(2 * n)))
    assert defect <= 1e-14


@pytest.mark.parametrize("n", [1, 3])
def test_apply_j_matches_matrix(n):
    rng = np.random.default_rng(7)
    for _ in range(10):
        psi = PhaseVector.from_flat(rng.standard_normal(2 * n))
        np.testing.assert_allclose(apply_j(psi).flat(), j_matrix(n) @ psi.flat(), atol=1e-14)


def test_j_matrix_is_j_commuting_and_antisymmetric():
    a = BlockOperator(j_matrix(3))
    assert is_j_commuting(a)
    assert j_commutation_defect(a) == 0.0
    assert np.max(np.abs(a.matrix + a.matrix.T)) == 0.0


def test_diag_counterexample_not_j_commuting():
    # diag(1, 2) on n = 1 mixes the blocks: A11 = 1, A22 = 2.
    a = BlockOperator(np.diag([1.0, 2.0]))
    check = is_j_commuting(a)
    assert not check
    assert check.defect == pytest.approx(1.0)


def test_j_commutation_defect_matches_dense_commutator():
    rng = np.random.default_rng(11)
    for n in (1, 2, 4):
        a = BlockOperator(rng.standard_normal((2 * n, 2 * n)))
        dense = np.max(np.abs(a.matrix @ j_matrix(n) - j_matrix(n) @ a.matrix))
        assert j_commutation_defect(a) == pytest.approx(dense, abs=1e-14)


# ---------------------------------------------------------------------------
# Symplectic form and hermitian product
# ---------------------------------------------------------------------------


def test_symplectic_form_frozen_example():
    # w(psi1, psi2) = p2.q1 - p1.q2 ; for psi1 = (1,0), psi2 = (0,1): w = 1.
    psi1 = PhaseVector([1.0], [0.0])
    psi2 = PhaseVector([0.0], [1.0])
    assert symplectic_form(psi1, psi2) == pytest.approx(1.0)
    assert hermitian_product(psi1, psi2) == pytest.approx(-1j)


@given(vec_strategy(3), vec_strategy(3), vec_strategy(3), vec_strategy(3))
@settings(max_examples=60, deadline=None)
def test_symplectic_form_antisymmetry(q1, p1, q2, p2):
    psi1 = PhaseVector(q1, p1)
    psi2 = PhaseVector(q2, p2)
    scale = 1.0 + abs(symplectic_form(psi1, psi2))
    assert abs(symplectic_form(psi1, psi2) + symplectic_form(psi2, psi1)) <= 1e-12 * scale
    assert symplectic_form(psi1, psi1) == 0.0


@given(vec_strategy(2), vec_strategy(2), vec_strategy(2), vec_strategy(2))
@settings(max_examples=60, deadline=None)
def test_hermitian_product_equals_complex_dot(q1, p1, q2, p2):
    psi1 = PhaseVector(q1, p1)
    psi2 = PhaseVector(q2, p2)
    oracle = np.sum(psi1.to_complex() * np.conj(psi2.to_complex()))
    got = hermitian_product(psi1, psi2)
    np.testing.assert_allclose(got, oracle, atol=1e-10 * (1.0 + abs(oracle)))
    # conjugate symmetry and real diagonal
    np.testing.assert_allclose(
        hermitian_product(psi2, psi1), np.conj(got), atol=1e-10 * (1.0 + abs(got))
    )
    diag = hermitian_product(psi1, psi1)
    assert diag.imag == 0.0
    assert diag.real == pytest.approx(psi1.norm_sq())


def test_symplectic_form_via_j():
    # w(psi1, psi2) = (psi1, J psi2) with the Euclidean dot product.
    rng = np.random.default_rng(3)
    for _ in range(20):
        psi1 = PhaseVector.from_flat(rng.standard_normal(6))
        psi2 = PhaseVector.from_flat(rng.standard_normal(6))
        oracle = float(psi1.flat() @ apply_j(psi2).flat())
        assert symplectic_form(psi1, psi2) == pytest.approx(oracle, abs=1e-12)


def test_symplectic_form_object_checks_dimension():
    w = SymplecticForm(2)
    psi = PhaseVector([1.0, 0.0], [0.0, 0.0])
    assert w(psi, psi) == 0.0
    with pytest.raises(ValueError):
        w(PhaseVector([1.0], [0.0]), PhaseVector([1.0], [0.0]))
    with pytest.raises(ValueError):
        symplectic_form(PhaseVector([1.0], [0.0]), psi)


# ---------------------------------------------------------------------------
# Real/complex operator dictionary
# ---------------------------------------------------------------------------


def test_real_to_complex_frozen_example():
    # J itself has blocks D = 0, S = I, so its complex image is -i I.
    m = real_to_complex(BlockOperator(j_matrix(2)))
    np.testing.assert_allclose(m.matrix, -1j * np.eye(2), atol=1e-15)


def test_real_to_complex_rejects_non_j_commuting():
    with pytest.raises(ValueError):
        real_to_complex(BlockOperator(np.diag([1.0, 2.0])))


def test_complex_real_roundtrip():
    rng = np.random.default_rng(5)
    for n in (1, 2, 4):
        m = ComplexOperator(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        back = real_to_complex(complex_to_real(m))
        np.testing.assert_allclose(back.matrix, m.matrix, atol=1e-14)
        a = random_j_commuting(rng, n)
        again = complex_to_real(real_to_complex(a))
        np.testing.assert_allclose(again.matrix, a.matrix, atol=1e-14)


def test_complex_action_matches_block_action():
    rng = np.random.default_rng(9)
    for _ in range(25):
        a = random_j_commuting(rng, 3)
        psi = PhaseVector.from_flat(rng.standard_normal(6))
        via_complex = real_to_complex(a).apply(psi.to_complex())
        via_blocks = a.apply(psi).to_complex()
        np.testing.assert_allclose(via_complex, via_blocks, atol=1e-12)


def test_algebra_isomorphism_products_and_sums():
    rng = np.random.default_rng(13)
    for _ in range(25):
        a = random_j_commuting(rng, 3)
        b = random_j_commuting(rng, 3)
        ma, mb = real_to_complex(a), real_to_complex(b)
        np.testing.assert_allclose(
            real_to_complex(a @ b).matrix, (ma @ mb).matrix, atol=1e-10
        )
        np.testing.assert_allclose(
            real_to_complex(a + b).matrix, (ma + mb).matrix, atol=1e-12
        )


def test_symmetric_iff_hermitian_on_random_pairs():
    # Equivalence of real symmetry and complex hermiticity for J-commuting
    # operators, probed on 100 random pairs (operator, symmetrised operator).
    rng = np.random.default_rng(17)
    for _ in range(100):
        a = random_j_commuting(rng, 2)
        sym = BlockOperator((a.matrix + a.matrix.T) / 2.0)
        # symmetrising preserves J-commutation, and the image is hermitian
        assert is_j_commuting(sym, 1e-10)
        m = real_to_complex(sym)
        assert m.hermiticity_defect() <= 1e-10
        # a generic non-symmetric one must map to a non-hermitian image
        if a.symmetry_defect() > 1e-6:
            assert real_to_complex(a).hermiticity_defect() > 1e-8
        # adjoints agree: transpose maps to conjugate transpose
        np.testing.assert_allclose(
            real_to_complex(a.T).matrix, real_to_complex(a).adjoint().matrix, atol=1e-12
        )


def test_block_operator_accessors():
    a = BlockOperator.from_blocks([[1.0]], [[2.0]], [[3.0]], [[4.0]])
    assert a.n == 1
    assert a.a11[0, 0] == 1.0 and a.a12[0, 0] == 2.0
    assert a.a21[0, 0] == 3.0 and a.a22[0, 0] == 4.0
    with pytest.raises(ValueError):
        BlockOperator(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        a.apply(PhaseVector([1.0, 2.0], [0.0, 0.0]))


# ---------------------------------------------------------------------------
# Poisson bracket
# ---------------------------------------------------------------------------


def test_poisson_bracket_of_quadratic_forms():
    # For f_A = 0.5 (A psi, psi): {f_A, f_B}(psi) = w(A psi, B psi).
    rng = np.random.default_rng(21)
    for _ in range(30):
        a = BlockOperator(_random_symmetric(rng, 2))
        b = BlockOperator(_random_symmetric(rng, 2))
        psi = PhaseVector.from_flat(rng.standard_normal(4))
        got = poisson_bracket(QuadraticForm(a), QuadraticForm(b), psi)
        oracle = symplectic_form(a.apply(psi), b.apply(psi))
        assert got == pytest.approx(oracle, abs=1e-10 * (1.0 + abs(oracle)))


def test_poisson_bracket_canonical_pair():
    # f = q_0, g = p_0 have constant gradients e_q and e_p: {q_0, p_0} = 1.
    class Linear:
        def __init__(self, grad):
            self._g = grad

        def gradient(self, psi):
            return self._g

    n = 2
    e_q = PhaseVector([1.0, 0.0], [0.0, 0.0])
    e_p = PhaseVector([0.0, 0.0], [1.0, 0.0])
    psi = PhaseVector.from_flat(np.arange(4.0) + 1.0)
    assert poisson_bracket(Linear(e_q), Linear(e_p), psi) == pytest.approx(1.0)
    assert poisson_bracket(Linear(e_p), Linear(e_q), psi) == pytest.approx(-1.0)


def _random_symmetric(rng, n):
    x = rng.standard_normal((2 * n, 2 * n))
    return (x + x.T) / 2.0
