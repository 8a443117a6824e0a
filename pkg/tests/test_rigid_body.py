import numpy as np
import pytest
from scipy.linalg import solve_sylvester
from scipy.stats import ortho_group

from mrbctl.errors import GenericityError, InvalidInputError, ValidationError
from mrbctl.lie_so_n import SkewMatrix, basis_element, commutator, index_pairs, inner, random_skew
from mrbctl.rigid_body import (
    body_from_eigenvalues,
    euler_drift,
    inertia_apply,
    inertia_inverse,
    is_principal_axis,
    is_steady,
    make_body,
    random_body,
    steady_residual,
)


def theta(r, s, n):
    return basis_element(r, s, n)


def test_diagonal_body_is_exact(body123):
    np.testing.assert_array_equal(body123.S, np.eye(3))
    np.testing.assert_array_equal(body123.eigenvalues, [1, 2, 3])
    assert body123.is_diagonal


def test_unsorted_diagonal_is_permuted():
    b = make_body(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_array_equal(b.eigenvalues, [1, 2, 3])
    np.testing.assert_array_equal(b.S @ np.diag(b.eigenvalues) @ b.S.T, b.C)


@pytest.mark.parametrize("c", [np.diag([1.0, 1.0, 2.0]), np.diag([0.0, 1.0, 2.0]), np.diag([-1.0, 1.0, 2.0])])
def test_genericity_errors(c):
    with pytest.raises(GenericityError):
        make_body(c)


def test_rejects_asymmetric_and_small():
    with pytest.raises(ValidationError):
        make_body([[1.0, 0.1, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]])
    with pytest.raises(ValidationError):
        make_body(np.eye(2))


def test_recovers_known_factors(rng):
    q = ortho_group.rvs(4, random_state=rng)
    b = make_body(q.T @ np.diag([1.0, 2.0, 4.0, 7.0]) @ q)
    np.testing.assert_allclose(b.eigenvalues, [1, 2, 4, 7], atol=1e-9)
    np.testing.assert_allclose(b.S @ np.diag(b.eigenvalues) @ b.S.T, b.C, atol=1e-10)
    np.testing.assert_allclose(b.S.T @ b.S, np.eye(4), atol=1e-12)
    # sign convention: first non-negligible entry of each column is positive
    for col in b.S.T:
        assert col[np.argmax(np.abs(col) > 1e-12)] > 0


def test_inertia_apply_diag123(body123):
    np.testing.assert_array_equal(inertia_apply(body123, theta(1, 3, 3)).matrix, 4 * theta(1, 3, 3).matrix)
    lam = body123.eigenvalues
    for r, s in index_pairs(3):
        t = theta(r, s, 3)
        oracle = t.matrix @ body123.C + body123.C @ t.matrix
        np.testing.assert_array_equal(oracle, (lam[r - 1] + lam[s - 1]) * t.matrix)
        np.testing.assert_array_equal(inertia_apply(body123, t).matrix, oracle)
    assert inertia_apply(body123, SkewMatrix.zeros(3)).norm() == 0


def test_inertia_inverse_examples(body123, rng):
    np.testing.assert_array_equal(inertia_inverse(body123, 4 * theta(1, 3, 3)).matrix, theta(1, 3, 3).matrix)
    assert inertia_inverse(body123, SkewMatrix.zeros(3)).norm() == 0
    b = random_body(5, rng)
    a = random_skew(5, rng)
    assert inertia_inverse(b, inertia_apply(b, a)).allclose(a, 1e-10)
    m = random_skew(5, rng)
    oracle = solve_sylvester(b.C, b.C, m.matrix)
    np.testing.assert_allclose(inertia_inverse(b, m).matrix, oracle, atol=1e-12)


def test_spectral_characterization_general(rng):
    b = random_body(5, rng)
    for (r, s), ax in zip(index_pairs(5), b.axes):
        mu = b.eigenvalues[r - 1] + b.eigenvalues[s - 1]
        assert inertia_apply(b, ax).allclose(mu * ax, 1e-10)


def test_inertia_is_self_adjoint(rng):
    for n in (3, 5, 7):
        b = random_body(n, rng)
        x, y = random_skew(n, rng), random_skew(n, rng)
        assert abs(inner(inertia_apply(b, x), y) - inner(x, inertia_apply(b, y))) <= 1e-12


def test_euler_drift_forms_agree(rng):
    b = random_body(4, rng)
    for _ in range(5):
        w = random_skew(4, rng)
        other = inertia_inverse(b, commutator(inertia_apply(b, w), w))
        assert euler_drift(b, w).allclose(other, 1e-11)


def test_axes_are_steady_and_driftless(rng):
    for n in range(3, 9):
        b = random_body(n, rng)
        for ax in b.axes:
            assert euler_drift(b, ax).norm() <= 1e-12
            assert steady_residual(b, ax) <= 1e-12
            assert is_principal_axis(b, ax)[0]


def test_block_witness(body1234):
    w = theta(1, 2, 4) + theta(3, 4, 4)
    assert euler_drift(body1234, w).norm() == 0.0
    assert steady_residual(body1234, w) == 0.0
    principal, mu = is_principal_axis(body1234, w)
    assert not principal and mu == pytest.approx(5.0)
    assert is_steady(body1234, w)


def test_non_steady_example(body123):
    g = theta(1, 2, 3) + theta(2, 3, 3)
    # G^2 has off-diagonal entry -1 at (1,3); [C, G^2] = +-2 there
    assert steady_residual(body123, g) == pytest.approx(2 * np.sqrt(2))
    assert not is_principal_axis(body123, g)[0]
    assert not is_steady(body123, g)


def test_principal_axis_mu(body123):
    ok, mu = is_principal_axis(body123, theta(1, 3, 3))
    assert ok and mu == 4.0
    with pytest.raises(InvalidInputError):
        is_principal_axis(body123, SkewMatrix.zeros(3))


def test_beta_tensor_matches_drift(rng):
    b = random_body(5, rng)
    w = random_skew(5, rng)
    x = w.coords
    f = 0.5 * np.einsum("oij,i,j->o", b.beta_tensor, x, x)
    np.testing.assert_allclose(f, euler_drift(b, w).coords, atol=1e-14)
    np.testing.assert_array_equal(b.beta_tensor, b.beta_tensor.transpose(0, 2, 1))


def test_body_from_eigenvalues_with_frame(rng):
    s = ortho_group.rvs(3, random_state=rng)
    b = body_from_eigenvalues([1.0, 2.0, 3.0], s)
    np.testing.assert_allclose(b.eigenvalues, [1, 2, 3], atol=1e-12)
