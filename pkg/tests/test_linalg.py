import numpy as np
import pytest

from quantcurv.linalg import (
    OdeStepper,
    QuadratureRule,
    anti_hermiticity_defect,
    assert_projector,
    central_difference,
    derivative,
    hermiticity_defect,
    hs_norm,
    orthonormal_columns,
    projector_from_frame,
)


def test_hs_norm_values():
    assert hs_norm(np.eye(3)) == pytest.approx(np.sqrt(3.0), abs=1e-15)
    assert hs_norm(np.array([[0.0, 1.0], [0.0, 0.0]])) == pytest.approx(1.0)
    assert hs_norm(np.zeros((4, 4))) == 0.0
    with pytest.raises(ValueError):
        hs_norm(np.zeros((2, 3)))


def test_hermiticity_defects():
    h = np.array([[1.0, 2.0 + 1j], [2.0 - 1j, -3.0]])
    assert hermiticity_defect(h) == 0.0
    assert anti_hermiticity_defect(1j * h) == 0.0
    assert hermiticity_defect(h + 1e-3 * np.array([[0, 1], [0, 0]])) == pytest.approx(
        1e-3, rel=1e-12
    )


def test_projector_from_frame_single_vector():
    frame = np.array([[1.0], [0.0], [0.0]])
    p = projector_from_frame(frame)
    expect = np.zeros((3, 3))
    expect[0, 0] = 1.0
    assert np.max(np.abs(p - expect)) < 1e-14


def test_projector_from_frame_orthonormal_input_is_fixed():
    rng = np.random.default_rng(11)
    q, _ = np.linalg.qr(rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3)))
    u = orthonormal_columns(q)
    assert np.max(np.abs(u - q)) < 1e-12
    assert np.max(np.abs(u.conj().T @ u - np.eye(3))) < 1e-13


def test_projector_random_frame():
    rng = np.random.default_rng(3)
    frame = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    p = projector_from_frame(frame)
    assert_projector(p)
    assert np.trace(p).real == pytest.approx(2.0, abs=1e-12)
    # projector leaves the frame columns fixed
    assert np.max(np.abs(p @ frame - frame)) < 1e-12


def test_projector_rank_deficient_frame_rejected():
    frame = np.ones((5, 2))
    with pytest.raises(np.linalg.LinAlgError):
        projector_from_frame(frame)


def test_assert_projector_catches_defects():
    assert_projector(np.diag([1.0, 1.0, 0.0]))
    with pytest.raises(ValueError):
        assert_projector(np.diag([1.0, 0.5]))
    with pytest.raises(ValueError):
        assert_projector(np.array([[1.0, 1e-3], [0.0, 0.0]]))


def test_quadrature_rule_basics():
    rule = QuadratureRule(points=np.array([0.0, 1.0, 2.0]), weights=np.array([1.0, 2.0, 1.0]))
    assert rule.total_mass == pytest.approx(4.0)
    assert rule.integrate(np.array([1.0, 1.0, 1.0])) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        QuadratureRule(points=np.array([0.0]), weights=np.array([-1.0]))


def test_central_difference_linear_exact():
    d = central_difference(lambda t: np.array([2.0 * t, -t]), 0.3, 0.1)
    assert np.max(np.abs(d - np.array([2.0, -1.0]))) < 1e-13


def test_central_difference_even_function_vanishes():
    assert abs(central_difference(lambda t: np.array(t * t), 0.0, 0.05)) < 1e-15


def test_central_difference_matrix_exponential_curve():
    a = np.array([[1.0]])
    d = central_difference(lambda t: np.asarray(np.exp(a * t)), 0.0, 1e-3)
    assert abs(d[0, 0] - 1.0) < 1e-6


def test_central_difference_second_order():
    f = lambda t: np.exp(np.array([[2.0]]) * t)
    e1 = abs(central_difference(f, 0.0, 1e-2)[0, 0] - 2.0)
    e2 = abs(central_difference(f, 0.0, 5e-3)[0, 0] - 2.0)
    assert e1 / e2 > 3.5  # O(h^2): halving h should cut the error ~4x


def test_derivative_richardson_beats_plain():
    f = lambda t: np.array(np.exp(3.0 * t))
    plain = abs(derivative(f, 0.0, h=1e-2, richardson=False) - 3.0)
    rich = abs(derivative(f, 0.0, h=1e-2, richardson=True) - 3.0)
    assert rich < plain * 1e-2


def test_ode_stepper_scalar_growth():
    # global RK4 error for y' = c y over unit time is about (c^5/120) dt^4
    dt = 1e-2
    for c, bound in [(4.0, 10.0), (5.0, 27.0)]:
        y = OdeStepper(dt).propagate(lambda t, y: c * y, 0.0, np.array(1.0 + 0j), 1.0)
        rel = abs(y - np.exp(c)) / np.exp(c)
        assert rel <= bound * dt**4


def test_ode_stepper_norm_preservation():
    # y' = iHy with Hermitian H preserves the norm up to the integrator error
    rng = np.random.default_rng(5)
    h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = (h + h.conj().T) / 2.0
    h *= 2.0 / np.linalg.norm(h, 2)
    y0 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    y0 /= np.linalg.norm(y0)
    dt = 1e-2
    y1 = OdeStepper(dt).propagate(lambda t, y: 1j * (h @ y), 0.0, y0, 1.0)
    assert abs(np.linalg.norm(y1) - 1.0) <= 10.0 * dt**4


def test_ode_stepper_fourth_order():
    exact = np.exp(2.0)
    errs = []
    for dt in (2e-2, 1e-2):
        y = OdeStepper(dt).propagate(lambda t, y: 2.0 * y, 0.0, np.array(1.0 + 0j), 1.0)
        errs.append(abs(y - exact))
    assert errs[0] / errs[1] > 12.0  # O(dt^4): halving dt should cut error ~16x


def test_ode_stepper_partial_last_step():
    # t1 - t0 not a multiple of dt exercises the shortened last step
    y = OdeStepper(0.3).propagate(lambda t, y: y, 0.0, np.array(1.0 + 0j), 1.0)
    assert abs(y - np.e) < 1e-3


def test_ode_stepper_rejects_bad_args():
    with pytest.raises(ValueError):
        OdeStepper(0.0)
    with pytest.raises(ValueError):
        OdeStepper(0.1).propagate(lambda t, y: y, 1.0, np.array(1.0), 0.0)
