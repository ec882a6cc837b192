"""Dense linear-algebra and ODE helpers shared by the other modules.

Everything here works on plain complex numpy arrays.  Operators that act on
function spaces sampled on a grid are represented in "half-weighted"
coordinates: a section s is stored as sqrt(w) * s(points), so the weighted
L2 pairing becomes the ordinary complex dot product and adjoints/Hermiticity
checks are the plain matrix ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def hs_norm(m: np.ndarray) -> float:
    """Hilbert-Schmidt norm sqrt(tr(M* M)) of a square matrix."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"hs_norm expects a square matrix, got shape {m.shape}")
    return float(np.linalg.norm(m, "fro"))


def hermiticity_defect(m: np.ndarray) -> float:
    """max |M - M*| entrywise; 0 for exactly Hermitian input."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def anti_hermiticity_defect(m: np.ndarray) -> float:
    """max |M + M*| entrywise; 0 for exactly anti-Hermitian input."""
    m = np.asarray(m)
    return float(np.max(np.abs(m + m.conj().T))) if m.size else 0.0


def assert_projector(p: np.ndarray, tol: float = 1e-10) -> None:
    """Check idempotence and Hermiticity of a projector matrix."""
    scale = max(1.0, float(np.max(np.abs(p))))
    if hermiticity_defect(p) > tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    if np.max(np.abs(p @ p - p)) > tol * max(1.0, scale * scale):
        raise ValueError("matrix is not idempotent within tolerance")


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights for a fixed integration rule.

    `points` may be any array whose leading axis enumerates nodes (complex
    chart coordinates in this package); `weights` is the matching 1-D real
    array.  Integrating f means (weights * f(points)).sum().
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) != len(self.points):
            raise ValueError("weights must be 1-D and match the nodes")
        if np.any(w <= 0):
            raise ValueError("quadrature weights must be positive")

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.weights * np.asarray(values)))

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))


def orthonormal_columns(frame: np.ndarray, cond_limit: float = 1e8) -> np.ndarray:
    """Orthonormalize frame columns by the inverse square root of their Gram matrix.

    Parameters
    ----------
    frame : (npoints, k) complex array
        Columns are vectors in half-weighted grid coordinates (plain l2
        pairing applies).
    cond_limit : float
        Maximum tolerated Gram condition number; beyond it the frame is
        numerically degenerate and we refuse to proceed.

    Returns
    -------
    (npoints, k) array with orthonormal columns spanning the same space.

    Notes
    -----
    Symmetric (Loewdin) orthonormalization keeps the result as close as
    possible to the input frame, which matters when the input is already
    nearly orthonormal and we want a stable, basis-respecting projector.
    """
    frame = np.asarray(frame)
    gram = frame.conj().T @ frame
    evals, evecs = np.linalg.eigh(gram)
    if evals[0] <= 0 or evals[-1] / evals[0] > cond_limit:
        raise np.linalg.LinAlgError(
            f"frame Gram matrix is ill-conditioned: smallest eigenvalue {evals[0]:.3e}, "
            f"largest {evals[-1]:.3e}"
        )
    inv_sqrt = (evecs * (1.0 / np.sqrt(evals))) @ evecs.conj().T
    return frame @ inv_sqrt


def projector_from_frame(frame: np.ndarray, cond_limit: float = 1e8) -> np.ndarray:
    """Orthogonal projector onto the column span of `frame` (half-weighted coords)."""
    u = orthonormal_columns(frame, cond_limit=cond_limit)
    return u @ u.conj().T


def central_difference(f, t: float, h: float) -> np.ndarray:
    """Symmetric difference quotient (f(t+h) - f(t-h)) / (2h)."""
    if h <= 0:
        raise ValueError("step h must be positive")
    return (np.asarray(f(t + h)) - np.asarray(f(t - h))) / (2.0 * h)


def derivative(f, t: float = 0.0, h: float = 1e-3, richardson: bool = True):
    """Numerical derivative of a vector/matrix valued path.

    With `richardson`, combines the h and h/2 central differences as
    (4 D_{h/2} - D_h) / 3, cancelling the leading O(h^2) error term.
    """
    d_h = central_difference(f, t, h)
    if not richardson:
        return d_h
    d_half = central_difference(f, t, h / 2.0)
    return (4.0 * d_half - d_h) / 3.0


@dataclass(frozen=True)
class OdeStepper:
    """Classical fourth-order Runge-Kutta integrator with a fixed step.

    The right-hand side is supplied per call; state may be any ndarray.
    Local error is O(dt^5), so a unit-time integration carries a global
    O(dt^4) error with a problem-dependent constant (about |c|^5/120 for
    the scalar test equation y' = c y).
    """

    dt: float

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")

    def step(self, rhs, t: float, y: np.ndarray) -> np.ndarray:
        dt = self.dt
        k1 = rhs(t, y)
        k2 = rhs(t + dt / 2.0, y + (dt / 2.0) * k1)
        k3 = rhs(t + dt / 2.0, y + (dt / 2.0) * k2)
        k4 = rhs(t + dt, y + dt * k3)
        return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def propagate(self, rhs, t0: float, y0: np.ndarray, t1: float) -> np.ndarray:
        """Integrate from t0 to t1 with steps of size dt (last step shortened)."""
        if t1 < t0:
            raise ValueError("propagate integrates forward: need t1 >= t0")
        y = np.asarray(y0, dtype=complex)
        nfull, rem = divmod(t1 - t0, self.dt)
        t = t0
        for _ in range(int(round(nfull))):
            y = self.step(rhs, t, y)
            t += self.dt
        if rem > 1e-15 * max(1.0, abs(t1)):
            short = OdeStepper(rem)
            y = short.step(rhs, t, y)
        return y
