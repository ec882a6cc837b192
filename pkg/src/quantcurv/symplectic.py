"""Linear symplectic algebra on R^{2n} = C^n.

Coordinates are ordered (x_1..x_n, y_1..y_n), z_j = x_j + i y_j.  The
symplectic form is om(u, v) = u^T sigma^T v with the block matrix
sigma = [[0, -I], [I, 0]], so om(e_{x_j}, e_{y_j}) = 1.

A real quadratic Hamiltonian is stored through its generator X in sp(n, R):

    H(v) = (1/2) om(v, X v) = (1/2) v^T sigma^T X v.

The Hamiltonian vector field of H (fixed by contracting it into om as
xi . om = dH, equivalently xi = (dH/dy, -dH/dx)) is then v -> -X v, and the
bracket {H1, H2} = om(xi_{H1}, xi_{H2}) has generator [X2, X1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "standard_symplectic",
    "standard_complex_structure",
    "assert_sp_element",
    "cartan_split",
    "QuadraticHamiltonian",
    "hamiltonian_from_form",
    "poisson_bracket",
    "decompose_quadratic",
    "p_plus_basis",
    "p_minus_basis",
    "omega_pairing",
    "assert_compatible_structure",
    "tangent_from_generator",
    "assert_tangent_at",
    "chi_symbol",
]


def standard_symplectic(n: int) -> np.ndarray:
    """Block matrix sigma = [[0, -I_n], [I_n, 0]]."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def standard_complex_structure(n: int) -> np.ndarray:
    """Multiplication by i on R^{2n}; numerically equal to sigma."""
    return standard_symplectic(n)


def _dim_n(x: np.ndarray) -> int:
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1] or x.shape[0] % 2:
        raise ValueError(f"expected a 2n x 2n matrix, got shape {x.shape}")
    return x.shape[0] // 2


def assert_sp_element(x: np.ndarray, tol: float = 1e-12) -> None:
    """Check the Lie-algebra condition X^T sigma + sigma X = 0."""
    n = _dim_n(x)
    sigma = standard_symplectic(n)
    defect = np.max(np.abs(x.T @ sigma + sigma @ x))
    scale = max(1.0, float(np.max(np.abs(x))))
    if defect > tol * scale:
        raise ValueError(f"matrix is not in sp({n}, R): defect {defect:.3e}")


def cartan_split(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split X in sp(n, R) into antisymmetric and symmetric parts.

    Returns (k, p) with k = (X - X^T)/2 and p = (X + X^T)/2.  Both parts stay
    in sp(n, R); k generates the unitary subgroup (stabilizer of the standard
    complex structure) and p spans the directions that genuinely deform it.
    """
    x = np.asarray(x, dtype=float)
    assert_sp_element(x)
    k = 0.5 * (x - x.T)
    p = 0.5 * (x + x.T)
    return k, p


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """Real quadratic Hamiltonian represented by its sp(n, R) generator."""

    generator: np.ndarray

    def __post_init__(self):
        gen = np.asarray(self.generator, dtype=float)
        assert_sp_element(gen)
        object.__setattr__(self, "generator", gen)

    @property
    def n(self) -> int:
        return self.generator.shape[0] // 2

    def value(self, v: np.ndarray) -> float:
        """H(v) = (1/2) v^T sigma^T X v."""
        sigma = standard_symplectic(self.n)
        v = np.asarray(v, dtype=float)
        return 0.5 * float(v @ (sigma.T @ self.generator @ v))

    def form_matrix(self) -> np.ndarray:
        """Symmetric S with H(v) = v^T S v."""
        sigma = standard_symplectic(self.n)
        s = 0.5 * sigma.T @ self.generator
        return 0.5 * (s + s.T)

    def vector_field(self, v: np.ndarray) -> np.ndarray:
        """Hamiltonian field xi_H(v) = (dH/dy, -dH/dx) = -X v."""
        return -self.generator @ np.asarray(v, dtype=float)

    def gradient(self, v: np.ndarray) -> np.ndarray:
        return 2.0 * self.form_matrix() @ np.asarray(v, dtype=float)


def hamiltonian_from_form(s: np.ndarray) -> QuadraticHamiltonian:
    """Hamiltonian with H(v) = v^T S v for symmetric S; generator X = 2 sigma S."""
    s = np.asarray(s, dtype=float)
    n = _dim_n(s)
    if np.max(np.abs(s - s.T)) > 1e-12 * max(1.0, np.max(np.abs(s))):
        raise ValueError("quadratic form matrix must be symmetric")
    return QuadraticHamiltonian(2.0 * standard_symplectic(n) @ s)


def poisson_bracket(
    h1: QuadraticHamiltonian, h2: QuadraticHamiltonian
) -> QuadraticHamiltonian:
    """{H1, H2} = om(xi_{H1}, xi_{H2}); generator is [X2, X1]."""
    x1, x2 = h1.generator, h2.generator
    return QuadraticHamiltonian(x2 @ x1 - x1 @ x2)


def decompose_quadratic(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Complex coefficient blocks of the quadratic Hamiltonian of X.

    Writing X = [[A, B], [C, -A^T]] in the (x, y) block ordering, returns the
    pair (A' + iB', A'' - iB'') with A' = A - A^T, B' = B - C^T, A'' = A + A^T,
    B'' = B + C^T.  In terms of z these carry the mixed z zbar part and the
    holomorphic z z part of H respectively:

        H(v) = (1/4) Re( i z^T (A' + iB') zbar + i z^T (A'' - iB'') z ).
    """
    x = np.asarray(x, dtype=float)
    n = _dim_n(x)
    assert_sp_element(x)
    a = x[:n, :n]
    b = x[:n, n:]
    c = x[n:, :n]
    mixed = (a - a.T) + 1j * (b - c.T)
    holo = (a + a.T) - 1j * (b + c.T)
    return mixed, holo


def _pair_indices(n: int) -> list[tuple[int, int]]:
    return [(m, l) for m in range(n) for l in range(m + 1)]


def _sym_entry(n: int, i: int, j: int, val: float) -> np.ndarray:
    s = np.zeros((2 * n, 2 * n))
    s[i, j] += val
    s[j, i] += val
    return s


def p_plus_basis(n: int) -> list[QuadraticHamiltonian]:
    """Hamiltonians z_m z_l + zbar_m zbar_l = 2(x_m x_l - y_m y_l), l <= m.

    Their generators are symmetric, i.e. lie in the p part of the Cartan
    split; together with `p_minus_basis` they span it (n(n+1) directions).
    """
    out = []
    for m, l in _pair_indices(n):
        s = _sym_entry(n, m, l, 1.0) + _sym_entry(n, n + m, n + l, -1.0)
        out.append(hamiltonian_from_form(s))
    return out


def p_minus_basis(n: int) -> list[QuadraticHamiltonian]:
    """Hamiltonians i(z_m z_l - zbar_m zbar_l) = -2(x_m y_l + y_m x_l), l <= m."""
    out = []
    for m, l in _pair_indices(n):
        s = _sym_entry(n, m, n + l, -1.0) + _sym_entry(n, l, n + m, -1.0)
        out.append(hamiltonian_from_form(s))
    return out


def omega_pairing(x1: np.ndarray, x2: np.ndarray, j: np.ndarray | None = None) -> float:
    """Pairing tr(X1 J X2) on symmetric sp elements.

    This is the natural invariant antisymmetric pairing on the deformation
    directions at J (antisymmetry follows from J X = -X J for both arguments).
    `j` defaults to the standard complex structure.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if j is None:
        j = standard_complex_structure(_dim_n(x1))
    return float(np.trace(x1 @ j @ x2))


def assert_compatible_structure(
    j: np.ndarray, tol: float = 1e-10, samples: int = 20, seed: int = 7
) -> None:
    """Check J^2 = -1, J in Sp(n, R), and positivity of om(v, Jv) by sampling."""
    j = np.asarray(j, dtype=float)
    n = _dim_n(j)
    sigma = standard_symplectic(n)
    eye = np.eye(2 * n)
    if np.max(np.abs(j @ j + eye)) > tol:
        raise ValueError("J^2 differs from -identity")
    if np.max(np.abs(j.T @ sigma @ j - sigma)) > tol:
        raise ValueError("J does not preserve the symplectic form")
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        v = rng.standard_normal(2 * n)
        v /= np.linalg.norm(v)
        if v @ (sigma.T @ j @ v) <= 0:
            raise ValueError("om(v, Jv) is not positive: J is not compatible")


def tangent_from_generator(x: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Tangent [X, J] at J of the conjugation orbit t -> exp(tX) J exp(-tX)."""
    x = np.asarray(x, dtype=float)
    j = np.asarray(j, dtype=float)
    return x @ j - j @ x


def assert_tangent_at(a: np.ndarray, j: np.ndarray, tol: float = 1e-10) -> None:
    """A tangent direction at J anticommutes with J and stays in sp(n, R)."""
    a = np.asarray(a, dtype=float)
    j = np.asarray(j, dtype=float)
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a @ j + j @ a)) > tol * scale:
        raise ValueError("variation does not anticommute with J")
    assert_sp_element(a, tol=tol)


def chi_symbol(a: np.ndarray, j: np.ndarray, b: np.ndarray) -> float:
    """Pointwise curvature symbol tr(A J B) for tangent directions A, B at J."""
    for m in (a, b):
        assert_tangent_at(m, j)
    return float(np.trace(a @ j @ b))
