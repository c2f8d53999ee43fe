"""Truncated 2LS (x) Fock space and the dense operator algebra on it.

Basis ordering is fixed everywhere in the package: the composite index of
the product state |chi, n> is

    index(chi, n) = chi * (n_max + 1) + n,   chi in {G=0, X=1},

i.e. the two-level system is the major (slow) index.  All operators are
dense complex matrices of shape (dim_total, dim_total) and are returned
write-protected; they are safe to share across parallel workers.
"""

from dataclasses import dataclass, field

import numpy as np

G = 0
X = 1


@dataclass(frozen=True)
class HilbertSpace:
    """Truncated product space of a two-level emitter and one cavity mode."""

    n_max: int
    dim_2ls: int = field(default=2, init=False)

    def __post_init__(self):
        if not isinstance(self.n_max, (int, np.integer)) or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def n_fock(self) -> int:
        return self.n_max + 1

    @property
    def dim_total(self) -> int:
        return self.dim_2ls * (self.n_max + 1)

    def index(self, chi: int, n: int) -> int:
        """Composite basis index of |chi, n>."""
        if chi not in (G, X):
            raise ValueError(f"chi must be 0 (G) or 1 (X), got {chi}")
        if not 0 <= n <= self.n_max:
            raise ValueError(f"n must lie in [0, {self.n_max}], got {n}")
        return chi * (self.n_max + 1) + n


def build_space(n_max: int) -> HilbertSpace:
    return HilbertSpace(n_max)


def _frozen(mat: np.ndarray) -> np.ndarray:
    mat.setflags(write=False)
    return mat


@dataclass(frozen=True)
class OperatorSet:
    """The standard operators on a HilbertSpace (immutable ndarrays)."""

    space: HilbertSpace
    a: np.ndarray
    a_dag: np.ndarray
    sigma_minus: np.ndarray
    sigma_plus: np.ndarray
    proj_x: np.ndarray
    identity: np.ndarray


def build_operators(space: HilbertSpace) -> OperatorSet:
    """Build a, a^dag, sigma_-, sigma_+, |X><X| and the identity.

    The creation operator maps the top Fock state to zero (standard
    truncated-bosonic-algebra convention); convergence in n_max is the
    solver's responsibility.
    """
    nf = space.n_fock
    a_fock = np.diag(np.sqrt(np.arange(1, nf, dtype=float)), 1).astype(complex)
    eye2 = np.eye(2, dtype=complex)
    eyef = np.eye(nf, dtype=complex)

    gx = np.zeros((2, 2), dtype=complex)
    gx[G, X] = 1.0  # |G><X|

    a = np.kron(eye2, a_fock)
    sigma_minus = np.kron(gx, eyef)
    return OperatorSet(
        space=space,
        a=_frozen(a),
        a_dag=_frozen(a.conj().T.copy()),
        sigma_minus=_frozen(sigma_minus),
        sigma_plus=_frozen(sigma_minus.conj().T.copy()),
        proj_x=_frozen(np.kron(np.diag([0.0, 1.0]).astype(complex), eyef)),
        identity=_frozen(np.eye(space.dim_total, dtype=complex)),
    )


def ket(space: HilbertSpace, chi: int, n: int) -> np.ndarray:
    """Basis state |chi, n> as a complex column vector."""
    psi = np.zeros(space.dim_total, dtype=complex)
    psi[space.index(chi, n)] = 1.0
    return psi


def density_matrix(space: HilbertSpace, chi: int, n: int) -> np.ndarray:
    """Pure-state projector |chi, n><chi, n|."""
    psi = ket(space, chi, n)
    return np.outer(psi, psi.conj())


def expectation(rho: np.ndarray, op: np.ndarray) -> complex:
    """Tr(rho @ op); raises on shape mismatch."""
    if rho.shape != op.shape or rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"shape mismatch: rho {rho.shape} vs op {op.shape}")
    return complex(np.einsum("ij,ji->", rho, op))


def validate_density_matrix(rho: np.ndarray, *, trace_tol=1e-8, herm_tol=1e-10,
                            positivity_tol=1e-8) -> None:
    """Raise ValueError unless rho is a physical state within tolerances."""
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"trace deviates from 1 by {abs(tr - 1.0):.3e}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise ValueError(f"hermiticity violation {herm:.3e}")
    lam_min = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lam_min < -positivity_tol:
        raise ValueError(f"negative eigenvalue {lam_min:.3e}")
