"""Vectorized generator of the Lindblad master equation.

Column-stacking convention throughout: vec(rho) stacks the columns of rho
(numpy order='F'), so vec(A rho B) = (B^T kron A) vec(rho).  With that,

    d/dt vec(rho) = L vec(rho),
    L = -i [(1 kron H) - (H^T kron 1)]
        + sum_k Gamma_k [ conj(O_k) kron O_k
                          - 1/2 (1 kron O_k^dag O_k)
                          - 1/2 ((O_k^dag O_k)^T kron 1) ].

The matrix is materialized sparse (CSR); dimensions stay modest (<= ~1e4
rows for n_max <= 49) and the steady-state solve is a direct sparse LU.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fock import HilbertSpace


@dataclass(frozen=True)
class Liouvillian:
    """The generator matrix plus the space and channels it was built from."""

    space: HilbertSpace
    matrix: sp.csr_matrix
    channel_list: tuple

    @property
    def dim(self) -> int:
        return self.space.dim_total


def trace_functional(dim: int) -> np.ndarray:
    """Row vector t with t @ vec(rho) = Tr(rho) in column stacking."""
    t = np.zeros(dim * dim)
    t[np.arange(dim) * (dim + 1)] = 1.0
    return t


def vectorize(rho: np.ndarray) -> np.ndarray:
    return rho.flatten(order="F")


def unvectorize(vec: np.ndarray, dim: int) -> np.ndarray:
    return vec.reshape((dim, dim), order="F")


def build_liouvillian(h: np.ndarray, channels, space: HilbertSpace) -> Liouvillian:
    """Assemble L from H (units of angular frequency) and (operator, rate) pairs."""
    dim = space.dim_total
    if h.shape != (dim, dim):
        raise ValueError(f"Hamiltonian shape {h.shape} does not match dim {dim}")
    eye = sp.identity(dim, format="csr", dtype=complex)
    hs = sp.csr_matrix(h)
    gen = -1j * (sp.kron(eye, hs) - sp.kron(hs.T, eye))
    for op, rate in channels:
        if rate < 0:
            raise ValueError(f"negative rate {rate}")
        if op.shape != (dim, dim):
            raise ValueError(f"channel operator shape {op.shape} does not match dim {dim}")
        o = sp.csr_matrix(op)
        odo = (o.conj().T @ o).tocsr()
        gen = gen + rate * (sp.kron(o.conj(), o)
                            - 0.5 * sp.kron(eye, odo)
                            - 0.5 * sp.kron(odo.T, eye))
    gen = gen.tocsr()

    # trace preservation: the trace functional must be a left null vector
    resid = np.abs(trace_functional(dim) @ gen)
    scale = max(np.abs(gen.data).max(), 1.0)
    if resid.max() > 1e-10 * scale:
        raise AssertionError(f"trace-preservation defect {resid.max():.3e}")

    return Liouvillian(space=space, matrix=gen,
                       channel_list=tuple((op, float(rate)) for op, rate in channels))


def apply(liouvillian: Liouvillian, rho: np.ndarray) -> np.ndarray:
    """rho_dot = L rho, returned as a matrix."""
    dim = liouvillian.dim
    if rho.shape != (dim, dim):
        raise ValueError(f"rho shape {rho.shape} does not match dim {dim}")
    return unvectorize(liouvillian.matrix @ vectorize(rho), dim)
