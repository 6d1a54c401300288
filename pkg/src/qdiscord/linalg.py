"""Dense complex matrix utilities for registers of up to seven qubits.

Conventions used throughout the package: qubit 0 is the leftmost tensor
factor, so basis index b = b_0 b_1 ... b_{N-1} is read with qubit 0 as the
most significant bit (row-major).  All entropies are in bits (log base 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import InvalidStateError

HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIGENVALUE_FLOOR = -1e-10

#: Largest register size the dense representation is meant for (128 x 128).
MAX_QUBITS = 7

#: Identity and the three Pauli matrices, indexed 0..3.
PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1j], [1j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


def kron(a, b):
    """Kronecker product of two square matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("kron: first factor is not square")
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("kron: second factor is not square")
    return np.kron(a, b)


def kron_chain(factors):
    """Kronecker product of a sequence of square matrices, left to right."""
    factors = list(factors)
    if not factors:
        raise ValueError("kron_chain: empty factor list")
    return reduce(kron, factors)


def embed_qubit_operator(op, qubit, num_qubits):
    """Embed a 2x2 operator acting on one qubit into the full register."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise ValueError("embed_qubit_operator: operator must be 2x2")
    if not 0 <= qubit < num_qubits:
        raise ValueError(f"embed_qubit_operator: qubit {qubit} out of range")
    left = np.eye(2**qubit, dtype=complex)
    right = np.eye(2 ** (num_qubits - qubit - 1), dtype=complex)
    return kron_chain([left, op, right])


@dataclass(frozen=True)
class DensityMatrix:
    """A validated density matrix on `num_qubits` qubits.

    Construction checks Hermiticity and unit trace to 1e-10 and rejects
    eigenvalues below -1e-10.
    """

    matrix: np.ndarray
    num_qubits: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = int(self.num_qubits)
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}], got {n}")
        dim = 2**n
        if m.shape != (dim, dim):
            raise ValueError(f"matrix shape {m.shape} does not match {n} qubits")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_ATOL:
            raise InvalidStateError("density matrix is not Hermitian")
        tr = m.trace()
        if abs(tr - 1.0) > TRACE_ATOL:
            raise InvalidStateError(f"density matrix trace {tr} is not 1")
        evals = np.linalg.eigvalsh(m)
        if evals[0] < EIGENVALUE_FLOOR:
            raise InvalidStateError(
                f"density matrix has negative eigenvalue {evals[0]}",
                min_eigenvalue=float(evals[0]),
            )
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "num_qubits", n)

    @property
    def dim(self):
        return 2**self.num_qubits


def maximally_mixed(num_qubits):
    """I / 2^n on `num_qubits` qubits."""
    dim = 2**num_qubits
    return DensityMatrix(np.eye(dim, dtype=complex) / dim, num_qubits)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every qubit not listed in `keep`.

    Kept qubits appear in the output in ascending index order.
    """
    n = rho.num_qubits
    kept = sorted({int(q) for q in keep})
    if not kept:
        raise ValueError("partial_trace: keep must be non-empty")
    if kept[0] < 0 or kept[-1] >= n:
        raise ValueError(f"partial_trace: qubit index out of range for {n} qubits")
    reduced = _partial_trace_array(rho.matrix, n, kept)
    return DensityMatrix(reduced, len(kept))


def _partial_trace_array(matrix, num_qubits, kept):
    tensor = matrix.reshape((2,) * (2 * num_qubits))
    row_labels = list(range(num_qubits))
    col_labels = [num_qubits + q if q in kept else q for q in range(num_qubits)]
    out_labels = [q for q in kept] + [num_qubits + q for q in kept]
    reduced = np.einsum(tensor, row_labels + col_labels, out_labels)
    dim = 2 ** len(kept)
    return reduced.reshape(dim, dim)


def hermitian_eigenvalues(m) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("hermitian_eigenvalues: matrix is not square")
    if np.max(np.abs(m - m.conj().T)) > HERMITICITY_ATOL:
        raise ValueError("hermitian_eigenvalues: matrix is not Hermitian")
    return np.linalg.eigvalsh(m)


def entropy_from_eigenvalues(evals) -> float:
    """-sum(lam * log2 lam) with 0 log 0 = 0; small negatives are clamped."""
    lam = np.clip(np.asarray(evals, dtype=float), 0.0, 1.0)
    positive = lam[lam > 0.0]
    return float(max(-(positive * np.log2(positive)).sum(), 0.0))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy of a density matrix in bits."""
    evals = np.linalg.eigvalsh(rho.matrix)
    if evals[0] < EIGENVALUE_FLOOR:
        raise InvalidStateError(
            f"state has negative eigenvalue {evals[0]}",
            min_eigenvalue=float(evals[0]),
        )
    return entropy_from_eigenvalues(evals)


def dump_matrix_csv(m, path):
    """Debug dump: one CSV row per matrix row, entries `re+imj`, 17 digits."""
    m = np.asarray(m, dtype=complex)
    with open(path, "w", newline="\n") as fh:
        for row in m:
            fh.write(",".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row))
            fh.write("\n")
