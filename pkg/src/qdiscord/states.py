"""The symmetric N-qubit state family (I + sum_j c_j sigma_j^{(x)N}) / 2^N.

The family's spectrum has a closed form that splits into three categories
by N mod 4; everything downstream (physicality, entropy, discord) is built
on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError
from .linalg import MAX_QUBITS, PAULI, DensityMatrix, kron_chain

#: A coefficient triple is physical when no closed-form eigenvalue is below this.
PHYSICALITY_FLOOR = -1e-12


@dataclass(frozen=True)
class FamilyCoefficients:
    """(N, c1, c2, c3) parametrizing one family state."""

    num_qubits: int
    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        n = int(self.num_qubits)
        if n < 2:
            raise ValueError(f"num_qubits must be >= 2, got {n}")
        object.__setattr__(self, "num_qubits", n)
        for name in ("c1", "c2", "c3"):
            value = float(getattr(self, name))
            if not -1.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} outside [-1, 1]")
            object.__setattr__(self, name, value)

    @property
    def coefficients(self):
        return (self.c1, self.c2, self.c3)

    @classmethod
    def parse(cls, text: str) -> "FamilyCoefficients":
        """Parse the CLI form `N:c1,c2,c3`, e.g. `4:0.8,0.4,0.5`."""
        head, sep, tail = text.strip().partition(":")
        if not sep:
            raise ValueError(f"expected N:c1,c2,c3, got {text!r}")
        try:
            n = int(head)
        except ValueError:
            raise ValueError(f"qubit count {head!r} is not an integer") from None
        parts = tail.split(",")
        if len(parts) != 3:
            raise ValueError(f"expected three coefficients, got {len(parts)}")
        try:
            c = [float(p) for p in parts]
        except ValueError:
            raise ValueError(f"coefficients {tail!r} are not numbers") from None
        return cls(n, *c)

    def format(self) -> str:
        return f"{self.num_qubits}:{self.c1:.17g},{self.c2:.17g},{self.c3:.17g}"


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of a family state as (eigenvalue, multiplicity) pairs."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((float(v), int(m)) for v, m in self.pairs)
        if not pairs or any(m <= 0 for _, m in pairs):
            raise ValueError("spectrum needs positive multiplicities")
        weighted = sum(v * m for v, m in pairs)
        if abs(weighted - 1.0) > 1e-12:
            raise ValueError(f"spectrum trace {weighted} is not 1")
        object.__setattr__(self, "pairs", pairs)

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.pairs)

    def min_eigenvalue(self) -> float:
        return min(v for v, _ in self.pairs)

    def expanded(self) -> np.ndarray:
        """All eigenvalues with multiplicity, sorted ascending."""
        values = np.repeat([v for v, _ in self.pairs], [m for _, m in self.pairs])
        return np.sort(values)


def spectrum_closed_form(fc: FamilyCoefficients) -> SpectrumReport:
    """Closed-form spectrum; total in the coefficients, so it may report
    negative eigenvalues for unphysical triples."""
    n = fc.num_qubits
    c1, c2, c3 = fc.coefficients
    scale = 2.0**n
    if n % 2 == 1:
        xi = math.sqrt(c1 * c1 + c2 * c2 + c3 * c3)
        half = 2 ** (n - 1)
        pairs = (((1.0 - xi) / scale, half), ((1.0 + xi) / scale, half))
    else:
        if n % 4 == 2:
            numerators = (
                1.0 - c1 - c2 - c3,
                1.0 - c1 + c2 + c3,
                1.0 + c1 - c2 + c3,
                1.0 + c1 + c2 - c3,
            )
        else:
            numerators = (
                1.0 + c1 - c2 - c3,
                1.0 - c1 + c2 - c3,
                1.0 - c1 - c2 + c3,
                1.0 + c1 + c2 + c3,
            )
        quarter = 2 ** (n - 2)
        pairs = tuple((v / scale, quarter) for v in numerators)
    return SpectrumReport(pairs)


def spectrum_min_arrays(n: int, c1, c2, c3):
    """Vectorized minimum closed-form eigenvalue over coefficient arrays."""
    c1, c2, c3 = np.broadcast_arrays(
        np.asarray(c1, float), np.asarray(c2, float), np.asarray(c3, float)
    )
    scale = 2.0**n
    if n % 2 == 1:
        xi = np.sqrt(c1 * c1 + c2 * c2 + c3 * c3)
        return (1.0 - xi) / scale
    if n % 4 == 2:
        stack = np.stack(
            [1.0 - c1 - c2 - c3, 1.0 - c1 + c2 + c3, 1.0 + c1 - c2 + c3, 1.0 + c1 + c2 - c3]
        )
    else:
        stack = np.stack(
            [1.0 + c1 - c2 - c3, 1.0 - c1 + c2 - c3, 1.0 - c1 - c2 + c3, 1.0 + c1 + c2 + c3]
        )
    return stack.min(axis=0) / scale


def is_physical(fc: FamilyCoefficients) -> bool:
    """True when the closed-form spectrum is nonnegative within 1e-12."""
    return spectrum_closed_form(fc).min_eigenvalue() >= PHYSICALITY_FLOOR


def build_density_matrix(fc: FamilyCoefficients) -> DensityMatrix:
    """Materialize the family state as a dense matrix."""
    n = fc.num_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"dense construction supports at most {MAX_QUBITS} qubits")
    min_eig = spectrum_closed_form(fc).min_eigenvalue()
    if min_eig < PHYSICALITY_FLOOR:
        raise InvalidStateError(
            f"unphysical coefficients: min eigenvalue {min_eig:.3e} < 0",
            min_eigenvalue=min_eig,
        )
    dim = 2**n
    m = np.eye(dim, dtype=complex)
    for c, j in zip(fc.coefficients, (1, 2, 3)):
        if c != 0.0:
            m += c * kron_chain([PAULI[j]] * n)
    return DensityMatrix(m / dim, n)


def global_entropy(fc: FamilyCoefficients) -> float:
    """Entropy of the family state in bits, from the closed-form spectrum."""
    spectrum = spectrum_closed_form(fc)
    min_eig = spectrum.min_eigenvalue()
    if min_eig < PHYSICALITY_FLOOR:
        raise InvalidStateError(
            f"unphysical coefficients: min eigenvalue {min_eig:.3e} < 0",
            min_eigenvalue=min_eig,
        )
    total = 0.0
    for value, mult in spectrum.pairs:
        lam = min(max(value, 0.0), 1.0)
        if lam > 0.0:
            total -= mult * lam * math.log2(lam)
    return max(total, 0.0)


def random_physical(num_qubits: int, rng: np.random.Generator, max_attempts=100000):
    """Uniform sample from the physical region of the coefficient cube."""
    for _ in range(max_attempts):
        c = rng.uniform(-1.0, 1.0, size=3)
        fc = FamilyCoefficients(num_qubits, *c)
        if is_physical(fc):
            return fc
    raise RuntimeError("rejection sampling failed to find a physical state")
