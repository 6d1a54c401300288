"""Projective qubit measurements, conditional measurement trees, and the
entropy terms entering the discord objective.

A measurement basis is parametrized by a unit 4-vector (t, y1, y2, y3)
through the unitary V = t*I + i*(y . sigma); the basis states are the
columns V|0> and V|1>.  The redundant 4-vector is kept on purpose: a
projective measurement has only two physical degrees of freedom (the Bloch
axis), but optimizing over the 4-vector is harmless and keeps the
parametrization smooth.

Trees are ordered: level k measures qubit k-1, and the frame used at level
k is selected by the history of earlier outcomes (bit i of the history is
the outcome measured on qubit i).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DensityMatrix,
    embed_qubit_operator,
    maximally_mixed,
    partial_trace,
    von_neumann_entropy,
)

FRAME_NORM_ATOL = 1e-12
BLOCH_NORM_ATOL = 1e-10

#: Branches below this probability carry weight zero in entropy sums.
ZERO_PROBABILITY_ATOL = 1e-14


@dataclass(frozen=True)
class MeasurementFrame:
    """Unit 4-vector (t, y1, y2, y3) selecting a qubit measurement basis."""

    t: float
    y1: float
    y2: float
    y3: float

    def __post_init__(self):
        for name in ("t", "y1", "y2", "y3"):
            object.__setattr__(self, name, float(getattr(self, name)))
        norm_sq = self.t**2 + self.y1**2 + self.y2**2 + self.y3**2
        if abs(norm_sq - 1.0) > FRAME_NORM_ATOL:
            raise ValueError(f"frame norm^2 = {norm_sq} is not 1")

    @classmethod
    def from_vector(cls, vec) -> "MeasurementFrame":
        """Normalize an arbitrary nonzero 4-vector into a frame."""
        vec = np.asarray(vec, dtype=float)
        norm = float(np.linalg.norm(vec))
        if norm < 1e-12:
            raise ValueError("cannot normalize a near-zero 4-vector")
        return cls(*(vec / norm))

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.y1, self.y2, self.y3])

    def negated(self) -> "MeasurementFrame":
        return MeasurementFrame(-self.t, -self.y1, -self.y2, -self.y3)


#: Computational-basis frame (measures along the sigma_3 axis).
Z_FRAME = MeasurementFrame(1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class BlochAxis:
    """Unit 3-vector: the measurement axis induced by a frame."""

    z1: float
    z2: float
    z3: float

    def __post_init__(self):
        for name in ("z1", "z2", "z3"):
            object.__setattr__(self, name, float(getattr(self, name)))
        norm_sq = self.z1**2 + self.z2**2 + self.z3**2
        if abs(norm_sq - 1.0) > BLOCH_NORM_ATOL:
            raise ValueError(f"Bloch norm^2 = {norm_sq} is not 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.z2, self.z3])


def frame_to_bloch(frame: MeasurementFrame) -> BlochAxis:
    """Axis of the projector V |0><0| V^dag = (I + z . sigma) / 2."""
    t, y1, y2, y3 = frame.t, frame.y1, frame.y2, frame.y3
    z1 = 2.0 * (-t * y2 + y1 * y3)
    z2 = 2.0 * (t * y1 + y2 * y3)
    z3 = t * t - y1 * y1 - y2 * y2 + y3 * y3
    return BlochAxis(z1, z2, z3)


def frame_unitary(frame: MeasurementFrame) -> np.ndarray:
    """V = t*I + i*(y . sigma) as a 2x2 unitary."""
    t, y1, y2, y3 = frame.t, frame.y1, frame.y2, frame.y3
    return np.array(
        [
            [t + 1j * y3, 1j * y1 + y2],
            [1j * y1 - y2, t - 1j * y3],
        ]
    )


def frame_basis(frame: MeasurementFrame):
    """The two measurement basis states (columns of V)."""
    v = frame_unitary(frame)
    return v[:, 0].copy(), v[:, 1].copy()


#: Frames whose Bloch axis points along coordinate axis 1, 2, 3.
_AXIS_FRAMES = {
    1: MeasurementFrame(1.0 / math.sqrt(2.0), 0.0, 1.0 / math.sqrt(2.0), 0.0),
    2: MeasurementFrame(1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0), 0.0, 0.0),
    3: Z_FRAME,
}


def axis_frame(axis: int) -> MeasurementFrame:
    """A canonical frame measuring along Pauli axis 1, 2 or 3."""
    try:
        return _AXIS_FRAMES[axis]
    except KeyError:
        raise ValueError(f"axis must be 1, 2 or 3, got {axis}") from None


@dataclass(frozen=True)
class MeasurementTree:
    """Conditional frames for measuring qubits 0..N-2 in order.

    `levels[k]` holds 2^k frames; the frame applied to qubit k is
    `levels[k][int(history, 2)]` where history is the outcome bit string of
    qubits 0..k-1.
    """

    levels: tuple

    def __post_init__(self):
        levels = tuple(tuple(level) for level in self.levels)
        if not levels:
            raise ValueError("tree needs at least one level")
        for k, level in enumerate(levels):
            if len(level) != 2**k:
                raise ValueError(f"level {k + 1} must hold {2**k} frames, got {len(level)}")
            if not all(isinstance(f, MeasurementFrame) for f in level):
                raise ValueError("tree levels must contain MeasurementFrame objects")
        object.__setattr__(self, "levels", levels)

    @property
    def num_qubits(self) -> int:
        return len(self.levels) + 1

    @property
    def num_frames(self) -> int:
        return 2 ** len(self.levels) - 1

    def prefix(self, num_levels: int) -> "MeasurementTree":
        if not 1 <= num_levels <= len(self.levels):
            raise ValueError(f"prefix length {num_levels} out of range")
        return MeasurementTree(self.levels[:num_levels])

    @classmethod
    def all_z(cls, num_qubits: int) -> "MeasurementTree":
        return cls(tuple((Z_FRAME,) * 2**k for k in range(num_qubits - 1)))

    @classmethod
    def axis_aligned(cls, num_qubits: int, axis: int) -> "MeasurementTree":
        frame = axis_frame(axis)
        return cls(tuple((frame,) * 2**k for k in range(num_qubits - 1)))

    @classmethod
    def random(cls, num_qubits: int, rng: np.random.Generator) -> "MeasurementTree":
        levels = []
        for k in range(num_qubits - 1):
            levels.append(
                tuple(
                    MeasurementFrame.from_vector(rng.standard_normal(4))
                    for _ in range(2**k)
                )
            )
        return cls(tuple(levels))

    def as_flat(self) -> np.ndarray:
        """All frames as one (num_frames, 4) array, level by level."""
        return np.array([f.as_array() for level in self.levels for f in level])

    @classmethod
    def from_flat(cls, num_qubits: int, flat) -> "MeasurementTree":
        flat = np.asarray(flat, dtype=float).reshape(-1, 4)
        expected = 2 ** (num_qubits - 1) - 1
        if flat.shape[0] != expected:
            raise ValueError(f"expected {expected} frames for {num_qubits} qubits")
        levels = []
        pos = 0
        for k in range(num_qubits - 1):
            count = 2**k
            levels.append(
                tuple(MeasurementFrame.from_vector(flat[pos + i]) for i in range(count))
            )
            pos += count
        return cls(tuple(levels))

    def to_json(self) -> str:
        payload = {
            "levels": [[list(f.as_array()) for f in level] for level in self.levels]
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MeasurementTree":
        payload = json.loads(text)
        levels = tuple(
            tuple(MeasurementFrame(*quad) for quad in level)
            for level in payload["levels"]
        )
        return cls(levels)


@dataclass(frozen=True)
class Branch:
    """One measurement outcome: probability, post-measurement state, history."""

    probability: float
    state: DensityMatrix
    history: str
    zero_probability: bool = False


@dataclass(frozen=True)
class BranchEnsemble:
    branches: tuple

    def __post_init__(self):
        branches = tuple(self.branches)
        total = sum(b.probability for b in branches)
        if any(b.probability < 0.0 for b in branches):
            raise ValueError("branch probabilities must be nonnegative")
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"branch probabilities sum to {total}, not 1")
        object.__setattr__(self, "branches", branches)

    def __iter__(self):
        return iter(self.branches)

    def __len__(self):
        return len(self.branches)


def measure_qubit(rho: DensityMatrix, qubit: int, frame: MeasurementFrame) -> BranchEnsemble:
    """Measure one qubit in the frame's basis; two branches, full register size.

    A branch with probability below 1e-14 is carried with probability 0, a
    maximally mixed placeholder state, and `zero_probability=True`.
    """
    n = rho.num_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    v0, v1 = frame_basis(frame)
    branches = []
    for outcome, v in ((0, v0), (1, v1)):
        projector = embed_qubit_operator(np.outer(v, v.conj()), qubit, n)
        sandwiched = projector @ rho.matrix @ projector
        p = float(sandwiched.trace().real)
        if p < ZERO_PROBABILITY_ATOL:
            branches.append(Branch(0.0, maximally_mixed(n), str(outcome), True))
        else:
            state = sandwiched / p
            state = (state + state.conj().T) / 2.0
            branches.append(Branch(p, DensityMatrix(state, n), str(outcome)))
    return BranchEnsemble(tuple(branches))


def _apply_levels(rho: DensityMatrix, levels) -> BranchEnsemble:
    branches = [Branch(1.0, rho, "")]
    for qubit, frames in enumerate(levels):
        grown = []
        for parent in branches:
            frame = frames[int(parent.history, 2) if parent.history else 0]
            for child in measure_qubit(parent.state, qubit, frame):
                p = parent.probability * child.probability
                dead = parent.zero_probability or child.zero_probability
                dead = dead or p < ZERO_PROBABILITY_ATOL
                grown.append(
                    Branch(
                        0.0 if dead else p,
                        child.state,
                        parent.history + child.history,
                        dead,
                    )
                )
        branches = grown
    return BranchEnsemble(tuple(branches))


def apply_tree(rho: DensityMatrix, tree: MeasurementTree) -> BranchEnsemble:
    """Measure qubits 0..N-2 sequentially with conditional frames."""
    if tree.num_qubits != rho.num_qubits:
        raise ValueError(
            f"tree is for {tree.num_qubits} qubits, state has {rho.num_qubits}"
        )
    return _apply_levels(rho, tree.levels)


def conditional_entropy_term(rho: DensityMatrix, tree_prefix: MeasurementTree, k: int) -> float:
    """Average branch entropy of the qubits 0..k-1 marginal after measuring
    qubits 0..k-2 with the given prefix.

    The measured qubits collapse to pure states, so this equals the average
    entropy of the qubit k-1 marginal alone.
    """
    n = rho.num_qubits
    if not 2 <= k <= n:
        raise ValueError(f"k must be in [2, {n}], got {k}")
    if len(tree_prefix.levels) != k - 1:
        raise ValueError(
            f"prefix must have {k - 1} levels for k={k}, got {len(tree_prefix.levels)}"
        )
    total = 0.0
    for branch in _apply_levels(rho, tree_prefix.levels):
        if branch.zero_probability:
            continue
        marginal = partial_trace(branch.state, range(k))
        total += branch.probability * von_neumann_entropy(marginal)
    return total


def unconditional_term(rho: DensityMatrix) -> float:
    """-(S(rho) - S(rho_{A1})), the measurement-free part of the objective."""
    return von_neumann_entropy(partial_trace(rho, (0,))) - von_neumann_entropy(rho)
