"""Multipartite discord for the family states: closed forms in the three
N-categories, the generic measurement-tree objective, and a brute-force
multistart minimization oracle that checks the closed forms numerically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError, UnsupportedSizeError
from .measurement import (
    MeasurementTree,
    conditional_entropy_term,
    unconditional_term,
)
from .optimize import nelder_mead_batch
from .states import (
    PHYSICALITY_FLOOR,
    FamilyCoefficients,
    build_density_matrix,
    spectrum_closed_form,
)

_LN2 = math.log(2.0)

#: Brute-force minimization is limited to registers of this size.
ORACLE_MAX_QUBITS = 5


class Category(enum.Enum):
    """The three closed-form regimes, by N mod 4."""

    ODD = "odd"
    TWO_MOD_4 = "two_mod_4"
    ZERO_MOD_4 = "zero_mod_4"


def classify(num_qubits: int) -> Category:
    n = int(num_qubits)
    if n < 2:
        raise ValueError(f"num_qubits must be >= 2, got {n}")
    if n % 2 == 1:
        return Category.ODD
    return Category.TWO_MOD_4 if n % 4 == 2 else Category.ZERO_MOD_4


def entropy_defect(x):
    """f(x) = (1+x)/2 log2(1+x) + (1-x)/2 log2(1-x) on [0, 1].

    This is 1 minus the binary entropy of (1+x)/2; f(0) = 0, f(1) = 1,
    monotone increasing.  Small arguments go through log1p to avoid the
    cancellation of the two nearly-opposite terms.  Accepts scalars or
    arrays; arguments within 1e-12 of the boundary are clamped.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -1e-12) or np.any(arr > 1.0 + 1e-12):
        raise ValueError("entropy_defect argument outside [0, 1]")
    scalar = arr.ndim == 0
    work = np.atleast_1d(np.clip(arr, 0.0, 1.0))
    out = np.empty_like(work)

    lo = work < 0.5
    xl = work[lo]
    out[lo] = (0.5 * np.log1p(-xl * xl) + 0.5 * xl * (np.log1p(xl) - np.log1p(-xl))) / _LN2

    xh = work[~lo]
    rest = 1.0 - xh  # exact for xh in [0.5, 1]
    high = 0.5 * (1.0 + xh) * np.log2(1.0 + xh)
    high = high + np.where(rest > 0.0, 0.5 * rest * np.log2(np.where(rest > 0.0, rest, 1.0)), 0.0)
    out[~lo] = high

    if scalar:
        return float(out[0])
    return out.reshape(arr.shape)


_SIGNS = {
    Category.TWO_MOD_4: np.array(
        [[-1.0, -1.0, -1.0], [-1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [1.0, 1.0, -1.0]]
    ),
    Category.ZERO_MOD_4: np.array(
        [[1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0], [1.0, 1.0, 1.0]]
    ),
}


def _xlog2(v):
    return np.where(v > 0.0, v * np.log2(np.where(v > 0.0, v, 1.0)), 0.0)


def discord_value_arrays(num_qubits: int, c1, c2, c3):
    """Vectorized closed-form discord over coefficient arrays.

    No physicality checks: callers must mask unphysical points themselves.
    Boundary round-off (xi marginally above 1, eigenvalue numerators
    marginally below 0) is clamped.
    """
    category = classify(num_qubits)
    c1, c2, c3 = np.broadcast_arrays(
        np.asarray(c1, float), np.asarray(c2, float), np.asarray(c3, float)
    )
    c_max = np.maximum(np.abs(c1), np.maximum(np.abs(c2), np.abs(c3)))
    f_max = entropy_defect(np.clip(c_max, 0.0, 1.0))
    if category is Category.ODD:
        xi = np.sqrt(c1 * c1 + c2 * c2 + c3 * c3)
        return entropy_defect(np.clip(xi, 0.0, 1.0)) - f_max
    signs = _SIGNS[category]
    terms = 1.0 + (
        signs[:, 0, None] * c1.ravel()
        + signs[:, 1, None] * c2.ravel()
        + signs[:, 2, None] * c3.ravel()
    )
    joint = 0.25 * _xlog2(np.clip(terms, 0.0, None)).sum(axis=0).reshape(c1.shape)
    return joint - f_max


@dataclass(frozen=True)
class ClosedFormReport:
    """Closed-form discord of one family state."""

    category: Category
    xi: float
    c_max: float
    value_bits: float


def closed_form_discord(fc: FamilyCoefficients) -> ClosedFormReport:
    min_eig = spectrum_closed_form(fc).min_eigenvalue()
    if min_eig < PHYSICALITY_FLOOR:
        raise InvalidStateError(
            f"unphysical coefficients: min eigenvalue {min_eig:.3e} < 0",
            min_eigenvalue=min_eig,
        )
    c1, c2, c3 = fc.coefficients
    value = float(discord_value_arrays(fc.num_qubits, c1, c2, c3))
    return ClosedFormReport(
        category=classify(fc.num_qubits),
        xi=math.sqrt(c1 * c1 + c2 * c2 + c3 * c3),
        c_max=max(abs(c1), abs(c2), abs(c3)),
        value_bits=value,
    )


def optimal_axis(fc: FamilyCoefficients) -> int:
    """Pauli axis (1, 2 or 3) attaining max |c_j|; ties pick the lowest index."""
    return int(np.argmax(np.abs(fc.coefficients))) + 1


def discord_objective(fc: FamilyCoefficients, tree: MeasurementTree) -> float:
    """The bracketed sum of the discord definition for one measurement tree,
    evaluated numerically on the dense state.  Minimizing it over trees
    gives the discord."""
    if tree.num_qubits != fc.num_qubits:
        raise ValueError(
            f"tree is for {tree.num_qubits} qubits, state has {fc.num_qubits}"
        )
    rho = build_density_matrix(fc)
    total = unconditional_term(rho)
    for k in range(2, fc.num_qubits + 1):
        total += conditional_entropy_term(rho, tree.prefix(k - 1), k)
    return total


# ---------------------------------------------------------------------------
# Fast batched evaluation of the same objective, used by the oracle.
# ---------------------------------------------------------------------------

_DEFAULT_FRAME = np.array([1.0, 0.0, 0.0, 0.0])


def _normalize_frames(flat):
    """(m, 4F) -> (m, F, 4) with every frame renormalized to unit length."""
    frames = flat.reshape(flat.shape[0], -1, 4)
    norms = np.linalg.norm(frames, axis=2, keepdims=True)
    tiny = norms < 1e-12
    frames = np.where(tiny, _DEFAULT_FRAME, frames / np.where(tiny, 1.0, norms))
    return frames


def _project_frames(flat):
    return _normalize_frames(flat).reshape(flat.shape)


def _frame_bases(frames):
    """(m, F, 4) frames -> (m, F, 2, 2) basis vectors [outcome, component]."""
    t = frames[..., 0]
    y1 = frames[..., 1]
    y2 = frames[..., 2]
    y3 = frames[..., 3]
    basis = np.empty(frames.shape[:-1] + (2, 2), dtype=complex)
    basis[..., 0, 0] = t + 1j * y3
    basis[..., 0, 1] = 1j * y1 - y2
    basis[..., 1, 0] = 1j * y1 + y2
    basis[..., 1, 1] = t - 1j * y3
    return basis


def _weighted_branch_entropies(a, d, off):
    """Sum over branches of p * S(state / p) for unnormalized 2x2 states
    given their entries a, d (diagonal, real) and off (upper off-diagonal).

    Branches with trace below 1e-14 are skipped with weight zero.
    """
    p = a + d
    radius = np.sqrt(np.maximum(0.25 * (a - d) ** 2 + off.real**2 + off.imag**2, 0.0))
    live = p > 1e-14
    safe_p = np.where(live, p, 1.0)
    u = np.clip((0.5 * p + radius) / safe_p, 0.0, 1.0)
    entropy = -(_xlog2(u) + _xlog2(1.0 - u))
    return np.where(live, p * entropy, 0.0).sum(axis=1)


def _outcome_weights(v):
    """(..., 2, 2) basis vectors -> (..., 2, 4) weights w[o, i*2+k] such that
    <v_o| B |v_o> = sum_ik w[o, ik] B[i, :, k, :] for 2x2-blocked B."""
    w = v.conj()[..., :, None] * v[..., None, :]
    return w.reshape(v.shape[:-2] + (2, 4))


def _tree_terms_batch(rho_matrix, num_qubits, frames):
    """Sum of the conditional entropy terms k=2..N for a batch of trees.

    The branch ensembles are propagated as contracted matrices: measuring
    qubit q maps each branch B to <v_o| B |v_o> on the remaining qubits,
    which preserves every marginal the terms need while the matrices shrink
    by a factor of 2 per level.  Contractions run as batched matmuls over
    the four qubit-q blocks of each branch matrix.
    """
    m = frames.shape[0]
    bases = _frame_bases(frames)
    terms = np.zeros(m)

    half = rho_matrix.shape[0] // 2
    blocks = rho_matrix.reshape(2, half, 2, half).transpose(0, 2, 1, 3).reshape(4, half * half)
    states = (_outcome_weights(bases[:, 0]) @ blocks).reshape(m, 2, half, half)
    pos = 1

    for level in range(1, num_qubits):
        count = states.shape[1]
        # first-qubit marginal entries of every (half x half) branch matrix
        if half == 2:
            a = states[..., 0, 0].real
            d = states[..., 1, 1].real
            off = states[..., 0, 1]
        else:
            quarter = half // 2
            six = states.reshape(m, count, 2, quarter, 2, quarter)
            a = np.trace(six[:, :, 0, :, 0, :], axis1=2, axis2=3).real
            d = np.trace(six[:, :, 1, :, 1, :], axis1=2, axis2=3).real
            off = np.trace(six[:, :, 0, :, 1, :], axis1=2, axis2=3)
        terms += _weighted_branch_entropies(a, d, off)
        if level == num_qubits - 1:
            break
        weights = _outcome_weights(bases[:, pos : pos + count]).reshape(m * count, 2, 4)
        pos += count
        half //= 2
        blocks = (
            states.reshape(m, count, 2, half, 2, half)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(m * count, 4, half * half)
        )
        states = (weights @ blocks).reshape(m, 2 * count, half, half)
    return terms


def _objective_batch(rho_matrix, num_qubits, base, flat_params):
    frames = _normalize_frames(np.asarray(flat_params, dtype=float))
    return base + _tree_terms_batch(rho_matrix, num_qubits, frames)


# ---------------------------------------------------------------------------
# Oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleConfig:
    """Multistart search configuration.

    The master seed is split into one child seed per restart, so results do
    not depend on scheduling or batch layout.
    """

    restarts: int = 400
    seed: int = 0
    max_iters: int = 2000
    tol: float = 1e-10

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class OracleResult:
    value_bits: float
    best_tree: MeasurementTree
    restart_count: int
    objective_evaluations: int
    gap_to_closed_form: float
    restart_values: np.ndarray
    converged_count: int


def oracle_discord(fc: FamilyCoefficients, config: OracleConfig | None = None) -> OracleResult:
    """Minimize the discord objective over measurement trees by multistart
    downhill simplex on the flattened frame coordinates.

    Every restart starts from independent uniform random unit 4-vectors
    (one per tree frame) and candidates are renormalized frame-by-frame
    after each simplex step.  The reported value re-evaluates the winning
    tree through the reference objective path.
    """
    config = config or OracleConfig()
    n = fc.num_qubits
    if n > ORACLE_MAX_QUBITS:
        raise UnsupportedSizeError(
            f"oracle supports at most {ORACLE_MAX_QUBITS} qubits, got {n}"
        )
    rho = build_density_matrix(fc)
    base = unconditional_term(rho)

    num_frames = 2 ** (n - 1) - 1
    dim = 4 * num_frames
    children = np.random.SeedSequence(config.seed).spawn(config.restarts)
    x0 = np.empty((config.restarts, dim))
    for r, child in enumerate(children):
        raw = np.random.default_rng(child).standard_normal((num_frames, 4))
        raw /= np.linalg.norm(raw, axis=1, keepdims=True)
        x0[r] = raw.ravel()

    rho_matrix = np.ascontiguousarray(rho.matrix)
    result = nelder_mead_batch(
        lambda pts: _objective_batch(rho_matrix, n, base, pts),
        x0,
        step=0.25,
        fatol=config.tol,
        max_iter=config.max_iters,
        project=_project_frames,
    )

    best = int(np.argmin(result.fun))
    best_tree = MeasurementTree.from_flat(n, _normalize_frames(result.x[best : best + 1])[0])
    value = discord_objective(fc, best_tree)
    closed = closed_form_discord(fc).value_bits
    return OracleResult(
        value_bits=value,
        best_tree=best_tree,
        restart_count=config.restarts,
        objective_evaluations=result.evaluations,
        gap_to_closed_form=value - closed,
        restart_values=result.fun,
        converged_count=int(result.converged.sum()),
    )
