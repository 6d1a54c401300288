"""Phase-flip (dephasing) dynamics of the family states.

Each qubit passes through the channel with Kraus pair
diag(sqrt(1-p/2), sqrt(1-p/2)) and diag(sqrt(p/2), -sqrt(p/2)), which
scales the sigma_1 and sigma_2 correlation coefficients by (1-p) per qubit
and leaves c3 alone.  Odd registers lose discord monotonically; registers
with N = 0 (mod 4) and c2 = c1*c3 freeze at f(|c3|) until the sudden
transition at p* = 1 - (|c3|/|c1|)^(1/N).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .discord import closed_form_discord, entropy_defect
from .linalg import DensityMatrix, embed_qubit_operator
from .states import FamilyCoefficients, is_physical

SLOPE_TOLERANCE = 1e-12

TRAJECTORY_CSV_HEADER = ("p", "c1", "c2", "c3", "delta", "theta", "discord", "physical")


@dataclass(frozen=True)
class ChannelParams:
    """Flip strength p, optionally derived from a damping rate and time."""

    p: float
    gamma: float | None = None
    t: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")

    @classmethod
    def from_rate(cls, gamma: float, t: float) -> "ChannelParams":
        if gamma < 0.0 or t < 0.0:
            raise ValueError("gamma and t must be nonnegative")
        return cls(p=1.0 - math.exp(-gamma * t), gamma=gamma, t=t)


def phase_flip_coefficients(fc: FamilyCoefficients, p: float) -> FamilyCoefficients:
    """Coefficients after every qubit passes the phase flip channel."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    scale = (1.0 - p) ** fc.num_qubits
    return FamilyCoefficients(fc.num_qubits, scale * fc.c1, scale * fc.c2, fc.c3)


def kraus_operators(num_qubits: int, p: float) -> list:
    """The 2N full-register Kraus operators, qubit by qubit.

    Entries 2i and 2i+1 are the no-flip / flip operators acting on qubit i.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    keep = math.sqrt(1.0 - p / 2.0)
    flip = math.sqrt(p / 2.0)
    k0 = np.diag([keep, keep]).astype(complex)
    k1 = np.diag([flip, -flip]).astype(complex)
    ops = []
    for qubit in range(num_qubits):
        ops.append(embed_qubit_operator(k0, qubit, num_qubits))
        ops.append(embed_qubit_operator(k1, qubit, num_qubits))
    return ops


def apply_phase_flip(rho: DensityMatrix, p: float) -> DensityMatrix:
    """Apply the channel at the matrix level.

    The per-qubit channels act on disjoint slots, so composing them equals
    the sum over all 2^N qubit-wise Kraus combinations.
    """
    ops = kraus_operators(rho.num_qubits, p)
    m = rho.matrix
    for qubit in range(rho.num_qubits):
        k0 = ops[2 * qubit]
        k1 = ops[2 * qubit + 1]
        m = k0 @ m @ k0.conj().T + k1 @ m @ k1.conj().T
    return DensityMatrix(m, rho.num_qubits)


@dataclass(frozen=True)
class TrajectoryPoint:
    """One point of a discord-vs-noise sweep.

    delta is the xi of the evolved coefficients and theta their max |c_j|;
    discord_bits is None where the evolved triple is unphysical.
    """

    p: float
    evolved: FamilyCoefficients
    delta: float
    theta: float
    discord_bits: float | None
    physical: bool


def discord_trajectory(fc: FamilyCoefficients, p_grid) -> list:
    points = []
    for p in p_grid:
        p = float(p)
        evolved = phase_flip_coefficients(fc, p)
        c1, c2, c3 = evolved.coefficients
        delta = math.sqrt(c1 * c1 + c2 * c2 + c3 * c3)
        theta = max(abs(c1), abs(c2), abs(c3))
        if is_physical(evolved):
            value = closed_form_discord(evolved).value_bits
            points.append(TrajectoryPoint(p, evolved, delta, theta, value, True))
        else:
            points.append(TrajectoryPoint(p, evolved, delta, theta, None, False))
    return points


def write_trajectory_csv(points, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRAJECTORY_CSV_HEADER)
    for pt in points:
        c1, c2, c3 = pt.evolved.coefficients
        discord = pt.discord_bits if pt.discord_bits is not None else math.nan
        writer.writerow(
            [
                f"{pt.p:.17g}",
                f"{c1:.17g}",
                f"{c2:.17g}",
                f"{c3:.17g}",
                f"{pt.delta:.17g}",
                f"{pt.theta:.17g}",
                f"{discord:.17g}",
                "true" if pt.physical else "false",
            ]
        )


def _check_transition_preconditions(fc: FamilyCoefficients):
    if fc.num_qubits % 4 != 0:
        raise ValueError("transition point requires num_qubits = 0 (mod 4)")
    if fc.c3 == 0.0:
        raise ValueError("transition point requires c3 != 0")
    if abs(fc.c2 - fc.c1 * fc.c3) > 1e-12:
        raise ValueError("transition point requires c2 = c1*c3")
    if abs(fc.c3) > abs(fc.c1):
        raise ValueError("transition point requires |c3| <= |c1|")


def transition_point(fc: FamilyCoefficients, method: str = "analytic") -> float:
    """The flip strength where max{|(1-p)^N c1|, |c3|} switches branch.

    `analytic` solves (1-p)^N |c1| = |c3| directly; `bisection` locates the
    kink on the closed-form discord trajectory itself.
    """
    _check_transition_preconditions(fc)
    if method == "analytic":
        return 1.0 - (abs(fc.c3) / abs(fc.c1)) ** (1.0 / fc.num_qubits)
    if method == "bisection":
        plateau = closed_form_discord(fc).value_bits
        lo, hi = 0.0, 1.0
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            evolved = phase_flip_coefficients(fc, mid)
            if closed_form_discord(evolved).value_bits < plateau - 1e-12:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)
    raise ValueError(f"method must be 'analytic' or 'bisection', got {method!r}")


@dataclass(frozen=True)
class MonotonicityReport:
    passed: bool
    max_slope: float
    worst_p: float
    threshold: float = SLOPE_TOLERANCE


def certify_monotone_decrease(fc: FamilyCoefficients, p_grid) -> MonotonicityReport:
    """Certify that the discord trajectory of an odd register never rises.

    Central finite-difference slopes are evaluated at every interior grid
    point; the certificate passes when all of them stay below 1e-12.
    """
    if fc.num_qubits % 2 != 1:
        raise ValueError("monotonicity certificate applies to odd registers")
    p = np.asarray(list(p_grid), dtype=float)
    if p.size < 3:
        raise ValueError("need at least three grid points")
    if np.any(np.diff(p) <= 0.0):
        raise ValueError("grid must be strictly increasing")
    points = discord_trajectory(fc, p)
    if not all(pt.physical for pt in points):
        raise ValueError("grid leaves the physical range of the evolved state")
    values = np.array([pt.discord_bits for pt in points])
    slopes = (values[2:] - values[:-2]) / (p[2:] - p[:-2])
    worst = int(np.argmax(slopes))
    max_slope = float(slopes[worst])
    return MonotonicityReport(
        passed=max_slope < SLOPE_TOLERANCE,
        max_slope=max_slope,
        worst_p=float(p[worst + 1]),
    )


def frozen_plateau_value(fc: FamilyCoefficients) -> float:
    """Discord on the frozen branch, f(|c3|)."""
    return float(entropy_defect(abs(fc.c3)))
