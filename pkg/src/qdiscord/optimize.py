"""Batched Nelder-Mead: many independent simplex searches advanced in lockstep.

Each row of the batch follows the textbook downhill-simplex rules
(reflection 1, expansion 2, contraction 1/2, shrink 1/2).  Running all
simplices as one set of vectorized array operations keeps per-iteration
numpy overhead constant in the number of restarts, which is what makes
multistart searches with hundreds of restarts cheap.  Row results are
identical to running each search on its own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class BatchMinimizeResult:
    x: np.ndarray  # (batch, dim) best vertex per simplex
    fun: np.ndarray  # (batch,) objective value at x
    iterations: np.ndarray  # (batch,) iterations performed
    evaluations: int  # objective evaluations summed over the batch
    converged: np.ndarray  # (batch,) function-value spread fell below fatol


def nelder_mead_batch(fun, x0, *, step=0.25, fatol=1e-10, max_iter=2000, project=None):
    """Minimize `fun` row-wise from each starting point in `x0`.

    fun maps an (m, dim) array to (m,) values and must treat rows
    independently.  `project`, when given, maps candidate points back onto
    the feasible set; it is applied to every point before it is evaluated
    or stored, so the whole search lives on the projected manifold.
    A simplex stops once max(f) - min(f) over its vertices drops below
    `fatol`, or after `max_iter` iterations.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 2:
        raise ValueError("x0 must be (batch, dim)")
    batch, dim = x0.shape
    if project is None:
        project = lambda pts: pts

    evaluations = 0

    def evaluate(points):
        nonlocal evaluations
        evaluations += points.shape[0]
        values = np.asarray(fun(points), dtype=float)
        if values.shape != (points.shape[0],):
            raise ValueError("objective must return one value per row")
        return values

    verts = np.repeat(x0[:, None, :], dim + 1, axis=1)
    diag = np.arange(dim)
    verts[:, 1:, :][:, diag, diag] += step
    verts = project(verts.reshape(-1, dim)).reshape(batch, dim + 1, dim)
    fv = evaluate(verts.reshape(-1, dim)).reshape(batch, dim + 1)

    def resort(v, f):
        order = np.argsort(f, axis=1, kind="stable")
        return np.take_along_axis(v, order[:, :, None], axis=1), np.take_along_axis(
            f, order, axis=1
        )

    verts, fv = resort(verts, fv)
    iterations = np.zeros(batch, dtype=int)
    converged = fv[:, -1] - fv[:, 0] < fatol
    active = ~converged

    for _ in range(max_iter):
        if not active.any():
            break
        rows = np.flatnonzero(active)
        iterations[rows] += 1

        v = verts[rows]
        f = fv[rows]
        m = len(rows)
        centroid = v[:, :-1, :].mean(axis=1)
        worst = v[:, -1, :]
        f_best = f[:, 0]
        f_second = f[:, -2]
        f_worst = f[:, -1]

        x_reflect = project(2.0 * centroid - worst)
        f_reflect = evaluate(x_reflect)

        take_reflect = (f_reflect >= f_best) & (f_reflect < f_second)
        try_expand = f_reflect < f_best
        contract_out = (f_reflect >= f_second) & (f_reflect < f_worst)
        contract_in = f_reflect >= f_worst

        accept = take_reflect.copy()
        shrink = np.zeros(m, dtype=bool)
        new_x = x_reflect.copy()
        new_f = f_reflect.copy()

        second = np.flatnonzero(~take_reflect)
        if second.size:
            is_exp = try_expand[second]
            is_oc = contract_out[second]
            is_ic = contract_in[second]
            cand = np.empty((second.size, dim))
            cand[is_exp] = 3.0 * centroid[second][is_exp] - 2.0 * worst[second][is_exp]
            cand[is_oc] = 1.5 * centroid[second][is_oc] - 0.5 * worst[second][is_oc]
            cand[is_ic] = 0.5 * (centroid[second][is_ic] + worst[second][is_ic])
            cand = project(cand)
            f_cand = evaluate(cand)

            ok = np.empty(second.size, dtype=bool)
            ok[is_exp] = f_cand[is_exp] < f_reflect[second][is_exp]
            ok[is_oc] = f_cand[is_oc] <= f_reflect[second][is_oc]
            ok[is_ic] = f_cand[is_ic] < f_worst[second][is_ic]

            took = second[ok]
            new_x[took] = cand[ok]
            new_f[took] = f_cand[ok]
            accept[took] = True
            # a failed expansion still keeps the (better-than-best) reflection
            fell_back = second[is_exp & ~ok]
            accept[fell_back] = True
            shrink[second[(is_oc | is_ic) & ~ok]] = True

        took = np.flatnonzero(accept)
        v[took, -1, :] = new_x[took]
        f[took, -1] = new_f[took]

        small = np.flatnonzero(shrink)
        if small.size:
            best = v[small, :1, :]
            shrunk = best + 0.5 * (v[small, 1:, :] - best)
            shrunk = project(shrunk.reshape(-1, dim)).reshape(small.size, dim, dim)
            v[small, 1:, :] = shrunk
            f[small, 1:] = evaluate(shrunk.reshape(-1, dim)).reshape(small.size, dim)

        v, f = resort(v, f)
        verts[rows] = v
        fv[rows] = f

        done = f[:, -1] - f[:, 0] < fatol
        converged[rows[done]] = True
        active[rows[done]] = False

    return BatchMinimizeResult(
        x=verts[:, 0, :].copy(),
        fun=fv[:, 0].copy(),
        iterations=iterations,
        evaluations=evaluations,
        converged=converged,
    )
