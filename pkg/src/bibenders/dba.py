"""Dichotomic Benders baseline: weighted-sum solves driven by chord weights.

Both lexicographic endpoints are computed first, then the frontier is filled
in recursively: for each adjacent pair the chord weight is solved with
single-objective Benders; a point strictly below the chord splits the pair.
The cut pool is shared across every weighted solve, so later solves start
warm.  For a frontier with p extreme points at least ``2p - 1`` weighted
solves are needed (two endpoints, p-2 discoveries, p-1 confirmations).
"""

from __future__ import annotations

import time

import numpy as np

from .bbsa import _assemble, explore_point  # shared assembly and cut generation
from .benders import DEFAULT_BOX, CutPool, master_blp, solve_single_benders
from .biobj import EXPLORED_TOL, BiObjectiveLP, ParametricSimplex
from .exceptions import (
    IterationLimitError,
    RecursionLimitError,
    SubproblemUnboundedError,
    UnboundedError,
)
from .stats import RunStats

DEFAULT_RECURSION_LIMIT = 80


def _lex_endpoint_benders(prob, primary, pool, tol=1e-7, iter_limit=1000):
    """Lexicographic endpoint of the decomposed problem via Benders.

    First a plain weighted Benders solve at the primary weight, then a
    fixpoint refinement: lexicographically solve the cut master (primary
    objective first), explore the resulting master solution, and repeat until
    the master's lexicographic optimum is supported by actual subproblem
    values.  The returned coordinates come from the subproblem solve, so the
    endpoint is an exact vertex rather than an epsilon-capped approximation.
    """
    lam_primary = 1.0 if primary == 1 else 0.0
    res = solve_single_benders(prob, lam_primary, tol, pool, iter_limit)
    if prob.n_sub == 0 and prob.m_sub == 0:
        return _lex_master_only(prob, primary)
    use_box = False
    for _ in range(iter_limit):
        blp = master_blp(prob, pool, box=DEFAULT_BOX if use_box else None)
        if primary == 2:
            blp = BiObjectiveLP(blp.cost2, blp.cost1, blp.A, blp.senses, blp.rhs)
        walker = ParametricSimplex(blp)
        try:
            seg = walker.init_lexmin()
        except UnboundedError:
            if use_box:
                raise
            use_box = True
            continue
        t1 = float(seg.x[0] - seg.x[1])
        t2 = float(seg.x[2] - seg.x[3])
        y = np.asarray(seg.x[4:4 + prob.n_master], dtype=float)
        out = explore_point(prob, y)
        if not out.feasible:
            pool.add(out.cut)
            continue
        for c in out.cuts:
            pool.add(c)
        end = out.points[0] if primary == 1 else out.points[-1]
        if abs(end.theta1 - t1) <= 1e-7 * (1 + abs(t1)) \
                and abs(end.theta2 - t2) <= 1e-7 * (1 + abs(t2)):
            z1 = end.theta1 + float(prob.f1 @ y)
            z2 = end.theta2 + float(prob.f2 @ y)
            return z1, z2, end.theta1, end.theta2, y, end.x
    raise IterationLimitError("lexicographic endpoint did not stabilize")


def _lex_master_only(prob, primary):
    blp = BiObjectiveLP(prob.f1, prob.f2, prob.D, ["GE"] * prob.m_master, prob.d)
    if primary == 2:
        blp = BiObjectiveLP(blp.cost2, blp.cost1, blp.A, blp.senses, blp.rhs)
    seg = ParametricSimplex(blp).init_lexmin()
    y = seg.x
    return (float(prob.f1 @ y), float(prob.f2 @ y), 0.0, 0.0, y, np.zeros(0))


class _DBARun:
    def __init__(self, prob, tol, pool, rec_limit):
        self.prob = prob
        self.tol = tol
        self.pool = pool
        self.rec_limit = rec_limit
        self.solve_count = 0
        self.entries = []

    def add(self, z1, z2, theta1, theta2, y, x):
        self.entries.append((float(z1), float(z2),
                             (float(theta1), float(theta2),
                              np.asarray(y, dtype=float).copy(),
                              np.asarray(x, dtype=float).copy())))

    def endpoint(self, primary):
        self.solve_count += 1
        z1, z2, t1, t2, y, x = _lex_endpoint_benders(
            self.prob, primary, self.pool, self.tol)
        self.add(z1, z2, t1, t2, y, x)
        return np.array([z1, z2])

    def weighted(self, lam):
        self.solve_count += 1
        res = solve_single_benders(self.prob, lam, self.tol, self.pool)
        t1 = float(self.prob.c1 @ res.x) if res.x.size else 0.0
        t2 = float(self.prob.c2 @ res.x) if res.x.size else 0.0
        z1 = t1 + float(self.prob.f1 @ res.y)
        z2 = t2 + float(self.prob.f2 @ res.y)
        return z1, z2, t1, t2, res

    def recurse(self, za, zb, depth):
        if depth > self.rec_limit:
            raise RecursionLimitError("dichotomic recursion too deep")
        num = za[1] - zb[1]
        den = num + (zb[0] - za[0])
        if den <= 1e-12 or num <= 1e-12:
            return
        lam = min(max(num / den, 1e-12), 1.0 - 1e-12)
        z1, z2, t1, t2, res = self.weighted(lam)
        chord = lam * za[0] + (1.0 - lam) * za[1]
        value = lam * z1 + (1.0 - lam) * z2
        if value < chord - self.tol * (1.0 + abs(chord)):
            self.add(z1, z2, t1, t2, res.y, res.x)
            zc = (z1, z2)
            self.recurse(za, zc, depth + 1)
            self.recurse(zc, zb, depth + 1)


def run_dba(prob, tol=1e-7, rec_limit=DEFAULT_RECURSION_LIMIT):
    """Enumerate the extreme non-dominated frontier with dichotomic Benders.

    Returns a :class:`~bibenders.bbsa.BBSAResult`-shaped object whose stats
    carry ``dba_solve_count`` (number of weighted Benders solves).
    """
    t0 = time.perf_counter()
    stats = RunStats()
    pool = CutPool()
    run = _DBARun(prob, tol, pool, rec_limit)
    tb = time.perf_counter()
    left = run.endpoint(1)
    right = run.endpoint(2)
    stats.time_initial_benders = time.perf_counter() - tb
    if np.max(np.abs(left - right)) > EXPLORED_TOL:
        run.recurse((left[0], left[1]), (right[0], right[1]), 0)
    stats.iterations = run.solve_count
    stats.dba_solve_count = run.solve_count
    stats.explored_points = len(run.entries)
    return _assemble(prob, run.entries, pool, [], stats, t0)
