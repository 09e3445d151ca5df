"""Bi-objective parametric simplex: extreme non-dominated frontier enumeration.

The frontier of ``min (z1, z2)`` over a polyhedron is walked left to right:
start at the lexicographic (z1, then z2) optimum, which is optimal for the
weighted objective ``lam*z1 + (1-lam)*z2`` at ``lam = 1``, then repeatedly
find the largest ``lam`` at which some nonbasic column's weighted reduced
cost turns negative and pivot it in.  Each nondegenerate pivot moves to the
next frontier vertex; the weight intervals ``[lambda_hi, lambda_lo]`` of the
visited vertices tile [0, 1].

The walker exposes single-step advances and per-basis dual pricing for both
objectives, which the decomposition layers use for cut generation and for
partial advances from a stored point.
"""

from __future__ import annotations

import numpy as np

from .exceptions import InfeasibleError, UnboundedError
from .lp import (
    GE,
    OPT_TOL,
    Basis,
    LinearProgram,
    SimplexEngine,
    to_standard_form,
)

POINT_TOL = 1e-9  # same-vertex detection while walking
EXPLORED_TOL = 1e-6  # point identity for exploration bookkeeping


class BiObjectiveLP:
    """Two linear objectives minimized over shared rows, ``x >= 0``."""

    def __init__(self, cost1, cost2, A, senses, rhs):
        self.cost1 = np.ascontiguousarray(cost1, dtype=float)
        self.cost2 = np.ascontiguousarray(cost2, dtype=float)
        base = LinearProgram(self.cost1, A, senses, rhs)
        if self.cost2.size != base.n_vars:
            from .exceptions import DimensionMismatch

            raise DimensionMismatch("cost2 length does not match variable count")
        self.A = base.A
        self.senses = base.senses
        self.rhs = base.rhs

    @classmethod
    def from_rows(cls, cost1, cost2, rows):
        base = LinearProgram.from_rows(cost1, rows)
        return cls(cost1, cost2, base.A, base.senses, base.rhs)

    @property
    def n_vars(self):
        return self.A.shape[1]

    @property
    def n_rows(self):
        return self.A.shape[0]

    def weighted(self, lam):
        """Single-objective LP with cost ``lam*cost1 + (1-lam)*cost2``."""
        c = lam * self.cost1 + (1.0 - lam) * self.cost2
        return LinearProgram(c, self.A, self.senses, self.rhs)

    def single(self, k):
        c = self.cost1 if k == 1 else self.cost2
        return LinearProgram(c, self.A, self.senses, self.rhs)


class FrontierSegment:
    """One extreme efficient vertex with its weight interval.

    ``lambda_hi >= lambda_lo``: the vertex is optimal for every
    ``lam in [lambda_lo, lambda_hi]``.  ``weak`` flags vertices that are only
    weakly non-dominated (equal in one objective to a neighbour).
    """

    def __init__(self, z1, z2, x, lambda_hi, lambda_lo, basis=None, weak=False):
        self.z1 = float(z1)
        self.z2 = float(z2)
        self.x = np.asarray(x, dtype=float)
        self.lambda_hi = float(lambda_hi)
        self.lambda_lo = float(lambda_lo)
        self.basis = basis
        self.weak = weak

    @property
    def z(self):
        return np.array([self.z1, self.z2])

    def __repr__(self):
        return (f"FrontierSegment(z=({self.z1:.6g}, {self.z2:.6g}), "
                f"lam=[{self.lambda_hi:.6g}, {self.lambda_lo:.6g}])")


class Frontier:
    """Ordered extreme non-dominated points, z1 increasing / z2 decreasing."""

    def __init__(self, segments):
        self.segments = list(segments)

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def points(self):
        return np.array([[s.z1, s.z2] for s in self.segments]).reshape(-1, 2)

    def violations(self, tol=1e-8):
        """List of invariant violations (empty when the frontier is sound)."""
        bad = []
        segs = self.segments
        for i, s in enumerate(segs):
            if not (-tol <= s.lambda_lo <= s.lambda_hi <= 1.0 + tol):
                bad.append(f"segment {i}: lambda interval [{s.lambda_hi}, {s.lambda_lo}]")
        if not segs:
            return bad
        if abs(segs[0].lambda_hi - 1.0) > tol:
            bad.append("first segment lambda_hi != 1")
        if abs(segs[-1].lambda_lo) > tol:
            bad.append("last segment lambda_lo != 0")
        for i in range(1, len(segs)):
            a, b = segs[i - 1], segs[i]
            if b.z1 <= a.z1 + tol or b.z2 >= a.z2 - tol:
                bad.append(f"segments {i-1},{i}: not strictly ordered")
            if abs(a.lambda_lo - b.lambda_hi) > 1e-7:
                bad.append(f"segments {i-1},{i}: lambda intervals do not share endpoint")
        return bad


class ParametricSimplex:
    """Frontier walker over one :class:`BiObjectiveLP`.

    Positions carry a live simplex basis; ``advance`` performs the parametric
    pivots to the next distinct vertex.
    """

    def __init__(self, blp):
        self.blp = blp
        std, cmap = to_standard_form(LinearProgram(blp.cost1, blp.A, blp.senses, blp.rhs))
        self.std = std
        self.cmap = cmap
        self.c1 = np.concatenate([blp.cost1, np.zeros(std.n_vars - blp.n_vars)])
        self.c2 = np.concatenate([blp.cost2, np.zeros(std.n_vars - blp.n_vars)])
        self.engine = None
        self.lam = 1.0
        self._banned = np.zeros(std.n_vars, dtype=bool)

    # ---- positioning -----------------------------------------------------

    def _fresh_engine(self):
        eng = SimplexEngine(self.std.A, self.std.rhs)
        if not eng.phase1():
            raise InfeasibleError(certificate=eng.farkas_certificate())
        return eng

    def init_lexmin(self):
        """Position at the lexicographic (z1, then z2) optimum; lam = 1."""
        eng = self._fresh_engine()
        if eng.minimize(self.c1) != "optimal":
            raise UnboundedError("objective 1 unbounded", ray=self.cmap.original(eng.last_ray))
        if eng.minimize(self.c2, stay_optimal_for=self.c1) != "optimal":
            raise UnboundedError("objective 2 unbounded on the z1-optimal face",
                                 ray=self.cmap.original(eng.last_ray))
        self.engine = eng
        self.lam = 1.0
        return self._segment(lambda_hi=1.0)

    def position_at(self, lam):
        """Position at a weighted optimum; ``lam >= 1`` positions lexicographically."""
        if lam >= 1.0 - 1e-12:
            return self.init_lexmin()
        eng = self._fresh_engine()
        cw = lam * self.c1 + (1.0 - lam) * self.c2
        if eng.minimize(cw) != "optimal":
            raise UnboundedError(f"weighted objective unbounded at lam={lam}",
                                 ray=self.cmap.original(eng.last_ray))
        self.engine = eng
        self.lam = lam
        return self._segment(lambda_hi=lam)

    def restore(self, basis, lam):
        """Adopt a stored basis of this problem (e.g. from a FrontierSegment)."""
        eng = SimplexEngine(self.std.A, self.std.rhs)
        if not eng.set_basis(basis.basic):
            raise InfeasibleError("stored basis is not primal feasible")
        self.engine = eng
        self.lam = lam
        return self._segment(lambda_hi=lam)

    # ---- inspection --------------------------------------------------------

    def _segment(self, lambda_hi, lambda_lo=None, weak=False):
        if self.engine._since_refactor:
            self.engine.refactorize()  # vertex data feeds cuts: keep it crisp
        x_std = self.engine.x()
        z1 = self.engine.objective(self.c1)
        z2 = self.engine.objective(self.c2)
        if lambda_lo is None:
            nb = self.next_breakpoint()
            lambda_lo = 0.0 if nb is None else nb[1]
        return FrontierSegment(
            z1, z2, self.cmap.original(x_std), lambda_hi, lambda_lo,
            basis=Basis(self.engine.basic, self.std.n_vars), weak=weak,
        )

    def duals_pair(self):
        """Row duals pricing each objective at the current basis."""
        return self.engine.duals(self.c1), self.engine.duals(self.c2)

    def next_breakpoint(self):
        """Largest lam at which an entering candidate appears: (col, lam) or None.

        Candidates are nonbasic columns with negative z2 reduced cost; for
        each, ``lam_j = cbar2_j / (cbar2_j - cbar1_j)`` is the weight where
        its weighted reduced cost crosses zero.  Ties pick the smallest index.
        """
        eng = self.engine
        cb1 = eng.reduced_costs(self.c1)
        cb2 = eng.reduced_costs(self.c2)
        cand = cb2 < -OPT_TOL
        cand[eng.basic] = False
        cand[eng.art0:] = False
        cand[: self._banned.size] &= ~self._banned
        idx = np.flatnonzero(cand)
        if idx.size == 0:
            return None
        num = cb2[idx]
        den = cb2[idx] - cb1[idx]
        lam = np.where(np.abs(den) > 1e-15, num / den, 1.0)
        lam = np.clip(lam, 0.0, min(1.0, self.lam))
        best = float(lam.max())
        j = int(idx[lam >= best - 1e-15][0])
        return j, best

    def degenerate_pivots(self):
        return self.engine.degenerate_pivots if self.engine is not None else 0

    # ---- walking -----------------------------------------------------------

    def advance(self):
        """Pivot to the next distinct frontier vertex.

        Returns ``(segment, lam_star)`` where ``lam_star`` is the breakpoint
        at which the move happened (the previous vertex's lambda_lo and the
        new vertex's lambda_hi), or None once the basis is optimal for z2.
        Degenerate pivots are absorbed without emitting a vertex.
        """
        eng = self.engine
        z1_old = eng.objective(self.c1)
        z2_old = eng.objective(self.c2)
        while True:
            nb = self.next_breakpoint()
            if nb is None:
                return None
            j, lam_star = nb
            if eng.enter(j) is None:
                if eng._since_refactor:
                    eng.refactorize()  # stale pricing: re-derive before concluding
                    continue
                if eng.reduced_costs(self.c2)[j] <= -1e-7:
                    raise UnboundedError(
                        "objective 2 unbounded along the efficient frontier",
                        ray=self.cmap.original(eng._build_ray(j)))
                self._banned[j] = True  # noise-level direction, skip it
                continue
            self.lam = lam_star
            z1 = eng.objective(self.c1)
            z2 = eng.objective(self.c2)
            if abs(z1 - z1_old) <= POINT_TOL and abs(z2 - z2_old) <= POINT_TOL:
                continue  # degenerate: same point, new basis
            weak = z2 >= z2_old - POINT_TOL  # z1 moved, z2 did not: weakly dominated
            return self._segment(lambda_hi=lam_star, weak=weak), lam_star


def init_lexmin(blp):
    """Extreme efficient point minimizing z1, then z2 (lambda_hi = 1)."""
    return ParametricSimplex(blp).init_lexmin()


def next_breakpoint(blp, basis, lam=1.0):
    """Entering column and breakpoint weight for a stored optimal basis.

    Returns ``(entering_index, lambda_star)`` over standard-form columns, or
    None when the basis is already optimal for the second objective.
    """
    walker = ParametricSimplex(blp)
    walker.restore(basis, lam)
    return walker.next_breakpoint()


def solve_frontier(blp):
    """Enumerate the full extreme non-dominated frontier of ``blp``.

    Weakly non-dominated vertices encountered by the walk are dropped and
    their weight interval merged into the preceding segment.  Collinear
    adjacent vertices are kept; callers wanting only extreme points filter
    afterwards.
    """
    walker = ParametricSimplex(blp)
    segs = [walker.init_lexmin()]
    segs[0].lambda_hi = 1.0
    while True:
        step = walker.advance()
        if step is None:
            break
        seg, lam_star = step
        prev = segs[-1]
        prev.lambda_lo = lam_star
        if seg.z2 <= prev.z2 - POINT_TOL and seg.z1 <= prev.z1 + POINT_TOL:
            # new vertex dominates the previous one: previous was weak
            seg.lambda_hi = prev.lambda_hi
            segs[-1] = seg
        elif seg.weak:
            prev.lambda_lo = seg.lambda_lo  # absorb the weak vertex's interval
        else:
            segs.append(seg)
    segs[-1].lambda_lo = 0.0
    return Frontier(segs)


def advance_to_unexplored(blp, start, explored, point_tol=EXPLORED_TOL):
    """Walk from ``start`` to the first not-yet-explored frontier point.

    ``start`` is a FrontierSegment of this problem (its basis is re-adopted);
    ``explored`` is an iterable of (z1, z2) points matched within
    ``point_tol``.  Returns ``(path, nxt)`` where ``path`` lists the visited
    points including the start, and ``nxt`` is the first unexplored segment
    with strictly better z2 (None when the z2-optimal end is reached with
    everything explored).
    """
    explored_pts = [np.asarray(p, dtype=float).reshape(2) for p in explored]

    def is_explored(z):
        return any(np.max(np.abs(z - p)) <= point_tol for p in explored_pts)

    walker = ParametricSimplex(blp)
    seg = walker.restore(start.basis, start.lambda_hi)
    path = [seg.z]
    z2_start = seg.z2
    while True:
        if not is_explored(seg.z) and seg.z2 < z2_start - point_tol:
            return path, seg
        step = walker.advance()
        if step is None:
            return path, None
        seg, _ = step
        path.append(seg.z)
